"""Price sequences for ski rental with varying buying prices.

A sequence holds the residual license price ``p_i`` for days ``1..n`` (the
part of ``B`` left unpledged by the other agents).  Buying on day ``i`` costs
``P_i = i - 1 + p_i`` in total.  Days are 1-indexed on every interface.

The sequence is the complete menu of buying opportunities: a purchase is only
possible on days ``1..n``.  A sequence is *complete* when ``n >= M* + 1``
(equivalently, it ends at a free day or is long enough), which pins down every
tail quantity, since ``P_i >= i - 1`` for every day.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from pathlib import Path
from typing import Optional, Sequence


class PriceSequenceError(ValueError):
    """Raised when a price sequence violates one of its invariants."""


class TruncationError(PriceSequenceError):
    pass


class CompletenessError(PriceSequenceError):
    pass


@dataclass(frozen=True)
class PriceSeq:
    """Residual buying prices ``p_1..p_n`` with license cap ``B``."""

    B: int
    prices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prices", tuple(self.prices))
        if not isinstance(self.B, int) or self.B < 2:
            raise PriceSequenceError(f"B must be an integer >= 2, got {self.B!r}")
        if not self.prices:
            raise PriceSequenceError("price sequence is empty")
        for i, x in enumerate(self.prices, start=1):
            if not isinstance(x, int) or not 0 <= x <= self.B:
                raise PriceSequenceError(f"p_{i}={x!r} outside [0, {self.B}]")
        if 0 in self.prices[:-1]:
            first = self.prices.index(0) + 1
            raise TruncationError(
                f"free day at {first} must end the sequence (length {len(self.prices)})"
            )

    @classmethod
    def fixed(cls, B: int, n: int) -> "PriceSeq":
        """Classical ski rental: the price is ``B`` every day."""
        return cls(B, (B,) * n)

    @classmethod
    def from_dict(cls, data: dict) -> "PriceSeq":
        try:
            B, prices = data["B"], data["prices"]
        except (KeyError, TypeError) as exc:
            raise PriceSequenceError(f"expected {{'B': int, 'prices': [int]}}: {exc}") from None
        return cls(B, prices)

    @classmethod
    def load(cls, path, require_complete: bool = True) -> "PriceSeq":
        """Read ``{"B": int, "prices": [int, ...]}`` from a JSON file."""
        seq = cls.from_dict(json.loads(Path(path).read_text()))
        if require_complete:
            seq.check_complete()
        return seq

    def to_dict(self) -> dict:
        return {"B": self.B, "prices": list(self.prices)}

    @property
    def n(self) -> int:
        return len(self.prices)

    def __len__(self):
        return len(self.prices)

    @property
    def ends_free(self) -> bool:
        return self.prices[-1] == 0

    def price(self, i: int) -> int:
        self._check_day(i)
        return self.prices[i - 1]

    def total_cost(self, i: int) -> int:
        self._check_day(i)
        return self.totals[i - 1]

    def _check_day(self, i: int):
        if not 1 <= i <= self.n:
            raise IndexError(f"day {i} outside 1..{self.n}")

    @cached_property
    def totals(self) -> tuple[int, ...]:
        # P_i = i - 1 + p_i, stored 0-based
        return tuple(i + x for i, x in enumerate(self.prices))

    @cached_property
    def prefix_mins(self) -> tuple[int, ...]:
        return tuple(accumulate(self.totals, min))

    @cached_property
    def m_star(self) -> int:
        return self.prefix_mins[-1]

    def prefix_min(self, t: int) -> int:
        """``M_t``: cheapest total cost over days ``1..min(t, n)``."""
        if t < 1:
            raise IndexError(f"day {t} < 1")
        return self.prefix_mins[min(t, self.n) - 1]

    def prefix_argmin(self, t: int) -> int:
        """``i_t``: first day attaining ``M_t``."""
        return self.totals.index(self.prefix_min(t)) + 1

    @property
    def is_complete(self) -> bool:
        return self.n >= self.m_star + 1

    def check_complete(self):
        if not self.is_complete:
            raise CompletenessError(
                f"sequence of length {self.n} is incomplete: prefix minimum total cost "
                f"is {self.m_star}, so at least {self.m_star + 1} days are required"
            )


def total_cost(p: PriceSeq, i: int) -> int:
    return p.total_cost(i)


def q_tail(p: PriceSeq, t: int) -> tuple[int, int]:
    """Return ``(Q_t, q_t)``, the minimum total cost and price over days ``>= t``."""
    p.check_complete()
    if t < 1:
        raise IndexError(f"day {t} < 1")
    if t > p.n:
        raise IndexError(f"day {t} beyond the last buying day {p.n}")
    return min(p.totals[t - 1:]), min(p.prices[t - 1:])


def opt_at(p: PriceSeq, t: int) -> int:
    """Offline optimum for ``t`` active days: rent throughout or buy on the best day."""
    if t < 1:
        raise ValueError(f"active days must be >= 1, got {t}")
    return min(t, p.prefix_min(t))


class CaseKind(enum.Enum):
    NONE = "none"
    FREE_DAY = "free_day"
    BARGAIN_DAY = "bargain_day"
    BARGAIN_THEN_FREE = "bargain_then_free"


@dataclass(frozen=True)
class CaseA:
    """Which 1-competitive waiting rule applies to a known price sequence.

    A bargain day can only sit at day ``M*`` and a free day only at ``M* + 1``
    (any earlier one would undercut ``M*``), so both are checked at those days.
    """

    kind: CaseKind
    bargain_day: Optional[int] = None
    free_day: Optional[int] = None

    @property
    def applies(self) -> bool:
        return self.kind is not CaseKind.NONE

    @property
    def wait_day(self) -> Optional[int]:
        # earliest 1-competitive action wins when both exist
        return self.bargain_day if self.bargain_day is not None else self.free_day


def case_a(p: PriceSeq) -> CaseA:
    m = p.m_star
    bargain = m if 1 <= m <= p.n and p.prices[m - 1] == 1 else None
    free = m + 1 if m + 1 <= p.n and p.prices[m] == 0 else None
    if bargain and free:
        return CaseA(CaseKind.BARGAIN_THEN_FREE, bargain, free)
    if bargain:
        return CaseA(CaseKind.BARGAIN_DAY, bargain_day=bargain)
    if free:
        return CaseA(CaseKind.FREE_DAY, free_day=free)
    return CaseA(CaseKind.NONE)


@dataclass(frozen=True)
class SeqStats:
    total_costs: tuple[int, ...]
    m_star: int
    i_star: int
    k: int
    r0: int
    r1: int
    c_opt: Fraction
    case_a: CaseA
    # every buy day achieving c_opt (the 1-competitive days under case (a))
    optimal_days: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "total_costs": list(self.total_costs),
            "m_star": self.m_star,
            "i_star": self.i_star,
            "k": self.k,
            "r0": self.r0,
            "r1": self.r1,
            "c_opt": f"{self.c_opt.numerator}/{self.c_opt.denominator}",
            "case_a": {
                "kind": self.case_a.kind.value,
                "bargain_day": self.case_a.bargain_day,
                "free_day": self.case_a.free_day,
            },
            "optimal_days": list(self.optimal_days),
        }


def _candidate_ratios(p: PriceSeq) -> dict[int, Fraction]:
    """Candidate buy days for the known-price optimum and their worst-case ratios.

    Days up to ``M*`` are charged ``P_r / OPT_r``; later days only qualify when
    they attain ``Q_{M*}`` and are charged ``P_r / M*``.
    """
    m, P = p.m_star, p.totals
    out = {r: Fraction(P[r - 1], opt_at(p, r)) for r in range(1, m + 1)}
    q = min(P[m - 1:])
    for r in range(m, p.n + 1):
        if P[r - 1] == q:
            out.setdefault(r, Fraction(q, m))
    return out


def stats(p: PriceSeq) -> SeqStats:
    p.check_complete()
    P, m = p.totals, p.m_star
    i_star = P.index(m) + 1
    r0 = p.n - P[::-1].index(m)
    k = next(t for t, mt in enumerate(p.prefix_mins, start=1) if mt <= t)
    ca = case_a(p)

    if m == 0:
        # free first day: everything costs nothing
        return SeqStats(P, 0, 1, k, r0, 1, Fraction(1), ca, (1,))

    cands = _candidate_ratios(p)
    best = min(cands.values())
    argmin = tuple(sorted(r for r, v in cands.items() if v == best))
    r1 = argmin[0]
    if ca.applies:
        c = Fraction(1)
        days = tuple(d for d in (ca.bargain_day, ca.free_day) if d is not None)
    else:
        q = min(P[m - 1:])
        c = min(min(Fraction(P[r - 1], r) for r in range(1, m + 1)), Fraction(q, m))
        days = argmin
    return SeqStats(P, m, i_star, k, r0, r1, c, ca, days)
