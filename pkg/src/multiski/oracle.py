"""Brute-force ground truth for the competitive-ratio claims.

Everything here re-derives costs from scratch by enumerating price
sequences, policies, active horizons and buy days.  Nothing is taken from the
closed forms it is meant to check, except the algorithm under test itself.

Float ratios are used only to locate maxima/minima inside numpy arrays; every
reported value is rebuilt as an exact fraction from the winning cell.  The
enumerated ratios have numerators and denominators far below 2**26, so
distinct fractions never collide as doubles.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import policies
from .policies import Decision, Ratio, ThresholdPolicy, format_ratio, ratio
from .pricecore import PriceSeq, stats

DEFAULT_CAP = 10**7


class SearchSpaceError(RuntimeError):
    """The requested exhaustive search exceeds the configured cap."""


@dataclass
class OracleReport:
    claim_id: str
    instance_count: int = 0
    violations: list = field(default_factory=list)
    worst_ratio_found: Ratio = Fraction(0)
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return not self.violations

    def merge(self, other: "OracleReport") -> "OracleReport":
        out = OracleReport(
            self.claim_id,
            self.instance_count + other.instance_count,
            self.violations + other.violations,
            max(self.worst_ratio_found, other.worst_ratio_found),
            self.witness,
            {**self.details, **other.details},
        )
        if other.worst_ratio_found > self.worst_ratio_found:
            out.witness = other.witness
        return out

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "certified": self.certified,
            "instance_count": self.instance_count,
            "worst_ratio_found": format_ratio(self.worst_ratio_found),
            "witness": self.witness,
            "violations": [{"instance": i, "witness": w} for i, w in self.violations],
            "details": self.details,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _check_cap(cells: int, cap: int, what: str):
    if cells > cap:
        raise SearchSpaceError(f"{what}: {cells} cells exceed the cap of {cap}")


# -- adversarial price sequences ------------------------------------------

def adversary_sequences(B: int, horizon: int) -> list[tuple[int, ...]]:
    """Every legal price sequence an adversary can play within ``horizon`` days.

    A sequence either runs the full horizon without a free day or stops at
    its first free day.  Ordered by length, then by decreasing prices, so the
    first witness found is the one with the highest prices.
    """
    return [seq for seq in _prefixes(B, horizon) if seq[-1] == 0 or len(seq) == horizon]


def _prefixes(B: int, horizon: int) -> Iterator[tuple[int, ...]]:
    for length in range(1, horizon + 1):
        for head in itertools.product(range(B, 0, -1), repeat=length - 1):
            for last in range(B, -1, -1):
                yield head + (last,)


class _AdversaryTable:
    """One row per distinct (price prefix, T) cell an adversary can force.

    A run of ``T`` days only sees the first ``T`` prices, and nothing changes
    after a free day, so it suffices to play every legal prefix of length
    ``T`` (or a shorter one ending at a free day) against horizon ``T``.
    With ``T`` fixed only that horizon is played; otherwise every
    ``T <= horizon``.
    """

    def __init__(self, B: int, horizon: int, T: Optional[int] = None):
        self.B, self.horizon = B, horizon
        if T is None:
            self.seqs = list(_prefixes(B, horizon))
            Tcol = [len(seq) for seq in self.seqs]
        else:
            self.seqs = adversary_sequences(B, T)
            Tcol = [T] * len(self.seqs)
        N = len(self.seqs)
        prices = np.full((N, horizon), B + 1, dtype=np.int16)  # padding never triggers a buy
        for s, seq in enumerate(self.seqs):
            prices[s, : len(seq)] = seq
        self.prices = prices
        self.T = np.asarray(Tcol, dtype=np.int64)
        days = np.arange(horizon, dtype=np.int64)
        totals = np.where(prices <= B, prices + days, np.iinfo(np.int64).max)
        self.opt = np.minimum(totals.min(axis=1), self.T)

    def cost(self, thetas) -> np.ndarray:
        """Cost ``[..., cell]`` of threshold policies that pay their pledge.

        ``thetas`` is one policy or a stack of policies (last axis = day).
        """
        thetas = np.asarray(thetas, dtype=np.int16)
        single = thetas.ndim == 1
        th = np.zeros((1 if single else len(thetas), self.horizon), dtype=np.int16)
        k = min(thetas.shape[-1], self.horizon)
        th[:, :k] = thetas.reshape(th.shape[0], -1)[:, :k]
        hit = self.prices <= th[:, None, :]
        bought = hit.any(axis=-1)
        day = hit.argmax(axis=-1)  # 0-based; meaningless where nothing was bought
        pledge = np.take_along_axis(th, day, axis=1)
        cost = np.where(bought & (day < self.T), day + pledge, self.T)
        return cost[0] if single else cost

    def ratios(self, cost: np.ndarray) -> np.ndarray:
        opt = np.broadcast_to(self.opt, cost.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = cost / opt
        zero = opt == 0
        r[zero] = np.where(cost[zero] == 0, 1.0, np.inf)
        return r

    def worst(self, thetas):
        """Worst exact ratio and the first ``(prefix, T)`` cell attaining it."""
        (out,) = self.worst_many([thetas])
        return out

    def worst_many(self, stack) -> list:
        cost = self.cost(np.asarray(stack))
        worst = self.ratios(cost).argmax(axis=-1)
        return [
            (ratio(int(cost[k, s]), int(self.opt[s])), self.seqs[s], int(self.T[s]))
            for k, s in enumerate(worst)
        ]


def exhaustive_adversary(
    policy: ThresholdPolicy,
    B: int,
    horizon: int,
    bound: Optional[Ratio] = None,
    cap: int = DEFAULT_CAP,
) -> OracleReport:
    """Play every legal price sequence and horizon against ``policy``.

    With ``bound`` given, every (sequence, T) cell whose ratio exceeds it is
    reported as a violation.
    """
    _check_cap((B + 1) ** horizon, cap, "exhaustive adversary")
    table = _AdversaryTable(B, horizon)
    worst, seq, T = table.worst(policy.thetas)
    report = OracleReport(
        "adversary",
        instance_count=len(table.seqs),
        worst_ratio_found=worst,
        witness={"prices": list(seq), "T": T},
        details={"B": B, "horizon": horizon, "thetas": list(policy.thetas)},
    )
    if bound is not None:
        cost = table.cost(policy.thetas)
        r = table.ratios(cost)
        for s in np.nonzero(r > float(bound))[0]:
            exact = ratio(int(cost[s]), int(table.opt[s]))
            if exact > bound:
                report.violations.append(
                    ({"prices": list(table.seqs[s]), "T": int(table.T[s])},
                     {"ratio": format_ratio(exact)})
                )
    return report


def exhaustive_policy_search(
    B: int, horizon: int, t_hat: Optional[int] = None, cap: int = DEFAULT_CAP
) -> OracleReport:
    """Enumerate every threshold policy and find the best worst-case ratio.

    With ``t_hat`` the agent is active exactly ``T = t_hat`` days, so only the
    first ``t_hat`` thresholds matter and only those are enumerated.
    """
    length = horizon if t_hat is None else min(horizon, t_hat)
    if t_hat is not None and t_hat > horizon:
        raise ValueError(f"t_hat={t_hat} beyond horizon {horizon}")
    _check_cap((B + 1) ** length * length, cap, "exhaustive policy search")
    table = _AdversaryTable(B, length, T=t_hat)
    best, optimal = None, []
    worst_all: Ratio = Fraction(0)
    chunk = max(1, 1_000_000 // (len(table.seqs) * length))
    space = itertools.product(range(B + 1), repeat=length)
    while batch := list(itertools.islice(space, chunk)):
        for thetas, (w, _, _) in zip(batch, table.worst_many(batch)):
            worst_all = max(worst_all, w)
            if best is None or w < best:
                best, optimal = w, [thetas]
            elif w == best:
                optimal.append(thetas)
    return OracleReport(
        "policy_search",
        instance_count=(B + 1) ** length,
        worst_ratio_found=worst_all,
        details={
            "B": B,
            "horizon": length,
            "t_hat": t_hat,
            "optimal_ratio": format_ratio(best),
            "optimal_ratio_value": best,
            "optimal_set": [list(t) for t in optimal],
        },
    )


# -- known price sequences --------------------------------------------------

def complete_sequences(B: int, max_len: int) -> Iterator[PriceSeq]:
    """All complete price sequences with cap ``B`` and at most ``max_len`` days."""
    for n in range(1, max_len + 1):
        for head in itertools.product(range(1, B + 1), repeat=n - 1):
            for last in range(B + 1):
                prices = head + (last,)
                if min(i + x for i, x in enumerate(prices)) + 1 <= n:
                    yield PriceSeq(B, prices)


def _known_price_costs(p: PriceSeq):
    """Cost of each buy day (rows ``1..n``, then renting) for ``T = 1..n``, plus the optimum."""
    n = p.n
    T = np.arange(1, n + 1, dtype=np.int64)
    rent = T.copy()
    if p.ends_free:
        rent = np.minimum(rent, n - 1)
    totals = np.asarray(p.totals, dtype=np.int64)
    d = np.arange(1, n + 1, dtype=np.int64)
    cost = np.where(d[:, None] <= T[None, :], totals[:, None], rent[None, :])
    opt = np.minimum(cost.min(axis=0), rent)
    return cost, rent, opt


def _ratio_row(cost: np.ndarray, opt: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        r = cost / opt
    zero = opt == 0
    r[..., zero] = np.where(cost[..., zero] == 0, 1.0, np.inf)
    return r


def brute_force_opt(p: PriceSeq) -> list[int]:
    """Offline optimum for ``T = 1..n`` by trying every buy day and renting."""
    _, _, opt = _known_price_costs(p)
    return [int(x) for x in opt]


def brute_force_c_opt(p: PriceSeq) -> tuple[Ratio, tuple[int, ...]]:
    """Best worst-case ratio over all commit-to-a-day algorithms, and the days achieving it.

    Renting forever is unbounded unless the sequence ends at a free day, in
    which case it coincides with buying on that day.  Horizons past ``n``
    add nothing for a buy day ``d <= n``: its cost is frozen and the optimum
    already equals ``M*`` at ``T = n``.
    """
    cost, _, opt = _known_price_costs(p)
    r = _ratio_row(cost, opt)
    worst_cell = r.argmax(axis=1)
    worst = [
        ratio(int(cost[d, worst_cell[d]]), int(opt[worst_cell[d]])) for d in range(p.n)
    ]
    best = min(worst)
    return best, tuple(d + 1 for d, w in enumerate(worst) if w == best)


def decision_ratios(decision: Decision, p: PriceSeq, horizon: Optional[int] = None) -> list[Ratio]:
    """Exact ratio of a fixed decision for every ``T = 1..horizon``."""
    horizon = p.n if horizon is None else horizon
    P = p.totals
    out = []
    best = None
    for T in range(1, horizon + 1):
        if T <= p.n:
            best = P[T - 1] if best is None else min(best, P[T - 1])
        opt = min(T, best)
        d = decision.day
        if d is not None and d <= min(T, p.n):
            alg = P[d - 1]
        elif p.ends_free and p.n <= T:
            alg = p.n - 1
        else:
            alg = T
        out.append(ratio(alg, opt))
    return out


def certify_tradeoff(p: PriceSeq, lambda_grid: Iterable) -> OracleReport:
    """Check the tradeoff algorithm's robustness and consistency on every ``(T, t_hat)``.

    ``t_hat`` only influences the algorithm through which buy day it
    selects, so the decisions are computed for every ``t_hat`` first and each
    distinct one is evaluated over all ``T``.
    """
    p.check_complete()
    c, _ = brute_force_c_opt(p)
    m = min(p.totals)
    s = stats(p)
    report = OracleReport("thm6", details={"n": p.n, "B": p.B})
    for lam in lambda_grid:
        lam = policies.as_lambda(lam)
        bound = lam - 1 + c / lam
        params = None if s.case_a.applies else policies.tradeoff_params(p, lam, s)
        if params is None:
            consistency = Fraction(1)
        else:
            P = p.totals
            consistency = Fraction(P[params.r2 - 1], m)
            if params.r3 <= m:
                consistency = max(consistency, Fraction(P[params.r3 - 1], params.r3))
        by_decision: dict[Decision, list[int]] = {}
        for t_hat in range(1, p.n + 1):
            d = policies.tradeoff_decide(p, t_hat, lam, params, s)
            by_decision.setdefault(d, []).append(t_hat)
        for d, t_hats in by_decision.items():
            rs = decision_ratios(d, p)
            for T, r in enumerate(rs, start=1):
                report.worst_ratio_found = max(report.worst_ratio_found, r)
                if r > bound:
                    report.violations.append(
                        (
                            {"B": p.B, "prices": list(p.prices), "lambda": str(lam)},
                            {"T": T, "t_hat": t_hats[0], "ratio": format_ratio(r),
                             "bound": format_ratio(bound), "kind": "robustness"},
                        )
                    )
                if T in t_hats and r > consistency:
                    report.violations.append(
                        (
                            {"B": p.B, "prices": list(p.prices), "lambda": str(lam)},
                            {"T": T, "t_hat": T, "ratio": format_ratio(r),
                             "bound": format_ratio(consistency), "kind": "consistency"},
                        )
                    )
            report.instance_count += len(rs) * len(t_hats)
    return report


# -- claims exposed on the command line -------------------------------------

def certify_thm1(B: int, horizon: Optional[int] = None, cap: int = DEFAULT_CAP) -> OracleReport:
    """No threshold policy beats ``B + 1`` and only ``(0, B, *)`` attains it.

    Shorter horizons let policies that never pledge ``B`` look better than
    they are, so the horizon defaults to ``B + 2``.
    """
    horizon = B + 2 if horizon is None else horizon
    search = exhaustive_policy_search(B, horizon, cap=cap)
    best = search.details["optimal_ratio_value"]
    optimal = [tuple(t) for t in search.details["optimal_set"]]
    expected = sorted(
        (0, B) + rest for rest in itertools.product(range(B + 1), repeat=horizon - 2)
    )
    report = OracleReport(
        "thm1", search.instance_count, worst_ratio_found=best,
        details={"B": B, "horizon": horizon, "optimal_ratio": format_ratio(best),
                 "optimal_set_size": len(optimal)},
    )
    if best != B + 1:
        report.violations.append(({"B": B, "horizon": horizon},
                                  {"optimal_ratio": format_ratio(best), "expected": B + 1}))
    if sorted(optimal) != expected:
        extra = sorted(set(optimal) - set(expected))[:10]
        report.violations.append(({"B": B, "horizon": horizon},
                                  {"unexpected_optimal": [list(t) for t in extra]}))
    return report


def certify_thm2(B: int, horizon: Optional[int] = None, cap: int = DEFAULT_CAP) -> OracleReport:
    """With ``T = t_hat`` known, the optimal ratio is ``min(t_hat, B + 1)`` for every ``t_hat <= horizon``."""
    horizon = B + 2 if horizon is None else horizon
    report = OracleReport("thm2", details={"B": B, "horizon": horizon, "per_t_hat": {}})
    for t_hat in range(1, horizon + 1):
        search = exhaustive_policy_search(B, t_hat, t_hat=t_hat, cap=cap)
        best = search.details["optimal_ratio_value"]
        report.instance_count += search.instance_count
        report.worst_ratio_found = max(report.worst_ratio_found, best)
        expected = min(t_hat, B + 1)
        canonical = list(policies.perfect_self_policy(t_hat, B).thetas)
        canonical += [0] * (t_hat - len(canonical))
        report.details["per_t_hat"][t_hat] = format_ratio(best)
        if best != expected:
            report.violations.append(({"B": B, "t_hat": t_hat},
                                      {"optimal_ratio": format_ratio(best), "expected": expected}))
        if canonical[:t_hat] not in search.details["optimal_set"]:
            report.violations.append(({"B": B, "t_hat": t_hat},
                                      {"canonical_not_optimal": canonical[:t_hat]}))
    return report


def certify_thm3(sequences: Iterable[PriceSeq], claim_id: str = "thm3") -> OracleReport:
    """Known-price optimum and its optimal days agree with brute force."""
    report = OracleReport(claim_id)
    for p in sequences:
        st = stats(p)
        c, days = st.c_opt, st.optimal_days
        bc, bdays = brute_force_c_opt(p)
        report.instance_count += 1
        report.worst_ratio_found = max(report.worst_ratio_found, bc)
        if c != bc or days != bdays:
            report.violations.append(
                ({"B": p.B, "prices": list(p.prices)},
                 {"c_opt": format_ratio(c), "brute": format_ratio(bc),
                  "days": list(days), "brute_days": list(bdays)})
            )
    return report


def certify_thm6_exhaustive(B: int, horizon: int, lambda_grid: Iterable) -> OracleReport:
    grid = [policies.as_lambda(x) for x in lambda_grid]
    report = OracleReport("thm6")
    for p in complete_sequences(B, horizon):
        report = report.merge(certify_tradeoff(p, grid))
    report.details = {"B": B, "horizon": horizon, "lambdas": [str(x) for x in grid]}
    return report
