"""Online buy/rent policies for ski rental with varying prices.

Two families live here:

* threshold policies, used when the other agents may behave adversarially:
  on day ``i`` the agent pledges ``theta_i`` and the license is bought when
  the residual price satisfies ``p_i <= theta_i``.  The agent pays its pledge
  ``theta_i`` (not ``p_i``), since it never learns the amount left unpledged.
* decisions on a known price sequence (blind-follow, the known-price optimum,
  the lambda tradeoff and generic simple algorithms): commit to a buy day
  ``d`` and pay ``P_d`` if still active on day ``d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .pricecore import PriceSeq, SeqStats, opt_at, stats

Ratio = Union[Fraction, float]  # float only for math.inf


class PreconditionError(ValueError):
    pass


def ratio(alg: int, opt: int) -> Ratio:
    """Exact ``alg / opt``; 1 when both are zero, ``inf`` when only ``opt`` is."""
    if opt == 0:
        return Fraction(1) if alg == 0 else math.inf
    return Fraction(alg, opt)


def format_ratio(r: Ratio) -> str:
    if r == math.inf:
        return "inf"
    return f"{r.numerator}/{r.denominator}"


def clamp_prediction(t_hat) -> int:
    """Predictions below one day (e.g. after adding noise) become 1."""
    return max(1, int(t_hat))


def as_lambda(lam) -> Fraction:
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    return lam


@dataclass(frozen=True)
class RunRecord:
    alg_cost: int
    opt_cost: int
    ratio: Ratio

    def to_dict(self) -> dict:
        return {
            "alg_cost": self.alg_cost,
            "opt_cost": self.opt_cost,
            "ratio": format_ratio(self.ratio),
        }


@dataclass(frozen=True)
class ThresholdPolicy:
    """Pledge ``thetas[i - 1]`` on day ``i``; days past the list pledge 0."""

    B: int
    thetas: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(self.thetas))
        for i, th in enumerate(self.thetas, start=1):
            if not 0 <= th <= self.B:
                raise ValueError(f"theta_{i}={th} outside [0, {self.B}]")

    def theta(self, i: int) -> int:
        return self.thetas[i - 1] if i <= len(self.thetas) else 0


@dataclass(frozen=True)
class Decision:
    """Buy on ``day``; ``day is None`` means rent forever."""

    day: Optional[int] = None

    def __post_init__(self):
        if self.day is not None and self.day < 1:
            raise ValueError(f"buy day must be >= 1, got {self.day}")

    @classmethod
    def buy(cls, day: int) -> "Decision":
        return cls(day)

    @classmethod
    def rent(cls) -> "Decision":
        return cls(None)

    @property
    def rents_forever(self) -> bool:
        return self.day is None

    def __str__(self):
        return "RentForever" if self.day is None else f"BuyOn({self.day})"


def baseline_pessimal(B: int) -> ThresholdPolicy:
    """Rent on day 1, pledge the full price on day 2."""
    return ThresholdPolicy(B, (0, B))


def perfect_self_policy(t_hat: int, B: int) -> ThresholdPolicy:
    """Canonical optimal thresholds when ``T = t_hat`` is known exactly.

    For ``t_hat <= B`` this is ``(0, t_hat - 2, ..., 1, 0)``, for
    ``t_hat = B + 1`` it is ``(0, B, B - 1, ..., 1)`` and beyond that the
    predictionless baseline.
    """
    t = clamp_prediction(t_hat)
    if t <= B:
        return ThresholdPolicy(B, (0,) + tuple(t - i for i in range(2, t + 1)))
    if t == B + 1:
        return ThresholdPolicy(B, (0,) + tuple(B + 2 - i for i in range(2, B + 2)))
    return baseline_pessimal(B)


def worst_case_threshold_ratio(t_hat: Optional[int], B: int) -> int:
    """Closed-form worst ratio of the optimal threshold policy: ``min(t_hat, B + 1)``."""
    if t_hat is None:
        return B + 1
    return min(clamp_prediction(t_hat), B + 1)


def run_threshold(policy: ThresholdPolicy, p: PriceSeq, T: int) -> RunRecord:
    if T < 1:
        raise ValueError(f"active days must be >= 1, got {T}")
    cost = T
    for i in range(1, min(T, p.n) + 1):
        th = policy.theta(i)
        if p.prices[i - 1] <= th:
            cost = i - 1 + th
            break
    opt = opt_at(p, T)
    return RunRecord(cost, opt, ratio(cost, opt))


def decision_cost(decision: Decision, p: PriceSeq, T: int) -> int:
    """Total cost of committing to ``decision`` on known prices for ``T`` active days."""
    d = decision.day
    if d is not None and d <= min(T, p.n):
        return p.totals[d - 1]
    if p.ends_free and p.n <= T:
        return p.n - 1
    return T


def run_decision(decision: Decision, p: PriceSeq, T: int) -> RunRecord:
    if T < 1:
        raise ValueError(f"active days must be >= 1, got {T}")
    cost = decision_cost(decision, p, T)
    opt = opt_at(p, T)
    return RunRecord(cost, opt, ratio(cost, opt))


def blind_follow(p: PriceSeq, t_hat: int) -> Decision:
    """Trust the prediction completely: buy on the cheapest day up to ``t_hat`` if that beats renting."""
    t = clamp_prediction(t_hat)
    if t >= p.prefix_min(t):
        return Decision.buy(p.prefix_argmin(t))
    return Decision.rent()


def _wait_decision(s: SeqStats) -> Decision:
    return Decision.buy(s.case_a.wait_day)


def known_price_decide(p: PriceSeq) -> Decision:
    """Predictionless optimum on known prices: wait for a bargain/free day, else buy on ``r1``."""
    s = stats(p)
    if s.case_a.applies:
        return _wait_decision(s)
    return Decision.buy(s.r1)


@dataclass(frozen=True)
class TradeoffParams:
    lam: Fraction
    r2: int
    r3: int
    robustness_bound: Fraction
    consistency_bound: Fraction
    start: int  # first day eligible for r2


def robustness_bound(c: Fraction, lam: Fraction) -> Fraction:
    return lam - 1 + c / lam


def tradeoff_params(p: PriceSeq, lam, s: Optional[SeqStats] = None) -> TradeoffParams:
    """Buy days of the lambda-tradeoff algorithm.

    ``r2`` is the first day from ``ceil((1 - lam)(r0 - 1) + lam * r1)`` on that
    minimises ``P_t - lam * OPT_t`` (falling back to ``r1`` if it costs more);
    ``r3`` minimises ``P_r / r`` among days whose ratio ``P_r / OPT_r`` stays
    within the robustness bound.
    """
    lam = as_lambda(lam)
    s = stats(p) if s is None else s
    if s.case_a.applies:
        raise PreconditionError(f"waiting case applies ({s.case_a.kind.value}); no tradeoff days")
    a, b = lam.numerator, lam.denominator
    P = p.totals
    opts = [min(t, mt) for t, mt in enumerate(p.prefix_mins, start=1)]

    start = -(-((b - a) * (s.r0 - 1) + a * s.r1) // b)
    r2, best = start, b * P[start - 1] - a * opts[start - 1]
    for t in range(start + 1, p.n + 1):
        v = b * P[t - 1] - a * opts[t - 1]
        if v < best:
            r2, best = t, v
    if P[r2 - 1] > P[s.r1 - 1]:
        r2 = s.r1

    bound = robustness_bound(s.c_opt, lam)
    num, den = bound.numerator, bound.denominator
    r3 = None
    for r in range(1, p.n + 1):
        if P[r - 1] * den <= opts[r - 1] * num:
            if r3 is None or P[r - 1] * r3 < P[r3 - 1] * r:
                r3 = r
    # r1 is always feasible, so r3 exists
    assert r3 is not None

    m = s.m_star
    consistency = Fraction(P[r2 - 1], m)
    if r3 <= m:
        consistency = max(consistency, Fraction(P[r3 - 1], r3))
    return TradeoffParams(lam, r2, r3, bound, consistency, start)


def tradeoff_decide(
    p: PriceSeq,
    t_hat: int,
    lam,
    params: Optional[TradeoffParams] = None,
    s: Optional[SeqStats] = None,
) -> Decision:
    """The lambda-tradeoff algorithm's buy day for prediction ``t_hat``.

    The guard compares ``t_hat`` with the prefix minimum ``M_{t_hat}``, not ``M*``.
    """
    lam = as_lambda(lam)
    s = stats(p) if s is None else s
    if s.case_a.applies:
        return _wait_decision(s)
    if params is None:
        params = tradeoff_params(p, lam, s)
    t = clamp_prediction(t_hat)
    return Decision.buy(params.r2 if t >= p.prefix_min(t) else params.r3)


def simple_decide(p: PriceSeq, t_hat: int, f1: int, f2: Optional[int]) -> Decision:
    """Generic simple algorithm: wait if possible, else ``f1`` when ``t_hat >= M*``, else ``f2``."""
    s = stats(p)
    if s.case_a.applies:
        return _wait_decision(s)
    if clamp_prediction(t_hat) >= s.m_star:
        return Decision.buy(f1)
    return Decision(f2)


def simple_bounds(p: PriceSeq, f1: int, f2: Optional[int]) -> tuple[Fraction, Optional[Fraction]]:
    """Consistency and robustness guarantees of a simple algorithm.

    ``f2=None`` stands for never buying in the low-prediction branch; the
    robustness is then unbounded and returned as ``None``.
    """
    s = stats(p)
    if f1 > s.r1:
        raise PreconditionError(f"f1={f1} must not exceed r1={s.r1}")
    if f2 is not None and not 1 <= f2 <= p.n:
        raise IndexError(f"f2={f2} outside 1..{p.n}")
    m, P = s.m_star, p.totals
    consistency = Fraction(P[f1 - 1], m)
    if f2 is not None and f2 < m:
        consistency = max(consistency, Fraction(P[f2 - 1], f2))
    if f2 is None:
        return consistency, None
    robustness = max(Fraction(P[f1 - 1], opt_at(p, f1)), Fraction(P[f2 - 1], opt_at(p, f2)))
    return consistency, robustness
