"""The n-agent pledging game and its reduction to single-agent price sequences.

Every strategy here is nonadaptive: it commits to a pledge for each day up
front and only learns whether the license was bought.  So a strategy is fully
described by its pledge schedule, which is exactly a threshold policy on the
residual price left by the other agents.

Rational strategies (known prices, blind-follow, tradeoff) need an others'
predictor.  Unless a config hands one in explicitly, the predictor is perfect
with respect to every agent whose schedule is already fixed: non-rational
agents first, then rational agents in list order.  Later rational agents can
only lower the real residual, so earlier ones still buy (and may overpay).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import policies
from .policies import Decision, Ratio, ThresholdPolicy, format_ratio, ratio
from .pricecore import PriceSeq, opt_at

THRESHOLD_KINDS = ("baseline", "perfect_self", "script")
RATIONAL_KINDS = ("known_prices", "blind", "tradeoff")


class ProtocolError(ValueError):
    """A strategy produced a pledge outside ``[0, B]``."""


@dataclass(frozen=True)
class Strategy:
    kind: str
    lam: Optional[Fraction] = None
    script: Optional[tuple[int, ...]] = None
    # explicit others' predictor: predicted residual prices, one per day
    prices: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in THRESHOLD_KINDS + RATIONAL_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "tradeoff":
            object.__setattr__(self, "lam", policies.as_lambda(self.lam))
        if self.kind == "script" and self.script is None:
            raise ValueError("script strategy needs a pledge list")

    @property
    def rational(self) -> bool:
        return self.kind in RATIONAL_KINDS

    @classmethod
    def from_dict(cls, d: dict) -> "Strategy":
        lam = d.get("lambda")
        return cls(
            d["kind"],
            Fraction(lam) if lam is not None else None,
            tuple(d["script"]) if "script" in d else None,
            tuple(d["prices"]) if "prices" in d else None,
        )


@dataclass(frozen=True)
class AgentSpec:
    T: int
    strategy: Strategy
    t_hat: Optional[int] = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"active days must be >= 1, got {self.T}")
        if self.t_hat is None:
            object.__setattr__(self, "t_hat", self.T)
        if self.t_hat < 1:
            raise ValueError(f"self prediction must be >= 1, got {self.t_hat}")


@dataclass(frozen=True)
class GameConfig:
    B: int
    agents: tuple[AgentSpec, ...]
    max_days: int

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.B < 2:
            raise ValueError(f"B must be >= 2, got {self.B}")
        if self.max_days < 1:
            raise ValueError(f"max_days must be >= 1, got {self.max_days}")
        if not self.agents:
            raise ValueError("a game needs at least one agent")

    @classmethod
    def from_dict(cls, d: dict) -> "GameConfig":
        agents = [
            AgentSpec(a["T"], Strategy.from_dict(a["strategy"]), a.get("T_hat"))
            for a in d["agents"]
        ]
        return cls(d["B"], agents, d["max_days"])

    @classmethod
    def load(cls, path) -> "GameConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class AgentOutcome:
    total_cost: int
    offline_opt: int
    ratio: Ratio
    paid_pledge: int = 0

    def to_dict(self) -> dict:
        return {
            "total_cost": self.total_cost,
            "offline_opt": self.offline_opt,
            "ratio": format_ratio(self.ratio),
            "paid_pledge": self.paid_pledge,
        }


@dataclass(frozen=True)
class GameOutcome:
    license_day: Optional[int]
    per_agent: tuple[AgentOutcome, ...]
    schedules: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "license_day": self.license_day,
            "per_agent": [a.to_dict() for a in self.per_agent],
        }


def reduce(others_daily_pledges: Sequence[int], B: int) -> PriceSeq:
    """Residual price each day, ``max(0, B - W_t)``, cut at the first free day."""
    if not others_daily_pledges:
        raise ValueError("need at least one day of pledges")
    prices = []
    for t, w in enumerate(others_daily_pledges, start=1):
        if w < 0:
            raise ValueError(f"negative pledge total {w} on day {t}")
        prices.append(max(0, B - w))
        if prices[-1] == 0:
            break
    return PriceSeq(B, prices)


def rational_pledge(p_hat: PriceSeq, decision: Decision, day: int) -> int:
    """Pledge just enough to buy on the decided day, nothing otherwise."""
    if decision.day == day and day <= p_hat.n:
        return p_hat.prices[day - 1]
    return 0


def _complete(p: PriceSeq) -> PriceSeq:
    # days past the game horizon are never reached; pad with full price
    while not p.is_complete:
        p = PriceSeq(p.B, p.prices + (p.B,) * (p.m_star + 1 - p.n))
    return p


def _others_totals(schedules, agents, skip: int, max_days: int) -> list[int]:
    totals = [0] * max_days
    for j, sched in enumerate(schedules):
        if j == skip or sched is None:
            continue
        for t in range(min(agents[j].T, max_days)):
            totals[t] += sched[t]
    return totals


def rational_decision(strategy: Strategy, p_hat: PriceSeq, t_hat: int) -> Decision:
    if strategy.kind == "known_prices":
        return policies.known_price_decide(p_hat)
    if strategy.kind == "blind":
        return policies.blind_follow(p_hat, t_hat)
    return policies.tradeoff_decide(p_hat, t_hat, strategy.lam)


def _threshold_schedule(B: int, spec: AgentSpec, max_days: int, index: int) -> tuple[int, ...]:
    st = spec.strategy
    if st.kind == "baseline":
        thetas = policies.baseline_pessimal(B).thetas
    elif st.kind == "perfect_self":
        thetas = policies.perfect_self_policy(spec.t_hat, B).thetas
    else:
        thetas = st.script
    sched = tuple(thetas[:max_days]) + (0,) * (max_days - len(thetas))
    for t, w in enumerate(sched, start=1):
        if not isinstance(w, int) or not 0 <= w <= B:
            raise ProtocolError(f"agent {index} pledged {w!r} on day {t}, outside [0, {B}]")
    return sched


def pledge_schedules(config: GameConfig) -> list[tuple[int, ...]]:
    """Each agent's pledge for days ``1..max_days``."""
    B, D, agents = config.B, config.max_days, config.agents
    schedules: list[Optional[tuple[int, ...]]] = [None] * len(agents)
    for i, spec in enumerate(agents):
        if not spec.strategy.rational:
            schedules[i] = _threshold_schedule(B, spec, D, i)
    for i, spec in enumerate(agents):
        if not spec.strategy.rational:
            continue
        if spec.strategy.prices is not None:
            p_hat = PriceSeq(B, spec.strategy.prices)
        else:
            p_hat = reduce(_others_totals(schedules, agents, i, D), B)
        p_hat = _complete(p_hat)
        decision = rational_decision(spec.strategy, p_hat, spec.t_hat)
        schedules[i] = tuple(rational_pledge(p_hat, decision, t) for t in range(1, D + 1))
    return schedules


def run_game(config: GameConfig) -> GameOutcome:
    B, D, agents = config.B, config.max_days, config.agents
    schedules = pledge_schedules(config)
    rent = [0] * len(agents)
    paid = [0] * len(agents)
    license_day = None
    for t in range(1, D + 1):
        active = [i for i, a in enumerate(agents) if a.T >= t]
        if not active:
            break
        pledges = {i: schedules[i][t - 1] for i in active}
        if sum(pledges.values()) >= B:
            license_day = t
            for i, w in pledges.items():
                paid[i] = w
            break
        for i in active:
            rent[i] += 1

    outcomes = []
    for i, a in enumerate(agents):
        cost = rent[i] + paid[i]
        p = reduce(_others_totals(schedules, agents, i, D), B)
        opt = opt_at(p, min(a.T, D))
        outcomes.append(AgentOutcome(cost, opt, ratio(cost, opt), paid[i]))
    return GameOutcome(license_day, tuple(outcomes), tuple(schedules))


def replay_agent(config: GameConfig, outcome: GameOutcome, i: int) -> policies.RunRecord:
    """Agent ``i``'s pledge schedule replayed alone against the others' residual prices."""
    B, D = config.B, config.max_days
    p = reduce(_others_totals(outcome.schedules, config.agents, i, D), B)
    policy = ThresholdPolicy(B, outcome.schedules[i])
    return policies.run_threshold(policy, p, min(config.agents[i].T, D))
