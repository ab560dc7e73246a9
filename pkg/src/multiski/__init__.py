"""Multiagent ski rental with self and others' predictions."""
from .pricecore import PriceSeq, SeqStats, CaseA, CaseKind, q_tail, stats, total_cost
from .offline import OptProfile, c_opt, opt_cost, opt_profile
from .policies import (
    Decision,
    RunRecord,
    ThresholdPolicy,
    TradeoffParams,
    baseline_pessimal,
    blind_follow,
    known_price_decide,
    perfect_self_policy,
    run_decision,
    run_threshold,
    simple_bounds,
    simple_decide,
    tradeoff_decide,
    tradeoff_params,
)
from .arena import AgentSpec, GameConfig, GameOutcome, Strategy, reduce, run_game
from .bench import SweepConfig, SweepRow, gen_instance, sweep

__version__ = "0.1.0"
