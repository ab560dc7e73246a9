"""Noise-sweep experiment harness and the ``multiski`` command line.

Random instances follow the averaged experiment: prices uniform on
``[B - floor(zB), B]``, ``T`` uniform on ``[1, 4B]`` and a self prediction
``T_hat = max(1, round(T + eps))`` with ``eps ~ Normal(0, sigma)``.

Every random quantity is derived from uniforms of a ``numpy`` generator keyed
by ``(seed, z, sample index)``, in this order per sample: one uniform for
``T``, two for the Gaussian (Box-Muller, ``g = sqrt(-2 ln(1 - u1)) cos(2 pi u2)``),
then one per price.  The noise is ``eps = sigma * g``, so all sigma and lambda
cells of a sample share the same instance and the same standard normal draw.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arena, oracle, policies
from .offline import opt_cost
from .policies import Decision, decision_cost, ratio, robustness_bound
from .pricecore import PriceSeq, stats

DEFAULT_SIGMAS = tuple(range(0, 101, 10))
DEFAULT_LAMBDAS = (Fraction(1), Fraction(1, 5))
DEFAULT_ZS = (Fraction(0), Fraction(1, 2), Fraction(1))


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    z: Fraction = Fraction(1, 2)
    B: int = 100
    sigma_grid: tuple = DEFAULT_SIGMAS
    samples_per_sigma: int = 1000
    lambdas: tuple = DEFAULT_LAMBDAS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "z", Fraction(self.z))
        object.__setattr__(self, "lambdas", tuple(policies.as_lambda(x) for x in self.lambdas))
        object.__setattr__(self, "sigma_grid", tuple(self.sigma_grid))
        if not 0 <= self.z <= 1:
            raise ValueError(f"z must lie in [0, 1], got {self.z}")
        if self.B < 2:
            raise ValueError(f"B must be >= 2, got {self.B}")
        if any(s < 0 for s in self.sigma_grid):
            raise ValueError("sigmas must be non-negative")
        if self.samples_per_sigma < 1:
            raise ValueError("need at least one sample")
        if not self.lambdas:
            raise ValueError("need at least one lambda")

    @property
    def price_floor(self) -> int:
        return self.B - math.floor(self.z * self.B)


@dataclass(frozen=True)
class Instance:
    p: PriceSeq
    T: int
    gauss: float  # standard normal draw; eps = sigma * gauss

    def t_hat(self, sigma: float) -> int:
        return max(1, math.floor(self.T + sigma * self.gauss + 0.5))


@dataclass(frozen=True)
class SweepRow:
    z: Fraction
    lam: Fraction
    sigma: float
    mean_ratio: float
    std_ratio: float
    n_samples: int


@dataclass
class SweepResult:
    rows: list[SweepRow]
    checked: int = 0
    violations: list = field(default_factory=list)


def sample_rng(cfg: SweepConfig, index: int) -> np.random.Generator:
    key = [cfg.seed & (2**64 - 1), cfg.z.numerator, cfg.z.denominator, index]
    return np.random.default_rng(np.random.SeedSequence(key))


def _draw_prices(rng, lo: int, B: int, count: int) -> list[int]:
    u = rng.random(count)
    return [lo + int(x) for x in np.floor(u * (B - lo + 1))]


def _truncate(prices: list[int]) -> list[int]:
    if 0 in prices:
        return prices[: prices.index(0) + 1]
    return prices


def gen_instance(cfg: SweepConfig, index: int) -> Instance:
    """Draw the ``index``-th instance of a sweep; pure function of the config and index."""
    rng = sample_rng(cfg, index)
    B, lo = cfg.B, cfg.price_floor
    u_t, u1, u2 = rng.random(3)
    T = 1 + int(u_t * 4 * B)
    gauss = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    prices = _truncate(_draw_prices(rng, lo, B, 4 * B))
    if prices[-1] != 0:
        # 4B days always cover M* + 1; extend so the r3 search can reach its optimum
        s = stats(PriceSeq(B, prices))
        need = math.ceil(s.c_opt * s.m_star / min(cfg.lambdas)) + B
        if need > len(prices):
            prices = _truncate(prices + _draw_prices(rng, lo, B, need - len(prices)))
    return Instance(PriceSeq(B, prices), T, gauss)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Average tradeoff ratio per (lambda, sigma) cell, checking every sample's bound exactly."""
    lams, sigmas = cfg.lambdas, cfg.sigma_grid
    ratios = np.empty((len(lams), len(sigmas), cfg.samples_per_sigma))
    result = SweepResult([])
    for k in range(cfg.samples_per_sigma):
        inst = gen_instance(cfg, k)
        p, T = inst.p, inst.T
        s = stats(p)
        opt = opt_cost(p, T)
        for a, lam in enumerate(lams):
            params = None if s.case_a.applies else policies.tradeoff_params(p, lam, s)
            bound = robustness_bound(s.c_opt, lam)
            for b, sigma in enumerate(sigmas):
                d = policies.tradeoff_decide(p, inst.t_hat(sigma), lam, params, s)
                r = ratio(decision_cost(d, p, T), opt)
                result.checked += 1
                if r > bound:
                    result.violations.append(
                        {"sample": k, "lambda": str(lam), "sigma": sigma, "ratio": str(r), "bound": str(bound)}
                    )
                ratios[a, b, k] = float(r)
    n = cfg.samples_per_sigma
    for a, lam in enumerate(lams):
        for b, sigma in enumerate(sigmas):
            xs = ratios[a, b]
            std = float(xs.std(ddof=1)) if n > 1 else 0.0
            result.rows.append(SweepRow(cfg.z, lam, sigma, float(xs.mean()), std, n))
    return result


def sweep(cfg: SweepConfig) -> list[SweepRow]:
    res = run_sweep(cfg)
    if res.violations:
        raise BoundViolation(f"{len(res.violations)} samples exceed their bound, first: {res.violations[0]}")
    return res.rows


def _fmt_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    f = float(x)
    return repr(f) if Fraction(f) == x else f"{x.numerator}/{x.denominator}"


def _fmt_num(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def write_csv(rows: Sequence[SweepRow], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["z", "lambda", "sigma", "mean_ratio", "std_ratio", "n"])
    for r in rows:
        w.writerow([
            _fmt_rational(r.z), _fmt_rational(r.lam), _fmt_num(r.sigma),
            repr(r.mean_ratio), repr(r.std_ratio), r.n_samples,
        ])


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


# --- command line -----------------------------------------------------------

def parse_sigmas(text: str) -> tuple:
    """``"0:100:10"`` (inclusive range) or a comma list."""
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("sigma step must be positive")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        vals = [lo + i * step for i in range(count)]
    else:
        vals = [float(x) for x in text.split(",") if x]
    return tuple(int(v) if v == int(v) else v for v in vals)


def parse_fractions(text: str) -> tuple:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


POLICIES = ("baseline", "perfect_self", "known_prices", "blind", "tradeoff")


def run_policy(name: str, p: PriceSeq, T: int, t_hat: Optional[int], lam) -> policies.RunRecord:
    if name in ("perfect_self", "blind", "tradeoff") and t_hat is None:
        raise ValueError(f"policy {name} needs --T-hat")
    if name == "baseline":
        return policies.run_threshold(policies.baseline_pessimal(p.B), p, T)
    if name == "perfect_self":
        return policies.run_threshold(policies.perfect_self_policy(t_hat, p.B), p, T)
    if name == "known_prices":
        d = policies.known_price_decide(p)
    elif name == "blind":
        d = policies.blind_follow(p, t_hat)
    else:
        if lam is None:
            raise ValueError("policy tradeoff needs --lambda")
        d = policies.tradeoff_decide(p, t_hat, lam)
    return policies.run_decision(d, p, T)


def _cmd_stats(args) -> int:
    p = PriceSeq.load(args.price)
    print(json.dumps(stats(p).to_dict(), indent=2))
    return 0


def _cmd_run(args) -> int:
    p = PriceSeq.load(args.price)
    rec = run_policy(args.policy, p, args.T, args.T_hat, args.lam)
    print(json.dumps(rec.to_dict(), indent=2))
    return 0


def _cmd_sweep(args) -> int:
    rows, bad = [], 0
    for z in args.z:
        cfg = SweepConfig(z, args.B, args.sigmas, args.samples, args.lambdas, args.seed)
        res = run_sweep(cfg)
        rows += res.rows
        bad += len(res.violations)
        for v in res.violations[:5]:
            print(f"bound violated at z={z}: {v}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 1 if bad else 0


def _cmd_oracle(args) -> int:
    B, h = args.B, args.horizon
    if args.claim == "thm1":
        rep = oracle.certify_thm1(B, h)
    elif args.claim == "thm2":
        rep = oracle.certify_thm2(B, h)
    elif args.claim == "thm3":
        rep = oracle.certify_thm3(oracle.complete_sequences(B, h or B + 3))
    else:
        lams = args.lambdas or tuple(Fraction(k, 10) for k in range(1, 11))
        rep = oracle.certify_thm6_exhaustive(B, h or B + 2, lams)
    print(rep.to_json(indent=2))
    return 0 if rep.certified else 1


def _cmd_game(args) -> int:
    out = arena.run_game(arena.GameConfig.load(args.config))
    print(json.dumps(out.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multiski", description="Multiagent ski rental with predictions.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("stats", help="sequence statistics of a price file")
    sp.add_argument("price")
    sp.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("run", help="run one policy on a price file")
    sp.add_argument("--policy", choices=POLICIES, required=True)
    sp.add_argument("--price", required=True)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--T-hat", dest="T_hat", type=int)
    sp.add_argument("--lambda", dest="lam", type=Fraction)
    sp.set_defaults(func=_cmd_run)

    sp = sub.add_parser("sweep", help="average-ratio curves over prediction noise")
    sp.add_argument("--B", type=int, default=100)
    sp.add_argument("--z", type=parse_fractions, default=DEFAULT_ZS)
    sp.add_argument("--sigmas", type=parse_sigmas, default=DEFAULT_SIGMAS)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--lambdas", type=parse_fractions, default=DEFAULT_LAMBDAS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("oracle", help="brute-force certification of a closed-form claim")
    sp.add_argument("--claim", choices=("thm1", "thm2", "thm3", "thm6"), required=True)
    sp.add_argument("--B", type=int, required=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--lambdas", type=parse_fractions)
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("game", help="play an n-agent game from a config file")
    sp.add_argument("config")
    sp.set_defaults(func=_cmd_game)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, oracle.SearchSpaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
