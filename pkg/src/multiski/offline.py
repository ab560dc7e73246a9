"""Clairvoyant baselines: the offline optimum and the best known-price ratio."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pricecore import PriceSeq, opt_at, stats


@dataclass(frozen=True)
class OptProfile:
    """``opt_by_day[t - 1]`` is the offline optimum for ``t`` active days."""

    opt_by_day: tuple[int, ...]

    def __getitem__(self, t: int) -> int:
        return self.opt_by_day[t - 1]

    @property
    def horizon(self) -> int:
        return len(self.opt_by_day)


def opt_cost(p: PriceSeq, t: int) -> int:
    """Cheapest of renting ``t`` days and buying on the best day ``<= t``.

    ``t`` may exceed the sequence length; the cost then caps at ``M*``.
    """
    return opt_at(p, t)


def opt_profile(p: PriceSeq, horizon: int | None = None) -> OptProfile:
    horizon = p.n if horizon is None else horizon
    return OptProfile(tuple(opt_at(p, t) for t in range(1, horizon + 1)))


def c_opt(p: PriceSeq) -> tuple[Fraction, tuple[int, ...]]:
    """Best deterministic competitive ratio on known prices and the days achieving it.

    Under the waiting case (a bargain at ``M*`` or a free day at ``M* + 1``)
    the ratio is 1 and the returned days are the ones worth waiting for.
    """
    s = stats(p)
    return s.c_opt, s.optimal_days
