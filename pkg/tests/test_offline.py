import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from multiski.offline import c_opt, opt_cost, opt_profile
from multiski.oracle import brute_force_c_opt, brute_force_opt, complete_sequences
from multiski.pricecore import PriceSeq

from _corpus import corpus, random_complete


def test_opt_cost_examples():
    p = PriceSeq.fixed(100, 101)
    assert opt_cost(p, 40) == 40
    assert opt_cost(p, 250) == 100
    assert opt_cost(PriceSeq(3, (1, 3, 3)), 5) == 1


def test_opt_cost_rejects_empty_horizon():
    with pytest.raises(ValueError):
        opt_cost(PriceSeq.fixed(3, 4), 0)


def test_opt_profile_properties():
    for p in corpus(21, 300):
        prof = opt_profile(p, p.n + 3)
        vals = prof.opt_by_day
        assert list(vals) == sorted(vals)
        m = min(p.totals)
        for t in range(1, prof.horizon + 1):
            assert prof[t] <= min(t, m)


def test_opt_matches_bruteforce():
    for p in corpus(22, 300):
        assert list(opt_profile(p).opt_by_day) == brute_force_opt(p)


def test_c_opt_examples():
    assert c_opt(PriceSeq.fixed(100, 101)) == (Fraction(199, 100), (100,))
    assert c_opt(PriceSeq(100, (100,) * 100 + (2,) * 10)) == (Fraction(102, 100), (101,))
    ratio, days = c_opt(PriceSeq(4, (4, 4, 4, 3, 0)))
    assert ratio == 1 and days == (5,)


def test_c_opt_equals_bruteforce_small_exhaustive():
    for B in range(2, 4):
        for p in complete_sequences(B, 6):
            assert c_opt(p) == brute_force_c_opt(p)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_c_opt_equals_bruteforce_random(seed):
    p = random_complete(random.Random(seed), max_B=50)
    assert c_opt(p) == brute_force_c_opt(p)
