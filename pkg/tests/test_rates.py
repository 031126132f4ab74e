import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macwt.channel import (ChannelState, FadingParams, sample_batch,
                           sample_state, sba_expand)
from macwt.montecarlo import (ESA, SBA, ergodic_region, spawn_rngs,
                              worker_count)
from macwt.rates import (ConstantPolicy, PowerBudget, PowerDecision,
                         RudimentaryEsaPolicy, RudimentarySbaPolicy,
                         ZeroPolicy, rates_esa, rates_esa_cj,
                         rates_esa_general, rates_gs_cj, rates_sba,
                         rudimentary_policy_esa, rudimentary_policy_sba)

UNIT = ChannelState(1, 1, 1, 1)
PARAMS = FadingParams.symmetric(1.0, 0.75)


def _t(triple):
    return (triple.r1, triple.r2, triple.rsum)


def test_power_decision_validation():
    with pytest.raises(ValueError):
        PowerDecision(-1.0, 0.0)
    with pytest.raises(ValueError):
        PowerDecision(0.0, 0.0, 0.0, -1e-9)
    with pytest.raises(ValueError):
        PowerBudget(-1.0, 1.0)


# ---------------------------------------------------------------------------
# frozen single-state values
# ---------------------------------------------------------------------------

def test_gs_cj_hand_values():
    assert _t(rates_gs_cj(UNIT, PowerDecision(0, 0))) == pytest.approx(
        (0.0, 0.0, 0.0))
    # symmetric main/eve gains cancel in the sum rate
    t = rates_gs_cj(UNIT, PowerDecision(1, 1))
    assert t.rsum == pytest.approx(0.0, abs=1e-15)
    s = ChannelState(2.0, 0, 1.0, 0)   # |h1|^2 = 4, |g1|^2 = 1
    t = rates_gs_cj(s, PowerDecision(1, 0))
    assert t.r1 == pytest.approx(math.log2(5) - 1.0, abs=1e-12)


def test_sba_hand_values():
    block = sba_expand(ChannelState(1, 2, 1, 1), ChannelState(2, 1, 1, 1))
    assert _t(rates_sba(block, 0, 0)) == pytest.approx((0.0, 0.0, 0.0))
    # A1 = 5, A2 = 5, |D|^2 = 9, C = 2
    t = rates_sba(block, 1, 1)
    assert t.rsum == pytest.approx(
        0.5 * (math.log2(20) - math.log2(5)), abs=1e-12)
    assert t.rsum == pytest.approx(1.0, abs=1e-12)
    same = sba_expand(UNIT, UNIT)
    assert rates_sba(same, 1, 1).rsum == pytest.approx(0.0, abs=1e-15)


def test_esa_hand_values():
    assert _t(rates_esa(UNIT, 0, 0)) == pytest.approx((0.0, 0.0, 0.0))
    t = rates_esa(UNIT, 1, 1)
    assert t.rsum == pytest.approx(0.5 * math.log2(9 / 5), abs=1e-12)
    assert t.rsum == pytest.approx(0.42399845, abs=1e-6)
    no_eve = ChannelState(1, 1, 0, 0)
    assert rates_esa(no_eve, 1, 1).rsum == pytest.approx(math.log2(3))


def test_esa_cj_hand_values():
    assert _t(rates_esa_cj(UNIT, PowerDecision(0, 0, 0, 0))) == pytest.approx(
        (0.0, 0.0, 0.0))
    t = rates_esa_cj(UNIT, PowerDecision(1, 0, 0, 1))
    assert t.rsum == pytest.approx(0.5 * math.log2(9 / 5), abs=1e-12)


def test_esa_general_hand_values():
    # theta = omega = 0 kills both product terms at symmetric unit gains
    t = rates_esa_general(UNIT, 0.0, 0.0, 1, 1)
    assert t.rsum == pytest.approx(0.0, abs=1e-15)
    z = rates_esa_general(ChannelState(0, 0, 1, 1), math.pi, 0.0, 1, 1)
    assert z.rsum <= 0.0


def test_negative_power_rejected():
    for fn in (lambda: rates_esa(UNIT, -1, 0),
               lambda: rates_sba(sba_expand(UNIT, UNIT), -1, 0),
               lambda: rates_esa_general(UNIT, 1, 1, 0, -2)):
        with pytest.raises(ValueError):
            fn()


# ---------------------------------------------------------------------------
# reduction identities
# ---------------------------------------------------------------------------

def test_esa_general_reduces_to_esa(rng):
    for _ in range(1000):
        s = sample_state(PARAMS, rng)
        p1, p2 = rng.exponential(2.0, 2)
        a = rates_esa(s, p1, p2)
        b = rates_esa_general(s, math.pi, 0.0, p1, p2)
        assert _t(a) == pytest.approx(_t(b), abs=1e-12)


def test_esa_cj_zero_jamming_reduces_to_esa(rng):
    for _ in range(1000):
        s = sample_state(PARAMS, rng)
        p1, p2 = rng.exponential(2.0, 2)
        a = rates_esa(s, p1, p2)
        b = rates_esa_cj(s, PowerDecision(p1, p2, 0.0, 0.0))
        assert _t(a) == pytest.approx(_t(b), abs=1e-13)


def test_gs_cj_no_jamming_no_eve_is_plain_mac(rng):
    for _ in range(200):
        s = sample_state(PARAMS, rng)
        s = ChannelState(s.h1, s.h2, 0.0, 0.0)
        p1, p2 = rng.exponential(2.0, 2)
        t = rates_gs_cj(s, PowerDecision(p1, p2))
        assert t.r1 == pytest.approx(math.log2(1 + s.h1_sq * p1), abs=1e-12)
        assert t.rsum == pytest.approx(
            math.log2(1 + s.h1_sq * p1 + s.h2_sq * p2), abs=1e-12)


# ---------------------------------------------------------------------------
# monotonicity of the repetition sum rate in the gains
# ---------------------------------------------------------------------------

pos = st.floats(1e-3, 1e3)


@given(pos, pos, pos, pos, pos, pos, st.floats(1.001, 4.0))
@settings(max_examples=200)
def test_esa_rsum_monotone_in_gains(h1, h2, g1, g2, p1, p2, scale):
    def rsum(h1_, h2_, g1_, g2_):
        s = ChannelState(math.sqrt(h1_), math.sqrt(h2_), math.sqrt(g1_),
                         math.sqrt(g2_))
        return rates_esa(s, p1, p2).rsum

    base = rsum(h1, h2, g1, g2)
    assert rsum(h1 * scale, h2, g1, g2) >= base - 1e-12
    assert rsum(h1, h2 * scale, g1, g2) >= base - 1e-12
    assert rsum(h1, h2, g1 * scale, g2) <= base + 1e-12
    assert rsum(h1, h2, g1, g2 * scale) <= base + 1e-12


# ---------------------------------------------------------------------------
# rudimentary policies
# ---------------------------------------------------------------------------

def test_rudimentary_esa_policy_on_off(rng):
    budget = PowerBudget(1.0, 1.0)
    strong = ChannelState(10.0, 10.0, 0.1, 0.1)
    assert rudimentary_policy_esa(strong, budget) == PowerDecision(1.0, 1.0)
    silent = ChannelState(0.0, 0.0, 1.0, 1.0)
    assert rudimentary_policy_esa(silent, budget) == PowerDecision(0, 0)
    # symmetric unit gains: integrand = log2(9/5)/2 > 0 -> on
    assert rudimentary_policy_esa(UNIT, budget).p1 == 1.0


def test_rudimentary_sba_policy(rng):
    budget = PowerBudget(2.0, 3.0)
    params = FadingParams(1.0, 1.0, 0.5, 0.25)
    dead = ChannelState(0.0, 0.0, 1.0, 1.0)
    d = rudimentary_policy_sba(dead, budget, params, 64, rng)
    assert d == PowerDecision(0, 0)
    strong = ChannelState(50.0, 50.0, 0.01, 0.01)
    d = rudimentary_policy_sba(strong, budget, params, 64, rng)
    # candidate powers pbar_k / (2 var_g_{3-k})
    assert d.p1 == pytest.approx(2.0 / (2 * 0.25))
    assert d.p2 == pytest.approx(3.0 / (2 * 0.5))
    with pytest.raises(ValueError):
        rudimentary_policy_sba(strong, budget, params, 0, rng)


def test_sba_policy_decision_stable_across_inner_seeds():
    budget = PowerBudget(1.0, 1.0)
    favorable = ChannelState(5.0, 5.0, 0.3, 0.3)
    decisions = set()
    for seed in range(5):
        g = np.random.default_rng(seed)
        d = rudimentary_policy_sba(favorable, budget, PARAMS, 10_000, g)
        decisions.add(d.p1 > 0)
    assert decisions == {True}


def test_batched_policies_match_scalar_decide(rng):
    batch = sample_batch(PARAMS, 256, rng)
    budget = PowerBudget(3.0, 3.0)
    policies = [
        RudimentaryEsaPolicy(budget),
        RudimentarySbaPolicy(budget, PARAMS, m_inner=128, seed=5),
        ConstantPolicy(1.0, 2.0, 0.5, 0.0),
    ]
    for policy in policies:
        p1, p2, q1, q2 = policy.decide_batch(batch)
        for i in (0, 100, 255):
            d = policy.decide(batch.state(i))
            assert (p1[i], p2[i], q1[i], q2[i]) == pytest.approx(
                (d.p1, d.p2, d.q1, d.q2))


# ---------------------------------------------------------------------------
# Monte Carlo engine
# ---------------------------------------------------------------------------

def test_ergodic_region_zero_policy():
    est = ergodic_region(ESA, ZeroPolicy(), PARAMS, 1000, seed=1)
    assert _t(est.mean) == pytest.approx((0.0, 0.0, 0.0))
    assert _t(est.stderr) == pytest.approx((0.0, 0.0, 0.0))
    assert est.avg_power == pytest.approx((0.0, 0.0))


def test_ergodic_region_clamps_region_view():
    # eavesdropper much stronger than receiver -> negative raw mean
    params = FadingParams(0.05, 0.05, 5.0, 5.0)
    est = ergodic_region(ESA, ConstantPolicy(5.0, 5.0), params, 20_000, seed=3)
    assert est.mean.rsum < 0
    assert est.region.rsum == 0.0


def test_ergodic_region_rejects_negative_powers():
    class Bad:
        def decide_batch(self, batch):
            n = len(batch)
            return (np.full(n, -1.0), np.zeros(n), np.zeros(n), np.zeros(n))

    with pytest.raises(ValueError):
        ergodic_region(ESA, Bad(), PARAMS, 100, seed=0)


def test_ergodic_region_stderr_scaling():
    policy = ConstantPolicy(2.0, 2.0)
    a = ergodic_region(ESA, policy, PARAMS, 20_000, seed=11)
    b = ergodic_region(ESA, policy, PARAMS, 80_000, seed=11)
    ratio = a.stderr.rsum / b.stderr.rsum
    assert ratio == pytest.approx(2.0, rel=0.2)  # 4x samples -> half stderr


def test_ergodic_region_worker_invariance():
    policy = RudimentaryEsaPolicy(PowerBudget(4.0, 4.0))
    base = ergodic_region(ESA, policy, PARAMS, 10_000, seed=7, workers=1)
    for workers in (2, 4):
        est = ergodic_region(ESA, policy, PARAMS, 10_000, seed=7,
                             workers=workers)
        assert est == base  # byte-identical reduction order


def test_ergodic_region_sba_uses_two_slots():
    policy = RudimentarySbaPolicy(PowerBudget(2.0, 2.0), PARAMS,
                                  m_inner=64, seed=9)
    est = ergodic_region(SBA, policy, PARAMS, 5000, seed=13)
    assert math.isfinite(est.mean.rsum)
    assert est.n == 5000


def test_realized_power_within_budget(rng):
    budget = PowerBudget(2.0, 5.0)
    policy = RudimentaryEsaPolicy(budget)
    est = ergodic_region(ESA, policy, PARAMS, 20_000, seed=17)
    assert est.avg_power[0] <= budget.pbar1 + 3 * est.avg_power_stderr[0] + 1e-12
    assert est.avg_power[1] <= budget.pbar2 + 3 * est.avg_power_stderr[1] + 1e-12


def test_spawn_rngs_distinct_streams():
    rngs = spawn_rngs(123, 4)
    draws = [g.random(3).tolist() for g in rngs]
    assert len({tuple(d) for d in draws}) == 4


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("MACWT_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("MACWT_WORKERS", "garbage")
    assert worker_count(default=2) == 2
    monkeypatch.delenv("MACWT_WORKERS")
    assert worker_count() == 1
