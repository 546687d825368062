import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfma.channel_stats import (
    ChannelModel,
    Degenerate,
    GaussHermite,
    Gaussian,
    MonteCarlo,
    ergodic_capacity,
)
from cfma.errors import DegenerateCoefficients, SingularGamma
from cfma.rates import (
    SIC_1_FIRST,
    SIC_2_FIRST,
    CoefficientPair,
    Scaling,
    achievable_rate_pair,
    capacity_pentagon,
    m_integrand,
    rate_first,
    rate_pairs_over_gamma,
    rate_second,
)

from oracles import first_rate_integrand_11, gauss_expect

C_STAR = 1.5898833400899266
R_STAR = 0.9501208697746677  # r_l(a=(1,1), beta=(1,1)), rho_l ~ N(2, 0.25)
HALF_LOG_3_2 = 0.5 * math.log2(1.5)

UNIMODULAR = [((1, 1), (0, 1)), ((1, 1), (1, 0)), ((1, 2), (0, 1)), ((2, 1), (1, 0)),
              ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, -1), (0, 1)), ((2, 3), (1, 1))]


def test_coefficient_pair_invariants():
    assert CoefficientPair((1, 1), (0, 1)).unimodular
    assert not CoefficientPair((1, 1), (0, 2)).unimodular
    assert CoefficientPair((2, 1), (1, 0)).determinant == -1
    for a, b in [((0, 0), (0, 1)), ((1, 1), (0, 0)), ((1, 2), (2, 4))]:
        with pytest.raises(DegenerateCoefficients):
            CoefficientPair(a, b)


def test_scaling_invariants():
    assert Scaling(2.0, 4.0).gamma == 0.5
    with pytest.raises(SingularGamma):
        Scaling(0.0, 1.0)
    with pytest.raises(SingularGamma):
        Scaling.from_gamma(0.0)


@pytest.mark.parametrize("a, beta, rho, expected", [
    ((1, 1), (1, 1), (1, 1), 2.0),
    ((1, 1), (1, 1), (1, 2), 3.0),
    ((1, 2), (2, 1), (3, 5), 24.0),
])
def test_m_integrand_examples(a, beta, rho, expected):
    assert m_integrand(a, beta, *rho) == pytest.approx(expected, abs=1e-15)


def test_rate_first_fixed():
    model = ChannelModel.fixed(1, 1)
    r1, r2 = rate_first(model, (1, 1), (1, 1))
    assert r1.value == pytest.approx(HALF_LOG_3_2, abs=1e-15)
    assert r2.value == pytest.approx(HALF_LOG_3_2, abs=1e-15)
    r1, _ = rate_first(model, (1, 0), (1, 1))
    assert r1.value == pytest.approx(HALF_LOG_3_2, abs=1e-15)


def test_rate_first_gaussian_oracle():
    model = ChannelModel.gaussian(2, 0.25)
    assert gauss_expect(first_rate_integrand_11, 2, 0.25, 2, 0.25) == pytest.approx(R_STAR, abs=1e-13)
    r1, r2 = rate_first(model, (1, 1), (1, 1))
    assert r1.value == pytest.approx(R_STAR, abs=1e-12)
    assert r2.value == pytest.approx(R_STAR, abs=1e-12)
    mc, _ = rate_first(model, (1, 1), (1, 1), MonteCarlo(seed=3, n_samples=10**6))
    assert abs(mc.value - R_STAR) <= 4 * mc.std_error


def test_rate_second_examples():
    model = ChannelModel.fixed(1, 1)
    _, r2 = rate_second(model, ((1, 1), (0, 1)), (1, 1))
    assert r2.value == pytest.approx(0.5, abs=1e-15)
    _, r2 = rate_second(model, ((1, 1), (0, 1)), (2, 1))
    assert r2.value == pytest.approx(0.5 * math.log2(6 / 4), abs=1e-15)
    _, r2 = rate_second(model, SIC_1_FIRST, (1, 1))
    assert r2.value == pytest.approx(0.5, abs=1e-15)


def test_rate_second_rejects_dependent():
    with pytest.raises(DegenerateCoefficients):
        rate_second(ChannelModel.fixed(1, 1), ((1, 1), (2, 2)), 1.0)


def test_achievable_pair_fixed_examples():
    model = ChannelModel.fixed(1, 1)
    rp = achievable_rate_pair(model, ((1, 1), (0, 1)), (1, 1))
    assert rp.valid
    assert rp.R1 == pytest.approx(HALF_LOG_3_2, abs=1e-15)
    assert rp.R2 == pytest.approx(HALF_LOG_3_2, abs=1e-15)
    sic = achievable_rate_pair(model, SIC_1_FIRST, (1, 1))
    assert sic.valid
    assert (sic.R1, sic.R2) == pytest.approx((HALF_LOG_3_2, 0.5), abs=1e-15)


def test_achievable_pair_gaussian_hits_capacity():
    model = ChannelModel.gaussian(2, 0.25)
    rp = achievable_rate_pair(model, ((1, 1), (0, 1)), 1.0)
    assert rp.valid
    assert rp.R2 == pytest.approx(rp.breakdown.r_second[1], abs=1e-15)
    assert rp.R1 + rp.R2 == pytest.approx(C_STAR, abs=1e-12)
    mc = achievable_rate_pair(model, ((1, 1), (0, 1)), 1.0, MonteCarlo(seed=9, n_samples=10**6))
    assert abs(mc.sum_rate - C_STAR) <= 4 * (mc.std_error[0] + mc.std_error[1])


def test_invalid_pair_is_clamped():
    # rho = 0: the first combination cannot be decoded, rates go negative
    model = ChannelModel.fixed(0.1, 0.1)
    rp = achievable_rate_pair(model, ((1, 1), (0, 1)), 1.0)
    assert not rp.valid
    assert rp.breakdown.r_first[0] < 0
    assert rp.R1 == 0.0 and rp.R2 >= 0.0


def _random_models(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield (ChannelModel(Gaussian(rng.uniform(-4, 4), rng.uniform(0, 3)),
                            Gaussian(rng.uniform(-4, 4), rng.uniform(0, 3)),
                            rng.uniform(0.2, 5)),
               float(rng.choice([-1, 1]) * np.exp(rng.uniform(-2, 2))))


@pytest.mark.parametrize("coeffs", UNIMODULAR)
def test_telescoping_identity(coeffs):
    c = CoefficientPair(*coeffs)
    for model, gamma in _random_models(5, hash(coeffs) % 1000):
        cap = ergodic_capacity(model, GaussHermite(64)).value
        f = rate_first(model, c.a, gamma, GaussHermite(64))
        s = rate_second(model, c, gamma, GaussHermite(64))
        for l, k in ((0, 1), (1, 0)):
            assert f[l].value + s[k].value == pytest.approx(cap, abs=1e-9)


def test_telescoping_identity_mc():
    model = ChannelModel.gaussian(1.5, 0.5, -0.5, 2.0)
    mc = MonteCarlo(seed=21, n_samples=10**5)
    cap = ergodic_capacity(model, mc)
    f = rate_first(model, (1, 2), 0.7, mc)
    s = rate_second(model, ((1, 2), (0, 1)), 0.7, mc)
    total = f[0].value + s[1].value
    assert abs(total - cap.value) <= f[0].std_error + s[1].std_error + cap.std_error


@pytest.mark.parametrize("c", [-1.0, 0.5, 3.0])
@pytest.mark.parametrize("coeffs", [((1, 1), (0, 1)), ((1, 2), (1, 1)), SIC_2_FIRST])
def test_common_rescaling_invariance(c, coeffs):
    model = ChannelModel(Gaussian(1.2, 0.4), Gaussian(-0.8, 1.1), 2.0)
    base = achievable_rate_pair(model, coeffs, (0.8, 1.3))
    scaled = achievable_rate_pair(model, coeffs, (0.8 * c, 1.3 * c))
    assert scaled.valid == base.valid
    assert (scaled.R1, scaled.R2) == pytest.approx((base.R1, base.R2), abs=1e-12)


def test_breakdown_offsets_follow_beta_ratio():
    model = ChannelModel(Gaussian(1.2, 0.4), Gaussian(0.3, 2.0))
    for beta in [(2.0, 1.0), (0.3, -1.7), (5.0, 0.01)]:
        bd = achievable_rate_pair(model, ((1, 1), (1, 0)), beta).breakdown
        expected = math.log2(abs(beta[0] / beta[1]))
        assert bd.r_first[0] - bd.r_first[1] == pytest.approx(expected, abs=1e-9)
        assert bd.r_second[0] - bd.r_second[1] == pytest.approx(expected, abs=1e-9)


def test_sign_symmetry():
    model = ChannelModel(Gaussian(1.0, 0.5), Gaussian(2.0, 0.3))
    flipped = model.with_second_negated()
    for coeffs in [((1, 1), (0, 1)), ((1, 2), (0, 1)), SIC_1_FIRST]:
        for g in [0.4, 1.0, 2.5]:
            a = achievable_rate_pair(model, coeffs, g)
            b = achievable_rate_pair(flipped, coeffs, -g)
            assert (a.R1, a.R2, a.valid) == pytest.approx((b.R1, b.R2, b.valid), abs=1e-12)


def test_fixed_channel_has_no_variance():
    rp = achievable_rate_pair(ChannelModel.fixed(2, 3), ((1, 1), (1, 0)), 0.5)
    assert rp.std_error == (0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(a1=st.integers(-5, 5), a2=st.integers(-5, 5),
       b1=st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-3),
       b2=st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-3),
       r1=st.floats(-50, 50), r2=st.floats(-50, 50))
def test_m_integrand_positive(a1, a2, b1, b2, r1, r2):
    if (a1, a2) == (0, 0):
        return
    m = m_integrand((a1, a2), (b1, b2), r1, r2)
    assert m >= (a1 * b1) ** 2 + (a2 * b2) ** 2 > 0
    assert np.isfinite(np.log2(m))


@pytest.mark.parametrize("model, expected", [
    (ChannelModel.fixed(1, 1), (0.5, 0.5, 0.5 * math.log2(3))),
    (ChannelModel.fixed(0, 0), (0.0, 0.0, 0.0)),
])
def test_pentagon_fixed(model, expected):
    got = tuple(e.value for e in capacity_pentagon(model))
    assert got == pytest.approx(expected, abs=1e-15)


def test_pentagon_gaussian():
    model = ChannelModel.gaussian(2, 0.25)
    c1, c2, cs = capacity_pentagon(model)
    oracle_c1 = gauss_expect(lambda x, y: 0.5 * np.log2(1 + x * x) + 0 * y, 2, 0.25, 2, 0.25)
    assert c1.value == pytest.approx(oracle_c1, abs=1e-12)
    assert c2.value == pytest.approx(oracle_c1, abs=1e-12)
    assert cs.value == pytest.approx(C_STAR, abs=1e-12)
    assert max(c1.value, c2.value) < cs.value < c1.value + c2.value


def test_sic_corners_match_capacity_terms():
    model = ChannelModel(Gaussian(1.0, 0.7), Gaussian(-2.0, 0.2), 1.5)
    c1, c2, cs = capacity_pentagon(model)
    first = achievable_rate_pair(model, SIC_1_FIRST, 1.0)
    assert first.R2 == pytest.approx(c2.value, abs=1e-12)
    assert first.R1 == pytest.approx(cs.value - c2.value, abs=1e-12)
    second = achievable_rate_pair(model, SIC_2_FIRST, 1.0)
    assert second.R1 == pytest.approx(c1.value, abs=1e-12)
    assert second.R2 == pytest.approx(cs.value - c1.value, abs=1e-12)


@pytest.mark.parametrize("coeffs", [((1, 1), (0, 1)), ((1, 2), (1, 1)), ((0, 1), (1, 0))])
def test_batched_rates_match_pointwise(coeffs):
    model = ChannelModel(Gaussian(1.5, 0.5), Gaussian(2.0, 1.0))
    gammas = [-2.0, 0.3, 1.0, 4.0]
    batch = rate_pairs_over_gamma(model, coeffs, gammas)
    for g, rp in zip(gammas, batch):
        ref = achievable_rate_pair(model, coeffs, g)
        assert rp.valid == ref.valid
        assert (rp.R1, rp.R2) == pytest.approx((ref.R1, ref.R2), abs=1e-12)
        assert rp.breakdown.r_first == pytest.approx(ref.breakdown.r_first, abs=1e-12)
        assert rp.breakdown.r_second == pytest.approx(ref.breakdown.r_second, abs=1e-12)


def test_batched_rates_reject_zero_gamma():
    with pytest.raises(SingularGamma):
        rate_pairs_over_gamma(ChannelModel.fixed(1, 1), ((1, 1), (0, 1)), [1.0, 0.0])


def test_fixed_channel_closed_forms():
    rng = np.random.default_rng(5)
    for _ in range(20):
        r1, r2 = rng.uniform(-3, 3, 2)
        g = float(rng.uniform(0.2, 3))
        model = ChannelModel(Degenerate(r1), Degenerate(r2))
        m = g * g + 1 + (g * r2 - r1) ** 2
        s = 1 + r1 * r1 + r2 * r2
        bd = achievable_rate_pair(model, ((1, 1), (0, 1)), g).breakdown
        assert bd.r_first[0] == pytest.approx(0.5 * math.log2(g * g * s / m), abs=1e-12)
        assert bd.r_second[1] == pytest.approx(0.5 * math.log2(m / g ** 2), abs=1e-12)
