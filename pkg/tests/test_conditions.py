import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfma.channel_stats import (
    ChannelModel,
    Degenerate,
    Empirical,
    GaussHermite,
    Gaussian,
    MonteCarlo,
    ergodic_capacity,
    moments,
)
from cfma.conditions import (
    ConditionKind,
    GammaGrid,
    GammaInterval,
    Provenance,
    check_sum_capacity,
    condition_curve,
    condition_general_a,
    condition_iff,
    condition_iid_gaussian,
    condition_mean_ratio,
    condition_sufficient,
    expected_f,
    f_integrand,
    gamma_range_scan,
    minimum_condition,
    sufficient_gamma_intervals,
    verdict,
)
from cfma.errors import NotIIDGaussian, SingularGamma, ZeroCoefficient, ZeroMean

from oracles import gauss_expect, iff_integrand

V_STAR = -0.6207167989188176  # exact test at gamma = 1, rho_l ~ N(2, 0.25)
C_STAR = 1.5898833400899266

SQRT3 = math.sqrt(3.0)
# closed-form interval for fixed rho = (sqrt3, sqrt3): C = 0.5 log2 7
_S = 3.0 + math.sqrt(7.0) / 2.0
_G = _S * _S - 16.0
FIXED_LO = (_S - math.sqrt(_G)) / 4.0
FIXED_HI = (_S + math.sqrt(_G)) / 4.0


def test_fixed_interval_oracle_values():
    assert FIXED_LO == pytest.approx(0.670898, abs=1e-6)
    assert FIXED_HI == pytest.approx(1.490540, abs=1e-6)


@pytest.mark.parametrize("gamma, rho, expected", [
    (1.0, (1.0, 1.0), 2.0),
    (0.0, (3.0, 5.0), 10.0),
    (2.0, (1.0, 2.0), 14.0),
])
def test_f_integrand_examples(gamma, rho, expected):
    assert f_integrand(gamma, *rho) == expected


def test_f_integrand_lower_bound():
    rng = np.random.default_rng(0)
    g = rng.standard_cauchy(10**6)
    r1, r2 = rng.normal(0, 5, (2, 10**6))
    f = f_integrand(g, r1, r2)
    assert np.all(f > 1.0)
    assert np.all(f >= g * g)


def test_iff_fixed_examples():
    v = condition_iff(ChannelModel.fixed(1, 1), 1.0)
    assert v.value.value == pytest.approx(2 - math.log2(3), abs=1e-15)
    assert v.verdict == "not_achievable"
    v = condition_iff(ChannelModel.fixed(SQRT3, SQRT3), 1.0)
    assert v.value.value == pytest.approx(2 - math.log2(7), abs=1e-14)
    assert v.holds
    assert v.kind is ConditionKind.EXACT


def test_iff_gaussian_oracle():
    assert gauss_expect(iff_integrand(1.0), 2, 0.25, 2, 0.25) == pytest.approx(V_STAR, abs=1e-13)
    v = condition_iff(ChannelModel.gaussian(2, 0.25), 1.0)
    assert v.value.value == pytest.approx(V_STAR, abs=1e-12)
    assert v.holds


def test_iff_rejects_zero_gamma():
    with pytest.raises(SingularGamma):
        condition_iff(ChannelModel.fixed(1, 1), 0.0)
    with pytest.raises(SingularGamma):
        condition_sufficient(ChannelModel.fixed(1, 1), 0.0)


def test_sufficient_examples():
    v = condition_sufficient(ChannelModel.fixed(SQRT3, SQRT3), 1.0)
    assert v.value.value == pytest.approx(2 - math.sqrt(7), abs=1e-13)
    model = ChannelModel.gaussian(2, 0.25)
    assert float(expected_f(model, 1.0)) == pytest.approx(2.5, abs=1e-15)
    v = condition_sufficient(model, 1.0)
    assert v.value.value == pytest.approx(2.5 - 2 ** C_STAR, abs=1e-11)


def test_expected_f_matches_quadrature():
    model = ChannelModel(Gaussian(1.3, 0.7), Gaussian(-0.4, 2.1), 1.7)
    from cfma.channel_stats import expect
    for g in [-3.0, 0.2, 1.5]:
        q = expect(model, lambda r1, r2: f_integrand(g, r1, r2), GaussHermite(32)).value
        assert float(expected_f(model, g)) == pytest.approx(q, rel=1e-12)


def _probe_models(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        model = ChannelModel(Gaussian(rng.uniform(-6, 6), rng.uniform(0, 4)),
                             Gaussian(rng.uniform(-6, 6), rng.uniform(0, 4)))
        g = float(rng.choice([-1, 1]) * np.exp(rng.uniform(-1.5, 1.5)))
        out.append((model, g))
    return out


def test_jensen_ordering_quadrature():
    hits = 0
    for model, g in _probe_models(100, 1):
        suff = condition_sufficient(model, g, GaussHermite(32))
        iff = condition_iff(model, g, GaussHermite(32))
        # log-domain Jensen bound: E[2 log2 f] <= 2 log2 E[f]
        ef = float(expected_f(model, g))
        bound = 2 * math.log2(ef / (abs(g) * 2 ** ergodic_capacity(model, GaussHermite(32)).value))
        assert iff.value.value <= bound + 1e-9
        if suff.value.value <= 0:
            hits += 1
            assert iff.value.value <= 0
    assert hits > 0


def test_jensen_ordering_mc():
    for i, (model, g) in enumerate(_probe_models(20, 2)):
        mc = MonteCarlo(seed=i, n_samples=20000)
        suff = condition_sufficient(model, g, mc)
        iff = condition_iff(model, g, mc)
        if suff.value.value <= 0:
            assert iff.value.value <= 2 * iff.value.std_error


def test_closed_form_fixed_interval():
    ivs = sufficient_gamma_intervals(ChannelModel.fixed(SQRT3, SQRT3))
    assert len(ivs) == 1
    iv = ivs[0]
    assert iv.provenance is Provenance.CLOSED_FORM_POSITIVE
    assert (iv.lo, iv.hi) == pytest.approx((FIXED_LO, FIXED_HI), abs=1e-12)
    assert iv.contains(1.0)


def test_closed_form_empty_cases():
    assert sufficient_gamma_intervals(ChannelModel.fixed(1, 1)) == []
    assert sufficient_gamma_intervals(ChannelModel.gaussian(0.0, 1.0, 3.0, 0.5)) == []
    assert sufficient_gamma_intervals(ChannelModel(Degenerate(5), Degenerate(0))) == []


def test_closed_form_negative_case():
    model = ChannelModel.fixed(SQRT3, -SQRT3)
    ivs = sufficient_gamma_intervals(model)
    assert [iv.provenance for iv in ivs] == [Provenance.CLOSED_FORM_NEGATIVE]
    assert (ivs[0].lo, ivs[0].hi) == pytest.approx((-FIXED_HI, -FIXED_LO), abs=1e-12)


def _endpoint_models(n, seed):
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < n:
        mu = rng.uniform(2, 12, 2) * rng.choice([-1, 1])
        var = rng.uniform(0, 0.5 * np.abs(mu))
        model = ChannelModel(Gaussian(mu[0], var[0]), Gaussian(mu[1], var[1]))
        ivs = sufficient_gamma_intervals(model, GaussHermite(32))
        if ivs:
            found.append((model, ivs))
    return found


def test_interval_endpoints_are_roots():
    for model, ivs in _endpoint_models(20, 3):
        m = moments(model)
        c = 2 ** (ergodic_capacity(model, GaussHermite(32)).value - 1)
        for iv in ivs:
            sign = 1 if iv.provenance is Provenance.CLOSED_FORM_POSITIVE else -1
            for g in (iv.lo, iv.hi):
                terms = [m.q2 * g * g, 2 * (m.mu1 * m.mu2 + sign * c) * g, m.q1]
                val = terms[0] - terms[1] + terms[2]
                assert abs(val) <= 1e-8 * max(abs(t) for t in terms)
            for g in np.linspace(iv.lo, iv.hi, 7)[1:-1]:
                assert condition_iff(model, g, GaussHermite(32)).value.value <= 1e-9


def test_mean_ratio_examples():
    model = ChannelModel.gaussian(2, 0.25)
    g0, cv = condition_mean_ratio(model)
    assert g0 == 1.0
    assert cv.value.value + 2 ** C_STAR == pytest.approx(2.5, abs=1e-12)
    g0, cv = condition_mean_ratio(ChannelModel.fixed(SQRT3, SQRT3))
    assert g0 == pytest.approx(1.0)
    assert cv.value.value == pytest.approx(2 - math.sqrt(7), abs=1e-13)
    assert cv.holds


def test_mean_ratio_matches_expected_f():
    model = ChannelModel(Gaussian(3.0, 0.6), Gaussian(1.5, 0.2))
    g0, cv = condition_mean_ratio(model)
    suff = condition_sufficient(model, g0)
    # both tests coincide at gamma0 after dividing by gamma0
    assert cv.value.value == pytest.approx(suff.value.value / g0, abs=1e-12)


def test_mean_ratio_zero_mean():
    with pytest.raises(ZeroMean):
        condition_mean_ratio(ChannelModel.gaussian(1.0, 1.0, 0.0, 1.0))


def test_iid_gaussian_examples():
    v = condition_iid_gaussian(ChannelModel.fixed(SQRT3, SQRT3))
    assert v.value.value == pytest.approx(1 - math.sqrt(7) / 2, abs=1e-13)
    assert condition_iid_gaussian(ChannelModel.fixed(1.5 ** 0.5, 1.5 ** 0.5)).value.value == \
        pytest.approx(0.0, abs=1e-14)
    v = condition_iid_gaussian(ChannelModel.gaussian(2, 0.25))
    assert v.value.value == pytest.approx(0.25 - (2 ** (C_STAR - 1) - 1), abs=1e-12)
    assert v.holds
    v = condition_iid_gaussian(ChannelModel.gaussian(2, 0.85 ** 2))
    assert not v.holds


def test_iid_gaussian_matches_mean_ratio():
    model = ChannelModel.gaussian(3, 1.2)
    _, mr = condition_mean_ratio(model)
    iid = condition_iid_gaussian(model)
    assert iid.value.value == pytest.approx(mr.value.value / 2, abs=1e-12)


@pytest.mark.parametrize("model", [
    ChannelModel.gaussian(1, 1, 2, 1),
    ChannelModel(Gaussian(1, 1), Empirical([1.0, 2.0])),
    ChannelModel.gaussian(0, 1),
])
def test_iid_gaussian_precondition(model):
    with pytest.raises(NotIIDGaussian):
        condition_iid_gaussian(model)


def test_general_a_reduces_to_iff():
    for model, g in _probe_models(20, 4):
        a = condition_general_a(model, (1, 1), g, GaussHermite(32)).value.value
        b = condition_iff(model, g, GaussHermite(32)).value.value
        assert a == pytest.approx(b, abs=1e-12)


def test_general_a_fixed_example():
    v = condition_general_a(ChannelModel.fixed(1, 2), (2, 1), 1.0)
    assert v.value.value == pytest.approx(math.log2(196) - math.log2(6), abs=1e-13)
    assert v.value.value == pytest.approx(5.03, abs=5e-3)


def test_general_a_rejects_zero_entry():
    with pytest.raises(ZeroCoefficient):
        condition_general_a(ChannelModel.fixed(1, 2), (0, 1), 1.0)


def test_sign_flip_symmetry():
    model = ChannelModel(Gaussian(1.5, 0.4), Gaussian(2.5, 0.9))
    flipped = model.with_second_negated()
    for g in [0.3, 0.8, 2.0]:
        a = condition_iff(model, g).value.value
        b = condition_iff(flipped, -g).value.value
        assert a == pytest.approx(b, abs=1e-12)


def test_curve_matches_pointwise():
    model = ChannelModel.gaussian(2, 0.25)
    gs = np.array([-1.0, 0.5, 1.0, 3.0])
    vals, errs = condition_curve(model, gs)
    for g, v in zip(gs, vals):
        assert v == pytest.approx(condition_iff(model, g).value.value, abs=1e-12)
    assert np.all(errs == 0)


def test_verdict_rule():
    assert verdict(-0.1) == "achievable"
    assert verdict(0.0) == "achievable"
    assert verdict(0.1) == "not_achievable"
    assert verdict(-0.1, 0.1) == "indeterminate"
    assert verdict(0.3, 0.1) == "not_achievable"


def test_grid_shape():
    grid = GammaGrid(0.1, 10, 16)
    pts = grid.points()
    assert pts.size == 32 and not np.any(pts == 0)
    assert np.all(np.diff(pts) > 0)
    with pytest.raises(ValueError):
        GammaGrid(n_points=8)
    with pytest.raises(ValueError):
        GammaGrid(positive=False, negative=False)


def test_scan_fixed_contains_closed_form():
    model = ChannelModel.fixed(SQRT3, SQRT3)
    ivs = gamma_range_scan(model, grid=GammaGrid(0.1, 10, 512, negative=False))
    assert len(ivs) == 1
    iv = ivs[0]
    # exact and sufficient tests coincide for fixed channels
    assert iv.lo == pytest.approx(FIXED_LO, abs=1e-6)
    assert iv.hi == pytest.approx(FIXED_HI, abs=1e-6)
    assert iv.lo <= FIXED_LO + 1e-6 and iv.hi >= FIXED_HI - 1e-6


def test_scan_fixed_unit_gains_empty():
    model = ChannelModel.fixed(1, 1)
    assert gamma_range_scan(model) == []
    gs = np.geomspace(1e-2, 1e2, 10**4)
    vals, _ = condition_curve(model, gs)
    assert vals.min() > 0.41


def test_scan_region_one():
    model = ChannelModel.gaussian(2, 0.85 ** 2)
    assert gamma_range_scan(model) == []
    _, v, _ = minimum_condition(model)
    assert v > 0


def test_scan_gaussian_interval():
    model = ChannelModel.gaussian(2, 0.25)
    ivs = gamma_range_scan(model)
    assert len(ivs) == 1 and ivs[0].contains(1.0)
    assert ivs[0].provenance is Provenance.NUMERIC_SCAN
    for g in (ivs[0].lo, ivs[0].hi):
        assert abs(condition_iff(model, g).value.value) < 1e-5
    closed = sufficient_gamma_intervals(model)[0]
    assert ivs[0].lo <= closed.lo and closed.hi <= ivs[0].hi


def test_scan_finds_narrow_dip_between_grid_points():
    # a coarse grid whose points all sit above zero still recovers the interval
    model = ChannelModel.fixed(1.24, 1.24)
    fine = gamma_range_scan(model, grid=GammaGrid(0.1, 10, 4096, negative=False))
    assert len(fine) == 1
    coarse = gamma_range_scan(model, grid=GammaGrid(0.1, 10, 16, negative=False))
    assert len(coarse) == 1
    assert coarse[0].lo == pytest.approx(fine[0].lo, abs=1e-5)


def test_scan_sign_flip():
    model = ChannelModel.gaussian(2, 0.25, -2, 0.25)
    ivs = gamma_range_scan(model)
    assert len(ivs) == 1 and ivs[0].hi < 0 and ivs[0].contains(-1.0)


def test_check_sum_capacity_report():
    rep = check_sum_capacity(ChannelModel.gaussian(2, 0.25))
    assert rep.achievable and rep.verdict == "achievable"
    assert rep.capacity.value == pytest.approx(C_STAR, abs=1e-12)
    assert len(rep.closed_form_intervals) == 1
    assert rep.total_measure > rep.closed_form_intervals[0].length
    rep = check_sum_capacity(ChannelModel.gaussian(2, 0.85 ** 2))
    assert not rep.achievable and rep.verdict == "not_achievable"
    assert rep.intervals == [] and rep.closed_form_intervals == []


def test_check_sum_capacity_mc_indeterminate_near_boundary():
    # boundary variance at mu = 2 is about 0.692; tiny samples cannot decide
    model = ChannelModel.gaussian(2, 0.692)
    rep = check_sum_capacity(model, grid=GammaGrid(0.9, 1.1, 16, negative=False),
                             method=MonteCarlo(seed=0, n_samples=5000))
    assert rep.verdict == "indeterminate"


@settings(max_examples=25, deadline=None)
@given(mu1=st.floats(0.5, 8), mu2=st.floats(0.5, 8), v1=st.floats(0, 3), v2=st.floats(0, 3))
def test_closed_form_inside_exact(mu1, mu2, v1, v2):
    model = ChannelModel(Gaussian(mu1, v1), Gaussian(mu2, v2))
    for iv in sufficient_gamma_intervals(model, GaussHermite(32)):
        for g in np.linspace(iv.lo, iv.hi, 5):
            assert condition_iff(model, g, GaussHermite(32)).value.value <= 1e-9


def test_interval_type():
    with pytest.raises(ValueError):
        GammaInterval(2.0, 1.0, Provenance.NUMERIC_SCAN)
    assert GammaInterval(1.0, 3.0, Provenance.NUMERIC_SCAN).length == 2.0
