"""
Sum-capacity achievability tests for CFMA with ``a = (1, a2)``-type coefficients.

With ``a = (1, 1)`` and ``b`` a unit vector, CFMA reaches the ergodic sum
capacity at scaling ratio ``gamma`` exactly when::

    E[ log2 f(gamma)^2 - log2(gamma^2 (1 + rho1^2 + rho2^2)) ] <= 0,
    f(gamma) = gamma^2 + 1 + (gamma rho2 - rho1)^2.

Everything here is a *signed* test value, "left side minus right side";
``<= 0`` means achievable.  Besides the exact test the module offers the
Jensen-type sufficient test ``E[f] <= |gamma| 2^C``, its closed-form gamma
intervals, the mean-ratio choice ``gamma0 = mu1 / mu2``, the i.i.d. Gaussian
shortcut, and the generalisation to other integer ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .channel_stats import (
    ChannelModel,
    Degenerate,
    ExpectationEstimate,
    Gaussian,
    IntegrationRule,
    ergodic_capacity,
    moments,
    resolve_method,
)
from .errors import NotIIDGaussian, SingularGamma, ZeroCoefficient, ZeroMean

# MC verdicts need the test value to clear zero by this many standard errors
VERDICT_SIGMAS = 2.0

SCAN_TOL = 1e-6


class ConditionKind(str, Enum):
    EXACT = "exact"
    SUFFICIENT = "sufficient"
    MEAN_RATIO = "mean_ratio"
    IID_GAUSSIAN = "iid_gaussian"
    GENERAL_A = "general_a"


class Provenance(str, Enum):
    CLOSED_FORM_POSITIVE = "closed_form_positive"
    CLOSED_FORM_NEGATIVE = "closed_form_negative"
    NUMERIC_SCAN = "numeric_scan"


def verdict(value: float, std_error: float = 0.0) -> str:
    """'achievable', 'not_achievable' or 'indeterminate' for a signed test value."""
    if value + VERDICT_SIGMAS * std_error <= 0:
        return "achievable"
    if value - VERDICT_SIGMAS * std_error > 0:
        return "not_achievable"
    return "indeterminate"


@dataclass(frozen=True)
class ConditionValue:
    value: ExpectationEstimate
    kind: ConditionKind
    gamma: Optional[float] = None

    @property
    def verdict(self) -> str:
        return verdict(self.value.value, self.value.std_error)

    @property
    def holds(self) -> bool:
        return self.verdict == "achievable"


@dataclass(frozen=True)
class GammaInterval:
    lo: float
    hi: float
    provenance: Provenance

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, gamma: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= gamma <= self.hi + tol


@dataclass(frozen=True)
class GammaGrid:
    """Log-spaced scan grid over ``|gamma|`` in ``[gamma_min, gamma_max]``.

    Each enabled sign half gets `n_points` points; zero is never included.
    """

    gamma_min: float = 1e-3
    gamma_max: float = 1e3
    n_points: int = 512
    positive: bool = True
    negative: bool = True
    spacing: str = "log"

    def __post_init__(self):
        if not 0 < self.gamma_min < self.gamma_max:
            raise ValueError("need 0 < gamma_min < gamma_max")
        if self.n_points < 16:
            raise ValueError("n_points must be >= 16")
        if not (self.positive or self.negative):
            raise ValueError("grid must cover at least one sign of gamma")
        if self.spacing not in ("log", "linear"):
            raise ValueError("spacing must be 'log' or 'linear'")

    def magnitudes(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.gamma_min, self.gamma_max, self.n_points)
        return np.linspace(self.gamma_min, self.gamma_max, self.n_points)

    def halves(self) -> List[np.ndarray]:
        """Ascending gamma arrays, negative half first."""
        mags = self.magnitudes()
        out = []
        if self.negative:
            out.append(-mags[::-1])
        if self.positive:
            out.append(mags)
        return out

    def points(self) -> np.ndarray:
        return np.concatenate(self.halves())


DEFAULT_GRID = GammaGrid()


@dataclass
class SumCapacityReport:
    achievable: bool
    verdict: str
    intervals: List[GammaInterval]
    checked_gammas: List[Tuple[float, ConditionValue]]
    capacity: ExpectationEstimate
    closed_form_intervals: List[GammaInterval] = field(default_factory=list)
    a: Tuple[int, int] = (1, 1)

    @property
    def total_measure(self) -> float:
        return sum(iv.length for iv in self.intervals)


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Integrands xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def f_integrand(gamma, rho1, rho2):
    """``gamma^2 + 1 + (gamma rho2 - rho1)^2``; always > 1."""
    d = gamma * rho2 - rho1
    return gamma * gamma + 1.0 + d * d


def _general_log_ratio(a1: int, a2: int):
    def integrand(rho1, rho2, gamma):
        d = a1 * gamma * rho2 - a2 * rho1
        num = (a1 * gamma) ** 2 + a2 * a2 + d * d
        return 2.0 * np.log2(num) - np.log2(gamma * gamma * (1.0 + rho1 * rho1 + rho2 * rho2))
    return integrand


def _check_gamma(gamma) -> float:
    gamma = float(gamma)
    if gamma == 0.0 or not math.isfinite(gamma):
        raise SingularGamma(f"gamma must be finite and nonzero, got {gamma}")
    return gamma


def _check_a(a) -> Tuple[int, int]:
    a = (int(a[0]), int(a[1]))
    if a[0] == 0 or a[1] == 0:
        raise ZeroCoefficient(f"both entries of a must be nonzero, got {a}")
    return a


def _single(rule: IntegrationRule, integrand, gamma: float) -> ExpectationEstimate:
    v, e = rule.expect_grid(integrand, [gamma])
    return ExpectationEstimate(float(v[0]), float(e[0]), rule.method, rule.size)


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Pointwise conditions xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def condition_iff(model: ChannelModel, gamma: float, method=None) -> ConditionValue:
    """Exact sum-capacity test at `gamma` for ``a = (1, 1)``, ``b`` a unit vector."""
    gamma = _check_gamma(gamma)
    rule = IntegrationRule.build(model, method)
    est = _single(rule, _general_log_ratio(1, 1), gamma)
    return ConditionValue(est, ConditionKind.EXACT, gamma)


def condition_general_a(model: ChannelModel, a, gamma: float, method=None) -> ConditionValue:
    """Sum-capacity test for ``a = (a1, a2)`` with ``b = (0, 1)`` or ``(1, 0)``.

    Coincides with :func:`condition_iff` at ``a = (1, 1)``.
    """
    a = _check_a(a)
    gamma = _check_gamma(gamma)
    rule = IntegrationRule.build(model, method)
    est = _single(rule, _general_log_ratio(*a), gamma)
    return ConditionValue(est, ConditionKind.GENERAL_A, gamma)


def condition_curve(model: ChannelModel, gammas, a=(1, 1), method=None):
    """Exact test values on an array of gammas; returns ``(values, std_errors)``."""
    a = _check_a(a)
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas == 0):
        raise SingularGamma("gamma grid must exclude 0")
    rule = IntegrationRule.build(model, method)
    return rule.expect_grid(_general_log_ratio(*a), gammas)


def expected_f(model: ChannelModel, gamma):
    """Closed form ``E[f] = q2 gamma^2 - 2 mu1 mu2 gamma + q1``."""
    m = moments(model)
    gamma = np.asarray(gamma, dtype=float)
    return m.q2 * gamma * gamma - 2.0 * m.mu1 * m.mu2 * gamma + m.q1


def _capacity_term(cap: ExpectationEstimate, scale: float = 1.0):
    # scale * 2^C with a first-order standard error
    val = scale * 2.0 ** cap.value
    return val, val * math.log(2.0) * cap.std_error


def condition_sufficient(model: ChannelModel, gamma: float, method=None,
                         capacity: Optional[ExpectationEstimate] = None) -> ConditionValue:
    """Sufficient test ``E[f(gamma)] - |gamma| 2^C``.

    ``E[f]`` comes from the moments in closed form; only the capacity needs
    an expectation.  Pass `capacity` to reuse an already computed value.
    """
    gamma = _check_gamma(gamma)
    cap = capacity if capacity is not None else ergodic_capacity(model, method)
    bound, err = _capacity_term(cap, abs(gamma))
    val = float(expected_f(model, gamma)) - bound
    est = ExpectationEstimate(val, err, cap.method, cap.n_evaluations)
    return ConditionValue(est, ConditionKind.SUFFICIENT, gamma)


def sufficient_curve(model: ChannelModel, gammas, method=None,
                     capacity: Optional[ExpectationEstimate] = None):
    cap = capacity if capacity is not None else ergodic_capacity(model, method)
    gammas = np.asarray(gammas, dtype=float)
    two_c = 2.0 ** cap.value
    vals = expected_f(model, gammas) - np.abs(gammas) * two_c
    errs = np.abs(gammas) * two_c * math.log(2.0) * cap.std_error
    return vals, errs


def sufficient_gamma_intervals(model: ChannelModel, method=None,
                               capacity: Optional[ExpectationEstimate] = None) -> List[GammaInterval]:
    """Closed-form gamma intervals on which the sufficient test holds.

    With ``c = 2^(C-1)`` and ``g_pm = (mu1 mu2 pm c)^2 - q1 q2``, the positive
    interval exists when ``g_+ >= 0`` and the negative one when ``g_- >= 0``
    and ``mu1 mu2 < 0``; each runs between the roots of
    ``q2 gamma^2 - 2 (mu1 mu2 pm c) gamma + q1``.
    """
    m = moments(model)
    cap = capacity if capacity is not None else ergodic_capacity(model, method)
    half = 2.0 ** (cap.value - 1.0)
    prod = m.mu1 * m.mu2
    qq = m.q1 * m.q2
    out = []
    s_pos = prod + half
    g_pos = s_pos * s_pos - qq
    if g_pos >= 0:
        r = math.sqrt(g_pos)
        out.append(GammaInterval((s_pos - r) / m.q2, (s_pos + r) / m.q2,
                                 Provenance.CLOSED_FORM_POSITIVE))
    s_neg = prod - half
    g_neg = s_neg * s_neg - qq
    if g_neg >= 0 and prod < 0:
        r = math.sqrt(g_neg)
        out.append(GammaInterval((s_neg - r) / m.q2, (s_neg + r) / m.q2,
                                 Provenance.CLOSED_FORM_NEGATIVE))
    return out


def condition_mean_ratio(model: ChannelModel, method=None,
                         capacity: Optional[ExpectationEstimate] = None):
    """Test for the mean-ratio choice ``gamma0 = mu1 / mu2``.

    Returns ``(gamma0, ConditionValue)`` with value
    ``gamma0 (Var rho2 + 1) + (Var rho1 + 1) / gamma0 - 2^C``.  A value
    ``<= 0`` implies achievability only when ``mu1 mu2 > 0``.
    """
    m = moments(model)
    if m.mu2 == 0:
        raise ZeroMean("mean of the second effective gain is zero")
    if m.mu1 == 0:
        raise ZeroMean("mean of the first effective gain is zero; gamma0 would be 0")
    g0 = m.mu1 / m.mu2
    cap = capacity if capacity is not None else ergodic_capacity(model, method)
    bound, err = _capacity_term(cap)
    val = g0 * (m.var2 + 1.0) + (m.var1 + 1.0) / g0 - bound
    est = ExpectationEstimate(val, err, cap.method, cap.n_evaluations)
    return g0, ConditionValue(est, ConditionKind.MEAN_RATIO, g0)


def condition_iid_gaussian(model: ChannelModel, method=None,
                           capacity: Optional[ExpectationEstimate] = None) -> ConditionValue:
    """Shortcut for i.i.d. ``N(mu, sigma^2)`` effective gains at ``gamma = 1``.

    Value is ``sigma^2 - (2^(C-1) - 1)``.  Fixed equal gains count as
    ``sigma^2 = 0``.
    """
    g1, g2 = model.gains
    same = (type(g1) is type(g2)) and g1 == g2 and isinstance(g1, (Gaussian, Degenerate))
    if not same:
        raise NotIIDGaussian("both gains must share one Gaussian (or fixed) law")
    m = moments(model)
    if m.mu1 == 0:
        raise NotIIDGaussian("the i.i.d. Gaussian shortcut needs a nonzero mean")
    cap = capacity if capacity is not None else ergodic_capacity(model, method)
    bound, err = _capacity_term(cap, 0.5)
    est = ExpectationEstimate(m.var1 - (bound - 1.0), err, cap.method, cap.n_evaluations)
    return ConditionValue(est, ConditionKind.IID_GAUSSIAN, 1.0)


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Gamma scans xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
class _Scanner:
    """Evaluates one condition on many gammas with a fixed integration rule."""

    def __init__(self, model, a, method):
        self.a = _check_a(a)
        self.rule = IntegrationRule.build(model, method)
        self._integrand = _general_log_ratio(*self.a)

    def values(self, gammas):
        return self.rule.expect_grid(self._integrand, gammas)

    def value(self, gamma) -> float:
        return float(self.values([gamma])[0][0])

    def bisect(self, inside: float, outside: float, tol: float = SCAN_TOL) -> float:
        """Boundary between a point with value <= 0 and one with value > 0.

        Returns a point on the ``<= 0`` side within `tol` of the boundary.
        """
        while abs(outside - inside) > tol:
            mid = 0.5 * (inside + outside)
            if self.value(mid) <= 0:
                inside = mid
            else:
                outside = mid
        return inside

    def refine_minimum(self, left: float, right: float):
        """Bounded minimisation in ``log|gamma|`` between two same-sign gammas."""
        sign = 1.0 if left > 0 else -1.0
        lo, hi = sorted((math.log(abs(left)), math.log(abs(right))))
        res = minimize_scalar(lambda t: self.value(sign * math.exp(t)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        g = sign * math.exp(res.x)
        return g, float(res.fun)


def _scan_half(scanner: _Scanner, gs: np.ndarray, vals: np.ndarray, tol: float):
    """Maximal intervals with value <= 0 along one ascending same-sign grid."""
    inside = vals <= 0
    intervals = []
    n = gs.size
    i = 0
    while i < n:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and inside[j + 1]:
            j += 1
        lo = scanner.bisect(gs[i], gs[i - 1], tol) if i > 0 else gs[i]
        hi = scanner.bisect(gs[j], gs[j + 1], tol) if j + 1 < n else gs[j]
        intervals.append(GammaInterval(float(lo), float(hi), Provenance.NUMERIC_SCAN))
        i = j + 1
    # dips below zero that fall strictly between grid points
    for k in range(1, n - 1):
        if inside[k - 1] or inside[k] or inside[k + 1]:
            continue
        if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1]:
            g, v = scanner.refine_minimum(gs[k - 1], gs[k + 1])
            if v <= 0:
                lo = scanner.bisect(g, gs[k - 1], tol)
                hi = scanner.bisect(g, gs[k + 1], tol)
                intervals.append(GammaInterval(float(min(lo, hi)), float(max(lo, hi)),
                                               Provenance.NUMERIC_SCAN))
    intervals.sort(key=lambda iv: iv.lo)
    return intervals


def gamma_range_scan(model: ChannelModel, a=(1, 1), grid: GammaGrid = DEFAULT_GRID,
                     method=None, tol: float = SCAN_TOL) -> List[GammaInterval]:
    """Gamma intervals on which the exact test for coefficient `a` is ``<= 0``.

    The grid is evaluated in one pass, sign changes are refined by bisection
    to within `tol`, and local minima that stay above zero on the grid are
    refined by bounded minimisation in case the curve dips below zero
    between grid points.  No unimodality is assumed.  Under Monte Carlo all
    evaluations share one sample set, so the scanned curve is smooth in gamma.
    """
    scanner = _Scanner(model, a, method)
    out = []
    for gs in grid.halves():
        vals, _ = scanner.values(gs)
        out.extend(_scan_half(scanner, gs, vals, tol))
    return out


def minimum_condition(model: ChannelModel, a=(1, 1), grid: GammaGrid = DEFAULT_GRID, method=None):
    """Smallest exact-test value found over `grid` after local refinement.

    Returns ``(gamma, value, std_error)``.
    """
    scanner = _Scanner(model, a, method)
    best = None
    for gs in grid.halves():
        vals, errs = scanner.values(gs)
        k = int(np.argmin(vals))
        cand = (float(gs[k]), float(vals[k]), float(errs[k]))
        left = gs[max(k - 1, 0)]
        right = gs[min(k + 1, gs.size - 1)]
        if left != right:
            g, v = scanner.refine_minimum(left, right)
            if v < cand[1]:
                _, e = scanner.values([g])
                cand = (g, v, float(e[0]))
        if best is None or cand[1] < best[1]:
            best = cand
    return best


def check_sum_capacity(model: ChannelModel, a=(1, 1), grid: GammaGrid = DEFAULT_GRID,
                       method=None) -> SumCapacityReport:
    """Scan the exact test over `grid` and combine it with the closed forms.

    The verdict is 'achievable' when some checked gamma clears zero by the
    Monte Carlo margin, 'not_achievable'
    when every checked gamma exceeds zero by that margin, 'indeterminate'
    otherwise.  Quadrature and exact paths have zero margin.
    """
    method = resolve_method(model, method)
    a = _check_a(a)
    kind = ConditionKind.EXACT if a == (1, 1) else ConditionKind.GENERAL_A
    cap = ergodic_capacity(model, method)
    scanner = _Scanner(model, a, method)

    def as_value(g, v, e):
        est = ExpectationEstimate(float(v), float(e), method, scanner.rule.size)
        return (float(g), ConditionValue(est, kind, float(g)))

    intervals, checked = [], []
    for gs in grid.halves():
        vals, errs = scanner.values(gs)
        checked.extend(as_value(g, v, e) for g, v, e in zip(gs, vals, errs))
        intervals.extend(_scan_half(scanner, gs, vals, SCAN_TOL))
    closed = sufficient_gamma_intervals(model, method, cap) if a == (1, 1) else []
    # midpoints may fall between grid points
    extra = [0.5 * (iv.lo + iv.hi) for iv in intervals + closed]
    if extra:
        vals, errs = scanner.values(extra)
        checked.extend(as_value(g, v, e) for g, v, e in zip(extra, vals, errs))
    verdicts = [cv.verdict for _, cv in checked]
    if "achievable" in verdicts:
        overall = "achievable"
    elif all(v == "not_achievable" for v in verdicts):
        overall = "not_achievable"
    else:
        overall = "indeterminate"
    return SumCapacityReport(
        achievable=overall == "achievable",
        verdict=overall,
        intervals=intervals,
        checked_gammas=checked,
        capacity=cap,
        closed_form_intervals=closed,
        a=a,
    )
