"""
CFMA achievable rates for two users and the ergodic capacity pentagon.

The receiver decodes two integer combinations of the lattice codewords,
with coefficient vectors ``a`` then ``b``.  User ``l`` scales its lattice
by ``beta_l``; only the ratio ``gamma = beta1 / beta2`` matters.

Rates are reported raw (they can be negative) together with a validity
flag; nothing is clamped at the expectation level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .channel_stats import (
    ChannelModel,
    ExpectationEstimate,
    expect,
    expect_grid,
    log2_sum_snr,
    resolve_method,
)
from .errors import DegenerateCoefficients, SingularGamma


@dataclass(frozen=True)
class CoefficientPair:
    """Integer decoding coefficients ``a`` (first combination) and ``b``."""

    a: Tuple[int, int]
    b: Tuple[int, int]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b)
        if len(a) != 2 or len(b) != 2:
            raise DegenerateCoefficients("coefficient vectors must have two entries")
        if a == (0, 0) or b == (0, 0):
            raise DegenerateCoefficients("coefficient vectors must be nonzero")
        if a[0] * b[1] - a[1] * b[0] == 0:
            raise DegenerateCoefficients(f"a={a} and b={b} are linearly dependent")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def determinant(self) -> int:
        return self.a[0] * self.b[1] - self.a[1] * self.b[0]

    @property
    def unimodular(self) -> bool:
        return self.determinant ** 2 == 1

    @property
    def label(self) -> str:
        return f"a=({self.a[0]},{self.a[1]});b=({self.b[0]},{self.b[1]})"


SIC_1_FIRST = CoefficientPair((1, 0), (0, 1))
SIC_2_FIRST = CoefficientPair((0, 1), (1, 0))


@dataclass(frozen=True)
class Scaling:
    """Lattice scalings ``(beta1, beta2)``; both nonzero."""

    beta1: float
    beta2: float = 1.0

    def __post_init__(self):
        for name in ("beta1", "beta2"):
            v = float(getattr(self, name))
            if v == 0.0 or not math.isfinite(v):
                raise SingularGamma(f"{name} must be finite and nonzero, got {v}")
            object.__setattr__(self, name, v)

    @property
    def gamma(self) -> float:
        return self.beta1 / self.beta2

    @classmethod
    def from_gamma(cls, gamma: float) -> "Scaling":
        gamma = float(gamma)
        if gamma == 0.0 or not math.isfinite(gamma):
            raise SingularGamma(f"gamma must be finite and nonzero, got {gamma}")
        return cls(gamma, 1.0)


def as_scaling(scaling) -> Scaling:
    """Accept a `Scaling`, a ``(beta1, beta2)`` pair or a bare gamma."""
    if isinstance(scaling, Scaling):
        return scaling
    if np.ndim(scaling) == 1:
        b1, b2 = scaling
        return Scaling(b1, b2)
    return Scaling.from_gamma(scaling)


def as_coefficients(coeffs) -> CoefficientPair:
    if isinstance(coeffs, CoefficientPair):
        return coeffs
    a, b = coeffs
    return CoefficientPair(tuple(a), tuple(b))


@dataclass(frozen=True)
class RateBreakdown:
    r_first: Tuple[float, float]
    r_second: Tuple[float, float]
    se_first: float = 0.0
    se_second: float = 0.0


@dataclass(frozen=True)
class RatePair:
    R1: float
    R2: float
    valid: bool
    breakdown: RateBreakdown
    std_error: Tuple[float, float] = (0.0, 0.0)

    @property
    def sum_rate(self) -> float:
        return self.R1 + self.R2


def m_integrand(a, scaling, rho1, rho2):
    """Effective-noise term ``(a1~^2 + a2~^2) + (a1~ rho2 - a2~ rho1)^2``.

    Here ``al~ = a_l * beta_l``.  Vectorised over `rho1`, `rho2`.
    """
    s = as_scaling(scaling)
    at1 = a[0] * s.beta1
    at2 = a[1] * s.beta2
    diff = at1 * np.asarray(rho2) - at2 * np.asarray(rho1)
    return (at1 * at1 + at2 * at2) + diff * diff


def _beta_offsets(s: Scaling):
    # 0.5 * log2(beta_l^2), added outside the expectation
    return (math.log2(abs(s.beta1)), math.log2(abs(s.beta2)))


def rate_first(model: ChannelModel, a, scaling, method=None) -> Tuple[ExpectationEstimate, ExpectationEstimate]:
    """Rates ``r_l(a, beta)`` for decoding the first combination, l = 1, 2.

    The two users' integrands differ only by ``log2 beta_l^2``, so a single
    expectation of ``0.5 * log2((1 + rho1^2 + rho2^2) / M)`` is shared.
    """
    s = as_scaling(scaling)
    a = tuple(int(x) for x in a)
    if a == (0, 0):
        raise DegenerateCoefficients("a must be nonzero")
    base = expect(
        model,
        lambda r1, r2: 0.5 * (log2_sum_snr(r1, r2) - np.log2(m_integrand(a, s, r1, r2))),
        method,
    )
    off1, off2 = _beta_offsets(s)
    return base.shifted(off1), base.shifted(off2)


def rate_second(model: ChannelModel, coeffs, scaling, method=None) -> Tuple[ExpectationEstimate, ExpectationEstimate]:
    """Rates ``r_l(b | a, beta)`` for decoding the second combination."""
    c = as_coefficients(coeffs)
    s = as_scaling(scaling)
    det_sq = (c.determinant * s.beta1 * s.beta2) ** 2
    base = expect(
        model,
        lambda r1, r2: 0.5 * (np.log2(m_integrand(c.a, s, r1, r2)) - math.log2(det_sq)),
        method,
    )
    off1, off2 = _beta_offsets(s)
    return base.shifted(off1), base.shifted(off2)


def _select(a_l, b_l, first, second):
    if b_l == 0:
        return first
    if a_l == 0:
        return second
    return first if first.value <= second.value else second


def achievable_rate_pair(model: ChannelModel, coeffs, scaling, method=None) -> RatePair:
    """Per-user CFMA rate: ``r_l(a)`` if ``b_l = 0``, ``r_l(b|a)`` if ``a_l = 0``,
    otherwise the smaller of the two.

    The pair is flagged invalid when any selected component is negative; the
    reported ``R1``/``R2`` are then clamped at zero.
    """
    c = as_coefficients(coeffs)
    s = as_scaling(scaling)
    method = resolve_method(model, method)
    f1, f2 = rate_first(model, c.a, s, method)
    g1, g2 = rate_second(model, c, s, method)
    chosen = (_select(c.a[0], c.b[0], f1, g1), _select(c.a[1], c.b[1], f2, g2))
    valid = all(e.value >= 0 for e in chosen)
    breakdown = RateBreakdown((f1.value, f2.value), (g1.value, g2.value),
                              f1.std_error, g1.std_error)
    return RatePair(max(chosen[0].value, 0.0), max(chosen[1].value, 0.0), valid,
                    breakdown, (chosen[0].std_error, chosen[1].std_error))


def rate_pairs_over_gamma(model: ChannelModel, coeffs, gammas, method=None):
    """`achievable_rate_pair` for many gammas, sharing the integration points.

    Returns a list of `RatePair` in the order of `gammas`.
    """
    c = as_coefficients(coeffs)
    gammas = np.asarray(gammas, dtype=float).ravel()
    if np.any(gammas == 0) or not np.all(np.isfinite(gammas)):
        raise SingularGamma("gamma grid must be finite and exclude 0")
    a1, a2 = c.a

    def log_m(r1, r2, g):
        return np.log2((a1 * g) ** 2 + a2 ** 2 + (a1 * g * r2 - a2 * r1) ** 2)

    first_v, first_e, _ = expect_grid(
        model, lambda r1, r2, g: log2_sum_snr(r1, r2) - log_m(r1, r2, g), gammas, method)
    second_v, second_e, _ = expect_grid(model, log_m, gammas, method)
    out = []
    for i, gam in enumerate(gammas):
        s = Scaling(gam, 1.0)
        off1, off2 = _beta_offsets(s)
        first = 0.5 * first_v[i]
        second = 0.5 * (second_v[i] - math.log2((c.determinant * gam) ** 2))
        fe, se = 0.5 * first_e[i], 0.5 * second_e[i]
        r_first = (first + off1, first + off2)
        r_second = (second + off1, second + off2)
        chosen = []
        for l in range(2):
            if c.b[l] == 0:
                chosen.append((r_first[l], fe))
            elif c.a[l] == 0:
                chosen.append((r_second[l], se))
            else:
                chosen.append(min((r_first[l], fe), (r_second[l], se)))
        valid = all(v >= 0 for v, _ in chosen)
        out.append(RatePair(max(chosen[0][0], 0.0), max(chosen[1][0], 0.0), valid,
                            RateBreakdown(r_first, r_second, fe, se),
                            (chosen[0][1], chosen[1][1])))
    return out


def capacity_pentagon(model: ChannelModel, method=None):
    """Ergodic MAC capacity bounds ``(C1, C2, Csum)`` as expectation estimates."""
    method = resolve_method(model, method)
    c1 = expect(model, lambda r1, r2: 0.5 * np.log2(1.0 + r1 * r1), method)
    c2 = expect(model, lambda r1, r2: 0.5 * np.log2(1.0 + r2 * r2), method)
    cs = expect(model, lambda r1, r2: 0.5 * log2_sum_snr(r1, r2), method)
    return c1, c2, cs
