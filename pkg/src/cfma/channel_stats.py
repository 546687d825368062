"""
Channel-gain laws and ergodic expectations over them.

Every rate and condition in this package is an expectation over the pair of
effective gains ``rho_l = sqrt(P) * h_l``.  This module owns the gain laws,
the sampling of ``(rho_1, rho_2)`` and three ways of taking the expectation:

* ``Exact``        -- both gains fixed, integrand evaluated once;
* ``GaussHermite`` -- tensor-product Gauss-Hermite rule (Gaussian/fixed gains);
* ``MonteCarlo``   -- seeded sampling with a standard-error estimate.

All rates are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import MethodUnsupported, NonFiniteIntegrand

LOG_BASE = 2.0

DEFAULT_GH_NODES = 64
DEFAULT_MC_SAMPLES = 10**6


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Gain laws xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
@dataclass(frozen=True)
class Degenerate:
    """A fixed (non-fading) channel gain."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"degenerate gain must be finite, got {self.value}")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Gaussian:
    """Channel gain ``h ~ N(mean, variance)``."""

    mean: float
    variance: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("gaussian parameters must be finite")
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", float(self.variance))

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class Empirical:
    """Channel gain drawn uniformly (with replacement) from observed samples."""

    samples: tuple

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("empirical gain needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("empirical samples must be finite")
        object.__setattr__(self, "samples", tuple(arr.tolist()))


GainDistribution = Union[Degenerate, Gaussian, Empirical]


def normalize_gain(gain: GainDistribution) -> GainDistribution:
    """Collapse zero-variance Gaussians to ``Degenerate``."""
    if isinstance(gain, Gaussian) and gain.variance == 0.0:
        return Degenerate(gain.mean)
    if not isinstance(gain, (Degenerate, Gaussian, Empirical)):
        raise TypeError(f"not a gain distribution: {gain!r}")
    return gain


def negate_gain(gain: GainDistribution) -> GainDistribution:
    """Law of ``-h`` given the law of ``h``."""
    if isinstance(gain, Degenerate):
        return Degenerate(-gain.value)
    if isinstance(gain, Gaussian):
        return Gaussian(-gain.mean, gain.variance)
    return Empirical(tuple(-s for s in gain.samples))


def parse_gain(text: str, base_dir=None) -> GainDistribution:
    """Parse the canonical textual form of a gain law.

    Accepted forms are ``degenerate:v``, ``gaussian:mu,var`` and
    ``empirical:path.csv`` (one decimal sample per line).  Relative empirical
    paths are resolved against `base_dir` first, then the working directory.
    """
    kind, sep, body = text.strip().partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ValueError(f"gain spec {text!r} is missing ':'")
    if kind == "degenerate":
        return Degenerate(float(body))
    if kind == "gaussian":
        parts = body.split(",")
        if len(parts) != 2:
            raise ValueError(f"gaussian spec needs 'mu,var', got {body!r}")
        return normalize_gain(Gaussian(float(parts[0]), float(parts[1])))
    if kind == "empirical":
        path = Path(body.strip())
        if not path.is_absolute() and base_dir is not None:
            candidate = Path(base_dir) / path
            if candidate.exists():
                path = candidate
        lines = path.read_text().split()
        return Empirical(tuple(float(s) for s in lines))
    raise ValueError(f"unknown gain kind {kind!r}")


def format_gain(gain: GainDistribution) -> str:
    if isinstance(gain, Degenerate):
        return f"degenerate:{gain.value!r}"
    if isinstance(gain, Gaussian):
        return f"gaussian:{gain.mean!r},{gain.variance!r}"
    return f"empirical:<{len(gain.samples)} samples>"


@dataclass(frozen=True)
class ChannelModel:
    """Two independent gain laws and the common transmit power ``P``."""

    gain1: GainDistribution
    gain2: GainDistribution
    power: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.power) and self.power > 0):
            raise ValueError(f"power must be > 0, got {self.power}")
        object.__setattr__(self, "gain1", normalize_gain(self.gain1))
        object.__setattr__(self, "gain2", normalize_gain(self.gain2))
        object.__setattr__(self, "power", float(self.power))

    @property
    def gains(self):
        return (self.gain1, self.gain2)

    @property
    def is_fixed(self) -> bool:
        return all(isinstance(g, Degenerate) for g in self.gains)

    @property
    def supports_quadrature(self) -> bool:
        return all(isinstance(g, (Degenerate, Gaussian)) for g in self.gains)

    def with_second_negated(self) -> "ChannelModel":
        """Same model with ``h_2`` replaced by ``-h_2``."""
        return ChannelModel(self.gain1, negate_gain(self.gain2), self.power)

    @classmethod
    def fixed(cls, rho1: float, rho2: float) -> "ChannelModel":
        """Non-fading channel with effective gains ``(rho1, rho2)`` at ``P = 1``."""
        return cls(Degenerate(rho1), Degenerate(rho2), 1.0)

    @classmethod
    def gaussian(cls, mean1, var1, mean2=None, var2=None, power=1.0) -> "ChannelModel":
        """Independent Gaussian gains; the second user defaults to the first's law."""
        mean2 = mean1 if mean2 is None else mean2
        var2 = var1 if var2 is None else var2
        return cls(Gaussian(mean1, var1), Gaussian(mean2, var2), power)


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Expectation methods xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
@dataclass(frozen=True)
class MonteCarlo:
    seed: int = 0
    n_samples: int = DEFAULT_MC_SAMPLES

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if int(self.n_samples) < 1:
            raise ValueError("n_samples must be positive")


@dataclass(frozen=True)
class GaussHermite:
    nodes: int = DEFAULT_GH_NODES

    def __post_init__(self):
        if int(self.nodes) < 1:
            raise ValueError("nodes must be positive")


@dataclass(frozen=True)
class Exact:
    pass


Method = Union[MonteCarlo, GaussHermite, Exact]


def default_method(model: ChannelModel) -> Method:
    """Exact for fixed channels, Gauss-Hermite(64) for Gaussian gains, else MC(10^6)."""
    if model.is_fixed:
        return Exact()
    if model.supports_quadrature:
        return GaussHermite(DEFAULT_GH_NODES)
    return MonteCarlo(seed=0, n_samples=DEFAULT_MC_SAMPLES)


def resolve_method(model: ChannelModel, method) -> Method:
    return default_method(model) if method is None else method


@dataclass(frozen=True)
class ExpectationEstimate:
    """Value of ``E[g(rho_1, rho_2)]`` plus how it was obtained."""

    value: float
    std_error: float
    method: Method
    n_evaluations: int

    def __float__(self):
        return float(self.value)

    def shifted(self, offset: float) -> "ExpectationEstimate":
        """Estimate of ``E[g] + offset`` (constant offset, same error)."""
        return ExpectationEstimate(self.value + offset, self.std_error,
                                   self.method, self.n_evaluations)

    def scaled(self, factor: float) -> "ExpectationEstimate":
        return ExpectationEstimate(self.value * factor,
                                   self.std_error * abs(factor),
                                   self.method, self.n_evaluations)


@dataclass(frozen=True)
class ChannelMoments:
    """Means, variances and ``q_l = 1 + E[rho_l^2]`` of the effective gains."""

    mu1: float
    mu2: float
    var1: float
    var2: float
    q1: float = field(init=False)
    q2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q1", 1.0 + self.var1 + self.mu1 ** 2)
        object.__setattr__(self, "q2", 1.0 + self.var2 + self.mu2 ** 2)


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Sampling and integration xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def derive_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit child seed for grid point `index`.

    The mixing is numpy's ``SeedSequence`` hash of ``(master_seed, index)``,
    so results do not depend on evaluation order or worker count.
    """
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _draw(gain: GainDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(gain, Degenerate):
        return np.full(n, gain.value)
    if isinstance(gain, Gaussian):
        return gain.mean + gain.std * rng.standard_normal(n)
    samples = np.asarray(gain.samples)
    return samples[rng.integers(0, samples.size, size=n)]


def effective_gain_samples(model: ChannelModel, n: int, seed: int) -> np.ndarray:
    """Draw `n` i.i.d. pairs ``(rho_1, rho_2)`` as an ``(n, 2)`` array.

    Each user gets its own child stream of `seed`, so the draws of one user do
    not depend on the law of the other.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    streams = np.random.SeedSequence(int(seed)).spawn(2)
    scale = math.sqrt(model.power)
    out = np.empty((n, 2))
    for col, (gain, ss) in enumerate(zip(model.gains, streams)):
        out[:, col] = scale * _draw(gain, n, np.random.default_rng(ss))
    return out


def _gh_rule(gain: GainDistribution, nodes: int, scale: float):
    if isinstance(gain, Degenerate):
        return np.array([scale * gain.value]), np.array([1.0])
    t, w = np.polynomial.hermite.hermgauss(nodes)
    x = gain.mean + math.sqrt(2.0 * gain.variance) * t
    return scale * x, w / math.sqrt(math.pi)


def quadrature_nodes(model: ChannelModel, nodes: int):
    """Flattened tensor-product Gauss-Hermite nodes and weights for ``(rho_1, rho_2)``.

    Fixed gains use a single node of weight one.
    """
    if not model.supports_quadrature:
        raise MethodUnsupported("Gauss-Hermite quadrature needs Gaussian or fixed gains")
    scale = math.sqrt(model.power)
    x1, w1 = _gh_rule(model.gain1, nodes, scale)
    x2, w2 = _gh_rule(model.gain2, nodes, scale)
    rho1 = np.repeat(x1, x2.size)
    rho2 = np.tile(x2, x1.size)
    weights = np.outer(w1, w2).ravel()
    return rho1, rho2, weights


@dataclass(frozen=True, eq=False)
class IntegrationRule:
    """Integration points for ``(rho_1, rho_2)`` under one method.

    Quadrature and exact rules carry weights; Monte Carlo rules carry equally
    weighted samples (``weights is None``) and report standard errors.
    Building the rule once lets many integrands share the same samples.
    """

    rho1: np.ndarray
    rho2: np.ndarray
    weights: object
    method: Method

    @classmethod
    def build(cls, model: ChannelModel, method=None) -> "IntegrationRule":
        method = resolve_method(model, method)
        if isinstance(method, Exact):
            if not model.is_fixed:
                raise MethodUnsupported("Exact expectation needs both gains fixed")
            scale = math.sqrt(model.power)
            return cls(np.array([scale * model.gain1.value]),
                       np.array([scale * model.gain2.value]), np.array([1.0]), method)
        if isinstance(method, GaussHermite):
            r1, r2, w = quadrature_nodes(model, int(method.nodes))
            return cls(r1, r2, w, method)
        if isinstance(method, MonteCarlo):
            samples = effective_gain_samples(model, int(method.n_samples), method.seed)
            return cls(np.ascontiguousarray(samples[:, 0]),
                       np.ascontiguousarray(samples[:, 1]), None, method)
        raise TypeError(f"unknown expectation method {method!r}")

    @property
    def size(self) -> int:
        return self.rho1.size

    def reduce(self, vals):
        """Mean and standard error along the leading (integration) axis."""
        vals = np.asarray(vals, dtype=float)
        n = self.size
        if vals.ndim == 0:
            vals = np.full(n, float(vals))
        if not np.all(np.isfinite(vals)):
            raise NonFiniteIntegrand("integrand is NaN or infinite at an integration point")
        if self.weights is not None:
            w = self.weights.reshape((-1,) + (1,) * (vals.ndim - 1))
            mean = np.sum(w * vals, axis=0)
            return mean, np.zeros_like(mean)
        # np.sum is pairwise in index order: independent of chunking elsewhere
        mean = np.sum(vals, axis=0) / n
        if n > 1:
            return mean, np.std(vals, axis=0, ddof=1) / math.sqrt(n)
        return mean, np.zeros_like(mean)

    def expect(self, integrand: Callable) -> ExpectationEstimate:
        mean, err = self.reduce(integrand(self.rho1, self.rho2))
        if np.ndim(mean) != 0:
            raise ValueError("integrand must return one value per point")
        return ExpectationEstimate(float(mean), float(err), self.method, self.size)

    def expect_grid(self, integrand: Callable, grid):
        """Expectations of ``g(rho1, rho2, t)`` for each ``t`` in `grid`.

        `integrand` is called with ``rho1[:, None], rho2[:, None], t[None, :]``
        and must broadcast to ``(N, len(t))``; the grid is processed in blocks.
        Returns ``(values, std_errors)``.
        """
        grid = np.asarray(grid, dtype=float).ravel()
        n = self.size
        step = max(1, _GRID_BLOCK // n)
        r1 = self.rho1[:, None]
        r2 = self.rho2[:, None]
        means, errs = [], []
        for start in range(0, grid.size, step):
            t = grid[None, start:start + step]
            vals = np.broadcast_to(np.asarray(integrand(r1, r2, t), dtype=float),
                                   (n, t.shape[1]))
            m, e = self.reduce(vals)
            means.append(m)
            errs.append(e)
        if not means:
            return np.empty(0), np.empty(0)
        return np.concatenate(means), np.concatenate(errs)


# cap on N * block elements held at once by IntegrationRule.expect_grid
_GRID_BLOCK = 2**24


def expect_values(model: ChannelModel, integrand: Callable, method=None):
    """Vectorised expectation of an integrand that may return several values.

    `integrand(rho1, rho2)` receives 1-D arrays of equal length ``N`` and must
    return shape ``(N,)`` or ``(N, k)``.  Returns ``(values, std_errors,
    n_evaluations)`` with the leading axis reduced.
    """
    rule = IntegrationRule.build(model, method)
    mean, err = rule.reduce(integrand(rule.rho1, rule.rho2))
    return mean, err, rule.size


def expect_grid(model: ChannelModel, integrand: Callable, grid, method=None):
    """Expectations of ``g(rho1, rho2, t)`` for every parameter ``t`` in `grid`.

    The integration points are generated once, so Monte Carlo estimates at
    different grid points share the same samples.  Returns ``(values,
    std_errors, n_evaluations)``.
    """
    rule = IntegrationRule.build(model, method)
    vals, errs = rule.expect_grid(integrand, grid)
    return vals, errs, rule.size


def expect(model: ChannelModel, integrand: Callable, method=None) -> ExpectationEstimate:
    """Expectation of a scalar integrand of ``(rho_1, rho_2)``.

    Parameters
    ----------
    model : ChannelModel
    integrand : callable
        Vectorised ``g(rho1, rho2)`` on 1-D arrays.
    method : MonteCarlo, GaussHermite, Exact or None
        None picks :func:`default_method`.

    Raises
    ------
    NonFiniteIntegrand
        If any evaluation is NaN or infinite.
    MethodUnsupported
        Quadrature on empirical gains, or ``Exact`` on fading gains.
    """
    return IntegrationRule.build(model, method).expect(integrand)


def moments(model: ChannelModel) -> ChannelMoments:
    """Means and variances of ``rho_l``, in closed form where available."""
    stats = []
    for gain in model.gains:
        if isinstance(gain, Degenerate):
            m, v = gain.value, 0.0
        elif isinstance(gain, Gaussian):
            m, v = gain.mean, gain.variance
        else:
            arr = np.asarray(gain.samples)
            m, v = float(np.mean(arr)), float(np.var(arr))
        stats.append((math.sqrt(model.power) * m, model.power * v))
    (mu1, var1), (mu2, var2) = stats
    return ChannelMoments(mu1, mu2, var1, var2)


def log2_sum_snr(rho1, rho2):
    return np.log2(1.0 + rho1 * rho1 + rho2 * rho2)


def ergodic_capacity(model: ChannelModel, method=None) -> ExpectationEstimate:
    """Ergodic sum capacity ``0.5 * E[log2(1 + rho1^2 + rho2^2)]`` in bits."""
    return expect(model, lambda r1, r2: 0.5 * log2_sum_snr(r1, r2), method)
