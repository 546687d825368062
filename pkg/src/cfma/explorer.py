"""
Figure-level experiments built from rates and conditions.

* :func:`trace_region`     -- CFMA rate pairs over a gamma grid plus the SIC corners;
* :func:`classify_point`   -- region label of one channel model;
* :func:`sweep_classify`   -- region labels over a parameter mesh;
* :func:`coeff_comparison` -- achieving-gamma measure for each integer ``a``.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .channel_stats import (
    ChannelModel,
    ExpectationEstimate,
    Gaussian,
    MonteCarlo,
    derive_seed,
    moments,
    resolve_method,
)
from .conditions import (
    DEFAULT_GRID,
    GammaGrid,
    GammaInterval,
    check_sum_capacity,
    condition_iff,
    condition_mean_ratio,
    gamma_range_scan,
)
from .errors import CfmaError
from .rates import (
    SIC_1_FIRST,
    SIC_2_FIRST,
    achievable_rate_pair,
    as_coefficients,
    capacity_pentagon,
    rate_pairs_over_gamma,
)

REGION_I = "RegionI"
REGION_II = "RegionII"
REGION_III = "RegionIII"
REGION_IV = "RegionIV"


@dataclass(frozen=True)
class TracePoint:
    R1: float
    R2: float
    gamma: float
    coeffs: str
    valid: bool = True
    std_error: float = 0.0


@dataclass
class RegionTrace:
    points: List[TracePoint]
    pentagon: Tuple[ExpectationEstimate, ExpectationEstimate, ExpectationEstimate]
    includes_sic_corners: bool

    @property
    def bounds(self) -> Tuple[float, float, float]:
        return tuple(c.value for c in self.pentagon)

    @property
    def max_sum_rate(self) -> float:
        valid = [p.R1 + p.R2 for p in self.points if p.valid]
        return max(valid) if valid else 0.0

    def slack(self) -> float:
        """``4 * max std_error`` over the pentagon and the traced points."""
        errs = [c.std_error for c in self.pentagon] + [p.std_error for p in self.points]
        return 4.0 * max(errs, default=0.0)

    def violations(self, eps: Optional[float] = None) -> List[TracePoint]:
        """Valid points that fall outside the capacity pentagon by more than `eps`."""
        eps = self.slack() + 1e-12 if eps is None else eps
        c1, c2, cs = self.bounds
        return [p for p in self.points if p.valid and
                (p.R1 > c1 + eps or p.R2 > c2 + eps or p.R1 + p.R2 > cs + eps)]


def trace_region(model: ChannelModel, coeff_sets: Sequence, gammas, method=None,
                 include_sic_corners: bool = True, keep_invalid: bool = False) -> RegionTrace:
    """Achievable CFMA rate pairs for every coefficient pair and gamma.

    Invalid pairs (a selected component rate is negative) are dropped unless
    `keep_invalid`.  The two SIC corner points carry ``gamma = nan`` because
    they do not depend on the scaling.  No convex hull or time sharing is
    applied.
    """
    method = resolve_method(model, method)
    gammas = np.asarray(gammas, dtype=float).ravel()
    if gammas.size == 0:
        raise ValueError("gamma grid is empty")
    points = []
    for coeffs in coeff_sets:
        c = as_coefficients(coeffs)
        for g, rp in zip(gammas, rate_pairs_over_gamma(model, c, gammas, method)):
            if rp.valid or keep_invalid:
                points.append(TracePoint(rp.R1, rp.R2, float(g), c.label, rp.valid,
                                         max(rp.std_error)))
    if include_sic_corners:
        for c in (SIC_1_FIRST, SIC_2_FIRST):
            rp = achievable_rate_pair(model, c, 1.0, method)
            points.append(TracePoint(rp.R1, rp.R2, math.nan, c.label, rp.valid,
                                     max(rp.std_error)))
    return RegionTrace(points, capacity_pentagon(model, method), include_sic_corners)


@dataclass
class ClassificationCell:
    params: Dict[str, float]
    label: Optional[str]
    indeterminate: bool = False
    error: Optional[str] = None
    best_gamma: float = math.nan
    best_value: float = math.nan
    gamma0: float = math.nan
    gamma0_value: float = math.nan
    mean_ratio_bound: float = math.nan

    @property
    def achievable(self) -> bool:
        """Sum capacity reachable with some gamma (regions III and IV)."""
        return self.label in (REGION_III, REGION_IV)

    @property
    def regions(self) -> Tuple[str, ...]:
        """Every region containing this cell: I, or II plus III/IV."""
        if self.label == REGION_I:
            return (REGION_I,)
        if self.label in (REGION_III, REGION_IV):
            return (REGION_II, self.label)
        return ()


def classify_point(model: ChannelModel, grid: GammaGrid = DEFAULT_GRID, method=None,
                   params: Optional[Dict[str, float]] = None) -> ClassificationCell:
    """Region label of one channel model.

    RegionI: the exact test fails for every checked gamma.  Otherwise the
    model is in RegionII, refined to RegionIII when the exact test holds at
    ``gamma0 = mu1 / mu2`` and to RegionIV when it does not (or ``gamma0``
    is undefined because a mean is zero).
    """
    method = resolve_method(model, method)
    report = check_sum_capacity(model, (1, 1), grid, method)
    best_g, best_cv = min(report.checked_gammas, key=lambda t: t[1].value.value)
    cell = ClassificationCell(dict(params or {}), None,
                              best_gamma=best_g, best_value=best_cv.value.value)
    verdicts = [report.verdict]
    m = moments(model)
    g0_verdict = "not_achievable"
    if m.mu1 != 0 and m.mu2 != 0:
        g0, lemma = condition_mean_ratio(model, method, report.capacity)
        cv = condition_iff(model, g0, method)
        cell.gamma0 = g0
        cell.gamma0_value = cv.value.value
        cell.mean_ratio_bound = lemma.value.value
        g0_verdict = cv.verdict
        verdicts.append(g0_verdict)
        if cv.value.value < cell.best_value:
            cell.best_gamma, cell.best_value = g0, cv.value.value
    if report.verdict == "not_achievable" and g0_verdict != "achievable":
        cell.label = REGION_I
    elif g0_verdict == "achievable":
        cell.label = REGION_III
    elif report.verdict == "achievable":
        cell.label = REGION_IV
    else:
        # indeterminate overall: report the point-estimate guess, flagged
        cell.label = REGION_IV if cell.best_value <= 0 else REGION_I
    cell.indeterminate = "indeterminate" in verdicts
    return cell


def gaussian_template(**params) -> ChannelModel:
    """Build independent Gaussian gains from named statistics.

    Recognised keys: ``mu``/``mu1``/``mu2`` (means), ``sigma``/``sigma1``/
    ``sigma2`` (standard deviations), ``var``/``var1``/``var2`` (variances)
    and ``power``.  User-specific keys override the shared ones.
    """
    known = {"mu", "mu1", "mu2", "sigma", "sigma1", "sigma2", "var", "var1", "var2", "power"}
    unknown = set(params) - known
    if unknown:
        raise ValueError(f"unknown gaussian template parameters: {sorted(unknown)}")

    def pick(l):
        mean = params.get(f"mu{l}", params.get("mu"))
        if mean is None:
            raise ValueError(f"no mean given for user {l}")
        if f"var{l}" in params:
            var = params[f"var{l}"]
        elif f"sigma{l}" in params:
            var = params[f"sigma{l}"] ** 2
        elif "var" in params:
            var = params["var"]
        elif "sigma" in params:
            var = params["sigma"] ** 2
        else:
            raise ValueError(f"no variance given for user {l}")
        return Gaussian(float(mean), float(var))

    return ChannelModel(pick(1), pick(2), float(params.get("power", 1.0)))


def _worker_count(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("CFMA_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _cell_method(method, index: int):
    if isinstance(method, MonteCarlo):
        return MonteCarlo(derive_seed(method.seed, index), method.n_samples)
    return method


def sweep_classify(param_grid: Dict[str, Sequence[float]],
                   model_template: Callable[..., ChannelModel] = gaussian_template,
                   grid: GammaGrid = DEFAULT_GRID, method=None,
                   fixed: Optional[Dict[str, float]] = None,
                   workers: Optional[int] = None) -> List[ClassificationCell]:
    """Classify every cell of a parameter mesh.

    Cells are ordered row-major over `param_grid` (first key slowest).  Monte
    Carlo cells use seeds derived from the master seed and the cell index,
    so the output does not depend on `workers`.  A failing cell carries its
    error message instead of aborting the sweep.
    """
    names = list(param_grid)
    if not names:
        raise ValueError("parameter grid is empty")
    combos = list(itertools.product(*(list(param_grid[n]) for n in names)))
    fixed = dict(fixed or {})

    def run(item):
        index, values = item
        params = {n: float(v) for n, v in zip(names, values)}
        try:
            model = model_template(**fixed, **params)
            cell_method = _cell_method(resolve_method(model, method), index)
            return classify_point(model, grid, cell_method, params)
        except (CfmaError, ValueError, ZeroDivisionError) as exc:
            return ClassificationCell(params, None, error=f"{type(exc).__name__}: {exc}")

    n_workers = min(_worker_count(workers), len(combos))
    if n_workers == 1:
        return [run(item) for item in enumerate(combos)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(run, enumerate(combos)))


@dataclass
class CoefficientScore:
    a: Tuple[int, int]
    intervals: List[GammaInterval] = field(default_factory=list)

    @property
    def measure(self) -> float:
        """Total length of the achieving-gamma set."""
        return sum(iv.length for iv in self.intervals)


def coeff_comparison(model: ChannelModel, a_max: int, grid: GammaGrid = DEFAULT_GRID,
                     method=None, include_negative: bool = False) -> List[CoefficientScore]:
    """Rank first-combination coefficients ``a`` by their achieving-gamma measure.

    Enumerates ``1 <= a1, |a2| <= a_max`` (``a1 > 0`` by sign absorption;
    negative ``a2`` only with `include_negative`), with ``b`` a unit vector.
    Results are sorted by decreasing measure; ties keep enumeration order.
    """
    if a_max < 1:
        raise ValueError("a_max must be >= 1")
    method = resolve_method(model, method)
    second = list(range(1, a_max + 1))
    if include_negative:
        second += [-k for k in range(1, a_max + 1)]
    scores = [CoefficientScore((a1, a2), gamma_range_scan(model, (a1, a2), grid, method))
              for a1 in range(1, a_max + 1) for a2 in second]
    return sorted(scores, key=lambda s: -s.measure)
