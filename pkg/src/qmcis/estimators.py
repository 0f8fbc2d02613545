"""Self-normalized importance-sampling estimators.

The same ratio-of-sums formula serves both the deterministic QMC estimator
(low-discrepancy point set) and the Monte Carlo baseline (seeded uniform
points).  Points with zero density contribute nothing but remain counted
in n; the normalizing constant of the target never enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .discrepancy import WeightVector
from .exceptions import ZeroDensityError
from .sequences import PointSet, uniform_random


@dataclass(frozen=True)
class EstimateReport:
    """One importance-sampling estimate, optionally against a reference."""

    estimate: float
    n: int
    weights_used: WeightVector
    reference: Optional[float] = None
    abs_error: Optional[float] = None
    norm_error: Optional[float] = None

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "n": self.n,
                "reference": self.reference, "abs_error": self.abs_error,
                "normalized_error": self.norm_error}


def importance_estimate(P: PointSet, f: Callable[[np.ndarray], np.ndarray],
                        u: Callable[[np.ndarray], np.ndarray],
                        reference: Optional[float] = None) -> EstimateReport:
    """Self-normalized estimate  sum f(x_j) u(x_j) / sum u(x_j).

    Both sums use exact compensated accumulation (math.fsum).  Raises
    ZeroDensityError when every u(x_j) is zero: the estimator is undefined,
    which is distinct from estimating 0.
    """
    uvals = np.asarray(u(P.points), dtype=np.float64)
    fvals = np.asarray(f(P.points), dtype=np.float64)
    if uvals.shape != (P.n,) or fvals.shape != (P.n,):
        raise ValueError("evaluators must return one value per point")
    denom = math.fsum(uvals)
    if denom <= 0.0:
        raise ZeroDensityError("all points have zero density; "
                               "the estimator is undefined")
    numer = math.fsum(fvals * uvals)
    est = numer / denom
    w = WeightVector(uvals / denom)
    abs_err = norm_err = None
    if reference is not None:
        abs_err = abs(est - reference)
        norm_err = normalized_error(est, reference)
    return EstimateReport(est, P.n, w, reference, abs_err, norm_err)


def normalized_error(estimate: float, reference: float) -> float:
    """|1 - estimate/reference|."""
    if reference == 0.0:
        raise ValueError("reference value must be nonzero")
    return abs(1.0 - estimate / reference)


@dataclass(frozen=True)
class RepeatedMCResult:
    """Per-run reports of the seeded MC baseline plus an RMSE summary."""

    reports: tuple
    rmse_normalized: float
    failures: int


def mc_repeated(seed: int, reps: int, n: int, d: int,
                f: Callable[[np.ndarray], np.ndarray],
                u: Callable[[np.ndarray], np.ndarray],
                reference: float) -> RepeatedMCResult:
    """``reps`` independent seeded MC runs with per-rep seeds seed + rep.

    Runs hitting the all-zero-density case are counted as failures, not
    fatal, provided at least two runs succeed.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    reports = []
    failures = 0
    for rep in range(reps):
        P = uniform_random(n, d, seed + rep)
        try:
            reports.append(importance_estimate(P, f, u, reference))
        except ZeroDensityError:
            failures += 1
    if len(reports) < 2:
        raise ZeroDensityError(
            f"only {len(reports)} of {reps} MC runs had nonzero density")
    rmse = math.sqrt(math.fsum(r.norm_error**2 for r in reports)
                     / len(reports))
    return RepeatedMCResult(tuple(reports), rmse, failures)
