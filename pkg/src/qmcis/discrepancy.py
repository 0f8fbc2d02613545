"""Star-discrepancy computations over anchored boxes.

The classical star-discrepancy of a point set is the supremum over anchored
boxes [0, y) of |empirical mass - Lebesgue volume|.  The weighted variant
replaces 1/n masses by a weight vector and the volume by a target
probability measure evaluated through a box-measure oracle.

The supremum is attained (as a one-sided limit) on the critical grid formed
by the per-coordinate sorted point coordinates plus the sentinel 1.  Each
grid corner is therefore evaluated twice: with points strictly inside the
open box and with points in the closed box, which captures both one-sided
limits exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import BudgetExceededError, OracleError, ZeroDensityError
from .sequences import PointSet

DEFAULT_BUDGET = 10**8

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscrepancyResult:
    """Value of a (weighted) star-discrepancy computation.

    ``mode`` is 'exact' when the full critical grid was enumerated,
    'lower-bound' otherwise.  ``witness_box`` is the anchored-box corner
    attaining (or best found for) the supremum, lexicographically smallest
    on ties.
    """

    value: float
    mode: str
    witness_box: tuple
    boxes_evaluated: int
    oracle_eps: float = 0.0


@dataclass(frozen=True)
class WeightVector:
    """n real weights summing to 1 (within 1e-12)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if abs(w.sum() - 1.0) > _SUM_TOL * max(1.0, np.abs(w).sum()):
            raise ValueError("weights must sum to 1 within 1e-12")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    @staticmethod
    def uniform(n: int) -> "WeightVector":
        return WeightVector(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class BoxMeasureOracle:
    """Evaluator of z -> pi([0, z)) for a probability measure pi on the cube.

    ``measure`` maps an array of upper corners (m, d) to measures (m,).
    ``eps`` is the declared absolute accuracy.  ``atoms``, when present, is
    an (points, weights) pair approximating pi by a discrete measure; it
    enables grid-scale weighted-discrepancy computations without one oracle
    call per corner.
    """

    measure: Callable[[np.ndarray], np.ndarray]
    eps: float
    dim: int
    atoms: Optional[tuple] = None
    name: str = "oracle"


def lebesgue_oracle(d: int) -> BoxMeasureOracle:
    """Exact Lebesgue box volume, eps = 0."""
    return BoxMeasureOracle(
        measure=lambda z: np.prod(np.atleast_2d(z), axis=1),
        eps=0.0, dim=d, atoms=None, name="lebesgue")


def self_normalized_weights(P: PointSet, u: Callable[[np.ndarray], np.ndarray]
                            ) -> WeightVector:
    """Weights u(x_i) / sum_j u(x_j).

    Raises ZeroDensityError when every point has zero density, in which
    case the self-normalized estimator is undefined for this point set.
    """
    vals = np.asarray(u(P.points), dtype=np.float64)
    if vals.shape != (P.n,):
        raise ValueError("density evaluator must return one value per point")
    if np.any(vals < 0):
        raise ValueError("density values must be nonnegative")
    total = vals.sum()
    if total <= 0.0:
        raise ZeroDensityError("all points have zero density")
    return WeightVector(vals / total)


# ---------------------------------------------------------------------------
# critical-grid machinery
# ---------------------------------------------------------------------------

def _critical_grids(points: np.ndarray) -> list[np.ndarray]:
    """Per-coordinate sorted unique coordinates plus the sentinel 1."""
    d = points.shape[1]
    return [np.unique(np.concatenate([points[:, j], [1.0]])) for j in range(d)]


def _grid_size(grids) -> int:
    size = 1
    for g in grids:
        size *= len(g)
    return size


def _cum_masses(points, masses, grids, dtype):
    """Cumulative open/closed masses at every grid corner.

    closed[i1,...,id] = mass of points with x_j <= grid_j[i_j] for all j;
    open[...]         = mass with x_j <  grid_j[i_j] for all j.
    """
    shape = tuple(len(g) for g in grids)
    idx_closed = tuple(np.searchsorted(g, points[:, j], side="left")
                       for j, g in enumerate(grids))
    idx_open = tuple(np.searchsorted(g, points[:, j], side="right")
                     for j, g in enumerate(grids))
    closed = np.zeros(shape, dtype=dtype)
    np.add.at(closed, idx_closed, masses)
    opened = np.zeros(shape, dtype=dtype)
    # A point escapes the open box at its own coordinate, hence the shift;
    # index len(g) would fall off the grid (coordinate 1 is the sentinel).
    keep = np.ones(points.shape[0], dtype=bool)
    for j in range(len(grids)):
        keep &= idx_open[j] < len(grids[j])
    if np.any(keep):
        np.add.at(opened, tuple(ix[keep] for ix in idx_open),
                  masses if np.isscalar(masses) else masses[keep])
    for ax in range(len(shape)):
        np.cumsum(closed, axis=ax, out=closed)
        np.cumsum(opened, axis=ax, out=opened)
    return closed, opened


def _outer_product(grids) -> np.ndarray:
    """Tensor product of the grid values of axes 1..d-1 (volume factors)."""
    rest = np.array(1.0)
    for g in grids[1:]:
        rest = np.multiply.outer(rest, g)
    return rest


def _scan_max(per_slab_metric, grids):
    """Maximize a per-corner metric slab-by-slab along axis 0.

    ``per_slab_metric(i)`` returns the metric over the remaining axes for
    first-axis index i.  Returns (value, witness corner), keeping the
    lexicographically smallest corner on ties.
    """
    shape = tuple(len(g) for g in grids)
    best = -np.inf
    best_corner = None
    for i in range(shape[0]):
        m = np.asarray(per_slab_metric(i))
        flat = m.reshape(-1)
        k = int(np.argmax(flat))
        if flat[k] > best:
            best = float(flat[k])
            rest_idx = np.unravel_index(k, shape[1:]) if len(shape) > 1 else ()
            best_corner = (grids[0][i],) + tuple(
                grids[ax + 1][r] for ax, r in enumerate(rest_idx))
    return best, best_corner


def star_discrepancy_exact(P: PointSet, budget: int = DEFAULT_BUDGET
                           ) -> DiscrepancyResult:
    """Exact classical star-discrepancy by critical-grid enumeration.

    Raises BudgetExceededError when the grid has more than ``budget``
    corners; use :func:`star_discrepancy_lower_bound` in that case.
    """
    pts = P.points
    n = P.n
    grids = _critical_grids(pts)
    size = _grid_size(grids)
    if size > budget:
        raise BudgetExceededError(
            f"critical grid has {size} corners > budget {budget}; "
            "use star_discrepancy_lower_bound")
    closed, opened = _cum_masses(pts, 1, grids, np.int64)
    rest_vol = _outer_product(grids)

    def metric(i):
        vol = grids[0][i] * rest_vol
        return np.maximum(np.abs(closed[i] / n - vol),
                          np.abs(opened[i] / n - vol))

    value, corner = _scan_max(metric, grids)
    return DiscrepancyResult(value, "exact", corner, size)


def weighted_star_discrepancy(P: PointSet, w: WeightVector,
                              oracle: BoxMeasureOracle,
                              budget: int = DEFAULT_BUDGET
                              ) -> DiscrepancyResult:
    """Weighted star-discrepancy against the oracle's measure.

    Exact up to the oracle's declared accuracy: the supremum of
    |step function - continuous monotone measure| over anchored boxes is
    attained on the critical grid under one-sided corner evaluation.
    """
    pts = P.points
    if w.n != P.n:
        raise ValueError("point set and weight vector sizes differ")
    if oracle.dim != P.dim:
        raise ValueError("oracle dimension mismatch")
    _validate_oracle(oracle)
    grids = _critical_grids(pts)
    size = _grid_size(grids)
    if size > budget:
        raise BudgetExceededError(
            f"critical grid has {size} corners > budget {budget}")
    wc, wo = _cum_masses(pts, w.weights, grids, np.float64)

    if oracle.atoms is not None:
        apts, aw = oracle.atoms
        ac, ao = _cum_masses(apts, aw, grids, np.float64)
        # Atoms sitting exactly on a corner face count with half weight,
        # approximating the (boundary-free) continuous measure.
        def pi_slab(i):
            return 0.5 * (ac[i] + ao[i])
    else:
        rest_corners = _rest_corner_matrix(grids)

        def pi_slab(i):
            corners = rest_corners.copy()
            corners[:, 0] = grids[0][i]
            return np.asarray(oracle.measure(corners)).reshape(
                tuple(len(g) for g in grids[1:]))

    def metric(i):
        pi = pi_slab(i)
        return np.maximum(np.abs(wc[i] - pi), np.abs(wo[i] - pi))

    value, corner = _scan_max(metric, grids)
    return DiscrepancyResult(value, "exact", corner, size, oracle.eps)


def _rest_corner_matrix(grids) -> np.ndarray:
    """All corners of axes 1..d-1 as rows, first column left blank."""
    d = len(grids)
    mesh = np.meshgrid(*grids[1:], indexing="ij") if d > 1 else []
    rest = np.empty((int(np.prod([len(g) for g in grids[1:]], dtype=np.int64)), d))
    for j, m in enumerate(mesh):
        rest[:, j + 1] = m.reshape(-1)
    return rest


def _validate_oracle(oracle: BoxMeasureOracle, checks: int = 8, seed: int = 0):
    """Spot-check range and monotonicity of the oracle on random chains."""
    rng = np.random.Generator(np.random.PCG64(seed))
    d = oracle.dim
    lo = rng.random((checks, d))
    hi = lo + rng.random((checks, d)) * (1.0 - lo)
    vlo = np.asarray(oracle.measure(lo))
    vhi = np.asarray(oracle.measure(hi))
    tol = 2.0 * oracle.eps + 1e-12
    if np.any(vlo < -tol) or np.any(vhi > 1.0 + tol):
        raise OracleError("oracle values outside [0, 1 + eps]")
    if np.any(vhi - vlo < -tol):
        raise OracleError("oracle non-monotone on sampled corner pairs")


# ---------------------------------------------------------------------------
# lower-bound search for large instances
# ---------------------------------------------------------------------------

def _eval_corners(points, corners):
    """max of the open/closed one-sided deviations at each corner."""
    n = points.shape[0]
    vals = np.empty(corners.shape[0])
    chunk = max(1, 2**22 // max(1, n * points.shape[1]))
    for s in range(0, corners.shape[0], chunk):
        c = corners[s:s + chunk]
        le = np.all(points[None, :, :] <= c[:, None, :], axis=2)
        lt = np.all(points[None, :, :] < c[:, None, :], axis=2)
        vol = np.prod(c, axis=1)
        vals[s:s + chunk] = np.maximum(np.abs(le.sum(axis=1) / n - vol),
                                       np.abs(lt.sum(axis=1) / n - vol))
    return vals


def star_discrepancy_lower_bound(P: PointSet, effort: int, seed: int = 0
                                 ) -> DiscrepancyResult:
    """Certified lower bound on the classical star-discrepancy.

    Evaluates ``effort`` random critical-grid corners (a deterministic
    stream given the seed, so larger effort visits a superset) followed by
    coordinate-wise improvement sweeps from the best corner found.
    """
    if effort < 1:
        raise ValueError("effort must be >= 1")
    pts = P.points
    d = P.dim
    grids = _critical_grids(pts)
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.random((effort, d))
    corners = np.empty((effort, d))
    for j, g in enumerate(grids):
        corners[:, j] = g[(picks[:, j] * len(g)).astype(np.int64)]
    vals = _eval_corners(pts, corners)
    evaluated = effort
    k = int(np.argmax(vals))
    best_val = float(vals[k])
    best = corners[k].copy()

    improved = True
    rounds = 0
    while improved and rounds < 20:
        improved = False
        rounds += 1
        for j in range(d):
            trial = np.tile(best, (len(grids[j]), 1))
            trial[:, j] = grids[j]
            tv = _eval_corners(pts, trial)
            evaluated += len(grids[j])
            m = int(np.argmax(tv))
            if tv[m] > best_val:
                best_val = float(tv[m])
                best = trial[m].copy()
                improved = True
    return DiscrepancyResult(best_val, "lower-bound", tuple(best), evaluated)
