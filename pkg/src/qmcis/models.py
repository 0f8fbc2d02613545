"""Dirichlet unnormalized density family, monomial test integrand, and the
regularity functionals used by the error bounds.

The Dirichlet density u(x; alpha) on the simplex has closed-form mixed
partials: each derivative is a signed combination of the same density at
integer-shifted parameters, which is what makes the variation-norm
estimates here tractable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import gammaln

from . import sequences
from .discrepancy import BoxMeasureOracle


# ---------------------------------------------------------------------------
# subset indices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubsetIndex:
    """A subset v of the coordinate axes {1,...,d}, encoded as a bitmask."""

    mask: int
    dim: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.dim):
            raise ValueError("mask outside subsets of [d]")

    @staticmethod
    def from_axes(axes, dim: int) -> "SubsetIndex":
        mask = 0
        for a in axes:
            if not 0 <= a < dim:
                raise ValueError(f"axis {a} outside 0..{dim - 1}")
            mask |= 1 << a
        return SubsetIndex(mask, dim)

    @property
    def axes(self) -> tuple:
        """0-based coordinate indices in the subset, ascending."""
        return tuple(a for a in range(self.dim) if self.mask >> a & 1)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @staticmethod
    def all_subsets(dim: int):
        return [SubsetIndex(m, dim) for m in range(1 << dim)]

    @staticmethod
    def nonempty_subsets(dim: int):
        return [SubsetIndex(m, dim) for m in range(1, 1 << dim)]


# ---------------------------------------------------------------------------
# Dirichlet model
# ---------------------------------------------------------------------------

def _u_batch(points: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Unnormalized Dirichlet density at each point (vectorized).

    Zero outside the simplex.  Computed in log space; zero bases
    short-circuit to 0 (positive exponent) or 1 (zero exponent).
    """
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    s = 1.0 - x.sum(axis=1)
    bases = np.concatenate([x, s[:, None]], axis=1)
    expo = np.asarray(alpha, dtype=np.float64) - 1.0
    out = np.zeros(x.shape[0])
    inside = s >= 0.0
    if not np.any(inside):
        return out
    b = bases[inside]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(b)
        contrib = np.where(expo[None, :] == 0.0, 0.0, expo[None, :] * logs)
    out[inside] = np.exp(contrib.sum(axis=1))
    return out


@dataclass(frozen=True)
class DirichletModel:
    """Parameter vector alpha in (1, inf)^{d+1} of the Dirichlet density."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        if len(a) < 2:
            raise ValueError("alpha needs at least two entries")
        # The last entry may equal 1 (its density factor degenerates to 1),
        # which the d=1 convergence-study parameterization relies on.
        if any(v <= 1.0 for v in a[:-1]) or a[-1] < 1.0:
            raise ValueError("alpha_i must exceed 1 (last entry may equal 1)")
        object.__setattr__(self, "alpha", a)

    @property
    def dim(self) -> int:
        return len(self.alpha) - 1

    def u(self, points: np.ndarray) -> np.ndarray:
        return _u_batch(points, np.array(self.alpha))

    def require_derivative_preconditions(self):
        d = self.dim
        if any(self.alpha[i] < 2.0 for i in range(d)) or self.alpha[d] < d:
            raise ValueError(
                "derivative operations need alpha_i >= 2 (i <= d) and "
                "alpha_{d+1} >= d")

    @staticmethod
    def experiment_default(d: int) -> "DirichletModel":
        """alpha = (2, ..., 2, d), the convergence-study parameterization."""
        return DirichletModel(tuple([2.0] * d + [float(d)]))


def dirichlet_u(model: DirichletModel, x) -> np.ndarray:
    """Density values at one point (d,) or a batch (m, d)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return float(model.u(x[None, :])[0])
    return model.u(x)


def dirichlet_normalizer(model: DirichletModel) -> float:
    """prod Gamma(alpha_i) / Gamma(sum alpha_i), via log-gamma."""
    a = np.array(model.alpha)
    return float(np.exp(gammaln(a).sum() - gammaln(a.sum())))


def _partial_terms(alpha: tuple, axes: tuple):
    """Coefficient/shifted-parameter pairs of the mixed-partial expansion.

    Yields (c, alpha - (k_v; 0; k_{d+1})) over k_v in {0,1}^{|v|} with
    k_{d+1} = |v| - sum(k_v); zero coefficients are skipped.
    """
    d = len(alpha) - 1
    v_size = len(axes)
    for kv in product((0, 1), repeat=v_size):
        k_last = v_size - sum(kv)
        coef = (-1.0) ** k_last
        for j in range(1, k_last + 1):
            coef *= alpha[d] - j
        for i, k in zip(axes, kv):
            if k:
                coef *= alpha[i] - 1.0
        if coef == 0.0:
            continue
        shifted = list(alpha)
        for i, k in zip(axes, kv):
            shifted[i] -= k
        shifted[d] -= k_last
        yield coef, np.array(shifted)


def dirichlet_partial(model: DirichletModel, v: SubsetIndex, x) -> np.ndarray:
    """Mixed partial derivative of u over the axes of ``v``.

    Evaluated as the finite signed sum of shifted-parameter densities;
    v = empty returns u itself.
    """
    model.require_derivative_preconditions()
    if v.dim != model.dim:
        raise ValueError("subset dimension mismatch")
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 1
    pts = x[None, :] if scalar else x
    out = np.zeros(pts.shape[0])
    for coef, shifted in _partial_terms(model.alpha, v.axes):
        out += coef * _u_batch(pts, shifted)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# monomial integrand and H1 norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialIntegrand:
    """f(x) = 2^{-d} prod x_i^{gamma_i} with gamma_i >= 1."""

    gamma: tuple

    def __post_init__(self):
        g = tuple(float(v) for v in self.gamma)
        if len(g) < 1 or any(v < 1.0 for v in g):
            raise ValueError("every gamma_i must be >= 1")
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return len(self.gamma)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return 2.0 ** -self.dim * np.prod(x ** np.array(self.gamma), axis=1)


@dataclass(frozen=True)
class ConstantIntegrand:
    """f = c everywhere; the degenerate exactness case of the bounds."""

    value: float

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(points).shape[0], self.value)

    def h1_norm(self) -> float:
        return abs(self.value)

    def h1_seminorm(self) -> float:
        return 0.0


def h1_norm_monomial(f: MonomialIntegrand) -> float:
    """Variation norm of the monomial integrand.

    Each of the 2^d subset terms integrates to exactly 2^{-d} (the
    anchored derivative factorizes into unit integrals), so the sum is 1.
    """
    return 1.0


def h1_seminorm_monomial(f: MonomialIntegrand) -> float:
    """Same sum without the empty-subset term |f(1)| = 2^{-d}."""
    return 1.0 - 2.0 ** -f.dim


def monomial_expectation(model: DirichletModel, f: MonomialIntegrand) -> float:
    """Exact expectation of the monomial integrand under the model.

    Ratio of the two normalizing constants (parameters shifted by gamma),
    times 2^{-d}; evaluated via log-gamma.
    """
    if f.dim != model.dim:
        raise ValueError("model and integrand dimensions differ")
    a = np.array(model.alpha)
    g = np.array(f.gamma)
    d = model.dim
    log_val = (-d * math.log(2.0)
               + gammaln(a[:d] + g).sum() - gammaln(a[:d]).sum()
               + gammaln(a.sum()) - gammaln(a[d] + (a[:d] + g).sum()))
    return float(np.exp(log_val))


# ---------------------------------------------------------------------------
# ||u||_D estimate
# ---------------------------------------------------------------------------

def _gl_rule(order: int):
    """Gauss-Legendre nodes/weights on [0, 1]."""
    nodes, wts = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * wts


def _anchor_grid(d: int, grid_res: int) -> np.ndarray:
    """Scaling anchors z: a full product grid for d <= 3 (includes the
    corner of ones), Sobol anchors plus the ones corner above that."""
    if d <= 3:
        axis = np.linspace(1.0 / grid_res, 1.0, grid_res)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        return np.column_stack([m.reshape(-1) for m in mesh])
    anchors = sequences.sobol(grid_res**3 - 1, d).points
    return np.vstack([anchors, np.ones(d)])


def _subset_integral(model: DirichletModel, anchors: np.ndarray, axes: tuple,
                     nodes1: np.ndarray, wts1: np.ndarray) -> np.ndarray:
    """Integral of |anchored mixed partial of u(T_z .)| for one axis subset.

    In the substituted variables y_i = z_i x_i the integral runs over
    {y in [0, z_v] : sum y_i <= 1 - sum_{j not in v} z_j}, with the
    prod(z_v) chain-rule factor absorbed by the substitution.  Iterated
    variable upper limits keep the quadrature inside the density's
    support, where the integrand is smooth up to sign-change kinks.
    """
    d = model.dim
    A = anchors.shape[0]
    q = len(nodes1)
    k = len(axes)
    other = [j for j in range(d) if j not in axes]
    terms = list(_partial_terms(model.alpha, axes))
    out = np.empty(A)
    chunk = max(1, 2**21 // q**k)
    for s in range(0, A, chunk):
        z = anchors[s:s + chunk]
        a = z.shape[0]
        rem = 1.0 - z[:, other].sum(axis=1) if other else np.ones(a)
        wt = np.ones(a)
        ys = []
        for pos, ax in enumerate(axes):
            z_ax = z[:, ax].reshape((a,) + (1,) * pos)
            ub = np.minimum(z_ax, np.maximum(rem, 0.0))
            y = ub[..., None] * nodes1
            wt = wt[..., None] * ub[..., None] * wts1
            rem = rem[..., None] - y
            ys = [prev[..., None] for prev in ys] + [y]
        full = (a,) + (q,) * k
        pts = np.empty(full + (d,))
        for j in other:
            pts[..., j] = z[:, j].reshape((a,) + (1,) * k)
        for pos, ax in enumerate(axes):
            pts[..., ax] = np.broadcast_to(ys[pos], full)
        flat = pts.reshape(-1, d)
        g = np.zeros(full)
        for coef, shifted in terms:
            g += coef * _u_batch(flat, shifted).reshape(full)
        out[s:s + a] = (np.abs(g) * wt).reshape(a, -1).sum(axis=1)
    return out


def scaled_seminorm(model: DirichletModel, anchors: np.ndarray,
                    quad_order: int) -> np.ndarray:
    """H1 semi-norm of x -> u(z_1 x_1, ..., z_d x_d) at each anchor z.

    For each nonempty axis subset the anchored mixed partial is the
    shifted-parameter expansion; its absolute value is integrated by tensor
    Gauss-Legendre quadrature of the given order per active axis,
    restricted to the density's support.
    """
    model.require_derivative_preconditions()
    if quad_order < 4:
        raise ValueError("quadrature order must be >= 4")
    nodes1, wts1 = _gl_rule(quad_order)
    total = np.zeros(anchors.shape[0])
    for v in SubsetIndex.nonempty_subsets(model.dim):
        total += _subset_integral(model, anchors, v.axes, nodes1, wts1)
    return total


@dataclass(frozen=True)
class UDEstimate:
    """Grid/quadrature estimate of ||u||_D = sup u + sup_z ||u(T_z .)||."""

    value: float
    sup_term: float
    seminorm_term: float
    grid_res: int
    quad_order: int
    mode: str = "upper-bound-estimate"


def u_D_norm_estimate(model: DirichletModel, grid_res: int = 32,
                      quad_order: int = 16) -> UDEstimate:
    """Estimate the regularity functional ||u||_D on an anchor grid.

    The first term is the grid maximum of u (analytically bounded by 1
    when alpha_i >= 2); the second is the grid maximum of the scaled
    semi-norm.  Both converge smoothly under grid/order refinement, so
    the result is labeled an estimate rather than a certified bound.
    """
    model.require_derivative_preconditions()
    if grid_res < 8:
        raise ValueError("grid resolution must be >= 8 per axis")
    anchors = _anchor_grid(model.dim, grid_res)
    sup_term = float(model.u(anchors).max())
    seminorm_term = float(scaled_seminorm(model, anchors, quad_order).max())
    return UDEstimate(sup_term + seminorm_term, sup_term, seminorm_term,
                      grid_res, quad_order)


# ---------------------------------------------------------------------------
# box-measure oracle
# ---------------------------------------------------------------------------

def dirichlet_box_measure(model: DirichletModel, z, budget: int = 2**20
                          ) -> tuple:
    """(pi([0, z)), eps): Sobol quadrature of u over the scaled box.

    Points are mapped into [0, z) coordinate-wise with Jacobian prod(z);
    eps is the half-budget vs full-budget difference.
    """
    z = np.asarray(z, dtype=np.float64)
    d = model.dim
    if np.all(z == 0.0):
        return 0.0, 0.0
    base = sequences.sobol(budget, d).points
    vals = model.u(base * z[None, :])
    jac = float(np.prod(z))
    norm = dirichlet_normalizer(model)
    full = jac * vals.mean() / norm
    half = jac * vals[: budget // 2].mean() / norm
    return float(full), abs(float(full) - float(half))


def dirichlet_oracle(model: DirichletModel, budget: int = 2**20
                     ) -> BoxMeasureOracle:
    """Box-measure oracle for the normalized Dirichlet measure.

    Carries a discrete atom approximation (a Sobol sample with
    self-normalized density weights) so grid-scale weighted-discrepancy
    computations avoid one quadrature call per corner.  The declared eps
    combines half-vs-full budget differences of both evaluation paths
    over probe corners.
    """
    d = model.dim
    norm = dirichlet_normalizer(model)
    base = sequences.sobol(budget, d).points
    dens = model.u(base)
    total = dens.sum()
    atoms = (base, dens / total)

    def measure(corners: np.ndarray) -> np.ndarray:
        corners = np.atleast_2d(np.asarray(corners, dtype=np.float64))
        out = np.empty(corners.shape[0])
        for i, z in enumerate(corners):
            out[i] = float(np.prod(z)) * model.u(base * z[None, :]).mean() / norm
        return out

    # eps: nested-budget differences at probe corners, both paths.
    probes = sequences.halton(32, d).points * 0.9 + 0.05
    half_w = dens[: budget // 2]
    half_w = half_w / half_w.sum()
    eps = 0.0
    for z in probes:
        inside = np.all(base < z[None, :], axis=1)
        atom_full = atoms[1][inside].sum()
        atom_half = half_w[inside[: budget // 2]].sum()
        quad_full = float(np.prod(z)) * model.u(base * z[None, :]).mean() / norm
        quad_half = (float(np.prod(z))
                     * model.u(base[: budget // 2] * z[None, :]).mean() / norm)
        eps = max(eps, abs(atom_full - atom_half), abs(quad_full - quad_half),
                  abs(atom_full - quad_full))
    return BoxMeasureOracle(measure=measure, eps=float(eps), dim=d, atoms=atoms,
                            name=f"dirichlet:{','.join(map(str, model.alpha))}")


# ---------------------------------------------------------------------------
# specification strings
# ---------------------------------------------------------------------------

def parse_model(spec: str) -> DirichletModel:
    """Parse 'dirichlet:d=2,alpha=2,2,2' (the d= part is optional)."""
    m = re.fullmatch(r"dirichlet:(?:d=(\d+),)?alpha=([\d.,]+)", spec.strip())
    if not m:
        raise ValueError(f"bad model spec {spec!r}; "
                         "expected dirichlet:d=D,alpha=a1,a2,...")
    alpha = tuple(float(v) for v in m.group(2).split(","))
    model = DirichletModel(alpha)
    if m.group(1) is not None and int(m.group(1)) != model.dim:
        raise ValueError("declared d inconsistent with alpha length")
    return model


def parse_integrand(spec: str):
    """Parse 'monomial:gamma=1,1' or 'constant:c=0.5'."""
    spec = spec.strip()
    m = re.fullmatch(r"monomial:gamma=([\d.,]+)", spec)
    if m:
        return MonomialIntegrand(tuple(float(v) for v in m.group(1).split(",")))
    m = re.fullmatch(r"constant:c=([-\d.eE+]+)", spec)
    if m:
        return ConstantIntegrand(float(m.group(1)))
    raise ValueError(f"bad integrand spec {spec!r}")
