"""Acceptance suite: eight build-gating criteria, one printed verdict each.

Heavy shared artifacts (convergence curves, bound verifiers) are built once
per module.  Rate fits use the error at every n in [2^6, 2^14]; prefix
sequences make all of those available from a single generation pass, and
the power-of-two subsample alone is too sparse for a meaningful
least-squares rate.
"""

import itertools
import math

import numpy as np
import pytest

from qmcis.bounds import BoundVerifier
from qmcis.discrepancy import (WeightVector, lebesgue_oracle,
                               star_discrepancy_exact,
                               weighted_star_discrepancy)
from qmcis.estimators import importance_estimate
from qmcis.experiments import fit_rate
from qmcis.models import (DirichletModel, MonomialIntegrand, SubsetIndex,
                          dirichlet_partial, h1_norm_monomial,
                          h1_seminorm_monomial, monomial_expectation)
from qmcis.sequences import PointSet, generate, halton, sobol, uniform_random

N_FIT = np.arange(2**6, 2**14 + 1)

BOUND_GRID = {2: (64, 256, 1024, 4096), 3: (64, 128, 256)}


def _verdict(capsys, num: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}",
              flush=True)
    assert ok, f"criterion {num}: {detail}"


def _prefix_errors(points, model, f, reference, ns):
    """Normalized error of the self-normalized estimator at every prefix
    length in ``ns`` (single cumulative pass over the sequence)."""
    u = model.u(points)
    fv = f.evaluate(points)
    num = np.cumsum(fv * u)
    den = np.cumsum(u)
    idx = np.asarray(ns) - 1
    with np.errstate(invalid="ignore", divide="ignore"):
        est = num[idx] / den[idx]
    return np.abs(1.0 - est / reference)


@pytest.fixture(scope="module")
def convergence():
    """Error curves over every n in [2^6, 2^14] for halton/sobol (d=2,4),
    the Sobol d=2 error at 2^16, and the 32-rep MC RMSE curve at d=2."""
    data = {}
    for d in (2, 4):
        model = DirichletModel.experiment_default(d)
        f = MonomialIntegrand((1.0,) * d)
        ref = monomial_expectation(model, f)
        for kind in ("halton", "sobol"):
            pts = generate(kind, int(N_FIT[-1]), d).points
            errs = _prefix_errors(pts, model, f, ref, N_FIT)
            # the prefix pass must agree with the estimator itself
            for n in (2**6, 2**10, 2**14):
                rep = importance_estimate(generate(kind, n, d), f.evaluate,
                                          model.u, ref)
                assert errs[n - 2**6] == pytest.approx(rep.norm_error,
                                                       rel=1e-6, abs=1e-12)
            data[(kind, d)] = errs
    model = DirichletModel.experiment_default(2)
    f = MonomialIntegrand((1.0, 1.0))
    ref = monomial_expectation(model, f)
    data["sobol_2_n16"] = importance_estimate(
        sobol(2**16, 2), f.evaluate, model.u, ref).norm_error
    sq = np.zeros(len(N_FIT))
    reps = 32
    for rep in range(reps):
        pts = uniform_random(int(N_FIT[-1]), 2, 1000 + rep).points
        sq += _prefix_errors(pts, model, f, ref, N_FIT) ** 2
    data[("uniform", 2)] = np.sqrt(sq / reps)
    return data


def _slope(errs):
    rows = [{"n": int(n), "normalized_error": float(e)}
            for n, e in zip(N_FIT, errs)]
    return fit_rate(rows).slope


@pytest.fixture(scope="module")
def bound_reports():
    """Full-budget bound reports over {halton, sobol} x {d=2, d=3}."""
    out = {}
    for d, ns in BOUND_GRID.items():
        model = DirichletModel.experiment_default(d)
        f = MonomialIntegrand((1.0,) * d)
        verifier = BoundVerifier(model, f)
        for kind in ("halton", "sobol"):
            for n in ns:
                out[(kind, d, n)] = verifier.full_report(generate(kind, n, d))
    return out


# ---------------------------------------------------------------------------
# 1. closed-form ground truth
# ---------------------------------------------------------------------------

def test_criterion_1_monomial_expectation(capsys):
    worst = 0.0
    for d in range(1, 7):
        model = DirichletModel.experiment_default(d)
        val = monomial_expectation(model, MonomialIntegrand((1.0,) * d))
        exact = math.factorial(3 * d - 1) / math.factorial(4 * d - 1)
        worst = max(worst, abs(val / exact - 1.0))
    _verdict(capsys, 1, worst <= 1e-12,
             f"(3d-1)!/(4d-1)! reproduced for d=1..6, worst rel err "
             f"{worst:.2e} (tol 1e-12)")


# ---------------------------------------------------------------------------
# 2. estimator convergence
# ---------------------------------------------------------------------------

def test_criterion_2_qmc_convergence(capsys, convergence):
    err16 = convergence["sobol_2_n16"]
    slopes = {k: _slope(convergence[k])
              for k in (("halton", 2), ("sobol", 2), ("halton", 4),
                        ("sobol", 4))}
    ok = (err16 < 1e-2
          and slopes[("halton", 2)] <= -0.8
          and slopes[("sobol", 2)] <= -0.8
          and slopes[("halton", 4)] <= -0.6
          and slopes[("sobol", 4)] <= -0.6)
    detail = (f"sobol d=2 n=2^16 err {err16:.2e} (<1e-2); slopes "
              + ", ".join(f"{k[0]} d={k[1]}: {s:+.3f}"
                          for k, s in slopes.items())
              + " (d=2 <= -0.8, d=4 <= -0.6)")
    _verdict(capsys, 2, ok, detail)


# ---------------------------------------------------------------------------
# 3. MC vs QMC
# ---------------------------------------------------------------------------

def test_criterion_3_mc_vs_qmc(capsys, convergence):
    mc = _slope(convergence[("uniform", 2)])
    qmc = {k: _slope(convergence[(k, 2)]) for k in ("halton", "sobol")}
    ok = (-0.65 <= mc <= -0.35
          and all(s < mc for s in qmc.values()))
    _verdict(capsys, 3, ok,
             f"MC slope {mc:+.3f} in [-0.65, -0.35]; halton "
             f"{qmc['halton']:+.3f} and sobol {qmc['sobol']:+.3f} < MC")


# ---------------------------------------------------------------------------
# 4. bound verification
# ---------------------------------------------------------------------------

def test_criterion_4_bounds(capsys, bound_reports):
    failures = [key for key, r in bound_reports.items()
                if not (r.pass_kh and r.pass_rel and r.pass_main)]
    min_margin = min(r.margin("main") for r in bound_reports.values())
    _verdict(capsys, 4, not failures,
             f"{len(bound_reports)} instances x 3 inequalities, "
             f"{len(failures)} violations; smallest main-bound margin "
             f"{min_margin:.3f}" + (f"; failed: {failures}" if failures
                                    else ""))


# ---------------------------------------------------------------------------
# 5. discrepancy oracle equivalence
# ---------------------------------------------------------------------------

def _brute_force(P):
    pts = P.points
    n, d = pts.shape
    grids = [np.unique(np.concatenate([pts[:, j], [1.0]])) for j in range(d)]
    best = 0.0
    rng = np.random.Generator(np.random.PCG64(0))
    corners = list(itertools.product(*grids)) + list(rng.random((1000 * n, d)))
    for c in corners:
        c = np.asarray(c)
        vol = float(np.prod(c))
        closed = float(np.sum(np.all(pts <= c[None, :], axis=1)))
        opened = float(np.sum(np.all(pts < c[None, :], axis=1)))
        best = max(best, abs(closed / n - vol), abs(opened / n - vol))
    return best


def test_criterion_5_oracle_equivalence(capsys):
    rng = np.random.Generator(np.random.PCG64(2024))
    worst_exact = worst_weighted = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        P = PointSet(d, rng.random((n, d)))
        exact = star_discrepancy_exact(P).value
        worst_exact = max(worst_exact, abs(exact - _brute_force(P)))
        weighted = weighted_star_discrepancy(
            P, WeightVector.uniform(n), lebesgue_oracle(d)).value
        worst_weighted = max(worst_weighted, abs(weighted - exact))
    ok = worst_exact <= 1e-12 and worst_weighted <= 1e-12
    _verdict(capsys, 5, ok,
             f"200 random sets (n<=8, d<=3): |exact - brute force| <= "
             f"{worst_exact:.2e}, |weighted-uniform - exact| <= "
             f"{worst_weighted:.2e} (tol 1e-12)")


# ---------------------------------------------------------------------------
# 6. mixed-partial expansion vs finite differences
# ---------------------------------------------------------------------------

def _u_longdouble(x, alpha):
    x = np.asarray(x, dtype=np.longdouble)
    a = np.asarray(alpha, dtype=np.longdouble)
    s = 1.0 - x.sum()
    if s < 0:
        return np.longdouble(0.0)
    val = s ** (a[-1] - 1.0)
    for i in range(len(x)):
        val *= x[i] ** (a[i] - 1.0)
    return val


def _fd_partial(alpha, axes, x, h=1e-5):
    # Extended precision: float64 rounding would be amplified by
    # (2h)^{-|v|} ~ 1e14 at |v| = 3 and break the 1e-4 tolerance.
    hl = np.longdouble(h)
    total = np.longdouble(0.0)
    k = len(axes)
    for bits in range(1 << k):
        y = np.array(x, dtype=np.longdouble)
        sign = 1
        for i, ax in enumerate(axes):
            if bits >> i & 1:
                y[ax] += hl
            else:
                y[ax] -= hl
                sign = -sign
        total += sign * _u_longdouble(y, alpha)
    return float(total / (2 * hl) ** k)


def test_criterion_6_derivative_expansion(capsys):
    rng = np.random.Generator(np.random.PCG64(99))
    worst = 0.0
    checked = 0
    for d in (1, 2, 3):
        alpha = tuple([2.0] * d + [float(d)])
        model = DirichletModel(alpha)
        pts = []
        while len(pts) < 100:
            x = 0.05 + rng.random(d) * 0.9
            if x.sum() <= 0.95:
                pts.append(x)
        for v in SubsetIndex.all_subsets(d):
            for x in pts:
                got = dirichlet_partial(model, v, x)
                ref = (_u_longdouble(x, alpha) if v.size == 0
                       else _fd_partial(alpha, v.axes, x))
                checked += 1
                if abs(ref) > 1e-12:
                    worst = max(worst, abs(got / ref - 1.0))
                else:
                    assert abs(got) < 1e-8
    _verdict(capsys, 6, worst <= 1e-4,
             f"{checked} (point, subset) pairs over d=1..3; worst rel "
             f"deviation from finite differences {worst:.2e} (tol 1e-4)")


# ---------------------------------------------------------------------------
# 7. norm identities
# ---------------------------------------------------------------------------

def test_criterion_7_norm_identities(capsys):
    rng = np.random.Generator(np.random.PCG64(13))
    ok = True
    for _ in range(20):
        d = int(rng.integers(1, 7))
        f = MonomialIntegrand(tuple(1.0 + 2.0 * rng.random(d)))
        ok &= h1_norm_monomial(f) == 1.0
        ok &= h1_seminorm_monomial(f) == 1.0 - 2.0**-d
    _verdict(capsys, 7, ok,
             "20 random (d<=6, gamma in (1,3)^d): ||f||_H1 = 1 exactly, "
             "semi-norm = 1 - 2^-d")


# ---------------------------------------------------------------------------
# 8. self-normalization scale invariance
# ---------------------------------------------------------------------------

def test_criterion_8_scale_invariance(capsys):
    worst = 0.0
    for d, ns in BOUND_GRID.items():
        model = DirichletModel.experiment_default(d)
        f = MonomialIntegrand((1.0,) * d)
        for kind in ("halton", "sobol"):
            for n in ns:
                P = generate(kind, n, d)
                base = importance_estimate(P, f.evaluate, model.u).estimate
                for c in (1e-6, 1.0, 1e6):
                    scaled = importance_estimate(
                        P, f.evaluate,
                        lambda x, c=c: c * model.u(x)).estimate
                    worst = max(worst, abs(scaled / base - 1.0))
    _verdict(capsys, 8, worst <= 1e-12,
             f"u -> c*u for c in {{1e-6, 1, 1e6}} over the verification "
             f"grid; worst rel change {worst:.2e} (tol 1e-12)")
