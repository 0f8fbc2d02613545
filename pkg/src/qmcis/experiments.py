"""Convergence study: normalized error of the QMC estimator versus n.

Runs the monomial integrand under the alpha = (2,...,2,d) Dirichlet model
(exact reference (3d-1)!/(4d-1)!) over a grid of sample sizes for Halton,
Sobol and the seeded MC baseline, then fits log-log decay rates.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .estimators import importance_estimate, mc_repeated
from .exceptions import ZeroDensityError
from .models import DirichletModel, MonomialIntegrand, monomial_expectation
from .sequences import generate

DEFAULT_N_GRID = tuple(2**k for k in range(4, 17))

CONVERGENCE_COLUMNS = ("kind", "d", "n", "estimate", "reference",
                       "normalized_error", "wall_time", "note")
RATE_COLUMNS = ("kind", "d", "slope", "intercept", "rows_used",
                "rows_excluded")


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one convergence study.

    Serialized as flat key=value lines with comma-separated lists, e.g.::

        dims=2,4,6
        n_grid=16,32,64
        kinds=halton,sobol,uniform
        mc_reps=32
        seed=1000
        out=results
    """

    dims: tuple = (2, 4, 6)
    n_grid: tuple = DEFAULT_N_GRID
    kinds: tuple = ("halton", "sobol")
    mc_reps: int = 32
    seed: int = 1000
    out: str = "results"

    def __post_init__(self):
        if list(self.n_grid) != sorted(set(self.n_grid)):
            raise ValueError("n_grid must be strictly increasing")
        if any(not 1 <= d <= 16 for d in self.dims):
            raise ValueError("dims must lie in 1..16")
        if any(k not in ("halton", "sobol", "uniform") for k in self.kinds):
            raise ValueError("kinds must be halton, sobol or uniform")

    def to_text(self) -> str:
        return "".join([
            f"dims={','.join(map(str, self.dims))}\n",
            f"n_grid={','.join(map(str, self.n_grid))}\n",
            f"kinds={','.join(self.kinds)}\n",
            f"mc_reps={self.mc_reps}\n",
            f"seed={self.seed}\n",
            f"out={self.out}\n",
        ])

    @staticmethod
    def from_text(text: str) -> "ExperimentConfig":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            kv[key.strip()] = val.strip()
        kwargs = {}
        if "dims" in kv:
            kwargs["dims"] = tuple(int(v) for v in kv["dims"].split(","))
        if "n_grid" in kv:
            kwargs["n_grid"] = tuple(int(v) for v in kv["n_grid"].split(","))
        if "kinds" in kv:
            kwargs["kinds"] = tuple(kv["kinds"].split(","))
        if "mc_reps" in kv:
            kwargs["mc_reps"] = int(kv["mc_reps"])
        if "seed" in kv:
            kwargs["seed"] = int(kv["seed"])
        if "out" in kv:
            kwargs["out"] = kv["out"]
        return ExperimentConfig(**kwargs)


def run_convergence(config: ExperimentConfig) -> list[dict]:
    """Rows (kind, d, n, estimate, reference, normalized_error, wall_time).

    QMC rows are deterministic; the 'uniform' kind reports the mean
    estimate and the RMSE of the normalized error over mc_reps seeded
    runs.  Estimator failures are recorded per-row, not fatal.
    """
    rows = []
    for d in config.dims:
        model = DirichletModel.experiment_default(d)
        f = MonomialIntegrand((1.0,) * d)
        reference = monomial_expectation(model, f)
        for kind in config.kinds:
            for n in config.n_grid:
                t0 = time.perf_counter()
                note = ""
                estimate = norm_err = float("nan")
                try:
                    if kind == "uniform":
                        res = mc_repeated(config.seed, config.mc_reps, n, d,
                                          f.evaluate, model.u, reference)
                        estimate = float(np.mean(
                            [r.estimate for r in res.reports]))
                        norm_err = res.rmse_normalized
                        if res.failures:
                            note = f"{res.failures} zero-density reps"
                    else:
                        P = generate(kind, n, d)
                        rep = importance_estimate(P, f.evaluate, model.u,
                                                  reference)
                        estimate, norm_err = rep.estimate, rep.norm_error
                except ZeroDensityError as exc:
                    note = f"zero-density: {exc}"
                rows.append({
                    "kind": kind, "d": d, "n": n, "estimate": estimate,
                    "reference": reference, "normalized_error": norm_err,
                    "wall_time": time.perf_counter() - t0, "note": note,
                })
    rows.sort(key=lambda r: (r["kind"], r["d"], r["n"]))
    return rows


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of log2(error) against log2(n)."""

    slope: float
    intercept: float
    rows_used: int
    rows_excluded: int


def fit_rate(rows: list[dict]) -> RateFit:
    """OLS fit through (log2 n, log2 normalized_error) for one (kind, d).

    Rows with zero or non-finite error are excluded (and counted); at
    least 4 usable rows are required.
    """
    pts = [(r["n"], r["normalized_error"]) for r in rows]
    usable = [(n, e) for n, e in pts
              if e is not None and math.isfinite(e) and e > 0.0]
    excluded = len(pts) - len(usable)
    if len(usable) < 4:
        raise ValueError(f"only {len(usable)} usable rows; need >= 4")
    x = np.log2([n for n, _ in usable])
    y = np.log2([e for _, e in usable])
    slope, intercept = np.polyfit(x, y, 1)
    return RateFit(float(slope), float(intercept), len(usable), excluded)


def fit_all_rates(rows: list[dict]) -> list[dict]:
    out = []
    cells = sorted({(r["kind"], r["d"]) for r in rows})
    for kind, d in cells:
        cell = [r for r in rows if r["kind"] == kind and r["d"] == d]
        fit = fit_rate(cell)
        out.append({"kind": kind, "d": d, "slope": fit.slope,
                    "intercept": fit.intercept, "rows_used": fit.rows_used,
                    "rows_excluded": fit.rows_excluded})
    return out


def qmc_beats_mc(rates: list[dict], dims=(2, 4)) -> bool:
    """True when every QMC slope decays strictly faster than MC per d."""
    ok = True
    by = {(r["kind"], r["d"]): r["slope"] for r in rates}
    for d in dims:
        mc = by.get(("uniform", d))
        if mc is None:
            continue
        for kind in ("halton", "sobol"):
            qmc = by.get((kind, d))
            if qmc is not None and not qmc < mc:
                ok = False
    return ok


def write_csv(rows: list[dict], columns, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)


def read_convergence_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        rows = []
        for raw in csv.DictReader(fh):
            rows.append({
                "kind": raw["kind"], "d": int(raw["d"]), "n": int(raw["n"]),
                "estimate": float(raw["estimate"]),
                "reference": float(raw["reference"]),
                "normalized_error": float(raw["normalized_error"]),
                "wall_time": float(raw["wall_time"]),
                "note": raw.get("note", ""),
            })
        return rows
