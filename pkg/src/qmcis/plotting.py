"""Figure rendering for the convergence and bound-verification reports.

All figures go to files (Agg backend); the CSV output stays the primary
machine-readable artifact.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_convergence(rows: list[dict], out_dir: str) -> list[str]:
    """One log-log figure per sequence kind: normalized error vs n,
    a line per dimension, with n^{-1} and n^{-1/2} guides."""
    paths = []
    kinds = sorted({r["kind"] for r in rows})
    for kind in kinds:
        sub = [r for r in rows if r["kind"] == kind]
        dims = sorted({r["d"] for r in sub})
        fig, ax = plt.subplots(figsize=(6, 4.2))
        for d in dims:
            cell = [(r["n"], r["normalized_error"]) for r in sub
                    if r["d"] == d and r["normalized_error"] > 0
                    and math.isfinite(r["normalized_error"])]
            if not cell:
                continue
            ns, errs = zip(*cell)
            ax.loglog(ns, errs, marker="o", ms=3.5, lw=1.0, label=f"d = {d}")
        if sub:
            ns = sorted({r["n"] for r in sub})
            top = max(r["normalized_error"] for r in sub
                      if math.isfinite(r["normalized_error"]))
            ax.loglog(ns, [top * ns[0] / n for n in ns], "k--", lw=0.8,
                      label=r"$n^{-1}$")
            ax.loglog(ns, [top * (ns[0] / n) ** 0.5 for n in ns], "k:",
                      lw=0.8, label=r"$n^{-1/2}$")
        ax.set_xlabel("n")
        ax.set_ylabel("normalized error")
        ax.set_title(f"Self-normalized estimator, {kind} points")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        path = os.path.join(out_dir, f"convergence_{kind}.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths


def plot_bounds(reports: list[dict], out_dir: str) -> list[str]:
    """Per sequence kind: LHS and RHS of the main bound against n."""
    paths = []
    kinds = sorted({r["instance"]["point_source"].get("kind", "explicit")
                    for r in reports})
    for kind in kinds:
        sub = [r for r in reports
               if r["instance"]["point_source"].get("kind") == kind]
        if not sub:
            continue
        sub.sort(key=lambda r: r["instance"]["n"])
        ns = [r["instance"]["n"] for r in sub]
        fig, ax = plt.subplots(figsize=(6, 4.2))
        for key, style, label in (
                ("lhs_main", "o-", "|S - Q_n|"),
                ("rhs_main", "s--", "main-bound RHS"),
                ("lhs_rel", "^-", "weighted discrepancy"),
                ("rhs_rel", "v--", "discrepancy-relation RHS")):
            vals = [r[key] for r in sub]
            if any(v is None or v <= 0 for v in vals):
                continue
            ax.loglog(ns, vals, style, ms=3.5, lw=1.0, label=label)
        ax.set_xlabel("n")
        ax.set_ylabel("value")
        ax.set_title(f"Bound verification, {kind} points")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        path = os.path.join(out_dir, f"bounds_{kind}.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
