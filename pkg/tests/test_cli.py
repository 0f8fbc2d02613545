"""End-to-end CLI tests through main(argv)."""

import json
import os

import numpy as np
import pytest

from qmcis.cli import main
from qmcis.sequences import halton, read_csv


def test_generate(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    assert main(["generate", "--kind", "halton", "--n", "16", "--dim", "2",
                 "--out", str(out)]) == 0
    ps = read_csv(str(out))
    assert np.array_equal(ps.points, halton(16, 2).points)


def test_generate_uniform_needs_seed(tmp_path):
    out = tmp_path / "pts.csv"
    with pytest.raises(ValueError):
        main(["generate", "--kind", "uniform", "--n", "4", "--dim", "1",
              "--out", str(out)])
    assert main(["generate", "--kind", "uniform", "--n", "4", "--dim", "1",
                 "--seed", "3", "--out", str(out)]) == 0


def test_discrepancy_exact(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    main(["generate", "--kind", "halton", "--n", "16", "--dim", "1",
          "--out", str(out)])
    capsys.readouterr()
    assert main(["discrepancy", "--points", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["mode"] == "exact"
    assert rec["value"] == pytest.approx(0.0625, abs=1e-12)
    assert len(rec["witness"]) == 1


def test_discrepancy_lower_bound(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    main(["generate", "--kind", "sobol", "--n", "64", "--dim", "4",
          "--out", str(out)])
    capsys.readouterr()
    assert main(["discrepancy", "--points", str(out), "--mode",
                 "lower-bound", "--effort", "500"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["mode"] == "lower-bound"
    assert 0.0 < rec["value"] <= 1.0


def test_discrepancy_weighted_dirichlet(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    main(["generate", "--kind", "halton", "--n", "32", "--dim", "2",
          "--out", str(out)])
    capsys.readouterr()
    assert main(["discrepancy", "--points", str(out), "--measure",
                 "dirichlet:2,2,2", "--oracle-budget", "16384"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert 0.0 < rec["value"] <= 1.0
    assert rec["oracle_eps"] > 0.0


def test_estimate(capsys):
    assert main(["estimate", "--kind", "sobol", "--n", "4096", "--dim", "2",
                 "--model", "dirichlet:d=2,alpha=2,2,2",
                 "--integrand", "monomial:gamma=1,1",
                 "--reference", "auto"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["reference"] == pytest.approx(1 / 42, rel=1e-12)
    assert rec["normalized_error"] < 1e-2


def test_verify_writes_reports_and_figures(tmp_path, capsys):
    out = tmp_path / "ver"
    assert main(["verify", "--model", "dirichlet:d=2,alpha=2,2,2",
                 "--integrand", "monomial:gamma=1,1",
                 "--kind", "halton,sobol", "--n-list", "16,32",
                 "--out", str(out), "--oracle-budget", "16384",
                 "--ud-grid", "8", "--ud-order", "4"]) == 0
    assert (out / "summary.csv").exists()
    assert (out / "bounds_halton.png").exists()
    assert (out / "bounds_sobol.png").exists()
    with open(out / "bound_reports.jsonl") as fh:
        recs = [json.loads(line) for line in fh]
    assert len(recs) == 4
    for rec in recs:
        assert rec["pass_kh"] and rec["pass_rel"] and rec["pass_main"]
        assert rec["rhs_main"] == 4.0 * rec["h1_norm"] * rec["u_d_estimate"] \
            / rec["u_l1"] * rec["d_classical"]


def test_experiment_subcommand(tmp_path, capsys):
    cfg = tmp_path / "config.txt"
    cfg.write_text("dims=2\nn_grid=16,32,64,128\nkinds=halton,sobol\n"
                   "mc_reps=4\nseed=7\nout=unused\n")
    out = tmp_path / "exp"
    assert main(["experiment", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "convergence.csv").exists()
    assert (out / "rates.csv").exists()
    assert (out / "convergence_halton.png").exists()
    assert (out / "convergence_sobol.png").exists()
    with open(out / "rates.csv") as fh:
        assert len(fh.readlines()) == 3  # header + 2 kinds
