"""Numerical verification of the three error bounds on concrete instances.

Checked inequalities, all on the Dirichlet + monomial instance family:

  1. integration error  <=  ||f||_~H1 * D_pi(w, P)        (weighted KH)
  2. D_pi(w^u, P)       <=  4 D_cl(P) ||u||_D / int u     (discrepancy relation)
  3. |S - Q_n|          <=  4 ||f||_H1 ||u||_D / int u * D_cl(P)   (main bound)

Two right-hand-side components are numerical estimates (the box-measure
oracle and the ||u||_D grid estimate), so each check carries an explicit
slack; "pass" means lhs <= rhs + slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .discrepancy import (BoxMeasureOracle, DiscrepancyResult, WeightVector,
                          lebesgue_oracle, self_normalized_weights,
                          star_discrepancy_exact, weighted_star_discrepancy,
                          DEFAULT_BUDGET)
from .estimators import importance_estimate
from .models import (ConstantIntegrand, DirichletModel, MonomialIntegrand,
                     UDEstimate, dirichlet_normalizer, dirichlet_oracle,
                     h1_norm_monomial, h1_seminorm_monomial,
                     monomial_expectation, u_D_norm_estimate)
from .sequences import PointSet


def _f_norms(f) -> tuple:
    """(||f||_H1, ||f||_~H1) for the supported integrand types."""
    if isinstance(f, MonomialIntegrand):
        return h1_norm_monomial(f), h1_seminorm_monomial(f)
    if isinstance(f, ConstantIntegrand):
        return f.h1_norm(), f.h1_seminorm()
    raise TypeError(f"no exact H1 norms available for {type(f).__name__}")


def _reference(model: DirichletModel, f) -> float:
    if isinstance(f, MonomialIntegrand):
        return monomial_expectation(model, f)
    if isinstance(f, ConstantIntegrand):
        return f.value
    raise TypeError(f"no exact expectation available for {type(f).__name__}")


@dataclass
class BoundReport:
    """LHS/RHS values of the three inequalities plus their components.

    Fields of checks that were not run stay None.  ``rhs_main`` is
    reassembled bitwise as 4 * h1_norm * u_d_estimate / u_l1 * d_classical.
    """

    instance: dict
    h1_norm: float
    h1_seminorm: float
    u_l1: float
    oracle_eps: float
    u_d_estimate: Optional[float] = None
    u_d_delta: Optional[float] = None
    d_classical: Optional[float] = None
    d_weighted: Optional[float] = None
    lhs_kh: Optional[float] = None
    rhs_kh: Optional[float] = None
    slack_kh: Optional[float] = None
    pass_kh: Optional[bool] = None
    lhs_rel: Optional[float] = None
    rhs_rel: Optional[float] = None
    slack_rel: Optional[float] = None
    pass_rel: Optional[bool] = None
    lhs_main: Optional[float] = None
    rhs_main: Optional[float] = None
    slack_main: Optional[float] = None
    pass_main: Optional[bool] = None

    def margin(self, which: str) -> Optional[float]:
        """(rhs - lhs) / rhs for the named check ('kh'|'rel'|'main')."""
        lhs = getattr(self, f"lhs_{which}")
        rhs = getattr(self, f"rhs_{which}")
        if lhs is None or rhs is None or rhs == 0.0:
            return None
        return (rhs - lhs) / rhs

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["instance"] = dict(self.instance)
        return out


class BoundVerifier:
    """Caches the per-model components shared by every point-set instance.

    The box-measure oracle and the ||u||_D estimate depend only on the
    model, so a verification sweep over many n builds them once.  The
    ||u||_D slack is the difference against a half-resolution re-estimate.
    """

    def __init__(self, model: DirichletModel, f=None, *,
                 oracle_budget: int = 2**20, ud_grid: int = 32,
                 ud_order: int = 16, budget: int = DEFAULT_BUDGET):
        self.model = model
        self.f = f
        self.budget = budget
        self._oracle: Optional[BoxMeasureOracle] = None
        self._oracle_budget = oracle_budget
        self._ud: Optional[UDEstimate] = None
        self._ud_delta: Optional[float] = None
        self._ud_grid = ud_grid
        self._ud_order = ud_order
        self.u_l1 = dirichlet_normalizer(model)

    @property
    def oracle(self) -> BoxMeasureOracle:
        if self._oracle is None:
            self._oracle = dirichlet_oracle(self.model, self._oracle_budget)
        return self._oracle

    @property
    def ud(self) -> UDEstimate:
        if self._ud is None:
            fine = u_D_norm_estimate(self.model, self._ud_grid, self._ud_order)
            coarse = u_D_norm_estimate(self.model,
                                       max(8, self._ud_grid // 2),
                                       max(4, self._ud_order // 2))
            self._ud = fine
            self._ud_delta = abs(fine.value - coarse.value)
        return self._ud

    @property
    def ud_delta(self) -> float:
        self.ud
        return self._ud_delta

    def _new_report(self, P: PointSet, extra=None) -> BoundReport:
        h1, h1s = _f_norms(self.f) if self.f is not None else (None, None)
        inst = {"model": list(self.model.alpha),
                "point_source": dict(P.source),
                "n": P.n, "d": P.dim}
        if isinstance(self.f, MonomialIntegrand):
            inst["integrand"] = list(self.f.gamma)
        elif isinstance(self.f, ConstantIntegrand):
            inst["integrand"] = {"constant": self.f.value}
        if extra:
            inst.update(extra)
        return BoundReport(instance=inst, h1_norm=h1, h1_seminorm=h1s,
                           u_l1=self.u_l1, oracle_eps=self.oracle.eps)

    def koksma_hlawka(self, P: PointSet, w: Optional[WeightVector] = None,
                      report: Optional[BoundReport] = None) -> BoundReport:
        """|S(f,u) - sum w_i f(x_i)|  vs  ||f||_~H1 * D_pi(w, P)."""
        if w is None:
            w = self_normalized_weights(P, self.model.u)
        r = report or self._new_report(P)
        s_exact = _reference(self.model, self.f)
        quad = float(w.weights @ self.f.evaluate(P.points))
        dw = weighted_star_discrepancy(P, w, self.oracle, self.budget)
        r.d_weighted = dw.value
        r.lhs_kh = abs(s_exact - quad)
        r.rhs_kh = r.h1_seminorm * dw.value
        r.slack_kh = r.h1_seminorm * self.oracle.eps
        r.pass_kh = bool(r.lhs_kh <= r.rhs_kh + r.slack_kh)
        return r

    def discrepancy_relation(self, P: PointSet,
                             report: Optional[BoundReport] = None
                             ) -> BoundReport:
        """D_pi(w^u, P)  vs  4 D_cl(P) ||u||_D / int u."""
        r = report or self._new_report(P)
        w = self_normalized_weights(P, self.model.u)
        if r.d_weighted is None:
            r.d_weighted = weighted_star_discrepancy(
                P, w, self.oracle, self.budget).value
        if r.d_classical is None:
            r.d_classical = star_discrepancy_exact(P, self.budget).value
        r.u_d_estimate = self.ud.value
        r.u_d_delta = self.ud_delta
        r.lhs_rel = r.d_weighted
        r.rhs_rel = 4.0 * r.d_classical * self.ud.value / self.u_l1
        r.slack_rel = (self.oracle.eps
                       + 4.0 * r.d_classical * self.ud_delta / self.u_l1)
        r.pass_rel = bool(r.lhs_rel <= r.rhs_rel + r.slack_rel)
        return r

    def main_bound(self, P: PointSet,
                   report: Optional[BoundReport] = None) -> BoundReport:
        """|S - Q_n|  vs  4 ||f||_H1 ||u||_D / int u * D_cl(P)."""
        r = report or self._new_report(P)
        s_exact = _reference(self.model, self.f)
        est = importance_estimate(P, self.f.evaluate, self.model.u, s_exact)
        if r.d_classical is None:
            r.d_classical = star_discrepancy_exact(P, self.budget).value
        r.u_d_estimate = self.ud.value
        r.u_d_delta = self.ud_delta
        r.lhs_main = abs(s_exact - est.estimate)
        r.rhs_main = 4.0 * r.h1_norm * self.ud.value / self.u_l1 * r.d_classical
        r.slack_main = (4.0 * r.h1_norm * self.ud_delta / self.u_l1
                        * r.d_classical)
        r.pass_main = bool(r.lhs_main <= r.rhs_main + r.slack_main)
        return r

    def full_report(self, P: PointSet) -> BoundReport:
        """All three checks on one point set, sharing the discrepancies."""
        r = self._new_report(P)
        self.koksma_hlawka(P, report=r)
        self.discrepancy_relation(P, report=r)
        self.main_bound(P, report=r)
        return r


def check_koksma_hlawka(P: PointSet, w: WeightVector, model: DirichletModel,
                        f, **kwargs) -> BoundReport:
    return BoundVerifier(model, f, **kwargs).koksma_hlawka(P, w)


def check_discrepancy_relation(P: PointSet, model: DirichletModel,
                               **kwargs) -> BoundReport:
    return BoundVerifier(model, ConstantIntegrand(1.0),
                         **kwargs).discrepancy_relation(P)


def check_main_bound(P: PointSet, model: DirichletModel, f,
                     **kwargs) -> BoundReport:
    return BoundVerifier(model, f, **kwargs).main_bound(P)
