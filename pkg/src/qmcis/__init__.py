"""Quasi-Monte Carlo importance sampling with weighted star-discrepancy
diagnostics and numerical verification of the associated error bounds."""

from .bounds import (BoundReport, BoundVerifier, check_discrepancy_relation,
                     check_koksma_hlawka, check_main_bound)
from .discrepancy import (BoxMeasureOracle, DiscrepancyResult, WeightVector,
                          lebesgue_oracle, self_normalized_weights,
                          star_discrepancy_exact, star_discrepancy_lower_bound,
                          weighted_star_discrepancy)
from .estimators import (EstimateReport, importance_estimate, mc_repeated,
                         normalized_error)
from .exceptions import (BudgetExceededError, OracleError, QmcisError,
                         ZeroDensityError)
from .experiments import ExperimentConfig, fit_rate, run_convergence
from .models import (ConstantIntegrand, DirichletModel, MonomialIntegrand,
                     SubsetIndex, dirichlet_box_measure, dirichlet_normalizer,
                     dirichlet_oracle, dirichlet_partial, dirichlet_u,
                     h1_norm_monomial, h1_seminorm_monomial,
                     monomial_expectation, parse_integrand, parse_model,
                     u_D_norm_estimate)
from .sequences import PointSet, halton, sobol, uniform_random

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "BoundVerifier", "BoxMeasureOracle", "BudgetExceededError",
    "ConstantIntegrand", "DirichletModel", "DiscrepancyResult",
    "EstimateReport", "ExperimentConfig", "MonomialIntegrand", "OracleError",
    "PointSet", "QmcisError", "SubsetIndex", "WeightVector",
    "ZeroDensityError", "check_discrepancy_relation", "check_koksma_hlawka",
    "check_main_bound", "dirichlet_box_measure", "dirichlet_normalizer",
    "dirichlet_oracle", "dirichlet_partial", "dirichlet_u", "fit_rate",
    "h1_norm_monomial", "h1_seminorm_monomial", "halton",
    "importance_estimate", "lebesgue_oracle", "mc_repeated",
    "monomial_expectation", "normalized_error", "parse_integrand",
    "parse_model", "run_convergence", "self_normalized_weights", "sobol",
    "star_discrepancy_exact", "star_discrepancy_lower_bound",
    "u_D_norm_estimate", "uniform_random", "weighted_star_discrepancy",
]
