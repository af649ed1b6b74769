from .oracle import (
    CouplingPlan,
    FiniteDistribution,
    Metric,
    dual_gap,
    empirical_visitation,
    exact_w1,
    grid_metric,
    w1_from_start,
)

__all__ = (
    "CouplingPlan",
    "FiniteDistribution",
    "Metric",
    "dual_gap",
    "empirical_visitation",
    "exact_w1",
    "grid_metric",
    "w1_from_start",
)
