"""Budget-preserving filter redistribution templates for CNN descriptions,
with an analytical parameter/MAC/memory cost model and a built-in model zoo.
"""

from .archspec import (
    ArchitectureSpec,
    ArchSyntaxError,
    ArchValidationError,
    FilterDistError,
    FilterPlan,
    LayerSpec,
    apply_filter_plan,
    extract_filter_plan,
    layer_geometry,
    parse_architecture,
    serialize_architecture,
    validate,
)
from .costmodel import (
    CostReport,
    LayerCost,
    TemplateComparison,
    activation_memory,
    compare_templates,
    cost_report,
    count_macs,
    count_parameters,
)
from .templates import (
    ALL_TEMPLATES,
    QuadraticCoefficients,
    SingularSystemError,
    TemplateId,
    TemplateInfeasibleError,
    apply_template,
    eval_polynomial,
    reverse_counts,
    round_preserving_sum,
    solve_negative_quadratic,
    solve_quadratic,
    template_counts,
    uniform_counts,
)
from .zoo import DATASETS, FAMILIES, ZooModelId, build_model, list_models

__version__ = "0.1.0"

__all__ = [
    "ALL_TEMPLATES",
    "ArchSyntaxError",
    "ArchValidationError",
    "ArchitectureSpec",
    "CostReport",
    "DATASETS",
    "FAMILIES",
    "FilterDistError",
    "FilterPlan",
    "LayerCost",
    "LayerSpec",
    "QuadraticCoefficients",
    "SingularSystemError",
    "TemplateComparison",
    "TemplateId",
    "TemplateInfeasibleError",
    "ZooModelId",
    "activation_memory",
    "apply_filter_plan",
    "apply_template",
    "build_model",
    "compare_templates",
    "cost_report",
    "count_macs",
    "count_parameters",
    "eval_polynomial",
    "extract_filter_plan",
    "layer_geometry",
    "list_models",
    "parse_architecture",
    "reverse_counts",
    "round_preserving_sum",
    "serialize_architecture",
    "solve_negative_quadratic",
    "solve_quadratic",
    "template_counts",
    "uniform_counts",
    "validate",
]
