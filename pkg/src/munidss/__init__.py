"""munidss: decision support for municipal social and economic development.

Turns expert impact estimates among development indicators into total
influence scores, criticality levels, per-target indicator ratings and
what-if predictions, plus a strategic-planning document taxonomy and a
semantic network model of how the development is managed.
"""

from munidss.assessment import (
    IndicatorAssessment,
    Rating,
    RatingEntry,
    assess,
    criticality,
    rating,
    relevance,
    what_if,
)
from munidss.domain import (
    AggregationPolicy,
    CriticalityConfig,
    CriticalityLevel,
    CriticalityThresholds,
    ImpactDirection,
    ImpactEstimate,
    Indicator,
    IndicatorKind,
    MfType,
    MunicipalProfile,
    PermittedRange,
    Project,
    SedLevel,
    TargetIndicator,
    aggregate_estimates,
    classify_impact,
    validate_project,
)
from munidss.errors import (
    ConflictError,
    ConvergenceError,
    EngineError,
    NotFoundError,
    ParseError,
    SingularityError,
    ValidationError,
    Violation,
)
from munidss.influence import (
    ImpactMatrix,
    InfluenceMatrix,
    build_matrix,
    spectral_radius_estimate,
    total_influence_closed,
    total_influence_series,
)
from munidss.planning import (
    CoverageReport,
    DocumentKind,
    DocumentRecord,
    PlanningHorizon,
    PlanningStage,
    SemanticNetwork,
    build_semantic_network,
    portfolio_coverage,
    required_documents,
    strategy_determinants,
)
from munidss.storage import ProjectStore, load_portfolio, load_project, save_portfolio, save_project

__version__ = "0.1.0"
