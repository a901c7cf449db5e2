"""Morphological analysis engine for structured scenario modelling."""
from __future__ import annotations

from .errors import (
    AssemblyError,
    BudgetExceededError,
    ConstraintError,
    FieldError,
    IngestError,
    MorphspaceError,
    NotFoundError,
    ParamError,
    PairError,
    RevisionConflictError,
    ScaleError,
    ShapeError,
)
from .field import (
    ConditionDef,
    Configuration,
    Dimension,
    ExclusionSet,
    MorphologicalField,
    count_configurations,
    count_consistent_configurations,
    count_cross_dimension_pairs,
    enumerate_configurations,
    exclusions_for_pins,
    field_from_dict,
    field_to_dict,
    load_field,
    make_exclusions,
    merge_exclusions,
)
from .survey import (
    ConditionScore,
    LikertBand,
    LikertScale,
    SurveyResponse,
    aggregate,
    band_value,
    rank_conditions,
)
from .pairs import (
    ConsistencyJudgment,
    ScenarioPair,
    apply_judgments,
    combine_values,
    consistent_pairs,
    generate_pairs,
    judgments_to_exclusions,
)
from .graphs import (
    CliqueSet,
    CommunityPartition,
    CorrelationMatrix,
    ThresholdGraph,
    betweenness_centrality,
    build_graph,
    condition_profiles,
    connected_components,
    correlation_matrix,
    dimension_profiles,
    graph_from_edges,
    greedy_modularity_communities,
    maximal_cliques,
    modularity,
    respondent_profiles,
)
from .clustering import ClusterModel, KMeansResult, cluster_pairs, kmeans
from .report import (
    Concordance,
    ConditionAffinity,
    Scenario,
    assemble_scenarios,
    check_published_averages,
    condition_affinities,
    risk_matrix_plot_data,
    scorecard_concordance,
    write_report_bundle,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
