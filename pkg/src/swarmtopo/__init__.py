"""Swarm-encounter geometry and topology mapping toolkit."""

from .classifier import (
    ClassifierParams,
    ClassificationOutcome,
    IntervalSet,
    betti_error,
    classify_diagram,
    estimate_betti,
    sensitivity,
    snr,
    train,
)
from .diagram_metrics import MatchingResult, bottleneck_distance, hausdorff_distance
from .geodesic import (
    FreeSpaceGraph,
    SpaceTimePoint,
    estimate_deltas,
    geodesic_distance,
    pairwise_geodesics,
    reference_point_cloud,
    space_time_distance,
)
from .geometry import Domain
from .mds import Embedding2D, classical_mds
from .metric import (
    ConvergenceEstimate,
    EncounterGraph,
    build_encounter_graph,
    community_distances,
    estimate_lambda3,
    shortest_path_metric,
)
from .persistence import (
    BettiCounts,
    Filtration,
    PersistenceDiagram,
    betti_at_scale,
    build_rips_filtration,
    compute_persistence,
    rips_diagram,
)
from .pipeline import ScenarioConfig, run_pipeline, run_seed, run_sweep
from .simulate import (
    AgentState,
    CrwParams,
    EncounterEvent,
    LandmarkCommunity,
    SensingParams,
    SimulationResult,
    reflect_heading,
    sample_segment_length,
    select_landmarks,
    simulate,
)
from .subsample import SubsampleParams, knn_filter, maxmin_subsample

__version__ = "0.1.0"
