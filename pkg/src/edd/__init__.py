"""Evolutionary dungeon design toolkit.

A room/dungeon model with feasibility analysis, spatial/meso pattern
detection, five behavioral dimensions, a constrained MAP-Elites engine that
evolves rooms continuously while absorbing designer edits, a session
service for editor clients, and a headless experiment CLI.
"""

from .dungeon import (
    Connection,
    Dungeon,
    FeasibilityReport,
    PathHeuristic,
    add_room,
    check_dungeon_feasibility,
    connect_rooms,
    find_path,
    load_dungeon,
    remove_connection,
    remove_room,
    save_dungeon,
    set_initial_room,
    update_room,
)
from .engine import (
    Archive,
    CellUpdates,
    CommandRejected,
    ElitesBroadcast,
    Engine,
    EngineConfig,
    Individual,
    RequestSnapshot,
    SetDimensions,
    Snapshot,
    Start,
    Stop,
    UpdateTarget,
)
from .errors import (
    BoundsError,
    ContractError,
    EddError,
    InvalidBrushError,
    InvalidEndpointError,
    NoPathError,
    NotFoundError,
    OccupiedEndpointError,
    ParseError,
    PreconditionError,
    SelfLoopError,
    ValidationError,
)
from .experiment import (
    ExperimentResult,
    ExperimentSpec,
    default_target,
    render_figures,
    run_experiment,
    sweep_all_pairs,
)
from .metrics import (
    DEFAULT_FITNESS,
    DimensionDescriptor,
    DimensionKind,
    FitnessConfig,
    RoomMetrics,
    compute_room_metrics,
    dimension_values,
    evaluate_room,
    fitness_feasible,
    fitness_infeasible,
    room_feasible,
    similarity,
    symmetry,
)
from .patterns import (
    MesoConfig,
    MesoPattern,
    PatternGraph,
    PatternKind,
    SpatialPattern,
    analyze_room,
    pattern_overlay,
)
from .room import Position, Room, TileKind, create_room, parse_room, serialize_room
from .service import SCHEMA_VERSION, SessionService

__all__ = [
    "Archive",
    "BoundsError",
    "CellUpdates",
    "CommandRejected",
    "Connection",
    "ContractError",
    "DEFAULT_FITNESS",
    "DimensionDescriptor",
    "DimensionKind",
    "Dungeon",
    "EddError",
    "ElitesBroadcast",
    "Engine",
    "EngineConfig",
    "ExperimentResult",
    "ExperimentSpec",
    "FeasibilityReport",
    "FitnessConfig",
    "Individual",
    "InvalidBrushError",
    "InvalidEndpointError",
    "MesoConfig",
    "MesoPattern",
    "NoPathError",
    "NotFoundError",
    "OccupiedEndpointError",
    "ParseError",
    "PathHeuristic",
    "PatternGraph",
    "PatternKind",
    "Position",
    "PreconditionError",
    "RequestSnapshot",
    "Room",
    "RoomMetrics",
    "SCHEMA_VERSION",
    "SelfLoopError",
    "SessionService",
    "SetDimensions",
    "Snapshot",
    "SpatialPattern",
    "Start",
    "Stop",
    "TileKind",
    "UpdateTarget",
    "ValidationError",
    "add_room",
    "analyze_room",
    "check_dungeon_feasibility",
    "compute_room_metrics",
    "connect_rooms",
    "create_room",
    "default_target",
    "dimension_values",
    "evaluate_room",
    "find_path",
    "fitness_feasible",
    "fitness_infeasible",
    "load_dungeon",
    "parse_room",
    "pattern_overlay",
    "remove_connection",
    "remove_room",
    "render_figures",
    "room_feasible",
    "run_experiment",
    "save_dungeon",
    "serialize_room",
    "set_initial_room",
    "similarity",
    "sweep_all_pairs",
    "symmetry",
    "update_room",
]
