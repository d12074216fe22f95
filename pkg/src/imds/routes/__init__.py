from .compile import (
    CapacityExceeded,
    CapacityUnderflow,
    NameCollision,
    check_protocol_safety,
    compile_to_imds,
    occupied_chambers,
    parse_service,
    service_name,
)
from .plans import (
    DiscontinuousFragments,
    NoRouteExists,
    PlanError,
    RoutePlan,
    SubRoute,
    UnanchorableCycle,
    chamber_of,
    compose_subroutes,
    dump_plans,
    generate_all_behaviors,
    generate_identical_fleet,
    generate_many_behaviors,
    generate_similar_behavior,
    load_plans,
    partition_route,
    stage_plans,
    validate_plan,
)
from .topology import (
    Chamber,
    EnvGraph,
    NoAutomorphism,
    TopologyError,
    UnsupportedTopology,
    dump_env_graph,
    load_env_graph,
    quadrant_topology,
    rotation,
    rotation_between,
)

__all__ = [name for name in dir() if not name.startswith("_")]
