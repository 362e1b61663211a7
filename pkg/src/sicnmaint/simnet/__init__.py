from .topology import (
    Link,
    Network,
    Router,
    Topology,
    TopologyError,
    default_topology,
    load_topology,
    reachable_prefixes,
    shortest_path,
)
from .scenario import GenConfig, ScenarioEvent, Scenario, ScenarioError, load_scenario
from .generate import generate_stream

__all__ = [
    "Link",
    "Network",
    "Router",
    "Topology",
    "TopologyError",
    "default_topology",
    "load_topology",
    "reachable_prefixes",
    "shortest_path",
    "GenConfig",
    "ScenarioEvent",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "generate_stream",
]
