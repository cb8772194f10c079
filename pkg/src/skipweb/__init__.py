"""Skip-webs: randomized distributed search over range-determined link structures."""

from .core import (ConflictList, Kind, LinkStructure, OracleStats, Universe, build_structure, child_rng,
                   conflict_list, halve, halving_oracle, incidence_consistent)
from .errors import *  # noqa: F401,F403
from .hosting import CongestionReport, HostAssignment, assign_arbitrary, assign_bucketed_1d, congestion
from .netsim import (HyperLink, Message, MessageTrace, SimNetwork, make_network, messages_csv, net_load,
                     net_route_query, net_route_update, sw_query)
from .web import SkipWeb, rebuild_equivalent, sw_build, sw_delete, sw_insert

__version__ = "0.1.0"

__all__ = [
    "ConflictList", "Kind", "LinkStructure", "OracleStats", "Universe", "build_structure", "child_rng",
    "conflict_list", "halve", "halving_oracle", "incidence_consistent",
    "CongestionReport", "HostAssignment", "assign_arbitrary", "assign_bucketed_1d", "congestion",
    "HyperLink", "Message", "MessageTrace", "SimNetwork", "make_network", "messages_csv", "net_load",
    "net_route_query", "net_route_update", "sw_query",
    "SkipWeb", "rebuild_equivalent", "sw_build", "sw_delete", "sw_insert",
]
