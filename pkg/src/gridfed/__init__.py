"""Deterministic discrete-event simulator of SLA-bid superscheduling across a
federation of clusters, with a contract-net bidding protocol, greedy
backfilling admission control, and a bid-delay experiment harness."""

__version__ = "0.1.0"

from .directory import OFC, OFT, FederationDirectory, Quote
from .economy import (
    EconomyParams,
    ResourceSpec,
    assign_budget,
    assign_deadline,
    cost_B,
    exec_time_D,
    quote_price,
    truncate2,
)
from .engine import Event, EventHandle, SimEngine
from .federation import FederationSim
from .lrms import Lrms, Reservation
from .superscheduler import (
    NegotiationState,
    SlaBid,
    Superscheduler,
    init_negotiation,
    tau_next_interval,
)
from .workload import (
    Job,
    LoadReport,
    SyntheticSpec,
    TraceJob,
    TraceSource,
    parse_swf,
    serialize_swf,
    synth_generate,
    to_job,
)

__all__ = [
    "EconomyParams",
    "Event",
    "EventHandle",
    "FederationDirectory",
    "FederationSim",
    "Job",
    "LoadReport",
    "Lrms",
    "NegotiationState",
    "OFC",
    "OFT",
    "Quote",
    "Reservation",
    "ResourceSpec",
    "SimEngine",
    "SlaBid",
    "Superscheduler",
    "SyntheticSpec",
    "TraceJob",
    "TraceSource",
    "assign_budget",
    "assign_deadline",
    "cost_B",
    "exec_time_D",
    "init_negotiation",
    "parse_swf",
    "quote_price",
    "serialize_swf",
    "synth_generate",
    "tau_next_interval",
    "to_job",
    "truncate2",
]
