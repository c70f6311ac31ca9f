"""Shared fixtures: the eight-cluster published configuration and small
job/resource builders used across the suite."""
from __future__ import annotations

import pytest

from gridfed.economy import EconomyParams
from gridfed.workload import Job

# (id, name, processors, mips, published quote, bandwidth)
ARCHIVE_CLUSTERS = [
    (1, "CTC SP2", 512, 850.0, 4.84, 2.0),
    (2, "KTH SP2", 100, 900.0, 5.12, 1.6),
    (3, "LANL CM5", 1024, 700.0, 3.98, 1.0),
    (4, "LANL Origin", 2048, 630.0, 3.59, 1.6),
    (5, "NASA iPSC", 128, 930.0, 5.3, 4.0),
    (6, "SDSC Par96", 416, 710.0, 4.04, 1.0),
    (7, "SDSC Blue", 1152, 730.0, 4.16, 2.0),
    (8, "SDSC SP2", 128, 920.0, 5.24, 4.0),
]


def make_job(
    index: int = 1,
    origin: int = 1,
    processors: int = 1,
    length_mi: float = 100.0,
    comm_overhead: float = 0.0,
    budget: float = 1000.0,
    deadline: float = 1000.0,
    submit_time: float = 0.0,
) -> Job:
    return Job(
        id=(index, 1, origin),
        origin_resource=origin,
        processors=processors,
        length_mi=length_mi,
        comm_overhead=comm_overhead,
        budget=budget,
        deadline=deadline,
        submit_time=submit_time,
    )


@pytest.fixture
def economy():
    return EconomyParams()
