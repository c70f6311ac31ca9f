"""Pricing, expected-response-time and cost functions, and the fabricated
per-job budget/deadline assignment.

A resource's advertised price scales linearly with its per-processor speed,
anchored at the access price of the fastest resource in the federation.
Internal arithmetic keeps full precision; only reports truncate to 2 decimals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class WidthError(ValueError):
    """Job requires more processors than the resource has; caller must pre-filter."""


@dataclass(frozen=True)
class ResourceSpec:
    id: int
    name: str
    processors: int
    mips: float
    price: float  # grid dollars per processor-sim-unit
    bandwidth: float = 0.0  # Gb/s, carried for config fidelity, unused by default model

    def __post_init__(self):
        if self.processors < 1:
            raise ValueError(f"resource {self.name}: processors must be >= 1")
        if self.mips <= 0:
            raise ValueError(f"resource {self.name}: mips must be > 0")
        if self.price <= 0:
            raise ValueError(f"resource {self.name}: price must be > 0")


@dataclass(frozen=True)
class EconomyParams:
    access_price: float = 5.3  # price of the fastest resource, grid dollars
    fastest_mips: float = 930.0
    budget_multiplier: float = 2.0
    deadline_multiplier: float = 3.0
    comm_fraction: float = 0.10

    def __post_init__(self):
        if self.access_price <= 0 or self.fastest_mips <= 0:
            raise ValueError("access_price and fastest_mips must be > 0")
        if self.budget_multiplier < 1 or self.deadline_multiplier < 1:
            raise ValueError("budget and deadline multipliers must be >= 1")
        if not 0 <= self.comm_fraction < 1:
            raise ValueError("comm_fraction must be in [0, 1)")


def quote_price(mips: float, params: EconomyParams) -> float:
    """Advertised price for a resource of the given speed, full precision."""
    if mips > params.fastest_mips:
        raise ValueError(f"mips {mips} exceeds fastest_mips {params.fastest_mips}")
    return params.access_price * (mips / params.fastest_mips)


def truncate2(value: float) -> float:
    """Truncate (not round) to 2 decimals, the convention of published quotes."""
    return math.floor(value * 100.0) / 100.0


def _response_time(job, resource: ResourceSpec) -> float:
    return (job.length_mi / resource.mips) * (1.0 + job.comm_overhead)


def exec_time_D(job, resource: ResourceSpec) -> float:
    """Expected response time of `job` on dedicated processors of `resource`:
    compute time plus communication overhead. Queue wait is excluded because
    admission only ever commits jobs that can start immediately."""
    if resource.processors < job.processors:
        raise WidthError(
            f"job needs {job.processors} processors, {resource.name} has {resource.processors}"
        )
    return _response_time(job, resource)


def cost_B(job, resource: ResourceSpec) -> float:
    """Expected budget spent running `job` at `resource`: price per
    processor-sim-unit times processors held times expected response time."""
    return resource.price * job.processors * exec_time_D(job, resource)


def assign_budget(job, origin: ResourceSpec, params: EconomyParams) -> float:
    # fabrication of SLA terms has no width precondition: the origin formula
    # applies even to jobs that can only run elsewhere in the federation
    return params.budget_multiplier * origin.price * job.processors * _response_time(job, origin)


def assign_deadline(job, origin: ResourceSpec, params: EconomyParams) -> float:
    return params.deadline_multiplier * _response_time(job, origin)
