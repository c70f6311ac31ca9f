"""Workload ingestion: Standard Workload Format traces, synthetic generation,
and conversion of trace rows into federation jobs with fabricated SLA terms.

Only four SWF columns are consumed (1-based: 1 job number, 2 submit time,
4 run time, 5 allocated processors). SWF encodes missing values as -1, so
rows with non-positive run time or processors are skipped, never clamped.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .economy import EconomyParams, ResourceSpec, assign_budget, assign_deadline


@dataclass(frozen=True)
class TraceJob:
    job_index: int
    submit_time: float
    run_time: float
    allocated_processors: int

    def __post_init__(self):
        if self.run_time <= 0:
            raise ValueError("run_time must be > 0")
        if self.allocated_processors < 1:
            raise ValueError("allocated_processors must be >= 1")
        if self.submit_time < 0:
            raise ValueError("submit_time must be >= 0")


@dataclass(frozen=True)
class Job:
    """A parallel job with SLA parameters, identified by an (i, j, k) triple:
    i-th job of the j-th user at origin resource k."""

    id: tuple[int, int, int]
    origin_resource: int
    processors: int
    length_mi: float
    comm_overhead: float
    budget: float
    deadline: float  # relative to submission
    submit_time: float

    def __post_init__(self):
        if self.length_mi <= 0:
            raise ValueError(f"job {self.id}: length_mi must be > 0")
        if not 0 <= self.comm_overhead < 1:
            raise ValueError(f"job {self.id}: comm_overhead must be in [0, 1)")
        if self.budget <= 0:
            raise ValueError(f"job {self.id}: budget must be > 0")
        if self.deadline <= 0:
            raise ValueError(f"job {self.id}: deadline must be > 0")


@dataclass(frozen=True)
class SyntheticSpec:
    count: int
    mean_interarrival: float
    mean_run_time: float
    processor_weights: dict[int, float]  # processors -> relative weight
    seed: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if self.mean_interarrival <= 0 or self.mean_run_time <= 0:
            raise ValueError("synthetic means must be > 0")
        if not self.processor_weights:
            raise ValueError("processor_weights must be non-empty")
        for procs, weight in self.processor_weights.items():
            if procs < 1 or weight <= 0:
                raise ValueError("processor_weights entries must be positive")


@dataclass(frozen=True)
class TraceSource:
    path: str


@dataclass
class LoadReport:
    rows: int = 0
    comments: int = 0
    skipped: int = 0
    unschedulable: int = 0
    beyond_horizon: int = 0
    skipped_lines: list[int] = field(default_factory=list)


def parse_swf(path: str | Path, report: LoadReport | None = None) -> list[TraceJob]:
    """One TraceJob per valid data row; ';' comment lines skipped; malformed
    or missing-value rows counted in the report and dropped."""
    report = report if report is not None else LoadReport()
    jobs = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(";"):
                report.comments += 1
                continue
            report.rows += 1
            fields = stripped.split()
            try:
                index = int(fields[0])
                submit = float(fields[1])
                run_time = float(fields[3])
                procs = int(float(fields[4]))
            except (IndexError, ValueError):
                report.skipped += 1
                report.skipped_lines.append(lineno)
                continue
            if run_time <= 0 or procs <= 0 or submit < 0:
                report.skipped += 1
                report.skipped_lines.append(lineno)
                continue
            jobs.append(TraceJob(index, submit, run_time, procs))
    return jobs


def _num(value: float) -> str:
    # ints render without a trailing .0 so integer traces round-trip verbatim
    return str(int(value)) if value == int(value) else repr(value)


def serialize_swf(jobs: list[TraceJob], path: str | Path, header: str = "") -> None:
    """Write jobs as SWF rows (18 columns, unused ones -1). Parsing the result
    recovers the same four consumed fields."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"; {line}\n")
        for job in jobs:
            cols = ["-1"] * 18
            cols[0] = str(job.job_index)
            cols[1] = _num(job.submit_time)
            cols[3] = _num(job.run_time)
            cols[4] = str(job.allocated_processors)
            fh.write(" ".join(cols) + "\n")


def synth_generate(spec: SyntheticSpec) -> list[TraceJob]:
    """Deterministic synthetic trace: exponential inter-arrivals and run times
    (run time floored at 1), processors drawn from the given weights."""
    rng = random.Random(spec.seed)
    procs_values = sorted(spec.processor_weights)
    procs_weights = [spec.processor_weights[v] for v in procs_values]
    jobs = []
    t = 0.0
    for i in range(1, spec.count + 1):
        t += rng.expovariate(1.0 / spec.mean_interarrival)
        run_time = max(1.0, rng.expovariate(1.0 / spec.mean_run_time))
        procs = rng.choices(procs_values, weights=procs_weights)[0]
        jobs.append(TraceJob(i, t, run_time, procs))
    return jobs


def to_job(
    trace_job: TraceJob,
    origin: ResourceSpec,
    params: EconomyParams,
    user_index: int = 1,
) -> Job:
    """Convert a trace row into a federation job. Length is run time times the
    origin's MIPS rating, so the job's zero-overhead execution time on its
    origin equals its trace run time."""
    length = trace_job.run_time * origin.mips
    draft = _JobDims(trace_job.allocated_processors, length, params.comm_fraction)
    return Job(
        id=(trace_job.job_index, user_index, origin.id),
        origin_resource=origin.id,
        processors=trace_job.allocated_processors,
        length_mi=length,
        comm_overhead=params.comm_fraction,
        budget=assign_budget(draft, origin, params),
        deadline=assign_deadline(draft, origin, params),
        submit_time=trace_job.submit_time,
    )


@dataclass(frozen=True)
class _JobDims:
    # minimal job view for the economy functions, used before the Job exists
    processors: int
    length_mi: float
    comm_overhead: float


def build_jobs(
    trace_jobs: list[TraceJob],
    origin: ResourceSpec,
    resources: list[ResourceSpec],
    params: EconomyParams,
    report: LoadReport | None = None,
) -> list[Job]:
    """to_job over a trace, excluding jobs wider than every federation
    resource (they can never be admitted anywhere; flagged, not submitted)."""
    widest = max(r.processors for r in resources)
    jobs = []
    for trace_job in trace_jobs:
        if trace_job.allocated_processors > widest:
            if report is not None:
                report.unschedulable += 1
            continue
        jobs.append(to_job(trace_job, origin, params))
    return jobs
