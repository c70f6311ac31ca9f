"""Experiment harness: strict config loading, the run/sweep drivers, metrics
aggregation, and CSV emission.

Two CSV schemas are the external interface of a run:
  per_resource.csv: phi,resource,earnings,earnings_per_proc,mi_executed,
                    avg_response,avg_budget,jobs_accepted,jobs_dropped,
                    local_msgs,remote_msgs
  federation.csv:   phi,total_earnings,avg_response,avg_budget,avg_msgs_per_job
Numbers are written at full precision and runs are byte-reproducible from
(config, seed).
"""
from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .economy import EconomyParams, ResourceSpec, quote_price
from .federation import FederationAuditError, FederationSim
from .superscheduler import ACCEPTED, DROPPED
from .workload import (
    Job,
    LoadReport,
    SyntheticSpec,
    TraceSource,
    build_jobs,
    parse_swf,
    synth_generate,
)

GREEDY_BACKFILLING = "GreedyBackfilling"
FCFS = "FCFS"

PER_RESOURCE_COLUMNS = [
    "phi",
    "resource",
    "earnings",
    "earnings_per_proc",
    "mi_executed",
    "avg_response",
    "avg_budget",
    "jobs_accepted",
    "jobs_dropped",
    "local_msgs",
    "remote_msgs",
]
FEDERATION_COLUMNS = [
    "phi",
    "total_earnings",
    "avg_response",
    "avg_budget",
    "avg_msgs_per_job",
]


class ConfigError(ValueError):
    """Config file is malformed: missing/unknown keys or invariant violations."""


@dataclass(frozen=True)
class SimConfig:
    resources: tuple[ResourceSpec, ...]
    economy: EconomyParams
    workload: tuple[tuple[int, "TraceSource | SyntheticSpec"], ...]  # (resource id, source)
    phi: float
    horizon: float
    seed: int
    user_mix: float = 1.0
    min_bid_interval: float = 1.0
    t_s: float = 0.0
    t_r: float = 0.0
    policy: str = ""
    hard_stop: bool = False
    query_latency: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ConfigError(f"phi must be in [0, 1], got {self.phi}")
        if not 0.0 <= self.user_mix <= 1.0:
            raise ConfigError(f"user_mix must be in [0, 1], got {self.user_mix}")
        if self.horizon <= 0:
            raise ConfigError("horizon must be > 0")
        if not self.resources:
            raise ConfigError("at least one resource is required")
        ids = [r.id for r in self.resources]
        if len(set(ids)) != len(ids):
            raise ConfigError("resource ids must be unique")
        known = set(ids)
        for rid, _ in self.workload:
            if rid not in known:
                raise ConfigError(f"workload references unknown resource id {rid}")
        expected = FCFS if self.phi == 0.0 else GREEDY_BACKFILLING
        if self.policy and self.policy != expected:
            raise ConfigError(
                f"policy {self.policy!r} inconsistent with phi={self.phi} "
                f"(expected {expected!r})"
            )
        if not self.policy:
            object.__setattr__(self, "policy", expected)

    def with_phi(self, phi: float) -> "SimConfig":
        return dataclasses.replace(self, phi=phi, policy="")

    def with_seed(self, seed: int) -> "SimConfig":
        return dataclasses.replace(self, seed=seed)


@dataclass
class MetricsRecord:
    resource_id: int
    resource_name: str
    processors: int
    earnings: float = 0.0
    mi_executed: float = 0.0
    jobs_submitted: int = 0
    jobs_accepted: int = 0
    jobs_dropped: int = 0
    jobs_in_flight: int = 0
    jobs_completed: int = 0
    jobs_unschedulable: int = 0
    jobs_beyond_horizon: int = 0
    local_messages: int = 0
    remote_messages: int = 0
    response_sum: float = 0.0
    budget_sum: float = 0.0
    lambda_sla: float = 0.0
    mu_sla: float = 0.0
    busy_fraction: float = 0.0  # executed processor-time over capacity-time

    @property
    def earnings_per_processor(self) -> float:
        return self.earnings / self.processors

    @property
    def avg_response_time(self) -> float:
        return self.response_sum / self.jobs_completed if self.jobs_completed else 0.0

    @property
    def avg_budget_spent(self) -> float:
        return self.budget_sum / self.jobs_completed if self.jobs_completed else 0.0


@dataclass
class FederationReport:
    phi: float
    seed: int
    policy: str
    version: str
    records: list[MetricsRecord]
    config_echo: dict
    end_time: float = 0.0

    @property
    def total_earnings(self) -> float:
        return sum(r.earnings for r in self.records)

    @property
    def jobs_submitted(self) -> int:
        return sum(r.jobs_submitted for r in self.records)

    @property
    def jobs_accepted(self) -> int:
        return sum(r.jobs_accepted for r in self.records)

    @property
    def jobs_dropped(self) -> int:
        return sum(r.jobs_dropped for r in self.records)

    @property
    def avg_response_time(self) -> float:
        done = sum(r.jobs_completed for r in self.records)
        return sum(r.response_sum for r in self.records) / done if done else 0.0

    @property
    def avg_budget_spent(self) -> float:
        done = sum(r.jobs_completed for r in self.records)
        return sum(r.budget_sum for r in self.records) / done if done else 0.0

    @property
    def avg_messages_per_job(self) -> float:
        submitted = self.jobs_submitted
        total = sum(r.local_messages for r in self.records)
        return total / submitted if submitted else 0.0


# -- config loading ---------------------------------------------------------------


def _pop(section: dict, key: str, where: str, required: bool = True, default=None):
    if key in section:
        return section.pop(key)
    if required:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return default


def _reject_unknown(section: dict, where: str) -> None:
    if section:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(section)}")


def parse_synthetic_section(raw: dict, where: str) -> SyntheticSpec:
    procs_raw = _pop(raw, "processors", where)
    if not isinstance(procs_raw, dict):
        raise ConfigError(f"{where}.processors must map processor count to weight")
    weights = {int(k): float(v) for k, v in procs_raw.items()}
    spec = SyntheticSpec(
        count=int(_pop(raw, "count", where)),
        mean_interarrival=float(_pop(raw, "mean_interarrival", where)),
        mean_run_time=float(_pop(raw, "mean_run_time", where)),
        processor_weights=weights,
        seed=int(_pop(raw, "seed", where)),
    )
    _reject_unknown(raw, where)
    return spec


def load_config(path: str | Path, seed_override: int | None = None) -> SimConfig:
    """Parse and invariant-check a config file. Strict: unknown keys anywhere
    are errors, as are missing required fields."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base = Path(path).parent

    run = _pop(data, "run", "top level")
    economy_raw = _pop(data, "economy", "top level", required=False, default={}) or {}
    directory_raw = _pop(data, "directory", "top level", required=False, default={}) or {}
    resources_raw = _pop(data, "resources", "top level")
    workload_raw = _pop(data, "workload", "top level")
    _reject_unknown(data, "top level")

    try:
        economy = EconomyParams(
            access_price=float(_pop(economy_raw, "access_price", "economy", False, 5.3)),
            fastest_mips=float(_pop(economy_raw, "fastest_mips", "economy", False, 930.0)),
            budget_multiplier=float(_pop(economy_raw, "budget_multiplier", "economy", False, 2.0)),
            deadline_multiplier=float(_pop(economy_raw, "deadline_multiplier", "economy", False, 3.0)),
            comm_fraction=float(_pop(economy_raw, "comm_fraction", "economy", False, 0.10)),
        )
    except ValueError as exc:
        raise ConfigError(f"economy: {exc}") from exc
    _reject_unknown(economy_raw, "economy")

    query_latency = float(_pop(directory_raw, "query_latency", "directory", False, 0.0))
    _reject_unknown(directory_raw, "directory")

    if not isinstance(resources_raw, list) or not resources_raw:
        raise ConfigError("resources must be a non-empty list")
    resources = []
    for i, raw in enumerate(resources_raw):
        where = f"resources[{i}]"
        mips = float(_pop(raw, "mips", where))
        price = _pop(raw, "price", where, required=False)
        try:
            resources.append(
                ResourceSpec(
                    id=int(_pop(raw, "id", where)),
                    name=str(_pop(raw, "name", where)),
                    processors=int(_pop(raw, "processors", where)),
                    mips=mips,
                    price=float(price) if price is not None else quote_price(mips, economy),
                    bandwidth=float(_pop(raw, "bandwidth", where, False, 0.0)),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        _reject_unknown(raw, where)

    if not isinstance(workload_raw, list):
        raise ConfigError("workload must be a list of per-resource entries")
    workload = []
    for i, raw in enumerate(workload_raw):
        where = f"workload[{i}]"
        rid = int(_pop(raw, "resource", where))
        trace = _pop(raw, "trace", where, required=False)
        synthetic = _pop(raw, "synthetic", where, required=False)
        _reject_unknown(raw, where)
        if (trace is None) == (synthetic is None):
            raise ConfigError(f"{where}: exactly one of 'trace' or 'synthetic' is required")
        if trace is not None:
            trace_path = Path(trace)
            if not trace_path.is_absolute():
                trace_path = base / trace_path
            workload.append((rid, TraceSource(str(trace_path))))
        else:
            try:
                workload.append((rid, parse_synthetic_section(synthetic, f"{where}.synthetic")))
            except ValueError as exc:
                raise ConfigError(f"{where}.synthetic: {exc}") from exc

    seed = _pop(run, "seed", "run")
    if seed is None:
        raise ConfigError("run.seed must not be null")
    config = SimConfig(
        resources=tuple(resources),
        economy=economy,
        workload=tuple(workload),
        phi=float(_pop(run, "phi", "run")),
        horizon=float(_pop(run, "horizon", "run")),
        seed=int(seed) if seed_override is None else seed_override,
        user_mix=float(_pop(run, "user_mix", "run", False, 1.0)),
        min_bid_interval=float(_pop(run, "min_bid_interval", "run", False, 1.0)),
        t_s=float(_pop(run, "t_s", "run", False, 0.0)),
        t_r=float(_pop(run, "t_r", "run", False, 0.0)),
        policy=str(_pop(run, "policy", "run", False, "") or ""),
        hard_stop=bool(_pop(run, "hard_stop", "run", False, False)),
        query_latency=query_latency,
    )
    _reject_unknown(run, "run")
    return config


# -- running ------------------------------------------------------------------------


def _effective_synth_seed(run_seed: int, source_seed: int, resource_id: int) -> int:
    # run seed varies the workload deterministically while synth_generate
    # itself stays a pure function of its own seed
    return (run_seed * 1_000_003 + source_seed) * 31 + resource_id


def load_workload_jobs(config: SimConfig) -> tuple[list[Job], dict[int, LoadReport]]:
    """Materialize every resource's workload into federation jobs. Jobs past
    the horizon or wider than every resource are excluded and counted."""
    by_resource = {r.id: r for r in config.resources}
    reports: dict[int, LoadReport] = {}
    jobs: list[Job] = []
    seen_ids: set[tuple] = set()
    for rid, source in config.workload:
        report = reports.setdefault(rid, LoadReport())
        if isinstance(source, TraceSource):
            trace_jobs = parse_swf(source.path, report)
        else:
            spec = dataclasses.replace(
                source, seed=_effective_synth_seed(config.seed, source.seed, rid)
            )
            trace_jobs = synth_generate(spec)
        kept = [tj for tj in trace_jobs if tj.submit_time <= config.horizon]
        report.beyond_horizon += len(trace_jobs) - len(kept)
        for job in build_jobs(
            kept, by_resource[rid], list(config.resources), config.economy, report
        ):
            # duplicate job numbers (malformed trace, or two sources feeding
            # one resource) would silently merge negotiations; skip and count
            if job.id in seen_ids:
                report.skipped += 1
                continue
            seen_ids.add(job.id)
            jobs.append(job)
    return jobs, reports


def run_experiment(config: SimConfig, audit_every_event: bool = False) -> FederationReport:
    """One full simulation run: wire the federation, submit the workload, run
    to the horizon (plus drain unless hard_stop), audit, and aggregate."""
    jobs, reports = load_workload_jobs(config)
    fed = FederationSim(
        resources=list(config.resources),
        economy=config.economy,
        phi=config.phi,
        user_mix=config.user_mix,
        min_bid_interval=config.min_bid_interval,
        t_s=config.t_s,
        t_r=config.t_r,
        seed=config.seed,
        query_latency=config.query_latency,
        audit_every_event=audit_every_event,
    )
    fed.submit_jobs(jobs)
    end_time = fed.run(config.horizon, hard_stop=config.hard_stop)
    fed.final_audit(expect_drained=not config.hard_stop)

    records = []
    for resource in config.resources:
        rid = resource.id
        manager = fed.managers[rid]
        lrms = fed.lrms[rid]
        if lrms.earnings != sum(lrms.accepted_incentives):
            raise FederationAuditError(f"{resource.name}: earnings do not match incentives")
        record = MetricsRecord(
            resource_id=rid,
            resource_name=resource.name,
            processors=resource.processors,
            earnings=lrms.earnings,
            mi_executed=lrms.mi_executed,
        )
        states = list(manager.closed.values()) + list(manager.active.values())
        record.jobs_submitted = len(states)
        record.jobs_accepted = sum(1 for s in states if s.status == ACCEPTED)
        record.jobs_dropped = sum(1 for s in states if s.status == DROPPED)
        record.jobs_in_flight = record.jobs_submitted - record.jobs_accepted - record.jobs_dropped
        record.local_messages = sum(s.message_count for s in states)
        record.remote_messages = lrms.counters.remote_bids_received
        record.jobs_completed = len(manager.response_times)
        record.response_sum = sum(manager.response_times.values())
        record.budget_sum = sum(
            manager.budget_spent[jid] for jid in manager.response_times
        )
        report = reports.get(rid)
        if report is not None:
            record.jobs_unschedulable = report.unschedulable
            record.jobs_beyond_horizon = report.beyond_horizon
        if end_time > 0:
            record.lambda_sla = lrms.counters.bids_received / end_time
            record.mu_sla = lrms.counters.acceptances / end_time
            record.busy_fraction = lrms.proc_time_executed / (resource.processors * end_time)
        if record.jobs_accepted + record.jobs_dropped + record.jobs_in_flight != record.jobs_submitted:
            raise FederationAuditError(f"{resource.name}: job conservation violated")
        records.append(record)

    return FederationReport(
        phi=config.phi,
        seed=config.seed,
        policy=config.policy,
        version=__version__,
        records=records,
        config_echo={
            "phi": config.phi,
            "seed": config.seed,
            "horizon": config.horizon,
            "user_mix": config.user_mix,
            "policy": config.policy,
            "resources": [r.name for r in config.resources],
        },
        end_time=end_time,
    )


def sweep_phi(
    config: SimConfig, phi_values: list[float], workers: int = 1
) -> list[FederationReport]:
    """One independent run per phi, identical in everything else. Parallel
    execution is over fully isolated runs, so results match serial exactly."""
    for phi in phi_values:
        if not 0.0 <= phi <= 1.0:
            raise ConfigError(f"sweep phi {phi} outside [0, 1]")
    configs = [config.with_phi(phi) for phi in phi_values]
    if workers <= 1:
        return [run_experiment(c) for c in configs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, configs))


# -- CSV emission ----------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(reports: list[FederationReport], out_dir: str | Path) -> tuple[Path, Path]:
    """Write per_resource.csv and federation.csv (rows ordered by phi, then
    resource config order; full-precision numbers)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ordered = sorted(reports, key=lambda r: r.phi)

    per_resource = out / "per_resource.csv"
    with open(per_resource, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PER_RESOURCE_COLUMNS)
        for report in ordered:
            for rec in report.records:
                writer.writerow(
                    [
                        _fmt(report.phi),
                        rec.resource_name,
                        _fmt(rec.earnings),
                        _fmt(rec.earnings_per_processor),
                        _fmt(rec.mi_executed),
                        _fmt(rec.avg_response_time),
                        _fmt(rec.avg_budget_spent),
                        rec.jobs_accepted,
                        rec.jobs_dropped,
                        rec.local_messages,
                        rec.remote_messages,
                    ]
                )

    federation = out / "federation.csv"
    with open(federation, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FEDERATION_COLUMNS)
        for report in ordered:
            writer.writerow(
                [
                    _fmt(report.phi),
                    _fmt(report.total_earnings),
                    _fmt(report.avg_response_time),
                    _fmt(report.avg_budget_spent),
                    _fmt(report.avg_messages_per_job),
                ]
            )
    return per_resource, federation
