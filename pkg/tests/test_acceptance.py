"""Acceptance suite: exact micro-checks, property suites over randomized
instances, and directional reproduction of the reported sweep trends on the
bundled contended workload. One printed verdict line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines and
the full six-point sweep table.
"""
import random
import statistics
from importlib import resources as ir

import numpy as np
import pytest

from gridfed import engine as ev
from gridfed.economy import EconomyParams, ResourceSpec, quote_price, truncate2
from gridfed.engine import SimEngine
from gridfed.experiment import (
    emit_csv,
    load_config,
    load_workload_jobs,
    run_experiment,
    sweep_phi,
)
from gridfed.federation import FederationSim
from gridfed.lrms import BidEntry, Lrms
from gridfed.superscheduler import SlaBid, init_negotiation, tau_next_interval

from conftest import ARCHIVE_CLUSTERS, make_job

PHI_SWEEP = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
SEEDS = list(range(1, 11))

DESK_CONFIG = load_config(ir.files("gridfed") / "configs" / "desk_sweep.yaml")


def verdict(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {number}: {detail}"


# -- criterion 1: published quote reproduction ----------------------------------


def test_criterion_1_published_quote_prices():
    params = EconomyParams(access_price=5.3, fastest_mips=930.0)
    mismatches = [
        (name, truncate2(quote_price(mips, params)), quote)
        for _, name, _, mips, quote, _ in ARCHIVE_CLUSTERS
        if truncate2(quote_price(mips, params)) != quote
    ]
    verdict(1, not mismatches, f"8 published quotes from speeds, exact: {mismatches or 'ok'}")


# -- criterion 2: halving recurrence ----------------------------------------------


def test_criterion_2_halving_recurrence():
    worst = 0.0
    for t_neg in (0.0, 1.0, 120.0, 1e6):
        job = make_job(deadline=max(2.0 * t_neg, 1.0))
        state = init_negotiation(job, phi=t_neg / job.deadline)
        assert state.t_neg == t_neg
        granted = []
        for level in range(1, 45):
            dt = tau_next_interval(state)
            # the recurrence, recomputed independently from the recorded trace
            expected_dt = (t_neg - sum(granted)) / 2.0
            if expected_dt:
                worst = max(worst, abs(dt - expected_dt) / expected_dt)
            else:
                assert dt == 0.0
            granted.append(dt)
            state.consumed += dt
            closed_form = t_neg * (1.0 - 2.0 ** -level)
            if closed_form:
                worst = max(worst, abs(sum(granted) - closed_form) / closed_form)
    verdict(2, worst <= 1e-12, f"interval recurrence and partial sums, rel err {worst:.2e}")


# -- criterion 3: greedy vs oracles ------------------------------------------------


def _random_admission_instance(rng):
    capacity = rng.randint(2, 24)
    resource = ResourceSpec(1, "site", capacity, rng.uniform(1, 10), rng.uniform(0.5, 5))
    sim = SimEngine()
    lrms = Lrms(resource, sim)
    sim.on(ev.BID_REPLY, lambda e: None)
    sim.on(ev.JOB_FINISH, lambda e: None)
    from gridfed.economy import cost_B

    for i in range(rng.randint(1, 15)):
        job = make_job(
            index=i + 1,
            origin=2,
            processors=rng.randint(1, max(1, capacity // 2)),
            length_mi=rng.uniform(1, 100),
        )
        bid = SlaBid(job, 2, 1, expected_response=rng.uniform(1, 60),
                     expiry_window=100.0, iteration=1)
        lrms.pending.append(
            BidEntry(bid, arrival=float(rng.randint(0, 3)), expiry_at=100.0,
                     incentive=cost_B(job, resource))
        )
    return lrms, resource, capacity


def _prefix_oracle(entries, capacity, resource):
    order = sorted(entries, key=lambda e: (-e.incentive, e.arrival, e.bid.job_id))
    free, chosen = capacity, []
    for e in order:
        d = (e.bid.job.length_mi / resource.mips) * (1.0 + e.bid.job.comm_overhead)
        if e.bid.job.processors <= free and e.bid.expected_response >= d:
            chosen.append(e.bid.job_id)
            free -= e.bid.job.processors
    return chosen


_MASK_CACHE = {}


def _exhaustive_optimum(entries, capacity, resource):
    feasible = [
        e for e in entries
        if e.bid.expected_response
        >= (e.bid.job.length_mi / resource.mips) * (1.0 + e.bid.job.comm_overhead)
    ]
    n = len(feasible)
    if n == 0:
        return 0.0
    if n not in _MASK_CACHE:
        masks = np.arange(1 << n, dtype=np.int64)
        _MASK_CACHE[n] = ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)
    bits = _MASK_CACHE[n]
    procs = np.array([e.bid.job.processors for e in feasible], dtype=np.float64)
    incs = np.array([e.incentive for e in feasible], dtype=np.float64)
    weights = bits @ procs
    values = bits @ incs
    return float(values[weights <= capacity].max())


def test_criterion_3_greedy_vs_oracles():
    rng = random.Random(777)
    checked = 0
    for _ in range(1000):
        lrms, resource, capacity = _random_admission_instance(rng)
        entries = list(lrms.pending)
        expected = _prefix_oracle(entries, capacity, resource)
        accepted = lrms.strict_greedy()
        assert accepted == expected, f"greedy diverged from prefix oracle: {accepted} vs {expected}"
        optimum = _exhaustive_optimum(entries, capacity, resource)
        assert optimum >= lrms.earnings - 1e-9, "exhaustive optimum below greedy earnings"
        checked += 1
    verdict(3, checked == 1000, f"{checked} random instances: prefix-oracle exact, optimum dominates")


# -- criteria 4..7 share the contended synthetic sweep ------------------------------


@pytest.fixture(scope="module")
def sweep_runs():
    """10 seeds x 6 phi values over the bundled contended configuration."""
    per_phi = {phi: [] for phi in PHI_SWEEP}
    loads = []
    for seed in SEEDS:
        config = DESK_CONFIG.with_seed(seed)
        jobs, _ = load_workload_jobs(config)
        by_id = {r.id: r for r in config.resources}
        capacity = sum(r.processors for r in config.resources) * config.horizon
        offered = sum(
            j.processors * (j.length_mi / by_id[j.origin_resource].mips) for j in jobs
        )
        loads.append(offered / capacity)
        for report in sweep_phi(config, PHI_SWEEP):
            per_phi[report.phi].append(report)
    return per_phi, loads


def test_criterion_4_capacity_invariant():
    violations = 0
    runs = 0
    for seed in SEEDS:
        config = DESK_CONFIG.with_seed(seed).with_phi(0.3)
        try:
            run_experiment(config, audit_every_event=True)
        except Exception:
            violations += 1
        runs += 1
    for seed in SEEDS[:2]:  # the zero-window path too
        config = DESK_CONFIG.with_seed(seed).with_phi(0.0)
        try:
            run_experiment(config, audit_every_event=True)
        except Exception:
            violations += 1
        runs += 1
    verdict(4, violations == 0,
            f"{runs} audited runs (every event): free >= 0 and commitments <= capacity, "
            f"{violations} violations")


def test_criterion_5_owner_earnings_trend(sweep_runs):
    per_phi, loads = sweep_runs
    assert min(loads) >= 1.2, f"offered load fell below 1.2x capacity: {min(loads):.3f}"
    assert all(len(reports) == len(SEEDS) for reports in per_phi.values())
    mean_earnings = {
        phi: statistics.mean(r.total_earnings for r in reports)
        for phi, reports in per_phi.items()
    }
    print("\n  sweep over bid-delay fraction (means over 10 seeds):")
    print("  phi    earnings    avg_response   msgs/job")
    for phi in PHI_SWEEP:
        reports = per_phi[phi]
        print(
            f"  {phi:<4}  {mean_earnings[phi]:>10.1f}  "
            f"{statistics.mean(r.avg_response_time for r in reports):>12.2f}  "
            f"{statistics.mean(r.avg_messages_per_job for r in reports):>9.3f}"
        )
    ok = mean_earnings[0.5] >= mean_earnings[0.0]
    gain = mean_earnings[0.5] / mean_earnings[0.0] - 1.0
    verdict(5, ok, f"mean federation earnings up {gain:+.1%} from phi=0 to phi=0.5 "
                   f"(load >= {min(loads):.2f}x)")


def test_criterion_6_response_time_trend(sweep_runs):
    per_phi, _ = sweep_runs
    mean_resp = {
        phi: statistics.mean(r.avg_response_time for r in reports)
        for phi, reports in per_phi.items()
    }
    ok = mean_resp[0.5] >= mean_resp[0.0]
    verdict(6, ok, f"mean response time {mean_resp[0.0]:.1f} -> {mean_resp[0.5]:.1f} "
                   f"sim units from phi=0 to phi=0.5")


def test_criterion_7_message_stability(sweep_runs):
    per_phi, _ = sweep_runs
    means = [
        statistics.mean(r.avg_messages_per_job for r in per_phi[phi]) for phi in PHI_SWEEP
    ]
    spread = (max(means) - min(means)) / statistics.mean(means)
    verdict(7, spread <= 0.15,
            f"avg messages/job spread {spread:.1%} across the sweep (limit 15%)")


# -- criterion 8: determinism --------------------------------------------------------


def test_criterion_8_byte_identical_outputs(tmp_path):
    config = DESK_CONFIG.with_seed(3).with_phi(0.2)
    p1, f1 = emit_csv([run_experiment(config)], tmp_path / "run_a")
    p2, f2 = emit_csv([run_experiment(config)], tmp_path / "run_b")
    runs_equal = p1.read_bytes() == p2.read_bytes() and f1.read_bytes() == f2.read_bytes()

    phis = [0.0, 0.2, 0.5]
    p3, f3 = emit_csv(sweep_phi(DESK_CONFIG, phis, workers=1), tmp_path / "serial")
    p4, f4 = emit_csv(sweep_phi(DESK_CONFIG, phis, workers=3), tmp_path / "parallel")
    sweeps_equal = p3.read_bytes() == p4.read_bytes() and f3.read_bytes() == f4.read_bytes()
    verdict(8, runs_equal and sweeps_equal,
            f"repeat runs identical: {runs_equal}; serial vs 3-way-parallel sweep "
            f"identical: {sweeps_equal}")


# -- criterion 9: accounting closure ----------------------------------------------------


def test_criterion_9_accounting_closure(sweep_runs):
    per_phi, _ = sweep_runs
    # every sweep run already passed the internal earnings audit; re-check the
    # reported records and cross-check one full replay per regime
    for reports in per_phi.values():
        for report in reports:
            for rec in report.records:
                assert rec.jobs_accepted + rec.jobs_dropped + rec.jobs_in_flight == rec.jobs_submitted

    closure_ok = True
    for phi in (0.0, 0.3):
        config = DESK_CONFIG.with_seed(5).with_phi(phi)
        jobs, _ = load_workload_jobs(config)
        fed = FederationSim(
            list(config.resources), config.economy, phi=config.phi,
            user_mix=config.user_mix, min_bid_interval=config.min_bid_interval,
            t_s=config.t_s, t_r=config.t_r, seed=config.seed,
        )
        fed.submit_jobs(jobs)
        fed.run(config.horizon)
        fed.final_audit()
        for rid, lrms in fed.lrms.items():
            paid = sorted(
                mgr.budget_spent[jid]
                for mgr in fed.managers.values()
                for jid, at in mgr.accepted_at.items()
                if at == rid
            )
            closure_ok &= sorted(lrms.accepted_incentives) == paid
            closure_ok &= lrms.earnings == sum(lrms.accepted_incentives)
    verdict(9, closure_ok,
            "earnings equal accepted-job incentives on both sides; "
            "submitted = accepted + dropped in all 60 sweep runs")


# -- criterion 10: single-job end-to-end ---------------------------------------------


def test_criterion_10_single_job_exact(tmp_path):
    # whole stack: config file + one-row trace -> run_experiment -> report
    trace = tmp_path / "one.swf"
    trace.write_text("; single job\n1 10 0 100 4 -1 -1 -1\n")
    config_path = tmp_path / "single.yaml"
    config_path.write_text(
        "run: {seed: 1, horizon: 1000.0, phi: 0.0, t_s: 3.0, t_r: 2.0}\n"
        "resources:\n"
        "  - {id: 1, name: solo, processors: 8, mips: 850.0, price: 4.84}\n"
        "workload:\n"
        "  - {resource: 1, trace: one.swf}\n"
    )
    report = run_experiment(load_config(config_path))
    rec = report.records[0]
    length_mi = 100.0 * 850.0
    expected_response = 3.0 + (length_mi / 850.0) * (1.0 + 0.10) + 2.0
    ok = (
        report.jobs_accepted == 1
        and rec.local_messages == 4
        and rec.avg_response_time == expected_response
    )
    verdict(10, ok, f"accepted with {rec.local_messages} messages, response "
                    f"{rec.avg_response_time} == t_s + D + t_r = {expected_response}, exact")
