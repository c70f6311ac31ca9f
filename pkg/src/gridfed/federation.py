"""Wires one simulation run: engine, directory, and a manager/LRMS pair per
resource, with event routing between them. Single execution stream; distinct
runs share nothing mutable."""
from __future__ import annotations

import random

from . import engine as ev
from .directory import OFC, OFT, FederationDirectory, Quote
from .economy import EconomyParams, ResourceSpec
from .engine import SimEngine
from .lrms import BidReplyMsg, Lrms
from .superscheduler import ACCEPTED, DROPPED, SlaBid, Superscheduler
from .workload import Job


class FederationAuditError(RuntimeError):
    """End-of-run cross-check between managers and contractors failed."""


class FederationSim:
    def __init__(
        self,
        resources: list[ResourceSpec],
        economy: EconomyParams,
        phi: float,
        user_mix: float = 1.0,
        min_bid_interval: float = 1.0,
        t_s: float = 0.0,
        t_r: float = 0.0,
        seed: int = 0,
        query_latency: float = 0.0,
        audit_every_event: bool = False,
    ):
        self.resources = list(resources)
        self.economy = economy
        self.phi = phi
        self.user_mix = user_mix
        self.seed = seed
        self.sim = SimEngine()
        self.directory = FederationDirectory(query_latency=query_latency)
        for r in self.resources:
            self.directory.subscribe(Quote(r.id, r.price, r.mips, r.processors))
        self.lrms = {
            r.id: Lrms(r, self.sim, t_s=t_s, t_r=t_r) for r in self.resources
        }
        self.managers = {
            r.id: Superscheduler(
                r.id, self.sim, self.directory, min_bid_interval, t_s, t_r
            )
            for r in self.resources
        }
        self._strategy_rng = random.Random(seed * 1_000_003 + 17)
        self._audit = audit_every_event
        self._wire()

    def _wire(self) -> None:
        def handler(fn):
            if not self._audit:
                return fn

            def checked(event):
                fn(event)
                for lrms in self.lrms.values():
                    lrms.audit_full()

            return checked

        s = self.sim
        s.on(ev.JOB_SUBMIT, handler(self._on_job_submit))
        s.on(ev.BID_ARRIVE, handler(self._on_bid_arrive))
        s.on(ev.BID_REPLY, handler(self._on_bid_reply))
        s.on(ev.BID_EXPIRY, handler(self._on_bid_expiry))
        s.on(ev.JOB_DISPATCH_ARRIVE, handler(self._on_dispatch))
        s.on(ev.JOB_FINISH, handler(self._on_finish))
        s.on(ev.RESULT_RETURN, handler(self._on_result))

    # -- event routing ---------------------------------------------------------

    def _on_job_submit(self, event: ev.Event) -> None:
        job, strategy = event.payload
        self.managers[job.origin_resource].submit(job, self.phi, strategy)

    def _on_bid_arrive(self, event: ev.Event) -> None:
        bid: SlaBid = event.payload
        self.lrms[bid.contractor_id].on_bid_arrival(bid)

    def _on_bid_reply(self, event: ev.Event) -> None:
        msg: BidReplyMsg = event.payload
        self.managers[msg.manager_id].on_bid_reply(
            msg.job_id, msg.contractor_id, msg.accepted, msg.expired, msg.price
        )

    def _on_bid_expiry(self, event: ev.Event) -> None:
        entry = event.payload
        self.lrms[entry.bid.contractor_id].on_bid_expiry(entry)

    def _on_dispatch(self, event: ev.Event) -> None:
        job_id, contractor_id = event.payload
        self.lrms[contractor_id].on_dispatch_arrive(job_id)

    def _on_finish(self, event: ev.Event) -> None:
        job_id, resource_id = event.payload
        self.lrms[resource_id].on_job_finish(job_id)

    def _on_result(self, event: ev.Event) -> None:
        job_id, manager_id = event.payload
        self.managers[manager_id].on_result_return(job_id)

    # -- run lifecycle -----------------------------------------------------------

    def submit_jobs(self, jobs: list[Job]) -> None:
        """Schedule submission events; each job draws its user's optimization
        preference (time vs cost) from the run's strategy stream."""
        for job in jobs:
            strategy = OFT if self._strategy_rng.random() < self.user_mix else OFC
            self.sim.schedule(job.submit_time, ev.JOB_SUBMIT, (job, strategy))

    def run(self, horizon: float, hard_stop: bool = False) -> float:
        """Run to the horizon. By default in-flight work then drains with no
        new submissions (callers only submit jobs inside the horizon); with
        hard_stop the clock stops at the horizon and leftovers are flushed."""
        if hard_stop:
            end = self.sim.run_until(horizon)
            for lrms in self.lrms.values():
                lrms.flush_pending()
            return end
        return self.sim.run()

    # -- end-of-run audit ----------------------------------------------------------

    def final_audit(self, expect_drained: bool = True) -> None:
        for lrms in self.lrms.values():
            lrms.audit_full()
            if expect_drained and (lrms.pending or lrms.reservations):
                raise FederationAuditError(
                    f"{lrms.resource.name} not drained: {len(lrms.pending)} pending, "
                    f"{len(lrms.reservations)} running"
                )
        completed_at = {}
        for rid, lrms in self.lrms.items():
            for job_id in lrms.completed:
                if job_id in completed_at:
                    raise FederationAuditError(f"job {job_id} completed at two resources")
                completed_at[job_id] = rid
        for manager in self.managers.values():
            for job_id, state in manager.closed.items():
                if state.status == ACCEPTED and expect_drained:
                    if completed_at.get(job_id) != manager.accepted_at[job_id]:
                        raise FederationAuditError(
                            f"accepted job {job_id} not completed at its contractor"
                        )
                elif state.status == DROPPED and job_id in completed_at:
                    raise FederationAuditError(f"dropped job {job_id} was executed")
