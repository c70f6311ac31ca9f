"""Contractor-role agent: admission control over a queue of pending SLA bids.

Greedy backfilling scans the pending queue in decreasing order of the revenue
each bid brings the resource owner, reserving every bid that fits the free
processors and the bid's response-time requirement. The scan re-runs on every
bid arrival, bid expiry, and job completion. A zero-window bid bypasses the
queue entirely and is decided on the spot (the FCFS regime).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import engine as ev
from .economy import ResourceSpec, cost_B, exec_time_D
from .superscheduler import SlaBid


class CapacityAuditError(RuntimeError):
    """Free/committed processor accounting broke; indicates a scheduler bug."""


@dataclass(frozen=True)
class BidReplyMsg:
    job_id: tuple
    manager_id: int
    contractor_id: int
    accepted: bool
    expired: bool = False  # silent expiry: the manager's timeout, not a message
    price: float = 0.0


@dataclass(eq=False)  # queue entries are identity-compared for remove()
class BidEntry:
    bid: SlaBid
    arrival: float
    expiry_at: float
    incentive: float
    expiry_handle: "ev.EventHandle | None" = None


@dataclass
class Reservation:
    job_id: tuple
    manager_id: int
    processors: int
    length_mi: float
    start: float
    expected_finish: float
    incentive: float


@dataclass
class LrmsCounters:
    bids_received: int = 0
    remote_bids_received: int = 0
    duplicates: int = 0
    acceptances: int = 0
    rejections: int = 0
    completions: int = 0
    flushed: int = 0


class Lrms:
    """Local resource manager for one cluster: pending bids, reservations,
    free-processor accounting, and owner earnings."""

    def __init__(self, resource: ResourceSpec, sim: "ev.SimEngine", t_s: float = 0.0, t_r: float = 0.0):
        self.resource = resource
        self.sim = sim
        self.t_s = t_s
        self.t_r = t_r
        self.free = resource.processors
        self.pending: list[BidEntry] = []
        self.reservations: dict[tuple, Reservation] = {}
        self.completed: dict[tuple, Reservation] = {}
        self.earnings = 0.0
        self.mi_executed = 0.0
        self.proc_time_executed = 0.0
        self.accepted_incentives: list[float] = []
        self.counters = LrmsCounters()
        self._committed = 0

    # -- event handlers -------------------------------------------------------

    def on_bid_arrival(self, bid: SlaBid) -> None:
        self.counters.bids_received += 1
        if bid.manager_id != self.resource.id:
            self.counters.remote_bids_received += 1
        if bid.job_id in self.reservations or any(
            e.bid.job_id == bid.job_id for e in self.pending
        ):
            self.counters.duplicates += 1
            return
        if bid.job.processors > self.resource.processors:
            # unreachable via the directory's width filter; treat as lapsed
            self._reply(bid.job_id, bid.manager_id, accepted=False, expired=True)
            self.counters.rejections += 1
            return
        if bid.expiry_window == 0.0:
            accepted = self.fcfs_decide(bid)
            if not accepted:
                # a zero-window bid that is not accepted has expired on the
                # spot: the manager hears nothing, only its timeout fires
                self.counters.rejections += 1
                self._reply(bid.job_id, bid.manager_id, accepted=False, expired=True)
            return
        entry = BidEntry(
            bid=bid,
            arrival=self.sim.now,
            expiry_at=self.sim.now + bid.expiry_window,
            incentive=cost_B(bid.job, self.resource),
        )
        entry.expiry_handle = self.sim.schedule(entry.expiry_at, ev.BID_EXPIRY, entry)
        self.pending.append(entry)
        self.strict_greedy()

    def on_bid_expiry(self, entry: BidEntry) -> None:
        """Last-chance check at the bid's deadline: reserve if feasible now,
        otherwise the bid lapses and the manager's timeout takes over."""
        if entry not in self.pending:
            return  # reserved earlier; its timer was cancelled
        if self._feasible(entry):
            self.reserve(entry)
        else:
            self.pending.remove(entry)
            self.counters.rejections += 1
            self._reply(entry.bid.job_id, entry.bid.manager_id, accepted=False, expired=True)

    def on_dispatch_arrive(self, job_id: tuple) -> None:
        res = self.reservations.get(job_id)
        if res is None or res.start != self.sim.now:
            raise CapacityAuditError(f"dispatch for unknown/mistimed reservation {job_id}")

    def on_job_finish(self, job_id: tuple) -> None:
        res = self.reservations.pop(job_id)
        self.completed[job_id] = res
        self.free += res.processors
        self._committed -= res.processors
        self.mi_executed += res.length_mi
        self.proc_time_executed += res.processors * (res.expected_finish - res.start)
        self.counters.completions += 1
        self._audit()
        self.sim.schedule(
            self.sim.now + self.t_r, ev.RESULT_RETURN, (job_id, res.manager_id)
        )
        # freed capacity may admit pending bids in this same event cascade
        self.strict_greedy()

    # -- admission policies ----------------------------------------------------

    def strict_greedy(self) -> list[tuple]:
        """One scan over the pending queue in decreasing-incentive order,
        reserving every bid that fits. Single sort per pass: capacity changes
        during the scan cannot change the incentive order."""
        order = sorted(self.pending, key=lambda e: (-e.incentive, e.arrival, e.bid.job_id))
        accepted = []
        for entry in order:
            if self._feasible(entry):
                self.reserve(entry)
                accepted.append(entry.bid.job_id)
        return accepted

    def fcfs_decide(self, bid: SlaBid) -> bool:
        """Instant admission decision for a zero-window bid; never queued."""
        entry = BidEntry(
            bid=bid,
            arrival=self.sim.now,
            expiry_at=self.sim.now,
            incentive=cost_B(bid.job, self.resource),
        )
        if not self._feasible(entry):
            return False
        self.pending.append(entry)  # reserve() expects a queued entry
        self.reserve(entry)
        return True

    def reserve(self, entry: BidEntry) -> Reservation:
        bid = entry.bid
        if not self._feasible(entry):
            raise CapacityAuditError(f"reserve precondition violated for {bid.job_id}")
        if entry.expiry_handle is not None:
            self.sim.cancel(entry.expiry_handle)
        self.pending.remove(entry)
        self.free -= bid.job.processors
        self._committed += bid.job.processors
        start = self.sim.now + self.t_s
        res = Reservation(
            job_id=bid.job_id,
            manager_id=bid.manager_id,
            processors=bid.job.processors,
            length_mi=bid.job.length_mi,
            start=start,
            expected_finish=start + exec_time_D(bid.job, self.resource),
            incentive=entry.incentive,
        )
        self.reservations[bid.job_id] = res
        self.earnings += entry.incentive
        self.accepted_incentives.append(entry.incentive)
        self.counters.acceptances += 1
        self._audit()
        self.sim.schedule(res.expected_finish, ev.JOB_FINISH, (bid.job_id, self.resource.id))
        self._reply(bid.job_id, bid.manager_id, accepted=True, price=entry.incentive)
        return res

    def flush_pending(self) -> int:
        """Hard-stop cleanup: abandon still-pending bids without replies."""
        flushed = len(self.pending)
        for entry in self.pending:
            if entry.expiry_handle is not None:
                self.sim.cancel(entry.expiry_handle)
        self.pending.clear()
        self.counters.flushed += flushed
        return flushed

    # -- internals --------------------------------------------------------------

    def _feasible(self, entry: BidEntry) -> bool:
        bid = entry.bid
        return (
            self.free >= bid.job.processors
            and bid.expected_response >= exec_time_D(bid.job, self.resource)
        )

    def _reply(
        self, job_id: tuple, manager_id: int, accepted: bool, expired: bool = False, price: float = 0.0
    ) -> None:
        msg = BidReplyMsg(job_id, manager_id, self.resource.id, accepted, expired, price)
        self.sim.schedule(self.sim.now, ev.BID_REPLY, msg)

    def _audit(self) -> None:
        if self.free < 0 or self.free + self._committed != self.resource.processors:
            raise CapacityAuditError(
                f"{self.resource.name}: free={self.free} committed={self._committed} "
                f"total={self.resource.processors}"
            )

    def audit_full(self) -> None:
        """Recompute committed capacity from the reservation set (test hook)."""
        total = sum(r.processors for r in self.reservations.values())
        if total != self._committed or self.free + total != self.resource.processors:
            raise CapacityAuditError(
                f"{self.resource.name}: reservations hold {total}, counter says "
                f"{self._committed}, free={self.free}/{self.resource.processors}"
            )
