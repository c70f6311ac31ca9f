"""Manager-role agent: per-job SLA negotiation with geometrically shrinking
bid-expiry windows, walking the directory ranking until acceptance or drop.

The negotiation budget is a fraction phi of the job deadline; each bid is
granted half of the remaining budget, so the interval sequence halves and the
partial sums never exceed the budget. With phi = 0 bids carry a zero window,
contractors decide synchronously, and the walk is bounded to one pass over
the ranking (the FCFS regime).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import engine as ev
from .directory import FederationDirectory
from .workload import Job

BIDDING = "Bidding"
ACCEPTED = "Accepted"
DROPPED = "Dropped"


class DropReason(Enum):
    INFEASIBLE_SPLIT = "infeasible_split"
    NO_ELIGIBLE_RESOURCE = "no_eligible_resource"
    BUDGET_EXHAUSTED = "budget_exhausted"
    PASS_EXHAUSTED = "pass_exhausted"


@dataclass(frozen=True)
class SlaBid:
    """One manager-to-contractor negotiation message."""

    job: Job
    manager_id: int
    contractor_id: int
    expected_response: float  # d_e the contractor must fit within
    expiry_window: float  # delta-t the contractor has to decide
    iteration: int

    @property
    def job_id(self) -> tuple[int, int, int]:
        return self.job.id


@dataclass
class NegotiationState:
    job: Job
    strategy: str
    t_neg: float  # total bidding budget
    d_e: float  # effective deadline requirement carried in every bid
    consumed: float = 0.0
    iteration: int = 1
    rank_cursor: int = 1
    status: str = BIDDING
    drop_reason: DropReason | None = None
    # outstanding bid bookkeeping
    bid_sent_at: float | None = None
    bid_window: float | None = None
    bid_contractor: int | None = None
    # audit trail: every granted expiry window, in order
    granted_windows: list[float] = field(default_factory=list)
    # message accounting for this job
    bids_sent: int = 0
    replies_received: int = 0
    dispatches: int = 0
    results: int = 0

    @property
    def message_count(self) -> int:
        return self.bids_sent + self.replies_received + self.dispatches + self.results


def init_negotiation(
    job: Job, phi: float, t_s: float = 0.0, t_r: float = 0.0, strategy: str = "OFT"
) -> NegotiationState:
    """Split the job deadline into bidding budget and effective deadline.

    t_neg = phi * deadline; d_e = deadline - t_s - t_neg - t_r. An impossible
    split (transfer delays plus bidding exceed the deadline) drops the job
    immediately rather than raising: it is a workload property, not a bug.
    """
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi must be in [0, 1], got {phi}")
    if t_s < 0 or t_r < 0:
        raise ValueError("transfer delays must be >= 0")
    t_neg = phi * job.deadline
    d_e = job.deadline - t_s - t_neg - t_r
    state = NegotiationState(job=job, strategy=strategy, t_neg=t_neg, d_e=d_e)
    if d_e < 0:
        state.status = DROPPED
        state.drop_reason = DropReason.INFEASIBLE_SPLIT
    return state


def tau_next_interval(state: NegotiationState) -> float:
    """Next allowed bid expiry window: half of the unspent bidding budget."""
    if state.status != BIDDING:
        raise RuntimeError(f"negotiation is {state.status}, not {BIDDING}")
    return (state.t_neg - state.consumed) / 2.0


class Superscheduler:
    """One per resource; runs the manager side of every local job's negotiation."""

    def __init__(
        self,
        resource_id: int,
        sim: "ev.SimEngine",
        directory: FederationDirectory,
        min_bid_interval: float = 1.0,
        t_s: float = 0.0,
        t_r: float = 0.0,
    ):
        self.resource_id = resource_id
        self.sim = sim
        self.directory = directory
        self.min_bid_interval = min_bid_interval
        self.t_s = t_s
        self.t_r = t_r
        self.active: dict[tuple, NegotiationState] = {}
        self.closed: dict[tuple, NegotiationState] = {}
        self.stale_replies = 0
        # filled per accepted job at result return: job id -> response time
        self.response_times: dict[tuple, float] = {}
        self.budget_spent: dict[tuple, float] = {}
        self.accepted_at: dict[tuple, int] = {}

    # -- submission ---------------------------------------------------------

    def submit(self, job: Job, phi: float, strategy: str) -> NegotiationState:
        state = init_negotiation(job, phi, self.t_s, self.t_r, strategy)
        if state.status == DROPPED:
            self.closed[job.id] = state
            return state
        self.active[job.id] = state
        self._send_bid(state)
        return state

    # -- bidding ------------------------------------------------------------

    def _send_bid(self, state: NegotiationState) -> None:
        window = tau_next_interval(state)
        fcfs = state.t_neg == 0.0
        if fcfs:
            window = 0.0
            # one pass over the ranking: synchronous decisions, no wraparound
            eligible = self.directory.count_eligible(state.job.processors)
            if eligible == 0:
                self._drop(state, DropReason.NO_ELIGIBLE_RESOURCE)
                return
            if state.rank_cursor > eligible:
                self._drop(state, DropReason.PASS_EXHAUSTED)
                return
            rank = state.rank_cursor
        else:
            if window < self.min_bid_interval:
                self._drop(state, DropReason.BUDGET_EXHAUSTED)
                return
            eligible = self.directory.count_eligible(state.job.processors)
            if eligible == 0:
                self._drop(state, DropReason.NO_ELIGIBLE_RESOURCE)
                return
            # wrap back to rank 1 while budget remains
            rank = (state.rank_cursor - 1) % eligible + 1
        quote = self.directory.query_kth(state.strategy, rank, state.job.processors)
        assert quote is not None  # rank is within the eligible count
        bid = SlaBid(
            job=state.job,
            manager_id=self.resource_id,
            contractor_id=quote.resource_id,
            expected_response=state.d_e,
            expiry_window=window,
            iteration=state.iteration,
        )
        state.bid_sent_at = self.sim.now
        state.bid_window = window
        state.bid_contractor = quote.resource_id
        state.granted_windows.append(window)
        state.bids_sent += 1
        state.rank_cursor += 1
        state.iteration += 1
        self.sim.schedule(self.sim.now + self.directory.query_latency, ev.BID_ARRIVE, bid)

    # -- replies ------------------------------------------------------------

    def on_bid_reply(
        self,
        job_id: tuple,
        contractor_id: int,
        accepted: bool,
        expired: bool = False,
        price: float = 0.0,
    ) -> None:
        """Resolve the outstanding bid. `expired` marks the contractor's silent
        expiry (the manager's own timeout firing), which is not a message."""
        state = self.active.get(job_id)
        if state is None or state.bid_contractor != contractor_id:
            self.stale_replies += 1
            return
        if not expired:
            state.replies_received += 1
        elapsed = self.sim.now - state.bid_sent_at
        state.bid_sent_at = None
        state.bid_window = None
        state.bid_contractor = None
        if accepted:
            state.status = ACCEPTED
            self.accepted_at[job_id] = contractor_id
            self.budget_spent[job_id] = price
            state.dispatches += 1
            self.sim.schedule(
                self.sim.now + self.t_s, ev.JOB_DISPATCH_ARRIVE, (job_id, contractor_id)
            )
            self._close(state)
            return
        # rejected: charge only the elapsed part of the window and rebid
        state.consumed += elapsed
        self.on_bid_timeout(state)

    def on_bid_timeout(self, state: NegotiationState) -> None:
        """Continue or abandon the walk after a bid resolved negatively."""
        if state.status != BIDDING:
            return
        self._send_bid(state)

    def on_result_return(self, job_id: tuple) -> None:
        state = self.closed.get(job_id)
        if state is None or state.status != ACCEPTED:
            self.stale_replies += 1
            return
        state.results += 1
        self.response_times[job_id] = self.sim.now - state.job.submit_time

    # -- bookkeeping ---------------------------------------------------------

    def _drop(self, state: NegotiationState, reason: DropReason) -> None:
        state.status = DROPPED
        state.drop_reason = reason
        self._close(state)

    def _close(self, state: NegotiationState) -> None:
        del self.active[state.job.id]
        self.closed[state.job.id] = state
