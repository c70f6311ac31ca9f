"""Deterministic discrete-event core: virtual clock, ordered event queue, run loop.

Events are totally ordered by (time, seq) where seq is the insertion counter,
so equal-time events fire in the order they were scheduled. All determinism
in the simulator rests on this ordering.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable

JOB_SUBMIT = "JobSubmit"
BID_ARRIVE = "BidArrive"
BID_REPLY = "BidReply"
BID_EXPIRY = "BidExpiry"
JOB_DISPATCH_ARRIVE = "JobDispatchArrive"
JOB_FINISH = "JobFinish"
RESULT_RETURN = "ResultReturn"

EVENT_KINDS = (
    JOB_SUBMIT,
    BID_ARRIVE,
    BID_REPLY,
    BID_EXPIRY,
    JOB_DISPATCH_ARRIVE,
    JOB_FINISH,
    RESULT_RETURN,
)


class CausalityError(RuntimeError):
    """An event was scheduled in the past; always a logic bug, never recoverable."""


@dataclass(frozen=True)
class Event:
    time: float
    seq: int
    kind: str
    payload: Any = None


class EventHandle:
    """Ticket for a scheduled event; used to cancel it before it fires."""

    __slots__ = ("event", "cancelled", "fired")

    def __init__(self, event: Event):
        self.event = event
        self.cancelled = False
        self.fired = False

    @property
    def pending(self) -> bool:
        return not (self.cancelled or self.fired)


@dataclass
class SimEngine:
    now: float = 0.0
    events_dispatched: int = 0
    _seq: int = field(default=0, repr=False)
    _heap: list = field(default_factory=list, repr=False)
    _handlers: dict = field(default_factory=dict, repr=False)

    def on(self, kind: str, handler: Callable[[Event], None]) -> None:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {kind!r}")
        self._handlers[kind] = handler

    def schedule(self, time: float, kind: str, payload: Any = None) -> EventHandle:
        if time < self.now:
            raise CausalityError(f"schedule at t={time} < now={self.now} ({kind})")
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {kind!r}")
        self._seq += 1
        handle = EventHandle(Event(time, self._seq, kind, payload))
        heapq.heappush(self._heap, (time, self._seq, handle))
        return handle

    def cancel(self, handle: EventHandle) -> bool:
        """Suppress a not-yet-fired event. Lazy deletion: the heap entry stays
        behind and is skipped on pop."""
        if not handle.pending:
            return False
        handle.cancelled = True
        return True

    def run_until(self, limit: float) -> float:
        """Process every event with time <= limit, in (time, seq) order.

        The clock only advances to dispatched event times, so on an empty (or
        exhausted) queue `now` stays at the last processed event.
        """
        if limit < self.now:
            raise CausalityError(f"run_until({limit}) < now={self.now}")
        while self._heap and self._heap[0][0] <= limit:
            _, _, handle = heapq.heappop(self._heap)
            if handle.cancelled:
                continue
            self._dispatch(handle)
        return self.now

    def run(self) -> float:
        """Drain the queue completely."""
        return self.run_until(math.inf)

    def _dispatch(self, handle: EventHandle) -> None:
        event = handle.event
        handle.fired = True
        self.now = event.time
        self.events_dispatched += 1
        handler = self._handlers.get(event.kind)
        if handler is None:
            raise RuntimeError(f"no handler registered for {event.kind}")
        handler(event)

    def __len__(self) -> int:
        return sum(1 for _, _, h in self._heap if not h.cancelled)
