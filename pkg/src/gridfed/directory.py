"""In-memory federation directory: quote registry with ranked k-th cheapest /
k-th fastest queries. Stands in for the shared distributed directory."""
from __future__ import annotations

from dataclasses import dataclass

OFT = "OFT"  # optimize for time: rank by speed, fastest first
OFC = "OFC"  # optimize for cost: rank by price, cheapest first
STRATEGIES = (OFT, OFC)


@dataclass(frozen=True)
class Quote:
    resource_id: int
    price: float
    mips: float
    processors: int


class FederationDirectory:
    """One live quote per resource id. Ties in either ranking break by
    ascending resource id, so enumeration order is total."""

    def __init__(self, query_latency: float = 0.0):
        self.query_latency = query_latency
        self.queries = 0
        self._quotes: dict[int, Quote] = {}
        self._by_speed: list[Quote] | None = None
        self._by_price: list[Quote] | None = None

    def __len__(self) -> int:
        return len(self._quotes)

    def subscribe(self, quote: Quote) -> None:
        self._quotes[quote.resource_id] = quote
        self._by_speed = self._by_price = None

    def unsubscribe(self, resource_id: int) -> bool:
        present = resource_id in self._quotes
        if present:
            del self._quotes[resource_id]
            self._by_speed = self._by_price = None
        return present

    def _ranked(self, strategy: str) -> list[Quote]:
        if strategy == OFT:
            if self._by_speed is None:
                self._by_speed = sorted(
                    self._quotes.values(), key=lambda q: (-q.mips, q.resource_id)
                )
            return self._by_speed
        if strategy == OFC:
            if self._by_price is None:
                self._by_price = sorted(
                    self._quotes.values(), key=lambda q: (q.price, q.resource_id)
                )
            return self._by_price
        raise ValueError(f"unknown query strategy: {strategy!r}")

    def query_kth(self, strategy: str, k: int, min_processors: int = 1) -> Quote | None:
        """k-th quote (1-based) in the strategy's ranking, restricted to
        resources wide enough for min_processors. None when k is exhausted."""
        if k < 1:
            raise ValueError("k must be >= 1")
        self.queries += 1
        i = 0
        for quote in self._ranked(strategy):
            if quote.processors >= min_processors:
                i += 1
                if i == k:
                    return quote
        return None

    def count_eligible(self, min_processors: int = 1) -> int:
        return sum(1 for q in self._quotes.values() if q.processors >= min_processors)
