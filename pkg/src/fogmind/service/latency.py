"""Publish-to-dispatch latency bookkeeping."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass


@dataclass(frozen=True)
class LatencyRecord:
    probe: str
    kind: str  # voice | image | text
    publish_ms: float
    dispatch_ms: float

    def __post_init__(self):
        if self.dispatch_ms < self.publish_ms:
            raise ValueError("dispatch precedes publish")

    @property
    def elapsed_ms(self) -> float:
        return self.dispatch_ms - self.publish_ms


def _percentile(ordered, fraction: float) -> float:
    # nearest-rank on an already sorted list
    rank = max(1, math.ceil(fraction * len(ordered)))
    return ordered[rank - 1]


class LatencyTracker:
    """Accumulates records and summarizes them per message kind."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_kind: dict[str, list[float]] = {}

    def record(self, rec: LatencyRecord) -> None:
        with self._lock:
            self._by_kind.setdefault(rec.kind, []).append(rec.elapsed_ms)

    def count(self, kind: str) -> int:
        with self._lock:
            return len(self._by_kind.get(kind, []))

    def report(self) -> dict:
        """Per-kind {count, mean, p50, p95, max}; kinds with no data omitted."""
        with self._lock:
            snapshot = {k: sorted(v) for k, v in self._by_kind.items() if v}
        out = {}
        for kind, values in sorted(snapshot.items()):
            out[kind] = {
                "count": len(values),
                "mean": sum(values) / len(values),
                "p50": _percentile(values, 0.50),
                "p95": _percentile(values, 0.95),
                "max": values[-1],
            }
        return out
