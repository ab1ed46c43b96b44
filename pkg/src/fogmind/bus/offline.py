"""Store-and-forward journal for subscribers that go offline.

Each registered subscriber owns an append-only journal of
length-prefixed records (little-endian u32 length, then the payload
bytes) plus a checkpoint file holding the offset of the first
undelivered byte. Draining reads from the checkpoint to the end of the
journal and advances the checkpoint atomically, so a service restart
neither loses nor duplicates pending notifications. A truncated tail
record (torn write during a crash) is cut off during recovery.

Capacity is a cap on undelivered records per subscriber; overflow
drops the oldest pending record and counts it.
"""
from __future__ import annotations

import os
import re
import struct
import threading
from collections import deque
from pathlib import Path

DEFAULT_CAPACITY = 4096
_MAX_RECORD = 16 * 1024 * 1024
_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class _Subscriber:
    def __init__(self, journal: Path, checkpoint: Path, capacity: int):
        self.journal = journal
        self.checkpoint = checkpoint
        self.capacity = capacity
        self.offset = 0  # first undelivered byte
        self.pending: deque = deque()  # (record_offset, record_total_len)
        self.drops = 0
        self._recover()
        self.fh = open(self.journal, "ab")

    def _recover(self) -> None:
        if self.checkpoint.exists():
            try:
                self.offset = int(self.checkpoint.read_text().strip() or 0)
            except ValueError:
                self.offset = 0
        self.journal.touch(exist_ok=True)
        size = self.journal.stat().st_size
        if self.offset > size or self.offset < 0:
            self.offset = size
        with open(self.journal, "rb") as fh:
            fh.seek(self.offset)
            pos = self.offset
            while True:
                header = fh.read(4)
                if len(header) < 4:
                    break
                (length,) = struct.unpack("<I", header)
                if length > _MAX_RECORD:
                    break
                payload = fh.read(length)
                if len(payload) < length:
                    break
                self.pending.append((pos, 4 + length))
                pos += 4 + length
        if pos < size:
            # torn tail record: cut the journal back to the last whole one
            with open(self.journal, "r+b") as fh:
                fh.truncate(pos)

    def write_checkpoint(self) -> None:
        tmp = self.checkpoint.with_suffix(".checkpoint.tmp")
        tmp.write_text(f"{self.offset}\n")
        os.replace(tmp, self.checkpoint)

    def close(self) -> None:
        self.fh.close()


class OfflineStore:
    """Directory-backed store-and-forward queues, one per subscriber."""

    def __init__(self, root, capacity: int = DEFAULT_CAPACITY):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.capacity = capacity
        self._lock = threading.RLock()
        self._subs: dict[str, _Subscriber] = {}
        for journal in sorted(self.root.glob("*.journal")):
            self.register(journal.stem)

    def register(self, subscriber: str) -> None:
        if not _NAME_RE.match(subscriber):
            raise ValueError(f"invalid subscriber name {subscriber!r}")
        with self._lock:
            if subscriber in self._subs:
                return
            self._subs[subscriber] = _Subscriber(
                self.root / f"{subscriber}.journal",
                self.root / f"{subscriber}.checkpoint",
                self.capacity,
            )

    def subscribers(self) -> tuple:
        with self._lock:
            return tuple(sorted(self._subs))

    def _sub(self, subscriber: str) -> _Subscriber:
        try:
            return self._subs[subscriber]
        except KeyError:
            raise KeyError(
                f"subscriber {subscriber!r} is not registered for store-and-forward"
            ) from None

    def enqueue(self, subscriber: str, payload: bytes) -> None:
        with self._lock:
            sub = self._sub(subscriber)
            offset = sub.fh.tell()
            sub.fh.write(struct.pack("<I", len(payload)) + payload)
            sub.fh.flush()
            sub.pending.append((offset, 4 + len(payload)))
            dropped = False
            while len(sub.pending) > sub.capacity:
                start, total = sub.pending.popleft()
                sub.offset = start + total
                sub.drops += 1
                dropped = True
            if dropped:
                # dropped records must stay dropped across a restart
                sub.write_checkpoint()

    def drain(self, subscriber: str) -> list:
        """Deliver all pending payloads in FIFO order and mark them done."""
        with self._lock:
            sub = self._sub(subscriber)
            if not sub.pending:
                return []
            sub.fh.flush()
            out = []
            end = 0
            with open(sub.journal, "rb") as fh:
                for start, total in sub.pending:
                    fh.seek(start + 4)
                    out.append(fh.read(total - 4))
                    end = start + total
            sub.pending.clear()
            sub.offset = end
            sub.write_checkpoint()
            return out

    def pending(self, subscriber: str) -> int:
        with self._lock:
            return len(self._sub(subscriber).pending)

    def drops(self, subscriber: str) -> int:
        with self._lock:
            return self._sub(subscriber).drops

    def close(self) -> None:
        with self._lock:
            for sub in self._subs.values():
                sub.close()
            self._subs.clear()
