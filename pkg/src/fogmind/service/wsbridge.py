"""WebSocket JSON bridge between the decision service and consoles.

Consoles connect, receive one ``snapshot`` frame, then a stream of
``event`` and ``ack`` frames as the service dispatches. Inbound frames
are ``{"type": "command", "kind": ..., "payload": {...}, "nonce": ...}``
and feed the same validation path as the MQTT command topics.
"""

from __future__ import annotations

import json
import logging
import threading

from websockets.exceptions import ConnectionClosed
from websockets.sync.server import serve

from .actions import canonical_json

logger = logging.getLogger("fogmind.wsbridge")


class WsBridge:
    """Thread-per-connection WS server bound to one DecisionService."""

    def __init__(self, service, host: str = "127.0.0.1", port: int = 0):
        self.service = service
        self.host = host
        self.port = port
        self._server = None
        self._thread = None
        # connection -> send lock; listener callbacks and the per-connection
        # reader thread both write to the socket
        self._conns: dict = {}
        self._conns_lock = threading.Lock()

    # -- lifecycle -------------------------------------------------------

    def start(self) -> "WsBridge":
        self._server = serve(self._handle, self.host, self.port)
        self.port = self._server.socket.getsockname()[1]
        self.service.add_listener(self._on_frame)
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="wsbridge", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.service.remove_listener(self._on_frame)
        with self._conns_lock:
            conns = list(self._conns)
            self._conns.clear()
        for ws in conns:
            try:
                ws.close()
            except Exception:  # noqa: BLE001 - sockets may already be gone
                pass
        if self._server is not None:
            self._server.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "WsBridge":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def url(self) -> str:
        return f"ws://{self.host}:{self.port}"

    def connections(self) -> int:
        with self._conns_lock:
            return len(self._conns)

    # -- service -> consoles ----------------------------------------------

    def _on_frame(self, frame: str, data: dict) -> None:
        text = canonical_json({"type": frame, "data": data})
        with self._conns_lock:
            conns = list(self._conns.items())
        for ws, lock in conns:
            try:
                with lock:
                    ws.send(text)
            except Exception:  # noqa: BLE001 - reader loop reaps dead conns
                pass

    # -- per-connection reader --------------------------------------------

    def _handle(self, ws) -> None:
        lock = threading.Lock()
        with self._conns_lock:
            self._conns[ws] = lock
        try:
            snap = self.service.snapshot_frame()
            with lock:
                ws.send(canonical_json({"type": "snapshot", "data": snap}))
            for raw in ws:
                self._on_message(ws, lock, raw)
        except ConnectionClosed:
            pass
        except Exception:  # noqa: BLE001
            logger.exception("console connection failed")
        finally:
            with self._conns_lock:
                self._conns.pop(ws, None)

    def _on_message(self, ws, lock, raw) -> None:
        try:
            frame = json.loads(raw)
            if not isinstance(frame, dict):
                raise ValueError("frame must be an object")
        except (ValueError, TypeError):
            with lock:
                ws.send(canonical_json(
                    {"type": "ack", "data": {"ok": False, "error": "bad frame"}}))
            return
        if frame.get("type") != "command":
            return
        kind = frame.get("kind")
        body = frame.get("payload")
        if not isinstance(kind, str) or not isinstance(body, dict):
            with lock:
                ws.send(canonical_json(
                    {"type": "ack", "data": {"ok": False, "error": "bad command frame",
                                             "nonce": frame.get("nonce")}}))
            return
        if frame.get("nonce") is not None and "nonce" not in body:
            body = dict(body, nonce=frame["nonce"])
        # the ack comes back to every console through the listener stream;
        # the sender correlates on nonce
        self.service.submit_command(
            kind, json.dumps(body).encode("utf-8"),
            now_ms=self.service.last_tick_ms)
