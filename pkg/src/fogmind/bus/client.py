"""Threaded MQTT client with queue-while-offline publishing.

A reader thread parses broker traffic and hands inbound publishes to a
dispatcher thread through a bounded queue, so callbacks can never stall
the socket. When the queue is full, QoS 0 traffic (the high-rate
position stream) sheds its oldest entry and counts the drop; QoS 1
traffic applies backpressure instead.

Publishing while disconnected enqueues the message when
``queue_offline`` is on; ``connect()`` first restores subscriptions,
then flushes the backlog in order.
"""
from __future__ import annotations

import queue
import socket
import threading
import uuid
from collections import deque
from dataclasses import dataclass

from . import wire
from .codec import MalformedPayloadError, decode_reading
from .topics import qos_for, retained_for, topic_matches, validate_filter

HANDOFF_CAPACITY = 256
OFFLINE_CAPACITY = 10_000
_ACK_TIMEOUT_S = 10.0


@dataclass
class _Pending:
    event: threading.Event
    payload: object = None


class MqttClient:
    """Single-broker MQTT 3.1.1 client (clean session, QoS 0/1)."""

    def __init__(
        self,
        host: str,
        port: int,
        client_id: str | None = None,
        queue_offline: bool = True,
    ):
        self.host = host
        self.port = port
        self.client_id = client_id or f"fogmind-{uuid.uuid4().hex[:8]}"
        self.queue_offline = queue_offline
        self._sock: socket.socket | None = None
        self._send_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._connected = threading.Event()
        self._next_packet_id = 0
        self._pending: dict[int, _Pending] = {}
        # filter -> (callback, requested qos)
        self._subs: dict[str, tuple] = {}
        self._offline: deque = deque()
        self._handoff: queue.Queue = queue.Queue(maxsize=HANDOFF_CAPACITY)
        self._dispatcher: threading.Thread | None = None
        self._reader: threading.Thread | None = None
        self._closing = False
        self.offline_dropped = 0
        self.handoff_dropped = 0
        self.malformed = 0

    # -- lifecycle ---------------------------------------------------

    @property
    def connected(self) -> bool:
        return self._connected.is_set()

    def connect(self, timeout: float = 5.0) -> None:
        if self.connected:
            return
        sock = socket.create_connection((self.host, self.port), timeout=timeout)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        sock.sendall(wire.encode_connect(self.client_id))
        ptype, _, body = wire.read_packet(sock)
        if ptype != wire.CONNACK:
            sock.close()
            raise ConnectionError(f"expected CONNACK, got packet type {ptype}")
        code = wire.parse_connack(body)
        if code != 0:
            sock.close()
            raise ConnectionError(f"broker refused connection, code {code}")
        sock.settimeout(None)
        self._sock = sock
        self._closing = False
        self._connected.set()
        if self._dispatcher is None or not self._dispatcher.is_alive():
            self._dispatcher = threading.Thread(
                target=self._dispatch_loop, name="mqtt-dispatch", daemon=True
            )
            self._dispatcher.start()
        self._reader = threading.Thread(
            target=self._read_loop, name="mqtt-read", daemon=True
        )
        self._reader.start()
        for topic_filter, (_, qos) in list(self._subs.items()):
            self._send_subscribe(topic_filter, qos)
        self._flush_offline()

    def disconnect(self) -> None:
        """Graceful shutdown of the current session."""
        self._closing = True
        if self.connected and self._sock is not None:
            try:
                with self._send_lock:
                    self._sock.sendall(wire.encode_disconnect())
            except OSError:
                pass
        self._teardown_socket()

    def close(self) -> None:
        self.disconnect()
        self._handoff.put(None)
        if self._dispatcher is not None:
            self._dispatcher.join(timeout=2.0)
            self._dispatcher = None

    def __enter__(self) -> "MqttClient":
        self.connect()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _teardown_socket(self) -> None:
        self._connected.clear()
        sock, self._sock = self._sock, None
        if sock is not None:
            try:
                sock.close()
            except OSError:
                pass
        with self._state_lock:
            pending, self._pending = self._pending, {}
        for waiter in pending.values():
            waiter.event.set()

    # -- publishing --------------------------------------------------

    def publish(
        self,
        topic: str,
        payload: bytes,
        qos: int | None = None,
        retain: bool | None = None,
        timeout: float = _ACK_TIMEOUT_S,
    ) -> bool:
        """Send one message; return True when sent (and acked for QoS 1).

        Disconnected with queue_offline on: the message is buffered in
        FIFO order and the call returns False.
        """
        if qos is None:
            qos = qos_for(topic)
        if retain is None:
            retain = retained_for(topic)
        if not self.connected:
            return self._buffer_offline(topic, payload, qos, retain)
        try:
            if qos == 0:
                self._send(wire.encode_publish(topic, payload, 0, retain))
                return True
            packet_id = self._claim_packet_id()
            waiter = _Pending(threading.Event())
            with self._state_lock:
                self._pending[packet_id] = waiter
            self._send(wire.encode_publish(topic, payload, 1, retain, packet_id))
            if not waiter.event.wait(timeout):
                with self._state_lock:
                    self._pending.pop(packet_id, None)
                raise TimeoutError(f"no PUBACK for {topic} within {timeout}s")
            if not self.connected:
                raise ConnectionError("connection lost before PUBACK")
            return True
        except (ConnectionError, OSError):
            self._teardown_socket()
            return self._buffer_offline(topic, payload, qos, retain)

    def _buffer_offline(self, topic, payload, qos, retain) -> bool:
        if not self.queue_offline:
            raise ConnectionError("not connected and offline queueing is off")
        if len(self._offline) >= OFFLINE_CAPACITY:
            self._offline.popleft()
            self.offline_dropped += 1
        self._offline.append((topic, payload, qos, retain))
        return False

    def _flush_offline(self) -> None:
        while self._offline and self.connected:
            topic, payload, qos, retain = self._offline.popleft()
            try:
                if qos == 0:
                    self._send(wire.encode_publish(topic, payload, 0, retain))
                else:
                    packet_id = self._claim_packet_id()
                    waiter = _Pending(threading.Event())
                    with self._state_lock:
                        self._pending[packet_id] = waiter
                    self._send(
                        wire.encode_publish(topic, payload, 1, retain, packet_id)
                    )
                    waiter.event.wait(_ACK_TIMEOUT_S)
            except (ConnectionError, OSError):
                self._offline.appendleft((topic, payload, qos, retain))
                self._teardown_socket()
                return

    # -- subscriptions -----------------------------------------------

    def subscribe(self, topic_filter: str, callback, qos: int = 1) -> None:
        """Register callback(topic, payload_bytes) for matching messages."""
        validate_filter(topic_filter)
        self._subs[topic_filter] = (callback, qos)
        if self.connected:
            self._send_subscribe(topic_filter, qos)

    def subscribe_readings(self, topic_filter: str, callback, qos: int = 1) -> None:
        """Like subscribe, but decodes payloads into Readings.

        Malformed payloads are dropped and counted, never raised into
        the dispatcher.
        """

        def _decode_and_forward(topic: str, payload: bytes) -> None:
            try:
                callback(decode_reading(topic, payload))
            except MalformedPayloadError:
                self.malformed += 1

        self.subscribe(topic_filter, _decode_and_forward, qos)

    def unsubscribe(self, topic_filter: str) -> None:
        self._subs.pop(topic_filter, None)
        if not self.connected:
            return
        packet_id = self._claim_packet_id()
        waiter = _Pending(threading.Event())
        with self._state_lock:
            self._pending[packet_id] = waiter
        self._send(wire.encode_unsubscribe(packet_id, [topic_filter]))
        waiter.event.wait(_ACK_TIMEOUT_S)

    def _send_subscribe(self, topic_filter: str, qos: int) -> None:
        packet_id = self._claim_packet_id()
        waiter = _Pending(threading.Event())
        with self._state_lock:
            self._pending[packet_id] = waiter
        self._send(wire.encode_subscribe(packet_id, [(topic_filter, qos)]))
        if not waiter.event.wait(_ACK_TIMEOUT_S):
            raise TimeoutError(f"no SUBACK for {topic_filter}")

    # -- plumbing ----------------------------------------------------

    def _claim_packet_id(self) -> int:
        with self._state_lock:
            self._next_packet_id = self._next_packet_id % 0xFFFF + 1
            return self._next_packet_id

    def _send(self, data: bytes) -> None:
        sock = self._sock
        if sock is None:
            raise ConnectionError("not connected")
        with self._send_lock:
            sock.sendall(data)

    def _read_loop(self) -> None:
        sock = self._sock
        try:
            while sock is not None and self._sock is sock:
                ptype, flags, body = wire.read_packet(sock)
                if ptype == wire.PUBLISH:
                    self._on_publish(flags, body)
                elif ptype in (wire.PUBACK, wire.SUBACK, wire.UNSUBACK):
                    packet_id = wire.parse_packet_id(body)
                    with self._state_lock:
                        waiter = self._pending.pop(packet_id, None)
                    if waiter is not None:
                        waiter.event.set()
                elif ptype == wire.PINGRESP:
                    pass
                else:
                    raise wire.ProtocolError(f"unexpected packet type {ptype}")
        except (ConnectionError, OSError, wire.ProtocolError):
            if self._sock is sock and not self._closing:
                self._teardown_socket()

    def _on_publish(self, flags: int, body: bytes) -> None:
        topic, payload, qos, _, packet_id = wire.parse_publish(flags, body)
        if qos == 1 and packet_id is not None:
            try:
                self._send(wire.encode_puback(packet_id))
            except (ConnectionError, OSError):
                pass
        item = (topic, payload)
        if qos == 0:
            # position-rate traffic must never block the reader
            while True:
                try:
                    self._handoff.put_nowait(item)
                    return
                except queue.Full:
                    try:
                        self._handoff.get_nowait()
                        self.handoff_dropped += 1
                    except queue.Empty:
                        pass
        else:
            self._handoff.put(item)

    def _dispatch_loop(self) -> None:
        while True:
            item = self._handoff.get()
            if item is None:
                return
            topic, payload = item
            for topic_filter, (callback, _) in list(self._subs.items()):
                if topic_matches(topic_filter, topic):
                    try:
                        callback(topic, payload)
                    except Exception:  # noqa: BLE001 - one bad callback must not kill the stream
                        pass
