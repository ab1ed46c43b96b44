"""In-process MQTT 3.1.1 broker for loopback deployments and tests.

One thread per connected session. Clean sessions only: subscriptions
die with the connection, and QoS 1 delivery relies on the TCP stream
rather than retransmission timers. Retained messages, `+`/`#`
wildcards and per-session delivery order are honored; a session with
several filters matching one message receives it once.
"""
from __future__ import annotations

import socket
import threading

from . import wire
from .topics import InvalidFilterError, topic_matches, validate_filter


class _Session:
    def __init__(self, broker: "MqttBroker", sock: socket.socket, peer):
        self.broker = broker
        self.sock = sock
        self.peer = peer
        self.client_id = ""
        # filter -> granted qos
        self.subscriptions: dict[str, int] = {}
        self.send_lock = threading.Lock()
        self._next_packet_id = 0
        self.alive = True

    def packet_id(self) -> int:
        self._next_packet_id = self._next_packet_id % 0xFFFF + 1
        return self._next_packet_id

    def send(self, data: bytes) -> None:
        try:
            with self.send_lock:
                self.sock.sendall(data)
        except OSError:
            self.alive = False

    def deliver(self, topic: str, payload: bytes, qos: int, retain: bool) -> None:
        granted = max(
            (q for f, q in self.subscriptions.items() if topic_matches(f, topic)),
            default=None,
        )
        if granted is None:
            return
        effective = min(qos, granted)
        packet_id = self.packet_id() if effective else None
        self.send(wire.encode_publish(topic, payload, effective, retain, packet_id))

    def run(self) -> None:
        try:
            ptype, _, body = wire.read_packet(self.sock)
            if ptype != wire.CONNECT:
                return
            self.client_id = wire.parse_connect(body)
            self.send(wire.encode_connack())
            self.broker._attach(self)
            while self.alive:
                self._handle(*wire.read_packet(self.sock))
        except (ConnectionError, OSError, wire.ProtocolError):
            pass
        finally:
            self.broker._detach(self)
            try:
                self.sock.close()
            except OSError:
                pass

    def _handle(self, ptype: int, flags: int, body: bytes) -> None:
        if ptype == wire.PUBLISH:
            topic, payload, qos, retain, packet_id = wire.parse_publish(flags, body)
            if qos:
                self.send(wire.encode_puback(packet_id))
            self.broker._route(topic, payload, qos, retain)
        elif ptype == wire.PUBACK:
            pass  # no broker-side retransmission to cancel
        elif ptype == wire.SUBSCRIBE:
            packet_id, filters = wire.parse_subscribe(body)
            codes = []
            for topic_filter, qos in filters:
                try:
                    validate_filter(topic_filter)
                except InvalidFilterError:
                    codes.append(0x80)
                    continue
                granted = min(qos, 1)
                self.subscriptions[topic_filter] = granted
                codes.append(granted)
            self.send(wire.encode_suback(packet_id, codes))
            for topic_filter, code in zip((f for f, _ in filters), codes):
                if code != 0x80:
                    self.broker._send_retained(self, topic_filter)
        elif ptype == wire.UNSUBSCRIBE:
            packet_id, filters = wire.parse_unsubscribe(body)
            for topic_filter in filters:
                self.subscriptions.pop(topic_filter, None)
            self.send(wire.encode_unsuback(packet_id))
        elif ptype == wire.PINGREQ:
            self.send(wire.encode_pingresp())
        elif ptype == wire.DISCONNECT:
            self.alive = False
        else:
            raise wire.ProtocolError(f"unexpected packet type {ptype}")


class MqttBroker:
    """Thread-per-connection broker bound to a loopback TCP port."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.host = host
        self.port = port
        self._server: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._lock = threading.Lock()
        self._sessions: set[_Session] = set()
        self._retained: dict[str, tuple[bytes, int]] = {}
        self._running = False
        self.messages_routed = 0

    @property
    def address(self) -> tuple[str, int]:
        return self.host, self.port

    def start(self) -> "MqttBroker":
        server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((self.host, self.port))
        server.listen(64)
        self.port = server.getsockname()[1]
        self._server = server
        self._running = True
        self._accept_thread = threading.Thread(
            target=self._accept_loop, name="mqtt-broker-accept", daemon=True
        )
        self._accept_thread.start()
        return self

    def stop(self) -> None:
        self._running = False
        if self._server is not None:
            try:
                self._server.close()
            except OSError:
                pass
        with self._lock:
            sessions = list(self._sessions)
        for session in sessions:
            session.alive = False
            try:
                session.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                session.sock.close()
            except OSError:
                pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=2.0)

    def __enter__(self) -> "MqttBroker":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    def _accept_loop(self) -> None:
        assert self._server is not None
        while self._running:
            try:
                sock, peer = self._server.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            session = _Session(self, sock, peer)
            threading.Thread(
                target=session.run, name=f"mqtt-session-{peer[1]}", daemon=True
            ).start()

    def _attach(self, session: _Session) -> None:
        with self._lock:
            self._sessions.add(session)

    def _detach(self, session: _Session) -> None:
        with self._lock:
            self._sessions.discard(session)

    def _route(self, topic: str, payload: bytes, qos: int, retain: bool) -> None:
        with self._lock:
            if retain:
                if payload:
                    self._retained[topic] = (payload, qos)
                else:
                    self._retained.pop(topic, None)
            self.messages_routed += 1
            sessions = list(self._sessions)
        for session in sessions:
            # forwarded messages carry retain=0 per the 3.1.1 rules
            session.deliver(topic, payload, qos, retain=False)

    def _send_retained(self, session: _Session, topic_filter: str) -> None:
        with self._lock:
            matches = [
                (topic, payload, qos)
                for topic, (payload, qos) in self._retained.items()
                if topic_matches(topic_filter, topic)
            ]
        granted = session.subscriptions.get(topic_filter, 0)
        for topic, payload, qos in matches:
            effective = min(qos, granted)
            packet_id = session.packet_id() if effective else None
            session.send(
                wire.encode_publish(topic, payload, effective, True, packet_id)
            )

    def retained_topics(self) -> tuple[str, ...]:
        with self._lock:
            return tuple(sorted(self._retained))
