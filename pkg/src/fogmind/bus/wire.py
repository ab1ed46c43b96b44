"""MQTT 3.1.1 wire format helpers.

Covers the subset this package speaks: CONNECT/CONNACK, PUBLISH at
QoS 0 and 1, PUBACK, SUBSCRIBE/SUBACK, UNSUBSCRIBE/UNSUBACK,
PINGREQ/PINGRESP and DISCONNECT. Clean sessions only, no QoS 2.
"""
from __future__ import annotations

import socket
import struct

CONNECT = 1
CONNACK = 2
PUBLISH = 3
PUBACK = 4
SUBSCRIBE = 8
SUBACK = 9
UNSUBSCRIBE = 10
UNSUBACK = 11
PINGREQ = 12
PINGRESP = 13
DISCONNECT = 14

PROTOCOL_NAME = b"MQTT"
PROTOCOL_LEVEL = 4


class ProtocolError(Exception):
    """Malformed or unsupported MQTT traffic."""


def _encode_varint(n: int) -> bytes:
    # remaining-length field: 7 bits per byte, MSB = continuation
    if n < 0 or n > 268_435_455:
        raise ProtocolError(f"remaining length {n} out of range")
    out = bytearray()
    while True:
        n, digit = divmod(n, 128)
        out.append(digit | (0x80 if n else 0))
        if not n:
            return bytes(out)


def _encode_string(s: str) -> bytes:
    data = s.encode("utf-8")
    if len(data) > 0xFFFF:
        raise ProtocolError("string too long for a u16 length prefix")
    return struct.pack(">H", len(data)) + data


def _frame(ptype: int, flags: int, body: bytes) -> bytes:
    return bytes([(ptype << 4) | flags]) + _encode_varint(len(body)) + body


class _Cursor:
    """Sequential reader over a packet body."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ProtocolError("packet body truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def string(self) -> str:
        return self.take(self.u16()).decode("utf-8")

    def rest(self) -> bytes:
        chunk = self.data[self.pos :]
        self.pos = len(self.data)
        return chunk

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.data)


def encode_connect(client_id: str, keepalive: int = 0) -> bytes:
    body = (
        _encode_string("MQTT")
        + bytes([PROTOCOL_LEVEL])
        + bytes([0x02])  # clean session, no will, no auth
        + struct.pack(">H", keepalive)
        + _encode_string(client_id)
    )
    return _frame(CONNECT, 0, body)


def parse_connect(body: bytes) -> str:
    cur = _Cursor(body)
    name = cur.take(cur.u16())
    if name != PROTOCOL_NAME:
        raise ProtocolError(f"unexpected protocol name {name!r}")
    level = cur.take(1)[0]
    if level != PROTOCOL_LEVEL:
        raise ProtocolError(f"unsupported protocol level {level}")
    flags = cur.take(1)[0]
    if flags & 0x04:
        raise ProtocolError("will messages are not supported")
    cur.u16()  # keepalive, broker side does not enforce it
    return cur.string()


def encode_connack(session_present: bool = False, code: int = 0) -> bytes:
    return _frame(CONNACK, 0, bytes([1 if session_present else 0, code]))


def parse_connack(body: bytes) -> int:
    if len(body) != 2:
        raise ProtocolError("CONNACK body must be 2 bytes")
    return body[1]


def encode_publish(
    topic: str,
    payload: bytes,
    qos: int = 0,
    retain: bool = False,
    packet_id: int | None = None,
    dup: bool = False,
) -> bytes:
    if qos not in (0, 1):
        raise ProtocolError(f"unsupported QoS {qos}")
    if qos == 1 and packet_id is None:
        raise ProtocolError("QoS 1 publish needs a packet id")
    flags = (0x08 if dup else 0) | (qos << 1) | (0x01 if retain else 0)
    body = _encode_string(topic)
    if qos:
        body += struct.pack(">H", packet_id)
    return _frame(PUBLISH, flags, body + payload)


def parse_publish(flags: int, body: bytes):
    """Return (topic, payload, qos, retain, packet_id)."""
    qos = (flags >> 1) & 0x03
    if qos not in (0, 1):
        raise ProtocolError(f"unsupported QoS {qos}")
    retain = bool(flags & 0x01)
    cur = _Cursor(body)
    topic = cur.string()
    packet_id = cur.u16() if qos else None
    return topic, cur.rest(), qos, retain, packet_id


def encode_puback(packet_id: int) -> bytes:
    return _frame(PUBACK, 0, struct.pack(">H", packet_id))


def parse_packet_id(body: bytes) -> int:
    if len(body) < 2:
        raise ProtocolError("missing packet id")
    return struct.unpack(">H", body[:2])[0]


def encode_subscribe(packet_id: int, filters) -> bytes:
    body = struct.pack(">H", packet_id)
    for topic_filter, qos in filters:
        body += _encode_string(topic_filter) + bytes([qos])
    return _frame(SUBSCRIBE, 0x02, body)


def parse_subscribe(body: bytes):
    cur = _Cursor(body)
    packet_id = cur.u16()
    filters = []
    while not cur.exhausted:
        topic_filter = cur.string()
        filters.append((topic_filter, cur.take(1)[0]))
    if not filters:
        raise ProtocolError("SUBSCRIBE carries no filters")
    return packet_id, filters


def encode_suback(packet_id: int, codes) -> bytes:
    return _frame(SUBACK, 0, struct.pack(">H", packet_id) + bytes(codes))


def parse_suback(body: bytes):
    cur = _Cursor(body)
    return cur.u16(), list(cur.rest())


def encode_unsubscribe(packet_id: int, filters) -> bytes:
    body = struct.pack(">H", packet_id)
    for topic_filter in filters:
        body += _encode_string(topic_filter)
    return _frame(UNSUBSCRIBE, 0x02, body)


def parse_unsubscribe(body: bytes):
    cur = _Cursor(body)
    packet_id = cur.u16()
    filters = []
    while not cur.exhausted:
        filters.append(cur.string())
    return packet_id, filters


def encode_unsuback(packet_id: int) -> bytes:
    return _frame(UNSUBACK, 0, struct.pack(">H", packet_id))


def encode_pingreq() -> bytes:
    return _frame(PINGREQ, 0, b"")


def encode_pingresp() -> bytes:
    return _frame(PINGRESP, 0, b"")


def encode_disconnect() -> bytes:
    return _frame(DISCONNECT, 0, b"")


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed mid-packet")
        buf.extend(chunk)
    return bytes(buf)


def read_packet(sock: socket.socket):
    """Block until one packet arrives; return (type, flags, body).

    Raises ConnectionError on clean EOF before a packet starts and on
    truncation inside one.
    """
    first = sock.recv(1)
    if not first:
        raise ConnectionError("connection closed")
    ptype, flags = first[0] >> 4, first[0] & 0x0F
    length = 0
    for shift in range(0, 28, 7):
        digit = _recv_exact(sock, 1)[0]
        length |= (digit & 0x7F) << shift
        if not digit & 0x80:
            break
    else:
        raise ProtocolError("remaining length runs past 4 bytes")
    body = _recv_exact(sock, length) if length else b""
    return ptype, flags, body
