"""Lockstep protocol client: handshake, observation/action loop, teardown.

The client holds zero metric logic; it answers each observation with one
action and leaves all scoring to the server, so a buggy policy cannot
corrupt the benchmark's numbers. Messages are newline-delimited JSON. The
loop is single-threaded and strictly lockstep: one action per observation,
echoing the observation's (episode_id, step).
"""

from __future__ import annotations

import json
import math
import os
import select
import socket
import sys
from dataclasses import dataclass
from typing import Callable, Protocol, TextIO

PROTOCOL_VERSION = 1
DEFAULT_READ_TIMEOUT = 60.0

EXIT_OK = 0
EXIT_SERVER_LOST = 3
EXIT_PROTOCOL = 4
EXIT_POLICY = 5


@dataclass(frozen=True)
class AgentView:
    px: float
    py: float
    vx: float
    vy: float
    radius: float


@dataclass(frozen=True)
class Observation:
    episode_id: str
    step: int
    dt: float
    robot: AgentView
    humans: tuple[AgentView, ...]
    goal_x: float
    goal_y: float
    time_remaining: float


@dataclass(frozen=True)
class NegotiatedConfig:
    dt: float
    max_speed: float
    radius: float
    preferred_speed: float
    goal_tolerance: float


PolicyFn = Callable[[Observation, NegotiatedConfig], tuple[float, float]]


class Transport(Protocol):
    def readline(self, timeout: float) -> str | None: ...
    def write(self, line: str) -> None: ...
    def close(self) -> None: ...


class StdioLines:
    """Line transport over this process's stdin/stdout with a read timeout.

    Reads go through os.read on the raw descriptor with our own line buffer:
    select on the fd is only coherent when nothing else buffers it (several
    messages can arrive in one pipe chunk, and lines parked in a TextIO
    buffer are invisible to select). Non-selectable streams (in-memory files
    in tests) fall back to plain blocking readline.
    """

    def __init__(self, infile: TextIO | None = None, outfile: TextIO | None = None):
        self._in = infile if infile is not None else sys.stdin
        self._out = outfile if outfile is not None else sys.stdout
        self._buf = b""
        try:
            self._fd: int | None = self._in.fileno()
        except (OSError, AttributeError, ValueError):
            self._fd = None

    def readline(self, timeout: float) -> str | None:
        if self._fd is None:
            line = self._in.readline()
            return line if line else None
        while b"\n" not in self._buf:
            ready, _, _ = select.select([self._fd], [], [], timeout)
            if not ready:
                return None
            chunk = os.read(self._fd, 65536)
            if not chunk:
                return None  # EOF: server is gone
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8") + "\n"

    def write(self, line: str) -> None:
        self._out.write(line)
        self._out.flush()

    def close(self) -> None:
        pass


class TcpLines:
    """Line transport over a TCP connection to the benchmark server."""

    def __init__(self, host: str, port: int, connect_timeout: float = 10.0):
        self._sock = socket.create_connection((host, port), timeout=connect_timeout)
        self._buffer = b""

    def readline(self, timeout: float) -> str | None:
        self._sock.settimeout(timeout)
        while b"\n" not in self._buffer:
            try:
                chunk = self._sock.recv(4096)
            except socket.timeout:
                return None
            if not chunk:
                return None
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8") + "\n"

    def write(self, line: str) -> None:
        self._sock.sendall(line.encode("utf-8"))

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


def _parse_observation(msg: dict) -> Observation:
    def view(d: dict) -> AgentView:
        return AgentView(d["px"], d["py"], d["vx"], d["vy"], d["radius"])

    return Observation(
        episode_id=msg["episode_id"],
        step=msg["step"],
        dt=msg["dt"],
        robot=view(msg["robot"]),
        humans=tuple(view(h) for h in msg["humans"]),
        goal_x=msg["robot_goal"]["x"],
        goal_y=msg["robot_goal"]["y"],
        time_remaining=msg["time_remaining"],
    )


def clip_to_speed(vx: float, vy: float, limit: float) -> tuple[float, float, bool]:
    norm = math.hypot(vx, vy)
    if norm <= limit or norm == 0.0:
        return vx, vy, False
    scale = limit / norm
    return vx * scale, vy * scale, True


@dataclass
class ClientSession:
    transport: Transport
    config: NegotiatedConfig
    episode_id: str | None = None
    clip_count: int = 0
    episodes_seen: int = 0
    actions_sent: int = 0


def _send(transport: Transport, msg: dict) -> None:
    transport.write(json.dumps(msg, separators=(",", ":")) + "\n")


def handshake(transport: Transport, name: str, timeout: float) -> ClientSession:
    _send(transport, {"type": "hello", "protocol": PROTOCOL_VERSION, "name": name})
    line = transport.readline(timeout)
    if line is None:
        raise ConnectionError("no config from server within the read timeout")
    msg = json.loads(line)
    if msg.get("type") != "config" or msg.get("protocol") != PROTOCOL_VERSION:
        raise ValueError(f"bad handshake reply: {line.strip()!r}")
    config = NegotiatedConfig(
        dt=msg["dt"], max_speed=msg["max_speed"], radius=msg["radius"],
        preferred_speed=msg["preferred_speed"],
        goal_tolerance=msg["goal_tolerance"])
    return ClientSession(transport=transport, config=config)


def run_client(policy: PolicyFn, transport: Transport | None = None, *,
               name: str = "crowdbench-client",
               read_timeout: float = DEFAULT_READ_TIMEOUT,
               crash_after: int | None = None,
               log: TextIO | None = None) -> int:
    """Serve a policy until the server's shutdown message.

    Returns EXIT_OK on a clean shutdown. Exits nonzero when the server
    disappears (EOF / read timeout), violates the protocol, or the policy
    raises; a policy failure additionally sends an abort message so the
    server can close out the episode.

    crash_after N makes the process exit abruptly before answering its
    (N+1)-th observation: fault injection for harness failure-path tests.
    """
    err = log if log is not None else sys.stderr
    transport = transport if transport is not None else StdioLines()
    try:
        session = handshake(transport, name, read_timeout)
    except (ConnectionError, ValueError, json.JSONDecodeError) as exc:
        print(f"handshake failed: {exc}", file=err)
        transport.close()
        return EXIT_SERVER_LOST

    try:
        while True:
            line = transport.readline(read_timeout)
            if line is None:
                print("server closed or went silent; exiting", file=err)
                return EXIT_SERVER_LOST
            try:
                msg = json.loads(line)
            except json.JSONDecodeError:
                print(f"unparseable server message: {line.strip()!r}", file=err)
                return EXIT_PROTOCOL

            kind = msg.get("type")
            if kind == "shutdown":
                if session.clip_count:
                    print(f"clipped {session.clip_count} command(s) to max speed",
                          file=err)
                return EXIT_OK
            if kind == "episode_start":
                session.episode_id = msg.get("episode_id")
                session.episodes_seen += 1
                continue
            if kind == "episode_end":
                session.episode_id = None
                continue
            if kind != "obs":
                print(f"unexpected server message type {kind!r}", file=err)
                return EXIT_PROTOCOL

            if crash_after is not None and session.actions_sent >= crash_after:
                os._exit(17)

            obs = _parse_observation(msg)
            try:
                vx, vy = policy(obs, session.config)
            except Exception as exc:  # policy bug: abort, never fake an action
                _send(transport, {"type": "abort",
                                  "reason": f"policy raised: {exc!r}"})
                print(f"policy raised: {exc!r}", file=err)
                return EXIT_POLICY
            vx, vy, clipped = clip_to_speed(vx, vy, session.config.max_speed)
            if clipped:
                session.clip_count += 1
            _send(transport, {"type": "act", "episode_id": obs.episode_id,
                              "step": obs.step, "vx": vx, "vy": vy})
            session.actions_sent += 1
    finally:
        transport.close()
