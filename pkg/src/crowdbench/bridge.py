"""Wire protocol for external robot policies.

Messages are newline-delimited JSON objects (UTF-8, one per line, numbers
at full round-trip precision). The exchange is strict lockstep: the server
never has more than one outstanding observation.

    client -> {"type": "hello", "protocol": 1, "name": "mypolicy"}
    server -> {"type": "config", "protocol": 1, "dt": ..., "max_speed": ...,
               "radius": ..., "preferred_speed": ..., "goal_tolerance": ...}
    server -> {"type": "episode_start", "episode_id": "e0"}
    server -> {"type": "obs", "episode_id": "e0", "step": 0, "dt": ...,
               "robot": {px, py, vx, vy, radius}, "humans": [...],
               "robot_goal": {"x": ..., "y": ...}, "time_remaining": ...}
    client -> {"type": "act", "episode_id": "e0", "step": 0, "vx": ..., "vy": ...}
    server -> {"type": "episode_end", "episode_id": "e0", "outcome": "success"}
    server -> {"type": "shutdown"}

Human goals are withheld from observations. A client may send
{"type": "abort", "reason": ...} instead of an action to abort the episode.
Transports: a child process over stdio (default) or a TCP socket the client
connects to. One session serves one episode at a time.
"""

from __future__ import annotations

import json
import queue
import shlex
import socket
import subprocess
import threading
from typing import Sequence

from .agents import AgentState
from .errors import PolicyAborted, ProtocolError
from .geometry import Vec2
from .policies import RobotPolicy

PROTOCOL_VERSION = 1
DEFAULT_ACTION_TIMEOUT = 10.0  # seconds of wall clock per awaited action
_EOF = object()


def encode_message(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":")) + "\n"


class StdioTransport:
    """Spawns the client command and exchanges lines over its stdio."""

    def __init__(self, command: str | Sequence[str]):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8", bufsize=1)
        self._queue: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._queue.put(line)
        self._queue.put(_EOF)

    def send(self, msg: dict) -> None:
        assert self._proc.stdin is not None
        try:
            self._proc.stdin.write(encode_message(msg))
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise PolicyAborted(f"client pipe closed: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        try:
            item = self._queue.get(timeout=timeout)
        except queue.Empty:
            raise PolicyAborted(f"timed out after {timeout} s waiting for client") from None
        if item is _EOF:
            raise PolicyAborted("client closed its output stream")
        return item

    def close(self) -> None:
        # Stop the child before touching its streams: the reader thread holds
        # the stdout buffer lock while blocked in read, so closing the stream
        # first would wait for the client instead of ending it.
        if self._proc.poll() is None:
            try:
                self._proc.wait(timeout=0.5)  # grace period after shutdown msg
            except subprocess.TimeoutExpired:
                self._proc.terminate()
                try:
                    self._proc.wait(timeout=2.0)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
                    self._proc.wait()
        self._reader.join(timeout=2.0)
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                if stream:
                    stream.close()
            except (OSError, ValueError):
                pass


class TcpTransport:
    """Listens on a port and serves the first client that connects."""

    def __init__(self, port: int, host: str = "127.0.0.1", accept_timeout: float = 30.0):
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(accept_timeout)
        self._conn: socket.socket | None = None
        self._buffer = b""

    @property
    def port(self) -> int:
        return self._listener.getsockname()[1]

    def _ensure_conn(self) -> socket.socket:
        if self._conn is None:
            try:
                conn, _addr = self._listener.accept()
            except socket.timeout:
                raise PolicyAborted("no client connected before accept timeout") from None
            self._conn = conn
        return self._conn

    def send(self, msg: dict) -> None:
        try:
            self._ensure_conn().sendall(encode_message(msg).encode("utf-8"))
        except OSError as exc:
            raise PolicyAborted(f"client socket closed: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        conn = self._ensure_conn()
        conn.settimeout(timeout)
        while b"\n" not in self._buffer:
            try:
                chunk = conn.recv(4096)
            except socket.timeout:
                raise PolicyAborted(f"timed out after {timeout} s waiting for client") from None
            except OSError as exc:
                raise PolicyAborted(f"client socket error: {exc}") from exc
            if not chunk:
                raise PolicyAborted("client closed the connection")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        for sock in (self._conn, self._listener):
            try:
                if sock:
                    sock.close()
            except OSError:
                pass
        self._conn = None


class PolicySession:
    """One handshaken protocol session with an external policy client."""

    def __init__(self, transport, server_config: dict,
                 action_timeout: float = DEFAULT_ACTION_TIMEOUT):
        self.transport = transport
        self.action_timeout = action_timeout
        self.client_name: str | None = None
        self.clip_count = 0
        self._handshake(server_config)

    def _recv(self) -> dict:
        line = self.transport.recv_line(self.action_timeout)
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed message from client: {line!r}") from exc
        if not isinstance(msg, dict) or "type" not in msg:
            raise ProtocolError(f"message without type from client: {line!r}")
        return msg

    def _handshake(self, server_config: dict) -> None:
        hello = self._recv()
        if hello.get("type") != "hello":
            raise ProtocolError(f"expected hello, got {hello.get('type')!r}")
        if hello.get("protocol") != PROTOCOL_VERSION:
            raise ProtocolError(
                f"unsupported protocol version {hello.get('protocol')!r}; "
                f"server speaks {PROTOCOL_VERSION}")
        self.client_name = hello.get("name")
        self.transport.send({"type": "config", "protocol": PROTOCOL_VERSION,
                             **server_config})

    def begin_episode(self, episode_id: str) -> None:
        self.transport.send({"type": "episode_start", "episode_id": episode_id})

    def request_action(self, episode_id: str, step: int, obs: dict) -> Vec2:
        self.transport.send({"type": "obs", "episode_id": episode_id,
                             "step": step, **obs})
        msg = self._recv()
        if msg.get("type") == "abort":
            raise PolicyAborted(f"client aborted: {msg.get('reason')!r}")
        if msg.get("type") != "act":
            raise ProtocolError(f"expected act, got {msg.get('type')!r}")
        if msg.get("episode_id") != episode_id or msg.get("step") != step:
            raise ProtocolError(
                f"action out of step: expected ({episode_id}, {step}), got "
                f"({msg.get('episode_id')}, {msg.get('step')})")
        try:
            vx = float(msg["vx"])
            vy = float(msg["vy"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed action payload: {msg!r}") from exc
        if not (Vec2(vx, vy).is_finite()):
            raise ProtocolError(f"non-finite action velocity: ({vx}, {vy})")
        return Vec2(vx, vy)

    def end_episode(self, episode_id: str, outcome: str) -> None:
        # Best effort: a dead client must not mask the episode outcome.
        try:
            self.transport.send({"type": "episode_end", "episode_id": episode_id,
                                 "outcome": outcome})
        except PolicyAborted:
            pass

    def close(self) -> None:
        try:
            self.transport.send({"type": "shutdown"})
        except PolicyAborted:
            pass
        self.transport.close()


class BridgePolicy(RobotPolicy):
    """Robot policy served by an external process over the wire protocol.

    The session is (re)spawned lazily, so an abort in one episode does not
    poison the next: the dead transport is dropped and a fresh client is
    started when the next episode begins.
    """

    name = "bridge"

    def __init__(self, *, command: str | Sequence[str] | None = None,
                 tcp_port: int | None = None, tcp_host: str = "127.0.0.1",
                 action_timeout: float = DEFAULT_ACTION_TIMEOUT):
        if (command is None) == (tcp_port is None):
            raise ValueError("exactly one of command / tcp_port is required")
        self._command = command
        self._tcp_port = tcp_port
        self._tcp_host = tcp_host
        self._timeout = action_timeout
        self._session: PolicySession | None = None
        self._episode_id: str | None = None
        self._episode_count = 0
        self._config = None
        self._tcp_transport: TcpTransport | None = None

    def _server_config(self, config) -> dict:
        return {
            "dt": config.dt,
            "max_speed": config.orca.max_speed,
            "radius": config.robot_radius,
            "preferred_speed": config.robot_pref_speed,
            "goal_tolerance": config.goal_tolerance,
        }

    def _ensure_session(self) -> PolicySession:
        if self._session is None:
            if self._command is not None:
                transport = StdioTransport(self._command)
            else:
                # Reuse the listener; a reconnecting client is accepted.
                if self._tcp_transport is None:
                    self._tcp_transport = TcpTransport(self._tcp_port, self._tcp_host)
                transport = self._tcp_transport
            self._session = PolicySession(transport, self._server_config(self._config),
                                          self._timeout)
        return self._session

    def _drop_session(self) -> None:
        if self._session is not None:
            try:
                self._session.transport.close()
            except Exception:
                pass
        self._session = None
        self._tcp_transport = None

    def begin_episode(self, spec, config) -> None:
        self._config = config
        self._episode_id = f"e{self._episode_count}"
        self._episode_count += 1
        try:
            self._ensure_session().begin_episode(self._episode_id)
        except PolicyAborted:
            self._drop_session()
            raise

    def act(self, robot: AgentState, humans, step: int,
            time_remaining: float, dt: float) -> Vec2:
        def agent_dict(a: AgentState) -> dict:
            return {"px": a.position.x, "py": a.position.y,
                    "vx": a.velocity.x, "vy": a.velocity.y, "radius": a.radius}

        obs = {
            "dt": dt,
            "robot": agent_dict(robot),
            "humans": [agent_dict(h) for h in humans],
            "robot_goal": {"x": robot.goal.x, "y": robot.goal.y},
            "time_remaining": time_remaining,
        }
        session = self._ensure_session()
        try:
            return session.request_action(self._episode_id, step, obs)
        except PolicyAborted:
            self._drop_session()
            raise

    def end_episode(self, outcome: str) -> None:
        if self._session is not None:
            self._session.end_episode(self._episode_id, outcome)

    def close(self) -> None:
        if self._session is not None:
            self._session.close()
            self._session = None
        self._tcp_transport = None
