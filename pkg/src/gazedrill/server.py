"""Live telemetry service: WebSocket transport around the session loop.

The session loop runs in its own thread, paced to the wall clock, and never
touches the network: the connection handler feeds operator input into a
latest-value mailbox and the loop publishes decimated tick states through a
broadcast callback.  One client at a time; extra connections are turned away.
Disconnecting pauses a live session, reconnecting resumes it where it was.
"""

from __future__ import annotations

import logging
import threading
import time

import numpy as np

from . import telemetry as tm
from .config import SessionConfig
from .session import LiveOperatorSource, SessionEngine
from .trace import TraceRecord

logger = logging.getLogger(__name__)

try:  # websockets >= 12 sync API
    from websockets.sync.server import serve as ws_serve
except ImportError:  # pragma: no cover
    ws_serve = None


def _require_websockets():
    if ws_serve is None:  # pragma: no cover
        raise RuntimeError("the 'websockets' package is required for serving")


class LiveSessionRunner:
    """Wall-clock-paced engine with start/pause/reset control."""

    def __init__(self, config: SessionConfig, broadcast):
        self.config = config
        self.broadcast = broadcast
        self.seq = tm.SequenceCounter()
        self.decode_errors = 0
        self._lock = threading.Lock()
        self._running = False  # set by control messages
        self._resume_on_connect = False
        self._client_connected = False
        self._shutdown = False
        self._reset_requested = False
        self._mode_request = None
        self._build_engine()

    def _build_engine(self):
        self.operator = LiveOperatorSource(
            np.array(self.config.operator.eye_origin),
            stale_timeout=self.config.operator.stale_timeout,
        )
        self.engine = SessionEngine(self.config, operator_source=self.operator)
        self._emit_every = max(
            1, round(1.0 / (self.config.dt * self.config.telemetry.rate))
        )

    # -- control plane ---------------------------------------------------

    def handle_frame(self, frame: str) -> None:
        msg = tm.decode(frame)
        if msg is None:
            self.decode_errors += 1
            logger.warning("dropped malformed frame (%d so far)", self.decode_errors)
            return
        if isinstance(msg, tm.OperatorInput):
            self.operator.submit(msg.hand_force, msg.gaze_origin, msg.gaze_direction)
        elif isinstance(msg, tm.Control):
            with self._lock:
                if msg.action == "start":
                    self._running = True
                elif msg.action == "pause":
                    self._running = False
                elif msg.action == "reset":
                    self._reset_requested = True
                elif msg.action == "set_mode":
                    self._mode_request = msg.mode

    def client_connected(self) -> None:
        with self._lock:
            self._client_connected = True
            if self._resume_on_connect:
                self._running = True
                self._resume_on_connect = False
        self.broadcast(tm.encode(self.seq.stamp(self.session_info())))

    def client_disconnected(self) -> None:
        with self._lock:
            self._client_connected = False
            self._resume_on_connect = self._running
            self._running = False

    def stop(self) -> None:
        self._shutdown = True

    # -- messages ---------------------------------------------------------

    def session_info(self) -> tm.SessionInfo:
        interval = self.engine.operator.distraction_interval()
        return tm.SessionInfo(
            mode=self.config.mode.value,
            target_depth=self.engine.bone.target_depth,
            layer_boundaries=[
                [la.depth_start, la.depth_end] for la in self.engine.bone.layers
            ],
            corridor_radius=self.config.safety.corridor_radius,
            distraction_interval=list(interval) if interval else None,
            telemetry_rate=self.config.telemetry.rate,
        )

    def tick_state(self, record: TraceRecord, status: str) -> tm.TickState:
        gaze_point = (
            self.engine.prev_gaze_point.position
            if self.engine.prev_gaze_point is not None
            else (0.0, 0.0, 0.0)
        )
        return tm.TickState(
            t=record.t,
            w=record.w,
            abar=record.abar,
            depth=record.depth,
            haptic_x=record.haptic_x,
            robot_x=record.robot_x,
            tip_task=record.tip_task,
            f_sensor=record.f_sensor,
            f_fdbk=record.f_fdbk,
            f_operator=record.f_operator,
            gaze_object=record.gaze_object,
            gaze_point=tuple(gaze_point),
            phase=record.phase,
            status=status,
        )

    # -- loop --------------------------------------------------------------

    def run(self) -> None:
        """Paced loop; call from a dedicated thread."""
        dt = self.config.dt
        next_deadline = time.monotonic()
        last_idle_emit = 0.0
        while not self._shutdown:
            with self._lock:
                if self._reset_requested:
                    self._build_engine()
                    self._reset_requested = False
                    self._running = False
                    self.broadcast(tm.encode(self.seq.stamp(self.session_info())))
                if self._mode_request is not None:
                    # Mode changes apply on reset; remember the request.
                    try:
                        from .config import Mode

                        self.config.mode = Mode(self._mode_request)
                    except ValueError:
                        logger.warning("ignoring unknown mode %r", self._mode_request)
                    self._mode_request = None
                active = (
                    self._running and self._client_connected and not self.engine.done
                )
            if not active:
                # Idle in pause: keep the client informed at a slow rate.
                now = time.monotonic()
                if self.engine.records and now - last_idle_emit > 0.5:
                    status = "complete" if self.engine.completed else "paused"
                    self.broadcast(
                        tm.encode(
                            self.seq.stamp(
                                self.tick_state(self.engine.records[-1], status)
                            )
                        )
                    )
                    last_idle_emit = now
                time.sleep(0.02)
                next_deadline = time.monotonic()
                continue

            record = self.engine.step()
            if (self.engine.tick_index - 1) % self._emit_every == 0 or (
                self.engine.done
            ):
                status = "complete" if self.engine.completed else "running"
                self.broadcast(
                    tm.encode(self.seq.stamp(self.tick_state(record, status)))
                )
            next_deadline += dt
            delay = next_deadline - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                # Fell behind the wall clock; re-anchor rather than burst.
                next_deadline = time.monotonic()


class TelemetryServer:
    """Single-client WebSocket endpoint bridging the runner and the console."""

    def __init__(self, runner: LiveSessionRunner, host: str = "127.0.0.1",
                 port: int = 8765):
        _require_websockets()
        self.runner = runner
        self.host = host
        self.port = port
        self._client = None
        self._client_lock = threading.Lock()
        self._server = None
        runner.broadcast = self.broadcast

    def broadcast(self, frame: str) -> None:
        with self._client_lock:
            client = self._client
        if client is None:
            return
        try:
            client.send(frame)
        except Exception:
            pass  # handler thread notices the closed socket

    def _handler(self, connection) -> None:
        with self._client_lock:
            if self._client is not None:
                connection.close(1013, "another console is connected")
                return
            self._client = connection
        self.runner.client_connected()
        try:
            for frame in connection:
                if isinstance(frame, bytes):
                    frame = frame.decode("utf-8", errors="replace")
                self.runner.handle_frame(frame)
        except Exception:
            pass
        finally:
            with self._client_lock:
                if self._client is connection:
                    self._client = None
            self.runner.client_disconnected()

    def serve_forever(self) -> None:
        with ws_serve(self._handler, self.host, self.port) as server:
            self._server = server
            loop = threading.Thread(target=self.runner.run, daemon=True)
            loop.start()
            try:
                server.serve_forever()
            finally:
                self.runner.stop()
                loop.join(timeout=2.0)

    def shutdown(self) -> None:
        if self._server is not None:
            self._server.shutdown()


def replay_trace(records, meta, host: str, port: int, speed: float = 1.0,
                 rate: float = 60.0) -> None:
    """Re-emit a stored trace over telemetry, paced for a live console."""
    _require_websockets()
    if not records:
        raise ValueError("empty trace")
    seq = tm.SequenceCounter()
    done = threading.Event()

    bone_cfg = meta.get("config", {}).get("bone", {})
    info = tm.SessionInfo(
        mode=meta.get("config", {}).get("mode", "shared"),
        target_depth=bone_cfg.get("target_depth", 0.03),
        layer_boundaries=[
            [la["start"], la["end"]] for la in bone_cfg.get("layers", [])
        ],
        corridor_radius=meta.get("config", {})
        .get("safety", {})
        .get("corridor_radius", 0.0005),
        distraction_interval=meta.get("distraction_interval"),
        telemetry_rate=rate,
    )

    # Decimate to the telemetry rate up front.
    period = 1.0 / rate
    picked = []
    next_t = records[0].t
    for rec in records:
        if rec.t + 1e-12 >= next_t:
            picked.append(rec)
            next_t += period

    def handler(connection):
        connection.send(tm.encode(seq.stamp(info)))
        start = time.monotonic()
        t0 = picked[0].t
        try:
            for rec in picked:
                target = start + (rec.t - t0) / speed
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                status = "complete" if "complete" in rec.events else "running"
                msg = tm.TickState(
                    t=rec.t, w=rec.w, abar=rec.abar, depth=rec.depth,
                    haptic_x=rec.haptic_x, robot_x=rec.robot_x,
                    tip_task=rec.tip_task, f_sensor=rec.f_sensor,
                    f_fdbk=rec.f_fdbk, f_operator=rec.f_operator,
                    gaze_object=rec.gaze_object, phase=rec.phase, status=status,
                )
                connection.send(tm.encode(seq.stamp(msg)))
        except Exception:
            pass
        finally:
            done.set()

    with ws_serve(handler, host, port) as server:
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        done.wait()
        server.shutdown()
        thread.join(timeout=2.0)
