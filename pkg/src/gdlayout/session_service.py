"""HTTP service for interactive optimization sessions.

One optimizer loop thread per session. The control plane (weight changes,
drags, pause/resume) goes through a per-session command queue drained at
iteration boundaries, so every observable layout is a state that existed
between two whole iterations. Snapshots stream as NDJSON (one JSON object
per line): 'snapshot' events at the session cadence, 'heartbeat' while
nothing advances, one terminal 'end' event.

Sessions are created paused. A running session whose weight map is empty
idles (layout frozen, iteration not advancing) but stays running.
"""

from __future__ import annotations

import json
import math
import queue
import threading
import time
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from .criteria import CriterionId, quality_report
from .errors import GdLayoutError, NumericalDivergence
from .graph_model import Graph, generate, shortest_paths
from .io_formats import graph_from_obj, graph_to_obj, layout_from_obj
from .optimizer import (OptimizationRun, OptimizerConfig, WeightSchedule,
                        random_layout)

HEARTBEAT_PERIOD = 0.25
IDLE_SLEEP = 0.005
COMMAND_TIMEOUT = 10.0

_CONFIG_FIELDS = {"lr", "iters", "mode", "batch", "seed", "lr_decay",
                  "snapshot_every"}


def _parse_weights_obj(obj) -> dict[CriterionId, float]:
    if not isinstance(obj, dict):
        raise ValueError("weights must be an object mapping criterion to "
                         "a number >= 0")
    out = {}
    known = {c.value: c for c in CriterionId}
    for key, val in obj.items():
        if key not in known:
            raise ValueError(f"unknown criterion {key!r}")
        if not isinstance(val, (int, float)) or isinstance(val, bool) \
                or not math.isfinite(val):
            raise ValueError(f"weight for {key} must be a finite number")
        if val < 0:
            raise ValueError(f"weight for {key} must be >= 0")
        out[known[key]] = float(val)
    return out


class _Command:
    def __init__(self, kind: str, payload=None):
        self.kind = kind
        self.payload = payload
        self.done = threading.Event()
        self.result: dict = {}


class Session:
    """One interactive optimization run plus its control queue and events."""

    def __init__(self, g: Graph, X0: np.ndarray, config: OptimizerConfig,
                 weights: dict[CriterionId, float], cadence: int,
                 include_qualities: bool):
        self.id = uuid.uuid4().hex[:12]
        self.g = g
        self.weights = dict(weights)
        self.cadence = cadence
        self.include_qualities = include_qualities
        self.status = "paused"
        self.error: Optional[str] = None
        self.run = OptimizationRun(g, X0, WeightSchedule.constant(weights),
                                   config)
        self.commands: queue.Queue[_Command] = queue.Queue()
        self.events: list[dict] = []
        self.pins: dict[int, list] = {}   # node -> [position, holds left]
        self._push_snapshot()
        self.thread = threading.Thread(target=self._loop, daemon=True,
                                       name=f"session-{self.id}")
        self.thread.start()

    # -- events --------------------------------------------------------------

    def _push_snapshot(self):
        event = {
            "type": "snapshot",
            "iteration": self.run.iteration,
            "positions": [[float(x), float(y)] for x, y in self.run.X],
            "losses": {c.value: float(v)
                       for c, v in self.run.last_values.items()},
            "total": float(self.run.last_total),
            "qualities": None,
        }
        if self.include_qualities:
            vals = quality_report(self.g, self.run.dist, self.run.X,
                                  self.run.config.hyper)
            event["qualities"] = {c.value: float(v) for c, v in vals.items()}
        self.events.append(event)

    def _push_end(self):
        self.events.append({
            "type": "end",
            "status": self.status,
            "iteration": self.run.iteration,
            "error": self.error,
        })

    # -- control -------------------------------------------------------------

    def submit(self, kind: str, payload=None) -> dict:
        cmd = _Command(kind, payload)
        self.commands.put(cmd)
        if not cmd.done.wait(COMMAND_TIMEOUT):
            raise HTTPException(503, "session loop is not responding")
        return cmd.result

    def _drain(self):
        while True:
            try:
                cmd = self.commands.get_nowait()
            except queue.Empty:
                return
            if cmd.kind == "weights":
                self.weights = dict(cmd.payload)
                self.run.schedule = WeightSchedule.constant(self.weights)
                cmd.result = {"applies_at_iteration": self.run.iteration}
            elif cmd.kind == "drag":
                node, pos, hold = cmd.payload
                X = self.run.X.copy()
                X[node] = pos
                self.run.X = X
                if hold > 0:
                    self.pins[node] = [np.array(pos, dtype=float), hold]
                cmd.result = {"iteration": self.run.iteration}
            elif cmd.kind == "pause":
                if self.status == "running":
                    self.status = "paused"
                cmd.result = {"status": self.status}
            elif cmd.kind == "resume":
                if self.status == "paused":
                    self.status = "running"
                cmd.result = {"status": self.status}
            elif cmd.kind == "stop":
                self.status = "stopped"
                cmd.result = {"status": self.status}
            cmd.done.set()

    # -- loop ----------------------------------------------------------------

    def _loop(self):
        try:
            while True:
                self._drain()
                if self.status == "stopped":
                    return
                if self.status in ("finished", "failed", "paused"):
                    time.sleep(IDLE_SLEEP)
                    continue
                if self.run.finished:
                    self.status = "finished"
                    self._push_end()
                    continue
                if not self.run.schedule.active(self.run.iteration):
                    # all-zero weights: idle but stay running
                    time.sleep(IDLE_SLEEP)
                    continue
                pins = {node: pos for node, (pos, _) in self.pins.items()}
                self.run.step_once(pins or None)
                for node in list(self.pins):
                    self.pins[node][1] -= 1
                    if self.pins[node][1] <= 0:
                        del self.pins[node]
                if (self.run.iteration % self.cadence == 0
                        or self.run.finished):
                    self._push_snapshot()
                if self.run.finished:
                    self.status = "finished"
                    self._push_end()
        except NumericalDivergence as e:
            self.status = "failed"
            self.error = str(e)
            self._push_end()
        except Exception as e:   # keep the service alive; report via stream
            self.status = "failed"
            self.error = f"{type(e).__name__}: {e}"
            self._push_end()

    def describe(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "iteration": self.run.iteration,
            "n": self.g.n,
            "edges": len(self.g.edges),
            "graph": graph_to_obj(self.g),
            "positions": [[float(x), float(y)] for x, y in self.run.X],
            "weights": {c.value: w for c, w in self.weights.items()},
            "losses": {c.value: float(v)
                       for c, v in self.run.last_values.items()},
            "cadence": self.cadence,
            "converged_at": self.run.converged_at,
            "error": self.error,
        }


def _build_graph(body: dict) -> Graph:
    if "graph" in body:
        return graph_from_obj(body["graph"])
    if "family" in body:
        spec = body["family"]
        if not isinstance(spec, dict) or "family" not in spec:
            raise ValueError('family spec must be {"family": name, ...params}')
        params = {k: v for k, v in spec.items() if k != "family"}
        return generate(spec["family"], **params)
    raise ValueError("body must carry 'graph' (a graph object) or 'family'")


def _build_config(body: dict) -> OptimizerConfig:
    raw = body.get("config", {})
    if not isinstance(raw, dict):
        raise ValueError("'config' must be an object")
    unknown = set(raw) - _CONFIG_FIELDS
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return OptimizerConfig(**raw)


def create_app() -> FastAPI:
    app = FastAPI(title="gdlayout session service")
    # the browser frontend is served as static files from a different
    # origin than this control plane
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def _get(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid!r}")
        return s

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise HTTPException(400, "body must be a JSON object")
        try:
            g = _build_graph(body)
            shortest_paths(g)          # connectivity is a hard requirement
            config = _build_config(body)
            weights = _parse_weights_obj(body.get("weights", {}))
            cadence = body.get("cadence", 10)
            if not isinstance(cadence, int) or cadence < 1:
                raise ValueError("cadence must be a positive integer")
            if "layout" in body:
                X0, _ = layout_from_obj({"positions": body["layout"]},
                                        expected_n=g.n)
            else:
                X0 = random_layout(g.n, config.seed)
            include_q = bool(body.get("include_qualities", False))
            session = Session(g, X0, config, weights, cadence, include_q)
        except (GdLayoutError, ValueError, TypeError) as e:
            raise HTTPException(400, str(e))
        with registry_lock:
            sessions[session.id] = session
        return session.describe()

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _get(sid).describe()

    @app.patch("/sessions/{sid}/weights")
    def set_weights(sid: str, body: dict):
        s = _get(sid)
        try:
            weights = _parse_weights_obj(body)
        except ValueError as e:
            raise HTTPException(400, str(e))
        result = s.submit("weights", weights)
        return {"ok": True, **result}

    @app.post("/sessions/{sid}/drag")
    def drag_node(sid: str, body: dict):
        s = _get(sid)
        node = body.get("node")
        if not isinstance(node, int) or not 0 <= node < s.g.n:
            raise HTTPException(400, f"node index out of range: {node!r}")
        x, y = body.get("x"), body.get("y")
        for v in (x, y):
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(v):
                raise HTTPException(400, "position must be finite numbers")
        hold = body.get("hold", 0)
        if not isinstance(hold, int) or hold < 0:
            raise HTTPException(400, "hold must be a non-negative integer")
        result = s.submit("drag", (node, (float(x), float(y)), hold))
        return {"ok": True, **result}

    @app.post("/sessions/{sid}/pause")
    def pause(sid: str):
        return {"ok": True, **_get(sid).submit("pause")}

    @app.post("/sessions/{sid}/resume")
    def resume(sid: str):
        return {"ok": True, **_get(sid).submit("resume")}

    @app.delete("/sessions/{sid}")
    def delete(sid: str):
        s = _get(sid)
        s.submit("stop")
        s.thread.join(timeout=2.0)
        with registry_lock:
            sessions.pop(sid, None)
        return {"ok": True}

    @app.get("/sessions/{sid}/stream")
    def stream(sid: str):
        s = _get(sid)

        def gen():
            idx = 0
            last_emit = time.monotonic()
            while True:
                events = s.events
                sent = False
                while idx < len(events):
                    event = events[idx]
                    idx += 1
                    yield json.dumps(event) + "\n"
                    sent = True
                    if event["type"] == "end":
                        return
                now = time.monotonic()
                if sent:
                    last_emit = now
                elif now - last_emit >= HEARTBEAT_PERIOD:
                    beat = {"type": "heartbeat", "status": s.status,
                            "iteration": s.run.iteration}
                    yield json.dumps(beat) + "\n"
                    last_emit = now
                if sessions.get(sid) is not s:
                    return   # deleted while streaming
                time.sleep(0.02)

        return StreamingResponse(gen(), media_type="application/x-ndjson")

    return app
