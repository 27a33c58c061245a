"""Serialization: graph/layout/schedule JSON, SVG export, quality reports.

JSON is the only graph format. Node order in a graph file defines the
index order used by every matrix in the engine. Floats go through
Python's repr (shortest round-trip encoding, up to 17 significant
digits), so write/read pairs are exact inverses.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .criteria import CriterionId, HIGHER_BETTER, default_ideal_lengths
from .errors import FormatError
from .graph_model import Graph
from .optimizer import RunTrace, WeightSchedule


def _loads(data) -> object:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON at line {e.lineno}, column "
                          f"{e.colno}: {e.msg}") from e


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=1, sort_keys=True) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def graph_from_obj(obj) -> Graph:
    if not isinstance(obj, dict):
        raise FormatError("graph file must be a JSON object")
    nodes = obj.get("nodes")
    edges = obj.get("edges")
    if not isinstance(nodes, list) or not nodes:
        raise FormatError("field 'nodes' must be a non-empty list of ids")
    if not isinstance(edges, list):
        raise FormatError("field 'edges' must be a list of id pairs")
    ids = [str(v) for v in nodes]
    index = {v: i for i, v in enumerate(ids)}
    if len(index) != len(ids):
        dupes = sorted({v for v in ids if ids.count(v) > 1})
        raise FormatError(f"duplicate node ids: {dupes}")
    pairs = []
    seen = set()
    for e in edges:
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"edge {e!r} must be a pair of node ids")
        a, b = str(e[0]), str(e[1])
        for v in (a, b):
            if v not in index:
                raise FormatError(f"edge {e!r} references unknown id {v!r}")
        if a == b:
            raise FormatError(f"edge {e!r} is a self-loop")
        key = (min(index[a], index[b]), max(index[a], index[b]))
        if key in seen:
            raise FormatError(f"duplicate edge {e!r}")
        seen.add(key)
        pairs.append(key)
    order = sorted(range(len(pairs)), key=lambda k: pairs[k])
    pairs_sorted = tuple(pairs[k] for k in order)

    lengths = None
    if "ideal_lengths" in obj:
        raw = obj["ideal_lengths"]
        if not isinstance(raw, list):
            raise FormatError("field 'ideal_lengths' must be a list of "
                              "[idA, idB, length] triples")
        by_edge = {}
        for row in raw:
            if not isinstance(row, list) or len(row) != 3:
                raise FormatError(f"ideal_lengths entry {row!r} must be "
                                  f"[idA, idB, length]")
            a, b, l = str(row[0]), str(row[1]), row[2]
            for v in (a, b):
                if v not in index:
                    raise FormatError(f"ideal_lengths entry {row!r} "
                                      f"references unknown id {v!r}")
            key = (min(index[a], index[b]), max(index[a], index[b]))
            if key not in seen:
                raise FormatError(f"ideal_lengths entry {row!r} is not an edge")
            if key in by_edge:
                raise FormatError(f"duplicate ideal_lengths entry {row!r}")
            if not isinstance(l, (int, float)) or not np.isfinite(l) or l <= 0:
                raise FormatError(f"ideal length for {row!r} must be a "
                                  f"positive finite number")
            by_edge[key] = float(l)
        missing = [e for e in pairs_sorted if e not in by_edge]
        if missing:
            raise FormatError(f"ideal_lengths must cover every edge; "
                              f"missing {missing[:3]}")
        lengths = np.array([by_edge[e] for e in pairs_sorted])

    try:
        return Graph(n=len(ids), edges=pairs_sorted, ideal_lengths=lengths)
    except Exception as e:
        raise FormatError(str(e)) from e


def graph_to_obj(g: Graph) -> dict:
    obj = {
        "nodes": [str(i) for i in range(g.n)],
        "edges": [[str(i), str(j)] for i, j in g.edges],
    }
    if g.ideal_lengths is not None:
        obj["ideal_lengths"] = [
            [str(i), str(j), float(l)]
            for (i, j), l in zip(g.edges, g.ideal_lengths)
        ]
    return obj


def read_graph(data) -> Graph:
    return graph_from_obj(_loads(data))


def write_graph(g: Graph) -> bytes:
    return _dumps(graph_to_obj(g))


# ---------------------------------------------------------------------------
# layouts
# ---------------------------------------------------------------------------

def layout_from_obj(obj, expected_n: Optional[int] = None
                    ) -> tuple[np.ndarray, dict]:
    if not isinstance(obj, dict):
        raise FormatError("layout file must be a JSON object")
    pos = obj.get("positions")
    if not isinstance(pos, list) or not pos:
        raise FormatError("field 'positions' must be a non-empty list "
                          "of [x, y]")
    rows = []
    for i, p in enumerate(pos):
        if not isinstance(p, list) or len(p) != 2 or \
                not all(isinstance(v, (int, float)) for v in p):
            raise FormatError(f"positions[{i}] must be [x, y]")
        rows.append((float(p[0]), float(p[1])))
    X = np.array(rows)
    if not np.isfinite(X).all():
        raise FormatError("positions contain non-finite coordinates")
    if expected_n is not None and len(X) != expected_n:
        raise FormatError(f"layout has {len(X)} positions but the graph "
                          f"has {expected_n} nodes")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise FormatError("field 'meta' must be an object")
    return X, meta


def layout_to_obj(X: np.ndarray, meta: Optional[dict] = None) -> dict:
    obj = {"positions": [[float(x), float(y)] for x, y in np.asarray(X)]}
    if meta:
        obj["meta"] = meta
    return obj


def read_layout(data, expected_n: Optional[int] = None
                ) -> tuple[np.ndarray, dict]:
    return layout_from_obj(_loads(data), expected_n)


def write_layout(X: np.ndarray, meta: Optional[dict] = None) -> bytes:
    return _dumps(layout_to_obj(X, meta))


# ---------------------------------------------------------------------------
# weight schedules
# ---------------------------------------------------------------------------

def schedule_from_obj(obj) -> WeightSchedule:
    if not isinstance(obj, dict):
        raise FormatError("schedule file must be a JSON object mapping "
                          "criterion to [[iteration, weight], ...]")
    known = {c.value for c in CriterionId}
    table = {}
    for key, pts in obj.items():
        if key not in known:
            raise FormatError(f"unknown criterion {key!r}; known: "
                              f"{', '.join(sorted(known))}")
        if not isinstance(pts, list) or not all(
                isinstance(p, list) and len(p) == 2 for p in pts):
            raise FormatError(f"{key}: breakpoints must be "
                              f"[[iteration, weight], ...]")
        table[key] = [(p[0], p[1]) for p in pts]
    try:
        return WeightSchedule(table)
    except ValueError as e:
        raise FormatError(str(e)) from e


def read_schedule(data) -> WeightSchedule:
    return schedule_from_obj(_loads(data))


def write_schedule(schedule: WeightSchedule) -> bytes:
    return _dumps(schedule.to_dict())


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def _lerp_color(t: float) -> str:
    """t in [-1, 1]: red (short) through the midpoint to blue (long)."""
    u = (np.clip(t, -1.0, 1.0) + 1.0) / 2.0
    r = round(255 * (1.0 - u))
    b = round(255 * u)
    return f"#{r:02x}00{b:02x}"


def export_svg(g: Graph, X: np.ndarray,
               edge_color_by_length: bool = False) -> bytes:
    """One <line> per edge, one <circle> per node, 5% margin viewBox."""
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    scale = float(max(span.max(), 1e-9))
    pad = 0.05 * scale
    vb = tuple(float(v) for v in
               (lo[0] - pad, lo[1] - pad, span[0] + 2 * pad, span[1] + 2 * pad))
    colors = None
    if edge_color_by_length and g.m:
        E = g.edge_array()
        lens = np.linalg.norm(X[E[:, 0]] - X[E[:, 1]], axis=1)
        ideal = default_ideal_lengths(g, X)
        colors = [(l - t) / t for l, t in zip(lens, ideal)]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb[0]!r} {vb[1]!r} {vb[2]!r} {vb[3]!r}" '
        f'width="800" height="800">'
    ]
    sw = 0.006 * scale
    pts = [(repr(float(x)), repr(float(y))) for x, y in X]
    for e, (i, j) in enumerate(g.edges):
        color = _lerp_color(colors[e]) if colors is not None else "#555555"
        parts.append(
            f'<line x1="{pts[i][0]}" y1="{pts[i][1]}" '
            f'x2="{pts[j][0]}" y2="{pts[j][1]}" '
            f'stroke="{color}" stroke-width="{sw!r}"/>')
    r = 0.012 * scale
    for i in range(g.n):
        parts.append(f'<circle cx="{pts[i][0]}" cy="{pts[i][1]}" '
                     f'r="{r!r}" fill="#222222"/>')
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


# ---------------------------------------------------------------------------
# quality reports
# ---------------------------------------------------------------------------

@dataclass
class QualityReport:
    """Nine quality values for one (graph, layout source) cell.

    baseline, when present, holds the values the improvement flags compare
    against (typically the initial random layout).
    """
    graph: str
    source: str
    values: dict[CriterionId, float]
    baseline: Optional[dict[CriterionId, float]] = None

    def improved(self, cid: CriterionId) -> Optional[bool]:
        if self.baseline is None or cid not in self.baseline:
            return None
        before = self.baseline[cid]
        after = self.values[cid]
        if cid in HIGHER_BETTER:
            return after > before
        return after < before


_COLUMNS = [c.value for c in CriterionId]


def write_report_csv(reports: list[QualityReport]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph", "source"] + _COLUMNS
               + [f"improved_{c}" for c in _COLUMNS])
    for rep in reports:
        row = [rep.graph, rep.source]
        row += [repr(float(rep.values[c])) for c in CriterionId]
        for c in CriterionId:
            flag = rep.improved(c)
            row.append("" if flag is None else str(flag).lower())
        w.writerow(row)
    return buf.getvalue().encode("utf-8")


def write_report_json(reports: list[QualityReport]) -> bytes:
    out = []
    for rep in reports:
        entry = {
            "graph": rep.graph,
            "source": rep.source,
            "values": {c.value: float(rep.values[c]) for c in CriterionId},
        }
        if rep.baseline is not None:
            entry["baseline"] = {c.value: float(rep.baseline[c])
                                 for c in CriterionId if c in rep.baseline}
            entry["improved"] = {c.value: rep.improved(c)
                                 for c in CriterionId
                                 if rep.improved(c) is not None}
        out.append(entry)
    return _dumps({"reports": out})


def trace_to_obj(trace: RunTrace) -> dict:
    return {
        "converged_at": trace.converged_at,
        "entries": [
            {
                "iteration": e.iteration,
                "total": e.total,
                "losses": {c.value: float(v) for c, v in e.values.items()},
                "layout": [[float(x), float(y)] for x, y in e.layout],
            }
            for e in trace.entries
        ],
    }


def write_trace(trace: RunTrace) -> bytes:
    return _dumps(trace_to_obj(trace))
