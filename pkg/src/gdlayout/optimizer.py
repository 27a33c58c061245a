"""Gradient-descent layout optimization.

Assembles the weighted-sum objective, runs full or stochastic descent with
per-iteration learning-rate decay and piecewise-linear weight schedules,
and owns the alternating crossing scheme: separators are re-fitted against
the current layout (M step) on a refresh cadence, node positions descend
against frozen separators (E step) in between.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

import numpy as np

from . import criteria
from .criteria import (CriterionId, CrossingSeparators, Hyper, LossResult,
                       NpConfig, fit_separators)
from .errors import NumericalDivergence
from .geometry import detect_crossings, incident_triples
from .graph_model import Graph, shortest_paths

CONVERGENCE_TOL = 1e-7
CONVERGENCE_WINDOW = 50

# criteria whose loss is a plain sum of independent terms; everything else
# (IL is a root of a mean, AR is global) is evaluated in full each step
SAMPLEABLE = frozenset({
    CriterionId.ST, CriterionId.NP, CriterionId.CN, CriterionId.CAM,
    CriterionId.ANR, CriterionId.VR, CriterionId.GA,
})


def random_layout(n: int, seed: int) -> np.ndarray:
    """Uniform [0,1]^2 coordinates, deterministic per seed."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return np.random.default_rng(seed).random((n, 2))


def _as_cid(key) -> CriterionId:
    if isinstance(key, CriterionId):
        return key
    return CriterionId(str(key))


class WeightSchedule:
    """Per-criterion piecewise-linear weight over iterations.

    Breakpoints are [(iteration, weight), ...] with strictly increasing
    iterations and weights >= 0; evaluation clamps outside the breakpoint
    range. Criteria without breakpoints have weight 0 throughout.
    """

    def __init__(self, breakpoints: Mapping[object, Iterable[tuple[int, float]]]):
        self.breakpoints: dict[CriterionId, list[tuple[int, float]]] = {}
        for key, pts in breakpoints.items():
            cid = _as_cid(key)
            pts = [(int(i), float(w)) for i, w in pts]
            if not pts:
                raise ValueError(f"{cid.value}: empty breakpoint list")
            iters = [i for i, _ in pts]
            if any(b <= a for a, b in zip(iters, iters[1:])):
                raise ValueError(f"{cid.value}: breakpoint iterations must "
                                 f"be strictly increasing, got {iters}")
            if any(w < 0 for _, w in pts):
                raise ValueError(f"{cid.value}: weights must be >= 0")
            self.breakpoints[cid] = pts

    @classmethod
    def constant(cls, weights: Mapping[object, float]) -> "WeightSchedule":
        return cls({k: [(0, w)] for k, w in weights.items()})

    def weight(self, cid: CriterionId, iteration: int) -> float:
        pts = self.breakpoints.get(_as_cid(cid))
        if not pts:
            return 0.0
        if iteration <= pts[0][0]:
            return pts[0][1]
        if iteration >= pts[-1][0]:
            return pts[-1][1]
        for (i0, w0), (i1, w1) in zip(pts, pts[1:]):
            if i0 <= iteration <= i1:
                t = (iteration - i0) / (i1 - i0)
                return w0 + t * (w1 - w0)
        raise AssertionError("unreachable")

    def active(self, iteration: int) -> dict[CriterionId, float]:
        """Non-zero weights at this iteration, in criterion order."""
        out = {}
        for cid in CriterionId:
            w = self.weight(cid, iteration)
            if w > 0.0:
                out[cid] = w
        return out

    def to_dict(self) -> dict[str, list[list[float]]]:
        return {cid.value: [[i, w] for i, w in pts]
                for cid, pts in self.breakpoints.items()}


@dataclass(frozen=True)
class OptimizerConfig:
    lr: float = 0.05
    iters: int = 2000
    mode: str = "full"              # or "stochastic"
    batch: int = 32
    seed: int = 0
    lr_decay: float = 0.999
    snapshot_every: int = 50
    crossing_refresh: Optional[int] = None   # None: 1 if |E| <= 200 else 10
    separator_steps: int = 30
    np_k: Optional[int] = None
    hyper: Hyper = field(default_factory=Hyper)

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be > 0")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if self.mode not in ("full", "stochastic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if not 0 < self.lr_decay <= 1:
            raise ValueError("lr_decay must be in (0, 1]")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


@dataclass
class TraceEntry:
    iteration: int
    total: float
    values: dict[CriterionId, float]
    layout: np.ndarray


@dataclass
class RunTrace:
    entries: list[TraceEntry]
    converged_at: Optional[int]


@dataclass
class StepState:
    """Crossing bookkeeping + RNG carried across steps."""
    crossings: list
    separators: CrossingSeparators
    rng: np.random.Generator

    @classmethod
    def fresh(cls, seed: int = 0) -> "StepState":
        return cls([], CrossingSeparators(), np.random.default_rng(seed))


def prepare_crossing_state(g: Graph, X: np.ndarray, config: OptimizerConfig,
                           state: Optional[StepState] = None) -> StepState:
    """Detect crossings and (re-)fit separators against the current layout."""
    if state is None:
        state = StepState.fresh(config.seed)
    state.crossings = detect_crossings(g, X)
    state.separators = fit_separators(
        g, X, prev=state.separators, pairs=state.crossings,
        steps=config.separator_steps, lr=config.lr)
    return state


def _criterion_full(cid: CriterionId, g: Graph, D: np.ndarray, X: np.ndarray,
                    state: StepState, config: OptimizerConfig) -> LossResult:
    h = config.hyper
    if cid is CriterionId.ST:
        return criteria.loss_stress(g, D, X)
    if cid is CriterionId.IL:
        return criteria.loss_ideal_edge_length(g, X)
    if cid is CriterionId.NP:
        return criteria.loss_neighborhood(g, X, NpConfig(config.np_k))
    if cid is CriterionId.CN:
        return criteria.loss_crossings(g, X, state.separators, state.crossings)
    if cid is CriterionId.CAM:
        return criteria.loss_crossing_angle(g, X, state.crossings)
    if cid is CriterionId.AR:
        return criteria.loss_aspect_ratio(X, h)
    if cid is CriterionId.ANR:
        return criteria.loss_angular_resolution(g, X, h)
    if cid is CriterionId.VR:
        return criteria.loss_vertex_resolution(X, h)
    if cid is CriterionId.GA:
        return criteria.loss_gabriel(g, X)
    raise ValueError(f"unknown criterion {cid!r}")


def total_loss_and_grad(g: Graph, D: np.ndarray, X: np.ndarray,
                        weights: Mapping[object, float],
                        state: Optional[StepState] = None,
                        config: Optional[OptimizerConfig] = None,
                        ) -> tuple[LossResult, dict[CriterionId, float]]:
    """Weighted sum over criteria with non-zero weight (full gradients).

    Zero-weight criteria are never evaluated. If the crossing criteria are
    active and no state is supplied, crossings are detected and separators
    fitted on the spot.
    """
    config = config or OptimizerConfig()
    weights = {_as_cid(k): float(w) for k, w in weights.items()}
    if any(w < 0 for w in weights.values()):
        raise ValueError("criterion weights must be >= 0")
    active = {c: w for c, w in weights.items() if w > 0.0}
    needs_crossings = (CriterionId.CN in active or CriterionId.CAM in active)
    if needs_crossings and state is None:
        state = prepare_crossing_state(g, X, config)
    if state is None:
        state = StepState.fresh(config.seed)
    total = LossResult(0.0, np.zeros_like(X, dtype=float))
    values: dict[CriterionId, float] = {}
    for cid in CriterionId:
        if cid not in active:
            continue
        res = _criterion_full(cid, g, D, X, state, config)
        values[cid] = res.value
        total.value += active[cid] * res.value
        total.grad += active[cid] * res.grad
    return total, values


class OptimizationRun:
    """One optimization loop: owns the layout, schedules, crossing state.

    Both the CLI (run to completion) and the session service (step_once at
    a time, with optional pinned nodes) drive this class, so an untouched
    service session replays the CLI float-for-float.
    """

    def __init__(self, g: Graph, layout0: np.ndarray, schedule: WeightSchedule,
                 config: OptimizerConfig, dist: Optional[np.ndarray] = None):
        X0 = np.asarray(layout0, dtype=float)
        if X0.shape != (g.n, 2):
            raise ValueError(f"layout shape {X0.shape} does not match "
                             f"graph with {g.n} nodes")
        if not np.isfinite(X0).all():
            raise ValueError("initial layout has non-finite coordinates")
        self.g = g
        self.dist = shortest_paths(g) if dist is None else dist
        self.schedule = schedule
        self.config = config
        self.X = X0.copy()
        self.iteration = 0
        self.converged_at: Optional[int] = None
        self.finished = False
        self._entries: list[TraceEntry] = []
        self._still = 0
        # stillness only counts once every scheduled weight change is behind
        # us; stopping earlier would drop criteria that activate later
        self._settled_after = max(
            (pts[-1][0] for pts in schedule.breakpoints.values()), default=0)
        self._last_refresh: Optional[int] = None
        self.last_total: float = 0.0
        self.last_values: dict[CriterionId, float] = {}
        self.state = StepState.fresh(config.seed)
        self.refresh_every = config.crossing_refresh if config.crossing_refresh \
            else (1 if g.m <= 200 else 10)
        # static sampling pools, built lazily
        self._pairs_pool: Optional[np.ndarray] = None
        self._triples_pool: Optional[np.ndarray] = None
        self._ga_pool: Optional[np.ndarray] = None

    # -- sampling pools ----------------------------------------------------

    def _node_pairs(self) -> np.ndarray:
        if self._pairs_pool is None:
            iu = np.triu_indices(self.g.n, 1)
            self._pairs_pool = np.stack(iu, axis=1)
        return self._pairs_pool

    def _triples(self) -> np.ndarray:
        if self._triples_pool is None:
            self._triples_pool = incident_triples(self.g)
        return self._triples_pool

    def _ga_terms(self) -> np.ndarray:
        if self._ga_pool is None:
            self._ga_pool = criteria.gabriel_term_grid(self.g)
        return self._ga_pool

    # -- per-criterion losses ------------------------------------------------

    def criterion_loss(self, cid: CriterionId) -> LossResult:
        """Loss+gradient for one criterion at the current layout.

        Stochastic mode samples `batch` terms with replacement and rescales
        by (total terms / batch); criteria that do not decompose into a
        plain sum (IL, AR) always use the full computation.
        """
        cfg = self.config
        if cfg.mode != "stochastic" or cid not in SAMPLEABLE:
            return _criterion_full(cid, self.g, self.dist, self.X,
                                   self.state, cfg)
        X, g, h, b = self.X, self.g, cfg.hyper, cfg.batch
        rng = self.state.rng
        if cid is CriterionId.ST:
            pool = self._node_pairs()
            if len(pool) == 0:
                return LossResult(0.0, np.zeros_like(X))
            pick = pool[rng.integers(0, len(pool), b)]
            return criteria.loss_stress(g, self.dist, X, pick).scaled(len(pool) / b)
        if cid is CriterionId.VR:
            pool = self._node_pairs()
            if len(pool) == 0:
                return LossResult(0.0, np.zeros_like(X))
            pick = pool[rng.integers(0, len(pool), b)]
            return criteria.loss_vertex_resolution(X, h, None, pick).scaled(len(pool) / b)
        if cid is CriterionId.NP:
            rows = rng.integers(0, g.n, b)
            return criteria.loss_neighborhood(
                g, X, NpConfig(cfg.np_k), rows=rows).scaled(g.n / b)
        if cid is CriterionId.ANR:
            pool = self._triples()
            if len(pool) == 0:
                return LossResult(0.0, np.zeros_like(X))
            pick = pool[rng.integers(0, len(pool), b)]
            return criteria.loss_angular_resolution(g, X, h, pick).scaled(len(pool) / b)
        if cid is CriterionId.GA:
            pool = self._ga_terms()
            if len(pool) == 0:
                return LossResult(0.0, np.zeros_like(X))
            pick = pool[rng.integers(0, len(pool), b)]
            return criteria.loss_gabriel(g, X, pick).scaled(len(pool) / b)
        if cid in (CriterionId.CN, CriterionId.CAM):
            pairs = self.state.crossings
            if not pairs:
                return LossResult(0.0, np.zeros_like(X))
            pick = [pairs[i] for i in rng.integers(0, len(pairs), b)]
            if cid is CriterionId.CN:
                res = criteria.loss_crossings(g, X, self.state.separators, pick)
            else:
                res = criteria.loss_crossing_angle(g, X, pick)
            return res.scaled(len(pairs) / b)
        raise AssertionError(f"unhandled criterion {cid}")

    # -- stepping ------------------------------------------------------------

    def _refresh_crossings(self, weights: dict[CriterionId, float]):
        it = self.iteration
        needs = CriterionId.CN in weights or CriterionId.CAM in weights
        if not needs:
            return
        due = (self._last_refresh is None
               or it - self._last_refresh >= self.refresh_every)
        if due:
            self.state.crossings = detect_crossings(self.g, self.X)
            self._last_refresh = it
        if CriterionId.CN in weights:
            missing = any(self.state.separators.get(p) is None
                          for p in self.state.crossings)
            if due or missing:
                lr_t = self.config.lr * self.config.lr_decay ** it
                self.state.separators = fit_separators(
                    self.g, self.X, prev=self.state.separators,
                    pairs=self.state.crossings,
                    steps=self.config.separator_steps, lr=lr_t)

    def _record(self, total: float, values: dict[CriterionId, float]):
        self._entries.append(TraceEntry(self.iteration, total,
                                        dict(values), self.X.copy()))

    def build_trace(self) -> RunTrace:
        return RunTrace(list(self._entries), self.converged_at)

    def step_once(self, pins: Optional[Mapping[int, np.ndarray]] = None) -> float:
        """One gradient step; returns the max coordinate displacement.

        pins: node index -> position applied after the step (dragged or
        held nodes); pinned nodes do not count toward convergence.
        """
        if self.finished:
            return 0.0
        it = self.iteration
        weights = self.schedule.active(it)
        self._refresh_crossings(weights)
        grad = np.zeros_like(self.X)
        total = 0.0
        values: dict[CriterionId, float] = {}
        # divergence is detected by the finiteness check below, so numpy's
        # overflow chatter on the way there is redundant
        with np.errstate(over="ignore", invalid="ignore"):
            for cid, w in weights.items():
                res = self.criterion_loss(cid)
                values[cid] = res.value
                total += w * res.value
                grad += w * res.grad
        if not (np.isfinite(total) and np.isfinite(grad).all()):
            raise NumericalDivergence(
                f"non-finite loss or gradient at iteration {it}",
                it, self.build_trace())
        self.last_total = total
        self.last_values = dict(values)
        if it % self.config.snapshot_every == 0:
            self._record(total, values)
        lr_t = self.config.lr * self.config.lr_decay ** it
        X_new = self.X - lr_t * grad
        moved = X_new - self.X
        if pins:
            for node, pos in pins.items():
                X_new[node] = pos
                moved[node] = 0.0
        if not np.isfinite(X_new).all():
            raise NumericalDivergence(
                f"non-finite coordinates at iteration {it}",
                it, self.build_trace())
        delta = float(np.abs(moved).max()) if len(moved) else 0.0
        self.X = X_new
        self.iteration += 1
        if delta < CONVERGENCE_TOL and it >= self._settled_after:
            self._still += 1
        else:
            self._still = 0
        if self._still >= CONVERGENCE_WINDOW:
            self.finished = True
            self.converged_at = self.iteration
        if self.iteration >= self.config.iters:
            self.finished = True
        if self.finished:
            final_total, final_values = total_loss_and_grad(
                self.g, self.dist, self.X, weights, self.state, self.config)
            self._record(final_total.value, final_values)
        return delta


def step(g: Graph, D: np.ndarray, X: np.ndarray,
         weights: Mapping[object, float], config: OptimizerConfig,
         state: Optional[StepState] = None) -> np.ndarray:
    """Single functional gradient step X - lr * grad (no decay applied)."""
    weights = {_as_cid(k): float(w) for k, w in weights.items()}
    active = {c: w for c, w in weights.items() if w > 0.0}
    if ((CriterionId.CN in active or CriterionId.CAM in active)
            and state is None):
        state = prepare_crossing_state(g, X, config)
    run = OptimizationRun(g, X, WeightSchedule.constant(active),
                          replace(config, iters=1, lr_decay=1.0), dist=D)
    if state is not None:
        run.state = state
        run._last_refresh = 0
    run.step_once()
    return run.X


def run(g: Graph, layout0: np.ndarray, schedule: WeightSchedule,
        config: OptimizerConfig,
        dist: Optional[np.ndarray] = None) -> tuple[np.ndarray, RunTrace]:
    """Drive a full optimization to convergence or the iteration cap."""
    loop = OptimizationRun(g, layout0, schedule, config, dist=dist)
    while not loop.finished:
        loop.step_once()
    return loop.X.copy(), loop.build_trace()
