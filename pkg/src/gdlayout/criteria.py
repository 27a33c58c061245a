"""Readability criteria: losses with analytic gradients, and quality measures.

Each loss returns LossResult(value, grad) where grad is d value / d X with
all step-frozen quantities held constant: ideal edge lengths (IL), kNN
cutoff midpoints (NP), crossing sets (CN/CAM), separators (CN), max pair
distance (VR). Those quantities are explicit parameters so the optimizer
controls exactly when they refresh, and gradient checks can differentiate
the same frozen function the analytic code does.

At non-smooth points (hinge kinks, ReLU boundaries, angles of 0 or pi,
coincident points inside guarded unit vectors) the zero branch is taken:
the term contributes no gradient there.

Criterion ids: ST stress, IL ideal edge lengths, NP neighborhood
preservation, CN crossing number, CAM crossing angle maximization,
AR aspect ratio, ANR angular resolution, VR vertex resolution, GA gabriel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (CoincidentNodes, DegenerateLayout, GraphError,
                     MissingSeparator, ZeroLengthEdge)
from .geometry import (CrossingPair, detect_crossings, incident_triples,
                       pairwise_distances, rotate, bounding_box)
from .graph_model import Graph
from .lovasz import lovasz_hinge

EPS = 1e-12
COINCIDENT_TOL = 1e-9


class CriterionId(str, enum.Enum):
    ST = "ST"
    IL = "IL"
    NP = "NP"
    CN = "CN"
    CAM = "CAM"
    AR = "AR"
    ANR = "ANR"
    VR = "VR"
    GA = "GA"


# qualities where larger is better; the rest improve downward
HIGHER_BETTER = frozenset({
    CriterionId.NP, CriterionId.AR, CriterionId.ANR,
    CriterionId.VR, CriterionId.GA,
})


@dataclass
class LossResult:
    value: float
    grad: np.ndarray  # (n, 2)

    def scaled(self, factor: float) -> "LossResult":
        return LossResult(self.value * factor, self.grad * factor)


@dataclass(frozen=True)
class Hyper:
    """Shape parameters shared by loss and quality evaluation."""
    angle_sensitivity: float = 1.0        # ANR exponent scale
    target_resolution: Optional[float] = None  # VR target; None = 1/sqrt(n)
    rotation_samples: int = 7             # AR rotation count
    ar_sharpness: float = 30.0            # AR softmax temperature per unit scale


@dataclass(frozen=True)
class NpConfig:
    """Neighborhood size override; None means per-node degree."""
    k: Optional[int] = None


def _zeros_like_layout(X: np.ndarray) -> np.ndarray:
    return np.zeros_like(X, dtype=float)


# ---------------------------------------------------------------------------
# ST: stress
# ---------------------------------------------------------------------------

def loss_stress(g: Graph, dist: np.ndarray, X: np.ndarray,
                pairs: Optional[np.ndarray] = None) -> LossResult:
    """Sum over node pairs of (||Xi-Xj|| - d_ij)^2 / d_ij^2.

    pairs: optional (b, 2) sample of node pairs; the result is then the
    plain sum over the sampled terms (callers rescale).
    """
    n = g.n
    grad = _zeros_like_layout(X)
    if pairs is None:
        if n < 2:
            return LossResult(0.0, grad)
        diff = X[:, None, :] - X[None, :, :]
        D = np.sqrt((diff * diff).sum(axis=2))
        iu = np.triu_indices(n, 1)
        if D[iu].min() < COINCIDENT_TOL:
            a, b = np.unravel_index(
                np.argmin(D + np.eye(n) * 1e18), D.shape)
            raise CoincidentNodes(f"nodes {a} and {b} are coincident")
        d_safe = dist + np.eye(n)
        inv_d2 = 1.0 / (d_safe * d_safe)
        np.fill_diagonal(inv_d2, 0.0)
        dev = D - dist
        value = float((inv_d2[iu] * dev[iu] ** 2).sum())
        D_safe = D + np.eye(n)
        coeff = 2.0 * inv_d2 * dev / D_safe
        grad = (coeff[:, :, None] * diff).sum(axis=1)
        return LossResult(value, grad)

    I, J = pairs[:, 0], pairs[:, 1]
    diff = X[I] - X[J]
    dd = np.sqrt((diff * diff).sum(axis=1))
    if len(dd) and dd.min() < COINCIDENT_TOL:
        raise CoincidentNodes("sampled a coincident node pair")
    d = dist[I, J]
    dev = dd - d
    value = float((dev * dev / (d * d)).sum())
    c = 2.0 * dev / (d * d * dd)
    np.add.at(grad, I, c[:, None] * diff)
    np.add.at(grad, J, -c[:, None] * diff)
    return LossResult(value, grad)


def quality_stress(g: Graph, dist: np.ndarray, X: np.ndarray) -> float:
    # value only, so no coincidence guard: the sum is finite for any layout
    iu = np.triu_indices(g.n, 1)
    d = dist[iu]
    D = np.sqrt(((X[iu[0]] - X[iu[1]]) ** 2).sum(axis=1))
    return float((((D - d) / d) ** 2).sum())


# ---------------------------------------------------------------------------
# IL: ideal edge lengths
# ---------------------------------------------------------------------------

def default_ideal_lengths(g: Graph, X: np.ndarray) -> np.ndarray:
    """Per-edge targets: graph-supplied if present, else current mean length.

    The mean is a snapshot of X: within an optimization step it is a frozen
    constant and no gradient flows through it.
    """
    if g.ideal_lengths is not None:
        return g.ideal_lengths.copy()
    E = g.edge_array()
    if len(E) == 0:
        return np.zeros(0)
    lens = np.linalg.norm(X[E[:, 0]] - X[E[:, 1]], axis=1)
    return np.full(len(E), float(lens.mean()))


def loss_ideal_edge_length(g: Graph, X: np.ndarray,
                           ideal: Optional[np.ndarray] = None) -> LossResult:
    """Root mean square relative deviation of edge lengths from their targets."""
    grad = _zeros_like_layout(X)
    E = g.edge_array()
    m = len(E)
    if m == 0:
        return LossResult(0.0, grad)
    if ideal is None:
        ideal = default_ideal_lengths(g, X)
    diff = X[E[:, 0]] - X[E[:, 1]]
    lens = np.sqrt((diff * diff).sum(axis=1))
    if lens.min() < EPS:
        e = E[int(np.argmin(lens))]
        raise ZeroLengthEdge(f"edge {tuple(e)} has zero length")
    if ideal.min() < EPS:
        raise ZeroLengthEdge("ideal edge length of zero")
    dev = (lens - ideal) / ideal
    value = float(np.sqrt((dev * dev).mean()))
    if value < 1e-15:
        return LossResult(value, grad)
    c = dev / (ideal * m * value)
    unit = diff / lens[:, None]
    np.add.at(grad, E[:, 0], c[:, None] * unit)
    np.add.at(grad, E[:, 1], -c[:, None] * unit)
    return LossResult(value, grad)


def quality_ideal_edge_length(g: Graph, X: np.ndarray) -> float:
    # measurement never raises: zero-length edges read as full deviation
    E = g.edge_array()
    if len(E) == 0:
        return 0.0
    ideal = np.maximum(default_ideal_lengths(g, X), EPS)
    lens = np.linalg.norm(X[E[:, 0]] - X[E[:, 1]], axis=1)
    dev = (lens - ideal) / ideal
    return float(np.sqrt((dev * dev).mean()))


# ---------------------------------------------------------------------------
# NP: neighborhood preservation
# ---------------------------------------------------------------------------

def neighborhood_sizes(g: Graph, cfg: Optional[NpConfig] = None) -> np.ndarray:
    """Per-node kNN size: the degree clamped to [1, n-2], or a global override."""
    n = g.n
    if n < 3:
        raise GraphError("neighborhood preservation needs at least 3 nodes")
    if cfg is not None and cfg.k is not None:
        if not 1 <= cfg.k <= n - 2:
            raise GraphError(f"neighborhood size k={cfg.k} out of range "
                             f"[1, {n - 2}]")
        return np.full(n, cfg.k, dtype=int)
    return np.clip(g.degrees, 1, n - 2)


def knn_cutoff_midpoints(g: Graph, X: np.ndarray,
                         cfg: Optional[NpConfig] = None) -> np.ndarray:
    """Midpoint between the k-th and (k+1)-th nearest-neighbor distance, per node."""
    ks = neighborhood_sizes(g, cfg)
    D = pairwise_distances(X)
    np.fill_diagonal(D, np.inf)
    D_sorted = np.sort(D, axis=1)
    idx = np.arange(g.n)
    return 0.5 * (D_sorted[idx, ks - 1] + D_sorted[idx, ks])


def loss_neighborhood(g: Graph, X: np.ndarray,
                      cfg: Optional[NpConfig] = None,
                      midpoints: Optional[np.ndarray] = None,
                      rows: Optional[np.ndarray] = None) -> LossResult:
    """Lovasz hinge of the Jaccard loss on soft kNN membership scores.

    Score of entry (i, j) is midpoint_i - ||Xi-Xj||: positive inside node
    i's predicted neighborhood. Midpoints are frozen (no gradient through
    the cutoff); gradients flow only through the pair distances.

    rows: optional sample of row indices; each sampled row contributes an
    independent per-row hinge (callers rescale by n / len(rows)).
    """
    n = g.n
    if midpoints is None:
        midpoints = knn_cutoff_midpoints(g, X, cfg)
    else:
        neighborhood_sizes(g, cfg)  # still validate k against this graph
    D = pairwise_distances(X)
    scores = midpoints[:, None] - D
    np.fill_diagonal(scores, 0.0)
    A = g.adjacency.astype(float)
    G = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    if rows is None:
        value, gflat = lovasz_hinge(scores[off], A[off])
        G[off] = gflat
    else:
        value = 0.0
        for i in rows:
            mask = off[i]
            v, gr = lovasz_hinge(scores[i, mask], A[i, mask])
            value += v
            G[i, mask] += gr
    # d score_ij / d D_ij = -1; each unordered pair distance feeds entries
    # (i, j) and (j, i)
    C = -(G + G.T)
    D_safe = np.maximum(D, EPS)
    np.fill_diagonal(D_safe, 1.0)
    U = (X[:, None, :] - X[None, :, :]) / D_safe[:, :, None]
    grad = (C[:, :, None] * U).sum(axis=1)
    return LossResult(float(value), grad)


def quality_neighborhood(g: Graph, X: np.ndarray,
                         cfg: Optional[NpConfig] = None) -> float:
    """Jaccard index between the binary kNN membership matrix and adjacency.

    Distance ties break toward the lower node index.
    """
    ks = neighborhood_sizes(g, cfg)
    n = g.n
    D = pairwise_distances(X)
    np.fill_diagonal(D, np.inf)
    K = np.zeros((n, n), dtype=bool)
    for i in range(n):
        order = np.argsort(D[i], kind="stable")
        K[i, order[:ks[i]]] = True
    inter = int((K & g.adjacency).sum())
    union = int((K | g.adjacency).sum())
    return inter / union


# ---------------------------------------------------------------------------
# CN: crossing number
# ---------------------------------------------------------------------------

@dataclass
class Separator:
    """Linear boundary x.w + b = 0 assigned to one crossing pair."""
    w: np.ndarray
    b: float


class CrossingSeparators:
    """Separator state per crossing pair, keyed by the pair's canonical key."""

    def __init__(self, entries: Optional[dict] = None):
        self.entries: dict[tuple, Separator] = dict(entries) if entries else {}

    def get(self, pair: CrossingPair) -> Optional[Separator]:
        return self.entries.get(pair.key())

    def __len__(self) -> int:
        return len(self.entries)


_SIDE = np.array([1.0, 1.0, -1.0, -1.0])  # first edge positive, second negative


def _init_separator(X: np.ndarray, pair: CrossingPair) -> Separator:
    m1 = 0.5 * (X[pair.e1[0]] + X[pair.e1[1]])
    m2 = 0.5 * (X[pair.e2[0]] + X[pair.e2[1]])
    d = m1 - m2
    nd = np.linalg.norm(d)
    if nd < EPS:
        # midpoints coincide (symmetric X crossing): fall back to the
        # perpendicular of the first edge
        e = X[pair.e1[1]] - X[pair.e1[0]]
        ne = np.linalg.norm(e)
        w = (np.array([-e[1], e[0]]) / ne) if ne > EPS else np.array([1.0, 0.0])
    else:
        w = d / nd
    mid = 0.5 * (m1 + m2)
    return Separator(w, float(-mid @ w))


def fit_separators(g: Graph, X: np.ndarray,
                   prev: Optional[CrossingSeparators] = None,
                   pairs: Optional[list[CrossingPair]] = None,
                   steps: int = 30, lr: float = 0.05) -> CrossingSeparators:
    """Refresh separators for the current crossing set.

    Warm-starts from prev where the pair persists, initializes new pairs
    from the edge-midpoint geometry, drops pairs that no longer cross, and
    advances every separator `steps` gradient iterations on the hinge
    objective (the X coordinates are constants here).
    """
    if pairs is None:
        pairs = detect_crossings(g, X)
    if not pairs:
        return CrossingSeparators()
    nodes = np.array([p.nodes for p in pairs])          # (P, 4)
    Xn = X[nodes]                                       # (P, 4, 2)
    W = np.empty((len(pairs), 2))
    B = np.empty(len(pairs))
    for p, pair in enumerate(pairs):
        sep = prev.get(pair) if prev is not None else None
        if sep is None:
            sep = _init_separator(X, pair)
        W[p] = sep.w
        B[p] = sep.b
    for _ in range(steps):
        margins = _SIDE[None, :] * (np.einsum("pnc,pc->pn", Xn, W) + B[:, None])
        act = margins < 1.0
        gW = 2.0 * W - np.einsum("pn,pnc->pc", act * _SIDE[None, :], Xn)
        gB = -(act * _SIDE[None, :]).sum(axis=1)
        W -= lr * gW
        B -= lr * gB
    return CrossingSeparators({
        pair.key(): Separator(W[p].copy(), float(B[p]))
        for p, pair in enumerate(pairs)
    })


def loss_crossings(g: Graph, X: np.ndarray, separators: CrossingSeparators,
                   pairs: Optional[list[CrossingPair]] = None) -> LossResult:
    """Hinge pushing each crossing pair's endpoints to opposite separator sides.

    Per pair: sum over its 4 endpoints of relu(1 - side * (x.w + b)) plus
    ||w||^2. Gradient w.r.t. X only; separators are frozen constants here.
    """
    if pairs is None:
        pairs = detect_crossings(g, X)
    grad = _zeros_like_layout(X)
    if not pairs:
        return LossResult(0.0, grad)
    nodes = np.array([p.nodes for p in pairs])
    W = np.empty((len(pairs), 2))
    B = np.empty(len(pairs))
    for p, pair in enumerate(pairs):
        sep = separators.get(pair)
        if sep is None:
            raise MissingSeparator(f"no separator fitted for pair "
                                   f"{pair.e1} x {pair.e2}")
        W[p] = sep.w
        B[p] = sep.b
    Xn = X[nodes]
    margins = _SIDE[None, :] * (np.einsum("pnc,pc->pn", Xn, W) + B[:, None])
    slack = np.maximum(1.0 - margins, 0.0)
    value = float(slack.sum() + (W * W).sum())
    act = (margins < 1.0).astype(float) * _SIDE[None, :]       # (P, 4)
    contrib = -act[:, :, None] * W[:, None, :]                  # (P, 4, 2)
    np.add.at(grad, nodes.ravel(), contrib.reshape(-1, 2))
    return LossResult(value, grad)


def quality_crossing_number(g: Graph, X: np.ndarray) -> float:
    return float(len(detect_crossings(g, X)))


# ---------------------------------------------------------------------------
# CAM: crossing angle maximization
# ---------------------------------------------------------------------------

def loss_crossing_angle(g: Graph, X: np.ndarray,
                        pairs: Optional[list[CrossingPair]] = None) -> LossResult:
    """Squared cosine between crossing edge pairs; the set of pairs is frozen."""
    if pairs is None:
        pairs = detect_crossings(g, X)
    grad = _zeros_like_layout(X)
    value = 0.0
    for pair in pairs:
        (i, j), (k, l) = pair.e1, pair.e2
        u = X[i] - X[j]
        v = X[k] - X[l]
        nu = np.linalg.norm(u)
        nv = np.linalg.norm(v)
        if nu < EPS or nv < EPS:
            raise ZeroLengthEdge("zero-length edge in a crossing pair")
        c = float(u @ v) / (nu * nv)
        value += c * c
        gu = 2.0 * c * (v / (nu * nv) - c * u / (nu * nu))
        gv = 2.0 * c * (u / (nu * nv) - c * v / (nv * nv))
        grad[i] += gu
        grad[j] -= gu
        grad[k] += gv
        grad[l] -= gv
    return LossResult(value, grad)


def quality_crossing_angle(g: Graph, X: np.ndarray) -> float:
    """Worst deviation of a crossing angle from perpendicular, in [0, 1].

    0 when there are no crossings (nothing deviates).
    """
    pairs = detect_crossings(g, X)
    if not pairs:
        return 0.0
    worst = 0.0
    for pair in pairs:
        (i, j), (k, l) = pair.e1, pair.e2
        u = X[i] - X[j]
        v = X[k] - X[l]
        nu = max(np.linalg.norm(u), EPS)
        nv = max(np.linalg.norm(v), EPS)
        cos_acute = abs(float(u @ v)) / (nu * nv)
        theta = np.arccos(np.clip(cos_acute, 0.0, 1.0))  # in [0, pi/2]
        worst = max(worst, (np.pi / 2 - theta) / (np.pi / 2))
    return float(worst)


# ---------------------------------------------------------------------------
# AR: aspect ratio
# ---------------------------------------------------------------------------

def _soft_stats(x: np.ndarray,
                alpha: float) -> tuple[float, np.ndarray, float, np.ndarray]:
    """(soft max S, softmax weights p, soft min T, softmin weights q)."""
    z = alpha * x
    e = np.exp(z - z.max())
    p = e / e.sum()
    S = float(p @ x)
    e2 = np.exp(z.min() - z)
    q = e2 / e2.sum()
    T = float(q @ x)
    return S, p, T, q


def _ar_alpha(Xc: np.ndarray, sharpness: float) -> float:
    """Softmax temperature scaled to the centered layout's own radius.

    Fixed sharpness on raw coordinates goes mushy once layouts grow past
    unit scale, so the temperature tracks the layout; it is a frozen
    constant of the evaluation and no gradient flows through it.
    """
    radius = float(np.linalg.norm(Xc, axis=1).max()) if len(Xc) else 0.0
    return sharpness / max(radius, EPS)


def loss_aspect_ratio(X: np.ndarray, hyper: Optional[Hyper] = None,
                      alpha: Optional[float] = None) -> LossResult:
    """Cross-entropy between soft box side proportions and (1/2, 1/2),
    summed over evenly spaced rotations about the centroid.

    Minimum value is rotation_samples * log 2, reached when every rotated
    soft box is square. alpha overrides the extent-softmax temperature
    (default: ar_sharpness over the layout radius, frozen per evaluation).
    """
    hyper = hyper or Hyper()
    N = hyper.rotation_samples
    centroid = X.mean(axis=0)
    Xc = X - centroid
    if alpha is None:
        alpha = _ar_alpha(Xc, hyper.ar_sharpness)
    value = 0.0
    grad = _zeros_like_layout(X)
    for k in range(N):
        th = 2.0 * np.pi * k / N
        c, s = np.cos(th), np.sin(th)
        R = np.array([[c, -s], [s, c]])
        Y = Xc @ R.T
        x, y = Y[:, 0], Y[:, 1]
        Sx, px, Tx, qx = _soft_stats(x, alpha)
        Sy, py, Ty, qy = _soft_stats(y, alpha)
        w = Sx - Tx
        h = Sy - Ty
        if w < EPS or h < EPS:
            raise DegenerateLayout("layout has zero soft extent; aspect "
                                   "ratio is undefined")
        value += float(np.log(w + h) - 0.5 * np.log(w) - 0.5 * np.log(h))
        dw = 1.0 / (w + h) - 0.5 / w
        dh = 1.0 / (w + h) - 0.5 / h
        gx = dw * (px * (1.0 + alpha * (x - Sx)) - qx * (1.0 - alpha * (x - Tx)))
        gy = dh * (py * (1.0 + alpha * (y - Sy)) - qy * (1.0 - alpha * (y - Ty)))
        G = np.stack([gx, gy], axis=1) @ R
        grad += G - G.mean(axis=0)
    return LossResult(value, grad)


def quality_aspect_ratio(X: np.ndarray, hyper: Optional[Hyper] = None) -> float:
    """Worst min(w, h)/max(w, h) of the hard bounding box over the rotations."""
    hyper = hyper or Hyper()
    worst = 1.0
    for k in range(hyper.rotation_samples):
        th = 2.0 * np.pi * k / hyper.rotation_samples
        w, h = bounding_box(rotate(X, th))
        worst = min(worst, min(w, h) / max(w, h, EPS))
    return float(worst)


# ---------------------------------------------------------------------------
# ANR: angular resolution
# ---------------------------------------------------------------------------

def loss_angular_resolution(g: Graph, X: np.ndarray,
                            hyper: Optional[Hyper] = None,
                            triples: Optional[np.ndarray] = None) -> LossResult:
    """Sum of exp(-s * angle) over incident edge pairs at every vertex."""
    hyper = hyper or Hyper()
    if triples is None:
        triples = incident_triples(g)
    grad = _zeros_like_layout(X)
    if len(triples) == 0:
        return LossResult(0.0, grad)
    s = hyper.angle_sensitivity
    u = X[triples[:, 0]] - X[triples[:, 1]]
    v = X[triples[:, 2]] - X[triples[:, 1]]
    nu2 = (u * u).sum(axis=1)
    nv2 = (v * v).sum(axis=1)
    if min(nu2.min(), nv2.min()) < EPS * EPS:
        raise ZeroLengthEdge("zero-length edge at an incident angle")
    z = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    d = (u * v).sum(axis=1)
    phi = np.arctan2(np.abs(z), d)
    terms = np.exp(-s * phi)
    value = float(terms.sum())
    sz = np.sign(z)            # 0 exactly at collinear: zero-branch
    coef = -s * terms
    perp_u = np.stack([-u[:, 1], u[:, 0]], axis=1)
    perp_v = np.stack([-v[:, 1], v[:, 0]], axis=1)
    gi = (coef * -sz)[:, None] * perp_u / nu2[:, None]
    gk = (coef * sz)[:, None] * perp_v / nv2[:, None]
    np.add.at(grad, triples[:, 0], gi)
    np.add.at(grad, triples[:, 2], gk)
    np.add.at(grad, triples[:, 1], -(gi + gk))
    return LossResult(value, grad)


def quality_angular_resolution(g: Graph, X: np.ndarray) -> float:
    """Smallest incident angle relative to the ideal 2*pi/max_degree.

    1.0 when the graph has no two edges sharing a vertex.
    """
    triples = incident_triples(g)
    if len(triples) == 0:
        return 1.0
    u = X[triples[:, 0]] - X[triples[:, 1]]
    v = X[triples[:, 2]] - X[triples[:, 1]]
    z = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    d = (u * v).sum(axis=1)
    phi = np.arctan2(np.abs(z), d)
    deg_max = int(g.degrees.max())
    return float(phi.min() * deg_max / (2.0 * np.pi))


# ---------------------------------------------------------------------------
# VR: vertex resolution
# ---------------------------------------------------------------------------

def _target_separation(n: int, hyper: Hyper) -> float:
    r = hyper.target_resolution
    return float(r) if r is not None else float(1.0 / np.sqrt(n))


def loss_vertex_resolution(X: np.ndarray, hyper: Optional[Hyper] = None,
                           max_distance: Optional[float] = None,
                           pairs: Optional[np.ndarray] = None) -> LossResult:
    """Squared hinge pushing node pairs to at least r * max_distance apart.

    max_distance is a frozen snapshot of the layout diameter; pass it
    explicitly to keep it constant across a step.
    """
    hyper = hyper or Hyper()
    n = len(X)
    grad = _zeros_like_layout(X)
    if n < 2:
        return LossResult(0.0, grad)
    if max_distance is None:
        max_distance = float(pairwise_distances(X).max())
    if max_distance < EPS:
        raise DegenerateLayout("all nodes coincide; vertex resolution "
                               "target is zero")
    tau = _target_separation(n, hyper) * max_distance
    if pairs is None:
        diff = X[:, None, :] - X[None, :, :]
        D = np.sqrt((diff * diff).sum(axis=2))
        margin = 1.0 - D / tau
        np.fill_diagonal(margin, 0.0)
        iu = np.triu_indices(n, 1)
        act = margin > 0.0
        value = float((margin[iu][margin[iu] > 0.0] ** 2).sum())
        D_safe = np.maximum(D, EPS)
        np.fill_diagonal(D_safe, 1.0)
        coeff = np.where(act, -2.0 * margin / tau, 0.0)
        grad = ((coeff / D_safe)[:, :, None] * diff).sum(axis=1)
        return LossResult(value, grad)

    I, J = pairs[:, 0], pairs[:, 1]
    diff = X[I] - X[J]
    dd = np.sqrt((diff * diff).sum(axis=1))
    margin = 1.0 - dd / tau
    act = margin > 0.0
    value = float((margin[act] ** 2).sum())
    c = np.where(act, -2.0 * margin / (tau * np.maximum(dd, EPS)), 0.0)
    np.add.at(grad, I, c[:, None] * diff)
    np.add.at(grad, J, -c[:, None] * diff)
    return LossResult(value, grad)


def quality_vertex_resolution(X: np.ndarray,
                              hyper: Optional[Hyper] = None) -> float:
    """min(1, closest pair distance / (r * diameter))."""
    hyper = hyper or Hyper()
    n = len(X)
    if n < 2:
        return 1.0
    D = pairwise_distances(X)
    dmax = float(D.max())
    iu = np.triu_indices(n, 1)
    dmin = float(D[iu].min())
    tau = _target_separation(n, hyper) * dmax
    if tau < EPS:
        return 0.0               # collapsed layout: nothing is resolved
    return min(1.0, dmin / tau)


# ---------------------------------------------------------------------------
# GA: gabriel graph property
# ---------------------------------------------------------------------------

def gabriel_term_grid(g: Graph) -> np.ndarray:
    """All (edge index, node) pairs with the node not an endpoint; (t, 2)."""
    E = g.edge_array()
    rows = []
    for e, (i, j) in enumerate(E):
        for k in range(g.n):
            if k != i and k != j:
                rows.append((e, k))
    if not rows:
        return np.zeros((0, 2), dtype=int)
    return np.array(rows, dtype=int)


def loss_gabriel(g: Graph, X: np.ndarray,
                 terms: Optional[np.ndarray] = None) -> LossResult:
    """Squared hinge keeping non-endpoint nodes out of each edge's diametral disc."""
    grad = _zeros_like_layout(X)
    E = g.edge_array()
    m = len(E)
    if m == 0 or g.n < 3:
        return LossResult(0.0, grad)
    I, J = E[:, 0], E[:, 1]
    edge_vec = X[I] - X[J]
    elen = np.sqrt((edge_vec * edge_vec).sum(axis=1))
    if elen.min() < EPS:
        e = E[int(np.argmin(elen))]
        raise ZeroLengthEdge(f"edge {tuple(e)} has zero length")
    C = 0.5 * (X[I] + X[J])
    r = 0.5 * elen
    uhat = edge_vec / elen[:, None]

    if terms is None:
        rel = X[None, :, :] - C[:, None, :]            # (m, n, 2)
        Dc = np.sqrt((rel * rel).sum(axis=2))          # (m, n)
        delta = r[:, None] - Dc
        mask = delta > 0.0
        em = np.arange(m)
        mask[em, I] = False
        mask[em, J] = False
        value = float((delta[mask] ** 2).sum())
        A = np.where(mask, 2.0 * delta, 0.0)
        Ehat = rel / np.maximum(Dc, EPS)[:, :, None]
        grad -= np.einsum("en,enc->nc", A, Ehat)
        Se = np.einsum("en,enc->ec", A, Ehat)
        As = A.sum(axis=1)
        np.add.at(grad, I, 0.5 * (As[:, None] * uhat + Se))
        np.add.at(grad, J, 0.5 * (-As[:, None] * uhat + Se))
        return LossResult(value, grad)

    e_idx, k_idx = terms[:, 0], terms[:, 1]
    rel = X[k_idx] - C[e_idx]
    Dc = np.sqrt((rel * rel).sum(axis=1))
    delta = r[e_idx] - Dc
    act = delta > 0.0
    value = float((delta[act] ** 2).sum())
    A = np.where(act, 2.0 * delta, 0.0)
    Ehat = rel / np.maximum(Dc, EPS)[:, None]
    np.add.at(grad, k_idx, -A[:, None] * Ehat)
    np.add.at(grad, I[e_idx], 0.5 * A[:, None] * (uhat[e_idx] + Ehat))
    np.add.at(grad, J[e_idx], 0.5 * A[:, None] * (-uhat[e_idx] + Ehat))
    return LossResult(value, grad)


def quality_gabriel(g: Graph, X: np.ndarray) -> float:
    """min over edges and outside nodes of dist-to-midpoint / radius, capped at 1."""
    E = g.edge_array()
    if len(E) == 0 or g.n < 3:
        return 1.0
    I, J = E[:, 0], E[:, 1]
    edge_vec = X[I] - X[J]
    elen = np.sqrt((edge_vec * edge_vec).sum(axis=1))
    C = 0.5 * (X[I] + X[J])
    r = np.maximum(0.5 * elen, EPS)   # zero-length edges exclude nothing
    rel = X[None, :, :] - C[:, None, :]
    Dc = np.sqrt((rel * rel).sum(axis=2))
    ratio = Dc / r[:, None]
    em = np.arange(len(E))
    ratio[em, I] = np.inf
    ratio[em, J] = np.inf
    return float(min(1.0, ratio.min()))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def quality(cid: CriterionId, g: Graph, dist: np.ndarray, X: np.ndarray,
            hyper: Optional[Hyper] = None,
            np_cfg: Optional[NpConfig] = None) -> float:
    cid = CriterionId(cid)
    if cid is CriterionId.ST:
        return quality_stress(g, dist, X)
    if cid is CriterionId.IL:
        return quality_ideal_edge_length(g, X)
    if cid is CriterionId.NP:
        return quality_neighborhood(g, X, np_cfg)
    if cid is CriterionId.CN:
        return quality_crossing_number(g, X)
    if cid is CriterionId.CAM:
        return quality_crossing_angle(g, X)
    if cid is CriterionId.AR:
        return quality_aspect_ratio(X, hyper)
    if cid is CriterionId.ANR:
        return quality_angular_resolution(g, X)
    if cid is CriterionId.VR:
        return quality_vertex_resolution(X, hyper)
    if cid is CriterionId.GA:
        return quality_gabriel(g, X)
    raise ValueError(f"unknown criterion {cid!r}")


def quality_report(g: Graph, dist: np.ndarray, X: np.ndarray,
                   hyper: Optional[Hyper] = None,
                   np_cfg: Optional[NpConfig] = None) -> dict[CriterionId, float]:
    """All nine measures of one layout, in criterion order."""
    return {cid: quality(cid, g, dist, X, hyper, np_cfg) for cid in CriterionId}
