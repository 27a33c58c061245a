"""Planar geometry: distances, crossings, boxes, angles.

Everything here is plain forward computation (no gradients); the loss
functions in criteria.py differentiate their own geometry. Tolerances:
orientation sign tests treat |cross| <= 1e-12 as collinear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_model import Graph

ORIENT_TOL = 1e-12


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, (n, n), zeros on the diagonal."""
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def orientation(p: np.ndarray, q: np.ndarray, r: np.ndarray,
                tol: float = ORIENT_TOL) -> int:
    """Sign of the turn p->q->r: +1 counter-clockwise, -1 clockwise, 0 collinear."""
    z = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    if abs(z) <= tol:
        return 0
    return 1 if z > 0 else -1


def _collinear_overlap(p1, p2, p3, p4) -> bool:
    # all four points collinear; positive-length overlap of the two segments
    d = p2 - p1
    axis = 0 if abs(d[0]) >= abs(d[1]) else 1
    a1, a2 = sorted((p1[axis], p2[axis]))
    b1, b2 = sorted((p3[axis], p4[axis]))
    return min(a2, b2) - max(a1, b1) > ORIENT_TOL


def segments_cross(p1: np.ndarray, p2: np.ndarray,
                   p3: np.ndarray, p4: np.ndarray) -> bool:
    """Proper crossing test for segments p1p2 and p3p4.

    True when the segments cross at an interior point of both, or when they
    are collinear and overlap in a segment of positive length. Touching at
    an endpoint (or an endpoint lying exactly on the other segment) is not
    a crossing.
    """
    o1 = orientation(p1, p2, p3)
    o2 = orientation(p1, p2, p4)
    o3 = orientation(p3, p4, p1)
    o4 = orientation(p3, p4, p2)
    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        return _collinear_overlap(p1, p2, p3, p4)
    return o1 * o2 < 0 and o3 * o4 < 0


@dataclass(frozen=True)
class CrossingPair:
    """Unordered pair of crossing edges, canonical: e1 < e2 lexicographically,
    each edge already in (min, max) node order."""
    e1: tuple[int, int]
    e2: tuple[int, int]

    def key(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.e1, self.e2)

    @property
    def nodes(self) -> tuple[int, int, int, int]:
        return (*self.e1, *self.e2)


def detect_crossings(g: Graph, X: np.ndarray) -> list[CrossingPair]:
    """All properly crossing edge pairs, sorted by edge-pair indices.

    Edge pairs sharing a node are never reported. Quadratic in |E| with
    broadcast orientation tests, which is the intended regime (hundreds of
    edges); no sweep-line.
    """
    edges = g.edges
    m = len(edges)
    if m < 2:
        return []
    E = g.edge_array()
    P1 = X[E[:, 0]]
    P2 = X[E[:, 1]]
    D = P2 - P1
    # Z1[a,b] = cross(D_a, P1_b - P1_a); Z2[a,b] same with P2_b: orientation
    # of edge b's endpoints against edge a's supporting line
    dx = D[:, 0][:, None]
    dy = D[:, 1][:, None]
    Z1 = dx * (P1[None, :, 1] - P1[:, 1][:, None]) - dy * (P1[None, :, 0] - P1[:, 0][:, None])
    Z2 = dx * (P2[None, :, 1] - P1[:, 1][:, None]) - dy * (P2[None, :, 0] - P1[:, 0][:, None])
    S1 = np.where(np.abs(Z1) <= ORIENT_TOL, 0, np.sign(Z1)).astype(np.int8)
    S2 = np.where(np.abs(Z2) <= ORIENT_TOL, 0, np.sign(Z2)).astype(np.int8)
    proper = (S1 * S2 < 0) & (S1.T * S2.T < 0)
    collinear = (S1 == 0) & (S2 == 0) & (S1.T == 0) & (S2.T == 0)
    I, J = E[:, 0], E[:, 1]
    share = ((I[:, None] == I[None, :]) | (I[:, None] == J[None, :]) |
             (J[:, None] == I[None, :]) | (J[:, None] == J[None, :]))
    upper = np.triu(np.ones((m, m), dtype=bool), 1)
    found = list(map(tuple, np.argwhere(proper & ~share & upper)))
    for a, b in np.argwhere(collinear & ~share & upper):
        if _collinear_overlap(P1[a], P2[a], P1[b], P2[b]):
            found.append((a, b))
    found.sort()
    return [CrossingPair(edges[a], edges[b]) for a, b in found]


def count_crossings(g: Graph, X: np.ndarray) -> int:
    return len(detect_crossings(g, X))


# ---------------------------------------------------------------------------
# boxes and rotations
# ---------------------------------------------------------------------------

def rotate(X: np.ndarray, theta: float) -> np.ndarray:
    """Rotate the layout by theta (radians, counter-clockwise) about its centroid."""
    c, s = np.cos(theta), np.sin(theta)
    R = np.array([[c, -s], [s, c]])
    centroid = X.mean(axis=0)
    return (X - centroid) @ R.T + centroid


def bounding_box(X: np.ndarray) -> tuple[float, float]:
    """Hard width/height of the axis-aligned bounding box."""
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    return float(hi[0] - lo[0]), float(hi[1] - lo[1])


def soft_extent(x: np.ndarray) -> float:
    """Softmax-weighted extent of a coordinate array:
    <softmax(x), x> - <softmax(-x), x>. Zero iff all entries equal."""
    return _soft_max(x) - _soft_min(x)


def _soft_max(x: np.ndarray) -> float:
    e = np.exp(x - x.max())
    p = e / e.sum()
    return float(p @ x)


def _soft_min(x: np.ndarray) -> float:
    return -_soft_max(-x)


def soft_bounding_box(X: np.ndarray) -> tuple[float, float]:
    """Differentiable stand-in for the bounding box: softmax-weighted extents.

    Always <= the hard box; degrades to (0, 0) on an all-coincident layout.
    """
    return soft_extent(X[:, 0]), soft_extent(X[:, 1])


# ---------------------------------------------------------------------------
# incident angles
# ---------------------------------------------------------------------------

def incident_triples(g: Graph) -> np.ndarray:
    """All (i, j, k) with i < k both adjacent to j: one row per angle at j.

    Shape (t, 3); empty graphs and graphs with max degree 1 give (0, 3).
    """
    rows = []
    for j in range(g.n):
        nb = g.neighbors(j)
        for a in range(len(nb)):
            for b in range(a + 1, len(nb)):
                rows.append((nb[a], j, nb[b]))
    if not rows:
        return np.zeros((0, 3), dtype=int)
    return np.array(rows, dtype=int)


def incident_angles(g: Graph, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angles phi in [0, pi] at each incident edge pair, with their triples.

    Returns (triples (t,3), phi (t,)).
    """
    tri = incident_triples(g)
    if len(tri) == 0:
        return tri, np.zeros(0)
    u = X[tri[:, 0]] - X[tri[:, 1]]
    v = X[tri[:, 2]] - X[tri[:, 1]]
    z = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    d = (u * v).sum(axis=1)
    return tri, np.arctan2(np.abs(z), d)
