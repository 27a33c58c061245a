"""Lovasz hinge surrogate for the Jaccard (IoU) loss.

Scores are real-valued margins f, labels are {0, 1}. The hinge errors
e = 1 - f * sign are sorted in decreasing order and weighted by the
discrete gradient of the Jaccard loss along that permutation; the result
is a convex piecewise-linear surrogate whose minimum (all margins >= 1
with the right signs) has value 0.
"""

from __future__ import annotations

import numpy as np


def jaccard_gradient(labels_sorted: np.ndarray) -> np.ndarray:
    """Increments of the Jaccard loss along a greedy mistake ordering.

    labels_sorted: 0/1 array ordered by decreasing hinge error.
    """
    p = len(labels_sorted)
    gts = labels_sorted.sum()
    intersection = gts - np.cumsum(labels_sorted)
    union = gts + np.cumsum(1.0 - labels_sorted)
    jaccard = 1.0 - intersection / union
    if p > 1:
        out = jaccard.copy()
        out[1:] = jaccard[1:] - jaccard[:-1]
        return out
    return jaccard


def lovasz_hinge(scores: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Lovasz hinge of the Jaccard loss; returns (value, d value / d scores).

    At sort ties and at hinge kinks (error exactly 0) the zero branch is
    taken: ties resolve by stable sort, inactive hinges get zero gradient.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-D arrays")
    if len(scores) == 0:
        return 0.0, np.zeros(0)
    signs = 2.0 * labels - 1.0
    errors = 1.0 - scores * signs
    order = np.argsort(-errors, kind="stable")
    errors_sorted = errors[order]
    grad_weights = jaccard_gradient(labels[order])
    value = float(np.maximum(errors_sorted, 0.0) @ grad_weights)
    active = errors_sorted > 0.0
    d_err = np.where(active, grad_weights, 0.0)
    grad = np.zeros_like(scores)
    grad[order] = d_err
    grad *= -signs
    return value, grad
