"""Piecewise trapezoid rule on the half line for Hermitian band-limited integrands.

An integral over R of a Hermitian-paired integrand is folded onto [0, L]:
int_R g(u) du = int_0^L (g(u) + g(-u)) du.  The half line is cut at the
kernel band edges pi*m.  Segment i, ending at pi*m_i, gets the spacing a
uniform grid with ``nodes`` intervals over [-pi m_i, pi m_i] would have.  So
the inner, narrow bands are resolved as finely as a dedicated grid would do it.

Each point carries a left and a right value.  The rule is

    sum_i (p_{i+1} - p_i) / 2 * (right_i + left_{i+1}),

which is the exact composite trapezoid on every smooth piece.  Points where
the integrand jumps (band edges, data-dependent truncation switches) are
inserted as breakpoints with distinct one-sided values.  The coarse rule
drops every other node inside each segment but keeps all breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["HalfLineGrid", "half_line_grid", "PiecewiseRule", "kernel_limits"]


@dataclass(frozen=True, eq=False)
class HalfLineGrid:
    """Nodes on [0, L] with segment structure.

    ``segments`` lists (start, end, count) with count even; ``points`` are the
    distinct nodes in ascending order, ``coarse`` marks the nodes kept by the
    halved rule (every other node within each segment, all segment ends).
    """

    segments: tuple[tuple[float, float, int], ...]
    points: np.ndarray
    coarse: np.ndarray

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def intervals(self) -> int:
        """Interval count of the equivalent full-line grid."""
        return 2 * sum(c for _, _, c in self.segments)


def half_line_grid(ms: Sequence[int], nodes: int, support_scale: float = 1.0,
                   cutoff: float = math.inf) -> HalfLineGrid:
    ms = sorted({int(m) for m in ms if int(m) > 0})
    if not ms:
        raise ValueError("need at least one positive bandwidth index")
    reach = math.pi * ms[-1] * support_scale
    # (edge, band end whose spacing it inherits)
    ends = [(math.pi * m, math.pi * m) for m in ms if math.pi * m < reach]
    ends.append((reach, reach))
    if cutoff < reach:
        kept = [e for e in ends if e[0] < cutoff]
        band = next(b for e, b in ends if e >= cutoff)
        ends = kept + [(cutoff, band)]
    segments = []
    start = 0.0
    for end, band in ends:
        if end <= start:
            continue
        target = 2.0 * band / nodes
        count = 2 * max(1, math.ceil((end - start) / (2.0 * target) - 1e-9))
        segments.append((start, end, count))
        start = end
    pts, mask = [np.zeros(1)], [np.ones(1, dtype=bool)]
    for a, b, c in segments:
        seg = a + (b - a) / c * np.arange(1, c + 1)
        seg[-1] = b
        keep = np.zeros(c, dtype=bool)
        keep[1::2] = True
        pts.append(seg)
        mask.append(keep)
    return HalfLineGrid(tuple(segments), np.concatenate(pts), np.concatenate(mask))


def kernel_limits(K, ms: Sequence[float], p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows F K(p/m) approached from the left and from the right, p >= 0.

    m = 0 gives the zero row (the limit convention F K(u/0) = 0).
    """
    left = np.zeros((len(ms), p.size))
    right = np.zeros((len(ms), p.size))
    for i, m in enumerate(ms):
        if m == 0:
            continue
        inner, outer = K.ft_limits(p / m)
        left[i], right[i] = inner, outer
    return left, right


class PiecewiseRule:
    """Weights of the one-sided trapezoid rule over selected sorted points."""

    def __init__(self, points: np.ndarray, select: np.ndarray | None = None):
        idx = np.arange(points.size) if select is None else np.flatnonzero(select)
        gaps = np.diff(points[idx]) / 2.0
        self.right = np.zeros(points.size)
        self.left = np.zeros(points.size)
        self.right[idx[:-1]] = gaps
        self.left[idx[1:]] = gaps

    def apply(self, rows_left, rows_right, vals_left, vals_right):
        """sum over points of rows * weight * values, per row; fixed summation order."""
        a = rows_right * (self.right * vals_right)
        b = rows_left * (self.left * vals_left)
        return np.sum(a, axis=-1) + np.sum(b, axis=-1)
