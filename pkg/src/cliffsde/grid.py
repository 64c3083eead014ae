"""Partition of a time interval into finitely many increments.

Every object in this package lives over such a grid: one algebra generator
(or generator pair) is attached to each increment, integrals are finite sums
over increments, and trajectories are indexed by grid nodes.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np


class TimeGrid:
    """Strictly increasing nodes t0 = tau_0 < tau_1 < ... < tau_n = T."""

    def __init__(self, nodes):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a grid needs at least two nodes (n >= 1)")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        nodes = nodes.copy()
        nodes.setflags(write=False)
        self.nodes = nodes
        # increments must tile [t0, T]; the float sum of diffs can drift by
        # a few ulps per increment, nothing more
        span = self.T - self.t0
        if abs(float(np.sum(self.deltas)) - span) > 16 * self.n * np.finfo(float).eps * max(abs(self.T), abs(self.t0), 1.0):
            raise ValueError("grid increments do not tile the interval")

    @classmethod
    def uniform(cls, t0: float, T: float, n: int) -> "TimeGrid":
        if n < 1:
            raise ValueError(f"need at least one increment, got n={n}")
        if not T > t0:
            raise ValueError(f"degenerate interval: T={T} must exceed t0={t0}")
        return cls(np.linspace(t0, T, n + 1))

    @classmethod
    def from_nodes(cls, nodes) -> "TimeGrid":
        return cls(nodes)

    @property
    def t0(self) -> float:
        return float(self.nodes[0])

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    @property
    def n(self) -> int:
        """Number of increments."""
        return len(self.nodes) - 1

    @cached_property
    def deltas(self) -> np.ndarray:
        d = np.diff(self.nodes)
        d.setflags(write=False)
        return d

    def node(self, k: int) -> float:
        if not 0 <= k <= self.n:
            raise IndexError(f"node index {k} outside 0..{self.n}")
        return float(self.nodes[k])

    def delta(self, k: int) -> float:
        if not 0 <= k < self.n:
            raise IndexError(f"increment index {k} outside 0..{self.n - 1}")
        return float(self.deltas[k])

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and np.array_equal(self.nodes, other.nodes)

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def __repr__(self):
        return f"TimeGrid(t0={self.t0}, T={self.T}, n={self.n})"
