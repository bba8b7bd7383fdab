"""Finite-box lattice geometry on Z^d with free boundary.

Sites, positively oriented edges, and plaquettes are indexed row-major
over coordinates (fastest axis last).  Edge ids are grouped by axis, so a
lexicographic sweep over edge ids visits axis 0 edges in site order, then
axis 1, and so on.  Plaquette boundaries follow the counterclockwise
convention that starts at the lexicographically smallest vertex and moves
first along the higher axis: x -> x+e_j -> x+e_i+e_j -> x+e_i -> x for
axes i < j.  Re Tr(I - U_p) does not depend on this choice for unitary
U_p; it matters only for bit-exact oracle comparisons.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation


@dataclass(frozen=True)
class Edge:
    """Positively oriented edge: base site -> base + e_axis."""

    base: tuple
    axis: int


@dataclass(frozen=True)
class Plaquette:
    """Unit square with base site x and plane axes (i, j), i < j."""

    base: tuple
    axes: tuple


@dataclass(frozen=True)
class LoopSpec:
    """Rectangular loop: sides r along axes[0] and t along axes[1], r <= t."""

    base: tuple
    axes: tuple
    r: int
    t: int

    def __post_init__(self):
        if self.r < 1 or self.t < 1:
            raise ContractViolation("loop sides must be >= 1")
        if self.r > self.t:
            raise ContractViolation(f"loop requires r <= t, got ({self.r}, {self.t})")
        if self.axes[0] == self.axes[1]:
            raise ContractViolation("loop plane axes must differ")


class LatticeGeometry:
    """Index maps for sites, edges, and plaquettes of a finite box."""

    def __init__(self, extents):
        extents = tuple(int(e) for e in extents)
        if len(extents) not in (2, 3):
            raise ConfigError(f"dimension {len(extents)} not supported (d in {{2,3}})")
        if any(e < 2 for e in extents):
            raise ConfigError(f"every extent must be >= 2, got {extents}")
        self.extents = extents
        self.d = len(extents)
        self.n_sites = int(np.prod(extents))

        # edges grouped by axis
        self.edge_shapes = []
        self.edge_offsets = []
        off = 0
        for a in range(self.d):
            shape = tuple(e - 1 if b == a else e for b, e in enumerate(extents))
            self.edge_shapes.append(shape)
            self.edge_offsets.append(off)
            off += int(np.prod(shape))
        self.n_edges = off

        # plaquettes grouped by axis pair (i < j)
        self.plaq_pairs = list(itertools.combinations(range(self.d), 2))
        self.plaq_shapes = []
        self.plaq_offsets = []
        off = 0
        for (i, j) in self.plaq_pairs:
            shape = tuple(
                e - 1 if b in (i, j) else e for b, e in enumerate(extents)
            )
            self.plaq_shapes.append(shape)
            self.plaq_offsets.append(off)
            off += int(np.prod(shape))
        self.n_plaquettes = off

        self._cache: dict = {}

    # -- index maps ---------------------------------------------------------

    def site_index(self, coords) -> int:
        return int(np.ravel_multi_index(tuple(coords), self.extents))

    def site_coords(self, idx: int) -> tuple:
        return tuple(int(c) for c in np.unravel_index(idx, self.extents))

    def sites(self):
        return itertools.product(*(range(e) for e in self.extents))

    def edge_index(self, edge: Edge) -> int:
        a = edge.axis
        base = tuple(edge.base)
        shape = self.edge_shapes[a]
        if any(not (0 <= c < s) for c, s in zip(base, shape)):
            raise ContractViolation(f"edge {edge} outside box {self.extents}")
        return self.edge_offsets[a] + int(np.ravel_multi_index(base, shape))

    def edge_from_index(self, idx: int) -> Edge:
        for a in reversed(range(self.d)):
            if idx >= self.edge_offsets[a]:
                base = np.unravel_index(idx - self.edge_offsets[a], self.edge_shapes[a])
                return Edge(tuple(int(c) for c in base), a)
        raise ContractViolation(f"edge index {idx} out of range")

    def edges(self):
        for a in range(self.d):
            for base in itertools.product(*(range(s) for s in self.edge_shapes[a])):
                yield Edge(base, a)

    def plaquette_index(self, p: Plaquette) -> int:
        pair = tuple(p.axes)
        try:
            pi = self.plaq_pairs.index(pair)
        except ValueError:
            raise ContractViolation(f"plaquette axes {pair} must be an ordered pair i<j")
        shape = self.plaq_shapes[pi]
        if any(not (0 <= c < s) for c, s in zip(p.base, shape)):
            raise ContractViolation(f"plaquette {p} outside box {self.extents}")
        return self.plaq_offsets[pi] + int(np.ravel_multi_index(tuple(p.base), shape))

    def plaquette_from_index(self, idx: int) -> Plaquette:
        for pi in reversed(range(len(self.plaq_pairs))):
            if idx >= self.plaq_offsets[pi]:
                base = np.unravel_index(idx - self.plaq_offsets[pi], self.plaq_shapes[pi])
                return Plaquette(tuple(int(c) for c in base), self.plaq_pairs[pi])
        raise ContractViolation(f"plaquette index {idx} out of range")

    def plaquettes(self):
        for pi, pair in enumerate(self.plaq_pairs):
            for base in itertools.product(*(range(s) for s in self.plaq_shapes[pi])):
                yield Plaquette(base, pair)

    # -- cached id-level adjacency tables ------------------------------------

    def plaquette_edge_table(self):
        """(P, 4) edge ids and (P, 4) signs, ordered along each boundary."""
        if "plaq_edges" not in self._cache:
            eids = np.empty((self.n_plaquettes, 4), dtype=np.int64)
            sgns = np.empty((self.n_plaquettes, 4), dtype=np.int8)
            for p in self.plaquettes():
                pid = self.plaquette_index(p)
                for col, (edge, sign) in enumerate(plaquette_boundary(self, p)):
                    eids[pid, col] = self.edge_index(edge)
                    sgns[pid, col] = sign
            self._cache["plaq_edges"] = (eids, sgns)
        return self._cache["plaq_edges"]

    def edge_incidence_table(self):
        """Per edge id: list of (plaquette id, boundary position)."""
        if "incidence" not in self._cache:
            table: list[list] = [[] for _ in range(self.n_edges)]
            eids, _ = self.plaquette_edge_table()
            for pid in range(self.n_plaquettes):
                for col in range(4):
                    table[eids[pid, col]].append((pid, col))
            self._cache["incidence"] = table
        return self._cache["incidence"]

    def __repr__(self):
        return f"LatticeGeometry(extents={self.extents})"


def build_box(d: int, extents) -> LatticeGeometry:
    """Box geometry; validates d in {2,3} and every extent >= 2."""
    extents = tuple(extents)
    if len(extents) != d:
        raise ConfigError(f"extents {extents} do not match dimension {d}")
    return LatticeGeometry(extents)


def _shift(coords, axis, step):
    return tuple(c + (step if b == axis else 0) for b, c in enumerate(coords))


def plaquette_boundary(geom: LatticeGeometry, p: Plaquette):
    """Four oriented steps around p, counterclockwise from the base vertex.

    Returned edges are positively oriented; sign -1 marks steps that run
    against the stored orientation.
    """
    i, j = p.axes
    x = tuple(p.base)
    return [
        (Edge(x, j), +1),
        (Edge(_shift(x, j, 1), i), +1),
        (Edge(_shift(x, i, 1), j), -1),
        (Edge(x, i), -1),
    ]


def incident_plaquettes(geom: LatticeGeometry, e: Edge):
    """All plaquettes whose boundary contains e, with the boundary sign."""
    eid = geom.edge_index(e)
    _, sgns = geom.plaquette_edge_table()
    out = []
    for pid, col in geom.edge_incidence_table()[eid]:
        out.append((geom.plaquette_from_index(pid), int(sgns[pid, col])))
    return out


def loop_edge_steps(geom: LatticeGeometry, loop: LoopSpec):
    """2(r+t) oriented steps tracing the rectangle, closed, inside the box."""
    a, b = loop.axes
    r, t = loop.r, loop.t
    x = tuple(loop.base)
    far = list(x)
    far[a] += r
    far[b] += t
    for c, (lo, hi) in enumerate(zip(x, far)):
        if lo < 0 or hi > geom.extents[c] - 1:
            raise ConfigError(f"loop {loop} exits box {geom.extents}")
    steps = []
    for jj in range(t):
        steps.append((Edge(_shift(x, b, jj), b), +1))
    top = _shift(x, b, t)
    for ii in range(r):
        steps.append((Edge(_shift(top, a, ii), a), +1))
    right = _shift(x, a, r)
    for jj in reversed(range(t)):
        steps.append((Edge(_shift(right, b, jj), b), -1))
    for ii in reversed(range(r)):
        steps.append((Edge(_shift(x, a, ii), a), -1))
    return steps


def loop_fits(geom: LatticeGeometry, loop: LoopSpec, margin: int) -> bool:
    """True if the rectangle keeps >= margin sites between it and every face."""
    a, b = loop.axes
    lo = list(loop.base)
    hi = list(loop.base)
    hi[a] += loop.r
    hi[b] += loop.t
    return all(
        lo[c] >= margin and hi[c] <= geom.extents[c] - 1 - margin
        for c in range(geom.d)
    )


def loop_positions(geom: LatticeGeometry, r: int, t: int, margin: int = 0):
    """Every placement of an r x t rectangle with the given margin.

    For r < t both in-plane placements (r along either plane axis) are
    included; for r == t only the canonical one.
    """
    specs = []
    for (i, j) in itertools.combinations(range(geom.d), 2):
        axpairs = [(i, j)] if r == t else [(i, j), (j, i)]
        for (a, b) in axpairs:
            ranges = []
            for c in range(geom.d):
                span = r if c == a else (t if c == b else 0)
                lo = margin
                hi = geom.extents[c] - 1 - margin - span
                if hi < lo:
                    ranges = None
                    break
                ranges.append(range(lo, hi + 1))
            if ranges is None:
                continue
            for base in itertools.product(*ranges):
                specs.append(LoopSpec(base, (a, b), r, t))
    return specs
