"""Gauge field storage and the Wilson action.

A field stores one group element per positively oriented edge; reversed
edges are always derived as inverses, never stored.  Phase groups keep a
flat angle array (Z_m an integer grid-index array), U(n) keeps an
(E, n, n) complex array.  The local-update decomposition used by the
samplers is S restricted to the plaquettes containing an edge e:

    sum_{p ni e} Re Tr U_p = Re Tr(U(e) . staple_sum(U, e)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import groups
from .errors import ConfigError, ContractViolation
from .groups import TWO_PI, GroupElement, GroupId
from .lattice import Edge, LatticeGeometry, Plaquette, plaquette_boundary


@dataclass(frozen=True)
class ModelParams:
    """Gauge group, ambient dimension, and inverse coupling beta >= 0."""

    group: GroupId
    beta: float
    oracle: bool = False  # must be set to use the Z_m enumeration-oracle group

    def __post_init__(self):
        if not (self.beta >= 0.0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be finite and >= 0, got {self.beta}")
        if self.group.kind == groups.ZM and not self.oracle:
            raise ConfigError("Z_m is an enumeration-oracle group; pass oracle=True")

    @property
    def n(self) -> int:
        return self.group.n


class GaugeField:
    """Edge -> group element assignment on a box geometry."""

    def __init__(self, geometry: LatticeGeometry, group: GroupId, data: np.ndarray):
        self.geometry = geometry
        self.group = group
        self.data = data

    @classmethod
    def identity(cls, geometry: LatticeGeometry, group: GroupId) -> "GaugeField":
        e = geometry.n_edges
        if group.kind == groups.U1:
            return cls(geometry, group, np.zeros(e))
        if group.kind == groups.ZM:
            return cls(geometry, group, np.zeros(e, dtype=np.int64))
        mats = np.broadcast_to(np.eye(group.n, dtype=complex), (e, group.n, group.n)).copy()
        return cls(geometry, group, mats)

    @classmethod
    def haar(cls, geometry: LatticeGeometry, group: GroupId, rng) -> "GaugeField":
        e = geometry.n_edges
        if group.kind == groups.U1:
            return cls(geometry, group, rng.uniform(0.0, TWO_PI, size=e))
        if group.kind == groups.ZM:
            return cls(geometry, group, rng.integers(group.m, size=e).astype(np.int64))
        return cls(geometry, group, groups.haar_unitary_batch(group.n, e, rng))

    def copy(self) -> "GaugeField":
        return GaugeField(self.geometry, self.group, self.data.copy())

    @property
    def n(self) -> int:
        return self.group.n

    def angles(self) -> np.ndarray:
        """Edge angles as float64 (Z_m indices mapped to the grid)."""
        if self.group.kind == groups.U1:
            return self.data
        if self.group.kind == groups.ZM:
            return self.data * (TWO_PI / self.group.m)
        raise ContractViolation("matrix fields have no angle array")

    def get(self, edge: Edge) -> GroupElement:
        eid = self.geometry.edge_index(edge)
        if self.group.kind == groups.U1:
            return GroupElement(self.group, theta=float(self.data[eid]) % TWO_PI)
        if self.group.kind == groups.ZM:
            return GroupElement(self.group, k=int(self.data[eid]))
        return GroupElement(self.group, mat=self.data[eid].copy())

    def set(self, edge: Edge, g: GroupElement) -> None:
        if g.group != self.group:
            raise ContractViolation(f"element group {g.group} != field group {self.group}")
        eid = self.geometry.edge_index(edge)
        if self.group.kind == groups.U1:
            self.data[eid] = g.theta % TWO_PI
        elif self.group.kind == groups.ZM:
            self.data[eid] = g.k
        else:
            self.data[eid] = g.mat


# -- holonomy and action ------------------------------------------------------


def plaquette_holonomy(field: GaugeField, p: Plaquette) -> GroupElement:
    """Ordered product of the four boundary elements (inverses on sign -1)."""
    out = groups.identity(field.group)
    for edge, sign in plaquette_boundary(field.geometry, p):
        g = field.get(edge)
        out = groups.compose(out, g if sign > 0 else groups.invert(g))
    return out


def plaquette_angles(field: GaugeField) -> np.ndarray:
    """All plaquette holonomy angles at once (phase groups only)."""
    eids, sgns = field.geometry.plaquette_edge_table()
    theta = field.angles()
    return (theta[eids] * sgns).sum(axis=1)


def plaquette_re_traces(field: GaugeField) -> np.ndarray:
    """Re Tr U_p for every plaquette."""
    if field.group.is_phase:
        return np.cos(plaquette_angles(field))
    eids, sgns = field.geometry.plaquette_edge_table()
    mats = field.data[eids]
    flip = sgns < 0
    mats[flip] = np.conj(np.swapaxes(mats[flip], -1, -2))
    prod = mats[:, 0]
    for col in range(1, 4):
        prod = prod @ mats[:, col]
    return np.trace(prod, axis1=-2, axis2=-1).real


def wilson_action(field: GaugeField) -> float:
    """S = sum_p Re Tr(I - U_p) over every plaquette of the box."""
    n = field.n
    return float((n - plaquette_re_traces(field)).sum())


# -- staples and local updates ------------------------------------------------


def staple_table(geometry: LatticeGeometry):
    """Per edge id: staples as (flip, (e1, s1, e2, s2, e3, s3)).

    Each staple is the cyclic product of the other three boundary entries
    after the edge; flip marks boundaries that traverse the edge with sign
    -1, in which case the conjugate transpose of the product enters the
    sum.  Cached on the geometry.
    """
    if "staples" in geometry._cache:
        return geometry._cache["staples"]
    eids, sgns = geometry.plaquette_edge_table()
    table: list[list] = [[] for _ in range(geometry.n_edges)]
    for eid, hits in enumerate(geometry.edge_incidence_table()):
        for pid, col in hits:
            rest = []
            for off in range(1, 4):
                c = (col + off) % 4
                rest.append((int(eids[pid, c]), int(sgns[pid, c])))
            flip = sgns[pid, col] < 0
            table[eid].append((bool(flip), tuple(x for pair in rest for x in pair)))
    geometry._cache["staples"] = table
    return table


def abelian_staple_terms(geometry: LatticeGeometry):
    """Per edge id: list of (c1, e1, c2, e2, c3, e3) angle coefficients.

    The staple scalar is sum_j exp(i*(c1*th[e1] + c2*th[e2] + c3*th[e3])).
    Cached on the geometry.
    """
    if "abelian_staples" in geometry._cache:
        return geometry._cache["abelian_staples"]
    table = []
    for staples in staple_table(geometry):
        terms = []
        for flip, (e1, s1, e2, s2, e3, s3) in staples:
            f = -1 if flip else 1
            terms.append((f * s1, e1, f * s2, e2, f * s3, e3))
        table.append(terms)
    geometry._cache["abelian_staples"] = table
    return table


def staple_scalar(field: GaugeField, eid: int) -> complex:
    theta = field.angles()
    s = 0.0 + 0.0j
    for c1, e1, c2, e2, c3, e3 in abelian_staple_terms(field.geometry)[eid]:
        s += np.exp(1j * (c1 * theta[e1] + c2 * theta[e2] + c3 * theta[e3]))
    return complex(s)


def staple_sum(field: GaugeField, e: Edge) -> np.ndarray:
    """(n, n) staple matrix with Re Tr(U(e) . staple) = sum_{p ni e} Re Tr U_p."""
    eid = field.geometry.edge_index(e)
    if field.group.is_phase:
        return np.array([[staple_scalar(field, eid)]])
    n = field.n
    out = np.zeros((n, n), dtype=complex)
    for flip, (e1, s1, e2, s2, e3, s3) in staple_table(field.geometry)[eid]:
        m = _mat_pow(field.data[e1], s1) @ _mat_pow(field.data[e2], s2) @ _mat_pow(field.data[e3], s3)
        out += m.conj().T if flip else m
    return out


def _mat_pow(m: np.ndarray, sign: int) -> np.ndarray:
    return m if sign > 0 else m.conj().T


def local_action_delta(field: GaugeField, e: Edge, candidate: GroupElement) -> float:
    """Action change if U(e) were replaced by candidate; matches a global
    recompute to rounding."""
    if candidate.group != field.group:
        raise ContractViolation("candidate belongs to a different group")
    eid = field.geometry.edge_index(e)
    if field.group.is_phase:
        s = staple_scalar(field, eid)
        old = np.exp(1j * field.angles()[eid])
        new = np.exp(1j * candidate.angle)
        return float(-((new - old) * s).real)
    stap = staple_sum(field, e)
    diff = candidate.mat - field.data[eid]
    return float(-np.trace(diff @ stap).real)


# -- central twist / expanded model -------------------------------------------


class CentralTwist:
    """U(1) phase per positively oriented edge (stored as angles)."""

    def __init__(self, geometry: LatticeGeometry, angles: np.ndarray | None = None):
        self.geometry = geometry
        self.angles = np.zeros(geometry.n_edges) if angles is None else np.asarray(angles, dtype=float)
        if self.angles.shape != (geometry.n_edges,):
            raise ContractViolation("twist angle array does not match edge count")

    @classmethod
    def haar(cls, geometry: LatticeGeometry, rng) -> "CentralTwist":
        return cls(geometry, rng.uniform(0.0, TWO_PI, size=geometry.n_edges))

    def plaquette_angle(self, p: Plaquette) -> float:
        geom = self.geometry
        return sum(
            sign * self.angles[geom.edge_index(edge)]
            for edge, sign in plaquette_boundary(geom, p)
        )

    def plaquette_angles(self) -> np.ndarray:
        eids, sgns = self.geometry.plaquette_edge_table()
        return (self.angles[eids] * sgns).sum(axis=1)


def twisted_holonomy(field: GaugeField, twist: CentralTwist, p: Plaquette) -> GroupElement:
    """xi_p * U_p: the plaquette holonomy of the expanded (U, xi) model."""
    up = plaquette_holonomy(field, p)
    xi = twist.plaquette_angle(p)
    if field.group.is_phase:
        return groups.compose(groups.phase_element(GroupId.u1(), xi),
                              GroupElement(GroupId.u1(), theta=up.angle % TWO_PI))
    return GroupElement(field.group, mat=np.exp(1j * xi) * up.mat)


def twisted_wilson_action(field: GaugeField, twist: CentralTwist) -> float:
    """sum_p Re Tr(I - xi_p U_p)."""
    n = field.n
    xi = twist.plaquette_angles()
    if field.group.is_phase:
        return float((n - np.cos(plaquette_angles(field) + xi)).sum())
    eids, sgns = field.geometry.plaquette_edge_table()
    mats = field.data[eids]
    flip = sgns < 0
    mats[flip] = np.conj(np.swapaxes(mats[flip], -1, -2))
    prod = mats[:, 0]
    for col in range(1, 4):
        prod = prod @ mats[:, col]
    tr = np.trace(prod, axis1=-2, axis2=-1)
    return float((n - (np.exp(1j * xi) * tr).real).sum())


def absorb_twist(field: GaugeField, twist: CentralTwist) -> GaugeField:
    """Edge-wise product e -> xi(e) U(e) as a plain gauge field."""
    if field.group.kind == groups.U1:
        return GaugeField(field.geometry, field.group, (field.data + twist.angles) % TWO_PI)
    if field.group.kind == groups.ZM:
        raise ContractViolation("continuous twists cannot be absorbed into Z_m fields")
    phases = np.exp(1j * twist.angles)[:, None, None]
    return GaugeField(field.geometry, field.group, phases * field.data)


# -- gauge transformations -----------------------------------------------------


def gauge_transform(field: GaugeField, g) -> GaugeField:
    """U'(x, y) = g_x U(x, y) g_y^{-1} with g a site -> GroupElement map."""
    geom = field.geometry
    out = field.copy()
    for edge in geom.edges():
        x = edge.base
        y = tuple(c + (1 if b == edge.axis else 0) for b, c in enumerate(x))
        gx, gy = g[x], g[y]
        out.set(edge, groups.compose(groups.compose(gx, field.get(edge)), groups.invert(gy)))
    return out


def random_gauge_map(geometry: LatticeGeometry, group: GroupId, rng) -> dict:
    return {site: groups.haar_sample(group, rng) for site in geometry.sites()}


# -- checkpoint format ---------------------------------------------------------

CHECKPOINT_VERSION = 1


def field_state(field: GaugeField) -> dict:
    """JSON-serializable field snapshot."""
    g = field.group
    state = {
        "version": CHECKPOINT_VERSION,
        "group": {"kind": g.kind, "n": g.n, "m": g.m},
        "extents": list(field.geometry.extents),
    }
    if g.kind == groups.U1:
        state["angles"] = field.data.tolist()
    elif g.kind == groups.ZM:
        state["indices"] = field.data.astype(int).tolist()
    else:
        state["matrices_re"] = field.data.real.tolist()
        state["matrices_im"] = field.data.imag.tolist()
    return state


def field_from_state(state: dict) -> GaugeField:
    if state.get("version") != CHECKPOINT_VERSION:
        raise ConfigError(f"unsupported checkpoint version {state.get('version')}")
    g = GroupId(state["group"]["kind"], n=state["group"]["n"], m=state["group"]["m"])
    geom = LatticeGeometry(state["extents"])
    if g.kind == groups.U1:
        data = np.asarray(state["angles"], dtype=float)
    elif g.kind == groups.ZM:
        data = np.asarray(state["indices"], dtype=np.int64)
    else:
        data = np.asarray(state["matrices_re"], dtype=float) + 1j * np.asarray(
            state["matrices_im"], dtype=float
        )
    if (g.kind in (groups.U1, groups.ZM) and data.shape != (geom.n_edges,)) or (
        g.kind == groups.UN and data.shape != (geom.n_edges, g.n, g.n)
    ):
        raise ConfigError("checkpoint edge data does not match geometry")
    return GaugeField(geom, g, data)


def save_field(field: GaugeField, path, rng_state: dict | None = None, extra: dict | None = None):
    state = field_state(field)
    if rng_state is not None:
        state["rng"] = rng_state
    if extra:
        state["extra"] = extra
    with open(path, "w") as f:
        json.dump(state, f)


def load_field(path):
    with open(path) as f:
        state = json.load(f)
    return field_from_state(state), state.get("rng"), state.get("extra", {})
