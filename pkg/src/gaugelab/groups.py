"""Group algebra for the supported compact groups.

Three kinds: the circle U(1), the full unitary group U(n), and the cyclic
subgroup Z_m of U(1) used as an exact-enumeration oracle.  Phases are held
as angles (Z_m as exact grid indices), so the abelian group law never
drifts off the circle; U(n) elements are dense complex matrices.

Haar sampling for U(n) uses a complex Ginibre matrix followed by QR with
the R-diagonal phase correction, which is exactly Haar.  Proposal kernels
are symmetric: q and q^{-1} are equidistributed for every width.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .rng import RngStream

TWO_PI = 2.0 * math.pi

U1 = "u1"
UN = "un"
ZM = "zm"


@dataclass(frozen=True)
class GroupId:
    """Identifies one of U(1), U(n), or the oracle group Z_m."""

    kind: str
    n: int = 1
    m: int = 0

    def __post_init__(self):
        if self.kind not in (U1, UN, ZM):
            raise ContractViolation(f"unknown group kind {self.kind!r}")
        if self.kind == UN and self.n < 1:
            raise ContractViolation("U(n) requires n >= 1")
        if self.kind in (U1, ZM) and self.n != 1:
            raise ContractViolation("phase groups have ambient dimension 1")
        if self.kind == ZM and self.m < 2:
            raise ContractViolation("Z_m requires m >= 2")

    @staticmethod
    def u1() -> "GroupId":
        return GroupId(U1)

    @staticmethod
    def unitary(n: int) -> "GroupId":
        return GroupId(UN, n=n)

    @staticmethod
    def cyclic(m: int) -> "GroupId":
        return GroupId(ZM, m=m)

    @property
    def is_phase(self) -> bool:
        return self.kind in (U1, ZM)

    def label(self) -> str:
        if self.kind == U1:
            return "u1"
        if self.kind == UN:
            return f"u{self.n}"
        return f"z{self.m}"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One group element: an angle (U(1)), a grid index (Z_m), or a matrix."""

    group: GroupId
    theta: float = 0.0            # u1 angle in [0, 2pi)
    k: int = 0                    # zm grid index in [0, m)
    mat: np.ndarray | None = None  # un matrix, shape (n, n) complex

    @property
    def angle(self) -> float:
        """Phase angle; Z_m indices map to the exact grid 2*pi*k/m."""
        if self.group.kind == ZM:
            return TWO_PI * self.k / self.group.m
        if self.group.kind == U1:
            return self.theta
        raise ContractViolation("matrix elements have no scalar angle")

    def as_complex(self) -> complex:
        return cmath.exp(1j * self.angle)


def identity(group: GroupId) -> GroupElement:
    if group.kind == UN:
        return GroupElement(group, mat=np.eye(group.n, dtype=complex))
    return GroupElement(group)


def phase_element(group: GroupId, theta: float) -> GroupElement:
    """Build a phase element; for Z_m the angle must sit on the grid."""
    if group.kind == U1:
        return GroupElement(group, theta=theta % TWO_PI)
    if group.kind == ZM:
        k = theta * group.m / TWO_PI
        ki = round(k)
        if abs(k - ki) > 1e-9:
            raise ContractViolation(f"angle {theta} is not on the Z_{group.m} grid")
        return GroupElement(group, k=ki % group.m)
    raise ContractViolation("phase_element is not defined for U(n)")


def cyclic_element(group: GroupId, k: int) -> GroupElement:
    if group.kind != ZM:
        raise ContractViolation("cyclic_element requires a Z_m group")
    return GroupElement(group, k=int(k) % group.m)


def matrix_element(group: GroupId, mat: np.ndarray) -> GroupElement:
    if group.kind != UN:
        raise ContractViolation("matrix_element requires a U(n) group")
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (group.n, group.n):
        raise ContractViolation(f"matrix shape {mat.shape} != ({group.n}, {group.n})")
    return GroupElement(group, mat=mat)


def _check_same_group(a: GroupElement, b: GroupElement) -> None:
    if a.group != b.group:
        raise ContractViolation(f"group mismatch: {a.group} vs {b.group}")


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product a*b."""
    _check_same_group(a, b)
    g = a.group
    if g.kind == U1:
        return GroupElement(g, theta=(a.theta + b.theta) % TWO_PI)
    if g.kind == ZM:
        return GroupElement(g, k=(a.k + b.k) % g.m)
    return GroupElement(g, mat=a.mat @ b.mat)


def invert(a: GroupElement) -> GroupElement:
    """Group inverse: negated angle, or conjugate transpose."""
    g = a.group
    if g.kind == U1:
        return GroupElement(g, theta=(-a.theta) % TWO_PI)
    if g.kind == ZM:
        return GroupElement(g, k=(-a.k) % g.m)
    return GroupElement(g, mat=a.mat.conj().T)


def re_trace(a: GroupElement, ambient_n: int | None = None) -> float:
    """Re Tr(a); phases count as the scalar matrix in U(ambient_n)."""
    if a.group.kind == UN:
        if ambient_n is not None and ambient_n != a.group.n:
            raise ContractViolation("ambient_n does not match matrix dimension")
        return float(np.trace(a.mat).real)
    n = 1 if ambient_n is None else ambient_n
    return n * math.cos(a.angle)


def embed_center(z: complex, n: int) -> GroupElement:
    """The scalar matrix z*I in U(n), for |z| = 1."""
    if abs(abs(z) - 1.0) > 1e-9:
        raise ContractViolation(f"|z| = {abs(z)} is not 1")
    if n < 1:
        raise ContractViolation("n must be >= 1")
    return GroupElement(GroupId.unitary(n), mat=complex(z) * np.eye(n, dtype=complex))


def unitarity_defect(a: GroupElement) -> float:
    """max |a^dag a - I|; zero for phase elements by construction."""
    if a.group.kind != UN:
        return 0.0
    n = a.group.n
    return float(np.abs(a.mat.conj().T @ a.mat - np.eye(n)).max())


# -- sampling ---------------------------------------------------------------


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Exact Haar matrix on U(n): Ginibre + QR, R-diagonal phases folded in."""
    a = rng.complex_normal((n, n))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_unitary_batch(n: int, size: int, rng: RngStream) -> np.ndarray:
    a = rng.complex_normal((size, n, n))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def haar_sample(group: GroupId, rng: RngStream) -> GroupElement:
    """One exact Haar draw from the group."""
    if group.kind == U1:
        return GroupElement(group, theta=rng.uniform(0.0, TWO_PI))
    if group.kind == ZM:
        return GroupElement(group, k=int(rng.integers(group.m)))
    return GroupElement(group, mat=haar_unitary(group.n, rng))


def hermitian_proposal(n: int, width: float, rng: RngStream) -> np.ndarray:
    """exp(i*H) with H = width*(A + A^dag)/2, A complex Ginibre."""
    a = rng.complex_normal((n, n))
    h = 0.5 * width * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def hermitian_proposal_batch(n: int, width: float, size: int, rng: RngStream) -> np.ndarray:
    a = rng.complex_normal((size, n, n))
    h = 0.5 * width * (a + np.conj(np.swapaxes(a, -1, -2)))
    w, v = np.linalg.eigh(h)
    return np.einsum("...ij,...j,...kj->...ik", v, np.exp(1j * w), v.conj())


def proposal_near_identity(group: GroupId, width: float, rng: RngStream) -> GroupElement:
    """Symmetric proposal concentrated near the identity; width -> 0 gives id."""
    if not (width >= 0.0 and math.isfinite(width)):
        raise ContractViolation(f"width {width} must be finite and >= 0")
    if group.kind == U1:
        return GroupElement(group, theta=rng.uniform(-width, width) % TWO_PI)
    if group.kind == ZM:
        theta = rng.uniform(-width, width)
        return GroupElement(group, k=round(theta * group.m / TWO_PI) % group.m)
    if width == 0.0:
        return identity(group)
    return GroupElement(group, mat=hermitian_proposal(group.n, width, rng))
