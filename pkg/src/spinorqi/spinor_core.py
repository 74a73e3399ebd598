"""Two-spinor algebra in a fixed basis.

Conventions used throughout the package:

* a spinor is a complex array of shape ``(..., 2)`` holding upper-index
  components ``u^A``; SL(2,C) acts as ``u -> L @ u``;
* a four-vector is a real array of shape ``(..., 4)`` in the order
  ``(t, x, y, z)`` with signature ``(+, -, -, -)``;
* ``EPS`` is the antisymmetric form with ``EPS[0, 1] = 1``; lowering is
  ``u_B = u^A EPS[A, B]``.

The vector/matrix dictionary is ``H(v) = (v0 I + v1 sx - v2 sy + v3 sz)/sqrt2``,
the sign of the ``sy`` term being the one for which
``H(flagpole(u)) = u u^dagger`` and hence flagpoles transform as vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFrame, NotNull, NotUnimodular, PastPointing, ZeroVector

SQRT2 = np.sqrt(2.0)
EPS = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
ETA = np.diag([1.0, -1.0, -1.0, -1.0])

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

# generators in the vector/matrix dictionary above: (sx, -sy, sz)
_SIGMA_BAR = np.stack([SIGMA_X, -SIGMA_Y, SIGMA_Z])
# H(v) = sum_a v^a BASIS[a]
BASIS = np.stack([ID2, SIGMA_X, -SIGMA_Y, SIGMA_Z]) / SQRT2


def spinor(c0: complex, c1: complex) -> np.ndarray:
    return np.array([c0, c1], dtype=complex)


def four_vector(t: float, x: float, y: float, z: float) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def mdot(a, b):
    """Minkowski product with signature (+,-,-,-); broadcasts, bilinear."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]


def lower_vector(v):
    return np.asarray(v) * np.array([1.0, -1.0, -1.0, -1.0])


def lower(u):
    """Lower a spinor index: returns ``(-u1, u0)``."""
    u = np.asarray(u, dtype=complex)
    return np.stack([-u[..., 1], u[..., 0]], axis=-1)


def raise_index(u_low):
    u_low = np.asarray(u_low, dtype=complex)
    return np.stack([u_low[..., 1], -u_low[..., 0]], axis=-1)


def contract(a, b):
    """Invariant skew product ``a0 b1 - a1 b0``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def flagpole(k) -> np.ndarray:
    """Null future-pointing vector of a spinor (vectorised over leading axes)."""
    k = np.asarray(k, dtype=complex)
    xi, eta = k[..., 0], k[..., 1]
    xx = (xi * xi.conj()).real
    ee = (eta * eta.conj()).real
    xe = xi * eta.conj()
    return np.stack([xx + ee, 2.0 * xe.real, 2.0 * xe.imag, xx - ee], axis=-1) / SQRT2


def vector_to_hermitian(v) -> np.ndarray:
    v = np.asarray(v)
    return np.einsum("...a,aij->...ij", v, BASIS)


def matrix_to_vector(h) -> np.ndarray:
    """Inverse of :func:`vector_to_hermitian` for any 2x2 matrix.

    Hermitian input gives a real vector; a general matrix gives a complex one.
    """
    h = np.asarray(h, dtype=complex)
    h00, h01, h10, h11 = h[..., 0, 0], h[..., 0, 1], h[..., 1, 0], h[..., 1, 1]
    return np.stack([h00 + h11, h01 + h10, (h01 - h10) / 1j, h00 - h11], axis=-1) / SQRT2


def hermitian_to_vector(h) -> np.ndarray:
    return matrix_to_vector(h).real


def outer_vector(a, b) -> np.ndarray:
    """Complex four-vector of the rank-one matrix ``a b^dagger``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return matrix_to_vector(a[..., :, None] * b[..., None, :].conj())


@dataclass(frozen=True)
class SL2C:
    """Unimodular 2x2 complex matrix.

    Determinants within 1e-6 of one are rescaled back onto the group;
    anything further away is rejected.
    """

    m: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.m, dtype=complex).reshape(2, 2)
        det = np.linalg.det(m)
        gap = abs(det - 1.0)
        if gap > 1e-6 or not np.isfinite(gap):
            raise NotUnimodular(f"|det - 1| = {gap:.3e}")
        if gap > 1e-12:
            m = m / np.sqrt(det)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __matmul__(self, other):
        if isinstance(other, SL2C):
            return SL2C(self.m @ other.m)
        return self.m @ np.asarray(other, dtype=complex)

    def __neg__(self):
        return SL2C(-self.m)

    def inv(self) -> "SL2C":
        a, b = self.m[0]
        c, d = self.m[1]
        return SL2C(np.array([[d, -b], [-c, a]]))

    def act(self, u) -> np.ndarray:
        """Apply to spinors of shape ``(..., 2)``."""
        return np.einsum("ij,...j->...i", self.m, np.asarray(u, dtype=complex))

    @property
    def lorentz(self) -> np.ndarray:
        return lorentz_of(self)


def as_matrix(L) -> np.ndarray:
    return L.m if isinstance(L, SL2C) else np.asarray(L, dtype=complex)


def identity() -> SL2C:
    return SL2C(np.eye(2))


def rotation(axis, angle: float) -> SL2C:
    """Right-handed rotation by ``angle`` about the unit 3-vector ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    gen = np.einsum("a,aij->ij", n, _SIGMA_BAR)
    return SL2C(np.cos(angle / 2) * ID2 + 1j * np.sin(angle / 2) * gen)


def boost(axis, rapidity: float) -> SL2C:
    """Pure boost with the given rapidity along the unit 3-vector ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    gen = np.einsum("a,aij->ij", n, _SIGMA_BAR)
    return SL2C(np.cosh(rapidity / 2) * ID2 + np.sinh(rapidity / 2) * gen)


def random_sl2c(rng: np.random.Generator, scale: float = 1.0) -> SL2C:
    """Random element: rotation times boost with rapidity up to ``scale``."""
    ax1 = rng.normal(size=3)
    ax2 = rng.normal(size=3)
    return rotation(ax1, rng.uniform(0, 2 * np.pi)) @ boost(ax2, rng.uniform(0, scale))


def lorentz_of(L) -> np.ndarray:
    """Real 4x4 matrix ``M`` with ``H(M v) = L H(v) L^dagger``."""
    m = as_matrix(L)
    images = np.einsum("ij,ajk,lk->ail", m, BASIS, m.conj())
    return hermitian_to_vector(images).T


def spinor_from_flagpole(v, phase: float = 0.0, tol: float = 1e-10) -> np.ndarray:
    """Spinor whose flagpole is ``v``; the first nonzero entry has argument ``phase``."""
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    if scale == 0.0:
        raise ZeroVector("zero vector has no spinor")
    if abs(mdot(v, v)) > tol * scale * scale:
        raise NotNull(f"v.v = {mdot(v, v):.3e}")
    if v[0] < 0:
        raise PastPointing("time component is negative")
    return _spinor_from_null(v, phase, tol * scale)


def _spinor_from_null(v, phase, tiny):
    # |xi|^2 = (t+z)/sqrt2, |eta|^2 = (t-z)/sqrt2, xi conj(eta) = (x + i y)/sqrt2.
    # The larger of the two moduli is taken directly, the smaller from |x + i y|,
    # which avoids the cancellation in t - |z| near the poles.
    t, x, y, z = np.moveaxis(np.asarray(v, dtype=float), -1, 0)
    plus = np.clip((t + z) / SQRT2, 0.0, None)
    minus = np.clip((t - z) / SQRT2, 0.0, None)
    cross = np.hypot(x, y) / SQRT2
    big = np.sqrt(np.maximum(plus, minus))
    safe_big = np.where(big > tiny, big, 1.0)
    small = np.where(big > tiny, cross / safe_big, 0.0)
    top = plus >= minus
    mod_xi = np.where(top, big, small)
    mod_eta = np.where(top, small, big)
    rel = np.exp(-1j * np.arctan2(y, x))
    rot = np.exp(1j * phase)
    # the first nonzero entry carries the requested phase
    eta_rot = np.where(mod_xi > 0, rel * rot, rot)
    return np.stack([mod_xi * rot, mod_eta * eta_rot], axis=-1)


def spinors_from_null_batch(v, phase: float = 0.0) -> np.ndarray:
    """Vectorised :func:`spinor_from_flagpole` without validation."""
    v = np.asarray(v, dtype=float)
    return _spinor_from_null(v, phase, 1e-14 * np.max(np.abs(v[..., 0])))


@dataclass(frozen=True)
class SpinFrame:
    o: np.ndarray
    i: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        o = np.asarray(self.o, dtype=complex).reshape(2)
        i = np.asarray(self.i, dtype=complex).reshape(2)
        if abs(contract(o, i) - 1.0) > self.tol:
            raise InvalidFrame(f"o_A i^A = {contract(o, i)}")
        object.__setattr__(self, "o", o)
        object.__setattr__(self, "i", i)

    def shifted(self, lam: complex) -> "SpinFrame":
        return SpinFrame(self.o + lam * self.i, self.i, self.tol)

    def transformed(self, L) -> "SpinFrame":
        m = as_matrix(L)
        return SpinFrame(m @ self.o, m @ self.i, self.tol)


def standard_frame() -> SpinFrame:
    return SpinFrame(spinor(1, 0), spinor(0, 1))


def random_frame(rng: np.random.Generator) -> SpinFrame:
    o = rng.normal(size=2) + 1j * rng.normal(size=2)
    i = rng.normal(size=2) + 1j * rng.normal(size=2)
    c = contract(o, i)
    return SpinFrame(o, i / c)


@dataclass(frozen=True)
class NullTetrad:
    l: np.ndarray
    n: np.ndarray
    m: np.ndarray  # complex; conj gives m-bar


@dataclass(frozen=True)
class MinkowskiTetrad:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def as_rows(self) -> np.ndarray:
        return np.stack([self.t, self.x, self.y, self.z])


def tetrads_from_frame(f: SpinFrame) -> tuple[NullTetrad, MinkowskiTetrad]:
    if not isinstance(f, SpinFrame):
        raise InvalidFrame("expected a SpinFrame")
    l = flagpole(f.o)
    n = flagpole(f.i)
    m = outer_vector(f.o, f.i)
    null = NullTetrad(l, n, m)
    mink = MinkowskiTetrad(
        t=(l + n) / SQRT2,
        x=((m + m.conj()) / SQRT2).real,
        y=(1j * (m - m.conj()) / SQRT2).real,
        z=(l - n) / SQRT2,
    )
    return null, mink


def metric_from_epsilons(f: SpinFrame) -> np.ndarray:
    """Metric ``g_ab`` assembled from the frame-built ``eps_AB eps_A'B'``."""
    ol, il = lower(f.o), lower(f.i)
    eps_ab = np.outer(ol, il) - np.outer(il, ol)
    # lower-vector-index symbols with upper spinor indices: v_a = sym[a]_{AA'} v^{AA'}
    sym = np.stack([ID2, SIGMA_X, SIGMA_Y, SIGMA_Z]) / SQRT2
    sym = sym * np.array([1, 1, -1, 1])[:, None, None]
    return np.einsum("aAX,bBY,AB,XY->ab", sym, sym, eps_ab, eps_ab.conj()).real


def metric_from_minkowski(tet: MinkowskiTetrad) -> np.ndarray:
    t, x, y, z = (lower_vector(v) for v in (tet.t, tet.x, tet.y, tet.z))
    return np.outer(t, t) - np.outer(x, x) - np.outer(y, y) - np.outer(z, z)


def metric_from_null(tet: NullTetrad) -> np.ndarray:
    l, n, m = (lower_vector(v) for v in (tet.l, tet.n, tet.m))
    g = np.outer(n, l) + np.outer(l, n) - np.outer(m.conj(), m) - np.outer(m, m.conj())
    return g.real


def epsilon_from_frame(f: SpinFrame) -> np.ndarray:
    """``o_A i_B - i_A o_B`` as a matrix; equals ``EPS`` for a valid frame."""
    ol, il = lower(f.o), lower(f.i)
    return np.outer(ol, il) - np.outer(il, ol)


def gamma(q) -> np.ndarray:
    """4x4 Dirac map built from the vector/matrix dictionary in chiral blocks."""
    q = np.asarray(q, dtype=float)
    upper = vector_to_hermitian(q)          # q^{AA'}
    lower_blk = EPS.T @ upper @ EPS          # q_{AA'}
    g = np.zeros((4, 4), dtype=complex)
    g[:2, 2:] = SQRT2 * upper
    g[2:, :2] = SQRT2 * lower_blk.T
    return g


def clifford_check(q, r) -> float:
    """Sup-norm residual of ``{gamma(q), gamma(r)} - 2 (q.r) 1``."""
    gq, gr = gamma(q), gamma(r)
    anti = gq @ gr + gr @ gq
    return float(np.max(np.abs(anti - 2.0 * mdot(q, r) * np.eye(4))))
