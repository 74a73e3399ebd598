"""Massless layer: spinor field on the light cone, Wigner phases, EPR kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GridNotClosed, HomogeneityViolated, NonTimelikeR, ZeroKernel
from .spinor_core import (
    EPS,
    as_matrix,
    contract,
    lorentz_of,
    mdot,
    spinors_from_null_batch,
    vector_to_hermitian,
)


@dataclass(frozen=True)
class NullMomentum:
    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float).reshape(4)
        if k[0] <= 0 or abs(mdot(k, k)) > 1e-10 * k[0] ** 2:
            raise ValueError(f"not a future null vector: {k}")
        object.__setattr__(self, "k", k)

    @classmethod
    def from_three(cls, kvec) -> "NullMomentum":
        kvec = np.asarray(kvec, dtype=float)
        return cls(np.concatenate([[np.linalg.norm(kvec)], kvec]))


def null_from_three(kvecs) -> np.ndarray:
    kvecs = np.asarray(kvecs, dtype=float)
    return np.concatenate([np.linalg.norm(kvecs, axis=-1)[..., None], kvecs], axis=-1)


def _kvec(k):
    return k.k if isinstance(k, NullMomentum) else np.asarray(k, dtype=float)


def pi_of_k(k) -> np.ndarray:
    """Spinor with flagpole ``k``; leading nonzero component real positive."""
    return spinors_from_null_batch(_kvec(k))


def spin_partner(pi) -> np.ndarray:
    """A spinor ``w`` with ``contract(w, pi) = 1``."""
    pi = np.asarray(pi, dtype=complex)
    n2 = np.sum(np.abs(pi) ** 2, axis=-1)
    return np.stack([pi[..., 1].conj(), -pi[..., 0].conj()], axis=-1) / n2[..., None]


def wigner_phase(L, k, partner=None) -> np.ndarray | float:
    """Angle ``Theta`` in ``L pi(M^-1 k) = exp(-i Theta) pi(k)``, in (-pi, pi]."""
    lm = as_matrix(L)
    kv = _kvec(k)
    back = kv @ np.linalg.inv(lorentz_of(lm)).T
    lpi = np.einsum("ij,...j->...i", lm, pi_of_k(back))
    w = spin_partner(pi_of_k(kv)) if partner is None else np.asarray(partner, dtype=complex)
    theta = -np.angle(contract(w, lpi))
    theta = np.where(theta <= -np.pi, theta + 2 * np.pi, theta)
    return float(theta) if np.ndim(theta) == 0 else theta


def twistor_omega(R, k, tol: float = 1e-8) -> np.ndarray:
    """Partner of ``pi(k)`` built from a unit timelike ``R``: ``omega.pi = 1``."""
    R = np.asarray(R, dtype=float)
    kv = _kvec(k)
    if R[0] <= 0 or abs(mdot(R, R) - 1.0) > tol:
        raise NonTimelikeR(f"R.R = {mdot(R, R)!r}")
    rk = mdot(R, kv)
    if rk <= tol:
        raise NonTimelikeR("R.k must be positive")
    h_low = EPS.T @ vector_to_hermitian(R) @ EPS
    w_low = h_low @ pi_of_k(kv).conj() / rk
    return EPS @ w_low


def pol_convert(a1: complex, a2: complex) -> tuple[complex, complex]:
    """Linear (1, 2) amplitudes to circular (+, -)."""
    s = 1 / np.sqrt(2)
    return s * (a1 + 1j * a2), s * (a1 - 1j * a2)


def pol_unconvert(ap: complex, am: complex) -> tuple[complex, complex]:
    s = 1 / np.sqrt(2)
    return s * (ap + am), -1j * s * (ap - am)


def rotate_linear(theta: float) -> np.ndarray:
    """Rotation of linear amplitude pairs by twice the Wigner phase."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [-s, c]])


# ------------------------------------------------------------------ grids


@dataclass(frozen=True)
class LightConeGrid:
    """Cells on the forward light cone with invariant weights."""

    momenta: np.ndarray   # (M, 4)
    weights: np.ndarray   # (M,)

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(len(k))
        object.__setattr__(self, "momenta", k)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    @classmethod
    def cube(cls, half_width: float, cells: int, centre=(0.0, 0.0, 0.0)) -> "LightConeGrid":
        """Midpoint cells of a cube; ``cells`` even keeps ``k = 0`` off-grid."""
        edges = np.linspace(-half_width, half_width, cells + 1)
        c = 0.5 * (edges[1:] + edges[:-1])
        h = edges[1] - edges[0]
        kx, ky, kz = np.meshgrid(c, c, c, indexing="ij")
        three = np.stack([kx, ky, kz], axis=-1).reshape(-1, 3) + np.asarray(centre)
        k = null_from_three(three)
        return cls(k, h**3 / ((2 * np.pi) ** 3 * 2 * k[:, 0]))

    @classmethod
    def from_three(cls, kvecs, cell_volume: float | np.ndarray = 1.0) -> "LightConeGrid":
        k = null_from_three(kvecs)
        return cls(k, np.broadcast_to(cell_volume, len(k)) / ((2 * np.pi) ** 3 * 2 * k[:, 0]))

    def transformed(self, M: np.ndarray) -> "LightConeGrid":
        return LightConeGrid(self.momenta @ M.T, self.weights)

    def index_of(self, k: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Cell index of each momentum in ``k`` or raise ``GridNotClosed``."""
        d = np.linalg.norm(self.momenta[None, :, :] - np.atleast_2d(k)[:, None, :], axis=-1)
        idx = np.argmin(d, axis=1)
        scale = max(1.0, float(np.max(np.abs(self.momenta))))
        if np.any(d[np.arange(len(idx)), idx] > tol * scale):
            raise GridNotClosed("grid is not closed under the transformation")
        return idx


# ---------------------------------------------------------------- kernels

KernelRule = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EPRKernel:
    """Two-photon amplitude ``psi(k, k')`` pairing a ``+`` and a ``-`` photon.

    Either ``rule`` (closed form, vectorised over momenta) or ``values``
    (array on the grid) defines the kernel; the rule wins when both exist.
    """

    grid: LightConeGrid
    values: np.ndarray | None = None
    rule: KernelRule | None = None
    symmetry: str = "general"
    name: str = "custom"

    def __post_init__(self):
        if self.values is None and self.rule is None:
            raise ValueError("kernel needs values or a rule")
        if self.values is None:
            k = self.grid.momenta
            vals = self.rule(k[:, None, :], k[None, :, :])
            vals = np.broadcast_to(vals, (len(k), len(k)))
        else:
            vals = self.values
        vals = np.array(vals, dtype=complex)
        if self.symmetry == "antisymmetric" and np.max(np.abs(vals + vals.T), initial=0) > 1e-12 * max(
            1.0, np.max(np.abs(vals), initial=0)
        ):
            raise ValueError("kernel tagged antisymmetric is not")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def psi(self) -> np.ndarray:
        return self.values

    def weighted_norm2(self) -> float:
        w = self.grid.weights
        return float(np.einsum("i,j,ij->", w, w, np.abs(self.values) ** 2))


def product_antisym(grid: LightConeGrid, f: Callable, g: Callable) -> EPRKernel:
    """``psi(k, k') = f(k) g(k') - f(k') g(k)`` as a closed-form kernel."""

    def rule(k, kp):
        return f(k) * g(kp) - f(kp) * g(k)

    return EPRKernel(grid, rule=rule, symmetry="antisymmetric", name="product_antisym")


def gaussian_bump(centre, width: float) -> Callable:
    c = np.asarray(centre, dtype=float)

    def f(k):
        d = np.asarray(k)[..., 1:] - c
        return np.exp(-np.sum(d * d, axis=-1) / (2 * width**2))

    return f


def same_momentum_psi2(grid: LightConeGrid, c: complex = 1.0, tol: float = 1e-12) -> EPRKernel:
    """Kernel ``c delta(k, k')`` with the delta taking the value 1 on the diagonal."""

    def rule(k, kp):
        return np.where(np.linalg.norm(k - kp, axis=-1) <= tol, c, 0.0)

    return EPRKernel(grid, rule=rule, name="same_momentum_psi2")


def scalar_F2(grid: LightConeGrid) -> EPRKernel:
    """Same-helicity amplitude ``F(z) = z^2`` with ``z = pi_A(k) pi^A(k')``."""

    def rule(k, kp):
        return contract(pi_of_k(k), pi_of_k(kp)) ** 2

    return EPRKernel(grid, rule=rule, name="scalar_F2")


def transform_kernel(ker: EPRKernel, L) -> EPRKernel:
    """Apply ``L`` to a ``(+,-)`` kernel.

    ``psi'(k, k') = psi(Mk, Mk') exp(-2i Th(Mk)) exp(2i Th(Mk'))`` with
    ``Th(q) = wigner_phase(L, q)``.
    """
    lm = as_matrix(L)
    M = lorentz_of(lm)
    k = ker.grid.momenta
    mk = k @ M.T
    th = np.asarray(wigner_phase(lm, mk))
    phase = np.exp(-2j * th)[:, None] * np.exp(2j * th)[None, :]
    if ker.rule is not None:
        base = ker.rule

        def rule(a, b):
            ma, mb = a @ M.T, b @ M.T
            ta = np.asarray(wigner_phase(lm, ma))
            tb = np.asarray(wigner_phase(lm, mb))
            return base(ma, mb) * np.exp(-2j * ta) * np.exp(2j * tb)

        return EPRKernel(ker.grid, rule=rule, symmetry="general", name=ker.name + "+L")
    idx = ker.grid.index_of(mk)
    vals = ker.values[np.ix_(idx, idx)] * phase
    return EPRKernel(ker.grid, values=vals, symmetry="general", name=ker.name + "+L")


def antisymmetry_defect(ker: EPRKernel) -> float:
    psi = ker.values
    n = np.linalg.norm(psi)
    if n == 0:
        raise ZeroKernel("kernel vanishes on the grid")
    return float(np.linalg.norm(psi + psi.T) / n)


def linear_epr_condition(
    Fplus: Callable,
    Fminus: Callable,
    theta: Callable,
    momenta: np.ndarray,
    sign: int = 1,
    tol: float = 1e-9,
) -> float:
    """Largest violation of ``F-(conj z) = sign F+(z) exp(2i(th + th'))``.

    ``z = pi_A(k) pi^A(k')`` over all distinct pairs of ``momenta``; zero means
    the pair of helicity amplitudes is also maximally entangled in linear
    polarisations.
    """
    k = np.asarray(momenta, dtype=float)
    i, j = np.triu_indices(len(k), 1)
    z = contract(pi_of_k(k[i]), pi_of_k(k[j]))
    for F in (Fplus, Fminus):
        for phi in (0.3, 1.1, 2.5):
            lhs = np.asarray(F(np.exp(1j * phi) * z))
            rhs = np.exp(2j * phi) * np.asarray(F(z))
            if np.max(np.abs(lhs - rhs), initial=0) > tol * max(1.0, np.max(np.abs(rhs), initial=0)):
                raise HomogeneityViolated(F)
    th = np.asarray(theta(k))
    gap = np.asarray(Fminus(z.conj())) - sign * np.asarray(Fplus(z)) * np.exp(2j * (th[i] + th[j]))
    return float(np.max(np.abs(gap), initial=0.0))
