"""Massive spin-1/2 machinery built on a null splitting of the momentum.

A timelike momentum ``p`` with mass ``m`` is split into two null pieces,
``p = pi pi^dagger + (m^2/2) omega omega^dagger``, with ``omega_A pi^A = 1``.
The choice of ``omega`` over the mass shell is a gauge.  Two gauges are
provided: ``helicity`` (the flagpole of ``omega`` opposes the 3-momentum)
and ``principal_null`` (``omega`` is proportional to a fixed spinor ``tau``).

The 2x2 Wigner matrix acting on amplitudes ``f(s, p)``, ``s in (+, -)``, is

    U = [[ conj(w.Lpi),  -(m/sqrt2) conj(w.Lw) ],
         [ (m/sqrt2) w.Lw,            w.Lpi    ]]

where ``w.X = omega_A(p) X^A(p)`` and ``L pi(p) = L @ pi(M^-1 p)`` etc.
Amplitudes transform as ``f'(p) = U(L, p) f(M^-1 p)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BadNormalization,
    GaugeUndefined,
    MasslessUnsupported,
    NegativeRadicand,
    NotNormalized,
    OffShell,
    ZeroSpinor,
)
from .spinor_core import (
    EPS,
    SQRT2,
    SL2C,
    as_matrix,
    contract,
    flagpole,
    lorentz_of,
    lower,
    mdot,
    outer_vector,
    spinors_from_null_batch,
    vector_to_hermitian,
)

SPIN_LABELS = ("+", "-")


@dataclass(frozen=True)
class MassiveMomentum:
    p: np.ndarray
    m: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(4)
        if self.m <= 0:
            raise OffShell("mass must be positive")
        if abs(mdot(p, p) - self.m**2) > 1e-8 * self.m**2 or p[0] <= 0:
            raise OffShell(f"p.p = {mdot(p, p)!r}, m^2 = {self.m**2!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_three(cls, pvec, m: float) -> "MassiveMomentum":
        pvec = np.asarray(pvec, dtype=float)
        return cls(np.concatenate([[np.sqrt(m * m + pvec @ pvec)], pvec]), m)


def on_shell(pvec, m: float) -> np.ndarray:
    """Four-momenta for an array of 3-momenta of shape ``(..., 3)``."""
    pvec = np.asarray(pvec, dtype=float)
    e = np.sqrt(m * m + np.sum(pvec * pvec, axis=-1))
    return np.concatenate([e[..., None], pvec], axis=-1)


@dataclass(frozen=True)
class OmegaFrame:
    omega: np.ndarray
    pi: np.ndarray
    p: MassiveMomentum

    def reconstruct(self) -> np.ndarray:
        """``pi pi^dagger + (m^2/2) omega omega^dagger`` as a four-vector."""
        return flagpole(self.pi) + 0.5 * self.p.m**2 * flagpole(self.omega)

    def residual(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.p.p)))


def omega_from_tau(tau, p: MassiveMomentum) -> np.ndarray:
    tau = np.asarray(tau, dtype=complex)
    if np.linalg.norm(tau) == 0:
        raise ZeroSpinor("tau must be nonzero")
    return tau / np.sqrt(mdot(p.p, flagpole(tau)))


def _pi_from_omega(omega, pvec):
    # pi^A = p^{AB'} conj(omega_B')
    h = vector_to_hermitian(pvec)
    return np.einsum("...ij,...j->...i", h, lower(omega).conj())


def pi_partner(omega, p: MassiveMomentum, tol: float = 1e-8) -> OmegaFrame:
    omega = np.asarray(omega, dtype=complex)
    norm = mdot(p.p, flagpole(omega))
    if abs(norm - 1.0) > tol:
        raise BadNormalization(f"p.(omega omega^dagger) = {norm!r}")
    return OmegaFrame(omega, _pi_from_omega(omega, p.p), p)


def omega_from_pi(pi, p: MassiveMomentum) -> np.ndarray:
    """Inverse map: ``p_{AC'} pi^A = (m^2/2) conj(omega_C')``."""
    h_low = EPS.T @ vector_to_hermitian(p.p) @ EPS
    omega_low_bar = (2.0 / p.m**2) * (h_low.T @ np.asarray(pi, dtype=complex))
    return EPS @ omega_low_bar.conj()


def pl_eigenvalues(t, p, clamp: float = 1e-12) -> tuple[float, float]:
    """Eigenvalues of the projection of the Pauli-Lubanski vector on ``t``."""
    pv = p.p if isinstance(p, MassiveMomentum) else np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    # (t.p)^2 - t^2 p^2 from the components of t ^ p, which avoids the
    # cancellation of the direct form when t is nearly parallel to p
    b0 = t[0] * pv[1:] - t[1:] * pv[0]
    bs = np.cross(t[1:], pv[1:])
    rad = float(b0 @ b0 - bs @ bs)
    if rad < 0:
        if rad < -clamp:
            raise NegativeRadicand(f"radicand {rad!r}")
        rad = 0.0
    half = 0.5 * np.sqrt(rad)
    return float(half), float(-half)


def gauge_shift_check(t, theta: float, p) -> float:
    pv = p.p if isinstance(p, MassiveMomentum) else np.asarray(p, dtype=float)
    a = np.array(pl_eigenvalues(t, p))
    b = np.array(pl_eigenvalues(np.asarray(t, dtype=float) + theta * pv, p))
    return float(np.max(np.abs(a - b)))


def helicity_direction(p) -> np.ndarray:
    pv = p.p if isinstance(p, MassiveMomentum) else np.asarray(p, dtype=float)
    return np.array([1.0 / np.linalg.norm(pv[1:]), 0.0, 0.0, 0.0])


# ---------------------------------------------------------------- projectors


def spin_energy_projectors(frame: OmegaFrame) -> dict[tuple[str, str], np.ndarray]:
    """Four 4x4 projectors keyed by (spin, energy sign).

    Bispinors are laid out as ``(phi_A ; chi^bar_A')`` with lower indices;
    rows carry lower indices and columns the upper ones they contract with.
    """
    m = frame.p.m
    if m <= 0:
        raise MasslessUnsupported("projectors divide by the mass")
    w, pi = frame.omega, frame.pi
    wl, pl = lower(w), lower(pi)
    wb, pb = w.conj(), pi.conj()
    wbl, pbl = wl.conj(), pl.conj()
    r = m / SQRT2
    out = {}
    for s, sg in (("+", 1.0), ("-", -1.0)):
        pos = np.block([
            [np.outer(wl, pi), -sg * r * np.outer(wl, wb)],
            [sg / r * np.outer(pbl, pi), -np.outer(pbl, wb)],
        ])
        neg = np.block([
            [-np.outer(pl, w), -sg / r * np.outer(pl, pb)],
            [sg * r * np.outer(wbl, w), np.outer(wbl, pb)],
        ])
        out[(s, "+")] = 0.5 * pos
        out[(s, "-")] = 0.5 * neg
    return out


def pl_omega_operator(frame: OmegaFrame) -> np.ndarray:
    """Pauli-Lubanski projection on ``omega omega^dagger`` acting on bispinors."""
    w, pi = frame.omega, frame.pi
    top = 0.5 * (np.outer(lower(pi), w) + np.outer(lower(w), pi))
    bot = -0.5 * (np.outer(lower(pi).conj(), w.conj()) + np.outer(lower(w).conj(), pi.conj()))
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = top
    out[2:, 2:] = bot
    return out


def basis_bispinors(frame: OmegaFrame) -> dict[tuple[str, str], np.ndarray]:
    """Eigen-bispinors of :func:`pl_omega_operator`, keyed like the projectors."""
    r = frame.p.m / SQRT2
    wl, pl = lower(frame.omega), lower(frame.pi)
    out = {}
    for s, sg in (("+", 1.0), ("-", -1.0)):
        out[(s, "+")] = np.concatenate([sg * r * wl, pl.conj()])
        out[(s, "-")] = np.concatenate([pl, -sg * r * wl.conj()])
    return out


# --------------------------------------------------------- PL in omega basis


def pl_matrix_omega(p: MassiveMomentum | np.ndarray, frame: OmegaFrame | tuple, direction) -> np.ndarray:
    """2x2 matrix of ``t.W`` on the amplitudes ``(f(+), f(-))``.

    ``direction`` is a (possibly complex) four-vector or one of the names
    ``"omega_omega"``, ``"pi_omega"``, ``"omega_pi"``, ``"pi_pi"`` standing
    for the null vectors built from the frame.  For a massless ``p`` pass a
    plain four-vector and a ``(omega, pi)`` tuple; the mass is then zero.
    """
    if isinstance(frame, OmegaFrame):
        w, pi, m = frame.omega, frame.pi, frame.p.m
    else:
        w, pi = (np.asarray(x, dtype=complex) for x in frame)
        m = p.m if isinstance(p, MassiveMomentum) else 0.0
    if isinstance(direction, str):
        named = {
            "omega_omega": (w, w),
            "pi_omega": (pi, w),
            "omega_pi": (w, pi),
            "pi_pi": (pi, pi),
        }
        t = outer_vector(*named[direction])
    else:
        t = np.asarray(direction, dtype=complex)
    x1 = flagpole(pi) - 0.5 * m * m * flagpole(w)
    x12 = -m * SQRT2 * outer_vector(pi, w)
    x21 = -m * SQRT2 * outer_vector(w, pi)
    a = mdot(t, x1)
    return 0.5 * np.array([[a, mdot(t, x12)], [mdot(t, x21), -a]])


# ---------------------------------------------------------------- gauges


@dataclass(frozen=True)
class GaugeSpec:
    kind: str = "helicity"
    tau: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ("helicity", "principal_null"):
            raise ValueError(f"unknown gauge {self.kind!r}")
        if self.kind == "principal_null":
            if self.tau is None:
                raise ValueError("principal_null gauge needs tau")
            tau = np.asarray(self.tau, dtype=complex).reshape(2)
            if np.linalg.norm(tau) == 0:
                raise ZeroSpinor("tau must be nonzero")
            object.__setattr__(self, "tau", tau)

    @classmethod
    def from_dict(cls, d: dict) -> "GaugeSpec":
        kind = d.get("type")
        if kind == "principal_null":
            r0, i0, r1, i1 = (float(x) for x in d["tau"])
            return cls("principal_null", np.array([r0 + 1j * i0, r1 + 1j * i1]))
        return cls(kind)

    def to_dict(self) -> dict:
        if self.kind == "helicity":
            return {"type": "helicity"}
        t = self.tau
        return {"type": "principal_null", "tau": [t[0].real, t[0].imag, t[1].real, t[1].imag]}

    def omega(self, pvecs: np.ndarray) -> np.ndarray:
        """Vectorised omega field on four-momenta of shape ``(..., 4)``."""
        pvecs = np.asarray(pvecs, dtype=float)
        if self.kind == "principal_null":
            tau = np.broadcast_to(self.tau, pvecs.shape[:-1] + (2,))
            norm = mdot(pvecs, flagpole(tau))
            if np.any(norm <= 0):
                raise GaugeUndefined("p.t vanishes")
            return tau / np.sqrt(norm)[..., None]
        three = pvecs[..., 1:]
        mag = np.linalg.norm(three, axis=-1)
        if np.any(mag <= 1e-14 * np.maximum(pvecs[..., 0], 1.0)):
            raise GaugeUndefined("helicity gauge undefined at zero 3-momentum")
        nvec = np.concatenate([np.ones_like(mag)[..., None], -three / mag[..., None]], axis=-1)
        tau = spinors_from_null_batch(nvec)
        return tau / np.sqrt(mdot(pvecs, nvec))[..., None]


def omega_frames(gauge: GaugeSpec, pvecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(omega, pi) arrays for a batch of four-momenta."""
    w = gauge.omega(pvecs)
    return w, _pi_from_omega(w, pvecs)


# ---------------------------------------------------------------- Wigner U


def wigner_u_batch(L, pvecs: np.ndarray, m: float, gauge: GaugeSpec) -> np.ndarray:
    """Wigner matrices, shape ``(..., 2, 2)``, at each four-momentum."""
    lm = as_matrix(L)
    minv = np.linalg.inv(lorentz_of(lm))
    pvecs = np.asarray(pvecs, dtype=float)
    back = pvecs @ minv.T
    w, _ = omega_frames(gauge, pvecs)
    wb, pib = omega_frames(gauge, back)
    lpi = np.einsum("ij,...j->...i", lm, pib)
    lw = np.einsum("ij,...j->...i", lm, wb)
    a = contract(w, lpi)
    b = contract(w, lw)
    r = m / SQRT2
    u = np.empty(pvecs.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = a.conj()
    u[..., 0, 1] = -r * b.conj()
    u[..., 1, 0] = r * b
    u[..., 1, 1] = a
    return u


def wigner_u(L, p: MassiveMomentum, gauge: GaugeSpec) -> np.ndarray:
    return wigner_u_batch(L, p.p, p.m, gauge)


def principal_null_spinors(L, tol: float = 1e-9) -> list[np.ndarray]:
    """Eigenspinors of ``L`` (one for a parabolic element, else two)."""
    m = as_matrix(L)
    if np.max(np.abs(m - m[0, 0] * np.eye(2))) <= tol and abs(m[0, 1]) <= tol and abs(m[1, 0]) <= tol:
        return [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
    vals, vecs = np.linalg.eig(m)
    out = [vecs[:, 0] / np.linalg.norm(vecs[:, 0])]
    if abs(vals[0] - vals[1]) > np.sqrt(tol):
        out.append(vecs[:, 1] / np.linalg.norm(vecs[:, 1]))
    else:
        # defective: refine the single eigenvector from the kernel of L - lambda
        lam = 0.5 * (vals[0] + vals[1])
        k = m - lam * np.eye(2)
        row = k[0] if np.linalg.norm(k[0]) >= np.linalg.norm(k[1]) else k[1]
        v = np.array([-row[1], row[0]])
        out = [v / np.linalg.norm(v)]
    return [_fix_phase(v) for v in out]


def _fix_phase(v):
    idx = 0 if abs(v[0]) > 1e-12 else 1
    return v * np.exp(-1j * np.angle(v[idx]))


# -------------------------------------------------------------- PST entropy


@dataclass(frozen=True)
class MomentumGrid:
    """Cubic grid of 3-momentum cell centres with invariant weights."""

    pvecs: np.ndarray        # (n, 4) four-momenta on the mass shell
    weights: np.ndarray      # d^3p / ((2 pi)^3 2E)
    m: float

    @classmethod
    def cube(cls, m: float, half_width: float, cells: int) -> "MomentumGrid":
        edges = np.linspace(-half_width, half_width, cells + 1)
        centres = 0.5 * (edges[1:] + edges[:-1])
        h = edges[1] - edges[0]
        px, py, pz = np.meshgrid(centres, centres, centres, indexing="ij")
        three = np.stack([px, py, pz], axis=-1).reshape(-1, 3)
        p4 = on_shell(three, m)
        w = h**3 / ((2 * np.pi) ** 3 * 2 * p4[:, 0])
        return cls(p4, w, m)


@dataclass(frozen=True)
class ProductProfile:
    """Closed-form amplitude ``f(s, p) = spin[s] * G(p)`` with Gaussian ``G``.

    ``G(p) = exp(-|p - centre|^2 / (4 width^2))`` times a constant fixed by
    on-grid normalisation.
    """

    spin: np.ndarray
    width: float = 1.0
    centre: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def spatial(self, pvecs: np.ndarray) -> np.ndarray:
        d = np.asarray(pvecs)[..., 1:] - np.asarray(self.centre)
        return np.exp(-np.sum(d * d, axis=-1) / (4 * self.width**2))

    def __call__(self, pvecs: np.ndarray) -> np.ndarray:
        s = np.asarray(self.spin, dtype=complex)
        return self.spatial(pvecs)[..., None] * s


@dataclass(frozen=True)
class MomentumSpinState:
    grid: MomentumGrid
    profile: Callable[[np.ndarray], np.ndarray]
    scale: float = 1.0

    @classmethod
    def normalized(cls, grid: MomentumGrid, profile) -> "MomentumSpinState":
        f = profile(grid.pvecs)
        norm = np.sum(grid.weights * np.sum(np.abs(f) ** 2, axis=-1))
        return cls(grid, profile, 1.0 / np.sqrt(norm))

    def amplitudes(self, pvecs=None) -> np.ndarray:
        pv = self.grid.pvecs if pvecs is None else pvecs
        return self.scale * self.profile(pv)

    def norm(self) -> float:
        f = self.amplitudes()
        return float(np.sum(self.grid.weights * np.sum(np.abs(f) ** 2, axis=-1)))


def reduced_spin_matrix(weights: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.einsum("n,ns,nt->st", weights, f, f.conj())


def von_neumann_bits(rho: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    vals = vals[vals > 0]
    return max(0.0, float(-np.sum(vals * np.log2(vals))))


def renyi_entropy(rho: np.ndarray, alpha: float) -> float:
    vals = np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0, None)
    if alpha == 1:
        return von_neumann_bits(rho)
    return float(np.log2(np.sum(vals**alpha)) / (1 - alpha))


def transformed_amplitudes(state: MomentumSpinState, L, gauge: GaugeSpec, lo: int = 0, hi: int | None = None):
    pv = state.grid.pvecs[lo:hi]
    minv = np.linalg.inv(lorentz_of(as_matrix(L)))
    u = wigner_u_batch(L, pv, state.grid.m, gauge)
    f_back = state.amplitudes(pv @ minv.T)
    return np.einsum("nij,nj->ni", u, f_back)


def pst_experiment(
    state: MomentumSpinState,
    L,
    gauge: GaugeSpec,
    threads: int = 1,
    chunk: int = 1024,
    norm_tol: float = 1e-8,
) -> tuple[float, float]:
    """Reduced-spin entropies (bits) before and after ``L``.

    The transformed state is resampled from the closed-form profile and the
    reduced matrix is trace-normalised, so only the redistribution over
    spin labels, not the quadrature drift of the weights, enters.
    """
    if abs(state.norm() - 1.0) > norm_tol:
        raise NotNormalized(f"norm {state.norm()!r}")
    w = state.grid.weights
    rho0 = reduced_spin_matrix(w, state.amplitudes())
    n = len(w)
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]

    def part(b):
        lo, hi = b
        return reduced_spin_matrix(w[lo:hi], transformed_amplitudes(state, L, gauge, lo, hi))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(part, bounds))
    else:
        parts = [part(b) for b in bounds]
    rho1 = np.zeros((2, 2), dtype=complex)
    for piece in parts:  # fixed order keeps the sum reproducible
        rho1 = rho1 + piece
    rho1 = rho1 / np.trace(rho1).real
    return von_neumann_bits(rho0), von_neumann_bits(rho1)
