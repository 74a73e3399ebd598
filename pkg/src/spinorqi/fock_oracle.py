"""Brute-force reducible oscillator representation on a finite cell set.

One copy of the space is ``C^M (cells) x C^(n_max+1) (+ mode) x C^(n_max+1)
(- mode)``; ``N`` copies are tensored together.  Single-copy operators are

    a(s, i, 1) = |i><i| x a_s,   n(s, i, 1) = |i><i| x a_s^dag a_s,
    I(i, 1)    = |i><i| x 1,

and the ``N``-copy versions are ``a = N^-1/2 sum``, ``n = sum`` and
``I = N^-1 sum`` over copies.  Cells are orthonormal, so the cell kets play
the role of ``sqrt(w_i)`` times a continuum ket: the vacuum carries
amplitudes ``sqrt(w_i) O0(i)`` and a kernel ``psi(k, k')`` enters
``Psi = sum_ij psi_ij a^dag(+, i) a^dag(-, j)`` without weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import sympy

from .errors import DimensionOverflow, TruncationTooLow, ZeroNorm

MAX_DIM = 2_000_000
POLS = ("+", "-")


@dataclass(frozen=True)
class OracleConfig:
    momenta: np.ndarray            # (M, 4) cell momenta
    weights: np.ndarray            # (M,) invariant weights
    O0: np.ndarray                 # (M,) vacuum profile, sum w |O0|^2 = 1
    N: int = 2
    n_max: int = 2

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(len(k))
        o = np.asarray(self.O0, dtype=complex).reshape(len(k))
        if self.N < 1:
            raise ValueError("N >= 1")
        if self.n_max < 2:
            raise TruncationTooLow("n_max must be at least 2")
        if abs(np.sum(w * np.abs(o) ** 2) - 1.0) > 1e-9:
            raise ValueError("vacuum profile is not normalised")
        if self.dim > MAX_DIM:
            raise DimensionOverflow(f"dimension {self.dim} exceeds {MAX_DIM}")
        object.__setattr__(self, "momenta", k)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "O0", o)

    @property
    def M(self) -> int:
        return len(np.atleast_2d(self.momenta))

    @property
    def levels(self) -> int:
        return self.n_max + 1

    @property
    def copy_dim(self) -> int:
        return self.M * self.levels**2

    @property
    def dim(self) -> int:
        return self.copy_dim**self.N

    @classmethod
    def from_kernel_grid(cls, grid, O0_values, N=2, n_max=2) -> "OracleConfig":
        return cls(grid.momenta, grid.weights, O0_values, N, n_max)


@dataclass(frozen=True)
class ModeOp:
    matrix: sp.csr_matrix = field(repr=False)
    kind: str
    pol: str | None = None
    cell: int | tuple | None = None

    def __matmul__(self, other):
        if isinstance(other, ModeOp):
            return self.matrix @ other.matrix
        return self.matrix @ other

    @property
    def H(self):
        return self.matrix.conj().T


def _ladder(levels):
    return sp.diags(np.sqrt(np.arange(1, levels)), 1, shape=(levels, levels), format="csr", dtype=complex)


class Rep:
    """Operator family of the reducible representation for a config."""

    def __init__(self, cfg: OracleConfig):
        self.cfg = cfg
        lv = cfg.levels
        a = _ladder(lv)
        one = sp.identity(lv, format="csr", dtype=complex)
        self.a_mode = {"+": sp.kron(a, one, format="csr"), "-": sp.kron(one, a, format="csr")}
        self.one_levels = sp.identity(lv * lv, format="csr", dtype=complex)

    # single-copy building blocks
    def proj(self, cells) -> sp.csr_matrix:
        d = np.zeros(self.cfg.M)
        d[np.atleast_1d(np.asarray(cells, dtype=int))] = 1.0
        return sp.diags(d, format="csr", dtype=complex)

    def single(self, cells, level_op) -> sp.csr_matrix:
        return sp.kron(self.proj(cells), level_op, format="csr")

    def embed_sum(self, op1: sp.csr_matrix) -> sp.csr_matrix:
        """``sum_n 1 x ... x op1 (copy n) x ... x 1``."""
        N = self.cfg.N
        d = self.cfg.copy_dim
        total = None
        for n in range(N):
            left = sp.identity(d**n, format="csr", dtype=complex)
            right = sp.identity(d ** (N - n - 1), format="csr", dtype=complex)
            term = sp.kron(sp.kron(left, op1, format="csr"), right, format="csr")
            total = term if total is None else total + term
        return total.tocsr()

    def a(self, s: str, i: int) -> ModeOp:
        op = self.embed_sum(self.single(i, self.a_mode[s])) / np.sqrt(self.cfg.N)
        return ModeOp(op.tocsr(), "a", s, i)

    def adag(self, s: str, i: int) -> ModeOp:
        return ModeOp(self.a(s, i).H.tocsr(), "a+", s, i)

    def n(self, s: str, i) -> ModeOp:
        am = self.a_mode[s]
        return ModeOp(self.embed_sum(self.single(i, am.conj().T @ am)), "n", s, i)

    def I(self, i: int) -> ModeOp:
        return ModeOp(self.embed_sum(self.single(i, self.one_levels)) / self.cfg.N, "I", None, i)

    def total_occupation(self) -> np.ndarray:
        """Diagonal of the total photon number over all copies and modes."""
        lv = self.cfg.levels
        occ1 = np.add.outer(np.arange(lv), np.arange(lv)).ravel()
        occ = np.tile(occ1, self.cfg.M)
        total = np.zeros(1)
        for _ in range(self.cfg.N):
            total = np.add.outer(total, occ).ravel()
        return total

    # linear polarisations
    def rotated_modes(self, theta: float):
        ap, am = self.a_mode["+"], self.a_mode["-"]
        a1 = (ap + am) / np.sqrt(2)
        a2 = (ap - am) / (1j * np.sqrt(2))
        at = a1 * np.cos(theta) - a2 * np.sin(theta)
        atp = a2 * np.cos(theta) + a1 * np.sin(theta)
        return at, atp

    def v_theta(self, theta: float) -> sp.csr_matrix:
        """Single-copy level unitary rotating linear modes by ``theta``."""
        ap, am = self.a_mode["+"], self.a_mode["-"]
        a1 = (ap + am) / np.sqrt(2)
        a2 = (ap - am) / (1j * np.sqrt(2))
        gen = (a1.conj().T @ a2 - a2.conj().T @ a1).toarray()
        from scipy.linalg import expm

        return sp.csr_matrix(expm(theta * gen))

    def y_theta(self, theta: float, cells) -> ModeOp:
        at, atp = self.rotated_modes(theta)
        lvl = at.conj().T @ at - atp.conj().T @ atp
        return ModeOp(self.embed_sum(self.single(list(np.atleast_1d(cells)), lvl)), "Y", None, tuple(np.atleast_1d(cells)))

    def pl_number_operator(self) -> list[ModeOp]:
        """``W_a = sum_i (k_i)_a (n(+, i) - n(-, i))`` with lowered index."""
        k_low = self.cfg.momenta * np.array([1.0, -1.0, -1.0, -1.0])
        ap, am = self.a_mode["+"], self.a_mode["-"]
        hel = ap.conj().T @ ap - am.conj().T @ am
        out = []
        for comp in range(4):
            op1 = sp.kron(sp.diags(k_low[:, comp].astype(complex), format="csr"), hel, format="csr")
            out.append(ModeOp(self.embed_sum(op1), "W", None, comp))
        return out

    # states
    @cached_property
    def vacuum(self) -> np.ndarray:
        cfg = self.cfg
        cell = np.sqrt(cfg.weights) * cfg.O0
        lv = np.zeros(cfg.levels**2, dtype=complex)
        lv[0] = 1.0
        one = np.kron(cell, lv)
        v = np.ones(1, dtype=complex)
        for _ in range(cfg.N):
            v = np.kron(v, one)
        return v

    def apply_pair(self, psi: np.ndarray, s1: str = "+", s2: str = "-", state=None) -> np.ndarray:
        """``sum_ij psi_ij a^dag(s1, i) a^dag(s2, j)`` applied to ``state`` (default vacuum)."""
        psi = np.asarray(psi, dtype=complex)
        v0 = self.vacuum if state is None else state
        M = self.cfg.M
        out = np.zeros_like(v0)
        inner = [self.adag(s2, j).matrix @ v0 for j in range(M)]
        for i in range(M):
            acc = np.zeros_like(v0)
            for j in range(M):
                if psi[i, j] != 0:
                    acc += psi[i, j] * inner[j]
            if np.any(acc):
                out += self.adag(s1, i).matrix @ acc
        return out


def build_rep(cfg: OracleConfig) -> Rep:
    return Rep(cfg)


def vacuum(cfg: OracleConfig) -> np.ndarray:
    return Rep(cfg).vacuum


def apply_psi(psi: np.ndarray, cfg: OracleConfig, rep: Rep | None = None) -> np.ndarray:
    """``Psi(N)|0, N>`` for a ``(+, -)`` kernel given on the cells."""
    rep = rep or Rep(cfg)
    return rep.apply_pair(psi, "+", "-")


def y_theta(theta: float, region, cfg: OracleConfig, rep: Rep | None = None) -> ModeOp:
    rep = rep or Rep(cfg)
    return rep.y_theta(theta, _cells(region))


def _cells(region):
    r = np.asarray(region)
    if r.dtype == bool:
        return list(np.flatnonzero(r))
    return list(np.atleast_1d(r).astype(int))


def oracle_epr_average(alpha, beta, omega, omegap, psi: np.ndarray, cfg: OracleConfig, rep: Rep | None = None) -> float:
    """``<Psi| Y_beta(Om') Y_alpha(Om) |Psi> / <Psi|Psi>`` by direct matrix elements."""
    rep = rep or Rep(cfg)
    state = rep.apply_pair(psi, "+", "-")
    norm = np.vdot(state, state).real
    if norm <= 1e-300:
        raise ZeroNorm("Psi annihilates the vacuum")
    ya = rep.y_theta(alpha, _cells(omega)).matrix
    yb = rep.y_theta(beta, _cells(omegap)).matrix
    val = np.vdot(state, yb @ (ya @ state)) / norm
    return float(val.real)


def pl_number_operator(cfg: OracleConfig, rep: Rep | None = None) -> list[ModeOp]:
    return (rep or Rep(cfg)).pl_number_operator()


# ------------------------------------------------------------ Bell toy model


def cyclic_vacuum_demo() -> dict:
    """Bell-basis orbit of ``|Psi+>`` under two local dichotomic operators."""
    s2 = sympy.sqrt(2)
    k0 = sympy.Matrix([1, 0])
    k1 = sympy.Matrix([0, 1])

    def ket(a, b):
        return sympy.kronecker_product(a, b)

    psi_p = (ket(k0, k1) + ket(k1, k0)) / s2
    psi_m = (ket(k0, k1) - ket(k1, k0)) / s2
    phi_p = (ket(k0, k0) + ket(k1, k1)) / s2
    phi_m = (ket(k0, k0) - ket(k1, k1)) / s2
    A = sympy.Matrix([[1, 0], [0, -1]])
    B = sympy.Matrix([[0, 1], [1, 0]])
    one = sympy.eye(2)
    first = {
        "1": sympy.kronecker_product(one, one) * psi_p,
        "A": sympy.kronecker_product(A, one) * psi_p,
        "B": sympy.kronecker_product(B, one) * psi_p,
        "AB": sympy.kronecker_product(A * B, one) * psi_p,
    }
    second = {
        "1": sympy.kronecker_product(one, one) * psi_p,
        "A": sympy.kronecker_product(one, A) * psi_p,
        "B": sympy.kronecker_product(one, B) * psi_p,
        "AB": sympy.kronecker_product(one, A * B) * psi_p,
    }
    targets = {"1": psi_p, "A": psi_m, "B": phi_p, "AB": phi_m}
    exact = {k: sympy.simplify(first[k] - targets[k]) == sympy.zeros(4, 1) for k in targets}

    def same_ray(u, v):
        for sign in (1, -1):
            if sympy.simplify(u - sign * v) == sympy.zeros(4, 1):
                return True
        return False

    second_ok = {k: same_ray(second[k], targets[k]) for k in targets}
    chsh_exact = _chsh_optimal_exact(psi_p)
    chsh_num = _chsh_optimal_numeric(np.array(psi_p.evalf(), dtype=complex).ravel())
    return {
        "identities": exact,
        "second_factor_same_orbit": second_ok,
        "chsh_exact": chsh_exact,
        "chsh": chsh_num,
    }


def _chsh_optimal_exact(psi):
    s2 = sympy.sqrt(2)
    Z = sympy.Matrix([[1, 0], [0, -1]])
    X = sympy.Matrix([[0, 1], [1, 0]])
    A1, A2 = Z, X
    B1, B2 = (X - Z) / s2, (X + Z) / s2

    def E(a, b):
        return (psi.H * sympy.kronecker_product(a, b) * psi)[0, 0]

    val = E(A1, B1) - E(A1, B2) + E(A2, B1) + E(A2, B2)
    return sympy.nsimplify(sympy.simplify(val))


def _chsh_optimal_numeric(psi: np.ndarray) -> float:
    """Maximal CHSH value from the correlation matrix (two largest singular values)."""
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    T = np.array([[np.vdot(psi, np.kron(a, b) @ psi).real for b in paulis] for a in paulis])
    s = np.sort(np.linalg.svd(T, compute_uv=False))[::-1]
    return float(2 * np.sqrt(s[0] ** 2 + s[1] ** 2))
