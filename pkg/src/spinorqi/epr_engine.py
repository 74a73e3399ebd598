"""Closed-form EPR predictions for two-photon kernels on a light-cone grid.

All integrals are midpoint sums with the invariant cell weights of the grid.
In the reducible representation every momentum integral carries the cutoff
``chi(k) = |O0(k)|^2 / max|O0|^2``; the irreducible one has ``chi = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ZeroDenominator
from .photon_rep import EPRKernel, LightConeGrid
from .spinor_core import mdot


@dataclass(frozen=True)
class CutoffProfile:
    """Vacuum profile ``O0`` sampled on the grid, normalised by quadrature."""

    grid: LightConeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(len(self.grid))
        object.__setattr__(self, "values", v)

    @classmethod
    def from_rule(cls, grid: LightConeGrid, rule: Callable) -> "CutoffProfile":
        v = np.asarray(rule(grid.momenta), dtype=complex)
        norm = np.sum(grid.weights * np.abs(v) ** 2)
        return cls(grid, v / np.sqrt(norm))

    @classmethod
    def gaussian(cls, grid: LightConeGrid, width: float) -> "CutoffProfile":
        return cls.from_rule(grid, lambda k: np.exp(-np.sum(k[:, 1:] ** 2, axis=-1) / (4 * width**2)))

    @classmethod
    def uniform(cls, grid: LightConeGrid) -> "CutoffProfile":
        return cls.from_rule(grid, lambda k: np.ones(len(k)))

    @property
    def chi(self) -> np.ndarray:
        a = np.abs(self.values) ** 2
        return a / a.max()

    def norm(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 2))

    def quartic(self) -> float:
        """Quadrature of ``|O0|^4``."""
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 4))


@dataclass(frozen=True)
class DetectorRegion:
    predicate: Callable[[np.ndarray], np.ndarray]
    label: str = "region"

    def mask(self, grid: LightConeGrid) -> np.ndarray:
        return np.asarray(self.predicate(grid.momenta), dtype=bool).reshape(len(grid))

    @classmethod
    def everything(cls) -> "DetectorRegion":
        return cls(lambda k: np.ones(len(k), dtype=bool), "all")

    @classmethod
    def ball(cls, centre, radius: float) -> "DetectorRegion":
        c = np.asarray(centre, dtype=float)
        return cls(lambda k: np.linalg.norm(k[:, 1:] - c, axis=-1) <= radius, f"ball{tuple(c)},{radius}")

    @classmethod
    def halfspace(cls, normal, offset: float = 0.0) -> "DetectorRegion":
        n = np.asarray(normal, dtype=float)
        return cls(lambda k: k[:, 1:] @ n > offset, f"half{tuple(n)},{offset}")

    @classmethod
    def cells(cls, indices) -> "DetectorRegion":
        idx = np.asarray(list(indices), dtype=int)

        def pred(k):
            m = np.zeros(len(k), dtype=bool)
            m[idx] = True
            return m

        return cls(pred, f"cells{tuple(idx.tolist())}")


@dataclass(frozen=True)
class RepChoice:
    kind: str                       # "reducible" or "irreducible"
    N: int | None = None
    O0: CutoffProfile | None = None

    def __post_init__(self):
        if self.kind == "reducible":
            if self.N is None or self.N < 1 or self.O0 is None:
                raise ValueError("reducible representation needs N >= 1 and O0")
        elif self.kind != "irreducible":
            raise ValueError(f"unknown representation {self.kind!r}")

    @classmethod
    def reducible(cls, N: int, O0: CutoffProfile) -> "RepChoice":
        return cls("reducible", N, O0)

    @classmethod
    def irreducible(cls) -> "RepChoice":
        return cls("irreducible")

    def chi(self, grid: LightConeGrid) -> np.ndarray:
        if self.kind == "irreducible":
            return np.ones(len(grid))
        return self.O0.chi


def _as_mask(region, grid):
    if isinstance(region, DetectorRegion):
        return region.mask(grid)
    return np.asarray(region, dtype=bool)


def _density(ker: EPRKernel, rep: RepChoice) -> np.ndarray:
    g = ker.grid
    wc = g.weights * rep.chi(g)
    return np.abs(ker.values) ** 2 * wc[:, None] * wc[None, :]


def _pair_mass(dens, a, b):
    return float(dens[np.ix_(a, b)].sum())


def probability_p(omega, omegap, ker: EPRKernel, rep: RepChoice) -> float:
    """``2 int_Om int_Om' |psi|^2 chi chi' / int int |psi|^2 chi chi'``."""
    dens = _density(ker, rep)
    total = float(dens.sum())
    if total <= 0:
        raise ZeroDenominator("kernel has no weight under the cutoff")
    a = _as_mask(omega, ker.grid)
    b = _as_mask(omegap, ker.grid)
    return 2.0 * _pair_mass(dens, a, b) / total


def epr_average(alpha: float, beta: float, omega, omegap, ker: EPRKernel, rep: RepChoice) -> float:
    """Average of the product of linear-polarisation yes-no observables.

    Regions may overlap; with ``O = Om & Om'`` the result is
    ``-cos 2(a-b) (p[Om1 x Om1'] + p[Om1 x O] + p[O x Om1'] - p[O x (R3 - O)])``.
    """
    g = ker.grid
    a = _as_mask(omega, g)
    b = _as_mask(omegap, g)
    o = a & b
    a1, b1 = a & ~o, b & ~o
    dens = _density(ker, rep)
    total = float(dens.sum())
    if total <= 0:
        raise ZeroDenominator("kernel has no weight under the cutoff")

    def p(x, y):
        return 2.0 * _pair_mass(dens, x, y) / total

    bracket = p(a1, b1) + p(a1, o) + p(o, b1) - p(o, ~o)
    return -np.cos(2 * (alpha - beta)) * bracket


def epr_average_sharp(alpha: float, beta: float, omega, omegap, ker: EPRKernel, rep: RepChoice) -> float:
    """Same average from the point-detector formula summed over the regions.

    The diagonal delta becomes a Kronecker delta on the grid, giving an
    independent route to :func:`epr_average`.
    """
    g = ker.grid
    a = _as_mask(omega, g)
    b = _as_mask(omegap, g)
    dens = _density(ker, rep)
    total = float(dens.sum())
    if total <= 0:
        raise ZeroDenominator("kernel has no weight under the cutoff")
    diag = dens.sum(axis=1)
    val = float(np.sum(diag[a & b])) - float(dens[np.ix_(a, b)].sum())
    return 2.0 * np.cos(2 * (alpha - beta)) * val / total


CHSH_SIGNS = ((1, 1, 1, -1), (1, 1, -1, 1), (1, -1, 1, 1), (-1, 1, 1, 1))


def chsh_from_correlation(E: Callable[[float, float], float], a1, a2, b1, b2) -> float:
    """Largest ``|+-E11 +-E12 +-E21 +-E22|`` with exactly one minus sign."""
    terms = np.array([E(a1, b1), E(a1, b2), E(a2, b1), E(a2, b2)])
    return float(max(abs(np.dot(s, terms)) for s in CHSH_SIGNS))


@dataclass(frozen=True)
class CHSHResult:
    S: float
    violation: bool
    p_effective: float
    p_condition: bool   # p > 1/sqrt2


def chsh(a1, a2, b1, b2, omega, omegap, ker: EPRKernel, rep: RepChoice) -> CHSHResult:
    def E(x, y):
        return epr_average(x, y, omega, omegap, ker, rep)

    s = chsh_from_correlation(E, a1, a2, b1, b2)
    peff = abs(E(0.0, 0.0))
    return CHSHResult(s, s > 2.0, peff, peff > 1 / np.sqrt(2))


def chsh_of_p(p: float, a1=0.0, a2=np.pi / 4, b1=np.pi / 8, b2=3 * np.pi / 8) -> float:
    """CHSH value for the correlation ``-p cos 2(a - b)``."""
    return chsh_from_correlation(lambda x, y: -p * np.cos(2 * (x - y)), a1, a2, b1, b2)


def chsh_scan(ps, **angles) -> list[tuple[float, float, bool]]:
    rows = []
    for p in ps:
        s = chsh_of_p(p, **angles)
        rows.append((float(p), s, s > 2.0))
    return rows


def _o0_weights(ker: EPRKernel, O0: CutoffProfile) -> np.ndarray:
    return ker.grid.weights * np.abs(O0.values) ** 2


def two_photon_norm(ker: EPRKernel, rep: RepChoice) -> float:
    """``(1 - 1/N) int int |psi|^2 |O0|^2 |O0'|^2``."""
    if rep.kind != "reducible":
        raise ValueError("norm formula needs a reducible representation")
    wo = _o0_weights(ker, rep.O0)
    return (1.0 - 1.0 / rep.N) * float(np.einsum("i,j,ij->", wo, wo, np.abs(ker.values) ** 2))


def psi2_norm(N: int, O0: CutoffProfile) -> float:
    """Closed form ``1/N^2 + (1 - 1/N) int |O0|^4`` for the same-momentum kernel."""
    if N < 1:
        raise ValueError("N >= 1")
    return 1.0 / N**2 + (1.0 - 1.0 / N) * O0.quartic()


def scalar_norm_example(N: int, O0: CutoffProfile) -> float:
    """``2 (1 - 1/N) int int (k.k')^2 |O0|^2 |O0'|^2`` over the grid."""
    if N < 1:
        raise ValueError("N >= 1")
    k = O0.grid.momenta
    kk = mdot(k[:, None, :], k[None, :, :])
    wo = O0.grid.weights * np.abs(O0.values) ** 2
    return 2.0 * (1.0 - 1.0 / N) * float(np.einsum("i,j,ij->", wo, wo, kk**2))


def p_with_error(omega, omegap, ker_factory: Callable[[int], EPRKernel], rep_factory, cells: int) -> tuple[float, float]:
    """``p`` at ``cells`` and ``2 cells`` per axis; returns (fine value, |difference|)."""
    ker1 = ker_factory(cells)
    ker2 = ker_factory(2 * cells)
    p1 = probability_p(omega, omegap, ker1, rep_factory(ker1.grid))
    p2 = probability_p(omega, omegap, ker2, rep_factory(ker2.grid))
    return p2, abs(p2 - p1)
