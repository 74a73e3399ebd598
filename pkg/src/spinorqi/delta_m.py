"""Delta-sequences with a finite value at the origin.

``delta(k; a, eps)`` is piecewise linear on ``[-eps/2, eps/2]``, has unit
integral and takes the value ``a`` at ``k = 0``; its peaks sit at
``|k| = eps/4`` with height ``2/eps - a/2``.  With ``a = 1/(2 pi)`` the
sequence ``eps -> 0`` keeps the value at zero fixed while still sifting;
``a = 4/eps`` gives the ordinary triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .errors import NonpositiveDensity

A_M = 1.0 / (2.0 * np.pi)


@dataclass(frozen=True)
class DeltaParams:
    a: float
    eps: float

    def __post_init__(self):
        if self.a <= 0 or self.eps <= 0:
            raise ValueError("a and eps must be positive")

    @classmethod
    def m_shaped(cls, eps: float) -> "DeltaParams":
        return cls(A_M, eps)

    @classmethod
    def triangle(cls, eps: float) -> "DeltaParams":
        return cls(4.0 / eps, eps)

    @property
    def peak(self) -> float:
        return 2.0 / self.eps - 0.5 * self.a

    def knots(self) -> np.ndarray:
        e = self.eps
        return np.array([-e / 2, -e / 4, 0.0, e / 4, e / 2])

    def knot_values(self) -> np.ndarray:
        return np.array([0.0, self.peak, self.a, self.peak, 0.0])


def delta_eval(k, prm: DeltaParams):
    k = np.asarray(k, dtype=float)
    e, a = prm.eps, prm.a
    h = 2.0 / e - a / 2.0
    s = 4.0 * k / e
    out = np.zeros_like(k)
    out = np.where((k >= -e / 2) & (k < -e / 4), (s + 2.0) * h, out)
    out = np.where((k >= -e / 4) & (k < 0), -s * (2.0 / e - 1.5 * a) + a, out)
    out = np.where((k >= 0) & (k < e / 4), s * (2.0 / e - 1.5 * a) + a, out)
    out = np.where((k >= e / 4) & (k < e / 2), (2.0 - s) * h, out)
    return float(out) if out.ndim == 0 else out


def delta_integral(prm: DeltaParams) -> float:
    """Exact integral from the trapezoids between knots."""
    x, y = prm.knots(), prm.knot_values()
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def delta_hat(x, prm: DeltaParams):
    """``(1/2pi) int delta(k) exp(ikx) dk`` in closed form."""
    x = np.asarray(x, dtype=float)
    e, a = prm.eps, prm.a
    u = e * x
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    # sin^2(u/8)/u^2 and its series 1/64 - u^2/12288 + ...
    s_closed = np.sin(us / 8) ** 2 / us**2
    s_series = _sin2_over_u2_series(u)
    s = np.where(small, s_series, s_closed)
    out = (8.0 / np.pi) * (e * a + (4.0 - e * a) * np.cos(u / 4)) * s
    return float(out) if out.ndim == 0 else out


def _sin2_over_u2_series(u, terms: int = 6):
    # sin^2(u/8)/u^2 = (1 - cos(u/4)) / (2u^2) = sum_{n>=1} (-1)^(n+1) u^(2n-2) / (2 4^(2n) (2n)!)
    u2 = np.asarray(u, dtype=float) ** 2
    total = np.zeros_like(u2)
    for n in range(1, terms + 1):
        c = (-1) ** (n + 1) / (2.0 * 4.0 ** (2 * n) * math.factorial(2 * n))
        total = total + c * u2 ** (n - 1)
    return total


def fourier_numeric(x, prm: DeltaParams) -> np.ndarray:
    """Quadrature Fourier transform of :func:`delta_eval` (test oracle)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    kn = prm.knots()
    out = []
    for xv in x:
        tot = 0.0
        for lo, hi in zip(kn[:-1], kn[1:]):
            val, _ = integrate.quad(lambda k: delta_eval(k, prm) * np.cos(k * xv), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
            tot += val
        out.append(tot / (2 * np.pi))
    return np.array(out)


# ------------------------------------------------------------- convolution


def _pieces(prm: DeltaParams):
    """Linear pieces ``(lo, hi, y_lo, slope)`` with value ``y_lo + slope (k - lo)``."""
    x, y = prm.knots(), prm.knot_values()
    return [(x[i], x[i + 1], y[i], (y[i + 1] - y[i]) / (x[i + 1] - x[i])) for i in range(4)]


def delta_convolve(k, n: DeltaParams, m: DeltaParams):
    """``int delta_n(k - q) delta_m(q) dq`` by exact piecewise integration.

    On each overlap the integrand is a product of two linear pieces, so
    Simpson's rule is exact; pieces are evaluated from their own left knot
    to keep narrow, tall shapes well conditioned.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    total = np.zeros_like(k)
    for lo1, hi1, y1, s1 in _pieces(n):
        for lo2, hi2, y2, s2 in _pieces(m):
            lo = np.maximum(lo2, k - hi1)
            hi = np.minimum(hi2, k - lo1)
            ok = hi > lo

            def f(q):
                return (y1 + s1 * (k - q - lo1)) * (y2 + s2 * (q - lo2))

            mid = 0.5 * (lo + hi)
            total = total + np.where(ok, (hi - lo) / 6 * (f(lo) + 4 * f(mid) + f(hi)), 0.0)
    return float(total[0]) if total.size == 1 else total


def convolve_numeric(k: float, f: Callable, g: Callable, support: tuple[float, float], points=None) -> float:
    """Adaptive quadrature of ``int f(k - q) g(q) dq`` over ``support`` (test oracle)."""
    val, _ = integrate.quad(lambda q: f(k - q) * g(q), *support, points=points, limit=400, epsabs=1e-13, epsrel=1e-12)
    return val


def square_integral(prm: DeltaParams) -> float:
    """``int delta^2``; unbounded as ``eps -> 0`` at fixed ``a``."""
    return delta_convolve(0.0, prm, prm)


# ---------------------------------------------------------------- sifting


@dataclass(frozen=True)
class SiftRow:
    eps: float
    value: float
    gap: float


def sift(f: Callable, prm: DeltaParams, centre: float = 0.0) -> float:
    kn = prm.knots() + centre
    tot = 0.0
    for lo, hi in zip(kn[:-1], kn[1:]):
        val, _ = integrate.quad(lambda k: f(k) * delta_eval(k - centre, prm), lo, hi, epsabs=1e-15, epsrel=1e-12, limit=200)
        tot += val
    return tot


def sifting_test(f: Callable, schedule: Iterable[float], a: float = A_M, target: float | None = None) -> list[SiftRow]:
    """Sifting integrals over a schedule of widths.

    ``target`` defaults to the half-sum of the one-sided limits at 0,
    estimated by evaluating ``f`` just left and right of the origin.
    """
    if target is None:
        tiny = 1e-13
        target = 0.5 * (f(-tiny) + f(tiny))
    rows = []
    for e in schedule:
        v = sift(f, DeltaParams(a, e))
        rows.append(SiftRow(e, v, abs(v - target)))
    return rows


def observed_order(rows: Sequence[SiftRow]) -> float:
    """Least-squares slope of log(gap) vs log(eps) over rows with nonzero gap."""
    r = [(x.eps, x.gap) for x in rows if x.gap > 0]
    if len(r) < 2:
        return float("inf")
    e, g = np.log(np.array(r)).T
    return float(np.polyfit(e, g, 1)[0])


# ------------------------------------------------------------ measure delta


@dataclass(frozen=True)
class MeasureRule:
    rho: Callable[[float], float]


def measure_delta(p, pprime, prm: DeltaParams, mu: MeasureRule):
    """``rho(p')^-1 delta(p - p'; a rho(p), eps)``; equals ``a`` on the diagonal."""
    rp = mu.rho(p)
    rq = mu.rho(pprime)
    if np.any(np.asarray(rp) <= 0) or np.any(np.asarray(rq) <= 0):
        raise NonpositiveDensity("density must be positive")
    return delta_eval(np.asarray(p) - np.asarray(pprime), DeltaParams(prm.a * float(rp), prm.eps)) / rq


def measure_sift(f: Callable, p: float, prm: DeltaParams, mu: MeasureRule) -> float:
    """``int dmu(p') delta_mu(p, p') f(p')`` by quadrature."""
    lo, hi = p - prm.eps / 2, p + prm.eps / 2
    pts = [p - prm.eps / 4, p, p + prm.eps / 4]
    val, _ = integrate.quad(
        lambda q: mu.rho(q) * measure_delta(p, q, prm, mu) * f(q), lo, hi, points=pts, limit=200, epsabs=1e-14, epsrel=1e-12
    )
    return val


# ----------------------------------------------------------- ordered limits


def extrapolate_zero(h: Sequence[float], v: Sequence[float], points: int = 3) -> float:
    """Value at ``h = 0`` of the polynomial through the last ``points`` samples.

    Exact when ``v`` is a polynomial in ``h`` of degree below ``points``; the
    inner limit of a delta-sequence overlap is quadratic in the inner width.
    """
    h = np.asarray(h[-points:], dtype=float)
    v = np.asarray(v[-points:], dtype=float)
    total = 0.0
    for i in range(len(h)):
        others = np.delete(h, i)
        total += v[i] * np.prod(others / (others - h[i]))
    return float(total)


def ordered_limit(fn: Callable[[float, float], float], outer: Sequence[float], inner: Sequence[float]) -> tuple[float, list[float]]:
    """``lim_outer lim_inner fn(outer, inner)`` with polynomial extrapolation at both levels.

    ``inner`` widths are scaled by each outer width so the inner limit is
    always taken at widths much smaller than the outer one.
    """
    per_outer = []
    for eo in outer:
        ws = [eo * r for r in inner]
        per_outer.append(extrapolate_zero(ws, [fn(eo, w) for w in ws]))
    return extrapolate_zero(list(outer), per_outer), per_outer


@dataclass(frozen=True)
class PlaneWaveNorm:
    offdiag: float
    diag: float
    diag_per_outer: list[float]
    offdiag_table: list[tuple[float, float, float]]


DEFAULT_OUTER = (1e-1, 5e-2, 2.5e-2, 1.25e-2)
DEFAULT_INNER = (1e-1, 5e-2, 2.5e-2, 1.25e-2)


def plane_wave_norm(k: float, kprime: float, outer: Sequence[float] = DEFAULT_OUTER, inner: Sequence[float] = DEFAULT_INNER) -> PlaneWaveNorm:
    """``<k|k'> = 2 pi delta*(k - k')`` under ordered limits (inner first).

    The off-diagonal estimate is only meaningful once the outer widths are
    below ``2 |k - k'|``; coarser schedules extrapolate from overlapping
    supports and return garbage.
    """

    def val(dk):
        return lambda en, em: 2 * np.pi * delta_convolve(dk, DeltaParams.m_shaped(en), DeltaParams.m_shaped(em))

    diag, per = ordered_limit(val(0.0), outer, inner)
    off, _ = ordered_limit(val(k - kprime), outer, inner)
    table = [(en, en * inner[-1], val(k - kprime)(en, en * inner[-1])) for en in outer]
    return PlaneWaveNorm(off, diag, per, table)


def plane_wave(x, k: float, eps: float):
    """``<x|k, eps> = 2 pi delta_hat(x) exp(ikx)`` for the M-shaped sequence."""
    return 2 * np.pi * delta_hat(x, DeltaParams.m_shaped(eps)) * np.exp(1j * k * np.asarray(x))


def derivative_gap(x: float, k: float, eps: float, h: float = 1e-3) -> float:
    """``|(1/i d/dx)^2 <x|k,eps> - k^2 e^{ikx}|`` via a 5-point stencil."""
    xs = x + h * np.arange(-2, 3)
    f = plane_wave(xs, k, eps)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return float(abs(-d2 - k * k * np.exp(1j * k * x)))


def m_shape_curve(prm: DeltaParams, n: int = 401):
    ks = np.linspace(-0.75 * prm.eps, 0.75 * prm.eps, n)
    return ks, delta_eval(ks, prm)


def m_shape_transform_curve(prm: DeltaParams, n: int = 401, span: float | None = None):
    span = span if span is not None else 16 * np.pi / prm.eps
    xs = np.linspace(-span, span, n)
    return xs, delta_hat(xs, prm)
