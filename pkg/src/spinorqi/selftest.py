"""Invariant suite run by ``spinor-qi selftest``.

Each check returns a nonnegative residual that is compared with its
tolerance.  ``known_conflict`` marks a check whose reference formula is
known to disagree with the oracle; it is reported but does not change the
exit status.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import delta_m as dm
from . import epr_engine as ee
from . import fock_oracle as fo
from . import massive_rep as mr
from . import photon_rep as ph
from . import spinor_core as sc


@dataclass(frozen=True)
class Check:
    module: str
    invariant: str
    fn: Callable[[np.random.Generator], float]
    tol: float
    known_conflict: bool = False


@dataclass(frozen=True)
class CheckResult:
    module: str
    invariant: str
    residual: float
    tol: float
    passed: bool
    known_conflict: bool
    seconds: float


# ----------------------------------------------------------- spinor_core


def _metric_preserved(rng):
    worst = 0.0
    for _ in range(50):
        lam = sc.lorentz_of(sc.random_sl2c(rng))
        worst = max(worst, np.max(np.abs(lam.T @ sc.ETA @ lam - sc.ETA)))
    return worst


def _homomorphism(rng):
    worst = 0.0
    for _ in range(50):
        a, b = sc.random_sl2c(rng), sc.random_sl2c(rng)
        worst = max(worst, np.max(np.abs(sc.lorentz_of(a @ b) - sc.lorentz_of(a) @ sc.lorentz_of(b))))
    return worst


def _double_cover(rng):
    L = sc.random_sl2c(rng)
    return float(np.max(np.abs(sc.lorentz_of(-L) - sc.lorentz_of(L))))


def _flagpole_roundtrip(rng):
    u = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
    back = sc.flagpole(sc.spinors_from_null_batch(sc.flagpole(u)))
    return float(np.max(np.abs(back - sc.flagpole(u))))


def _tetrad_metrics(rng):
    worst = 0.0
    for _ in range(20):
        f = sc.random_frame(rng)
        nt, mt = sc.tetrads_from_frame(f)
        g1, g2, g3 = sc.metric_from_epsilons(f), sc.metric_from_minkowski(mt), sc.metric_from_null(nt)
        worst = max(worst, np.max(np.abs(g1 - sc.ETA)), np.max(np.abs(g2 - sc.ETA)), np.max(np.abs(g3 - sc.ETA)))
    return worst


def _clifford(rng):
    return max(sc.clifford_check(rng.normal(size=4), rng.normal(size=4)) for _ in range(50))


# ----------------------------------------------------------- massive_rep


def _random_p(rng, m=1.0):
    return mr.MassiveMomentum.from_three(rng.normal(size=3), m)


def _pl_helicity(rng):
    worst = 0.0
    for _ in range(20):
        p = _random_p(rng)
        hi, lo = mr.pl_eigenvalues(mr.helicity_direction(p), p)
        worst = max(worst, abs(hi - 0.5), abs(lo + 0.5))
    return worst


def _pl_parallel(rng):
    p = _random_p(rng)
    return max(abs(x) for x in mr.pl_eigenvalues(p.p * 1.7, p))


def _pl_gauge_shift(rng):
    p = _random_p(rng)
    t = rng.normal(size=4)
    return max(mr.gauge_shift_check(t, th, p) / max(1.0, th * th) for th in np.linspace(-10, 10, 21))


def _wigner_unitary(rng):
    g = mr.GaugeSpec("helicity")
    worst = 0.0
    for _ in range(20):
        p = _random_p(rng)
        u = mr.wigner_u(sc.random_sl2c(rng, 0.5), p, g)
        worst = max(worst, np.max(np.abs(u @ u.conj().T - np.eye(2))), abs(np.linalg.det(u) - 1))
    return worst


def _wigner_cocycle(rng):
    g = mr.GaugeSpec("helicity")
    worst = 0.0
    for _ in range(20):
        p = _random_p(rng)
        a, b = sc.random_sl2c(rng, 0.5), sc.random_sl2c(rng, 0.5)
        back = np.linalg.inv(sc.lorentz_of(a)) @ p.p
        lhs = mr.wigner_u(a @ b, p, g)
        rhs = mr.wigner_u(a, p, g) @ mr.wigner_u_batch(b, back, p.m, g)
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    return worst


def _pst_setup(cells=8):
    grid = mr.MomentumGrid.cube(1.0, 4.0, cells)
    prof = mr.ProductProfile(np.array([1, 1]) / np.sqrt(2), 1.0)
    return mr.MomentumSpinState.normalized(grid, prof), sc.boost([1, 0, 0], 1.0)


def _pst_principal_null(rng):
    state, L = _pst_setup()
    tau = mr.principal_null_spinors(L)[0]
    before, after = mr.pst_experiment(state, L, mr.GaugeSpec("principal_null", tau))
    return abs(after - before)


def _pst_helicity_growth(rng):
    # residual is how far the entropy gain falls short of 0.01 bits
    state, L = _pst_setup()
    before, after = mr.pst_experiment(state, L, mr.GaugeSpec("helicity"))
    return max(0.0, 0.01 - (after - before))


# ------------------------------------------------------------ photon_rep


def _phase_cocycle(rng):
    worst = 0.0
    for _ in range(20):
        a, b = sc.random_sl2c(rng, 0.5), sc.random_sl2c(rng, 0.5)
        k = ph.null_from_three(rng.normal(size=3))
        back = np.linalg.inv(sc.lorentz_of(a)) @ k
        d = ph.wigner_phase(a @ b, k) - ph.wigner_phase(a, k) - ph.wigner_phase(b, back)
        worst = max(worst, abs(np.angle(np.exp(1j * d))))
    return worst


def _axis_kernel_covariance(rng):
    kz = np.array([[0, 0, z] for z in (0.5, 1.0, 1.5, 2.0)])
    grid = ph.LightConeGrid.from_three(kz)
    f, g = ph.gaussian_bump([0, 0, 0.8], 0.5), ph.gaussian_bump([0, 0, 1.6], 0.5)
    ker = ph.product_antisym(grid, f, g)
    return ph.antisymmetry_defect(ph.transform_kernel(ker, sc.boost([0, 0, 1], 0.5) @ sc.rotation([0, 0, 1], 0.7)))


# ------------------------------------------------------ epr + oracle


def _small_scenario(rng, M=3, N=2):
    kv = rng.normal(size=(M, 3))
    grid = ph.LightConeGrid.from_three(kv, rng.uniform(0.5, 2.0, M) * (2 * np.pi) ** 3)
    O0 = ee.CutoffProfile.from_rule(grid, lambda k: 1.0 + rng.uniform(0, 1, len(k)))
    a = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    ker = ph.EPRKernel(grid, values=a - a.T, symmetry="antisymmetric")
    cfg = fo.OracleConfig.from_kernel_grid(grid, O0.values, N=N)
    return grid, O0, ker, cfg


def _epr_vs_oracle(rng):
    worst = 0.0
    for _ in range(3):
        grid, O0, ker, cfg = _small_scenario(rng)
        rep = fo.build_rep(cfg)
        om = rng.uniform(size=len(grid)) < 0.5
        omp = rng.uniform(size=len(grid)) < 0.5
        al, be = rng.uniform(0, np.pi, 2)
        ref = ee.epr_average(al, be, om, omp, ker, ee.RepChoice.reducible(cfg.N, O0))
        got = fo.oracle_epr_average(al, be, om, omp, ker.values, cfg, rep)
        worst = max(worst, abs(ref - got))
    return worst


def _norm_vs_oracle(rng):
    grid, O0, ker, cfg = _small_scenario(rng)
    state = fo.apply_psi(ker.values, cfg)
    return abs(np.vdot(state, state).real - ee.two_photon_norm(ker, ee.RepChoice.reducible(cfg.N, O0)))


def _psi2_vs_oracle(rng):
    worst = 0.0
    for N in (1, 2, 3):
        grid = ph.LightConeGrid(ph.null_from_three([[0, 0, 1.0], [0, 1.0, 0]]), np.ones(2))
        O0 = ee.CutoffProfile.uniform(grid)
        cfg = fo.OracleConfig.from_kernel_grid(grid, O0.values, N=N)
        psi = ph.same_momentum_psi2(grid).values
        state = fo.apply_psi(psi, cfg)
        worst = max(worst, abs(np.vdot(state, state).real - ee.psi2_norm(N, O0)))
    return worst


def _tsirelson(rng):
    return abs(ee.chsh_of_p(1.0) - 2 * np.sqrt(2))


def _cyclic_vacuum(rng):
    d = fo.cyclic_vacuum_demo()
    ok = all(d["identities"].values()) and all(d["second_factor_same_orbit"].values())
    return (0.0 if ok else 1.0) + abs(d["chsh"] - 2 * np.sqrt(2))


# --------------------------------------------------------------- delta_m


def _delta_integral(rng):
    return max(abs(dm.delta_integral(dm.DeltaParams(a, e)) - 1) for a, e in rng.uniform(0.1, 5, (20, 2)))


def _delta_origin(rng):
    return max(abs(dm.delta_eval(0.0, dm.DeltaParams(a, e)) - a) for a, e in rng.uniform(0.1, 5, (20, 2)))


def _delta_fourier(rng):
    prm = dm.DeltaParams(1.0, 0.5)
    xs = np.concatenate([[0.0, 1e-6], rng.uniform(-40, 40, 8)])
    return float(np.max(np.abs(dm.delta_hat(xs, prm) - dm.fourier_numeric(xs, prm))))


def _delta_symmetry(rng):
    n, m = dm.DeltaParams(1.0, 0.5), dm.DeltaParams(3.0, 0.2)
    ks = rng.uniform(-0.4, 0.4, 20)
    return float(np.max(np.abs(dm.delta_convolve(ks, n, m) - dm.delta_convolve(ks, m, n))))


def _plane_wave_diag(rng):
    return abs(dm.plane_wave_norm(0.0, 0.5).diag - 1.0)


def _step_sift(rng):
    return dm.sifting_test(lambda k: np.where(k > 0, 1.0, 0.0), [1e-4], target=0.5)[0].gap


CHECKS = [
    Check("spinor_core", "lorentz_of preserves the metric", _metric_preserved, 1e-10),
    Check("spinor_core", "lorentz_of is a homomorphism", _homomorphism, 1e-10),
    Check("spinor_core", "L and -L give the same Lorentz matrix", _double_cover, 1e-10),
    Check("spinor_core", "flagpole round trip", _flagpole_roundtrip, 1e-12),
    Check("spinor_core", "tetrad metric identities", _tetrad_metrics, 1e-12),
    Check("spinor_core", "Clifford relation", _clifford, 1e-12),
    Check("massive_rep", "helicity eigenvalues are +-1/2", _pl_helicity, 1e-12),
    Check("massive_rep", "t parallel to p gives zero", _pl_parallel, 1e-12),
    Check("massive_rep", "gauge shift t -> t + theta p", _pl_gauge_shift, 1e-9),
    Check("massive_rep", "Wigner matrix unitary with det 1", _wigner_unitary, 1e-10),
    Check("massive_rep", "Wigner matrix cocycle", _wigner_cocycle, 1e-9),
    Check("massive_rep", "helicity gauge entropy gain above 0.01 bits", _pst_helicity_growth, 1e-12),
    Check("massive_rep", "principal-null gauge keeps entropy", _pst_principal_null, 1e-10),
    Check("photon_rep", "Wigner phase cocycle", _phase_cocycle, 1e-9),
    Check("photon_rep", "on-axis kernel stays antisymmetric", _axis_kernel_covariance, 1e-12),
    Check("epr_engine", "closed-form average equals Fock oracle", _epr_vs_oracle, 1e-9),
    Check("epr_engine", "two-photon norm equals Fock oracle", _norm_vs_oracle, 1e-9),
    Check("epr_engine", "same-momentum norm formula equals Fock oracle", _psi2_vs_oracle, 1e-9, known_conflict=True),
    Check("epr_engine", "CHSH at p = 1 reaches 2 sqrt 2", _tsirelson, 1e-9),
    Check("fock_oracle", "cyclic-vacuum identities and CHSH", _cyclic_vacuum, 1e-12),
    Check("delta_m", "unit integral", _delta_integral, 1e-12),
    Check("delta_m", "value a at the origin", _delta_origin, 0.0),
    Check("delta_m", "Fourier transform equals quadrature", _delta_fourier, 1e-8),
    Check("delta_m", "convolution symmetric in widths", _delta_symmetry, 1e-10),
    Check("delta_m", "ordered-limit diagonal equals 1", _plane_wave_diag, 1e-6),
    Check("delta_m", "step function sifts to 1/2", _step_sift, 1e-3),
]


def run_checks(seed: int = 0, tol: float | None = None, checks=None) -> list[CheckResult]:
    """Run every check with its own seeded generator; ``tol`` overrides all tolerances."""
    out = []
    for i, c in enumerate(checks or CHECKS):
        rng = np.random.default_rng([seed, i])
        t0 = time.perf_counter()
        r = float(c.fn(rng))
        limit = c.tol if tol is None else tol
        out.append(CheckResult(c.module, c.invariant, r, limit, bool(r <= limit), c.known_conflict, time.perf_counter() - t0))
    return out


def summarize(results: list[CheckResult]) -> tuple[list[str], int]:
    """Report lines and the exit status (1 when an unflagged check fails)."""
    lines = []
    bad = 0
    for r in results:
        if r.passed:
            tag = "PASS"
        elif r.known_conflict:
            tag = "KNOWN-CONFLICT"
        else:
            tag = "FAIL"
            bad += 1
        lines.append(f"{tag:15s} {r.module}: {r.invariant}  residual={r.residual:.3e} tol={r.tol:.1e}")
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} passed, {bad} unexpected failures")
    return lines, (1 if bad else 0)
