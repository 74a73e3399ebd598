"""``spinor-qi`` command line: run experiment configs, selftest, list kinds.

Exit codes: 0 success, 1 selftest failure, 2 invalid config, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import delta_m as dm
from . import epr_engine as ee
from . import fock_oracle as fo
from . import massive_rep as mr
from . import photon_rep as ph
from . import spinor_core as sc
from .errors import ConfigInvalid, NumericalFailure
from .selftest import run_checks, summarize

PLUMBING = "plumbing"

EXPERIMENTS = {
    "pst": "reduced-spin entropy of a boosted product state, helicity vs principal-null gauge",
    "epr": "two-photon EPR averages and CHSH over detector regions",
    "chsh": "CHSH value for correlation -p cos 2(a-b) and a scan over p",
    "norms": "two-photon and same-momentum norms, closed form vs Fock oracle",
    "delta": "M-shaped delta-sequence curves, sifting and plane-wave tables",
    "wigner": "Wigner matrix residuals and photon Wigner phases",
    "demo": "cyclic-vacuum Bell toy model",
}

# allowed parameter keys and defaults for each kind
DEFAULTS = {
    "pst": {
        "mass": 1.0,
        "half_width": 4.0,
        "cells": 16,
        "width": 1.0,
        "spin": [1.0, 0.0, 1.0, 0.0],
        "axis": [1.0, 0.0, 0.0],
        "rapidity": 1.0,
        "chunk": 1024,
    },
    "epr": {
        "half_width": 2.0,
        "cells": 6,
        "bump_width": 0.4,
        "centre_a": [1.0, 0.0, 0.0],
        "centre_b": [-1.0, 0.0, 0.0],
        "vacuum_width": 2.0,
        "representation": "reducible",
        "N": 2,
        "region_a": {"centre": [1.0, 0.0, 0.0], "radius": 1.0},
        "region_b": {"centre": [-1.0, 0.0, 0.0], "radius": 1.0},
        "angles": [0.0, 0.7853981633974483, 0.39269908169872414, 1.1780972450961724],
    },
    "chsh": {
        "p": 1.0,
        "angles": [0.0, 0.7853981633974483, 0.39269908169872414, 1.1780972450961724],
        "scan_min": 0.0,
        "scan_max": 1.0,
        "scan_points": 101,
    },
    "norms": {"N": [1, 2, 3], "half_width": 2.0, "cells": 4, "vacuum_width": 1.0, "oracle_cells": 2},
    "delta": {
        "fig1_a": 1.0,
        "fig1_eps": 0.5,
        "fig2_a": 8.0,
        "fig2_eps": 0.5,
        "points": 401,
        "sift_schedule": [0.1, 0.01, 0.001, 0.0001],
        "outer": list(dm.DEFAULT_OUTER),
        "inner": list(dm.DEFAULT_INNER),
        "k": 0.0,
        "kprime": 0.5,
    },
    "wigner": {"cases": 50, "mass": 1.0, "scale": 0.5, "photon_directions": 12, "rapidity": 0.5},
    "demo": {},
}

TOP_KEYS = {"kind", "seed", "out", "tol", "params"}


def _anchor(value, anchor: str):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, np.bool_):
        value = bool(value)
    return {"value": value, "anchor": anchor}


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    return validate(raw)


def validate(raw: dict) -> dict:
    extra = set(raw) - TOP_KEYS
    if extra:
        raise ConfigInvalid(f"unknown top-level keys: {sorted(extra)}")
    kind = raw.get("kind")
    if kind not in EXPERIMENTS:
        raise ConfigInvalid(f"kind must be one of {sorted(EXPERIMENTS)}, got {kind!r}")
    params = dict(DEFAULTS[kind])
    given = raw.get("params", {})
    if not isinstance(given, dict):
        raise ConfigInvalid("params must be a table")
    extra = set(given) - set(params)
    if extra:
        raise ConfigInvalid(f"unknown {kind} parameters: {sorted(extra)}")
    for key, val in given.items():
        want = params[key]
        if isinstance(want, dict):
            if not isinstance(val, dict) or set(val) - set(want):
                raise ConfigInvalid(f"{key} must be a table with keys {sorted(want)}")
            val = {**want, **val}
        elif isinstance(want, list) and not isinstance(val, list):
            raise ConfigInvalid(f"{key} must be an array")
        elif isinstance(want, (int, float)) and not isinstance(want, bool):
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigInvalid(f"{key} must be a number")
        elif isinstance(want, str) and not isinstance(val, str):
            raise ConfigInvalid(f"{key} must be a string")
        params[key] = val
    tol = raw.get("tol", {})
    if not isinstance(tol, dict) or any(not isinstance(v, (int, float)) for v in tol.values()):
        raise ConfigInvalid("tol must be a table of numbers")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigInvalid("seed must be an integer")
    return {"kind": kind, "seed": seed, "out": raw.get("out"), "tol": tol, "params": params}


# ------------------------------------------------------------ experiments


def _spinor(vals):
    if len(vals) != 4:
        raise ConfigInvalid("spinors are given as [re0, im0, re1, im1]")
    return np.array([vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]])


def run_pst(p, seed, tol, threads):
    grid = mr.MomentumGrid.cube(p["mass"], p["half_width"], int(p["cells"]))
    s = _spinor(p["spin"])
    s = s / np.linalg.norm(s)
    state = mr.MomentumSpinState.normalized(grid, mr.ProductProfile(s, p["width"]))
    L = sc.boost(p["axis"], p["rapidity"])
    norm_tol = tol.get("norm", 1e-8)
    before, after = mr.pst_experiment(state, L, mr.GaugeSpec("helicity"), threads, int(p["chunk"]), norm_tol)
    tau = mr.principal_null_spinors(L)[0]
    _, corrected = mr.pst_experiment(state, L, mr.GaugeSpec("principal_null", tau), threads, int(p["chunk"]), norm_tol)
    return {
        "entropy_before": _anchor(before, "reduced-spin entropy, product state"),
        "entropy_after": _anchor(after, "reduced-spin entropy, helicity gauge after boost"),
        "entropy_after_corrected": _anchor(corrected, "reduced-spin entropy, principal-null gauge after boost"),
        "principal_null_spinor": _anchor([tau[0].real, tau[0].imag, tau[1].real, tau[1].imag], "eigenspinor of the boost"),
        "cells": _anchor(len(grid.weights), PLUMBING),
    }, {}


def _epr_setup(p):
    grid = ph.LightConeGrid.cube(p["half_width"], int(p["cells"]))
    f = ph.gaussian_bump(p["centre_a"], p["bump_width"])
    g = ph.gaussian_bump(p["centre_b"], p["bump_width"])
    ker = ph.product_antisym(grid, f, g)
    if p["representation"] == "irreducible":
        rep = ee.RepChoice.irreducible()
    elif p["representation"] == "reducible":
        rep = ee.RepChoice.reducible(int(p["N"]), ee.CutoffProfile.gaussian(grid, p["vacuum_width"]))
    else:
        raise ConfigInvalid("representation must be reducible or irreducible")
    ra = ee.DetectorRegion.ball(p["region_a"]["centre"], p["region_a"]["radius"])
    rb = ee.DetectorRegion.ball(p["region_b"]["centre"], p["region_b"]["radius"])
    return grid, ker, rep, ra, rb


def run_epr(p, seed, tol, threads):
    grid, ker, rep, ra, rb = _epr_setup(p)
    a1, a2, b1, b2 = p["angles"]
    prob = ee.probability_p(ra, rb, ker, rep)
    res = ee.chsh(a1, a2, b1, b2, ra, rb, ker, rep)
    table = [[x, y, ee.epr_average(x, y, ra, rb, ker, rep)] for x in (a1, a2) for y in (b1, b2)]
    return {
        "p": _anchor(prob, "detection probability in the region pair"),
        "E": _anchor(table, "linear-polarisation correlation -p cos 2(a-b)"),
        "S": _anchor(res.S, "CHSH combination of the correlations"),
        "violation": _anchor(res.S > 2.0, "CHSH bound 2"),
        "p_condition": _anchor(res.p_condition, "violation threshold p > 1/sqrt 2"),
        "cells": _anchor(len(grid), PLUMBING),
    }, {"E_table.csv": (["alpha", "beta", "E"], table)}


def run_chsh(p, seed, tol, threads):
    a1, a2, b1, b2 = p["angles"]
    s = ee.chsh_of_p(p["p"], a1, a2, b1, b2)
    ps = np.linspace(p["scan_min"], p["scan_max"], int(p["scan_points"]))
    rows = [[q, v, int(viol), int(q > 1 / np.sqrt(2))] for q, v, viol in ee.chsh_scan(ps, a1=a1, a2=a2, b1=b1, b2=b2)]
    return {
        "S": _anchor(s, "CHSH combination for correlation -p cos 2(a-b)"),
        "violation": _anchor(s > 2.0, "CHSH bound 2"),
        "tsirelson_gap": _anchor(abs(s - 2 * np.sqrt(2)) if p["p"] == 1.0 else None, "Tsirelson bound 2 sqrt 2"),
    }, {"chsh_scan.csv": (["p", "S", "violation", "p_above_threshold"], rows)}


def run_norms(p, seed, tol, threads):
    grid = ph.LightConeGrid.cube(p["half_width"], int(p["cells"]))
    O0 = ee.CutoffProfile.gaussian(grid, p["vacuum_width"])
    rng = np.random.default_rng(seed)
    m = len(grid)
    fvals = rng.normal(size=m) + 1j * rng.normal(size=m)
    gvals = rng.normal(size=m) + 1j * rng.normal(size=m)
    ker = ph.EPRKernel(grid, values=np.outer(fvals, gvals) - np.outer(gvals, fvals), symmetry="antisymmetric")
    out = {}
    rows = []
    for N in p["N"]:
        rep = ee.RepChoice.reducible(int(N), O0)
        tp = ee.two_photon_norm(ker, rep)
        p2 = ee.psi2_norm(int(N), O0)
        sn = ee.scalar_norm_example(int(N), O0)
        # oracle comparison on a small unit-weight grid
        mo = int(p["oracle_cells"])
        og = ph.LightConeGrid(ph.null_from_three(np.eye(3)[np.arange(mo) % 3] * (1 + np.arange(mo))[:, None]), np.ones(mo))
        oo = ee.CutoffProfile.uniform(og)
        cfg = fo.OracleConfig.from_kernel_grid(og, oo.values, N=int(N))
        st = fo.apply_psi(ph.same_momentum_psi2(og).values, cfg)
        oracle_p2 = float(np.vdot(st, st).real)
        closed_p2 = ee.psi2_norm(int(N), oo)
        out[f"N={N}"] = {
            "two_photon_norm": _anchor(tp, "two-photon norm (1 - 1/N) int int |psi|^2 |O0|^2 |O0'|^2"),
            "psi2_norm": _anchor(p2, "same-momentum norm 1/N^2 + (1 - 1/N) int |O0|^4"),
            "scalar_norm": _anchor(sn, "same-helicity scalar-kernel norm"),
            "psi2_oracle_small_grid": _anchor(oracle_p2, "Fock oracle norm of the same-momentum state"),
            "psi2_closed_small_grid": _anchor(closed_p2, "same-momentum norm 1/N^2 + (1 - 1/N) int |O0|^4"),
        }
        rows.append([N, tp, p2, sn, oracle_p2, closed_p2])
    return out, {"norms.csv": (["N", "two_photon", "psi2", "scalar", "psi2_oracle_small", "psi2_closed_small"], rows)}


def run_delta(p, seed, tol, threads):
    tables = {}
    for tag in ("fig1", "fig2"):
        prm = dm.DeltaParams(p[f"{tag}_a"], p[f"{tag}_eps"])
        ks, ys = dm.m_shape_curve(prm, int(p["points"]))
        tables[f"{tag}_m_shape.csv"] = (["x", "y"], np.column_stack([ks, ys]).tolist())
        xs, yh = dm.m_shape_transform_curve(prm, int(p["points"]))
        tables[f"{tag}_transform.csv"] = (["x", "y"], np.column_stack([xs, yh]).tolist())
    step = dm.sifting_test(lambda k: np.where(k > 0, 1.0, 0.0), p["sift_schedule"], target=0.5)
    quad = dm.sifting_test(lambda k: k * k, p["sift_schedule"], target=0.0)
    tables["sifting.csv"] = (
        ["eps", "step_value", "step_gap", "k2_value", "k2_gap"],
        [[a.eps, a.value, a.gap, b.value, b.gap] for a, b in zip(step, quad)],
    )
    pw = dm.plane_wave_norm(p["k"], p["kprime"], p["outer"], p["inner"])
    tables["plane_wave.csv"] = (["eps_outer", "eps_inner", "offdiag"], [list(r) for r in pw.offdiag_table])
    sq = [[e, dm.square_integral(dm.DeltaParams.m_shaped(e))] for e in p["sift_schedule"]]
    tables["square_divergence.csv"] = (["eps", "int_delta_squared"], sq)
    prm1 = dm.DeltaParams(p["fig1_a"], p["fig1_eps"])
    return {
        "integral": _anchor(dm.delta_integral(prm1), "unit integral of the delta-sequence"),
        "value_at_zero": _anchor(dm.delta_eval(0.0, prm1), "regular value a at the origin"),
        "step_sift_finest": _anchor(step[-1].value, "half-sum of one-sided limits"),
        "k2_order": _anchor(dm.observed_order(quad), "sifting convergence order"),
        "plane_wave_diag": _anchor(pw.diag, "ordered-limit norm <k|k> = 2 pi delta*(0)"),
        "plane_wave_offdiag": _anchor(pw.offdiag, "ordered-limit overlap <k|k'>"),
    }, tables


def run_wigner(p, seed, tol, threads):
    rng = np.random.default_rng(seed)
    g = mr.GaugeSpec("helicity")
    uni = coc = 0.0
    for _ in range(int(p["cases"])):
        pm = mr.MassiveMomentum.from_three(rng.normal(size=3), p["mass"])
        a, b = sc.random_sl2c(rng, p["scale"]), sc.random_sl2c(rng, p["scale"])
        u = mr.wigner_u(a, pm, g)
        uni = max(uni, float(np.max(np.abs(u @ u.conj().T - np.eye(2)))), abs(np.linalg.det(u) - 1))
        back = np.linalg.inv(sc.lorentz_of(a)) @ pm.p
        coc = max(coc, float(np.max(np.abs(mr.wigner_u(a @ b, pm, g) - u @ mr.wigner_u_batch(b, back, pm.m, g)))))
    L = sc.boost([1, 0, 0], p["rapidity"])
    n = int(p["photon_directions"])
    ang = 2 * np.pi * np.arange(n) / n
    kv = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(n)])
    th = np.atleast_1d(ph.wigner_phase(L, ph.null_from_three(kv)))
    rows = [[a, t] for a, t in zip(ang, th)]
    return {
        "unitarity_residual": _anchor(uni, "Wigner matrix unitary with det 1"),
        "cocycle_residual": _anchor(coc, "Wigner matrix cocycle"),
        "cases": _anchor(int(p["cases"]), PLUMBING),
    }, {"photon_phases.csv": (["azimuth", "theta"], rows)}


def run_demo(p, seed, tol, threads):
    d = fo.cyclic_vacuum_demo()
    return {
        "identities": _anchor({k: bool(v) for k, v in d["identities"].items()}, "cyclic-vacuum annihilation identities"),
        "second_factor_same_orbit": _anchor(
            {k: bool(v) for k, v in d["second_factor_same_orbit"].items()}, "second factor stays on the vacuum orbit"
        ),
        "chsh_exact": _anchor(str(d["chsh_exact"]), "CHSH on the Bell state, exact"),
        "chsh": _anchor(d["chsh"], "CHSH on the Bell state"),
    }, {}


RUNNERS = {
    "pst": run_pst,
    "epr": run_epr,
    "chsh": run_chsh,
    "norms": run_norms,
    "delta": run_delta,
    "wigner": run_wigner,
    "demo": run_demo,
}


def _finite(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        raise NumericalFailure(f"non-finite value {obj!r} in report")
    if isinstance(obj, dict):
        for v in obj.values():
            _finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _finite(v)


def write_outputs(out: Path, kind: str, report: dict, tables: dict) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / f"{kind}.json"]
    with open(paths[0], "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    for name, (header, rows) in sorted(tables.items()):
        path = out / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
        paths.append(path)
    return paths


def run(config_path, out=None, tol=None, seed=None, threads=1) -> int:
    cfg = load_config(config_path)
    if seed is not None:
        cfg["seed"] = seed
    tols = dict(cfg["tol"])
    if tol is not None:
        tols["norm"] = tol
    out_dir = Path(out or cfg["out"] or "out")
    report, tables = RUNNERS[cfg["kind"]](cfg["params"], cfg["seed"], tols, max(1, int(threads)))
    report["config"] = _anchor({"kind": cfg["kind"], "seed": cfg["seed"], "params": cfg["params"]}, PLUMBING)
    _finite(report)
    for path in write_outputs(out_dir, cfg["kind"], report, tables):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinor-qi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config (TOML)")
    r.add_argument("config")
    s = sub.add_parser("selftest", help="run the invariant suite")
    sub.add_parser("list-experiments", help="list experiment kinds")
    for p in (r, s):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-experiments":
        for k, v in EXPERIMENTS.items():
            print(f"{k:8s} {v}")
        return 0
    if args.command == "selftest":
        lines, status = summarize(run_checks(seed=args.seed or 0, tol=args.tol))
        print("\n".join(lines))
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "selftest.txt").write_text("\n".join(lines) + "\n")
        return status
    try:
        return run(args.config, args.out, args.tol, args.seed, args.threads)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
