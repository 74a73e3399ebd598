"""Convergence tables for the M-shaped delta-sequence.

Prints sifting errors for several test functions, the ordered-limit plane
wave norms and the derivative gap, and writes them as CSV files.

    python scripts/run_delta_tables.py [--config configs/delta.toml] [--out out/delta_tables]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from spinorqi import delta_m as dm
from spinorqi.cli import load_config

HERE = Path(__file__).resolve().parent

TEST_FUNCTIONS = {
    "cos": (np.cos, 1.0),
    "k^2": (lambda k: k * k, 0.0),
    "|k|": (np.abs, 0.0),
    "step": (lambda k: np.where(k > 0, 1.0, 0.0), 0.5),
    "exp(k)": (np.exp, 1.0),
}


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=HERE / "configs" / "delta.toml")
    ap.add_argument("--out", default="out/delta_tables")
    args = ap.parse_args()
    p = load_config(args.config)["params"]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.mkdir(exist_ok=True)

    sched = p["sift_schedule"]
    rows = []
    print("sifting gaps")
    for name, (f, target) in TEST_FUNCTIONS.items():
        tab = dm.sifting_test(f, sched, target=target)
        order = dm.observed_order(tab)
        print(f"  {name:7s} " + "  ".join(f"{r.gap:.2e}" for r in tab) + f"   order {order:.2f}")
        rows += [[name, r.eps, r.value, r.gap] for r in tab]
    write(out / "sifting.csv", ["function", "eps", "value", "gap"], rows)

    print("plane wave overlaps")
    rows = []
    for dk in (0.0, 0.05, 0.5, 2.0):
        sched_pw = tuple(e * min(1.0, dk / 0.2) for e in p["outer"]) if dk else tuple(p["outer"])
        r = dm.plane_wave_norm(0.0, dk, sched_pw, p["inner"])
        val = r.diag if dk == 0 else r.offdiag
        rows.append([dk, val])
        print(f"  k - k' = {dk:5.2f}  <k|k'> = {val:.12f}")
    write(out / "plane_wave.csv", ["dk", "overlap"], rows)

    print("derivative gap |-(d/dx)^2 <x|k> - k^2 <x|k>|")
    rows = []
    for e in (0.2, 0.1, 0.05, 0.025):
        g = dm.derivative_gap(0.7, 1.3, e)
        rows.append([e, g])
        print(f"  eps={e:6.3f}  gap={g:.3e}")
    write(out / "derivative_gap.csv", ["eps", "gap"], rows)

    print("int delta^2 (diverges as eps -> 0)")
    rows = [[e, dm.square_integral(dm.DeltaParams.m_shaped(e))] for e in sched]
    for e, v in rows:
        print(f"  eps={e:.0e}  {v:.4e}")
    write(out / "square_divergence.csv", ["eps", "int_delta_squared"], rows)
    print(f"wrote tables to {out}")


if __name__ == "__main__":
    main()
