#!/usr/bin/env python3
"""Solves each exported instance with cvxpy and prints the optimal objective.

    min ||W A x||_1  s.t.  ||y - Phi x||_2 <= tau,  x_min <= x <= x_max

Usage: convex_oracle.py [--export <export_instance binary>] [--check] <dir>
--export regenerates <dir> first. --check compares each optimum with the
value frozen in the test instances (meta.txt, 4th field) and exits 1 on a
relative difference above 1e-4. Exits 77 when cvxpy is not installed.
"""
import argparse
import pathlib
import subprocess
import sys

import numpy as np


def read_msmat(path):
    raw = path.read_bytes()
    nl = raw.index(b"\n")
    tag, rows, cols = raw[:nl].decode().split()
    assert tag == "msmat"
    return np.frombuffer(raw[nl + 1:], dtype="<f8").reshape(int(rows), int(cols))


def solve(d):
    import cvxpy as cp

    phi = read_msmat(d / "phi.msmat")
    wa = read_msmat(d / "prior.msmat")
    y = read_msmat(d / "y.msmat")[:, 0]
    meta = [float(v) for v in (d / "meta.txt").read_text().split()]
    tau, lo, hi, frozen = meta
    x = cp.Variable(phi.shape[1])
    prob = cp.Problem(cp.Minimize(cp.norm1(wa @ x)),
                      [cp.norm(y - phi @ x, 2) <= tau, x >= lo, x <= hi])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10,
               tol_feas=1e-10, max_iter=500)
    xv = x.value
    return float(np.abs(wa @ xv).sum()), float(np.linalg.norm(y - phi @ xv)), tau, frozen


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--export")
    ap.add_argument("--check", action="store_true")
    ap.add_argument("dir")
    args = ap.parse_args()
    try:
        import cvxpy  # noqa: F401
    except ImportError:
        print("cvxpy not installed, skipping")
        sys.exit(77)
    root = pathlib.Path(args.dir)
    if args.export:
        subprocess.run([args.export, str(root)], check=True, stdout=subprocess.DEVNULL)
    bad = 0
    for d in sorted(p for p in root.iterdir() if p.is_dir()):
        l1, resid, tau, frozen = solve(d)
        status = ""
        if args.check:
            ok = abs(frozen - l1) <= 1e-4 * abs(l1)
            status = " ok" if ok else f" MISMATCH (frozen {frozen:.12g})"
            bad |= not ok
        print(f"{d.name}: l1 = {l1:.12g}, residual {resid:.6g} <= tau {tau:.6g}{status}")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
