"""Compare scaled density excess (n - 1)/eps with the KdV soliton.

Writes one CSV per (sigma, eps) with columns xi, scaled_excess, n_kdv and
prints the max discrepancy.  Usage: python3 scripts/kdv_overlay.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from ionsoliton import ModelParams, solve_wave
from ionsoliton.analysis import profile_discrepancy
from ionsoliton.cli import atomic_write, fmt_float
from ionsoliton.kdv import KdvReference, n_kdv


def main(outdir="kdv_overlay_out", sigmas=(0.0, 2.0), epsilons=(0.1, 0.01), xi_window=10.0):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for sigma in sigmas:
        for eps in epsilons:
            wave = solve_wave(ModelParams(sigma, 1.0, eps))
            keep = np.abs(wave.xi) <= xi_window
            xi = wave.xi[keep]
            scaled = wave.excess[keep] / eps
            ref = n_kdv(KdvReference.from_params(wave.params), xi)
            rows = ["xi,scaled_excess,n_kdv"]
            rows += [",".join(fmt_float(v) for v in r) for r in zip(xi, scaled, ref)]
            path = out / f"overlay_sigma{sigma:g}_eps{eps:g}.csv"
            atomic_write(str(path), "\n".join(rows) + "\n")
            print(f"sigma={sigma:g} eps={eps:g} max|(n-1)/eps - n_KdV|={profile_discrepancy(wave):.4e} -> {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
