"""Sjoqvist metric and Omega of the displaced thermal oscillator against coth(beta*omega/2).

Usage: python3 scripts/coherent_benchmark.py --betas 0.5 1 2 5 --ncut 60 80
"""

import argparse
import time

import numpy as np

from qgt import ModelConfig, bosonic_coherent_family, sjoqvist_qgt
from qgt.errors import TruncationTooSmall


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--betas", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0, 50.0])
    p.add_argument("--ncut", type=int, nargs="+", default=[40, 60, 80])
    p.add_argument("--z", type=float, nargs=2, default=[0.3, 0.4], help="displacement x y")
    args = p.parse_args(argv)

    print(f"{'beta':>6} {'ncut':>5} {'g_xx':>12} {'coth':>12} {'rel err':>9} {'Omega_xy':>10} {'time s':>7}")
    for beta in args.betas:
        exact = 1.0 / np.tanh(beta / 2)
        for n_cut in args.ncut:
            t0 = time.perf_counter()
            try:
                q = sjoqvist_qgt(bosonic_coherent_family(ModelConfig(beta=beta, n_cut=n_cut)), args.z)
            except TruncationTooSmall as exc:
                print(f"{beta:6g} {n_cut:5d}  truncation too small: {exc}")
                continue
            g = q.g[0, 0]
            print(f"{beta:6g} {n_cut:5d} {g:12.8f} {exact:12.8f} {abs(g / exact - 1):9.2e} {q.omega[0, 1]:10.6f} "
                  f"{time.perf_counter() - t0:7.3f}")


if __name__ == "__main__":
    main()
