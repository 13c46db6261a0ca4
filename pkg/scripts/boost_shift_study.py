"""Tabulate the chemical-potential shift of boost(Q_0, k) against k.

Prints the measured mu_k - mu_0, the k^2/4 target, -k^2/8, the stationary
residual at mu_0 + k^2/4 and at the measured mu_k, and the energy gap.
"""

import argparse

import numpy as np

from tracer_hartree.functionals import chemical_potential, energy_E0, energy_Ek, stationary_residual_k
from tracer_hartree.grid import Grid
from tracer_hartree.ground_state import boost, minimize_Q0
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--k", type=float, nargs="*", default=[0.25, 0.5, 1.0, 1.5, 2.0])
    args = ap.parse_args()
    g = Grid(args.dim, args.n, 8 * np.pi)
    pot = make_potentials(g, gaussian_well(3.0, 1.5), gaussian(1.0, 1.0), 0.5)
    q0 = minimize_Q0(pot)
    print(f"mu_0 = {q0.mu:.12f}, residual {q0.residual:.2e}")
    print(f"{'k':>6} {'dmu':>14} {'k^2/4':>10} {'-k^2/8':>10} {'res@k^2/4':>11} {'res@meas':>10} {'E gap':>10}")
    for k in args.k:
        kv = [k] + [0.0] * (args.dim - 1)
        Qk = boost(q0.Q, kv)
        mu_k = chemical_potential(Qk, pot, kv)
        r_target = stationary_residual_k(Qk, q0.mu + k * k / 4, kv, pot)
        r_meas = stationary_residual_k(Qk, mu_k, kv, pot)
        gap = energy_Ek(Qk, kv, pot) - k * k / 4 - energy_E0(q0.Q, pot)
        print(f"{k:6.3f} {mu_k - q0.mu:14.10f} {k * k / 4:10.6f} {-k * k / 8:10.6f} "
              f"{r_target:11.3e} {r_meas:10.2e} {gap:10.2e}")


if __name__ == "__main__":
    main()
