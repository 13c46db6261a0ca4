"""Mean-field error table on the two-site lattice for several N and both phase signs."""

import argparse

import numpy as np

from tracer_hartree.fock import mean_field_witness, meanfield_errors
from tracer_hartree.grid import Grid
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=float, nargs="*", default=[1, 2, 4, 8])
    ap.add_argument("--times", type=float, nargs="*", default=[0.2, 0.5])
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()
    grid = Grid.lattice(2, 2 * np.pi)
    pot = make_potentials(grid, gaussian_well(1.0, 1.0), gaussian(1.0, 1.0), args.lam)
    phi0 = np.array([1.0, 0.6], dtype=complex)
    phi0 /= np.sqrt(np.sum(np.abs(phi0) ** 2) * grid.spacing[0])
    wit = mean_field_witness(phi0, 0.0, pot, max(args.times), args.dt)
    prev = None
    print(f"{'N':>5} " + " ".join(f"{'t=' + str(t):>12} {'ratio':>7} {'literal':>10}" for t in args.times))
    for N in args.N:
        cor = meanfield_errors(N, args.times, wit)
        lit = meanfield_errors(N, args.times, wit, phase="literal")
        cells = []
        for i, (c, l) in enumerate(zip(cor, lit)):
            ratio = c.error / prev[i] if prev else float("nan")
            cells.append(f"{c.error:12.5e} {ratio:7.3f} {l.error:10.3e}")
        print(f"{N:5g} " + " ".join(cells))
        prev = [c.error for c in cor]


if __name__ == "__main__":
    main()
