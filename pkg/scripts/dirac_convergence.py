"""Mesh-refinement study for the periodic first-order system.

The closed-form spectrum is pi*n*(-1 +/- sqrt(5)); the P1/P0 pair resolves it
at second order.
"""

import argparse
import math

from spectra.galerkin import build_example_dirac
from spectra.oracle import dirac_exact
from spectra.solver import locate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--meshes", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--interval", type=float, nargs=2, default=[1.0, 12.0])
    args = ap.parse_args()
    a, b = args.interval
    exact = dirac_exact((a, b))
    print("closed-form eigenvalues:", "  ".join(f"{t:.6f}" for t in exact))

    errs = {}
    for N in sorted(args.meshes):
        hits = locate(build_example_dirac(N), a, b)
        if len(hits) != len(exact):
            raise SystemExit(f"N={N}: {len(hits)} eigenvalues found, expected {len(exact)}")
        errs[N] = [abs(h.lam - t) / abs(t) for h, t in zip(hits, exact)]
        print(f"N={N:<5d} " + "  ".join(f"{e:.3e}" for e in errs[N]))

    meshes = sorted(args.meshes)
    for N, M in zip(meshes, meshes[1:]):
        orders = [
            math.log(ec / ef) / math.log(M / N) for ec, ef in zip(errs[N], errs[M])
        ]
        print(f"order {N}->{M}: " + "  ".join(f"{o:.2f}" for o in orders))


if __name__ == "__main__":
    main()
