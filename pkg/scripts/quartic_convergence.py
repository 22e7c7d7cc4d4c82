"""Mesh-refinement study for the fourth-order example.

Locates the pencil eigenvalues in (0.5, 200] at a sequence of mesh sizes,
compares each against the shooting-determinant roots, and prints the observed
convergence order between consecutive meshes.  The Hermite/P1-discontinuous
pair is fourth-order for these eigenvalues, so the error ratios should sit
near 16.
"""

import argparse
import math

import numpy as np

from spectra.galerkin import build_example_quartic
from spectra.oracle import quartic_char_roots
from spectra.solver import locate


def run(meshes, interval):
    a = np.nextafter(interval[0], math.inf)  # locate covers [a, b); we want (lo, hi]
    b = np.nextafter(interval[1], math.inf)
    report = quartic_char_roots(interval)
    targets = [lam for lam, _ in report.roots]
    print(f"shooting roots on ({interval[0]}, {interval[1]}]:")
    for lam in targets:
        print(f"    {lam:.10f}")
    print(f"(step-halving drift {report.halving_drift:.2e})")
    print()

    errs = {}
    for N in meshes:
        P = build_example_quartic(N)
        hits = locate(P, float(a), float(b))
        if len(hits) != len(targets):
            print(f"N={N}: found {len(hits)} eigenvalues, expected {len(targets)}")
            continue
        errs[N] = [abs(h.lam - t) / abs(t) for h, t in zip(hits, targets)]

    header = "N      " + "".join(f"  rel err vs {t:10.4f}" for t in targets)
    print(header)
    for N in meshes:
        row = f"{N:<7d}" + "".join(f"  {e:22.3e}" for e in errs[N])
        print(row)
    print()
    print("observed order between consecutive meshes:")
    pairs = list(zip(meshes, meshes[1:]))
    for N, M in pairs:
        rate = math.log(M / N)
        orders = [math.log(ec / ef) / rate for ec, ef in zip(errs[N], errs[M])]
        print(f"{N} -> {M}: " + "  ".join(f"{o:5.2f}" for o in orders))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--meshes", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--interval", type=float, nargs=2, default=[0.5, 200.0])
    args = ap.parse_args()
    run(sorted(args.meshes), tuple(args.interval))


if __name__ == "__main__":
    main()
