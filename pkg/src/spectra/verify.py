"""End-to-end verification suites tying the gap solver to independent references.

Every tolerance the project promises is pinned as a module constant here and
consumed both by the ``verify`` CLI subcommand and by the acceptance tests,
so there is exactly one place where "passing" is defined.  Expensive shared
artifacts (the random-pencil sweep, the clamped-quartic runs) are built once
per process and reused across checks via ``functools.cache``.
"""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass

import numpy as np

from .galerkin import (
    build_example_dirac,
    build_example_quartic,
    build_example_transport,
    resolvent_check_transport,
)
from .hermat import eigh_gen, inertia_of
from .oracle import dense_spectrum, dirac_exact, quartic_char_roots
from .pencil import (
    OperatorFunctionPencil,
    RiggedBlockPencil,
    assemble_full,
    d1_gram,
    fs_residual,
    opfunc_schur,
    schur,
    t22_spectrum,
)
from .solver import (
    SolverConfig,
    kernel_basis,
    lambda_curves,
    lift,
    locate,
    locate_general,
    nu,
)

__all__ = [
    "CheckResult",
    "SUITES",
    "run_suite",
    "check_random_locate_vs_dense",
    "check_sylvester_invariance",
    "check_fs_factorization_residual",
    "check_schur_monotonicity",
    "check_quartic_example",
    "check_dirac_example",
    "check_transport_example",
    "check_random_counting_identities",
    "check_quartic_counting_identities",
    "check_random_negative_type",
    "check_opfunc_quadratic_scan",
    "check_random_kernel_lift",
    "check_quartic_kernel_lift",
]

RANDOM_SEED = 916_485_327
RANDOM_TRIALS = 100
RANDOM_TIME_CAP = 30.0
LOCATE_MATCH_RTOL = 1e-9  # of the pencil's spectral scale

SYLVESTER_TRIALS = 200
SYLVESTER_TIME_CAP = 5.0
CONGRUENCE_COND_CAP = 1e3

FS_TRIALS = 100
FS_RTOL = 1e-12

MONOTONE_TRIALS = 100
MONOTONE_RTOL = 1e-10

QUARTIC_N = 64
QUARTIC_INTERVAL = (0.5, 200.0)
QUARTIC_MATCH_RTOL = 1e-4
QUARTIC_IMPROVE_MIN = 8.0
QUARTIC_TIME_CAP = 60.0

DIRAC_N = 256
DIRAC_INTERVAL = (1.0, 12.0)
DIRAC_TARGETS = (np.pi * (np.sqrt(5.0) - 1.0), np.pi * (1.0 + np.sqrt(5.0)))
DIRAC_MATCH_RTOL = 1e-2
DIRAC_RATIO_RANGE = (2.5, 8.0)  # mesh-doubling error ratio for order ~ 2

TRANSPORT_N = 256
TRANSPORT_MATCH_RTOL = 1e-2
TRANSPORT_ZERO_ATOL = 1e-12
RESOLVENT_TOL = 1e-3
RESOLVENT_RATIO_MAX = 0.3  # order-2 decay allows 0.25 + slack

QUAD_SCAN_POINTS = 10_000
LIFT_RTOL = 1e-8

_CFG = SolverConfig()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name: str, t0: float, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail, seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# shared artifact: the random-pencil sweep


def _random_pencil(rng: np.random.Generator) -> RiggedBlockPencil:
    n1 = int(rng.integers(1, 9))
    n2 = int(rng.integers(0, 9))

    def herm(n: int) -> np.ndarray:
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return 0.5 * (A + A.conj().T)

    def gram(n: int) -> np.ndarray:
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return M.conj().T @ M + np.eye(n)

    a12 = rng.standard_normal((n1, n2)) + 1j * rng.standard_normal((n1, n2))
    return RiggedBlockPencil(herm(n1), a12, herm(n2), gram(n1), gram(n2))


def _spectral_scale(P: RiggedBlockPencil) -> tuple[np.ndarray, float]:
    """Raw full-pencil eigenvalues and the scale used for matching tolerances."""
    T0 = assemble_full(P, 0.0).data
    n1 = P.n1
    M = np.zeros_like(T0)
    M[:n1, :n1] = P.g1.data
    if P.n2:
        M[n1:, n1:] = P.g2.data
    w = eigh_gen(T0, M)
    scale = max(float(np.max(np.abs(w))) if w.size else 0.0, 1.0)
    return w, scale


def _gap_windows(P: RiggedBlockPencil, w_all: np.ndarray, scale: float) -> list[tuple[float, float]]:
    """One trimmed open window per spectral gap of the weighted lower block.

    Unbounded gaps are clipped well beyond the full spectrum; every window is
    pulled in by 1e-3 of its span so the guard band and conditioning checks
    near gap edges never trip.  The dense reference is always filtered to the
    same window, so the trim does not bias the comparison.
    """
    edges: list[float] = []
    for t in t22_spectrum(P):
        if not edges or t - edges[-1] > 1e-9 * scale:
            edges.append(float(t))
    lo = min([*w_all, *edges, 0.0]) - 0.6 * scale
    hi = max([*w_all, *edges, 0.0]) + 0.6 * scale
    bounds = [lo, *edges, hi]
    wins = []
    for u, v in zip(bounds[:-1], bounds[1:]):
        d = 1e-3 * (v - u)
        wins.append((u + d, v - d))
    return wins


@dataclass(frozen=True)
class _WindowRun:
    a: float
    b: float
    hits: tuple
    dense: tuple


@dataclass(frozen=True)
class _PencilRun:
    P: RiggedBlockPencil
    scale: float
    windows: tuple[_WindowRun, ...]


@functools.cache
def _random_run() -> tuple[tuple[_PencilRun, ...], float]:
    """Locate + dense reference on every gap of the 100 seeded pencils."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(RANDOM_SEED)
    runs = []
    for _ in range(RANDOM_TRIALS):
        P = _random_pencil(rng)
        w_all, scale = _spectral_scale(P)
        windows = []
        for a, b in _gap_windows(P, w_all, scale):
            hits = tuple(locate(P, a, b, _CFG))
            dense = tuple(dense_spectrum(P, (a, b)))
            windows.append(_WindowRun(a=a, b=b, hits=hits, dense=dense))
        runs.append(_PencilRun(P=P, scale=scale, windows=tuple(windows)))
    return tuple(runs), time.perf_counter() - t0


@functools.cache
def _quartic_run() -> tuple[dict, float]:
    """Shooting roots plus located spectra of the clamped quartic at N and 2N."""
    t0 = time.perf_counter()
    report = quartic_char_roots(QUARTIC_INTERVAL)
    a = float(np.nextafter(QUARTIC_INTERVAL[0], np.inf))
    b = float(np.nextafter(QUARTIC_INTERVAL[1], np.inf))
    out: dict = {"report": report, "a": a, "b": b}
    for N in (QUARTIC_N, 2 * QUARTIC_N):
        P = build_example_quartic(N)
        out[N] = (P, tuple(locate(P, a, b, _CFG)))
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# criterion checks


def check_random_locate_vs_dense() -> CheckResult:
    """Gap localization reproduces the dense reference on 100 seeded pencils."""
    t0 = time.perf_counter()
    runs, build_s = _random_run()
    worst = 0.0
    n_eigs = 0
    n_windows = 0
    bad = []
    for run in runs:
        for w in run.windows:
            n_windows += 1
            got = [h.lam for h in w.hits for _ in range(h.multiplicity)]
            want = [lam for lam, m in w.dense for _ in range(m)]
            if len(got) != len(want):
                bad.append(f"count {len(got)} != {len(want)} on [{w.a:.3g},{w.b:.3g})")
                continue
            n_eigs += len(got)
            for x, y in zip(got, want):
                worst = max(worst, abs(x - y) / run.scale)
    ok = not bad and worst <= LOCATE_MATCH_RTOL and build_s < RANDOM_TIME_CAP
    detail = (
        f"{len(runs)} pencils, {n_windows} gaps, {n_eigs} eigenvalues; "
        f"worst |dLambda| = {worst:.3e} x scale (cap {LOCATE_MATCH_RTOL:.0e}); "
        f"sweep {build_s:.1f}s (cap {RANDOM_TIME_CAP:.0f}s)"
    )
    if bad:
        detail += "; MISMATCHES: " + "; ".join(bad[:3])
    return _result("random locate vs dense reference", t0, ok, detail)


def check_sylvester_invariance() -> CheckResult:
    """Inertia is exactly invariant under 200 well-conditioned congruences."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(RANDOM_SEED + 1)
    fails = 0
    for _ in range(SYLVESTER_TRIALS):
        n = int(rng.integers(1, 13))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        A = 0.5 * (A + A.conj().T)
        Q1, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        Q2, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        s = np.exp(rng.uniform(-0.5, 0.5, size=n) * np.log(CONGRUENCE_COND_CAP))
        C = Q1 @ (s[:, None] * Q2.conj().T)
        before = inertia_of(A)
        after = inertia_of(C.conj().T @ A @ C)
        if before != after:
            fails += 1
    elapsed = time.perf_counter() - t0
    ok = fails == 0 and elapsed < SYLVESTER_TIME_CAP
    detail = (
        f"{SYLVESTER_TRIALS} congruences (cond <= {CONGRUENCE_COND_CAP:.0e}), "
        f"{fails} inertia changes; {elapsed:.2f}s (cap {SYLVESTER_TIME_CAP:.0f}s)"
    )
    return _result("inertia invariance under congruence", t0, ok, detail)


def _random_gap_points(rng: np.random.Generator, P: RiggedBlockPencil, k: int) -> list[float]:
    """k points in the interior of one randomly chosen gap of P."""
    w_all, scale = _spectral_scale(P)
    wins = _gap_windows(P, w_all, scale)
    a, b = wins[int(rng.integers(0, len(wins)))]
    ts = np.sort(rng.uniform(0.01, 0.99, size=k))
    return [a + t * (b - a) for t in ts]


def check_fs_factorization_residual() -> CheckResult:
    """Block factorization reassembles the pencil to 1e-12 at random gap points."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(RANDOM_SEED + 2)
    worst = 0.0
    for _ in range(FS_TRIALS):
        P = _random_pencil(rng)
        (lam,) = _random_gap_points(rng, P, 1)
        worst = max(worst, fs_residual(P, lam))
    ok = worst <= FS_RTOL
    detail = f"{FS_TRIALS} random (pencil, lambda); worst residual {worst:.3e} (cap {FS_RTOL:.0e})"
    return _result("block factorization residual", t0, ok, detail)


def check_schur_monotonicity() -> CheckResult:
    """S(l2) - S(l1) + (l2 - l1) G1 stays negative semidefinite across gaps."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(RANDOM_SEED + 3)
    worst = -np.inf
    for _ in range(MONOTONE_TRIALS):
        P = _random_pencil(rng)
        l1, l2 = _random_gap_points(rng, P, 2)
        S1 = schur(P, l1).data
        S2 = schur(P, l2).data
        gap_step = S2 - S1 + (l2 - l1) * P.g1.data
        scale = max(
            float(np.max(np.abs(S1))),
            float(np.max(np.abs(S2))),
            (l2 - l1) * float(np.max(np.abs(P.g1.data))),
            1.0,
        )
        top = float(np.linalg.eigvalsh(0.5 * (gap_step + gap_step.conj().T))[-1])
        worst = max(worst, top / scale)
    ok = worst <= MONOTONE_RTOL
    detail = (
        f"{MONOTONE_TRIALS} random (pencil, lambda pair); "
        f"max eigenvalue {worst:.3e} x scale (cap {MONOTONE_RTOL:.0e})"
    )
    return _result("transfer-function monotonicity", t0, ok, detail)


def check_quartic_example() -> CheckResult:
    """Clamped-quartic spectrum matches the shooting roots and converges at order >= 3."""
    t0 = time.perf_counter()
    data, build_s = _quartic_run()
    roots = data["report"].roots
    msgs = []
    errs: dict[int, list[float]] = {}
    for N in (QUARTIC_N, 2 * QUARTIC_N):
        _, hits = data[N]
        if len(hits) != len(roots) or any(h.multiplicity != m for h, (_, m) in zip(hits, roots)):
            msgs.append(f"N={N}: {len(hits)} hits vs {len(roots)} roots")
            continue
        errs[N] = [abs(h.lam - r) / abs(r) for h, (r, _) in zip(hits, roots)]
    ok = not msgs
    if ok:
        worst = max(errs[QUARTIC_N])
        ratios = [c / f for c, f in zip(errs[QUARTIC_N], errs[2 * QUARTIC_N])]
        ok = (
            worst <= QUARTIC_MATCH_RTOL
            and min(ratios) >= QUARTIC_IMPROVE_MIN
            and build_s < QUARTIC_TIME_CAP
        )
        msgs.append(
            f"{len(roots)} eigenvalues in ({QUARTIC_INTERVAL[0]}, {QUARTIC_INTERVAL[1]}]; "
            f"worst rel err {worst:.3e} at N={QUARTIC_N} (cap {QUARTIC_MATCH_RTOL:.0e}); "
            f"mesh-halving ratios {', '.join(f'{r:.1f}' for r in ratios)} "
            f"(min {QUARTIC_IMPROVE_MIN}); runs {build_s:.1f}s (cap {QUARTIC_TIME_CAP:.0f}s)"
        )
    return _result("clamped-quartic spectrum vs shooting", t0, ok, "; ".join(msgs))


def check_dirac_example() -> CheckResult:
    """Periodic first-order system reproduces its closed-form spectrum at order ~ 2."""
    t0 = time.perf_counter()
    exact = dirac_exact(DIRAC_INTERVAL)
    hits = {}
    for N in (DIRAC_N // 2, DIRAC_N):
        P = build_example_dirac(N)
        hits[N] = locate(P, *DIRAC_INTERVAL, _CFG)
    msgs = []
    ok = all(len(hits[N]) == len(exact) for N in hits)
    if not ok:
        msgs.append(f"counts {[len(h) for h in hits.values()]} vs exact {len(exact)}")
    else:
        for tgt in DIRAC_TARGETS:
            lam = min((h.lam for h in hits[DIRAC_N]), key=lambda x: abs(x - tgt))
            rel = abs(lam - tgt) / tgt
            coarse = min((h.lam for h in hits[DIRAC_N // 2]), key=lambda x: abs(x - tgt))
            ratio = abs(coarse - tgt) / abs(lam - tgt)
            ok = ok and rel <= DIRAC_MATCH_RTOL and DIRAC_RATIO_RANGE[0] <= ratio <= DIRAC_RATIO_RANGE[1]
            msgs.append(f"target {tgt:.5f}: rel err {rel:.2e}, doubling ratio {ratio:.2f}")
        msgs.append(
            f"caps: rel {DIRAC_MATCH_RTOL:.0e}, ratio in {DIRAC_RATIO_RANGE}, "
            f"all {len(exact)} closed-form eigenvalues matched"
        )
    return _result("periodic first-order system vs closed form", t0, ok, "; ".join(msgs))


def check_transport_example() -> CheckResult:
    """Transport eigenvalues near {0, +-2pi} and the exact-kernel resolvent check."""
    t0 = time.perf_counter()
    span = 3.5 * np.pi
    hits = {}
    for N in (TRANSPORT_N // 2, TRANSPORT_N):
        P = build_example_transport(N)
        hits[N] = locate(P, -span, span, _CFG)
    msgs = []
    ok = True
    zero = min((h.lam for h in hits[TRANSPORT_N]), key=abs)
    ok &= abs(zero) <= TRANSPORT_ZERO_ATOL
    msgs.append(f"eigenvalue nearest 0: {zero:.2e} (cap {TRANSPORT_ZERO_ATOL:.0e})")
    for tgt in (-2.0 * np.pi, 2.0 * np.pi):
        lam = min((h.lam for h in hits[TRANSPORT_N]), key=lambda x: abs(x - tgt))
        rel = abs(lam - tgt) / abs(tgt)
        ok &= rel <= TRANSPORT_MATCH_RTOL
        msgs.append(f"nearest {tgt:+.4f}: rel err {rel:.2e} (cap {TRANSPORT_MATCH_RTOL:.0e})")
    errv = {}
    for N in (TRANSPORT_N // 2, TRANSPORT_N):
        x = np.linspace(0.0, 1.0, N + 1)[:-1]
        errv[N] = resolvent_check_transport(N, np.cos(2.0 * np.pi * x))
    ratio = errv[TRANSPORT_N] / errv[TRANSPORT_N // 2]
    ok &= errv[TRANSPORT_N] <= RESOLVENT_TOL and ratio <= RESOLVENT_RATIO_MAX
    msgs.append(
        f"resolvent err {errv[TRANSPORT_N]:.2e} (cap {RESOLVENT_TOL:.0e}), "
        f"doubling ratio {ratio:.3f} (cap {RESOLVENT_RATIO_MAX})"
    )
    return _result("transport spectrum and resolvent", t0, bool(ok), "; ".join(msgs))


def _curve_counts_match(P: RiggedBlockPencil, grid: list[float]) -> bool:
    """Negative curve count equals the counting function at each grid point."""
    kappa = float(np.floor(eigh_gen(P.a11.data, P.g1.data)[0])) - 1.0
    t22 = t22_spectrum(P)
    tau = float(np.max(t22)) + 1.0 if t22.size else 0.0
    table = lambda_curves(P, kappa, tau, np.asarray(grid), P.n1, _CFG)
    for j, x in enumerate(grid):
        if int(np.sum(table.curves[:, j] < 0.0)) != nu(P, float(x), _CFG):
            return False
    return True


def check_random_counting_identities() -> CheckResult:
    """Multiplicity sums equal counting-function differences on the random sweep."""
    t0 = time.perf_counter()
    runs, _ = _random_run()
    n_windows = 0
    fails = []
    rng = np.random.default_rng(RANDOM_SEED + 4)
    for i, run in enumerate(runs):
        for w in run.windows:
            n_windows += 1
            total = sum(h.multiplicity for h in w.hits)
            jump = nu(run.P, w.b, _CFG) - nu(run.P, w.a, _CFG)
            if total != jump:
                fails.append(f"pencil {i}: sum {total} != jump {jump}")
        w = run.windows[int(rng.integers(0, len(run.windows)))]
        ts = rng.uniform(0.05, 0.95, size=3)
        grid = sorted(float(w.a + t * (w.b - w.a)) for t in ts)
        if not _curve_counts_match(run.P, grid):
            fails.append(f"pencil {i}: curve count mismatch")
    ok = not fails
    detail = (
        f"{n_windows} gap windows: multiplicity sums == counting jumps; "
        f"{len(runs)} pencils x 3 grid points: negative-curve count == counting function"
    )
    if fails:
        detail += "; FAILS: " + "; ".join(fails[:3])
    return _result("counting identities on random sweep", t0, ok, detail)


def check_quartic_counting_identities() -> CheckResult:
    """Same counting identities on the clamped-quartic run."""
    t0 = time.perf_counter()
    data, _ = _quartic_run()
    P, hits = data[QUARTIC_N]
    a, b = data["a"], data["b"]
    total = sum(h.multiplicity for h in hits)
    jump = nu(P, b, _CFG) - nu(P, a, _CFG)
    grid = [1.0, 30.0, 90.0, 199.0]
    curves_ok = _curve_counts_match(P, grid)
    ok = total == jump and curves_ok
    detail = (
        f"sum of multiplicities {total} == nu jump {jump}; "
        f"negative-curve count == nu at grid {grid}: {curves_ok}"
    )
    return _result("counting identities on the quartic", t0, ok, detail)


def check_random_negative_type() -> CheckResult:
    """Every located eigenvalue on the random sweep certifies strictly negative type."""
    t0 = time.perf_counter()
    runs, _ = _random_run()
    n_vals = 0
    worst = -np.inf
    for run in runs:
        for w in run.windows:
            for h in w.hits:
                vals = h.negative_type or ()
                n_vals += len(vals)
                if vals:
                    worst = max(worst, max(vals))
    ok = n_vals > 0 and worst < 0.0
    detail = f"{n_vals} derivative values across all hits; max {worst:.3e} (must be < 0)"
    return _result("negative-type certificates on random sweep", t0, ok, detail)


@functools.cache
def _quadratic_case() -> tuple[OperatorFunctionPencil, RiggedBlockPencil, np.ndarray, float, float]:
    """A quadratically perturbed pencil and its scan window in the top gap."""
    rng = np.random.default_rng(RANDOM_SEED + 5)
    n1, n2 = 5, 4

    def herm(n: int) -> np.ndarray:
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return 0.5 * (A + A.conj().T)

    def gram(n: int) -> np.ndarray:
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return M.conj().T @ M + np.eye(n)

    a12 = rng.standard_normal((n1, n2)) + 1j * rng.standard_normal((n1, n2))
    P = RiggedBlockPencil(herm(n1), a12, herm(n2), gram(n1), gram(n2))
    Mc = rng.standard_normal((n1, n1)) + 1j * rng.standard_normal((n1, n1))
    C = 1e-3 * (Mc.conj().T @ Mc)

    a11, g1 = P.a11.data, P.g1.data
    a22, g2 = P.a22.data, P.g2.data

    def ev(lam: float):
        return a11 - lam * g1 - lam * lam * C, P.a12, a22 - lam * g2

    def dv(lam: float):
        return -g1 - 2.0 * lam * C, np.zeros_like(P.a12), -g2

    F = OperatorFunctionPencil(eval=ev, deriv=dv, epsilon=1e-12, gram2=P.g2)
    w_all, scale = _spectral_scale(P)
    top = float(np.max(t22_spectrum(P)))
    a = top + 0.05 * scale
    b = max(float(np.max(w_all)), top) + 0.6 * scale
    return F, P, C, a, b


def check_opfunc_quadratic_scan() -> CheckResult:
    """Operator-function localization matches a dense counting-function scan."""
    t0 = time.perf_counter()
    F, _, _, a, b = _quadratic_case()
    hits = locate_general(F, a, b, _CFG)
    grid = np.linspace(a, b, QUAD_SCAN_POINTS + 1)
    nus = np.fromiter(
        (inertia_of(opfunc_schur(F, float(x)), 0.0).n_neg for x in grid), dtype=int
    )
    jumps = np.flatnonzero(np.diff(nus) > 0)
    ok = len(hits) >= 1 and np.all(np.diff(nus) >= 0)
    total_scan = int(nus[-1] - nus[0])
    ok = ok and total_scan == sum(h.multiplicity for h in hits) and len(jumps) == len(hits)
    placed = 0
    for h, j in zip(hits, jumps):
        if grid[j] <= h.lam <= grid[j + 1]:
            placed += 1
    ok = ok and placed == len(hits)
    certs_ok = all(h.negative_type and max(h.negative_type) < 0.0 for h in hits)
    ok = ok and certs_ok
    detail = (
        f"{len(hits)} localized eigenvalue(s) vs {len(jumps)} scan jump(s) over "
        f"{QUAD_SCAN_POINTS + 1} points on [{a:.3f}, {b:.3f}]; {placed} inside their scan "
        f"step; certificates negative: {certs_ok}"
    )
    return _result("quadratic pencil vs counting-function scan", t0, bool(ok), detail)


def _lift_residuals(P: RiggedBlockPencil, hits) -> tuple[int, float]:
    """Worst relative block-matrix residual of lifted kernel vectors."""
    n_vecs = 0
    worst = 0.0
    for h in hits:
        T = assemble_full(P, h.lam).data
        tnorm = float(np.linalg.norm(T, 2))
        Y = kernel_basis(P, h.lam, _CFG)
        if Y.shape[1] == 0:
            return n_vecs, np.inf
        for k in range(Y.shape[1]):
            v = lift(P, h.lam, Y[:, k])
            lhs = float(np.linalg.norm(T @ v))
            den = tnorm * float(np.linalg.norm(v))
            # T can vanish identically at an exactly-hit 1x1 eigenvalue
            r = lhs / den if den > 0.0 else (0.0 if lhs == 0.0 else np.inf)
            worst = max(worst, r)
            n_vecs += 1
    return n_vecs, worst


def check_random_kernel_lift() -> CheckResult:
    """Lifted kernel vectors annihilate the full block matrix on the random sweep."""
    t0 = time.perf_counter()
    runs, _ = _random_run()
    n_vecs = 0
    worst = 0.0
    for run in runs:
        for w in run.windows:
            k, r = _lift_residuals(run.P, w.hits)
            n_vecs += k
            worst = max(worst, r)
    ok = n_vecs > 0 and worst <= LIFT_RTOL
    detail = f"{n_vecs} lifted vectors; worst relative residual {worst:.3e} (cap {LIFT_RTOL:.0e})"
    return _result("kernel lift residuals on random sweep", t0, ok, detail)


def check_quartic_kernel_lift() -> CheckResult:
    """Lifted kernel vectors annihilate the full block matrix on the quartic."""
    t0 = time.perf_counter()
    data, _ = _quartic_run()
    P, hits = data[QUARTIC_N]
    n_vecs, worst = _lift_residuals(P, hits)
    ok = n_vecs > 0 and worst <= LIFT_RTOL
    detail = f"{n_vecs} lifted vectors; worst relative residual {worst:.3e} (cap {LIFT_RTOL:.0e})"
    return _result("kernel lift residuals on the quartic", t0, ok, detail)


SUITES: dict[str, tuple] = {
    "random": (
        check_random_locate_vs_dense,
        check_sylvester_invariance,
        check_fs_factorization_residual,
        check_schur_monotonicity,
        check_random_counting_identities,
        check_random_negative_type,
        check_opfunc_quadratic_scan,
        check_random_kernel_lift,
    ),
    "quartic": (
        check_quartic_example,
        check_quartic_counting_identities,
        check_quartic_kernel_lift,
    ),
    "dirac": (check_dirac_example,),
    "transport": (check_transport_example,),
}


def run_suite(name: str) -> list[CheckResult]:
    """All checks of one named suite, in order."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; pick one of {sorted(SUITES)}")
    return [fn() for fn in SUITES[name]]
