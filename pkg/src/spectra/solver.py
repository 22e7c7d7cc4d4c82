"""Counting-function machinery: localize pencil eigenvalues inside a spectral gap.

The counting function ``nu(lam)`` is the number of negative eigenvalues of the
transfer matrix ``S(lam)``; inside a gap it is nondecreasing and jumps exactly
by the multiplicity of each pencil eigenvalue it passes.  :func:`locate` turns
that into recursive bisection: brackets whose endpoint counts differ are split
until they are tighter than the lambda tolerance, and each surviving bracket
becomes an :class:`EigenvalueHit` carrying the jump as multiplicity, a
first-order refined position, and per-kernel-vector derivative values (the
negative-type certificate of the hit).

The same scheme generalizes to lambda-dependent blocks through
:func:`locate_general`, which additionally *checks* monotonicity of the
sampled counting function -- for genuinely nonlinear families it is a
hypothesis, not a theorem, and any observed decrease raises
:class:`TypeViolation`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hermat import HermitianMatrix, default_zero_tol, eigh, eigh_gen, inertia_of, solve_with
from .pencil import (
    GapInterval,
    OperatorFunctionPencil,
    RiggedBlockPencil,
    _d_factor,
    d1_gram,
    gap_of,
    opfunc_schur,
    schur,
    schur_derivative,
)

__all__ = [
    "GapMismatch",
    "BisectionBudgetExceeded",
    "TypeViolation",
    "AboveGap",
    "ABOVE_GAP",
    "SolverConfig",
    "EigenvalueHit",
    "LambdaCurveTable",
    "NegativeTypeCertificate",
    "nu",
    "count_between",
    "locate",
    "nth_eigenvalue",
    "lambda_curves",
    "kernel_basis",
    "lift",
    "negative_type_certificate",
    "locate_general",
]


class GapMismatch(Exception):
    """The two interval endpoints do not lie in the same spectral gap."""


class BisectionBudgetExceeded(Exception):
    """The bisection budget ran out; ``hits`` holds the eigenvalues resolved so far."""

    def __init__(self, hits: list["EigenvalueHit"], pending: tuple[float, float]):
        self.hits = hits
        self.pending = pending
        super().__init__(
            f"bisection budget exhausted with unresolved bracket {pending!r}; "
            f"{len(hits)} hit(s) resolved before the stop"
        )


class TypeViolation(Exception):
    """The sampled counting function decreased, or a hit failed its negative-type certificate."""

    def __init__(self, lam: float, message: str | None = None):
        self.lam = float(lam)
        super().__init__(message or f"negative-type hypothesis violated near lambda = {lam!r}")


class AboveGap:
    """Sentinel: the requested eigenvalue index is not attained inside the gap."""

    _instance: "AboveGap | None" = None

    def __new__(cls) -> "AboveGap":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABOVE_GAP"


#: Singleton returned by :func:`nth_eigenvalue` when the index is out of range.
ABOVE_GAP = AboveGap()


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by the counting/localization routines.

    ``zero_tol`` is the relative inertia threshold; ``None`` defers to the
    dimension-scaled default ``1e-10 * n`` of whatever matrix is being
    classified.  ``epsilon_cap`` caps the eigenvalue-curve values tabulated by
    :func:`lambda_curves`.  ``max_bisections`` bounds the number of interval
    splits in a single :func:`locate`/:func:`nth_eigenvalue`/
    :func:`locate_general` call.
    """

    lambda_tol_abs: float = 1e-10
    lambda_tol_rel: float = 1e-10
    zero_tol: float | None = None
    epsilon_cap: float = 1.0
    max_bisections: int = 10_000

    def __post_init__(self) -> None:
        if not self.lambda_tol_abs > 0.0:
            raise ValueError("lambda_tol_abs must be positive")
        if not self.lambda_tol_rel > 0.0:
            raise ValueError("lambda_tol_rel must be positive")
        if self.zero_tol is not None and not 0.0 < self.zero_tol < 1.0:
            raise ValueError("zero_tol must lie in (0, 1) when given")
        if not self.epsilon_cap > 0.0:
            raise ValueError("epsilon_cap must be positive")
        if self.max_bisections < 1:
            raise ValueError("max_bisections must be at least 1")

    def resolve_zero_tol(self, n: int) -> float:
        return default_zero_tol(n) if self.zero_tol is None else self.zero_tol


@dataclass(frozen=True)
class EigenvalueHit:
    """A localized pencil eigenvalue.

    ``bracket = (lo, hi]`` is the final bisection interval: the counting
    function jumps by ``multiplicity`` across it and ``lo < lam <= hi``.
    ``negative_type`` holds one derivative value per kernel vector (all
    negative for eigenvalues of negative type).
    """

    lam: float
    multiplicity: int
    bracket: tuple[float, float]
    negative_type: tuple[float, ...] | None = None


@dataclass(frozen=True)
class LambdaCurveTable:
    """Capped eigenvalue curves ``L_n(lam) = min(epsilon, mu_n(lam))`` on a grid."""

    grid: np.ndarray
    curves: np.ndarray  # shape (m, len(grid)); row n is the curve L_n
    epsilon: float


@dataclass(frozen=True)
class NegativeTypeCertificate:
    """Per-kernel-vector derivative values with their pass/fail verdict."""

    values: tuple[float, ...]
    certified: bool
    threshold: float


class _NuEvaluator:
    """Memoized counting-function evaluation on a fixed pencil.

    Bisection runs with ``zero_tol = 0`` (exact pivot signs): a nonzero
    threshold ``t`` shifts every counting jump by ``t / |slope|`` away from
    the true crossing, which would poison the localized positions on badly
    scaled transfer matrices.  Zero-classified pivots only matter within a
    rounding error of a crossing, where either bracket assignment is correct.
    """

    def __init__(self, P: RiggedBlockPencil, cfg: SolverConfig):
        self.P = P
        self.cfg = cfg
        self._cache: dict[float, int] = {}

    def __call__(self, lam: float) -> int:
        v = self._cache.get(lam)
        if v is None:
            v = inertia_of(schur(self.P, lam), 0.0).n_neg
            self._cache[lam] = v
        return v


def _require_same_gap(P: RiggedBlockPencil, lo: float, hi: float) -> GapInterval:
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    gap_lo = gap_of(P, lo)
    gap_hi = gap_of(P, hi)
    if not gap_lo.same_gap(gap_hi):
        raise GapMismatch(
            f"[{lo!r}, {hi!r}] straddles the t22 spectrum: "
            f"{gap_lo.lo, gap_lo.hi} vs {gap_hi.lo, gap_hi.hi}"
        )
    return gap_lo


def nu(P: RiggedBlockPencil, lam: float, cfg: SolverConfig | None = None) -> int:
    """Number of negative eigenvalues of the transfer matrix at ``lam``."""
    cfg = cfg or SolverConfig()
    S = schur(P, lam)
    return inertia_of(S, cfg.resolve_zero_tol(S.n)).n_neg


def count_between(
    P: RiggedBlockPencil,
    zeta_minus: float,
    zeta_plus: float,
    cfg: SolverConfig | None = None,
    count_by: str = "neg",
) -> int:
    """Total eigenvalue multiplicity of the pencil between two same-gap points.

    ``count_by="neg"`` counts on the half-open interval ``[zeta_minus,
    zeta_plus)`` as the increment of the negative count; ``count_by="pos"``
    counts on ``(zeta_minus, zeta_plus]`` as the decrement of the positive
    count.  The two agree whenever neither endpoint is an eigenvalue.
    """
    cfg = cfg or SolverConfig()
    _require_same_gap(P, zeta_minus, zeta_plus)
    if count_by == "neg":
        return nu(P, zeta_plus, cfg) - nu(P, zeta_minus, cfg)
    if count_by == "pos":
        S_lo = schur(P, zeta_minus)
        S_hi = schur(P, zeta_plus)
        n_pos_lo = inertia_of(S_lo, cfg.resolve_zero_tol(S_lo.n)).n_pos
        n_pos_hi = inertia_of(S_hi, cfg.resolve_zero_tol(S_hi.n)).n_pos
        return n_pos_lo - n_pos_hi
    raise ValueError(f"count_by must be 'neg' or 'pos', got {count_by!r}")


def _tol_at(cfg: SolverConfig, a: float, b: float) -> float:
    return cfg.lambda_tol_abs + cfg.lambda_tol_rel * max(abs(a), abs(b))


def _make_hit(
    P: RiggedBlockPencil,
    cfg: SolverConfig,
    ev: _NuEvaluator,
    a: float,
    na: int,
    b: float,
    nb: int,
) -> EigenvalueHit:
    m = nb - na
    lo, hi = a, b
    mid = 0.5 * (lo + hi)
    S = schur(P, mid)
    w, V = eigh(S)
    # the m eigenvalues of S closest to zero carry the crossing
    sel = np.sort(np.argsort(np.abs(w))[:m])
    if m > 1:
        # cross-check the kernel dimension against the jump; the jump wins,
        # but a disagreement earns one extra refinement and a warning
        zt = cfg.resolve_zero_tol(S.n)
        kdim = int(np.sum(np.abs(w) <= zt * float(np.max(np.abs(w), initial=0.0))))
        if kdim != m:
            nm = ev(mid)
            if nm == nb:
                hi = mid
            elif nm == na:
                lo = mid
            if (lo, hi) != (a, b):
                mid = 0.5 * (lo + hi)
                S = schur(P, mid)
                w, V = eigh(S)
                sel = np.sort(np.argsort(np.abs(w))[:m])
            warnings.warn(
                f"kernel dimension {kdim} disagrees with counting jump {m} "
                f"near lambda = {mid!r}; keeping the jump",
                RuntimeWarning,
                stacklevel=3,
            )
    kernel = V[:, sel]
    deltas = w[sel]
    Sd = schur_derivative(P, mid)
    slopes = np.real(np.sum(kernel.conj() * (Sd.data @ kernel), axis=0))
    # first-order correction of the crossing position, clamped into (lo, hi]
    denom = float(np.mean(slopes))
    lam_hat = mid - float(np.mean(deltas)) / denom if denom != 0.0 else mid
    lam_hat = min(max(lam_hat, np.nextafter(lo, hi)), hi)
    return EigenvalueHit(
        lam=float(lam_hat),
        multiplicity=m,
        bracket=(float(a), float(b)),
        negative_type=tuple(float(s) for s in slopes),
    )


def locate(
    P: RiggedBlockPencil,
    zeta_minus: float,
    zeta_plus: float,
    cfg: SolverConfig | None = None,
) -> list[EigenvalueHit]:
    """All pencil eigenvalues in ``[zeta_minus, zeta_plus)``, ascending.

    Both endpoints must lie in the same gap.  Brackets are split at midpoints
    until they are tighter than ``lambda_tol_abs + lambda_tol_rel * |lam|``;
    the number of splits is capped by ``cfg.max_bisections`` and exceeding it
    raises :class:`BisectionBudgetExceeded` carrying the ascending prefix of
    hits already resolved.  Output is deterministic for fixed inputs.
    """
    cfg = cfg or SolverConfig()
    _require_same_gap(P, zeta_minus, zeta_plus)
    ev = _NuEvaluator(P, cfg)
    hits: list[EigenvalueHit] = []
    spent = 0

    def recurse(a: float, na: int, b: float, nb: int) -> None:
        nonlocal spent
        if nb <= na:
            return
        if (b - a) <= _tol_at(cfg, a, b):
            hits.append(_make_hit(P, cfg, ev, a, na, b, nb))
            return
        mid = 0.5 * (a + b)
        if not a < mid < b:  # interval no longer splittable in floating point
            hits.append(_make_hit(P, cfg, ev, a, na, b, nb))
            return
        if spent >= cfg.max_bisections:
            raise BisectionBudgetExceeded(list(hits), (a, b))
        spent += 1
        nm = ev(mid)
        recurse(a, na, mid, nm)
        recurse(mid, nm, b, nb)

    recurse(zeta_minus, ev(zeta_minus), zeta_plus, ev(zeta_plus))
    return hits


def nth_eigenvalue(
    P: RiggedBlockPencil,
    zeta: float,
    n: int,
    cfg: SolverConfig | None = None,
):
    """Position of the ``n``-th pencil eigenvalue at or above ``zeta`` in its gap.

    Returns the smallest ``lam`` with ``nu(lam) > nu(zeta) + n`` to bracket
    tolerance, or :data:`ABOVE_GAP` when fewer than ``n + 1`` eigenvalues lie
    between ``zeta`` and the upper gap edge.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    cfg = cfg or SolverConfig()
    gap = gap_of(P, zeta)
    ev = _NuEvaluator(P, cfg)
    target = ev(zeta) + n
    if target >= P.n1:  # the counting function never exceeds n1
        return ABOVE_GAP
    if math.isfinite(gap.hi):
        hi = gap.hi
        if ev(hi) <= target:
            return ABOVE_GAP
    else:
        hi = zeta + max(1.0, abs(zeta))
        for _ in range(200):
            if ev(hi) > target:
                break
            hi = zeta + 2.0 * (hi - zeta)
        else:  # pragma: no cover - unreachable for valid weights
            return ABOVE_GAP
    lo = zeta
    spent = 0
    while (hi - lo) > _tol_at(cfg, lo, hi):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if spent >= cfg.max_bisections:
            raise BisectionBudgetExceeded([], (lo, hi))
        spent += 1
        if ev(mid) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lambda_curves(
    P: RiggedBlockPencil,
    kappa: float,
    tau: float,
    grid,
    m: int,
    cfg: SolverConfig | None = None,
) -> LambdaCurveTable:
    """Tabulate the lowest ``m`` capped eigenvalue curves of ``S`` on a gap grid.

    ``mu_n(lam)`` are the ascending eigenvalues of the pair
    ``(S(lam), G_D1)`` with the positive-definite Gram built by
    :func:`~spectra.pencil.d1_gram` from ``(kappa, tau)``; the stored values
    are capped at ``cfg.epsilon_cap``, so curves are bounded above while every
    sign change survives.  The number of negative entries per column equals
    the counting function there.
    """
    cfg = cfg or SolverConfig()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty 1-D array")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be strictly ascending")
    if not 0 < m <= P.n1:
        raise ValueError(f"m must lie in [1, n1] = [1, {P.n1}]")
    first = gap_of(P, float(grid[0]))
    for x in grid[1:]:
        if not gap_of(P, float(x)).same_gap(first):
            raise GapMismatch(f"grid leaves the gap {first.lo, first.hi} at lambda = {x!r}")
    G = d1_gram(P, kappa, tau)
    eps = cfg.epsilon_cap
    table = np.empty((m, grid.size), dtype=float)
    for j, x in enumerate(grid):
        mu = eigh_gen(schur(P, float(x)), G)
        table[:, j] = np.minimum(eps, mu[:m])
    table.flags.writeable = False
    out_grid = grid.copy()
    out_grid.flags.writeable = False
    return LambdaCurveTable(grid=out_grid, curves=table, epsilon=eps)


def kernel_basis(
    P: RiggedBlockPencil,
    lam: float,
    cfg: SolverConfig | None = None,
) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``S(lam)`` (n1 x k, possibly k = 0).

    The cut is ``zero_tol * |S| + tol_lambda * |S'|``: the second term admits
    exactly the eigenvalues that a shift of ``lam`` by the solver's own
    bracket resolution could zero out.  Without it a located eigenvalue of a
    small block (where the kernel eigenvalue *is* the largest one) would see
    an empty kernel, breaking the kernel-dimension = multiplicity link.
    """
    cfg = cfg or SolverConfig()
    S = schur(P, lam)
    w, V = eigh(S)
    if w.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    slope_scale = float(np.max(np.abs(schur_derivative(P, lam).data)))
    tol = cfg.resolve_zero_tol(S.n) * float(np.max(np.abs(w)))
    tol += _tol_at(cfg, lam, lam) * slope_scale
    sel = np.flatnonzero(np.abs(w) <= tol)
    return V[:, sel]


def lift(P: RiggedBlockPencil, lam: float, y) -> np.ndarray:
    """Extend a transfer-matrix kernel vector to the full space.

    Returns ``(y, z)`` with ``z = -(A22 - lam*G2)^{-1} A12* y``; applying the
    full pencil to the lifted vector reproduces ``(S(lam) y, 0)``, so kernel
    vectors of ``S`` lift to kernel vectors of the full pencil.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[0] != P.n1:
        raise ValueError(f"y has leading dimension {y.shape[0]}, expected {P.n1}")
    if P.n2 == 0:
        return y.copy()
    from .pencil import DEFAULT_COND_GUARD, DEFAULT_GUARD_REL

    f = _d_factor(P, float(lam), DEFAULT_GUARD_REL, DEFAULT_COND_GUARD)
    z = -solve_with(f, P.a12.conj().T @ y)
    return np.concatenate([y, z], axis=0)


def negative_type_certificate(
    F: OperatorFunctionPencil,
    mu: float,
    kernel,
    cfg: SolverConfig | None = None,
) -> NegativeTypeCertificate:
    """Derivative values ``<S'(mu) y, y>`` for the given kernel vectors.

    ``S'`` is assembled from the block derivatives by the chain rule,

        S' = A11' - A12' Y - Y* A12'* + Y* A22' Y,   Y = A22^{-1} A12*,

    all evaluated at ``mu``.  The certificate passes when every value is below
    ``-zero_tol * max|S'|``.
    """
    cfg = cfg or SolverConfig()
    kernel = np.asarray(kernel, dtype=np.complex128)
    if kernel.ndim == 1:
        kernel = kernel[:, None]
    a11, a12, a22 = F.blocks(mu)
    d11, d12, d22 = F.deriv_blocks(mu)
    n1 = a11.shape[0]
    if a22.shape[0]:
        from .hermat import _factor

        f = _factor(((a22 + a22.conj().T) / 2.0), 0.0)
        Y = solve_with(f, a12.conj().T)
        Sd = d11 - d12 @ Y - Y.conj().T @ d12.conj().T + Y.conj().T @ (d22 @ Y)
    else:
        Sd = d11
    Sd = (Sd + Sd.conj().T) / 2.0
    values = tuple(
        float(v) for v in np.real(np.sum(kernel.conj() * (Sd @ kernel), axis=0))
    )
    scale = float(np.max(np.abs(Sd))) if Sd.size else 0.0
    threshold = cfg.resolve_zero_tol(n1) * scale
    certified = bool(values) and max(values) < -threshold
    return NegativeTypeCertificate(values=values, certified=certified, threshold=threshold)


def locate_general(
    F: OperatorFunctionPencil,
    zeta_minus: float,
    zeta_plus: float,
    cfg: SolverConfig | None = None,
    max_refinements: int = 6,
) -> list[EigenvalueHit]:
    """Localize eigenvalues of an operator-function pencil on ``[zeta_minus, zeta_plus)``.

    The counting function of ``opfunc_schur`` is sampled on dyadically refined
    grids (up to ``max_refinements`` doublings); a decrease at any stage, or
    any hit whose kernel fails the negative-type certificate, raises
    :class:`TypeViolation` -- for lambda-dependent blocks monotonicity is a
    hypothesis to verify, not a theorem.  Jump brackets are then bisected
    exactly as in :func:`locate`, re-checking the sampled monotonicity at
    every midpoint.
    """
    cfg = cfg or SolverConfig()
    if not zeta_minus < zeta_plus:
        raise ValueError(f"need zeta_minus < zeta_plus, got {zeta_minus!r}, {zeta_plus!r}")
    cache: dict[float, int] = {}

    def nu_f(x: float) -> int:
        v = cache.get(x)
        if v is None:
            v = inertia_of(opfunc_schur(F, x), 0.0).n_neg
            cache[x] = v
        return v

    grid = np.linspace(zeta_minus, zeta_plus, 2**max_refinements + 1)
    for level in range(max_refinements + 1):
        pts = grid[:: 2 ** (max_refinements - level)]
        vals = [nu_f(float(x)) for x in pts]
        for i in range(len(vals) - 1):
            if vals[i + 1] < vals[i]:
                raise TypeViolation(
                    float(pts[i + 1]),
                    f"counting function decreased from {vals[i]} to {vals[i + 1]} "
                    f"on [{pts[i]!r}, {pts[i + 1]!r}]",
                )

    hits: list[EigenvalueHit] = []
    spent = 0

    def emit(a: float, na: float, b: float, nb: float) -> None:
        m = nb - na
        mid = 0.5 * (a + b)
        S = opfunc_schur(F, mid)
        w, V = eigh(S)
        sel = np.sort(np.argsort(np.abs(w))[:m])
        kernel = V[:, sel]
        cert = negative_type_certificate(F, mid, kernel, cfg)
        if not cert.certified:
            raise TypeViolation(
                mid,
                f"kernel vectors at lambda = {mid!r} are not uniformly of negative type "
                f"(values {cert.values}, threshold {-cert.threshold:.3e})",
            )
        denom = float(np.mean(cert.values))
        lam_hat = mid - float(np.mean(w[sel])) / denom if denom != 0.0 else mid
        lam_hat = min(max(lam_hat, np.nextafter(a, b)), b)
        hits.append(
            EigenvalueHit(
                lam=float(lam_hat),
                multiplicity=m,
                bracket=(float(a), float(b)),
                negative_type=cert.values,
            )
        )

    def recurse(a: float, na: int, b: float, nb: int) -> None:
        nonlocal spent
        if nb == na:
            return
        if (b - a) <= _tol_at(cfg, a, b):
            emit(a, na, b, nb)
            return
        mid = 0.5 * (a + b)
        if not a < mid < b:
            emit(a, na, b, nb)
            return
        if spent >= cfg.max_bisections:
            raise BisectionBudgetExceeded(list(hits), (a, b))
        spent += 1
        nm = nu_f(mid)
        if not na <= nm <= nb:
            raise TypeViolation(mid, f"counting function left [{na}, {nb}] at lambda = {mid!r}")
        recurse(a, na, mid, nm)
        recurse(mid, nm, b, nb)

    for i in range(len(grid) - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        recurse(a, nu_f(a), b, nu_f(b))
    return hits
