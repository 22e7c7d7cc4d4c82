"""Block pencils with positive-definite weights and their Schur-complement transfer matrix.

A :class:`RiggedBlockPencil` holds the Hermitian blocks of

    T(lam) = [[A11 - lam*G1, A12],
              [A12*,         A22 - lam*G2]]

with ``G1, G2`` positive definite.  Away from the spectrum of the reduced
pair ``(A22, G2)`` the second block is invertible and the pencil is congruent
to ``diag(S(lam), A22 - lam*G2)`` with the transfer matrix

    S(lam) = (A11 - lam*G1) - A12 (A22 - lam*G2)^{-1} A12*.

Everything downstream (counting, localization, curves) is built on ``S`` and
its derivative; this module owns the gap bookkeeping, the factorization of
the second block, and the lambda-dependent generalization
:class:`OperatorFunctionPencil`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import solve_triangular

from .hermat import (
    HermitianMatrix,
    LdlFactorization,
    NotPositiveDefinite,
    _factor,
    cholesky,
    eigh_gen,
    solve_with,
)

__all__ = [
    "InsideT22Spectrum",
    "IllConditioned",
    "NegativityViolated",
    "GapInterval",
    "RiggedBlockPencil",
    "OperatorFunctionPencil",
    "DEFAULT_GUARD_REL",
    "DEFAULT_COND_GUARD",
    "assemble_full",
    "t22_spectrum",
    "gap_of",
    "schur",
    "schur_derivative",
    "fs_residual",
    "d1_gram",
    "opfunc_schur",
    "opfunc_from_linear",
]

#: Relative guard half-width keeping evaluation points away from t22 eigenvalues.
DEFAULT_GUARD_REL = 1e-8
#: Smallest acceptable pivot ratio when factoring the second block.
DEFAULT_COND_GUARD = 1e-13


class InsideT22Spectrum(Exception):
    """The evaluation point is within the guard band of a t22 eigenvalue."""

    def __init__(self, lam: float, nearest: float):
        self.lam = float(lam)
        self.nearest = float(nearest)
        super().__init__(f"lambda = {lam!r} is inside the guard band of t22 eigenvalue {nearest!r}")


class IllConditioned(Exception):
    """The factored second block has a pivot ratio below the conditioning guard."""


class NegativityViolated(Exception):
    """An operator-function second block failed its uniform negativity margin."""

    def __init__(self, lam: float, message: str | None = None):
        self.lam = float(lam)
        super().__init__(message or f"A22(lambda) is not negative enough at lambda = {lam!r}")


@dataclass(frozen=True)
class GapInterval:
    """Open interval of resolvent points of the pair (A22, G2), shrunk by ``guard``."""

    lo: float
    hi: float
    guard: float

    def contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def same_gap(self, other: "GapInterval") -> bool:
        return self.lo == other.lo and self.hi == other.hi


class RiggedBlockPencil:
    """Immutable container for the blocks of a linear two-by-two pencil.

    Parameters are Hermitian blocks (``HermitianMatrix`` or array-like, which
    gets validated and symmetrized) plus the rectangular coupling ``a12`` of
    shape ``(n1, n2)``.  Both weights must pass a Cholesky test at
    construction.  ``n2 = 0`` is a first-class citizen: the pencil then
    reduces to the pair ``(A11, G1)`` with an everywhere-empty second block.

    ``labels`` is an optional mapping of free-form descriptions (the example
    builders use it to record their discretization spaces and suggested
    shift parameters).
    """

    __slots__ = ("a11", "a12", "a22", "g1", "g2", "labels", "_t22")

    def __init__(self, a11, a12, a22, g1, g2, labels: Mapping[str, object] | None = None):
        self.a11 = a11 if isinstance(a11, HermitianMatrix) else HermitianMatrix(a11)
        self.a22 = a22 if isinstance(a22, HermitianMatrix) else HermitianMatrix(a22)
        self.g1 = g1 if isinstance(g1, HermitianMatrix) else HermitianMatrix(g1)
        self.g2 = g2 if isinstance(g2, HermitianMatrix) else HermitianMatrix(g2)
        a12 = np.array(a12, dtype=np.complex128, copy=True, order="C")
        if a12.ndim != 2:
            raise ValueError(f"a12 must be a matrix, got shape {a12.shape}")
        n1, n2 = self.a11.n, self.a22.n
        if a12.shape != (n1, n2):
            raise ValueError(f"a12 has shape {a12.shape}, expected {(n1, n2)}")
        if self.g1.n != n1 or self.g2.n != n2:
            raise ValueError("weight dimensions do not match the diagonal blocks")
        a12.flags.writeable = False
        self.a12 = a12
        self.labels = dict(labels) if labels else {}
        # fails fast when a weight is not a Gram matrix
        cholesky(self.g1)
        cholesky(self.g2)
        # spectrum of the reduced pair; reused by every gap query on this pencil
        t22 = np.sort(np.real(eigh_gen(self.a22, self.g2))) if n2 else np.zeros(0)
        t22.flags.writeable = False
        self._t22 = t22

    @property
    def n1(self) -> int:
        return self.a11.n

    @property
    def n2(self) -> int:
        return self.a22.n

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RiggedBlockPencil(n1={self.n1}, n2={self.n2})"


def assemble_full(P: RiggedBlockPencil, lam: float) -> HermitianMatrix:
    """Dense ``(n1+n2) x (n1+n2)`` matrix of the pencil at ``lam``."""
    top = np.hstack([P.a11.data - lam * P.g1.data, P.a12])
    bot = np.hstack([P.a12.conj().T, P.a22.data - lam * P.g2.data])
    return HermitianMatrix(np.vstack([top, bot]))


def t22_spectrum(P: RiggedBlockPencil) -> np.ndarray:
    """Ascending eigenvalues of the pair ``(A22, G2)``; empty when ``n2 = 0``."""
    return P._t22


def gap_of(P: RiggedBlockPencil, lam: float, guard_rel: float = DEFAULT_GUARD_REL) -> GapInterval:
    """Maximal open interval around ``lam`` free of t22 eigenvalues, shrunk by the guard.

    The guard half-width is ``guard_rel`` times the diameter of the t22
    spectrum (or ``guard_rel`` itself when the diameter vanishes, including
    ``n2 = 0``).  Raises :class:`InsideT22Spectrum` when ``lam`` is within one
    guard of a t22 eigenvalue.
    """
    lam = float(lam)
    w = t22_spectrum(P)
    if w.size == 0:
        return GapInterval(-math.inf, math.inf, guard_rel)
    diam = float(w[-1] - w[0])
    guard = guard_rel * diam if diam > 0.0 else guard_rel
    i = int(np.searchsorted(w, lam))
    dist = math.inf
    nearest = 0.0
    if i > 0 and lam - w[i - 1] < dist:
        dist, nearest = lam - w[i - 1], float(w[i - 1])
    if i < w.size and w[i] - lam < dist:
        dist, nearest = w[i] - lam, float(w[i])
    if dist <= guard:
        raise InsideT22Spectrum(lam, nearest)
    lo = float(w[i - 1]) + guard if i > 0 else -math.inf
    hi = float(w[i]) - guard if i < w.size else math.inf
    return GapInterval(lo, hi, guard)


def _d_factor(
    P: RiggedBlockPencil, lam: float, guard_rel: float, cond_guard: float
) -> LdlFactorization:
    """Factor ``A22 - lam*G2`` after checking lam sits in a guarded gap."""
    gap_of(P, lam, guard_rel)
    D = P.a22.data - lam * P.g2.data
    f = _factor(D.copy(), 0.0)
    mags = f.pivot_magnitudes()
    if mags.size:
        lo, hi = float(mags.min()), float(mags.max())
        if lo < cond_guard * hi:
            raise IllConditioned(
                f"pivot ratio {lo:.3e}/{hi:.3e} of the second block at lambda = {lam!r} "
                f"is below {cond_guard:.1e}"
            )
    return f


def schur(
    P: RiggedBlockPencil,
    lam: float,
    guard_rel: float = DEFAULT_GUARD_REL,
    cond_guard: float = DEFAULT_COND_GUARD,
) -> HermitianMatrix:
    """Transfer matrix ``S(lam) = (A11 - lam*G1) - A12 (A22 - lam*G2)^{-1} A12*``.

    The result is explicitly symmetrized: the solve with the second block is
    backward-stable but not exactly symmetric, and downstream inertia counts
    must see a Hermitian matrix by construction rather than by luck.
    """
    lam = float(lam)
    base = P.a11.data - lam * P.g1.data
    if P.n2 == 0:
        gap_of(P, lam, guard_rel)
        return HermitianMatrix(base)
    f = _d_factor(P, lam, guard_rel, cond_guard)
    X = solve_with(f, P.a12.conj().T)
    S = base - P.a12 @ X
    return HermitianMatrix((S + S.conj().T) / 2.0)


def schur_derivative(
    P: RiggedBlockPencil,
    lam: float,
    guard_rel: float = DEFAULT_GUARD_REL,
    cond_guard: float = DEFAULT_COND_GUARD,
) -> HermitianMatrix:
    """Derivative ``S'(lam) = -G1 - A12 D(lam)^{-1} G2 D(lam)^{-1} A12*`` (negative definite)."""
    lam = float(lam)
    if P.n2 == 0:
        gap_of(P, lam, guard_rel)
        return HermitianMatrix(-P.g1.data)
    f = _d_factor(P, lam, guard_rel, cond_guard)
    X = solve_with(f, P.a12.conj().T)
    Sd = -P.g1.data - X.conj().T @ (P.g2.data @ X)
    return HermitianMatrix((Sd + Sd.conj().T) / 2.0)


def fs_residual(
    P: RiggedBlockPencil,
    lam: float,
    guard_rel: float = DEFAULT_GUARD_REL,
    cond_guard: float = DEFAULT_COND_GUARD,
) -> float:
    """Relative defect of the congruence ``T(lam) = U* diag(S, D) U``.

    ``U = [[I, 0], [D^{-1} A12*, I]]`` is the unit completion of the
    elimination of the second block; the returned value is
    ``max|T(lam) - U* diag(S, D) U| / max|T(lam)|``.
    """
    lam = float(lam)
    full = assemble_full(P, lam).data
    scale = float(np.max(np.abs(full))) if full.size else 0.0
    if scale == 0.0:
        return 0.0
    S = schur(P, lam, guard_rel, cond_guard).data
    if P.n2 == 0:
        return float(np.max(np.abs(full - S))) / scale
    f = _d_factor(P, lam, guard_rel, cond_guard)
    X = solve_with(f, P.a12.conj().T)
    D = P.a22.data - lam * P.g2.data
    DX = D @ X
    top = np.hstack([S + X.conj().T @ DX, X.conj().T @ D])
    bot = np.hstack([DX, D])
    recon = np.vstack([top, bot])
    return float(np.max(np.abs(full - recon))) / scale


def d1_gram(P: RiggedBlockPencil, kappa: float, tau: float, sign: int = +1) -> HermitianMatrix:
    """Positive-definite Gram matrix of the shifted energy form.

    Assembles ``sign * [(A11 - kappa*G1) + A12 (tau*G2 - A22)^{-1} A12*]`` and
    certifies it by Cholesky.  Both solves can only be meaningful when
    ``tau*G2 - A22`` is positive definite, i.e. ``tau`` lies strictly above
    the top of the t22 spectrum; that precondition is enforced by the same
    Cholesky mechanism, so any invalid ``(kappa, tau)`` choice surfaces as
    :class:`~spectra.hermat.NotPositiveDefinite`.

    ``sign = -1`` validates a negative-definite form instead (the assembled
    Gram is then its negation); no automatic sign selection is attempted.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    base = P.a11.data - kappa * P.g1.data
    if P.n2:
        W = tau * P.g2.data - P.a22.data
        W = HermitianMatrix((W + W.conj().T) / 2.0)
        R = cholesky(W)  # fails iff tau is not strictly above the t22 spectrum
        Y = solve_triangular(R, P.a12.conj().T, trans="C", lower=False, check_finite=False)
        base = base + Y.conj().T @ Y
    G = sign * base
    G = HermitianMatrix((G + G.conj().T) / 2.0)
    cholesky(G)  # fails iff the (kappa, tau) choice does not yield a definite form
    return G


@dataclass
class OperatorFunctionPencil:
    """Blocks of a lambda-dependent pencil with an explicit derivative map.

    ``eval(lam)`` returns the block triple ``(A11(lam), A12(lam), A22(lam))``
    and ``deriv(lam)`` their derivatives.  Each evaluation checks the uniform
    negativity margin of the second block: the largest eigenvalue of
    ``A22(lam)`` must stay at or below ``-epsilon`` (scaled by the smallest
    eigenvalue of ``gram2`` when a weight is supplied); a violation raises
    :class:`NegativityViolated`.

    Evaluators are called sequentially unless ``reentrant`` is set; setting
    the flag asserts that concurrent calls are safe.
    """

    eval: Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray]]
    deriv: Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray]]
    epsilon: float
    gram2: HermitianMatrix | None = None
    reentrant: bool = False

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        self._margin_scale: float | None = None

    def _bound(self) -> float:
        if self.gram2 is None or self.gram2.n == 0:
            return -self.epsilon
        if self._margin_scale is None:
            self._margin_scale = float(np.linalg.eigvalsh(self.gram2.data)[0])
        return -self.epsilon * self._margin_scale

    def blocks(self, lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate and validate the block triple at ``lam``."""
        a11, a12, a22 = self.eval(lam)
        a11 = np.asarray(a11, dtype=np.complex128)
        a12 = np.asarray(a12, dtype=np.complex128)
        a22 = np.asarray(a22, dtype=np.complex128)
        if a22.size:
            top = float(np.linalg.eigvalsh((a22 + a22.conj().T) / 2.0)[-1])
            if top > self._bound():
                raise NegativityViolated(
                    lam,
                    f"largest eigenvalue {top:.6e} of A22(lambda) at lambda = {lam!r} "
                    f"exceeds the margin {self._bound():.6e}",
                )
        return a11, a12, a22

    def deriv_blocks(self, lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        d11, d12, d22 = self.deriv(lam)
        return (
            np.asarray(d11, dtype=np.complex128),
            np.asarray(d12, dtype=np.complex128),
            np.asarray(d22, dtype=np.complex128),
        )


def opfunc_schur(F: OperatorFunctionPencil, lam: float) -> HermitianMatrix:
    """Transfer matrix ``A11(lam) - A12(lam) A22(lam)^{-1} A12(lam)*`` of an operator function."""
    a11, a12, a22 = F.blocks(lam)
    base = (a11 + a11.conj().T) / 2.0
    if a22.shape[0] == 0:
        return HermitianMatrix(base)
    f = _factor(((a22 + a22.conj().T) / 2.0), 0.0)
    X = solve_with(f, a12.conj().T)
    S = base - a12 @ X
    return HermitianMatrix((S + S.conj().T) / 2.0)


def opfunc_from_linear(P: RiggedBlockPencil, epsilon: float = 1e-12) -> OperatorFunctionPencil:
    """View a linear pencil as an operator function on the gap above the t22 spectrum.

    ``eval`` freezes the usual blocks and ``deriv`` is the constant triple
    ``(-G1, 0, -G2)``.  The negativity margin inherits ``G2`` as its weight,
    so the margin check asks for ``A22 - lam*G2 <= -epsilon*G2`` in the
    smallest-eigenvalue sense.
    """
    a11, a12, a22 = P.a11.data, P.a12, P.a22.data
    g1, g2 = P.g1.data, P.g2.data
    z12 = np.zeros_like(a12)

    def ev(lam: float):
        return (a11 - lam * g1, a12, a22 - lam * g2)

    def dv(lam: float):
        return (-g1, z12, -g2)

    return OperatorFunctionPencil(eval=ev, deriv=dv, epsilon=epsilon, gram2=P.g2)
