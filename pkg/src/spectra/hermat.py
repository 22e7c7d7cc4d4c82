"""Dense complex Hermitian linear algebra with an inertia-revealing LDL* factorization.

The factorization uses Bunch-Kaufman partial pivoting (pivot constant
``alpha = (1 + sqrt(17)) / 8``) and keeps the block-diagonal factor explicit,
so the inertia of the quadratic form -- the triple ``(n_neg, n_zero, n_pos)``
-- is read off block by block: a 1x1 block contributes according to its sign
against a relative zero threshold, a 2x2 pivot block is always indefinite and
contributes ``(1, 0, 1)``.

LAPACK-backed eigendecompositions (:func:`eigh`, :func:`eigh_gen`) provide an
independent route to the same counts; the two paths share no intermediate
results, so tests can cross-check one against the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "HermitianMatrix",
    "Inertia",
    "LdlFactorization",
    "SingularFactor",
    "NotPositiveDefinite",
    "NoConvergence",
    "default_zero_tol",
    "ldl_factor",
    "inertia_of",
    "solve_with",
    "cholesky",
    "eigh",
    "eigh_gen",
]

#: Bunch-Kaufman pivot selection constant; minimizes the worst-case element
#: growth ratio between consecutive 1x1 and 2x2 pivot choices.
PIVOT_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


class SingularFactor(Exception):
    """Solve attempted with a factorization whose block-diagonal has zero pivots."""


class NotPositiveDefinite(Exception):
    """A Cholesky pivot failed; ``index`` is the offending diagonal position."""

    def __init__(self, index: int, message: str | None = None):
        self.index = int(index)
        super().__init__(message or f"matrix is not positive definite (pivot {index})")


class NoConvergence(Exception):
    """The underlying eigensolver failed to converge."""


def default_zero_tol(n: int) -> float:
    """Dimension-scaled relative threshold separating zero from nonzero pivots."""
    return 1e-10 * n


class HermitianMatrix:
    """Immutable dense Hermitian matrix.

    Construction symmetrizes the input through ``(A + A*) / 2`` and records the
    pre-symmetrization defect ``max|A - A*|``.  Inputs whose defect exceeds
    ``tol * max|A|`` are rejected: silently symmetrizing a matrix that is not
    Hermitian up to rounding would hide an assembly bug upstream.

    The wrapped array is write-protected; all operations in this package treat
    the object as a value.  ``n = 0`` is allowed and every operation degrades
    gracefully to the empty case.
    """

    __slots__ = ("data", "herm_defect")

    def __init__(self, a, tol: float = 1e-12):
        a = np.array(a, dtype=np.complex128, copy=True, order="C")
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.size:
            defect = float(np.max(np.abs(a - a.conj().T)))
            scale = float(np.max(np.abs(a)))
        else:
            defect = scale = 0.0
        if defect > tol * scale:
            raise ValueError(
                f"matrix is not Hermitian: defect {defect:.3e} exceeds {tol:.1e} * {scale:.3e}"
            )
        sym = (a + a.conj().T) / 2.0
        sym.flags.writeable = False
        self.data = sym
        self.herm_defect = defect

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def maxabs(self) -> float:
        """Largest entry magnitude (0 for the empty matrix)."""
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"HermitianMatrix(n={self.n}, defect={self.herm_defect:.2e})"


@dataclass(frozen=True)
class Inertia:
    """Signature counts of a Hermitian quadratic form."""

    n_neg: int
    n_zero: int
    n_pos: int

    @property
    def total(self) -> int:
        return self.n_neg + self.n_zero + self.n_pos

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_neg, self.n_zero, self.n_pos)


@dataclass
class LdlFactorization:
    """Result of the Bunch-Kaufman factorization ``A = P^T L D L* P``.

    ``permutation`` is the index vector ``p`` with
    ``A[p][:, p] == unit_lower @ D @ unit_lower.conj().T``; ``block_diag`` is
    the tuple of 1x1 / 2x2 diagonal blocks of ``D`` in order.
    ``zero_tol_used`` is the absolute threshold ``t`` that classified the 1x1
    pivots (relative input tolerance times the largest block-entry magnitude
    encountered).
    """

    n: int
    permutation: np.ndarray
    unit_lower: np.ndarray
    block_diag: tuple[np.ndarray, ...]
    inertia: Inertia
    zero_tol_used: float
    # True when no pivoting and no fill occurred (D was already block diagonal);
    # enables an O(n k) solve path.
    plain: bool = field(default=False, repr=False)

    def block_diagonal_matrix(self) -> np.ndarray:
        D = np.zeros((self.n, self.n), dtype=np.complex128)
        k = 0
        for blk in self.block_diag:
            s = blk.shape[0]
            D[k : k + s, k : k + s] = blk
            k += s
        return D

    def reconstruct(self) -> np.ndarray:
        """Undo the factorization; used by tests to bound the backward error."""
        B = self.unit_lower @ self.block_diagonal_matrix() @ self.unit_lower.conj().T
        A = np.empty_like(B)
        A[np.ix_(self.permutation, self.permutation)] = B
        return A

    def pivot_magnitudes(self) -> np.ndarray:
        """|eigenvalue| of every diagonal block, in block order (2 values per 2x2)."""
        mags: list[float] = []
        for blk in self.block_diag:
            if blk.shape[0] == 1:
                mags.append(abs(blk[0, 0].real))
            else:
                a = blk[0, 0].real
                c = blk[1, 1].real
                half = 0.5 * (a + c)
                rad = math.hypot(0.5 * (a - c), abs(blk[1, 0]))
                mags.extend((abs(half + rad), abs(half - rad)))
        return np.asarray(mags, dtype=float)


def _inv2(E: np.ndarray) -> np.ndarray:
    det = E[0, 0] * E[1, 1] - E[0, 1] * E[1, 0]
    return np.array([[E[1, 1], -E[0, 1]], [-E[1, 0], E[0, 0]]], dtype=np.complex128) / det


def _sym_swap(W: np.ndarray, L: np.ndarray, perm: np.ndarray, built: int, i: int, j: int) -> None:
    if i == j:
        return
    W[[i, j], :] = W[[j, i], :]
    W[:, [i, j]] = W[:, [j, i]]
    if built:
        L[[i, j], :built] = L[[j, i], :built]
    perm[[i, j]] = perm[[j, i]]


def _factor(W: np.ndarray, zero_tol: float) -> LdlFactorization:
    """Bunch-Kaufman on a writable Hermitian array ``W`` (destroyed in place)."""
    n = W.shape[0]
    L = np.eye(n, dtype=np.complex128)
    perm = np.arange(n)
    blocks: list[np.ndarray] = []
    plain = True
    k = 0
    while k < n:
        akk = W[k, k].real
        if k + 1 < n:
            col = W[k + 1 :, k]
            r_off = int(np.argmax(np.abs(col)))
            colmax = abs(col[r_off])
            r = k + 1 + r_off
        else:
            colmax = 0.0
            r = k
        step = 1
        swap_to = k
        if colmax == 0.0:
            pass  # zero column below the diagonal: 1x1 pivot, possibly zero
        elif abs(akk) >= PIVOT_ALPHA * colmax:
            pass
        else:
            left = W[r, k:r]
            below = W[r + 1 :, r]
            rowmax = max(
                float(np.max(np.abs(left))) if left.size else 0.0,
                float(np.max(np.abs(below))) if below.size else 0.0,
            )
            if abs(akk) * rowmax >= PIVOT_ALPHA * colmax * colmax:
                pass
            elif abs(W[r, r].real) >= PIVOT_ALPHA * rowmax:
                swap_to = r
            else:
                step = 2
                swap_to = r
        if step == 1:
            if swap_to != k:
                _sym_swap(W, L, perm, k, k, swap_to)
                plain = False
            d = W[k, k].real
            blocks.append(np.array([[d]], dtype=np.complex128))
            if k + 1 < n and d != 0.0:
                v = W[k + 1 :, k].copy()
                if np.any(v):
                    lcol = v / d
                    L[k + 1 :, k] = lcol
                    W[k + 1 :, k + 1 :] -= np.outer(lcol, v.conj())
                    plain = False
        else:
            if swap_to != k + 1:
                _sym_swap(W, L, perm, k, k + 1, swap_to)
            plain = False
            E = W[k : k + 2, k : k + 2].copy()
            E[0, 0] = E[0, 0].real
            E[1, 1] = E[1, 1].real
            blocks.append(E)
            if k + 2 < n:
                C = W[k + 2 :, k : k + 2].copy()
                X = C @ _inv2(E)
                L[k + 2 :, k : k + 2] = X
                W[k + 2 :, k + 2 :] -= X @ C.conj().T
        k += step

    maxmag = 0.0
    for blk in blocks:
        maxmag = max(maxmag, float(np.max(np.abs(blk))))
    t = zero_tol * maxmag
    n_neg = n_zero = n_pos = 0
    for blk in blocks:
        if blk.shape[0] == 1:
            d = blk[0, 0].real
            if d < -t:
                n_neg += 1
            elif d > t:
                n_pos += 1
            else:
                n_zero += 1
        else:
            # a 2x2 Bunch-Kaufman pivot is always indefinite
            n_neg += 1
            n_pos += 1
    return LdlFactorization(
        n=n,
        permutation=perm,
        unit_lower=L,
        block_diag=tuple(blocks),
        inertia=Inertia(n_neg, n_zero, n_pos),
        zero_tol_used=t,
        plain=plain,
    )


def _as_hermitian(A) -> HermitianMatrix:
    return A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)


def ldl_factor(A, zero_tol: float | None = None) -> LdlFactorization:
    """Factor ``A = P^T L D L* P`` with Bunch-Kaufman pivoting.

    Parameters
    ----------
    A : HermitianMatrix or array_like
        Matrix to factor; arrays are validated and symmetrized first.
    zero_tol : float, optional
        Relative threshold in ``[0, 1)`` classifying 1x1 pivots as zero.
        Defaults to ``1e-10 * n``.
    """
    A = _as_hermitian(A)
    if zero_tol is None:
        zero_tol = default_zero_tol(A.n)
    if not 0.0 <= zero_tol < 1.0:
        raise ValueError(f"zero_tol must lie in [0, 1), got {zero_tol}")
    return _factor(A.data.copy(), zero_tol)


def inertia_of(A, zero_tol: float | None = None) -> Inertia:
    """Inertia ``(n_neg, n_zero, n_pos)`` of a Hermitian matrix via LDL*."""
    return ldl_factor(A, zero_tol).inertia


def _block_diag_solve(blocks: tuple[np.ndarray, ...], y: np.ndarray) -> np.ndarray:
    z = np.empty_like(y)
    k = 0
    for blk in blocks:
        if blk.shape[0] == 1:
            z[k] = y[k] / blk[0, 0].real
            k += 1
        else:
            z[k : k + 2] = _inv2(blk) @ y[k : k + 2]
            k += 2
    return z


def solve_with(f: LdlFactorization, B) -> np.ndarray:
    """Solve ``A x = B`` given ``f = ldl_factor(A)``.

    Raises :class:`SingularFactor` when the factorization carries zero pivots
    (``n_zero > 0``); use a nonzero ``zero_tol`` at factor time to control what
    counts as zero.
    """
    if f.inertia.n_zero:
        raise SingularFactor(f"factorization has {f.inertia.n_zero} zero pivot(s)")
    B = np.asarray(B, dtype=np.complex128)
    vec = B.ndim == 1
    rhs = B[:, None] if vec else B
    if rhs.shape[0] != f.n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, factorization is {f.n}x{f.n}")
    if f.n == 0 or rhs.shape[1] == 0:
        return np.zeros(B.shape, dtype=np.complex128)
    pb = rhs[f.permutation]
    if f.plain:
        w = _block_diag_solve(f.block_diag, pb)
    else:
        y = solve_triangular(f.unit_lower, pb, lower=True, unit_diagonal=True, check_finite=False)
        z = _block_diag_solve(f.block_diag, y)
        w = solve_triangular(
            f.unit_lower, z, lower=True, unit_diagonal=True, trans="C", check_finite=False
        )
    x = np.empty_like(w)
    x[f.permutation] = w
    return x[:, 0] if vec else x


def cholesky(A) -> np.ndarray:
    """Upper-triangular ``R`` with ``A = R* R``.

    Raises :class:`NotPositiveDefinite` carrying the index of the first
    failing pivot, which doubles as a definiteness certificate for callers.
    """
    A = _as_hermitian(A)
    n = A.n
    W = A.data.copy()
    R = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = W[j, j].real
        if not (d > 0.0) or not math.isfinite(d):
            raise NotPositiveDefinite(j)
        rjj = math.sqrt(d)
        R[j, j] = rjj
        if j + 1 < n:
            row = W[j, j + 1 :] / rjj
            R[j, j + 1 :] = row
            W[j + 1 :, j + 1 :] -= np.outer(row.conj(), row)
    return R


def eigh(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    A = _as_hermitian(A)
    try:
        w, v = np.linalg.eigh(A.data)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure is environmental
        raise NoConvergence(str(exc)) from exc
    return w, v


def eigh_gen(A, B, vectors: bool = False):
    """Eigenvalues of ``A x = mu B x`` with ``B`` positive definite.

    Reduces through ``B = R* R`` to an ordinary Hermitian problem; eigenvalues
    come back ascending and, when requested, eigenvectors are B-orthonormal.
    Raises :class:`NotPositiveDefinite` (from the Cholesky of ``B``) when the
    right-hand matrix is not a valid Gram matrix.
    """
    A = _as_hermitian(A)
    B = _as_hermitian(B)
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")
    R = cholesky(B)
    if A.n == 0:
        w = np.zeros(0)
        return (w, np.zeros((0, 0), dtype=np.complex128)) if vectors else w
    Z = solve_triangular(R, A.data, trans="C", lower=False, check_finite=False)
    C = solve_triangular(R, Z.conj().T, trans="C", lower=False, check_finite=False).conj().T
    C = (C + C.conj().T) / 2.0
    try:
        w, Y = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    if vectors:
        X = solve_triangular(R, Y, lower=False, check_finite=False)
        return w, X
    return w
