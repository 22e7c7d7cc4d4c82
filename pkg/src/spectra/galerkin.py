"""One-dimensional Galerkin assembly for the worked boundary-value examples.

Four finite-element families on a mesh of [0, 1] -- clamped Hermite cubics,
periodic P1 hats, elementwise-discontinuous P1, and elementwise constants --
and the bilinear forms pairing them.  Element integrands are polynomials, so
every matrix entry is integrated in closed form (no quadrature error); the
builders combine them into the block pencils of three model problems:

* ``build_example_quartic``   -- fourth-order clamped problem, second block
  carrying the negated second derivative against discontinuous P1;
* ``build_example_dirac``     -- periodic first-order system coupling P1
  against elementwise constants;
* ``build_example_transport`` -- periodic transport operator, a pencil with
  an empty second block.

The transport resolvent has an explicit integral kernel, reproduced by
:func:`resolvent_kernel_value`; :func:`resolvent_check_transport` compares
the discrete solve against exact integration of that kernel applied to the
interpolated right-hand side.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .hermat import HermitianMatrix
from .pencil import RiggedBlockPencil

__all__ = [
    "IncompatibleForm",
    "Mesh1D",
    "BasisSpec",
    "BASIS_KINDS",
    "FORMS",
    "form_matrix",
    "evaluate",
    "build_example_quartic",
    "build_example_dirac",
    "build_example_transport",
    "resolvent_kernel_value",
    "resolvent_check_transport",
]

BASIS_KINDS = ("hermite_clamped", "p1_periodic", "p1_discontinuous", "p0")

#: form name -> (trial derivative order, test derivative order, scalar factor)
FORMS: dict[str, tuple[int, int, complex]] = {
    "mass": (0, 0, 1.0),
    "grad": (1, 1, 1.0),
    "dd_vs_val": (2, 0, 1.0),
    "d_vs_val": (1, 0, 1.0),
    "i_d_vs_val": (1, 0, 1.0j),
    "dd_vs_dd": (2, 2, 1.0),
}

_MAX_ORDER = {"hermite_clamped": 2, "p1_periodic": 1, "p1_discontinuous": 1, "p0": 0}


class IncompatibleForm(Exception):
    """The requested form needs more derivatives than a basis can supply in L2."""


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing nodes spanning [0, 1]."""

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("mesh must span [0, 1]")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        nodes = nodes.copy()
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, N: int) -> "Mesh1D":
        return cls(np.linspace(0.0, 1.0, N + 1))

    @property
    def N(self) -> int:
        return self.nodes.size - 1


@dataclass(frozen=True)
class BasisSpec:
    """A finite-element family bound to a mesh."""

    kind: str
    mesh: Mesh1D

    def __post_init__(self) -> None:
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; pick one of {BASIS_KINDS}")
        if self.kind == "hermite_clamped" and self.mesh.N < 2:
            raise ValueError("hermite_clamped needs at least 2 elements")
        if self.kind == "p1_periodic" and self.mesh.N < 2:
            raise ValueError("p1_periodic needs at least 2 elements")

    @property
    def dim(self) -> int:
        N = self.mesh.N
        if self.kind == "hermite_clamped":
            return 2 * (N - 1)
        if self.kind == "p1_periodic":
            return N
        if self.kind == "p1_discontinuous":
            return 2 * N
        return N  # p0


def _local_shapes(basis: BasisSpec, e: int) -> list[tuple[np.ndarray, int | None]]:
    """Shape polynomials on element ``e`` in the local variable s in [0, h].

    Returns ``(coefficients low->high, global dof index or None)`` per local
    dof; clamped Hermite dofs at the domain endpoints map to ``None``.
    """
    nodes = basis.mesh.nodes
    h = nodes[e + 1] - nodes[e]
    if basis.kind == "p0":
        return [(np.array([1.0]), e)]
    lin0 = np.array([1.0, -1.0 / h])
    lin1 = np.array([0.0, 1.0 / h])
    if basis.kind == "p1_periodic":
        N = basis.mesh.N
        return [(lin0, e % N), (lin1, (e + 1) % N)]
    if basis.kind == "p1_discontinuous":
        return [(lin0, 2 * e), (lin1, 2 * e + 1)]
    # hermite_clamped: value/slope pairs at both element ends
    N = basis.mesh.N

    def gdof(node: int, comp: int) -> int | None:
        if node == 0 or node == N:
            return None
        return 2 * (node - 1) + comp

    H_val0 = np.array([1.0, 0.0, -3.0 / h**2, 2.0 / h**3])
    H_slp0 = np.array([0.0, 1.0, -2.0 / h, 1.0 / h**2])
    H_val1 = np.array([0.0, 0.0, 3.0 / h**2, -2.0 / h**3])
    H_slp1 = np.array([0.0, 0.0, -1.0 / h, 1.0 / h**2])
    return [
        (H_val0, gdof(e, 0)),
        (H_slp0, gdof(e, 1)),
        (H_val1, gdof(e + 1, 0)),
        (H_slp1, gdof(e + 1, 1)),
    ]


def _poly_integral(p: np.ndarray, q: np.ndarray, h: float) -> float:
    """Exact integral of ``p(s) q(s)`` over [0, h]."""
    c = npoly.polymul(p, q)
    powers = h ** np.arange(1, c.size + 1)
    return float(np.sum(c * powers / np.arange(1, c.size + 1)))


def form_matrix(trial: BasisSpec, test: BasisSpec, form: str) -> np.ndarray:
    """Assemble ``M[i, j] = factor * integral of (D^a trial_j)(D^b test_i)``.

    Trial and test spaces must share the mesh; the derivative orders of the
    requested form must not exceed what each family represents in L2
    (:class:`IncompatibleForm` otherwise).  All shape functions are real, so
    conjugation of the test factor is a no-op; the scalar ``factor`` carries
    any imaginary weight.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}; pick one of {sorted(FORMS)}")
    if not np.array_equal(trial.mesh.nodes, test.mesh.nodes):
        raise ValueError("trial and test bases live on different meshes")
    a, b, factor = FORMS[form]
    if a > _MAX_ORDER[trial.kind]:
        raise IncompatibleForm(
            f"form {form!r} takes {a} derivative(s) of the trial space {trial.kind!r}"
        )
    if b > _MAX_ORDER[test.kind]:
        raise IncompatibleForm(
            f"form {form!r} takes {b} derivative(s) of the test space {test.kind!r}"
        )
    M = np.zeros((test.dim, trial.dim), dtype=np.complex128)
    nodes = trial.mesh.nodes
    for e in range(trial.mesh.N):
        h = nodes[e + 1] - nodes[e]
        trial_shapes = _local_shapes(trial, e)
        test_shapes = _local_shapes(test, e)
        for pj, gj in trial_shapes:
            if gj is None:
                continue
            dpj = npoly.polyder(pj, a) if a else pj
            for qi, gi in test_shapes:
                if gi is None:
                    continue
                dqi = npoly.polyder(qi, b) if b else qi
                M[gi, gj] += factor * _poly_integral(dpj, dqi, h)
    return M


def evaluate(basis: BasisSpec, coeffs, x, deriv: int = 0) -> np.ndarray:
    """Pointwise values of a coefficient vector (or its derivative) at ``x``."""
    coeffs = np.asarray(coeffs)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape, dtype=np.complex128)
    nodes = basis.mesh.nodes
    e_idx = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, basis.mesh.N - 1)
    for e in np.unique(e_idx):
        mask = e_idx == e
        s = x[mask] - nodes[e]
        for p, g in _local_shapes(basis, int(e)):
            if g is None:
                continue
            dp = npoly.polyder(p, deriv) if deriv else p
            out[mask] += coeffs[g] * npoly.polyval(s, dp)
    return out


def build_example_quartic(
    N: int, kappa: float = 0.0, tau: float = 1.0
) -> RiggedBlockPencil:
    """Fourth-order clamped problem as a block pencil on a uniform mesh.

    First component: clamped Hermite cubics with the gradient form as A11 and
    the H1-type mass as weight.  Second component: discontinuous P1 carrying
    the negated second derivative of the first component, with zero A22 and
    its own mass as weight.  The pair ``(kappa, tau)`` recorded in the labels
    is a valid shift choice for :func:`~spectra.pencil.d1_gram`.
    """
    if N < 2:
        raise ValueError("need N >= 2 elements")
    mesh = Mesh1D.uniform(N)
    her = BasisSpec("hermite_clamped", mesh)
    p1d = BasisSpec("p1_discontinuous", mesh)
    a11 = form_matrix(her, her, "grad")
    a21 = -form_matrix(her, p1d, "dd_vs_val")
    a12 = a21.conj().T
    n2 = p1d.dim
    a22 = np.zeros((n2, n2))
    g1 = form_matrix(her, her, "mass")
    g2 = form_matrix(p1d, p1d, "mass")
    labels = {
        "space1": "clamped Hermite cubics",
        "space2": "discontinuous P1",
        "kappa": float(kappa),
        "tau": float(tau),
    }
    return RiggedBlockPencil(a11, a12, a22, g1, g2, labels)


def build_example_dirac(N: int) -> RiggedBlockPencil:
    """Periodic first-order system as a block pencil on a uniform mesh.

    A11 is the Hermitian form of ``i d/dx`` on periodic P1, the coupling
    feeds the first derivative into elementwise constants, A22 is zero, and
    the weights are the two mass matrices.  The labels record a shift pair
    that renders the associated energy form positive definite.
    """
    if N < 3:
        raise ValueError("need N >= 3 elements")
    mesh = Mesh1D.uniform(N)
    p1p = BasisSpec("p1_periodic", mesh)
    p0 = BasisSpec("p0", mesh)
    a11 = form_matrix(p1p, p1p, "i_d_vs_val")
    a21 = form_matrix(p1p, p0, "d_vs_val")
    a12 = a21.conj().T
    a22 = np.zeros((N, N))
    g1 = form_matrix(p1p, p1p, "mass")
    g2 = form_matrix(p0, p0, "mass")
    labels = {
        "space1": "periodic P1",
        "space2": "elementwise constants",
        "kappa": -1.0,
        "tau": 1.0,
    }
    return RiggedBlockPencil(a11, a12, a22, g1, g2, labels)


def build_example_transport(N: int) -> RiggedBlockPencil:
    """Periodic transport operator ``-i d/dx`` as a pencil with an empty second block."""
    if N < 3:
        raise ValueError("need N >= 3 elements")
    mesh = Mesh1D.uniform(N)
    p1p = BasisSpec("p1_periodic", mesh)
    a11 = -form_matrix(p1p, p1p, "i_d_vs_val")
    g1 = form_matrix(p1p, p1p, "mass")
    a12 = np.zeros((N, 0))
    empty = np.zeros((0, 0))
    labels = {"space1": "periodic P1"}
    return RiggedBlockPencil(a11, a12, empty, g1, empty, labels)


def resolvent_kernel_value(x: float, t: float) -> complex:
    """Integral kernel of ``(transport - 1)^{-1}`` on the periodic unit interval.

    ``K(x, t) = i e^{i(x-t)} / (1 - e^{i})`` for ``x >= t`` and
    ``-i e^{i(x-t)} / (1 - e^{-i})`` for ``x < t``; the two one-sided limits
    at ``x = t`` differ by the unit jump ``i`` that produces the delta when
    the operator is applied.
    """
    phase = cmath.exp(1j * (x - t))
    if x >= t:
        return 1j * phase / (1.0 - cmath.exp(1j))
    return -1j * phase / (1.0 - cmath.exp(-1j))


# 5-point Gauss-Legendre nodes/weights on [0, 1]
_GAUSS_X = (np.array([-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683, 0.906179845938664]) + 1.0) / 2.0
_GAUSS_W = np.array([0.236926885056189, 0.478628670499366, 0.568888888888889, 0.478628670499366, 0.236926885056189]) / 2.0


def resolvent_check_transport(N: int, f) -> float:
    """Relative L2 gap between the discrete resolvent and the exact kernel image.

    ``f`` holds nodal samples (periodic P1 coefficients) of the right-hand
    side.  The discrete side solves ``(A11 - G1) u = G1 f``; the reference is
    the kernel applied to the *interpolated* right-hand side, integrated in
    closed form elementwise (the integrand is ``e^{-it}`` times a linear
    polynomial), so the comparison isolates the projection error of the
    solve.  Both sides are compared in L2 via per-element Gauss quadrature.
    """
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (N,):
        raise ValueError(f"expected {N} nodal samples, got shape {f.shape}")
    P = build_example_transport(N)
    u = np.linalg.solve(P.a11.data - P.g1.data, P.g1.data @ f)

    mesh = Mesh1D.uniform(N)
    basis = BasisSpec("p1_periodic", mesh)
    nodes = mesh.nodes
    fn = np.append(f, f[0])  # wrap nodal values

    # antiderivative of e^{-it} (alpha + beta t) is e^{-it} (i alpha + beta (i t + 1))
    def anti(alpha: np.ndarray, beta: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.exp(-1j * t) * (1j * alpha + beta * (1j * t + 1.0))

    h = np.diff(nodes)
    beta = (fn[1:] - fn[:-1]) / h
    alpha = fn[:-1] - beta * nodes[:-1]
    seg = anti(alpha, beta, nodes[1:]) - anti(alpha, beta, nodes[:-1])
    cum = np.concatenate([[0.0], np.cumsum(seg)])  # integral of e^{-it} f_h on [0, node_e]

    xq = (nodes[:-1, None] + h[:, None] * _GAUSS_X[None, :]).ravel()
    wq = (h[:, None] * _GAUSS_W[None, :]).ravel()
    e_of_x = np.repeat(np.arange(N), _GAUSS_X.size)
    I1 = cum[e_of_x] + anti(alpha[e_of_x], beta[e_of_x], xq) - anti(
        alpha[e_of_x], beta[e_of_x], nodes[e_of_x]
    )
    I2 = cum[-1] - I1
    w_exact = 1j * np.exp(1j * xq) * (
        I1 / (1.0 - np.exp(1j)) - I2 / (1.0 - np.exp(-1j))
    )
    u_h = evaluate(basis, u, xq)
    num = float(np.sqrt(np.sum(wq * np.abs(u_h - w_exact) ** 2)))
    den = float(np.sqrt(np.sum(wq * np.abs(w_exact) ** 2)))
    return num / den if den > 0.0 else num
