"""End-to-end acceptance: dual-route oracle equivalence and the example problems.

Each test exercises one acceptance criterion through the verification layer
(:mod:`spectra.verify`), which pins every tolerance and time budget as a module
constant and caches the expensive shared artifacts, then prints exactly one
pass/fail line.  Run with ``pytest -v -s tests/test_acceptance.py`` to see the
lines as they appear.
"""

from spectra import verify


def _report(label: str, *results) -> None:
    ok = all(r.passed for r in results)
    detail = "; ".join(r.detail for r in results)
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def test_criterion_01_random_pencils_match_dense_solve():
    _report("random-pencil localization vs dense eigensolve", verify.check_random_locate_vs_dense())


def test_criterion_02_inertia_invariant_under_congruence():
    _report("inertia invariance under congruence", verify.check_sylvester_invariance())


def test_criterion_03_block_factorization_residual():
    _report("block factorization residual", verify.check_fs_factorization_residual())


def test_criterion_04_transfer_matrix_monotonicity():
    _report("transfer-matrix monotonicity margin", verify.check_schur_monotonicity())


def test_criterion_05_fourth_order_example_vs_shooting():
    _report("fourth-order example vs shooting roots", verify.check_quartic_example())


def test_criterion_06_first_order_example_vs_closed_form():
    _report("first-order system vs closed-form spectrum", verify.check_dirac_example())


def test_criterion_07_transport_example_and_resolvent():
    _report("transport spectrum and resolvent decay", verify.check_transport_example())


def test_criterion_08_counting_identities():
    _report(
        "counting identities on located spectra",
        verify.check_random_counting_identities(),
        verify.check_quartic_counting_identities(),
    )


def test_criterion_09_negative_type_certification():
    _report(
        "negative-type certificates and nonlinear scan",
        verify.check_random_negative_type(),
        verify.check_opfunc_quadratic_scan(),
    )


def test_criterion_10_kernel_lift_residuals():
    _report(
        "kernel lift residuals on located eigenvalues",
        verify.check_random_kernel_lift(),
        verify.check_quartic_kernel_lift(),
    )
