"""Command-line front end: problem files, output formats, exit codes."""

import json
import math

import numpy as np
import pytest

import spectra.cli as cli
from spectra import __version__
from spectra.cli import ProblemSpec, UsageError, main
from spectra.pencil import RiggedBlockPencil
from spectra.solver import SolverConfig, locate, nu
from spectra.verify import CheckResult


def _enc(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def _decoupled_dict(solver=None):
    """Explicit problem with eigenvalues 1, 2, 2, 5 in the gap above -10."""
    d = {
        "explicit": {
            "n1": 4,
            "n2": 1,
            "A11": _enc(np.diag([1.0, 2.0, 2.0, 5.0])),
            "A12": _enc(np.zeros((4, 1))),
            "A22": _enc([[-10.0]]),
            "G1": _enc(np.eye(4)),
            "G2": _enc([[1.0]]),
        }
    }
    if solver:
        d["solver"] = solver
    return d


def _decoupled_pencil():
    return RiggedBlockPencil(
        np.diag([1.0, 2.0, 2.0, 5.0]), np.zeros((4, 1)), [[-10.0]], np.eye(4), [[1.0]]
    )


@pytest.fixture
def problem(tmp_path):
    def write(obj, name="problem.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj) if isinstance(obj, dict) else obj)
        return str(path)

    return write


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProblemSpec:
    def test_roundtrip_explicit(self):
        spec = ProblemSpec.from_dict(_decoupled_dict({"lambda_tol_abs": 1e-12}))
        again = ProblemSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
        assert again.to_dict() == spec.to_dict()
        P1, P2 = spec.build(), again.build()
        np.testing.assert_array_equal(P1.a11.data, P2.a11.data)
        np.testing.assert_array_equal(P1.g2.data, P2.g2.data)

    def test_roundtrip_builtin(self):
        spec = ProblemSpec.from_dict({"builtin": {"name": "quartic", "N": 4, "tau": 2.0, "kappa": 0.0}})
        assert ProblemSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()
        assert spec.build().labels["tau"] == 2.0

    def test_builtin_and_explicit_are_exclusive(self):
        with pytest.raises(UsageError):
            ProblemSpec.from_dict({**_decoupled_dict(), "builtin": {"name": "dirac", "N": 8}})
        with pytest.raises(UsageError):
            ProblemSpec.from_dict({})

    @pytest.mark.parametrize(
        "d",
        [
            {"builtin": {"name": "cubic", "N": 8}},
            {"builtin": {"name": "dirac"}},
            {"builtin": {"name": "dirac", "N": True}},
            {"builtin": {"name": "dirac", "N": 8, "mesh": "uniform"}},
            {"builtin": {"name": "dirac", "N": 8}, "solver": {"bogus": 1}},
            {"builtin": {"name": "dirac", "N": 8}, "extra": {}},
        ],
    )
    def test_rejects_malformed(self, d):
        with pytest.raises(UsageError):
            ProblemSpec.from_dict(d)

    def test_rejects_wrong_matrix_shape(self):
        d = _decoupled_dict()
        d["explicit"]["A12"] = _enc(np.zeros((1, 4)))
        with pytest.raises(UsageError):
            ProblemSpec.from_dict(d)

    def test_shift_pair_precedence(self):
        spec = ProblemSpec.from_dict({"builtin": {"name": "quartic", "N": 4, "kappa": 0.5, "tau": 3.0}})
        assert spec.kappa_tau(spec.build()) == (0.5, 3.0)
        spec = ProblemSpec.from_dict({"builtin": {"name": "quartic", "N": 4}})
        assert spec.kappa_tau(spec.build()) == (0.0, 1.0)
        spec = ProblemSpec.from_dict(_decoupled_dict())
        assert spec.kappa_tau(spec.build()) is None


class TestGapCommand:
    def test_json_output(self, problem, capsys):
        code, out, _ = _run(capsys, ["gap", "--problem", problem(_decoupled_dict()), "--lambda", "1.0"])
        assert code == 0
        doc = json.loads(out)
        assert doc["t22_spectrum"] == [pytest.approx(-10.0)]
        assert doc["gap"]["lo"] == pytest.approx(-10.0, rel=1e-6)
        assert doc["gap"]["hi"] == "inf"
        assert doc["version"] == __version__
        assert doc["config"]["max_bisections"] == 10_000

    def test_infinities_become_strings(self, problem, capsys):
        path = problem({"builtin": {"name": "transport", "N": 8}})
        code, out, _ = _run(capsys, ["gap", "--problem", path, "--lambda", "1.0"])
        assert code == 0
        doc = json.loads(out)
        assert doc["gap"] == {"lo": "-inf", "hi": "inf", "guard": pytest.approx(1e-8)}
        assert doc["t22_spectrum"] == []

    def test_csv_output(self, problem, capsys):
        code, out, _ = _run(
            capsys,
            ["gap", "--problem", problem(_decoupled_dict()), "--lambda", "1.0", "--format", "csv"],
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "field,value"
        fields = dict(line.split(",", 1) for line in lines[1:])
        assert float(fields["gap_hi"]) == math.inf
        assert float(fields["t22"]) == pytest.approx(-10.0)

    def test_point_inside_t22_spectrum(self, problem, capsys):
        code, _, err = _run(capsys, ["gap", "--problem", problem(_decoupled_dict()), "--lambda", "-10.0"])
        assert code == 3
        assert "domain error" in err


class TestEigCommand:
    def test_json_matches_library(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(capsys, ["eig", "--problem", path, "--interval", "0", "6"])
        assert code == 0
        doc = json.loads(out)
        ref = locate(_decoupled_pencil(), 0.0, 6.0)
        assert [h["multiplicity"] for h in doc["hits"]] == [1, 2, 1]
        for got, want in zip(doc["hits"], ref):
            assert got["lambda"] == want.lam
            assert got["bracket"] == [want.bracket[0], want.bracket[1]]
            assert got["negative_type"] == list(want.negative_type)
        assert not doc["budget_exceeded"]
        assert set(doc["timings"]) == {"load_s", "solve_s", "total_s"}
        assert doc["problem"] == _decoupled_dict()

    def test_csv_roundtrips_at_full_precision(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(capsys, ["eig", "--problem", path, "--interval", "0", "6", "--format", "csv"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "lambda,multiplicity,bracket_lo,bracket_hi,neg_type_max"
        ref = locate(_decoupled_pencil(), 0.0, 6.0)
        assert len(lines) == 1 + len(ref)
        for line, want in zip(lines[1:], ref):
            lam, mult, lo, hi, ntm = line.split(",")
            assert float(lam) == want.lam  # %.17g is lossless for doubles
            assert int(mult) == want.multiplicity
            assert (float(lo), float(hi)) == want.bracket
            assert float(ntm) == max(want.negative_type)

    def test_empty_window_emits_header_only(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(capsys, ["eig", "--problem", path, "--interval", "2.5", "4.5", "--format", "csv"])
        assert code == 0
        assert out == "lambda,multiplicity,bracket_lo,bracket_hi,neg_type_max\n"

    def test_budget_exhaustion_flags_partial_output(self, problem, capsys):
        path = problem(_decoupled_dict({"max_bisections": 5}))
        code, out, err = _run(capsys, ["eig", "--problem", path, "--interval", "0", "6"])
        assert code == 4
        assert "partial" in err
        doc = json.loads(out)
        assert doc["budget_exceeded"]
        assert doc["config"]["max_bisections"] == 5

    def test_interval_crossing_t22_is_domain_error(self, problem, capsys):
        code, _, err = _run(
            capsys, ["eig", "--problem", problem(_decoupled_dict()), "--interval", "-20", "6"]
        )
        assert code == 3
        assert "domain error" in err


class TestInertiaCommand:
    def test_staircase_matches_library(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(capsys, ["inertia", "--problem", path, "--grid", "0", "6", "12"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "lambda,nu"
        assert len(lines) == 14
        P = _decoupled_pencil()
        counts = []
        for line in lines[1:]:
            x, c = line.split(",")
            assert int(c) == nu(P, float(x))
            counts.append(int(c))
        assert counts == sorted(counts)

    def test_single_point_grid(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(capsys, ["inertia", "--problem", path, "--grid", "3", "3", "0"])
        assert code == 0
        assert out.splitlines()[1:] == ["3,3"]

    def test_json_format(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(
            capsys, ["inertia", "--problem", path, "--grid", "0", "6", "3", "--format", "json"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["grid"] == [0.0, 2.0, 4.0, 6.0]
        assert doc["nu"] == [nu(_decoupled_pencil(), x) for x in doc["grid"]]

    @pytest.mark.parametrize(
        "grid",
        [["6", "0", "3"], ["0", "6", "2.5"], ["0", "6", "-1"], ["1", "2", "0"]],
    )
    def test_bad_grids_are_usage_errors(self, problem, capsys, grid):
        code, _, err = _run(capsys, ["inertia", "--problem", problem(_decoupled_dict()), "--grid", *grid])
        assert code == 2
        assert "error" in err

    def test_grid_leaving_gap_is_domain_error(self, problem, capsys):
        code, _, _ = _run(
            capsys, ["inertia", "--problem", problem(_decoupled_dict()), "--grid", "-20", "6", "4"]
        )
        assert code == 3


class TestCurvesCommand:
    def test_explicit_problem_needs_flags(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, _, err = _run(
            capsys, ["curves", "--problem", path, "--grid", "0", "6", "4", "--curves", "2"]
        )
        assert code == 2
        assert "--kappa" in err

    def test_negative_counts_match_inertia(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(
            capsys,
            [
                "curves", "--problem", path, "--grid", "0", "6", "6",
                "--curves", "4", "--kappa", "0", "--tau", "-9",
            ],
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "lambda,L0,L1,L2,L3"
        P = _decoupled_pencil()
        for line in lines[1:]:
            vals = [float(v) for v in line.split(",")]
            assert sum(v < 0.0 for v in vals[1:]) == nu(P, vals[0])

    def test_builtin_uses_label_shifts(self, problem, capsys):
        path = problem({"builtin": {"name": "quartic", "N": 4}})
        code, out, _ = _run(
            capsys, ["curves", "--problem", path, "--grid", "0.5", "3.5", "3", "--curves", "2"]
        )
        assert code == 0
        assert out.splitlines()[0] == "lambda,L0,L1"

    def test_transport_has_no_valid_shift(self, problem, capsys):
        path = problem({"builtin": {"name": "transport", "N": 8}})
        code, _, _ = _run(
            capsys, ["curves", "--problem", path, "--grid", "0.5", "3.5", "3", "--curves", "2"]
        )
        assert code == 2  # no stored pair to fall back on
        code, _, _ = _run(
            capsys,
            [
                "curves", "--problem", path, "--grid", "0.5", "3.5", "3",
                "--curves", "2", "--kappa", "0", "--tau", "0",
            ],
        )
        assert code == 3  # the first block is indefinite, no shift fixes it

    def test_curve_count_validation(self, problem, capsys):
        path = problem(_decoupled_dict())
        for k in ("0", "5"):
            code, _, _ = _run(
                capsys,
                [
                    "curves", "--problem", path, "--grid", "0", "6", "3",
                    "--curves", k, "--kappa", "0", "--tau", "-9",
                ],
            )
            assert code == 2

    def test_epsilon_cap_flag(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, out, _ = _run(
            capsys,
            [
                "curves", "--problem", path, "--grid", "0", "6", "4", "--curves", "4",
                "--kappa", "0", "--tau", "-9", "--epsilon", "0.125",
            ],
        )
        assert code == 0
        vals = [float(v) for line in out.splitlines()[1:] for v in line.split(",")[1:]]
        assert max(vals) <= 0.125


class TestThreading:
    def _csv(self, capsys, problem, extra, monkeypatch=None, env=None):
        if monkeypatch is not None:
            if env is None:
                monkeypatch.delenv("SPECTRA_THREADS", raising=False)
            else:
                monkeypatch.setenv("SPECTRA_THREADS", env)
        path = problem(_decoupled_dict())
        code, out, _ = _run(
            capsys, ["inertia", "--problem", path, "--grid", "0", "6", "24", *extra]
        )
        assert code == 0
        return out

    def test_thread_count_does_not_change_bytes(self, problem, capsys, monkeypatch):
        base = self._csv(capsys, problem, [], monkeypatch)
        assert self._csv(capsys, problem, ["--threads", "4"], monkeypatch) == base
        assert self._csv(capsys, problem, [], monkeypatch, env="3") == base

    def test_curves_threading_is_deterministic(self, problem, capsys):
        path = problem(_decoupled_dict())
        args = [
            "curves", "--problem", path, "--grid", "0", "6", "24",
            "--curves", "4", "--kappa", "0", "--tau", "-9",
        ]
        _, base, _ = _run(capsys, args)
        _, threaded, _ = _run(capsys, [*args, "--threads", "5"])
        assert threaded == base

    def test_bad_thread_counts(self, problem, capsys, monkeypatch):
        path = problem(_decoupled_dict())
        code, _, _ = _run(capsys, ["inertia", "--problem", path, "--grid", "0", "6", "2", "--threads", "0"])
        assert code == 2
        monkeypatch.setenv("SPECTRA_THREADS", "many")
        code, _, _ = _run(capsys, ["inertia", "--problem", path, "--grid", "0", "6", "2"])
        assert code == 2


class TestVerifyCommand:
    def _fake(self, results, monkeypatch):
        monkeypatch.setattr(cli, "run_suite", lambda name: results)

    def test_all_passing_exits_zero(self, capsys, monkeypatch):
        self._fake([CheckResult("alpha", True, "fine", 0.01)], monkeypatch)
        code, out, _ = _run(capsys, ["verify", "random"])
        assert code == 0
        assert "[PASS] alpha" in out
        assert "1/1 checks passed" in out

    def test_any_failure_exits_one(self, capsys, monkeypatch):
        self._fake(
            [
                CheckResult("alpha", True, "fine", 0.01),
                CheckResult("beta", False, "broke", 0.02),
            ],
            monkeypatch,
        )
        code, out, _ = _run(capsys, ["verify", "random"])
        assert code == 1
        assert "[FAIL] beta" in out
        assert "1/2 checks passed" in out

    def test_unknown_suite_is_usage_error(self, capsys):
        assert main(["verify", "everything"]) == 2
        capsys.readouterr()


class TestEntryPoint:
    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_missing_subcommand(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_missing_required_flag(self, capsys):
        assert main(["gap", "--lambda", "1.0"]) == 2
        capsys.readouterr()

    def test_missing_file(self, capsys):
        assert main(["gap", "--problem", "/nonexistent.json", "--lambda", "1.0"]) == 2
        capsys.readouterr()

    def test_malformed_json(self, problem, capsys):
        path = problem("{not json", name="bad.json")
        code, _, err = _run(capsys, ["gap", "--problem", path, "--lambda", "1.0"])
        assert code == 2
        assert "not valid JSON" in err

    def test_bad_config_override(self, problem, capsys):
        path = problem(_decoupled_dict())
        code, _, _ = _run(capsys, ["gap", "--problem", path, "--lambda", "1.0", "--zero-tol", "1.0"])
        assert code == 2

    def test_out_file_matches_stdout(self, problem, capsys, tmp_path):
        path = problem(_decoupled_dict())
        dest = tmp_path / "table.csv"
        code, out, _ = _run(capsys, ["inertia", "--problem", path, "--grid", "0", "6", "6"])
        assert code == 0
        code2, silent, _ = _run(
            capsys, ["inertia", "--problem", path, "--grid", "0", "6", "6", "--out", str(dest)]
        )
        assert code2 == 0
        assert silent == ""
        assert dest.read_text() == out
