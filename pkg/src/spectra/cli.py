"""Command-line front end for gap localization runs.

Subcommands: ``gap`` (weight-block spectrum and the gap containing a point),
``eig`` (eigenvalue localization on an interval), ``inertia`` (counting
function on a grid), ``curves`` (capped eigenvalue-curve table), ``verify``
(the named verification suites).  Problems come from JSON files -- either a
named builtin with a mesh size or explicit blocks as nested ``[re, im]``
arrays -- and results go to stdout or ``--out`` as JSON or CSV.

Exit codes: 0 success, 1 verification failure, 2 usage or malformed input,
3 domain error (point inside the weight-block spectrum, interval leaving its
gap, definiteness violations), 4 bisection budget exceeded (partial results
are still emitted and flagged).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .galerkin import build_example_dirac, build_example_quartic, build_example_transport
from .hermat import NotPositiveDefinite
from .pencil import (
    IllConditioned,
    InsideT22Spectrum,
    NegativityViolated,
    RiggedBlockPencil,
    gap_of,
    t22_spectrum,
)
from .solver import (
    BisectionBudgetExceeded,
    GapMismatch,
    SolverConfig,
    TypeViolation,
    lambda_curves,
    locate,
    nu,
)
from .verify import SUITES, run_suite

__all__ = ["ProblemSpec", "RunReport", "UsageError", "main", "console_main"]

_BUILTINS = {
    "quartic": build_example_quartic,
    "dirac": build_example_dirac,
    "transport": build_example_transport,
}
_CONFIG_KEYS = ("lambda_tol_abs", "lambda_tol_rel", "zero_tol", "epsilon_cap", "max_bisections")
_DOMAIN_ERRORS = (
    InsideT22Spectrum,
    GapMismatch,
    NotPositiveDefinite,
    NegativityViolated,
    IllConditioned,
    TypeViolation,
)


class UsageError(Exception):
    """Malformed problem file or inconsistent flags (exit code 2)."""


def _decode_matrix(obj, name: str, rows: int, cols: int) -> np.ndarray:
    """Nested ``[re, im]`` arrays -> complex matrix of the expected shape."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    arr = np.asarray(obj, dtype=float)
    if arr.shape != (rows, cols, 2):
        raise UsageError(
            f"matrix {name!r}: expected {rows} x {cols} entries of [re, im], "
            f"got an array of shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def _encode_matrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


@dataclass
class ProblemSpec:
    """Parsed problem file: one builtin reference or explicit blocks.

    ``builtin`` holds the raw ``{name, N, kappa?, tau?}`` mapping; explicit
    problems keep their decoded complex blocks.  ``solver`` carries the raw
    config overrides from the file.  ``to_dict`` inverts ``from_dict`` up to
    float widening, so parse -> emit -> parse is the identity.
    """

    builtin: dict | None = None
    n1: int = 0
    n2: int = 0
    blocks: dict[str, np.ndarray] = field(default_factory=dict)
    solver: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        if not isinstance(d, dict):
            raise UsageError("problem file must hold a JSON object")
        unknown = set(d) - {"builtin", "explicit", "solver"}
        if unknown:
            raise UsageError(f"unknown problem keys: {sorted(unknown)}")
        solver = d.get("solver", {})
        if not isinstance(solver, dict):
            raise UsageError('"solver" must be an object of config overrides')
        bad = set(solver) - set(_CONFIG_KEYS)
        if bad:
            raise UsageError(f"unknown solver keys: {sorted(bad)} (allowed: {_CONFIG_KEYS})")
        if ("builtin" in d) == ("explicit" in d):
            raise UsageError('problem file needs exactly one of "builtin" or "explicit"')
        if "builtin" in d:
            b = d["builtin"]
            if not isinstance(b, dict) or "name" not in b or "N" not in b:
                raise UsageError('"builtin" needs at least {"name": ..., "N": ...}')
            extra = set(b) - {"name", "N", "kappa", "tau"}
            if extra:
                raise UsageError(f"unknown builtin keys: {sorted(extra)}")
            if b["name"] not in _BUILTINS:
                raise UsageError(f'unknown builtin {b["name"]!r}; pick one of {sorted(_BUILTINS)}')
            if not isinstance(b["N"], int) or isinstance(b["N"], bool):
                raise UsageError('"N" must be an integer')
            return cls(builtin=dict(b), solver=dict(solver))
        e = d["explicit"]
        need = {"n1", "n2", "A11", "A12", "A22", "G1", "G2"}
        if not isinstance(e, dict) or set(e) != need:
            raise UsageError(f'"explicit" must hold exactly the keys {sorted(need)}')
        n1, n2 = e["n1"], e["n2"]
        for label, n in (("n1", n1), ("n2", n2)):
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise UsageError(f'"{label}" must be a nonnegative integer')
        blocks = {
            "A11": _decode_matrix(e["A11"], "A11", n1, n1),
            "A12": _decode_matrix(e["A12"], "A12", n1, n2),
            "A22": _decode_matrix(e["A22"], "A22", n2, n2),
            "G1": _decode_matrix(e["G1"], "G1", n1, n1),
            "G2": _decode_matrix(e["G2"], "G2", n2, n2),
        }
        return cls(n1=n1, n2=n2, blocks=blocks, solver=dict(solver))

    def to_dict(self) -> dict:
        out: dict = {}
        if self.builtin is not None:
            out["builtin"] = dict(self.builtin)
        else:
            out["explicit"] = {
                "n1": self.n1,
                "n2": self.n2,
                **{k: _encode_matrix(self.blocks[k]) for k in ("A11", "A12", "A22", "G1", "G2")},
            }
        if self.solver:
            out["solver"] = dict(self.solver)
        return out

    def build(self) -> RiggedBlockPencil:
        if self.builtin is not None:
            name, N = self.builtin["name"], self.builtin["N"]
            if name == "quartic":
                kw = {k: self.builtin[k] for k in ("kappa", "tau") if k in self.builtin}
                return _BUILTINS[name](N, **kw)
            return _BUILTINS[name](N)
        b = self.blocks
        return RiggedBlockPencil(b["A11"], b["A12"], b["A22"], b["G1"], b["G2"])

    def kappa_tau(self, P: RiggedBlockPencil) -> tuple[float, float] | None:
        """Shift pair for the energy Gram: file values, else builder labels."""
        if self.builtin is not None and "kappa" in self.builtin and "tau" in self.builtin:
            return float(self.builtin["kappa"]), float(self.builtin["tau"])
        labels = P.labels or {}
        if "kappa" in labels and "tau" in labels:
            return float(labels["kappa"]), float(labels["tau"])
        return None


@dataclass
class RunReport:
    """Everything one localization run produced, JSON-ready."""

    problem: dict
    gap: dict
    hits: list[dict]
    timings: dict[str, float]
    version: str
    config: dict
    budget_exceeded: bool = False

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "gap": self.gap,
            "hits": self.hits,
            "timings": self.timings,
            "version": self.version,
            "config": self.config,
            "budget_exceeded": self.budget_exceeded,
        }


def _load_spec(args: argparse.Namespace) -> ProblemSpec:
    try:
        with open(args.problem, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.problem}: not valid JSON ({exc})") from exc
    return ProblemSpec.from_dict(data)


def _effective_config(spec: ProblemSpec, args: argparse.Namespace) -> SolverConfig:
    kw = dict(spec.solver)
    for attr, key in (
        ("tol_abs", "lambda_tol_abs"),
        ("tol_rel", "lambda_tol_rel"),
        ("zero_tol", "zero_tol"),
        ("epsilon", "epsilon_cap"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            kw[key] = v
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _config_echo(cfg: SolverConfig) -> dict:
    return {k: getattr(cfg, k) for k in _CONFIG_KEYS}


def _threads(args: argparse.Namespace) -> int:
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        raw = os.environ.get("SPECTRA_THREADS", "1")
        try:
            n = int(raw)
        except ValueError as exc:
            raise UsageError(f"SPECTRA_THREADS={raw!r} is not an integer") from exc
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _map_ordered(fn, xs, threads: int) -> list:
    """Evaluate ``fn`` over ``xs`` preserving order, optionally on a pool."""
    if threads <= 1 or len(xs) <= 1:
        return [fn(x) for x in xs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, xs))


def _num(x: float):
    """JSON-safe number: infinities become strings."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _g17(x: float) -> str:
    return "%.17g" % x


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args: argparse.Namespace, obj: dict) -> None:
    _emit(args, json.dumps(obj, indent=2) + "\n")


def _emit_csv(args: argparse.Namespace, header: str, rows: list[str]) -> None:
    _emit(args, "\n".join([header, *rows]) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gap(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    P = spec.build()
    cfg = _effective_config(spec, args)
    gap = gap_of(P, args.lam)
    t22 = [float(t) for t in t22_spectrum(P)]
    if args.format == "csv":
        rows = [f"gap_lo,{_g17(gap.lo)}", f"gap_hi,{_g17(gap.hi)}", f"guard,{_g17(gap.guard)}"]
        rows += [f"t22,{_g17(t)}" for t in t22]
        _emit_csv(args, "field,value", rows)
    else:
        _emit_json(
            args,
            {
                "problem": spec.to_dict(),
                "lambda": args.lam,
                "t22_spectrum": t22,
                "gap": {"lo": _num(gap.lo), "hi": _num(gap.hi), "guard": gap.guard},
                "version": __version__,
                "config": _config_echo(cfg),
            },
        )
    return 0


def _hit_dict(h) -> dict:
    return {
        "lambda": h.lam,
        "multiplicity": h.multiplicity,
        "bracket": [h.bracket[0], h.bracket[1]],
        "negative_type": list(h.negative_type or ()),
    }


def _hit_row(h) -> str:
    ntm = max(h.negative_type) if h.negative_type else float("nan")
    return ",".join(
        [_g17(h.lam), str(h.multiplicity), _g17(h.bracket[0]), _g17(h.bracket[1]), _g17(ntm)]
    )


def cmd_eig(args: argparse.Namespace) -> int:
    t_start = time.perf_counter()
    spec = _load_spec(args)
    P = spec.build()
    cfg = _effective_config(spec, args)
    a, b = args.interval
    t_loaded = time.perf_counter()
    exceeded = False
    try:
        hits = locate(P, a, b, cfg)
    except BisectionBudgetExceeded as exc:
        hits = exc.hits
        exceeded = True
        print(f"warning: {exc}; emitting partial results", file=sys.stderr)
    t_solved = time.perf_counter()
    if args.format == "csv":
        _emit_csv(
            args,
            "lambda,multiplicity,bracket_lo,bracket_hi,neg_type_max",
            [_hit_row(h) for h in hits],
        )
    else:
        gap = gap_of(P, a)
        report = RunReport(
            problem=spec.to_dict(),
            gap={"lo": _num(gap.lo), "hi": _num(gap.hi), "guard": gap.guard},
            hits=[_hit_dict(h) for h in hits],
            timings={
                "load_s": t_loaded - t_start,
                "solve_s": t_solved - t_loaded,
                "total_s": time.perf_counter() - t_start,
            },
            version=__version__,
            config=_config_echo(cfg),
            budget_exceeded=exceeded,
        )
        _emit_json(args, report.to_dict())
    return 4 if exceeded else 0


def _parse_grid(args: argparse.Namespace) -> np.ndarray:
    a, b, m = args.grid
    if m != int(m) or int(m) < 0:
        raise UsageError(f"grid subdivision count must be a nonnegative integer, got {m!r}")
    m = int(m)
    if m == 0:
        if a != b:
            raise UsageError("a zero-subdivision grid needs identical endpoints")
        return np.array([a])
    if not a < b:
        raise UsageError(f"grid needs a < b, got [{a}, {b}]")
    return np.linspace(a, b, m + 1)


def cmd_inertia(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    P = spec.build()
    cfg = _effective_config(spec, args)
    grid = _parse_grid(args)
    first = gap_of(P, float(grid[0]))
    for x in grid[1:]:
        if not gap_of(P, float(x)).same_gap(first):
            raise GapMismatch(f"grid leaves its gap at lambda = {x}")
    counts = _map_ordered(lambda x: nu(P, float(x), cfg), list(grid), _threads(args))
    if args.format == "json":
        _emit_json(
            args,
            {
                "problem": spec.to_dict(),
                "grid": [float(x) for x in grid],
                "nu": counts,
                "version": __version__,
                "config": _config_echo(cfg),
            },
        )
    else:
        _emit_csv(args, "lambda,nu", [f"{_g17(x)},{c}" for x, c in zip(grid, counts)])
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    P = spec.build()
    cfg = _effective_config(spec, args)
    grid = _parse_grid(args)
    k = args.curves
    if not 1 <= k <= P.n1:
        raise UsageError(f"--curves must lie in [1, {P.n1}]")
    if (args.kappa is None) != (args.tau is None):
        raise UsageError("--kappa and --tau must be given together")
    if args.kappa is not None:
        kappa, tau = args.kappa, args.tau
    elif (pair := spec.kappa_tau(P)) is not None:
        kappa, tau = pair
    else:
        raise UsageError(
            "no shift pair available: pass --kappa and --tau (this problem carries no default)"
        )
    threads = _threads(args)
    chunks = [c for c in np.array_split(grid, threads) if c.size]
    tables = _map_ordered(lambda c: lambda_curves(P, kappa, tau, c, k, cfg), chunks, threads)
    curves = np.hstack([t.curves for t in tables])
    if args.format == "json":
        _emit_json(
            args,
            {
                "problem": spec.to_dict(),
                "grid": [float(x) for x in grid],
                "epsilon": tables[0].epsilon,
                "kappa": kappa,
                "tau": tau,
                "curves": [[float(v) for v in row] for row in curves],
                "version": __version__,
                "config": _config_echo(cfg),
            },
        )
    else:
        header = "lambda," + ",".join(f"L{i}" for i in range(k))
        rows = [
            _g17(x) + "," + ",".join(_g17(v) for v in curves[:, j])
            for j, x in enumerate(grid)
        ]
        _emit_csv(args, header, rows)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite)
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.name} ({r.seconds:.2f}s)")
        lines.append(f"    {r.detail}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed in suite {args.suite!r}")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if n_pass == len(results) else 1


# ---------------------------------------------------------------------------
# parser and entry points


def _add_common(sp: argparse.ArgumentParser, default_format: str) -> None:
    sp.add_argument("--problem", required=True, metavar="FILE", help="JSON problem file")
    sp.add_argument("--tol-abs", type=float, help="absolute bracket tolerance")
    sp.add_argument("--tol-rel", type=float, help="relative bracket tolerance")
    sp.add_argument("--zero-tol", type=float, help="pivot classification tolerance")
    sp.add_argument("--epsilon", type=float, help="curve cap value")
    sp.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    sp.add_argument("--format", choices=("csv", "json"), default=default_format)
    sp.add_argument("--threads", type=int, help="parallel lambda evaluations (or SPECTRA_THREADS)")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spectra",
        description="Eigenvalue localization in spectral gaps of block operator pencils.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gap", help="weight-block spectrum and the gap containing a point")
    _add_common(sp, "json")
    sp.add_argument("--lambda", dest="lam", type=float, required=True, metavar="X")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("eig", help="localize eigenvalues on an interval inside one gap")
    _add_common(sp, "json")
    sp.add_argument("--interval", nargs=2, type=float, required=True, metavar=("A", "B"))
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("inertia", help="counting function on a grid")
    _add_common(sp, "csv")
    sp.add_argument("--grid", nargs=3, type=float, required=True, metavar=("A", "B", "M"))
    sp.set_defaults(func=cmd_inertia)

    sp = sub.add_parser("curves", help="capped eigenvalue-curve table on a grid")
    _add_common(sp, "csv")
    sp.add_argument("--grid", nargs=3, type=float, required=True, metavar=("A", "B", "M"))
    sp.add_argument("--curves", type=int, required=True, metavar="K")
    sp.add_argument("--kappa", type=float, help="energy-Gram shift (with --tau)")
    sp.add_argument("--tau", type=float, help="energy-Gram shift (with --kappa)")
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("verify", help="run a named verification suite")
    sp.add_argument("suite", choices=sorted(SUITES))
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except BisectionBudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main(sys.argv[1:]))
