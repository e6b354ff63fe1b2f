"""Command-line front end: ``ephier <subcommand> ...``.

Exit codes: 0 on success, 1 on a domain error (bad order, inconsistent
classification, ...), 2 on usage errors including unreadable input files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import __version__
from .conversion import conversion_witness
from .errors import ArgumentError, EPHError
from .lieb import find_degeneracies, parse_range, scan, scan_csv
from .liouville import effective_qubit, effective_qutrit, qutrit_ep_rates
from .matrixcore import (
    DEFAULT_TOL,
    MatrixFormatError,
    Tolerances,
    char_poly,
    classify,
    dumps_matrix,
    matrix_from_json,
    metric_signature,
)
from .partitions import Partition, emit_dot, hierarchy_dag
from .signed import Pseudometric, SignedDiagram, signed_hierarchy_dag


class UsageError(Exception):
    """Bad invocation or unreadable input; maps to exit code 2."""


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("EPH_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"EPH_SEED must be an integer, got {env!r}") from exc


def _tolerances(args: argparse.Namespace) -> Tolerances:
    rank_rtol = args.tol if getattr(args, "tol", None) is not None else args.rank_rtol
    try:
        return Tolerances(rank_rtol, args.rank_atol, args.eig_cluster_tol, args.degeneracy_tol)
    except EPHError as exc:
        raise UsageError(str(exc)) from exc


def _read_json(path: str) -> object:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _read_matrix(path: str) -> np.ndarray:
    try:
        return matrix_from_json(_read_json(path))
    except MatrixFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _parse_eta(text: str) -> Pseudometric:
    try:
        return Pseudometric.parse(text)
    except ArgumentError as exc:
        raise UsageError(f"--eta: {exc}") from exc


def _parse_float(text: str, flag: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"{flag} expects a number, got {text!r}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


# --- subcommands -------------------------------------------------------------------

def cmd_hierarchy(args: argparse.Namespace, out: TextIO) -> int:
    if args.eta:
        metric = _parse_eta(args.eta)
        if metric.dim != args.n:
            raise UsageError(f"--eta {args.eta} has dimension {metric.dim}, expected {args.n}")
        dag = signed_hierarchy_dag(metric.p, metric.q)
    else:
        dag = hierarchy_dag(args.n)
    if args.dot:
        _write(args.dot, emit_dot(dag, args.labels))
    if args.json:
        out.write(json.dumps(dag.to_json(), indent=2) + "\n")
        return 0
    out.write(f"{len(dag.nodes)} types, {len(dag.cover_edges)} covering edges\n")
    for node in dag.nodes:
        below = ", ".join(str(x) for x in dag.successors(node)) or "-"
        out.write(f"  {str(node):<24} -> {below}\n")
    return 0


def cmd_classify(args: argparse.Namespace, out: TextIO) -> int:
    tol = _tolerances(args)
    h = _read_matrix(args.matrix)
    eta = _read_matrix(args.eta) if args.eta else None
    if eta is not None and eta.shape != h.shape:
        raise UsageError("metric and matrix dimensions differ")
    results = classify(h, eta, tol)
    if args.json:
        report = {"clusters": [r.to_json() for r in results]}
        if eta is not None:
            report["metric_signature"] = list(metric_signature(eta))
        out.write(json.dumps(report, indent=2) + "\n")
        return 0
    out.write(f"{'eigenvalue':<36} {'mult':>4}  {'partition':<14} signed candidates\n")
    for r in results:
        cands = ", ".join(str(d) for d in r.signed_candidates) or "-"
        flag = "  [low confidence]" if r.low_confidence else ""
        out.write(f"{_fmt_complex(r.eigenvalue):<36} {r.multiplicity:>4}  {str(r.partition):<14} {cands}{flag}\n")
    return 0


def cmd_charpoly(args: argparse.Namespace, out: TextIO) -> int:
    coeffs = char_poly(_read_matrix(args.matrix))
    if args.json:
        out.write(json.dumps({"p": [[c.real, c.imag] for c in coeffs]}) + "\n")
        return 0
    out.write("det(lam - H) = lam^n - sum_k p_k lam^(n-k)\n")
    for k, c in enumerate(coeffs, start=1):
        out.write(f"  p_{k} = {_fmt_complex(c)}\n")
    return 0


def _parse_type(text: str) -> object:
    try:
        return SignedDiagram.parse(text) if any(ch in text for ch in "+-") else Partition.from_any(text)
    except (ArgumentError, ValueError) as exc:
        raise UsageError(f"cannot parse degeneracy type {text!r}") from exc


def cmd_convert(args: argparse.Namespace, out: TextIO) -> int:
    symmetry = _parse_eta(args.eta) if args.eta else None
    source, target = _parse_type(args.source), _parse_type(args.target)
    if symmetry is not None and not isinstance(source, SignedDiagram):
        raise UsageError("with --eta, --from and --to must be signed diagrams such as 3+,1+")
    witness = conversion_witness(source, target, args.eps, symmetry, _seed(args.seed), _tolerances(args))
    out.write(witness.dumps() + "\n")
    return 0


def cmd_liouville(args: argparse.Namespace, out: TextIO) -> int:
    if args.model == "qubit":
        model = effective_qubit(args.eps2, args.eps3, args.gamma2, args.gamma3, args.t)
    else:
        gamma2, gamma4 = args.gamma2, args.gamma4
        if gamma2 is None or gamma4 is None:
            gamma2, gamma4 = qutrit_ep_rates(args.gamma3, args.t, args.branch)
        model = effective_qutrit(args.eps, gamma2, args.gamma3, gamma4, args.t)
    if args.out_matrix:
        _write(args.out_matrix, dumps_matrix(model.liouvillian) + "\n")
    if args.out_parity:
        _write(args.out_parity, dumps_matrix(model.parity) + "\n")
    results = classify(model.liouvillian, model.parity, _tolerances(args))
    report = {
        "model": args.model,
        "at_ep": model.at_ep,
        "expected_eigenvalue": model.eigenvalue,
        "metric_signature": list(metric_signature(model.parity)),
        "clusters": [r.to_json() for r in results],
    }
    if args.json:
        out.write(json.dumps(report, indent=2) + "\n")
        return 0
    p, q = report["metric_signature"]
    out.write(f"{args.model}: at EP = {model.at_ep}, parity metric signature ({p}, {q})\n")
    for r in results:
        cands = ", ".join(str(d) for d in r.signed_candidates) or "-"
        out.write(f"  eigenvalue {_fmt_complex(r.eigenvalue)}  mult {r.multiplicity}  "
                  f"partition {r.partition}  signed {cands}\n")
    return 0


def cmd_lieb(args: argparse.Namespace, out: TextIO) -> int:
    tol = _tolerances(args)
    if args.action == "points":
        eps1, eps2 = _parse_float(args.eps1, "--eps1"), _parse_float(args.eps2, "--eps2")
        points = find_degeneracies(eps1, eps2, tol, args.grid)
        if args.json:
            out.write(json.dumps([p.to_json() for p in points], indent=2) + "\n")
        else:
            for p in points:
                out.write(f"  k = ({p.kx:+.10f}, {p.ky:+.10f})  type {p.partition}  residual {p.residual:.2e}\n")
        return 0
    try:
        eps1_values, eps2_values = parse_range(args.eps1), parse_range(args.eps2)
    except ArgumentError as exc:
        raise UsageError(str(exc)) from exc
    rows = scan(eps1_values, eps2_values, args.grid, tol)
    text = scan_csv(rows)
    if args.out:
        _write(args.out, text)
    else:
        out.write(text)
    return 0


# --- parser --------------------------------------------------------------------------

def _tol_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("tolerances")
    group.add_argument("--rank-rtol", type=float, default=DEFAULT_TOL.rank_rtol,
                       help="relative singular-value threshold for ranks (default %(default)g)")
    group.add_argument("--rank-atol", type=float, default=DEFAULT_TOL.rank_atol,
                       help="absolute singular-value threshold for ranks (default %(default)g)")
    group.add_argument("--eig-cluster-tol", type=float, default=DEFAULT_TOL.eig_cluster_tol,
                       help="eigenvalue clustering radius relative to ||H|| (default %(default)g)")
    group.add_argument("--degeneracy-tol", type=float, default=DEFAULT_TOL.degeneracy_tol,
                       help="degeneracy test threshold (default %(default)g)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    tol = _tol_parent()
    parser = argparse.ArgumentParser(prog="ephier", description="Degeneracy types of matrices and their hierarchies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hierarchy", help="print the hierarchy of degeneracy types of order N")
    p.add_argument("n", type=int, help="algebraic multiplicity")
    p.add_argument("--eta", metavar="P,Q", help="signed hierarchy for a metric of signature (P, Q)")
    p.add_argument("--dot", metavar="PATH", help="also write a Graphviz DOT file")
    p.add_argument("--labels", choices=("diagram", "tuple"), default="diagram", help="DOT node labels")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("classify", parents=[tol], help="classify all eigenvalues of a matrix")
    p.add_argument("matrix", help="matrix JSON file ('-' for stdin)")
    p.add_argument("--eta", metavar="ETA.json", help="pseudometric JSON for signed classification")
    p.add_argument("--tol", type=float, help="shorthand for --rank-rtol")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("charpoly", help="characteristic polynomial coefficients")
    p.add_argument("matrix", help="matrix JSON file ('-' for stdin)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("convert", parents=[tol], help="find a small perturbation converting one type into another")
    p.add_argument("--from", dest="source", required=True, metavar="TYPE", help="source type, e.g. 2,1 or 2+,2-")
    p.add_argument("--to", dest="target", required=True, metavar="TYPE", help="dominating target type")
    p.add_argument("--eta", metavar="P,Q", help="signature of the pseudometric (signed search)")
    p.add_argument("--eps", type=float, default=1e-3, help="perturbation size (default %(default)g)")
    p.add_argument("--seed", type=int, help="random seed (default: $EPH_SEED or 0)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("liouville", parents=[tol], help="effective dissipative qubit or qutrit")
    p.add_argument("model", choices=("qubit", "qutrit"))
    p.add_argument("--t", type=float, default=1.0, help="coupling (default %(default)g)")
    p.add_argument("--eps2", type=float, default=0.0, help="qubit level energy (default %(default)g)")
    p.add_argument("--eps3", type=float, default=0.0, help="qubit level energy (default %(default)g)")
    p.add_argument("--eps", type=float, default=0.0, help="qutrit level energy (default %(default)g)")
    p.add_argument("--gamma2", type=float, help="decay rate of level 2 (qubit default 5)")
    p.add_argument("--gamma3", type=float, help="decay rate of level 3 (qubit default 1, qutrit default 1)")
    p.add_argument("--gamma4", type=float, help="qutrit decay rate of level 4 (default: EP condition)")
    p.add_argument("--branch", type=int, choices=(1, -1), default=1, help="sign branch of the qutrit EP condition")
    p.add_argument("--out-matrix", metavar="PATH", help="write the no-jump generator as matrix JSON")
    p.add_argument("--out-parity", metavar="PATH", help="write the parity metric as matrix JSON")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_liouville)

    p = sub.add_parser("lieb", parents=[tol], help="degeneracies of the non-Hermitian Lieb lattice")
    p.add_argument("action", choices=("scan", "points"))
    p.add_argument("--eps1", required=True, help="A:B:N range for scan, a number for points")
    p.add_argument("--eps2", required=True, help="A:B:N range for scan, a number for points")
    p.add_argument("--grid", type=int, default=256, help="seed grid per axis (default %(default)d)")
    p.add_argument("--out", metavar="CSV", help="write the scan to a file instead of stdout")
    p.add_argument("--json", action="store_true", help="machine-readable output (points)")
    p.set_defaults(func=cmd_lieb)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "liouville":
        if args.gamma3 is None:
            args.gamma3 = 1.0
        if args.model == "qubit" and args.gamma2 is None:
            args.gamma2 = 5.0
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"ephier: error: {exc}", file=sys.stderr)
        return 2
    except EPHError as exc:
        print(f"ephier: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
