"""Command-line interface.

Exit status 0 on success, 1 on validation or parse errors, 2 when a cost
guard (basis size, permanent size, series size) is exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .diagram import histories_dot
from .errors import CondGateError, CostGuardError, ValidationError
from .gates import (
    METHODS,
    AncillaPattern,
    apply_gate,
    completeness_residual,
    conditional_operator,
    histories_terms,
    outcome_distribution,
)
from .netcompile import parse_and_compile, unitarity_residual


def _read(arg: str, what: str) -> str:
    """Inline JSON (starting with ``{``) or a path to a file."""
    if arg.lstrip().startswith("{"):
        return arg
    try:
        return Path(arg).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {what} {arg!r}: {exc.strerror}") from None


def _counts(text: str | None, k: int, flag: str) -> tuple[int, ...]:
    if text is None:
        return (0,) * k
    text = text.strip()
    parts = [p for p in text.split(",")] if text else []
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise ValidationError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if len(values) != k:
        raise ValidationError(f"{flag} needs {k} values (one per ancilla mode), got {len(values)}")
    if any(v < 0 for v in values):
        raise ValidationError(f"{flag} values must be non-negative")
    return values


def _circuit(args):
    return parse_and_compile(_read(args.circuit, "circuit"))


def _pattern(args, partition) -> AncillaPattern:
    return AncillaPattern(_counts(args.prepare, partition.n_ancilla, "--prepare"),
                          _counts(args.count, partition.n_ancilla, "--count"))


def cmd_compile(args) -> str:
    partition, s = _circuit(args)
    return serialize.dumps(serialize.unitary_document(partition, s))


def cmd_gate(args) -> str:
    partition, s = _circuit(args)
    op = conditional_operator(s, partition, _pattern(args, partition), args.nmax, args.method)
    return serialize.dumps(serialize.operator_document(op))


def cmd_apply(args) -> str:
    if args.operator is not None:
        if args.circuit is not None:
            raise ValidationError("give either a circuit or --operator, not both")
        op = serialize.operator_from_document(
            serialize.loads(_read(args.operator, "operator"), "operator"))
    elif args.circuit is not None:
        partition, s = _circuit(args)
        op = conditional_operator(s, partition, _pattern(args, partition), args.nmax, args.method)
    else:
        raise ValidationError("apply needs a circuit or --operator")
    psi = serialize.state_from_document(serialize.loads(_read(args.state, "state"), "state"),
                                        basis=op.basis)
    res = apply_gate(op, psi)
    return serialize.dumps({
        "probability": serialize._float(res.probability),
        "normalized_state": serialize.state_document(res.normalized),
        "unnormalized_state": serialize.state_document(res.unnormalized),
    })


def cmd_distribution(args) -> str:
    partition, s = _circuit(args)
    prepare = _counts(args.prepare, partition.n_ancilla, "--prepare")
    doc = serialize.loads(_read(args.state, "state"), "state")
    psi = serialize.state_from_document(doc, modes=partition.n_signal)
    dist = outcome_distribution(s, partition, prepare, psi, args.nmax, args.method)
    return serialize.dumps({
        "prepare": list(prepare),
        "outcomes": [{"count": list(m), "probability": serialize._float(p)}
                     for m, p in dist.items()],
        "total": serialize._float(sum(dist.values())),
    })


def cmd_check(args) -> str:
    partition, s = _circuit(args)
    prepare = _counts(args.prepare, partition.n_ancilla, "--prepare")
    return serialize.dumps({
        "unitarity_residual": serialize._float(unitarity_residual(s.entries)),
        "completeness_residual": serialize._float(
            completeness_residual(s, partition, prepare, args.nmax, args.method)),
    })


def cmd_diagram(args) -> str:
    partition, s = _circuit(args)
    prepare = _counts(args.prepare or ",".join(["1"] * partition.n_ancilla),
                      partition.n_ancilla, "--prepare")
    count = _counts(args.count or ",".join(["1"] * partition.n_ancilla),
                    partition.n_ancilla, "--count")
    terms = histories_terms(s, partition, prepare, count)
    return histories_dot(terms, partition, np.asarray(s.entries))


COMMANDS = {
    "compile": cmd_compile,
    "gate": cmd_gate,
    "apply": cmd_apply,
    "distribution": cmd_distribution,
    "check": cmd_check,
    "diagram": cmd_diagram,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; status 2 is reserved for cost guards."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json-errors", action="store_true",
                        help="also print errors as a JSON object on stdout")
    common.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")

    compute = argparse.ArgumentParser(add_help=False)
    compute.add_argument("--method", choices=METHODS, default="qsymbol")
    compute.add_argument("--nmax", type=int, default=4,
                         help="truncation on total signal photon number (default 4)")
    compute.add_argument("--prepare", metavar="i,j,...", help="ancilla preparation counts")
    compute.add_argument("--count", metavar="i,j,...", help="ancilla detection counts")

    parser = _Parser(
        prog="condgate",
        description="Conditional measurement operators of linear optical networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", parents=[common], help="circuit document -> unitary document")
    p.add_argument("circuit", help="circuit JSON file or inline JSON")

    p = sub.add_parser("gate", parents=[common, compute], help="conditional operator as JSON")
    p.add_argument("circuit")

    p = sub.add_parser("apply", parents=[common, compute],
                       help="apply a conditional operator to a state")
    p.add_argument("circuit", nargs="?")
    p.add_argument("--operator", metavar="OP", help="operator JSON instead of a circuit")
    p.add_argument("--state", required=True, metavar="STATE")

    p = sub.add_parser("distribution", parents=[common, compute],
                       help="probabilities of all ancilla counts")
    p.add_argument("circuit")
    p.add_argument("--state", required=True, metavar="STATE")

    p = sub.add_parser("check", parents=[common, compute],
                       help="unitarity and completeness residuals")
    p.add_argument("circuit")

    p = sub.add_parser("diagram", parents=[common, compute],
                       help="history decomposition as a DOT digraph")
    p.add_argument("circuit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except (CondGateError, ValueError) as exc:
        code = 2 if isinstance(exc, CostGuardError) else 1
        print(f"condgate: error: {exc}", file=sys.stderr)
        if args.json_errors:
            sys.stdout.write(serialize.dumps({
                "error": {"kind": type(exc).__name__, "message": str(exc), "exit_code": code},
            }))
        return code
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"condgate: error: cannot write {args.out!r}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
