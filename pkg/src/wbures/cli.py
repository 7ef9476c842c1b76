"""Command-line entry points.

Usage::

    wbures table1 --n 4 --a 0.6 --b 0.8
    wbures --format csv compare --state-a a.json --state-b b.json
    wbures audit --circuit circuit.json --input state.json
    wbures --seed 7 random-circuit --n 3 --gates 5 > circuit.json

Exit codes: 0 success, 2 parse/parameter error, 3 dimension error,
4 bound violation (an internal error, the bound is a theorem).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .distances import bures_length
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    InvalidAmplitudes,
    InvalidState,
    ParameterOutOfRange,
    ParseError,
    WBuresError,
)
from .resource import Circuit, audit_bound, random_circuit
from .states import StateSpec, build_state
from .table1 import table1
from .weighted import cache_from_fidelities, sandwich_bounds, subset_fidelities, weighted_distance_from_cache

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_BOUND = 4

SIGNIFICANT_DIGITS = 12


def round_sig(x: float) -> float:
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def normalize(obj):
    """Round every float to 12 significant digits, recursively."""
    if isinstance(obj, dict):
        return {k: normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    return obj


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(_cell(x) for x in v)
    return str(v)


def _flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}.{i}")
        return out
    return [(prefix, obj)]


def render(payload, fmt: str) -> str:
    """Serialize ``payload`` (a dict, or a list of flat row dicts) as JSON or CSV."""
    payload = normalize(payload)
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(payload, list):
        header = list(payload[0]) if payload else []
        writer.writerow(header)
        for row in payload:
            writer.writerow([_cell(row[h]) for h in header])
    else:
        writer.writerow(["key", "value"])
        for k, v in _flatten(payload):
            writer.writerow([k, _cell(v)])
    return buf.getvalue()


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def load_state(path: str):
    spec = StateSpec.parse(_read_json(path))
    try:
        return build_state(spec)
    except (InvalidAmplitudes, InvalidState) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_circuit(path: str) -> Circuit:
    return Circuit.parse(_read_json(path))


def cmd_table1(args) -> tuple[object, int]:
    rows = table1(args.n, args.a, args.b, workers=args.workers)
    return [r.to_dict() for r in rows], EXIT_OK


def compare_states(rho, sigma, workers: int = 1) -> dict:
    n = rho.n
    fids = subset_fidelities(rho, sigma, workers=workers)
    root = weighted_distance_from_cache(cache_from_fidelities(n, fids, "root"))
    squared = weighted_distance_from_cache(cache_from_fidelities(n, fids, "squared"))
    bures = bures_length(rho, sigma)
    lower, upper = sandwich_bounds(rho, sigma, bures=bures.length)
    return {
        "n": n,
        "fidelity": bures.fidelity,
        "bures": bures.length,
        "weighted_bures": root.value,
        "partition": list(root.partition.blocks),
        "blocks": root.to_dict()["blocks"],
        "sandwich_lower": lower,
        "sandwich_upper": upper,
        "weighted_bures_squared_fidelity": squared.value,
    }


def cmd_compare(args) -> tuple[object, int]:
    rho = load_state(args.state_a)
    sigma = load_state(args.state_b)
    if rho.n != sigma.n:
        raise DimensionMismatch(f"states have {rho.n} and {sigma.n} qubits")
    return compare_states(rho, sigma, workers=args.workers), EXIT_OK


def cmd_audit(args) -> tuple[object, int]:
    circuit = load_circuit(args.circuit)
    rho = load_state(args.input)
    if rho.n != circuit.n:
        raise DimensionMismatch(f"circuit acts on {circuit.n} qubits, state has {rho.n}")
    report = audit_bound(circuit, rho, workers=args.workers)
    return report.to_dict(), EXIT_OK if report.holds else EXIT_BOUND


def cmd_random_circuit(args) -> tuple[object, int]:
    if not 1 <= args.n <= 12 or args.gates < 0 or args.max_k < 1:
        raise ParameterOutOfRange("need 1 <= n <= 12, gates >= 0, max-k >= 1")
    rng = np.random.default_rng(args.seed)
    c = random_circuit(args.n, args.gates, rng, max_k=args.max_k)
    return c.to_dict(), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def add_globals(p: argparse.ArgumentParser, defaults: bool) -> None:
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--format", choices=("json", "csv"), default=d("json"))
        p.add_argument("--workers", type=int, default=d(1), help="threads for the subset cache")
        p.add_argument("--seed", type=int, default=d(0))
        p.add_argument("--output", "-o", default=d(None), help="write to a file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="wbures", description="Weighted Bures length of many-qubit states and circuit cost audits."
    )
    add_globals(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", parents=[common], help="reproduce the closed-form case table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("compare", parents=[common], help="distances between two state specs")
    p.add_argument("--state-a", required=True)
    p.add_argument("--state-b", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("audit", parents=[common], help="check R_U >= D_B for a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("random-circuit", parents=[common], help="emit a seeded random circuit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gates", type=int, default=4)
    p.add_argument("--max-k", type=int, default=2)
    p.set_defaults(func=cmd_random_circuit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.func(args)
    except (DimensionMismatch, DimensionTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (ParseError, ParameterOutOfRange, InvalidAmplitudes) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except WBuresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(payload, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
