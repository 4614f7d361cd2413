"""Command-line front end.

Each subcommand wires the library stages together: enumerate writes diagram
tables, relators writes relator families, kernel computes coefficient bases,
evaluate and verify apply them to words, and dims reproduces the dimension
row for a range of windows.  Progress goes to standard error; standard
output carries only the machine-readable result.  File outputs are written
atomically, so a failing run leaves no partial files.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import List, Optional, Tuple

from .counting import Functional, evaluate_functional
from .diagrams import (
    TableFilter,
    enumerate_diagrams,
    mirror_pairs,
    read_table_jsonl,
    table_lines,
    write_table_jsonl,
)
from .moves import MoveKind, random_walk
from .relators import (
    Placement,
    RelatorFamily,
    build_matrix,
    generate_relators,
    read_relators_jsonl,
    write_matrix_csv,
    write_relators_jsonl,
)
from .words import format_word, parse_word
from .zkernel import (
    IntMatrix,
    add_mirror_constraints,
    left_kernel,
    read_basis_csv,
    write_basis_csv,
)

_FILTERS = {"all": TableFilter.ALL, "conn": TableFilter.CONNECTED, "irr": TableFilter.IRREDUCIBLE}


def _parse_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        lo = hi = text
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise ValueError(f"not a range: {text!r} (expected e.g. 2..5)") from None
    if a > b:
        raise ValueError(f"empty range: {text!r}")
    return a, b


def _default_threads() -> int:
    return int(os.environ.get("ARROWKERNEL_THREADS", "1"))


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _cmd_enumerate(args: argparse.Namespace) -> int:
    b, d = _parse_range(args.arrows)
    t0 = time.time()
    table = enumerate_diagrams(b, d, _FILTERS[args.filter], threads=args.threads)
    _log(f"[enumerate] {len(table)} classes in window ({b},{d}) [{args.filter}] ({time.time() - t0:.1f}s)")
    if args.out:
        write_table_jsonl(table, args.out)
    else:
        for line in table_lines(table):
            print(line)
    return 0


def _cmd_relators(args: argparse.Namespace) -> int:
    b, d = _parse_range(args.arrows)
    family = RelatorFamily(args.family.upper())
    if args.table:
        window = read_table_jsonl(args.table).window
        if window != (b, d):
            raise ValueError(f"table window {window[0]}..{window[1]} does not match --arrows {b}..{d}")
    t0 = time.time()
    cols = generate_relators(
        family, b, d,
        support=_FILTERS[args.support],
        placements=Placement(args.placements),
    )
    _log(f"[relators] {len(cols)} {family.value} columns over ({b},{d}) [{args.support}] ({time.time() - t0:.1f}s)")
    write_relators_jsonl(args.out, cols)
    print(len(cols))
    return 0


def _read_whitelist(path: str) -> List[Tuple[int, int]]:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("whitelist", data.get("pairs"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON list of [i, j] pairs")
    return [(int(p[0]), int(p[1])) for p in data]


def _cmd_kernel(args: argparse.Namespace) -> int:
    table = read_table_jsonl(args.table)
    cols = []
    for path in args.relators:
        cols.extend(read_relators_jsonl(path))
    matrix = build_matrix(table, cols)
    m, n = matrix.shape
    _log(f"[kernel] matrix {m} x {n} from {len(cols)} columns in {len(args.relators)} file(s)")
    A = IntMatrix.from_entry_dicts(m, matrix.entries)
    if args.mirror_constraints:
        whitelist = _read_whitelist(args.mirror_constraints)
        A = add_mirror_constraints(A, mirror_pairs(table), whitelist)
        _log(f"[kernel] mirror constraints added: {A.n - n} columns ({len(whitelist)} pair(s) whitelisted)")
    t0 = time.time()
    basis = left_kernel(A, engine=args.engine)
    _log(f"[kernel] dimension {basis.dim} ({time.time() - t0:.1f}s)")
    if args.matrix_out:
        write_matrix_csv(args.matrix_out, matrix)
    write_basis_csv(args.out, basis)
    print(basis.dim)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    table = read_table_jsonl(args.table)
    basis = read_basis_csv(args.coeffs, length=len(table))
    if not (1 <= args.row <= basis.dim):
        raise ValueError(f"--row {args.row} outside 1..{basis.dim}")
    f = Functional(table, basis.vectors[args.row - 1])
    print(evaluate_functional(f, parse_word(args.word)))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    table = read_table_jsonl(args.table)
    basis = read_basis_csv(args.coeffs, length=len(table))
    kinds = [MoveKind(tok.strip()) for tok in args.moves.split(",") if tok.strip()]
    if not kinds:
        raise ValueError("--moves named no move kinds")
    funcs = [Functional(table, v) for v in basis.vectors]
    pool = [e.diagram.word() for e in table.entries]
    rng = random.Random(args.seed)
    t0 = time.time()
    for trial in range(args.trials):
        start = pool[rng.randrange(len(pool))]
        walk_seed = rng.getrandbits(32)
        path = random_walk(start, kinds, args.steps, walk_seed)
        base = [evaluate_functional(f, path[0]) for f in funcs]
        for step in range(1, len(path)):
            for row, f in enumerate(funcs):
                got = evaluate_functional(f, path[step])
                if got != base[row]:
                    print(f"fail: row {row + 1} changed {base[row]} -> {got} at step {step} of trial {trial + 1}")
                    print("walk: " + " | ".join(format_word(w) for w in path[: step + 1]))
                    return 1
        if args.trials >= 20 and (trial + 1) % max(1, args.trials // 10) == 0:
            _log(f"[verify] {trial + 1}/{args.trials} walks ({time.time() - t0:.1f}s)")
    print(f"pass: {len(funcs)} functional(s) constant over {args.trials} walks of {args.steps} steps")
    return 0


def _cmd_dims(args: argparse.Namespace) -> int:
    lo, hi = _parse_range(args.windows)
    family = RelatorFamily(args.family.upper())
    dims = []
    for b in range(lo, hi + 1):
        t0 = time.time()
        table = enumerate_diagrams(b, b + 1, TableFilter.CONNECTED, threads=args.threads)
        cols = generate_relators(family, b, b + 1, support=TableFilter.CONNECTED)
        matrix = build_matrix(table, cols)
        A = IntMatrix.from_entry_dicts(matrix.shape[0], matrix.entries)
        dim = left_kernel(A).dim
        dims.append(dim)
        _log(
            f"[dims] window ({b},{b + 1}): {len(table)} rows, {A.n} columns, "
            f"dimension {dim} ({time.time() - t0:.1f}s)"
        )
    print(" ".join(str(v) for v in dims))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrowkernel",
        description="enumerate arrow-diagram classes, build move relators, and compute integer invariants",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write the diagram table for a window")
    p.add_argument("--arrows", required=True, metavar="B..D", help="arrow-count window, e.g. 2..3")
    p.add_argument("--filter", choices=sorted(_FILTERS), default="all")
    p.add_argument("--out", help="output table JSONL (default: stdout)")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("relators", help="generate one relator family over a window")
    p.add_argument("--family", required=True, choices=["r1", "sii", "wii", "siii", "wiii"])
    p.add_argument("--arrows", required=True, metavar="B..D")
    p.add_argument("--support", choices=sorted(_FILTERS), default="all")
    p.add_argument("--placements", choices=["full", "split"], default="full",
                   help="split keeps only instances whose base arrows span two arcs")
    p.add_argument("--table", help="table JSONL; when given, its window must match --arrows")
    p.add_argument("--out", required=True, help="output relator JSONL")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=_cmd_relators)

    p = sub.add_parser("kernel", help="left kernel of the relator evaluation matrix")
    p.add_argument("--table", required=True)
    p.add_argument("--relators", required=True, action="append",
                   help="relator JSONL; repeat to take the union of families")
    p.add_argument("--mirror-constraints", metavar="WHITELIST.json",
                   help="equate mirror-pair coefficients except the whitelisted [i, j] pairs")
    p.add_argument("--matrix-out", help="also write the evaluation matrix CSV")
    p.add_argument("--engine", choices=["elimination", "modular"], default=None)
    p.add_argument("--out", required=True, help="output basis CSV; dimension goes to stdout")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("evaluate", help="evaluate one basis functional on a word")
    p.add_argument("--table", required=True)
    p.add_argument("--coeffs", required=True, help="basis CSV from the kernel subcommand")
    p.add_argument("--row", required=True, type=int, help="1-based basis row")
    p.add_argument("--word", required=True, help='token text, e.g. "1 -2 2 -1"')
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("verify", help="check functionals stay constant along random walks")
    p.add_argument("--table", required=True)
    p.add_argument("--coeffs", required=True)
    p.add_argument("--moves", required=True, help="comma list of ri,sii,wii,siii,wiii")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("dims", help="kernel dimension per window over connected tables")
    p.add_argument("--family", required=True, choices=["r1", "sii", "wii", "siii", "wiii"])
    p.add_argument("--windows", required=True, metavar="B..E",
                   help="windows (b, b+1) for b in B..E")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=_cmd_dims)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:
        print(f"arrowkernel: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
