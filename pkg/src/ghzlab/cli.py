"""Command-line front end.

Subcommands: value, transform, quadruples, extract, decay, shift-structure.
Exit codes: 0 success, 2 validation error, 3 dimension/resource refusal,
4 internal assertion failure (a mathematically impossible mismatch).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fileio, limits
from .additive import count_quadruples, quadruple_bound_check
from .crossfn import CrossTriple, cross_triple, to_cross
from .errors import (
    DimensionError,
    InternalCheckError,
    StageError,
    ValidationError,
)
from .extraction import PipelineConfig, full_pipeline, mod2_shift_fraction
from .game import (
    StrategyTriple,
    best_response,
    evaluate_value_exact,
    evaluate_value_mc,
    exact_game_value,
    make_strategy,
)
from .packed import lo_mask, qadd
from .seeding import child_rng

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIMENSION = 3
EXIT_INTERNAL = 4

FAMILIES = (
    "constant0",
    "constant1",
    "product-constant0",
    "product-constant1",
    "random",
    "planted",
)

CSV_HEADER = "n,mode,estimate,ci_halfwidth,reference"


@dataclass(frozen=True)
class RunConfig:
    """Validated echo of the parsed command line."""

    command: str
    n: int | None
    family: str | None
    strategy_path: str | None
    function_path: str | None
    seed: int | None
    samples: int
    mode: str | None
    method: str | None
    out: str | None
    format: str
    threads: int

    def __post_init__(self):
        if self.threads < 1:
            raise ValidationError("--threads must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValidationError("--format must be json or csv")
        if self.n is not None and self.n < 1:
            raise ValidationError("--n must be >= 1")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            command=args.command,
            n=getattr(args, "n", None),
            family=getattr(args, "family", None),
            strategy_path=getattr(args, "strategy", None),
            function_path=getattr(args, "function", None),
            seed=args.seed,
            samples=getattr(args, "samples", 0),
            mode=getattr(args, "mode", None),
            method=getattr(args, "method", None),
            out=args.out,
            format=args.format,
            threads=args.threads,
        )


def _auto_seed(seed: int | None) -> int:
    """Use the given seed, or draw a fresh one (always recorded in the output)."""
    if seed is not None:
        return seed
    return int.from_bytes(os.urandom(4), "little")


def _emit(args, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else fileio.dumps_canonical(payload)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_strategy(args) -> StrategyTriple:
    if getattr(args, "strategy", None):
        return fileio.read_strategy(args.strategy)
    if getattr(args, "family", None):
        if args.n is None:
            raise ValidationError("--family needs --n")
        st = make_strategy(args.family, args.n, seed=args.seed)
        if not isinstance(st, StrategyTriple):
            raise ValidationError(
                f"family {args.family!r} is not a strategy family; "
                "it lives in cross-function space"
            )
        return st
    raise ValidationError("need --strategy FILE or --family NAME")


def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_value(args) -> int:
    mode = args.mode
    if mode == "gamevalue":
        if args.n is None:
            raise ValidationError("--mode gamevalue needs --n")
        rep = exact_game_value(args.n)
        payload = fileio.value_report_to_json(rep, args.n, mode)
    else:
        st = _load_strategy(args)
        if mode == "exact":
            rep = evaluate_value_exact(st)
        elif mode == "bestresponse":
            _, rep = best_response(st.f, st.g)
        elif mode == "mc":
            if args.samples < 1:
                raise ValidationError("--mode mc needs --samples >= 1")
            seed = _auto_seed(args.seed)
            rep = evaluate_value_mc(st, args.samples, seed)
        else:
            raise ValidationError(f"unknown mode {mode!r}")
        payload = fileio.value_report_to_json(rep, st.n, mode)
    payload["threads"] = args.threads
    if args.format == "csv":
        n = payload["n"]
        ref = _fraction_str(Fraction(3, 4) ** n)
        if isinstance(payload["eta"], dict):
            est, ci = _fraction_str(Fraction(payload["eta"]["num"], payload["eta"]["den"])), ""
        else:
            est, ci = repr(payload["eta"]), repr(payload["ci_halfwidth"])
        _emit(args, f"{CSV_HEADER}\n{n},{mode},{est},{ci},{ref}\n")
    else:
        _emit(args, payload)
    return EXIT_OK


def _equivalence_summary(st: StrategyTriple, ct: CrossTriple, checks: int, seed: int | None):
    """Count questions where the win predicate disagrees with the mod-4 sum test."""
    n = st.n
    lo = lo_mask(n)
    size = 1 << n
    mismatches = 0
    if n <= 6:
        ys = np.arange(size, dtype=np.int64)
        for x in range(size):
            zs = x ^ ys
            won = (st.f.table[x] ^ st.g.table[ys] ^ st.h.table[zs]) == (x | ys)
            summed = qadd(ct.F.table[x], qadd(ct.G.table[ys], ct.H.table[zs], lo), lo)
            mismatches += int(np.count_nonzero(won != (summed == 0)))
        return "exhaustive", 1 << (2 * n), mismatches, None
    if seed is None:
        raise ValidationError("sampled equivalence checks at n > 6 need --seed")
    rng = child_rng(seed, "sweep")
    x = rng.integers(0, size, size=checks, dtype=np.int64)
    y = rng.integers(0, size, size=checks, dtype=np.int64)
    z = x ^ y
    won = (st.f.table[x] ^ st.g.table[y] ^ st.h.table[z]) == (x | y)
    summed = qadd(ct.F.table[x], qadd(ct.G.table[y], ct.H.table[z], lo), lo)
    mismatches = int(np.count_nonzero(won != (summed == 0)))
    return "sampled", checks, mismatches, seed


def cmd_transform(args) -> int:
    st = _load_strategy(args)
    if args.check_cross:
        paths = args.check_cross
        ct = CrossTriple(
            fileio.read_crossfn(paths[0]),
            fileio.read_crossfn(paths[1]),
            fileio.read_crossfn(paths[2]),
        )
        if ct.n != st.n:
            raise ValidationError("cross tables and strategy have different n")
    else:
        ct = cross_triple(st)
    mode, total, mismatches, used_seed = _equivalence_summary(
        st, ct, args.checks, args.seed
    )
    summary = {
        "schema_version": 1,
        "kind": "transform_summary",
        "n": st.n,
        "check_mode": mode,
        "checks": total,
        "mismatches": mismatches,
        "threads": args.threads,
    }
    if used_seed is not None:
        summary["seed"] = used_seed
    if not args.check_cross:
        if not args.out_dir:
            raise ValidationError("transform needs --out-dir to write F, G, H tables")
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_crossfn(out / "F.json", ct.F)
        fileio.write_crossfn(out / "G.json", ct.G)
        fileio.write_crossfn(out / "H.json", ct.H)
        fileio.write_json(out / "transform_summary.json", summary)
    _emit(args, summary)
    if mismatches:
        raise InternalCheckError(
            f"{mismatches} questions disagree between win predicate and mod-4 sums"
        )
    return EXIT_OK


def cmd_quadruples(args) -> int:
    if args.function:
        F = fileio.read_crossfn(args.function)
        if args.method == "both":
            hist = count_quadruples(F, "histogram")
            naive = count_quadruples(F, "naive")
            payload = {
                "schema_version": 1,
                "kind": "quadruple_report",
                "n": F.n,
                "N": hist.N,
                "counts": {"histogram": hist.count, "naive": naive.count},
                "agree": hist.count == naive.count,
                "threads": args.threads,
            }
            _emit(args, payload)
            if hist.count != naive.count:
                raise InternalCheckError("histogram and naive counts disagree")
            return EXIT_OK
        rep = count_quadruples(F, args.method)
        payload = fileio.quadruple_report_to_json(rep)
        payload["threads"] = args.threads
        _emit(args, payload)
        return EXIT_OK
    st = _load_strategy(args)
    check = quadruple_bound_check(cross_triple(st))
    payload = {
        "schema_version": 1,
        "kind": "quadruple_bound_report",
        "n": st.n,
        "eta": fileio.fraction_to_json(check.eta),
        "count": check.count,
        "bound": fileio.fraction_to_json(check.bound),
        "holds": check.holds,
        "threads": args.threads,
    }
    _emit(args, payload)
    if not check.holds:
        raise InternalCheckError("quadruple count fell below eta^4 N^3")
    return EXIT_OK


def cmd_extract(args) -> int:
    seed = _auto_seed(args.seed)
    if args.family in ("planted", "planted_shift"):
        if args.n is None:
            raise ValidationError("--family planted needs --n")
        source = make_strategy(
            args.family, args.n, seed=seed, corrupt_fraction=args.corrupt_fraction
        )
    else:
        source = _load_strategy(args)
    config = PipelineConfig(
        seed=seed,
        freiman_mode=args.freiman_mode,
        freiman_trials=args.trials,
    )
    report = full_pipeline(source, config)
    payload = fileio.extraction_report_to_json(report)
    payload["threads"] = args.threads
    _emit(args, payload)
    return EXIT_OK


def cmd_shift_structure(args) -> int:
    if args.function:
        F = fileio.read_crossfn(args.function)
    elif args.from_strategy:
        F = to_cross(fileio.read_strategy(args.from_strategy).f, "alice")
    else:
        raise ValidationError("need --function FILE or --from-strategy FILE")
    rep = mod2_shift_fraction(F)
    uniq = Fraction(1, 1 << F.n)
    payload = {
        "schema_version": 1,
        "kind": "shift_structure_report",
        "n": F.n,
        "s_best": fileio.quat_to_base4(rep.s_best, F.n),
        "fraction": fileio.fraction_to_json(rep.fraction),
        "transform_uniqueness_fraction": fileio.fraction_to_json(uniq),
        "equals_uniqueness_fraction": rep.fraction == uniq,
        "parity_anchored": F.is_parity_anchored(),
        "threads": args.threads,
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_decay(args) -> int:
    if args.n_from < 1 or args.n_to < args.n_from:
        raise ValidationError("need 1 <= --n-from <= --n-to")
    rows = [CSV_HEADER]
    seed = _auto_seed(args.seed)
    for n in range(args.n_from, args.n_to + 1):
        st = make_strategy(args.family, n, seed=seed)
        if not isinstance(st, StrategyTriple):
            raise ValidationError("decay curves need a strategy family")
        ref = _fraction_str(Fraction(3, 4) ** n)
        if args.mode == "exact":
            limits.check_enum_n(n)
            rep = evaluate_value_exact(st)
            rows.append(f"{n},exact,{_fraction_str(rep.eta)},,{ref}")
        else:
            if args.samples < 1:
                raise ValidationError("--mode mc needs --samples >= 1")
            if args.seed is None:
                raise ValidationError("--mode mc needs an explicit --seed for the CSV")
            rep = evaluate_value_mc(st, args.samples, seed + n)
            rows.append(f"{n},mc,{rep.eta!r},{rep.ci_halfwidth!r},{ref}")
    _emit(args, "\n".join(rows) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master RNG seed")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count recorded in reports (kernels are vectorized in-process)",
    )

    p = argparse.ArgumentParser(prog="ghzlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("value", parents=[common], help="evaluate strategy value")
    pv.add_argument("--family", choices=FAMILIES)
    pv.add_argument("--strategy", help="strategy JSON file")
    pv.add_argument("--n", type=int)
    pv.add_argument(
        "--mode", choices=("exact", "bestresponse", "mc", "gamevalue"), default="exact"
    )
    pv.add_argument("--samples", type=int, default=0)
    pv.set_defaults(func=cmd_value)

    pt = sub.add_parser("transform", parents=[common], help="recode strategies mod 4")
    pt.add_argument("--strategy", help="strategy JSON file")
    pt.add_argument("--family", choices=FAMILIES)
    pt.add_argument("--n", type=int)
    pt.add_argument("--out-dir", help="directory for F.json, G.json, H.json")
    pt.add_argument(
        "--check-cross",
        nargs=3,
        metavar=("F", "G", "H"),
        help="verify existing cross tables against the strategy",
    )
    pt.add_argument("--checks", type=int, default=10_000, help="sampled checks for n > 6")
    pt.set_defaults(func=cmd_transform)

    pq = sub.add_parser("quadruples", parents=[common], help="count additive quadruples")
    pq.add_argument("--function", help="cross-function JSON file")
    pq.add_argument("--strategy", help="strategy JSON file (bound check)")
    pq.add_argument("--family", choices=FAMILIES)
    pq.add_argument("--n", type=int)
    pq.add_argument(
        "--method", choices=("histogram", "naive", "both"), default="histogram"
    )
    pq.set_defaults(func=cmd_quadruples)

    pe = sub.add_parser("extract", parents=[common], help="run the structure pipeline")
    pe.add_argument("--strategy", help="strategy JSON file")
    pe.add_argument("--family", choices=FAMILIES)
    pe.add_argument("--n", type=int)
    pe.add_argument("--corrupt-fraction", type=float, default=0.0)
    pe.add_argument(
        "--freiman-mode", choices=("auto", "exact", "randomized"), default="auto"
    )
    pe.add_argument("--trials", type=int, default=100_000)
    pe.set_defaults(func=cmd_extract)

    pd = sub.add_parser("decay", parents=[common], help="value decay curve as CSV")
    pd.add_argument("--family", choices=FAMILIES, required=True)
    pd.add_argument("--n-from", type=int, required=True)
    pd.add_argument("--n-to", type=int, required=True)
    pd.add_argument("--mode", choices=("exact", "mc"), default="exact")
    pd.add_argument("--samples", type=int, default=0)
    pd.set_defaults(func=cmd_decay)

    ps = sub.add_parser(
        "shift-structure", parents=[common], help="best mod-2 residue class of a table"
    )
    ps.add_argument("--function", help="cross-function JSON file")
    ps.add_argument("--from-strategy", help="strategy JSON file (uses Alice's table)")
    ps.set_defaults(func=cmd_shift_structure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig.from_args(args)
        return args.func(args)
    except StageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        if isinstance(exc.cause, DimensionError):
            return EXIT_DIMENSION
        if isinstance(exc.cause, ValidationError):
            return EXIT_VALIDATION
        return EXIT_INTERNAL
    except InternalCheckError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INTERNAL
    except DimensionError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DIMENSION
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
