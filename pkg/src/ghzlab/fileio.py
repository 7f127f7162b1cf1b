"""On-disk formats.  All JSON is written canonically (sorted keys, indent 2,
trailing newline) so that write -> read -> write is byte-identical.

schema_version 1 formats:

* strategy:   {"n": int, "f": [hex], "g": [hex], "h": [hex]} -- entry j is the
              n-bit output for input j, packed little-endian into ceil(n/8)
              bytes and hex-encoded.
* crossfn:    {"n": int, "table": [base-4 strings]} -- entry j spells the
              digits of the value at input j, most significant coordinate
              (index n-1) first.
* groupset:   {"n": int, "elements": [[bitvec-hex, quat-base4], ...]} sorted.
* golden:     {"n": int, "value_num": int, "value_den": int}.
* constraints:{"t": int, "n": int, "index_sets": [[int]]} -- 1-based coords.
* value/quadruple/extraction reports: exact rationals appear as
  {"num": int, "den": int}; no floats unless the quantity is a Monte Carlo
  estimate.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .additive import GroupSet, QuadrupleReport
from .crossfn import CrossFn, CrossTriple
from .errors import ValidationError
from .extraction import ExtractionReport, ParityConstraintSystem
from .game import StrategyTable, StrategyTriple, ValueReport


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_canonical(obj), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc


def _expect(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{path}: missing key {key!r}")
    return obj[key]


# -- scalar codecs ----------------------------------------------------------


def bitvec_to_hex(v: int, n: int) -> str:
    if not 0 <= v < (1 << n):
        raise ValidationError(f"bit vector {v} out of range for n={n}")
    return v.to_bytes((n + 7) // 8, "little").hex()


def bitvec_from_hex(s: str, n: int) -> int:
    try:
        raw = bytes.fromhex(s)
    except ValueError as exc:
        raise ValidationError(f"bad hex string {s!r}") from exc
    if len(raw) != (n + 7) // 8:
        raise ValidationError(f"hex string {s!r} has wrong length for n={n}")
    v = int.from_bytes(raw, "little")
    if v >= (1 << n):
        raise ValidationError(f"decoded value {v} out of range for n={n}")
    return v


def quat_to_base4(w: int, n: int) -> str:
    if not 0 <= w < (1 << (2 * n)):
        raise ValidationError(f"quaternary vector {w} out of range for n={n}")
    return "".join(str((w >> (2 * (n - 1 - k))) & 3) for k in range(n))


def quat_from_base4(s: str, n: int) -> int:
    if len(s) != n or any(c not in "0123" for c in s):
        raise ValidationError(f"bad base-4 string {s!r} for n={n}")
    w = 0
    for k, c in enumerate(s):
        w |= int(c) << (2 * (n - 1 - k))
    return w


def fraction_to_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def fraction_from_json(obj, path="<fraction>") -> Fraction:
    return Fraction(int(_expect(obj, "num", path)), int(_expect(obj, "den", path)))


# -- strategies -------------------------------------------------------------


def strategy_to_json(st: StrategyTriple) -> dict:
    n = st.n
    return {
        "n": n,
        "f": [bitvec_to_hex(int(v), n) for v in st.f.table],
        "g": [bitvec_to_hex(int(v), n) for v in st.g.table],
        "h": [bitvec_to_hex(int(v), n) for v in st.h.table],
    }


def strategy_from_json(obj, path="<strategy>") -> StrategyTriple:
    n = int(_expect(obj, "n", path))
    tables = {}
    for key in ("f", "g", "h"):
        entries = _expect(obj, key, path)
        if not isinstance(entries, list) or len(entries) != (1 << n):
            raise ValidationError(f"{path}: table {key!r} must list 2^{n} entries")
        tables[key] = StrategyTable(
            n, np.asarray([bitvec_from_hex(e, n) for e in entries], dtype=np.int64)
        )
    return StrategyTriple(tables["f"], tables["g"], tables["h"])


def write_strategy(path, st: StrategyTriple) -> None:
    write_json(path, strategy_to_json(st))


def read_strategy(path) -> StrategyTriple:
    return strategy_from_json(read_json(path), str(path))


# -- cross-functions --------------------------------------------------------


def crossfn_to_json(F: CrossFn) -> dict:
    return {"n": F.n, "table": [quat_to_base4(int(w), F.n) for w in F.table]}


def crossfn_from_json(obj, path="<crossfn>") -> CrossFn:
    n = int(_expect(obj, "n", path))
    entries = _expect(obj, "table", path)
    if not isinstance(entries, list) or len(entries) != (1 << n):
        raise ValidationError(f"{path}: table must list 2^{n} entries")
    return CrossFn(
        n, np.asarray([quat_from_base4(e, n) for e in entries], dtype=np.int64)
    )


def write_crossfn(path, F: CrossFn) -> None:
    write_json(path, crossfn_to_json(F))


def read_crossfn(path) -> CrossFn:
    return crossfn_from_json(read_json(path), str(path))


# -- group sets and constraint systems --------------------------------------


def groupset_to_json(gs: GroupSet) -> dict:
    n = gs.n
    return {
        "n": n,
        "elements": [
            [bitvec_to_hex(int(u), n), quat_to_base4(int(w), n)]
            for u, w in zip(gs.us(), gs.ws())
        ],
    }


def groupset_from_json(obj, path="<groupset>") -> GroupSet:
    n = int(_expect(obj, "n", path))
    elements = _expect(obj, "elements", path)
    pairs = []
    for item in elements:
        if not isinstance(item, list) or len(item) != 2:
            raise ValidationError(f"{path}: elements must be [hex, base4] pairs")
        pairs.append((bitvec_from_hex(item[0], n), quat_from_base4(item[1], n)))
    return GroupSet.from_pairs(n, pairs)


def constraints_to_json(w: ParityConstraintSystem) -> dict:
    return {
        "t": w.t,
        "n": w.n,
        "index_sets": [
            [i + 1 for i in range(w.n) if (m >> i) & 1] for m in w.masks
        ],
    }


def constraints_from_json(obj, path="<constraints>") -> ParityConstraintSystem:
    n = int(_expect(obj, "n", path))
    sets = _expect(obj, "index_sets", path)
    masks = []
    for idx_set in sets:
        m = 0
        for j in idx_set:
            if not 1 <= int(j) <= n:
                raise ValidationError(f"{path}: index {j} outside 1..{n}")
            m |= 1 << (int(j) - 1)
        masks.append(m)
    if "t" in obj and int(obj["t"]) != len(masks):
        raise ValidationError(f"{path}: t does not match index_sets length")
    return ParityConstraintSystem(n, tuple(masks))


# -- reports ----------------------------------------------------------------


def golden_value_to_json(n: int, value: Fraction) -> dict:
    return {"n": n, "value_num": value.numerator, "value_den": value.denominator}


def golden_value_from_json(obj, path="<golden>") -> tuple[int, Fraction]:
    return (
        int(_expect(obj, "n", path)),
        Fraction(int(_expect(obj, "value_num", path)), int(_expect(obj, "value_den", path))),
    )


def value_report_to_json(rep: ValueReport, n: int, mode: str) -> dict:
    out: dict = {"schema_version": 1, "kind": "value_report", "n": n, "mode": mode}
    if rep.is_exact:
        out["eta"] = fraction_to_json(rep.eta)
    else:
        out["eta"] = rep.eta
        out["ci_halfwidth"] = rep.ci_halfwidth
        out["samples"] = rep.samples
        out["seed"] = rep.seed
    return out


def quadruple_report_to_json(rep: QuadrupleReport) -> dict:
    out = {
        "schema_version": 1,
        "kind": "quadruple_report",
        "n": rep.n,
        "N": rep.N,
        "method": rep.method,
        "count": rep.count,
        "density": fraction_to_json(rep.density),
    }
    if rep.bound is not None:
        out["bound"] = fraction_to_json(rep.bound)
    return out


def extraction_report_to_json(rep: ExtractionReport) -> dict:
    n = rep.n
    fre = rep.freiman
    return {
        "schema_version": rep.schema_version,
        "kind": "extraction_report",
        "n": n,
        "source": rep.source,
        "seed": rep.seed,
        "parity_anchored": rep.parity_anchored,
        "eta": fraction_to_json(rep.eta),
        "quadruples": {
            "count": rep.quad_count,
            "bound": fraction_to_json(rep.quad_bound),
            "holds": rep.lemma_quadruples_ok,
            "density": fraction_to_json(rep.xi),
        },
        "graph_size": rep.gamma_size,
        "extracted_subset": {
            "size": rep.gamma_prime_size,
            "candidates_tried": rep.bsg_candidates,
            "diff_size": rep.doubling_diff_size,
            "doubling_ratio": fraction_to_json(rep.doubling_ratio),
        },
        "C": rep.doubling_C,
        "t": rep.t,
        "Y_size": rep.Y_size,
        "Y_le_C": rep.Y_le_C,
        "Yx_law_ok": rep.yx_law_ok,
        "W": {
            "t": rep.t,
            "index_sets": [list(s) for s in rep.W_index_sets],
            "attempts": rep.w_attempts,
        },
        "coset_choice": {
            "a": quat_to_base4(rep.chosen_a, n),
            "slice_size": rep.gamma_a_size,
            "realized_cosets": rep.realized_cosets,
            "pigeonhole_ok": rep.pigeonhole_ok,
        },
        "A": [bitvec_to_hex(x, n) for x in rep.A],
        "freiman": {
            "ok": fre.ok,
            "order": fre.order,
            "mode": fre.mode,
            "trials": fre.trials,
            "effective": fre.effective,
            "violations": fre.violations,
        },
        "shift": {"s": quat_to_base4(rep.shift_s, n), "ok": rep.shift_ok},
        "mod2": {
            "s_best": quat_to_base4(rep.mod2_s_best, n),
            "fraction": fraction_to_json(rep.shift_fraction),
        },
        "eta_exponents": {
            "composed": rep.eta_exponent_composed,
            "headline": rep.eta_exponent_headline,
        },
    }
