"""Batch command line: verify | select | compare | solutions | explain.

Exit codes: 0 success (and zero violations / identical selections),
1 semantic failure (a violation or a selection mismatch), 2 usage or
configuration error.  Output is byte-deterministic for a fixed config and
seed; wall-clock fields are written as 0 unless --timing is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bounds as bounds_mod
from . import oracle, selector
from .bounds import BoundCandidate
from .errors import BoundforgeError, InvalidArgumentError

# documented tractable ceilings; BOUNDFORGE_MAX_N overrides both
_VERIFY_CAP = {"partition": 12, "binseq": 16}
_MODEL_CAP = {"partition": 8, "binseq": 10}
_VERIFY_DEFAULT_RANGE = {"partition": (1, 10), "binseq": (1, 14)}


class ConfigError(BoundforgeError):
    """Rejected run configuration (maps to exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    object: str
    n_lo: int
    n_hi: int
    bound_id: str | None
    candidates_path: str | None
    shuffle_seed: int | None
    fmt: str
    out: str | None
    timing: bool


def _parse_n(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(f"bad n specification {text!r} (expected N or A..B)") from None
    if lo < 1 or hi < lo:
        raise ConfigError(f"bad n range {text!r}")
    return lo, hi


def _cap_for(object_name: str, model_based: bool) -> int:
    env = os.environ.get("BOUNDFORGE_MAX_N")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"BOUNDFORGE_MAX_N={env!r} is not an integer") from None
    return (_MODEL_CAP if model_based else _VERIFY_CAP)[object_name]


def _check_cap(object_name: str, n_hi: int, model_based: bool) -> None:
    cap = _cap_for(object_name, model_based)
    if n_hi > cap:
        raise ConfigError(
            f"n={n_hi} exceeds the cap {cap} for {object_name} "
            "(override with BOUNDFORGE_MAX_N)"
        )


def load_candidates(path: str, object_name: str, n: int) -> list[BoundCandidate]:
    """Candidate list file: one bound id per line, # comments, duplicates
    allowed, decoy:<feature> synthesizes a vacuous upper bound."""
    out: list[BoundCandidate] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("decoy:"):
            feature = line.split(":", 1)[1].strip()
            out.append(bounds_mod.decoy(object_name, feature, n))
            continue
        cand = bounds_mod.by_id(line)
        if cand.object != object_name:
            raise ConfigError(f"bound {line} targets {cand.object}, not {object_name}")
        out.append(cand)
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(payload, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _emit_csv(rows: list[dict], fieldnames: list[str], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k) for k in fieldnames})
    _emit(buf.getvalue(), out)


# -- verify ---------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    if args.bound is not None:
        cand = bounds_mod.by_id(args.bound)
        if args.object is not None and args.object != cand.object:
            raise ConfigError(f"bound {cand.id} belongs to object {cand.object}")
        selected = [cand]
        objects_audited = [cand.object]
    elif args.object is not None:
        selected = bounds_mod.catalog(args.object)
        objects_audited = [args.object]
    else:
        selected = bounds_mod.catalog()
        objects_audited = ["partition", "binseq"]
    object_name = objects_audited[0] if len(objects_audited) == 1 else "both"

    def size_range(obj: str) -> tuple[int, int]:
        lo, hi = _parse_n(args.n) if args.n is not None else _VERIFY_DEFAULT_RANGE[obj]
        _check_cap(obj, hi, model_based=False)
        return lo, hi

    ranges = {obj: size_range(obj) for obj in objects_audited}
    reports = [
        oracle.audit(b, n)
        for b in selected
        for n in range(ranges[b.object][0], ranges[b.object][1] + 1)
    ]
    total_violations = sum(len(r.violations) for r in reports)
    rows = [r.row() for r in reports]
    if args.format == "json":
        _emit_json(
            {
                "object": object_name,
                "n": {obj: list(rng) for obj, rng in ranges.items()},
                "violations_total": total_violations,
                "reports": [r.to_json() for r in reports],
            },
            args.out,
        )
    elif args.format == "csv":
        _emit_csv(rows, ["bound", "n", "instances", "violations", "witnesses", "min_slack"], args.out)
    else:
        lines = [
            f"{r['bound']:<12} n={r['n']:<3} instances={r['instances']:<6} "
            f"violations={r['violations']:<3} witnesses={r['witnesses']:<5} "
            f"min_slack={r['min_slack']}"
            for r in rows
        ]
        lines.append(f"total violations: {total_violations}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if total_violations == 0 else 1


# -- select / compare -----------------------------------------------------------


def _scenario_candidates(args, object_name: str, n: int) -> list[BoundCandidate]:
    if args.candidates is not None:
        cands = load_candidates(args.candidates, object_name, n)
    else:
        cands = bounds_mod.catalog(object_name)
    if args.shuffle_seed is not None:
        rng = random.Random(args.shuffle_seed)
        rng.shuffle(cands)
    return cands


def _strip_wall(report: selector.SelectionReport, timing: bool) -> dict:
    payload = report.to_json()
    if not timing:
        payload["wall_ms"] = 0
    return payload


def cmd_select(args: argparse.Namespace) -> int:
    lo, hi = _parse_n(args.n)
    if lo != hi:
        raise ConfigError("select takes a single n, not a range")
    _check_cap(args.object, hi, model_based=True)
    cands = _scenario_candidates(args, args.object, hi)
    report = selector.selection(selector.ObjectScenario(args.object, hi), cands)
    payload = _strip_wall(report, args.timing)
    if args.format == "json":
        _emit_json(payload, args.out)
    elif args.format == "csv":
        row = dict(payload, selected=";".join(payload["selected"]))
        _emit_csv([row], ["selected", "posts", "labelings", "wall_ms"], args.out)
    else:
        _emit(
            "selected: {}\nposts: {}\nlabelings: {}\nwall_ms: {}\n".format(
                " ".join(payload["selected"]) or "(none)",
                payload["posts"], payload["labelings"], payload["wall_ms"],
            ),
            args.out,
        )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    lo, hi = _parse_n(args.n)
    if lo != hi:
        raise ConfigError("compare takes a single n, not a range")
    _check_cap(args.object, hi, model_based=True)
    cands = _scenario_candidates(args, args.object, hi)
    scenario = selector.ObjectScenario(args.object, hi)
    inc = selector.selection(scenario, cands)
    base = selector.baseline_selection(scenario, cands)
    identical = inc.selected == base.selected
    payload = {
        "identical": identical,
        "incremental": _strip_wall(inc, args.timing),
        "baseline": _strip_wall(base, args.timing),
    }
    if args.format == "json":
        _emit_json(payload, args.out)
    elif args.format == "csv":
        rows = [
            dict(_strip_wall(r, args.timing), engine=name,
                 selected=";".join(r.selected))
            for name, r in (("incremental", inc), ("baseline", base))
        ]
        _emit_csv(rows, ["engine", "selected", "posts", "labelings", "wall_ms"], args.out)
    else:
        _emit(
            "identical: {}\nincremental: selected={} posts={} labelings={}\n"
            "baseline:    selected={} posts={} labelings={}\n".format(
                identical,
                " ".join(inc.selected) or "(none)", inc.posts, inc.labelings,
                " ".join(base.selected) or "(none)", base.posts, base.labelings,
            ),
            args.out,
        )
    return 0 if identical else 1


# -- solutions --------------------------------------------------------------------


def cmd_solutions(args: argparse.Namespace) -> int:
    lo, hi = _parse_n(args.n)
    if lo != hi:
        raise ConfigError("solutions takes a single n, not a range")
    n = hi
    _check_cap(args.object, n, model_based=True)
    scenario = selector.ObjectScenario(args.object, n)
    cands = bounds_mod.catalog(args.object)

    counters = selector.Counters()
    model, featvars, xs = scenario.fresh(counters)
    without = selector.enumerate_all_solutions(model, featvars, xs, counters)

    model2, featvars2, xs2 = scenario.fresh(counters)
    with_all = selector.compute_all_solutions(model2, featvars2, xs2, cands, n, counters)
    with_by_isol = {r.isol: r for r in with_all}

    rows = []
    dominated = True
    for rec in without:
        paired = with_by_isol.get(rec.isol)
        nb_with = paired.nback if paired is not None else None
        if nb_with is not None and nb_with > rec.nback:
            dominated = False
        rows.append(
            {
                "isol": rec.isol,
                "sol": " ".join(map(str, rec.sol)),
                "nback_without": rec.nback,
                "nback_with_bounds": nb_with,
            }
        )
    payload = {
        "object": args.object,
        "n": n,
        "lex_order": rows,
        "sorted_by_nback_without": [
            r.isol for r in sorted(without, key=lambda r: (r.nback, r.isol))
        ],
        "sorted_by_nback_with_bounds": [r.isol for r in with_all],
        "nback_dominated_with_bounds": dominated,
    }
    if args.format == "json":
        _emit_json(payload, args.out)
    elif args.format == "csv":
        _emit_csv(rows, ["isol", "sol", "nback_without", "nback_with_bounds"], args.out)
    else:
        lines = [
            f"isol={r['isol']:<4} sol=[{r['sol']}] "
            f"nback={r['nback_without']} nback_all_bounds={r['nback_with_bounds']}"
            for r in rows
        ]
        lines.append(f"dominated with bounds: {dominated}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- explain ----------------------------------------------------------------------


def _render_prefix(node, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if not isinstance(node, list):
        return [f"{pad}{node}"]
    head, rest = node[0], node[1:]
    lines = [f"{pad}({head}"]
    for child in rest:
        lines.extend(_render_prefix(child, indent + 1))
    lines.append(f"{pad})")
    return lines


def cmd_explain(args: argparse.Namespace) -> int:
    cand = bounds_mod.by_id(args.bound_id)
    entry = {
        "id": cand.id,
        "object": cand.object,
        "target": cand.target,
        "direction": cand.direction,
        "inputs": list(cand.inputs()),
        "rhs": cand.rhs.prefix(),
    }
    if args.format == "json":
        _emit_json(entry, args.out)
    else:
        rel = "<=" if cand.direction == "upper" else ">="
        lines = [
            f"{cand.id}: {cand.object} {cand.target} {rel} rhs({', '.join(cand.inputs())})",
            *_render_prefix(cand.rhs.prefix()),
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundforge",
        description="Bound-constraint auditing and most-filtering selection",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p: argparse.ArgumentParser, model_based: bool) -> None:
        p.add_argument("--format", choices=["json", "csv", "text"], default="json")
        p.add_argument("--out", type=str, default=None)
        if model_based:
            p.add_argument("--timing", action="store_true",
                           help="include wall-clock times in the report")

    pv = sub.add_parser("verify", help="exhaustively audit catalog bounds")
    pv.add_argument("--object", choices=["partition", "binseq"])
    pv.add_argument("--bound", type=str, default=None, help="audit a single bound id")
    pv.add_argument("--n", type=str, default=None, help="size N or range A..B")
    common(pv, model_based=False)

    ps = sub.add_parser("select", help="run the incremental selection")
    ps.add_argument("--object", choices=["partition", "binseq"], required=True)
    ps.add_argument("--n", type=str, required=True)
    ps.add_argument("--candidates", type=str, default=None,
                    help="candidate list file (default: full catalog)")
    ps.add_argument("--shuffle-seed", type=int, default=None)
    common(ps, model_based=True)

    pc = sub.add_parser("compare", help="incremental vs baseline selection")
    pc.add_argument("--object", choices=["partition", "binseq"], required=True)
    pc.add_argument("--n", type=str, required=True)
    pc.add_argument("--candidates", type=str, default=None)
    pc.add_argument("--shuffle-seed", type=int, default=None)
    common(pc, model_based=True)

    po = sub.add_parser("solutions", help="solution/backtrack tables")
    po.add_argument("--object", choices=["partition", "binseq"], required=True)
    po.add_argument("--n", type=str, required=True)
    common(po, model_based=True)

    pe = sub.add_parser("explain", help="print one bound's expression tree")
    pe.add_argument("bound_id", type=str)
    pe.add_argument("--format", choices=["json", "text"], default="text")
    pe.add_argument("--out", type=str, default=None)

    return parser


_HANDLERS = {
    "verify": cmd_verify,
    "select": cmd_select,
    "compare": cmd_compare,
    "solutions": cmd_solutions,
    "explain": cmd_explain,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.cmd](args)
    except (ConfigError, InvalidArgumentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
