"""Command line front end.

Commands: ``analyze``, ``orbit``, ``broken-line``, ``induce``, ``verify``
and ``equidistribution``.  Configuration comes from an optional JSON file
(--config) with individual flags taking precedence.  All artifacts embed the
seed, exact values are emitted as strings, floats with 17 significant
digits, and files are written atomically, so equal configurations produce
byte-identical outputs.

Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
3 hypothesis violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import verification
from .dynamics import (
    TorusPoint2,
    equidistribution_report,
    first_return,
    golden,
    golden_skew_step,
    renormalization_check,
    self_induction_check,
    strip_family,
    strip_region,
)
from .factorization import (
    EigenSignError,
    HypothesisError,
    check_hypothesis_H,
    eigen_data,
    factor,
    flow_of,
    surface_quadric,
)
from .freegroup import broken_line_counts, fixed_point_prefix, parse_substitution
from .heisenberg import canonicalize, exp_point, flow, parse_group_point
from .scalar import GOLDEN, ParseError, parse_scalar, scalar_float, scalar_str


def _fmt_float(x: float) -> str:
    return f"{x:.17g}"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def emit_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    atomic_write(path, "\n".join(lines) + "\n")


def emit_jsonl(path: Path, records) -> None:
    lines = [json.dumps(r, sort_keys=True) for r in records]
    atomic_write(path, "\n".join(lines) + "\n")


def emit_report(path: Path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


DEFAULTS = {
    "substitution": "a->ab;b->a",
    "context": None,
    "seed": 0,
    "iters": 10_000,
    "samples": 100,
    "length": 200,
    "radius": 3,
    "threshold": 0.05,
    "s": "-1",
    "s_prime": "-1",
    "theta": "0",
    "kind": "translation",
    "start": None,
    "step": "1/2",
    "format": "csv",
    "out": ".",
}


def load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad config JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ParseError("config must be a JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            cfg[key] = value
    return cfg


def _scalar_arg(cfg: dict, key: str):
    value = cfg[key]
    if isinstance(value, (int, float)):
        return Fraction(value) if isinstance(value, int) else value
    ctx = GOLDEN
    if cfg.get("context"):
        from .scalar import QuadraticContext
        ctx = QuadraticContext.from_text(str(cfg["context"]))
    return parse_scalar(str(value), ctx)


def cmd_analyze(cfg: dict) -> int:
    sub = parse_substitution(cfg["substitution"])
    endo = factor(sub)
    report = check_hypothesis_H(endo)
    rows: list[tuple[str, str, str]] = [
        ("matrix", f"[[{endo.a}, {endo.b}], [{endo.c}, {endo.d}]]", ""),
        ("det", str(endo.det_m()), ""),
        ("e, f", f"{endo.e}, {endo.f}", ""),
    ]
    if not report.passed:
        print(f"substitution: {sub}")
        for name, exact, _ in rows:
            print(f"  {name:12} {exact}")
        print("  hypothesis violated: " + "; ".join(report.failures))
        raise HypothesisError("; ".join(report.failures))
    data = eigen_data(endo)
    quadric = surface_quadric(data)
    rows.append(("context T,D", f"{data.context.trace},{data.context.det}", ""))
    for name, value in [
        ("lam", data.lam), ("lam'", data.lam_prime),
        ("alpha", data.alpha), ("beta", data.beta),
        ("alpha'", data.alpha_p), ("beta'", data.beta_p),
        ("gamma", data.gamma), ("gamma'", data.gamma_p),
        ("Delta", data.delta),
        ("t_a", data.t_a), ("t_b", data.t_b),
        ("s_a", data.s_a), ("s_b", data.s_b),
        ("Q_xx", quadric.qxx), ("Q_xy", quadric.qxy), ("Q_yy", quadric.qyy),
        ("Q_x", quadric.qx), ("Q_y", quadric.qy),
    ]:
        rows.append((name, scalar_str(value), _fmt_float(scalar_float(value))))
    print(f"substitution: {sub}")
    for name, exact, approx in rows:
        suffix = f"  ~ {approx}" if approx else ""
        print(f"  {name:12} {exact}{suffix}")
    out = cfg.get("analysis_out")
    if out:
        emit_report(Path(cfg["out"]) / out, {
            "substitution": str(sub),
            "values": {n: {"exact": e, "float": a} for n, e, a in rows},
        })
    return 0


def _orbit_rows_translation(cfg: dict):
    sub = parse_substitution(cfg["substitution"])
    data = eigen_data(factor(sub))
    g = exp_point(flow_of(data, "lam"))
    from .heisenberg import GroupPoint
    point = (
        parse_group_point(cfg["start"], data.context)
        if cfg["start"] else GroupPoint(0, 0, 0)
    )
    for k in range(int(cfg["iters"]) + 1):
        rep = canonicalize(point).rep
        yield k, ("x", "y", "z"), (rep.x, rep.y, rep.z)
        point = g * rep


def _orbit_rows_flow(cfg: dict):
    sub = parse_substitution(cfg["substitution"])
    data = eigen_data(factor(sub))
    vec = flow_of(data, "lam")
    from .heisenberg import GroupPoint
    start = (
        parse_group_point(cfg["start"], data.context)
        if cfg["start"] else GroupPoint(0, 0, 0)
    )
    dt = _scalar_arg(cfg, "step")
    t = dt - dt
    for k in range(int(cfg["iters"]) + 1):
        rep = canonicalize(flow(vec, t, start)).rep
        yield k, ("x", "y", "z"), (rep.x, rep.y, rep.z)
        t = t + dt


def _orbit_rows_skew(cfg: dict):
    u, v = golden(0), golden(0)
    for k in range(int(cfg["iters"]) + 1):
        yield k, ("u", "v"), (u, v)
        u, v = golden_skew_step(u, v)


def _orbit_rows_strip(cfg: dict):
    pmap = strip_family(_scalar_arg(cfg, "s"), _scalar_arg(cfg, "theta"))
    pt = TorusPoint2(golden(0), golden(0))
    for k in range(int(cfg["iters"]) + 1):
        yield k, ("u", "v"), (pt.u, pt.v)
        pt = pmap(pt)


ORBIT_KINDS = {
    "translation": _orbit_rows_translation,
    "flow": _orbit_rows_flow,
    "skew": _orbit_rows_skew,
    "strip": _orbit_rows_strip,
}


def cmd_orbit(cfg: dict) -> int:
    kind = cfg["kind"]
    if kind not in ORBIT_KINDS:
        raise ParseError(f"unknown orbit kind {kind!r}")
    rows = list(ORBIT_KINDS[kind](cfg))
    names = rows[0][1]
    outdir = Path(cfg["out"])
    if cfg["format"] == "csv":
        emit_csv(
            outdir / f"orbit-{kind}.csv",
            ["k", *names],
            ((str(k), *(_fmt_float(scalar_float(c)) for c in coords))
             for k, _, coords in rows),
        )
    else:
        records = [
            {"k": k, "seed": cfg["seed"],
             **{n: scalar_str(c) for n, c in zip(names, coords)}}
            for k, _, coords in rows
        ]
        emit_jsonl(outdir / f"orbit-{kind}.jsonl", records)
    return 0


def cmd_broken_line(cfg: dict) -> int:
    sub = parse_substitution(cfg["substitution"])
    n = int(cfg["length"])
    word = fixed_point_prefix(sub, n)
    counts = broken_line_counts(word)
    endo = factor(sub)
    rows = []
    sup = 0.0
    report = check_hypothesis_H(endo)
    if report.passed:
        data = eigen_data(endo)
        af, bf = scalar_float(data.alpha), scalar_float(data.beta)
    else:
        af = bf = float("nan")
    for k, (a, b, c) in enumerate(counts):
        pu, pv = a - k * af, b - k * bf
        sup = max(sup, abs(pu), abs(pv))
        rows.append((str(k), str(a), str(b), str(c),
                     _fmt_float(pu), _fmt_float(pv)))
    emit_csv(Path(cfg["out"]) / "broken-line.csv",
             ["k", "a", "b", "c", "proj_u", "proj_v"], rows)
    print(f"emitted {len(rows)} rows, projection sup norm {sup:.6f}")
    return 0


def cmd_induce(cfg: dict) -> int:
    s = _scalar_arg(cfg, "s")
    s_prime = _scalar_arg(cfg, "s_prime")
    theta = _scalar_arg(cfg, "theta")
    renorm = renormalization_check(s, s_prime, theta)
    pmap = strip_family(s, theta)
    region = strip_region()
    counts = []
    for i in range(24):
        u = golden(Fraction(i, 63))
        if region.contains(u):
            rec = first_return(pmap, region, TorusPoint2(u, golden(0)), 16)
            counts.append({"u": scalar_str(u), "n": rec.iterates})
    sub = parse_substitution(cfg["substitution"])
    data = eigen_data(factor(sub))
    induction = self_induction_check(
        data, samples=int(cfg["samples"]), seed=int(cfg["seed"])
    )
    report = {
        "seed": cfg["seed"],
        "renormalization": renorm,
        "return_counts": counts,
        "self_induction": {k: induction[k] for k in
                           ("samples", "containment", "passed", "failures")},
    }
    emit_report(Path(cfg["out"]) / "induce-report.json", report)
    ok = renorm["passed"] and induction["passed"]
    print(f"induce: renormalization {'ok' if renorm['passed'] else 'FAILED'}, "
          f"self-induction {'ok' if induction['passed'] else 'FAILED'}")
    return 0 if ok else 1


def cmd_verify(cfg: dict) -> int:
    seed = int(cfg["seed"])
    results = verification.run_all(seed)
    report = {
        "seed": seed,
        "passed": all(bool(r.passed) for r in results),
        "checks": [
            {"name": r.name, "passed": bool(r.passed), "details": r.details}
            for r in results
        ],
    }
    emit_report(Path(cfg["out"]) / "verify-report.json", report)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
    return 0 if report["passed"] else 1


def cmd_equidistribution(cfg: dict) -> int:
    outdir = Path(cfg["out"])
    reports = {}
    for kind in ("skew", "nilflow"):
        rep = equidistribution_report(
            kind, int(cfg["iters"]), radius=int(cfg["radius"]),
            threshold=float(cfg["threshold"]),
        )
        reports[kind] = rep
        print(f"{kind}: worst |S_N|/N = {rep['worst_modulus']:.6f} "
              f"at N = {rep['n_iter']}{' (escalated)' if rep['escalated'] else ''}")
    if cfg["format"] == "csv":
        rows = []
        for kind, rep in reports.items():
            for pq, mod in sorted(rep["moduli"].items()):
                rows.append((kind, pq, _fmt_float(mod)))
        emit_csv(outdir / "weyl-sums.csv", ["kind", "p,q", "modulus"],
                 ((k, f'"{pq}"', m) for k, pq, m in rows))
    else:
        emit_report(outdir / "weyl-sums.json", reports)
    return 0 if all(r["passed"] for r in reports.values()) else 1


COMMANDS = {
    "analyze": cmd_analyze,
    "orbit": cmd_orbit,
    "broken-line": cmd_broken_line,
    "induce": cmd_induce,
    "verify": cmd_verify,
    "equidistribution": cmd_equidistribution,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilflow",
        description="Exact Heisenberg nilflow and niltranslation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="64-bit seed")
        p.add_argument("--samples", type=int)
        p.add_argument("--iters", type=int)
        p.add_argument("--format", choices=["csv", "jsonl"])
        p.add_argument("--substitution", help="e.g. 'a->ab;b->a'")
        if name == "orbit":
            p.add_argument("--kind", choices=sorted(ORBIT_KINDS))
            p.add_argument("--start", help="group point '[x, y, z]'")
            p.add_argument("--step", help="flow sampling step (exact scalar)")
        if name == "broken-line":
            p.add_argument("--length", type=int)
        if name == "induce":
            p.add_argument("--s")
            p.add_argument("--s-prime", dest="s_prime")
            p.add_argument("--theta")
        if name == "equidistribution":
            p.add_argument("--radius", type=int)
            p.add_argument("--threshold", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (HypothesisError, EigenSignError) as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
