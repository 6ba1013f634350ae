"""``coexist`` command line tool.

stdout carries JSON or CSV only; diagnostics go to stderr.  Exit status is
0 for coexistent / success, 1 for not coexistent / disagreements found, 2 for
bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .coexistence import AGREEMENT_BAND, Route, criterion_unbiased, decide, decide_arrays
from .construction import construct_joint, hyperbola_segments, verify_joint
from .effects import effect_from_json
from .exceptions import CoexistenceError, NotCoexistent
from .minkowski import DEFAULT_TOL
from .sampling import SAMPLERS, sample_pairs

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2
ORACLE_BAND = 1e-5
CRITERIA = ("thm3", "cor1", "thm4", "yu", "oracle")


class InputError(Exception):
    pass


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _emit(obj, out=None):
    text = dumps(obj) + "\n"
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)


def _read_effect(arg: str, tol: float):
    if arg is None:
        raise InputError("missing effect argument")
    text = arg
    if arg.startswith("@"):
        try:
            text = Path(arg[1:]).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg[1:]}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    return effect_from_json(obj, tol=tol)


def _default_tol() -> float:
    raw = os.environ.get("COEXIST_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"COEXIST_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise InputError("COEXIST_TOL must be positive")
    return tol


# -- check ------------------------------------------------------------------


def cmd_check(args) -> int:
    e = _read_effect(args.e, args.tol)
    f = _read_effect(args.f, args.tol)
    report = decide(e, f, args.tol)
    out = report.to_dict()
    out["e"] = e.to_json()
    out["f"] = f.to_json()
    out["tol"] = args.tol
    if not args.no_oracle:
        res = oracle.solve(e, f, tol=args.oracle_tol, budget=args.budget)
        out["oracle"] = res.to_dict()
        if res.feasible != report.verdict:
            print(
                f"note: oracle disagrees (best margin {res.best_margin:.3g}); "
                "expected only within the tolerance band",
                file=sys.stderr,
            )
    _emit(out, args.out)
    return EXIT_OK if report.verdict else EXIT_NO


# -- construct --------------------------------------------------------------


def cmd_construct(args) -> int:
    e = _read_effect(args.e, args.tol)
    f = _read_effect(args.f, args.tol)
    try:
        J = construct_joint(e, f, policy=args.lambda_policy, tol=args.tol)
    except NotCoexistent as exc:
        out = {"coexistent": False, "report": exc.report.to_dict() if exc.report else None}
        if exc.report is not None and exc.report.route is Route.MAIN_CRITERION:
            seg = hyperbola_segments(e, f, args.tol)
            out["segments"] = seg.to_dict()
            out["gap"] = seg.gap
        print(f"not coexistent: {exc}", file=sys.stderr)
        _emit(out, args.out)
        return EXIT_NO
    check = verify_joint(J)
    out = {"coexistent": True, "joint": J.to_json(), "verification": check.to_dict()}
    _emit(out, args.out)
    if not check.ok:
        print("constructed observable failed verification", file=sys.stderr)
        return EXIT_NO
    return EXIT_OK


# -- sample -----------------------------------------------------------------


def _agreement(verdicts: dict, masks: dict) -> tuple[dict, list]:
    """Pairwise comparison counts and the list of ``(i, a, b)`` disagreements."""
    table, bad = {}, []
    for a in verdicts:
        table[a] = {}
        for b in verdicts:
            both = masks[a] & masks[b]
            diff = both & (verdicts[a] != verdicts[b])
            table[a][b] = {"compared": int(both.sum()), "disagree": int(diff.sum())}
            if a < b:
                bad.extend((int(i), a, b) for i in np.flatnonzero(diff))
    return table, bad


def cmd_sample(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    rng = np.random.default_rng(args.seed)
    E, F = sample_pairs(rng, args.n, args.sampler)
    d = decide_arrays(E, F, tol=args.tol)
    margin = d["margin"]
    outside = np.abs(margin) > AGREEMENT_BAND

    verdicts = {k: np.asarray(d[k], dtype=bool) for k in ("thm3", "cor1", "thm4", "yu")}
    masks = {k: outside for k in verdicts}
    masks["yu"] = outside & ~d["yu_guarded"]
    min_margins = {
        "thm3": float(np.min(np.abs(margin))),
        "cor1": float(np.min(np.abs(d["cor1_margin"]))),
        "thm4": float(np.min(np.abs(d["thm4_margin"]))),
    }
    yu_ok = ~d["yu_guarded"]
    min_margins["yu"] = float(np.min(np.abs(d["yu_margin"][yu_ok]))) if yu_ok.any() else None

    if not args.no_oracle:
        sel = np.abs(margin) > ORACLE_BAND
        feasible = np.zeros(args.n, dtype=bool)
        if sel.any():
            res = oracle.solve_batch(E[sel], F[sel], tol=args.oracle_tol, budget=args.budget)
            feasible[sel] = res["feasible"]
            min_margins["oracle"] = float(np.min(np.abs(res["best_margin"])))
        else:
            min_margins["oracle"] = None
        verdicts["oracle"] = feasible
        masks["oracle"] = sel

    table, bad = _agreement(verdicts, masks)
    routes = {r.value: int(np.sum(d["route"] == code)) for code, r in enumerate(Route)}
    summary = {
        "n": args.n,
        "seed": args.seed,
        "sampler": args.sampler,
        "tol": args.tol,
        "band": AGREEMENT_BAND,
        "oracle_band": None if args.no_oracle else ORACLE_BAND,
        "criteria": list(verdicts),
        "agreement": table,
        "route_counts": routes,
        "min_abs_margins": min_margins,
        "disagreements": len(bad),
    }
    if args.disagreements:
        _write_disagreements(args.disagreements, bad, E, F, margin)
    _emit(summary, args.out)
    if bad:
        print(f"{len(bad)} disagreement(s) outside the tolerance bands", file=sys.stderr)
        return EXIT_NO
    return EXIT_OK


def _write_disagreements(path, bad, E, F, margin):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "criterion_a", "criterion_b", "margin55"]
               + [f"e{k}" for k in range(4)] + [f"f{k}" for k in range(4)])
    for i, a, b in sorted(bad):
        w.writerow([i, a, b, repr(float(margin[i]))] + [repr(float(x)) for x in (*E[i], *F[i])])
    _write_text(path, buf.getvalue())


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


# -- scan -------------------------------------------------------------------


def _radii(lo, hi, n, limit, label):
    if not 0.0 <= lo <= hi <= limit + 1e-15:
        raise InputError(f"{label} radius range [{lo}, {hi}] must lie within [0, {limit:g}]")
    return np.linspace(lo, hi, n)


def scan_rows(mode, resolution, angles, r_min=0.0, r_max=None, bias_e=0.0, bias_f=0.0, tol=DEFAULT_TOL):
    """Rows of the scan table as lists of python scalars (header first)."""
    if resolution < 2:
        raise InputError("--resolution must be at least 2")
    if mode == "unbiased_boundary":
        bias_e = bias_f = 0.0
    for b in (bias_e, bias_f):
        if not -1.0 <= b <= 1.0:
            raise InputError("biases must lie in [-1, 1]")
    lim_e, lim_f = 1.0 - abs(bias_e), 1.0 - abs(bias_f)
    re = _radii(r_min, min(lim_e, lim_f) if r_max is None else r_max, resolution, lim_e, "e")
    rf = _radii(r_min, min(lim_e, lim_f) if r_max is None else r_max, resolution, lim_f, "f")

    if mode == "unbiased_boundary":
        yield ["r_e", "r_f", "angle_rad", "verdict", "margin60"]
        for th in angles:
            for a in re:
                for b in rf:
                    u = criterion_unbiased(np.array([a, 0.0, 0.0]), b * np.array([math.cos(th), math.sin(th), 0.0]), tol)
                    yield [float(a), float(b), float(th), int(u.verdict), u.margins[2]]
    elif mode == "margin_grid":
        yield ["r_e", "r_f", "angle_rad", "bias_e", "bias_f", "route", "verdict", "margin55"]
        for th in angles:
            A, B = np.meshgrid(re, rf, indexing="ij")
            A, B = A.ravel(), B.ravel()
            E = np.column_stack([np.full_like(A, (1 + bias_e) / 2), A / 2, 0 * A, 0 * A])
            F = np.column_stack([np.full_like(B, (1 + bias_f) / 2), B * math.cos(th) / 2, B * math.sin(th) / 2, 0 * B])
            d = decide_arrays(E, F, tol=tol)
            names = [r.value for r in Route]
            for i in range(len(A)):
                yield [float(A[i]), float(B[i]), float(th), bias_e, bias_f,
                       names[d["route"][i]], int(d["verdict"][i]), float(d["margin"][i])]
    else:
        raise InputError(f"unknown scan mode {mode!r}")


def cmd_scan(args) -> int:
    angles = args.angle if args.angle else [math.pi / 2]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in scan_rows(args.mode, args.resolution, angles, args.r_min, args.r_max,
                         args.bias_e, args.bias_f, args.tol):
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    if args.out:
        _write_text(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser(default_tol: float = DEFAULT_TOL) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coexist", description="Coexistence of qubit effects.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive, default=default_tol,
                        help="analytic tolerance (default from COEXIST_TOL or %(default)g)")
    common.add_argument("--out", help="write output here instead of stdout")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--e", required=True, help='effect JSON, e.g. \'{"coeffs":[0.5,0.5,0,0]}\', or @file')
    pair.add_argument("--f", required=True, help="second effect, same format")

    orc = argparse.ArgumentParser(add_help=False)
    orc.add_argument("--no-oracle", action="store_true", help="skip the numerical oracle")
    orc.add_argument("--oracle-tol", type=_positive, default=oracle.DEFAULT_TOL)
    orc.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET, help="oracle evaluations per pair")

    c = sub.add_parser("check", parents=[common, pair, orc], help="decide coexistence with diagnostics")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("construct", parents=[common, pair], help="build a joint observable")
    c.add_argument("--lambda-policy", default="geometric", help="geometric, lo, hi or quantile=<q>")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("sample", parents=[common, orc], help="criterion vs oracle agreement campaign")
    c.add_argument("--n", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--sampler", choices=SAMPLERS, default="mixed")
    c.add_argument("--disagreements", help="CSV file for disagreeing pairs")
    c.set_defaults(func=cmd_sample)

    c = sub.add_parser("scan", parents=[common], help="emit a CSV grid of verdicts and margins")
    c.add_argument("--mode", choices=("unbiased_boundary", "margin_grid"), default="unbiased_boundary")
    c.add_argument("--resolution", type=int, default=200)
    c.add_argument("--angle", type=float, action="append", help="angle in radians between the axes (repeatable)")
    c.add_argument("--r-min", type=float, default=0.0)
    c.add_argument("--r-max", type=float, default=None)
    c.add_argument("--bias-e", type=float, default=0.0, help="2 e0 - 1 (margin_grid only)")
    c.add_argument("--bias-f", type=float, default=0.0)
    c.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    try:
        default_tol = _default_tol()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    args = build_parser(default_tol).parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except CoexistenceError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
