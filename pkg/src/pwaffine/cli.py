"""Command-line front end.

    pwaffine attractor      --map beta=2,sign=+,bp=0:1/2:1,alpha=1:2 --seeds 1/3
    pwaffine quasipartition --map beta=2,sign=-,bp=0:1/6:1/2:5/6:1,alpha=1:2:1:2
    pwaffine simulate       --x c-1/4,c,c+1/2 --v0 0.11,0,0.89 --events 60 --out orbit.csv
    pwaffine richness       --number "champernowne(4)" --k 3 --prefix 10000
    pwaffine verify all

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 inconclusive or
precision exhausted. Reports are JSON and carry the exact parameters of the run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import serversim, verify
from .betadyn import factor_census, richness_evidence
from .contraction import build_map, detect_cycle, from_intercepts, map_to_json
from .errors import ConstructionViolation, PrecisionExhausted, Undecidable
from .exactnum import (
    DigitStream,
    decimal_string,
    digits_of_rational,
    format_rational,
    parse_number,
    rational_stream,
    to_json,
)
from .quasipart import analyze

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def parse_map_spec(text: str):
    """``beta=2,sign=+,bp=0:1/2:1,alpha=1:2`` (or ``a=p/q:...`` for raw intercepts)."""
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"bad map field {part!r}; expected key=value")
        k, v = part.split("=", 1)
        fields[k.strip()] = v.strip()
    try:
        beta = int(fields["beta"])
        sign = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}[fields.get("sign", "+")]
        bps = [parse_number(x) for x in fields["bp"].split(":")]
    except KeyError as exc:
        raise UsageError(f"map spec needs beta, sign and bp: {text!r}") from exc
    if "alpha" in fields:
        return build_map(beta, sign, bps, [int(a) for a in fields["alpha"].split(":")])
    if "a" in fields:
        return from_intercepts(beta, sign, bps, [Fraction(a) for a in fields["a"].split(":")])
    raise UsageError("map spec needs alpha=... or a=...")


def _triple(text, parse=parse_number):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 3:
        raise UsageError(f"expected three comma-separated values, got {text!r}")
    return [parse(p) for p in parts]


def _rational(text):
    x = parse_number(text)
    if isinstance(x, DigitStream):
        raise UsageError(f"{text!r} must be rational")
    return x


def _server_params(args):
    """(DTriple, breakpoints or None, params dict) from --d or --x."""
    if bool(args.d) == bool(args.x):
        raise UsageError("give exactly one of --d and --x")
    if args.d:
        d = serversim.DTriple.exact(*_triple(args.d, _rational))
        return d, serversim.breakpoints_from_d(d), {"d": [format_rational(v) for v in d.values]}
    xs = _triple(args.x)
    d = serversim.d_from_x(*xs, precision=args.precision)
    params = {"x": [to_json(x) for x in xs], "precision": args.precision}
    return d, xs, params


def _decimal(x, digits):
    """Streams are truncated; rationals are rounded to ``digits`` places."""
    if isinstance(x, DigitStream):
        return decimal_string(x, digits)
    n = round(Fraction(x) * 10 ** digits)
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(report, args):
    text = json.dumps(report, indent=2)
    if getattr(args, "report", None):
        write_atomic(args.report, text + "\n")
    else:
        print(text)


def cmd_attractor(args):
    seeds = [_rational(s) for s in args.seeds.split(",")]
    report = {"command": "attractor", "seeds": [format_rational(s) for s in seeds]}
    if args.map:
        if args.d or args.x:
            raise UsageError("give either --map or one of --d/--x")
        f = parse_map_spec(args.map)
        report["map"] = map_to_json(f)
        server = False
    else:
        d, xs, params = _server_params(args)
        report.update(params)
        f = build_map(2, -1, (0, *xs, 1), (1, 2, 1, 2))
        server = True
    code = EXIT_OK
    cycles, per_seed = [], []
    for s in seeds:
        res = detect_cycle(f, s, args.max_steps)
        entry = {"seed": format_rational(s), **res.to_json()}
        if res.found:
            if res.cycle not in cycles:
                cycles.append(res.cycle)
            if server:
                entry["states"] = [[format_rational(v) for v in serversim.phi(c).v] for c in res.cycle if c < 1]
        else:
            code = EXIT_INCONCLUSIVE
        per_seed.append(entry)
    report["per_seed"] = per_seed
    points = sorted({c for cyc in cycles for c in cyc})
    report["attractor_estimate"] = [format_rational(c) for c in points]
    if server:
        report["attractor_states"] = [
            [format_rational(v) for v in serversim.phi(c).v] for c in points if c < 1
        ]
    verdict = "finite" if code == EXIT_OK else "inconclusive"
    if f.exact:
        qp = analyze(f, args.depth)
        report["quasipartition_verdict"] = qp.verdict
        if qp.verdict == "failed":
            verdict, code = "failed", EXIT_FAIL
        elif qp.verdict == "inconclusive" and code == EXIT_OK:
            verdict, code = "inconclusive", EXIT_INCONCLUSIVE
    report["verdict"] = verdict
    _emit(report, args)
    return code


def cmd_quasipartition(args):
    f = parse_map_spec(args.map)
    try:
        rep = analyze(f, args.depth)
    except ConstructionViolation as exc:
        _emit({"command": "quasipartition", "map": map_to_json(f), "verdict": "failed", "error": str(exc)}, args)
        return EXIT_FAIL
    report = {"command": "quasipartition", "depth": args.depth, **rep.to_json()}
    _emit(report, args)
    return {"finite": EXIT_OK, "inconclusive": EXIT_INCONCLUSIVE}.get(rep.verdict, EXIT_FAIL)


def _cycle_estimate(states, tol, max_period=12):
    """Shortest p such that every available lag-p pair among the last p states is within tol."""
    for p in range(1, max_period + 1):
        pairs = [(states[-1 - j], states[-1 - j - p]) for j in range(p) if j + p < len(states)]
        if pairs and all(a.distance(b) < tol for a, b in pairs):
            return states[-p:]
    return None


def cmd_simulate(args):
    d, _, params = _server_params(args)
    v0 = serversim.SimplexState(*_triple(args.v0, _rational))
    served = args.served
    if not v0.on_boundary and served is None:
        raise UsageError("interior initial state needs --served")
    traj = serversim.trajectory(v0, d, args.events, args.samples, served=served, tie=args.tie)
    rows = traj.samples()
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "v1", "v2", "v3", "served_tank"])
        for t, a, b, c, s in rows:
            w.writerow([_decimal(t, args.digits), *(_decimal(v, args.digits) for v in (a, b, c)), s])
        write_atomic(args.out, buf.getvalue())
    states = ([v0] if v0.on_boundary else []) + traj.poincare_states
    tol = Fraction(1, 10 ** 9)
    cyc = _cycle_estimate(states, tol)
    report = {
        "command": "simulate",
        **params,
        "v0": [format_rational(v) for v in v0.v],
        "events": args.events,
        "samples_per_segment": args.samples,
        "tie": args.tie,
        "rows": len(rows),
        "csv": args.out,
        "final_states": [[_decimal(v, 12) for v in s.v] for s in states[-4:]],
        "converged": cyc is not None,
        "cycle_estimate": None if cyc is None else [[_decimal(v, 12) for v in s.v] for s in cyc],
    }
    _emit(report, args)
    return EXIT_OK


def cmd_richness(args):
    x = parse_number(args.number)
    if isinstance(x, DigitStream):
        stream = x
    else:
        if args.base is None:
            raise UsageError("rational numbers need --base")
        stream = rational_stream(x, args.base)
    if args.prefix < args.k:
        raise UsageError(f"prefix {args.prefix} shorter than k={args.k}")
    census = factor_census(stream.prefix(args.prefix), args.k, stream.base)
    report = {
        "command": "richness",
        "number": to_json(x),
        "base": stream.base,
        "prefix_length": args.prefix,
        "census": census.to_json(),
        "evidence": richness_evidence(stream, args.k, args.prefix),
    }
    if not isinstance(x, DigitStream):
        pre, per = digits_of_rational(x, stream.base)
        report["expansion"] = {"preperiod": pre, "period": per}
    _emit(report, args)
    return EXIT_OK


def cmd_verify(args):
    results = verify.run(args.suite, args.seed)
    for r in results:
        print(r.summary(), file=sys.stderr)
    report = {"command": "verify", "suite": args.suite, "seed": args.seed,
              "results": [r.to_json() for r in results],
              "passed": all(r.passed for r in results)}
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="pwaffine", description="Exact dynamics of piecewise affine contractions.")
    p.add_argument("--config", help="JSON file of option defaults (keys are option names)")
    sub = p.add_subparsers(dest="command", required=True)

    def server_opts(sp):
        sp.add_argument("--d", help="d1,d2,d3 (rational)")
        sp.add_argument("--x", help="x1,x2,x3 (rational or champernowne(b)±p/q, c for champernowne(4))")
        sp.add_argument("--precision", type=int, default=serversim.DEFAULT_PRECISION,
                        help="decimal digits for d's derived from streams (env PWAFFINE_PRECISION)")

    sp = sub.add_parser("attractor", help="cycles reached from seeds and a merged attractor estimate")
    sp.add_argument("--map", help="map spec, e.g. beta=2,sign=+,bp=0:1/2:1,alpha=1:2")
    server_opts(sp)
    sp.add_argument("--seeds", default="0", help="comma-separated rational seeds in [0,1)")
    sp.add_argument("--max-steps", type=int, default=10_000)
    sp.add_argument("--depth", type=int, default=10_000, help="backward-closure depth for rational maps")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_attractor)

    sp = sub.add_parser("quasipartition", help="invariant quasi-partition and attractor superset")
    sp.add_argument("--map", required=True)
    sp.add_argument("--depth", type=int, default=10_000)
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_quasipartition)

    sp = sub.add_parser("simulate", help="switched-server trajectory to CSV")
    server_opts(sp)
    sp.add_argument("--v0", required=True, help="v1,v2,v3 summing to 1")
    sp.add_argument("--served", type=int, choices=(1, 2, 3), help="initially served tank (interior starts)")
    sp.add_argument("--events", type=int, default=60)
    sp.add_argument("--samples", type=int, default=10, help="samples per segment")
    sp.add_argument("--tie", choices=serversim.TIE_RULES, default="lower")
    sp.add_argument("--digits", type=int, default=15, help="decimal digits in the CSV")
    sp.add_argument("--out", help="CSV path")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("richness", help="factor census of a digit expansion")
    sp.add_argument("--number", required=True)
    sp.add_argument("--base", type=int)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--prefix", type=int, default=10_000)
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_richness)

    sp = sub.add_parser("verify", help="seeded property suites")
    sp.add_argument("suite", choices=[*verify.SUITES, "all"])
    sp.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_verify)
    return p


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        cfg = json.load(fh)
    cmd = next((a for a in argv if a in parser._subparsers._group_actions[0].choices), None)
    if cmd is None:
        return
    sp = parser._subparsers._group_actions[0].choices[cmd]
    sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    # options given in the config no longer need to be on the command line
    for action in sp._actions:
        if action.dest in {k.replace("-", "_") for k in cfg}:
            action.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (PrecisionExhausted, Undecidable) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ConstructionViolation as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
