"""Command-line front end: ``delayadm <subcommand> ...``.

Exit codes: 0 success, 1 a verification ran but failed, 2 usage or
validation error, 3 hypothesis failure (e.g. NotInRegion), 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import admissibility, charfun, costint, ddesim, region
from .errors import DelayAdmError, InvalidArgument, ParseError
from .model import DEFAULT_TOL, ComponentParams, parse_complex, parse_system_spec, reduce_params


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except DelayAdmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _params(args) -> ComponentParams:
    return ComponentParams(args.lam, args.gamma, args.b, args.tau)


# ---------------------------------------------------------------------------
# subcommands


def cmd_region(args) -> int:
    rp = region.RegionParams(args.tau, args.a)
    bd = region.boundary(rp, args.n)
    pts = bd.points
    _emit(_csv_text(["u", "v"], zip(pts.real, pts.imag)), args.out)
    return 0


def cmd_stability(args) -> int:
    p = _params(args)
    a, g = reduce_params(p.lam, p.gamma, p.tau)
    member = region.contains(region.RegionParams(p.tau, a), g).member
    count = charfun.count_unstable_roots(charfun.CharacteristicFn(p)).count
    tag = "member" if member else "non-member"
    if member != (count == 0):
        print(f"DISAGREE region={tag} roots_in_C+={count}")
        return 4
    print(f"{'STABLE' if member else 'UNSTABLE'} region={tag} roots_in_C+={count}")
    return 0


def cmd_cost(args) -> int:
    p = _params(args)
    routes = {
        "closed": lambda: costint.j_closed(p),
        "residue": lambda: costint.j_residue(p),
        "quadrature": lambda: costint.j_quadrature(p, args.quad_tol),
    }
    names = list(routes) if args.method == "all" else [args.method]
    results = {name: routes[name]() for name in names}
    doc = {"tau": p.tau, "lambda": [p.lam.real, p.lam.imag], "gamma": [p.gamma.real, p.gamma.imag]}
    doc["results"] = {name: r.to_dict() for name, r in results.items()}
    if len(names) > 1:
        doc["deltas"] = {
            f"{x}-{y}": abs(results[x].value - results[y].value)
            for i, x in enumerate(names) for y in names[i + 1:]
        }
    _emit(_json_text(doc), args.out)
    return 0


def _load_system(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_system_spec(text)


def cmd_admissible(args) -> int:
    system = _load_system(args.spec)
    report = admissibility.system_check(
        system, args.N, args.K, args.q_cap, paranoid=args.paranoid, seed=args.seed
    )
    _emit(_json_text(report.to_dict(with_components=not args.summary)), args.out)
    return 3 if report.verdict is admissibility.Verdict.VIOLATED else 0


def cmd_simulate(args) -> int:
    u = ddesim.parse_input(args.input)
    if args.spec:
        system = _load_system(args.spec)
        st = ddesim.simulate_system(system, u, args.N, args.t_end, args.m)
        header = ["t", "aggregate_norm", "input_sq_norm"]
        rows = zip(st.t, st.aggregate, st.input_sq_norm)
    else:
        tr = ddesim.simulate_component(_params(args), u, None, args.t_end, args.m)
        header = ["t", "re_z", "im_z", "extended_norm"]
        rows = ddesim.trajectory_csv_rows(tr)
    _emit(_csv_text(header, rows), args.out)
    return 0


def cmd_verify(args) -> int:
    p = _params(args)
    if args.random_inputs:
        rng = np.random.default_rng(args.seed)
        inputs = [ddesim.random_damped_input(rng) for _ in range(args.random_inputs)]
        reports = ddesim.verify_bound_batch([p] * len(inputs), inputs, args.t_end, args.m, args.tolerance)
        worst = max(reports, key=lambda r: r.sup_ratio)
        doc = worst.to_dict()
        doc.update(n_inputs=len(reports), seed=args.seed, passed=all(r.passed for r in reports))
    else:
        if args.input is None:
            raise InvalidArgument("verify needs --input or --random-inputs")
        doc = ddesim.verify_bound(p, ddesim.parse_input(args.input), args.t_end, args.m, args.tolerance).to_dict()
    _emit(_json_text(doc), args.out)
    return 0 if doc["passed"] else 1


# ---------------------------------------------------------------------------
# parser


def _component_flags(sp, need_b=False):
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=_complex_arg, required=True)
    sp.add_argument("--gamma", type=_complex_arg, required=True)
    sp.add_argument("--b", type=_complex_arg, default=1.0 if not need_b else None, required=need_b)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delayadm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("region", help="boundary polyline of the stability region (CSV)")
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("stability", help="region membership and right-half-plane root count")
    _component_flags(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("cost", help="cost integral J (JSON)")
    _component_flags(sp)
    sp.add_argument("--method", choices=["closed", "residue", "quadrature", "all"], default="closed")
    sp.add_argument("--quad-tol", type=float, default=DEFAULT_TOL.quad_tol)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cost)

    sp = sub.add_parser("admissible", help="certify a diagonal system from a JSON spec file")
    sp.add_argument("spec")
    sp.add_argument("--N", type=int)
    sp.add_argument("--K", type=int, default=10)
    sp.add_argument("--q-cap", type=float, default=0.95)
    sp.add_argument("--paranoid", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--summary", action="store_true", help="omit per-component certificates")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_admissible)

    for name, func, help_ in (
        ("simulate", cmd_simulate, "zero-start trajectory (CSV)"),
        ("verify", cmd_verify, "check the finite-time admissibility bound (JSON)"),
    ):
        sp = sub.add_parser(name, help=help_)
        if name == "simulate":
            sp.add_argument("--spec", help="system spec file; simulates its first N components")
            sp.add_argument("--N", type=int)
            sp.add_argument("--tau", type=float)
            sp.add_argument("--lambda", dest="lam", type=_complex_arg)
            sp.add_argument("--gamma", type=_complex_arg)
            sp.add_argument("--b", type=_complex_arg, default=1.0)
            sp.add_argument("--input", required=True)
        else:
            _component_flags(sp)
            sp.add_argument("--input")
            sp.add_argument("--random-inputs", type=int, default=0)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--tolerance", type=float, default=1e-3)
        sp.add_argument("--t-end", type=float, default=10.0)
        sp.add_argument("--m", type=int, default=64)
        sp.add_argument("--out")
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not args.spec and None in (args.tau, args.lam, args.gamma):
        parser.error("simulate needs --spec or all of --tau, --lambda, --gamma")
    try:
        return args.func(args)
    except DelayAdmError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
