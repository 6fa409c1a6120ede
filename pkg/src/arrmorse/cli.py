"""Command line interface: arrmorse <command> <file.json> [options]."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .arrangement import parse_arrangement, parse_point
from .errors import ArrangementError, BudgetExhausted, NonCentral, NonPositiveWeights, NotRankOne, StepUnderflow
from .flows import Guards, default_epsilon, fibration_return_map, integrate, level_set_points
from .lattice import (arrangement_rank, build_lattice, essentialize, euler_characteristic, is_central,
                      is_essential, poincare_coefficients)
from .master import SolverConfig, find_critical_points
from .os_aomoto import aomoto_cohomology, build_os_algebra, check_nonresonance
from .report import full_report


def _load(path: str):
    return parse_arrangement(Path(path).read_bytes())


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cplx(z) -> list:
    return [[float(x.real), float(x.imag)] for x in np.atleast_1d(z)]


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def cmd_analyze(args) -> int:
    arr, _ = _load(args.file)
    lat = build_lattice(arr)
    _emit({
        "ambient_dim": arr.ambient_dim,
        "hyperplanes": arr.m,
        "exact": lat.exact,
        "rank": arrangement_rank(lat),
        "essential": is_essential(lat),
        "central": is_central(lat),
        "chi": euler_characteristic(lat),
        "poincare": poincare_coefficients(lat),
        "flats": [
            {"generators": [g + 1 for g in sorted(f.generators)], "codim": f.codim,
             "moebius": f.moebius, "point": _cplx(f.point)}
            for f in lat.flats
        ],
    })
    return 0


def _critical(args, arr, w):
    lat = build_lattice(arr)
    red = essentialize(arr, arrangement_rank(lat))
    core_lat = lat if red.identity else build_lattice(red.arrangement)
    config = SolverConfig(seed=args.seed)
    if args.budget is not None:
        config.rounds = args.budget
    target = abs(euler_characteristic(core_lat))
    try:
        pts, note = find_critical_points(red.arrangement, w, config, core_lat), None
    except BudgetExhausted as exc:
        pts, note = exc.found, str(exc)
    return red, pts, target, note


def cmd_crit(args) -> int:
    arr, w = _load(args.file)
    red, pts, target, note = _critical(args, arr, w)
    out = []
    for p in pts:
        d = p.to_dict()
        if not red.identity:
            d["lifted_location"] = _cplx(red.lift(p.location))
        out.append(d)
    _emit(out)
    if note:
        print(note, file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    arr, w = _load(args.file)
    red, pts, target, note = _critical(args, arr, w)
    ok = len(pts) == target
    _emit({"found": len(pts), "abs_chi": target, "agrees": ok,
           "verdict": "count matches |chi|" if ok else note or "count differs from |chi|"})
    return 0 if ok else 1


def cmd_flow(args) -> int:
    arr, w = _load(args.file)
    z0 = parse_point(args.start, arr.ambient_dim)
    guards = Guards(level=None if args.epsilon is None else math.log(args.epsilon))
    try:
        traj = integrate(arr, w, args.field, z0, args.tmax, guards)
    except StepUnderflow as exc:
        _emit({"error": str(exc), "t": exc.t, "last_point": _cplx(exc.z)})
        return 1
    _emit(traj.to_dict())
    return 0


def cmd_fibration(args) -> int:
    arr, w = _load(args.file)
    lat = build_lattice(arr)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(arr, w, lat)
    pts = level_set_points(arr, w, eps, args.samples, seed=args.seed, lat=lat)
    rep = fibration_return_map(arr, w, eps, pts)
    out = rep.to_dict()
    out["passes"] = rep.passes()
    _emit(out)
    return 0


def cmd_bounds(args) -> int:
    arr, w = _load(args.file)
    lat = build_lattice(arr)
    samples = bnd.sample_near_arrangement(arr, args.shells, args.per_shell, args.seed, lat, relative=True)
    certs = []
    a_cert, b_cert = bnd.certify_neighborhood_bounds(arr, w, bnd.beta_box(w, 4, args.seed), samples, lat)
    certs += [a_cert.to_dict(), b_cert.to_dict()]
    beta = bnd.beta_box(w, 1, args.seed + 1)[0]
    certs.append(bnd.certify_pairing_bound(arr, w, beta, samples, lat).to_dict())
    for flat, sub in bnd.localizations(lat):
        sub_lat = build_lattice(sub)
        sub_w = type(w)([w.values[i] for i in sorted(flat.generators)])
        sub_samples = bnd.sample_near_arrangement(sub, args.shells, max(args.per_shell // 4, 1),
                                                  args.seed, sub_lat, relative=True)
        cert = bnd.certify_grad_lower_bound(sub, sub_w, sub_samples, sub_lat).to_dict()
        cert["localized_at"] = [g + 1 for g in sorted(flat.generators)]
        certs.append(cert)
    _emit(certs)
    return 0 if all(c["passed"] for c in certs) else 1


def cmd_resonance(args) -> int:
    arr, w = _load(args.file)
    lat = build_lattice(arr)
    os_alg = build_os_algebra(arr, lat)
    cx = aomoto_cohomology(os_alg, w)
    verdict = check_nonresonance(arr, lat, w)
    out = verdict.to_dict()
    out["dims"] = os_alg.dims
    out["exact"] = cx.exact
    _emit(out)
    return 0


def _pretty(rep) -> str:
    lines = [
        f"rank l            {rep.rank_l}",
        f"chi(M)            {rep.chi}",
        f"Novikov ranks     {list(rep.novikov_ranks)}",
        f"critical points   {rep.critical_count}",
        f"all index l       {rep.morse_all_index_n}",
        f"Aomoto agrees     {rep.aomoto_agrees}  {list(rep.aomoto_ranks or [])}",
        f"consistent        {rep.consistent}",
    ]
    lines += [f"note: {d}" for d in rep.diagnostics]
    return "\n".join(lines)


def cmd_report(args) -> int:
    arr, w = _load(args.file)
    rep = full_report(arr, w, SolverConfig(seed=args.seed))
    if args.pretty:
        print(_pretty(rep))
    else:
        _emit(rep.to_dict())
    if args.svg:
        from .svg import render_svg

        red = essentialize(arr)
        pts = [red.lift(p.location) for p in rep.critical_points]
        Path(args.svg).write_text(render_svg(arr, pts, title=Path(args.file).name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrmorse", description="Hyperplane arrangements and master functions.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", help="arrangement JSON file")
        sp.set_defaults(func=func)
        return sp

    add("analyze", cmd_analyze, "intersection lattice, Moebius values and chi(M)")
    for name, func, text in (("crit", cmd_crit, "certified critical points"),
                             ("verify", cmd_verify, "critical count against |chi|")):
        sp = add(name, func, text)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=None, help="multistart rounds")
    sp = add("flow", cmd_flow, "integrate one of the flow fields")
    sp.add_argument("--field", choices=["w", "-w", "iota", "y"], default="w")
    sp.add_argument("--start", required=True, help='start point "re,im;re,im;..."')
    sp.add_argument("--tmax", type=float, default=1.0)
    sp.add_argument("--epsilon", type=float, default=None, help="stop the w flow on f = epsilon")
    sp = add("fibration", cmd_fibration, "return map of the circle-valued flow")
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("bounds", cmd_bounds, "sampled gradient-bound certificates")
    sp.add_argument("--shells", type=_floats, default=bnd.DEFAULT_SHELLS,
                    help="shell distances relative to the geometry scale, e.g. 0.1,0.01,0.001")
    sp.add_argument("--per-shell", type=int, default=bnd.DEFAULT_PER_SHELL)
    sp.add_argument("--seed", type=int, default=0)
    add("resonance", cmd_resonance, "Aomoto cohomology and non-resonance")
    sp = add("report", cmd_report, "full rank report")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--pretty", action="store_true", help="human-readable output")
    sp.add_argument("--svg", default=None, help="write a picture (real arrangements in the plane)")
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ArrangementError, NotRankOne, NonCentral, NonPositiveWeights, ValueError, OSError) as exc:
        print(f"arrmorse: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
