"""Batch front door: verification suites, cohomology and character runs.

Exit codes: 0 success, 1 verification failure, 2 parse/input error,
3 internal invariant breach.  All randomness flows from --seed; reports
embed the seed, cutoff and window so identical configurations produce
byte-identical output.
"""

import argparse
import sys

from ._rationals import Q
from . import fock, ope, superconf, toric, lattice, brst


class _Failure(Exception):
    pass


def _build_system(name, dim):
    if name == "boson":
        return fock.boson_system(dim)
    if name == "fermion":
        return fock.fermion_system(dim)
    if name == "bcbg":
        return fock.bcbg_system(dim)
    if name == "msv":
        return fock.msv_system(dim)
    raise _Failure(f"unknown system {name!r}")


def _load_data(path):
    try:
        pair, fan1 = toric.load_polytope_file(path)
    except (OSError, ValueError, KeyError) as exc:
        raise SystemExit(_fail(f"cannot load polytope file {path}: {exc}", 2))
    # a self-swapped fan is only valid when the pair is self-dual
    swap = fan1 if sorted(pair.delta1) == sorted(pair.delta1_star) else None
    return brst.ReflexiveData(pair, fan1, swap_fan1=swap, name=path)


def _fail(message, code):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_verify_voa(args):
    system = _build_system(args.system, args.dim)
    kind = "boson" if args.system == "boson" else args.system
    L = superconf.build_virasoro(system, kind)
    if args.inject_sign_error:
        # negative-control hook: a deliberately wrong Virasoro state
        L = L + fock.single(system, system.generators[0].name)
    cutoff = Q(args.cutoff)
    bracket_cutoff = min(cutoff, 2 if len(system.generators) > 2 else cutoff)
    try:
        c = superconf.verify_virasoro(system, L, bracket_cutoff,
                                      index_bound=args.index_bound)
    except superconf.VerificationError as exc:
        print(f"verify-voa {args.system} dim={args.dim}: FAILED ({exc})")
        return 1
    d = fock.single(system, system.generators[0].name)
    ok_loc = ope.check_locality(system, d, d, min(cutoff, 2))
    ok_tr = ope.check_translation(system, d, min(cutoff, 2), conformal=L)
    print(f"verify-voa {args.system} dim={args.dim}: c = {c} "
          f"locality={'ok' if ok_loc else 'FAIL'} "
          f"translation={'ok' if ok_tr else 'FAIL'}")
    return 0 if (ok_loc and ok_tr) else 1


def cmd_verify_n2(args):
    if args.system == "cy":
        if not args.polytope:
            return _fail("--polytope required for the cy system", 2)
        data = _load_data(args.polytope)
        system = data.system
        fields = lattice.build_cy_n2(system)
    else:
        system = _build_system(args.system, args.dim)
        fields = superconf.build_n2(system, args.system)
    try:
        c_hat = superconf.verify_n2(system, fields, Q(args.cutoff))
    except superconf.VerificationError as exc:
        print(f"verify-n2 {args.system}: FAILED ({exc})")
        return 1
    print(f"verify-n2 {args.system}: c_hat = {c_hat}")
    return 0


def cmd_toric_check(args):
    pair, fan1 = toric.load_polytope_file(args.polytope)
    dual = toric.dual_polytope(pair.delta1)
    ok_pair = sorted(map(tuple, pair.delta1_star)) == dual
    smooth = toric.is_smooth_fan(fan1)
    np_, nd = len(pair.delta_points()), len(pair.delta_star_points())
    ext = toric.extend_fan(fan1)
    print(f"toric-check {args.polytope}:")
    print(f"  reflexive pair: {'ok' if ok_pair else 'FAIL'}")
    print(f"  fan smooth: {smooth}")
    print(f"  |Delta points| = {np_}  |Delta* points| = {nd}")
    print(f"  extended fan: {len(ext.rays)} rays, "
          f"{sum(1 for c in ext.cones if c)} cones")
    return 0 if ok_pair else 1


def _window(args, data):
    if args.radius is None:
        return brst.default_window(data, Q(args.cutoff))
    floor = Q(args.weight_floor) if args.weight_floor is not None else \
        brst.default_window(data, Q(args.cutoff)).weight_floor
    return brst.Window(args.radius, floor)


def cmd_cohomology(args):
    data = _load_data(args.polytope)
    coeffs = data.coefficients(args.seed)
    window = _window(args, data)
    try:
        report = brst.cohomology(data, coeffs, Q(args.cutoff), window=window,
                                 second_seed=args.second_seed)
    except brst.BRSTError as exc:
        return _fail(str(exc), 1)
    text = brst.render_report(report, fmt=args.format)
    print(text)
    ok = report.flags.get("nonnegative_weights", False) and \
        report.flags.get("square_zero_verified", False) and \
        report.flags.get("seeds_agree", True) and \
        report.flags.get("n2_commutation_verified", True)
    return 0 if ok else 1


def cmd_character(args):
    if args.polytope:
        data = _load_data(args.polytope)
        coeffs = data.coefficients(args.seed)
        window = _window(args, data)
        report = brst.cohomology(data, coeffs, Q(args.cutoff), window=window)
        rows = report.character_rows()
    else:
        system = _build_system(args.system, args.dim)
        jstate = None
        if args.system in ("bcbg", "msv"):
            jstate = superconf.build_n2(system, args.system).j
        zero_cap = 2 * int(Q(args.cutoff)) + 2 if args.system == "msv" else None
        rows = superconf.character(system, Q(args.cutoff), jstate=jstate,
                                   max_zero_weight=zero_cap)
    print(superconf.character_tsv(rows))
    return 0


def cmd_mirror_compare(args):
    data = _load_data(args.polytope)
    coeffs = data.coefficients(args.seed)
    window = _window(args, data)
    try:
        rep, srep = brst.mirror_swap_run(data, coeffs, Q(args.cutoff),
                                         window=window)
    except brst.BRSTError as exc:
        return _fail(str(exc), 2)
    ok_dims = brst.tables_mirror_match(rep.block_table(), srep.block_table())
    chars = rep.character_rows()
    flipped = sorted((-a, w, c) for a, w, c in srep.character_rows())
    ok_char = chars == flipped
    print(f"mirror-compare {args.polytope}: dims {'match' if ok_dims else 'MISMATCH'} "
          f"under j -> -j; characters {'match' if ok_char else 'MISMATCH'} "
          f"under y -> 1/y")
    if args.format in ("text", "tsv"):
        print("# direct run:")
        print(brst.render_report(rep, fmt="tsv"))
        print("# swapped run:")
        print(brst.render_report(srep, fmt="tsv"))
    return 0 if (ok_dims and ok_char) else 1


def make_parser():
    parser = argparse.ArgumentParser(
        prog="vertexfock",
        description="exact vertex-algebra verification and cohomology runs")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cutoff", default="1")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--format", choices=("text", "tsv", "structured"),
                       default="text")

    p = sub.add_parser("verify-voa", help="Virasoro structure verification")
    p.add_argument("--system", required=True,
                   choices=("boson", "fermion", "bcbg", "msv"))
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--index-bound", type=int, default=3)
    p.add_argument("--inject-sign-error", action="store_true",
                   help=argparse.SUPPRESS)  # negative-control testing hook
    common(p)
    p.set_defaults(fn=cmd_verify_voa)

    p = sub.add_parser("verify-n2", help="N=2 multiplet verification")
    p.add_argument("--system", required=True, choices=("bcbg", "msv", "cy"))
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--polytope")
    common(p)
    p.set_defaults(fn=cmd_verify_n2)

    p = sub.add_parser("toric-check", help="reflexive pair and fan checks")
    p.add_argument("--polytope", required=True)
    common(p)
    p.set_defaults(fn=cmd_toric_check)

    p = sub.add_parser("cohomology", help="graded BRST cohomology report")
    p.add_argument("--polytope", required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--weight-floor")
    p.add_argument("--second-seed", type=int)
    common(p)
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("character", help="(y,q) supertrace table")
    p.add_argument("--system", choices=("boson", "fermion", "bcbg", "msv"))
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--polytope")
    p.add_argument("--radius", type=int)
    p.add_argument("--weight-floor")
    common(p)
    p.set_defaults(fn=cmd_character)

    p = sub.add_parser("mirror-compare", help="run both mirror orientations")
    p.add_argument("--polytope", required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--weight-floor")
    common(p)
    p.set_defaults(fn=cmd_mirror_compare)
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _Failure as exc:
        return _fail(str(exc), 2)
    except (toric.ToricError, fock.FockError, ope.OPEError, ValueError) as exc:
        return _fail(str(exc), 2)
    except AssertionError as exc:  # internal invariant breach
        return _fail(f"internal invariant breach: {exc}", 3)


if __name__ == "__main__":
    sys.exit(main())
