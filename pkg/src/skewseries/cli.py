"""Command line interface.

Subcommands: ring, series, ore, norm, iwasawa, verify.  Reports are
line-oriented key=value records; --report tees them into a file and
--figures renders the companion PNG figures into a directory.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import norms, ore, verify
from .iwasawa import alternate_generator_demo, powerful_checks
from .report import ReportWriter, render_norm_profile, render_suite_figure
from .series import convert_form, mul, order_leading
from .specfile import load_context, load_group_datum


def _add_ring_arg(p):
    p.add_argument("--ring", required=True, help="ring specification file")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="skewseries",
        description="exact arithmetic in skew power/Laurent series rings")
    sub = ap.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="build and validate a coefficient ring")
    ring_sub = ring.add_subparsers(dest="action", required=True)
    rc = ring_sub.add_parser("check")
    _add_ring_arg(rc)
    rc.add_argument("--report")

    ser = sub.add_parser("series", help="series arithmetic")
    ser_sub = ser.add_subparsers(dest="action", required=True)
    sm = ser_sub.add_parser("mul")
    _add_ring_arg(sm)
    sm.add_argument("--a", required=True)
    sm.add_argument("--b", required=True)
    sc = ser_sub.add_parser("convert")
    _add_ring_arg(sc)
    sc.add_argument("--elem", required=True)
    sc.add_argument("--form", default="left", choices=("left", "right"))
    so = ser_sub.add_parser("order")
    _add_ring_arg(so)
    so.add_argument("--elem", required=True)
    scm = ser_sub.add_parser("commute")
    _add_ring_arg(scm)
    scm.add_argument("--j", type=int, required=True)
    scm.add_argument("--coeff", required=True,
                     help="plain coefficient in the element grammar")
    scm.add_argument("--side", default="left", choices=("left", "right"))

    orp = sub.add_parser("ore", help="Ore set membership and localisation")
    ore_sub = orp.add_subparsers(dest="action", required=True)
    ot = ore_sub.add_parser("test")
    _add_ring_arg(ot)
    ot.add_argument("--elem", required=True)
    ot.add_argument("--tbound", type=int, default=8)
    ot.add_argument("--cap", type=int, default=ore.DEFAULT_PRECISION_CAP)
    ot.add_argument("--report")
    oi = ore_sub.add_parser("invert")
    _add_ring_arg(oi)
    oi.add_argument("--elem", required=True)
    oi.add_argument("--tbound", type=int, default=8)
    oi.add_argument("--level", type=int)
    oe = ore_sub.add_parser("expand")
    _add_ring_arg(oe)
    oe.add_argument("--num", required=True)
    oe.add_argument("--den", required=True)
    oe.add_argument("--tbound", type=int, default=8)
    oe.add_argument("--level", type=int)

    nrm = sub.add_parser("norm", help="ring norms and Laurent norms")
    nrm_sub = nrm.add_subparsers(dest="action", required=True)
    nc = nrm_sub.add_parser("check")
    _add_ring_arg(nc)
    nc.add_argument("--rho", default="1/2")
    nc.add_argument("--report")
    ne = nrm_sub.add_parser("eval")
    _add_ring_arg(ne)
    ne.add_argument("--elem", required=True)
    ne.add_argument("--u", required=True)
    ne.add_argument("--rho", default="1/2")
    ncmp = nrm_sub.add_parser("compare")
    _add_ring_arg(ncmp)
    ncmp.add_argument("--power2", type=int, default=2,
                      help="second norm uses Jac^power2")
    ncmp.add_argument("--rho", default="1/2")
    npr = nrm_sub.add_parser("profile")
    _add_ring_arg(npr)
    npr.add_argument("--elem", required=True)
    npr.add_argument("--u", required=True)
    npr.add_argument("--rho", default="1/2")
    npr.add_argument("--figures")
    npr.add_argument("--report")

    iw = sub.add_parser("iwasawa", help="twisted group algebra checks")
    iw_sub = iw.add_subparsers(dest="action", required=True)
    ic = iw_sub.add_parser("check")
    _add_ring_arg(ic)
    ic.add_argument("--report")
    ia = iw_sub.add_parser("altgen")
    _add_ring_arg(ia)
    ia.add_argument("--h", default=None, help="group element (cycle notation)")
    ia.add_argument("--s", type=int, default=1, help="power-of-p exponent")

    vf = sub.add_parser("verify", help="run a named property suite")
    vf.add_argument("suite", help="suite name or 'all'")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--figures")
    vf.add_argument("--report")
    return ap


def cmd_ring(args):
    ctx = load_context(args.ring)
    ring = ctx.ring
    with ReportWriter(args.report) as w:
        w.emit(op="ring.check", name=ring.name, family=ring.family_tag,
               basis_size=ring.basis_size, modulus=ring.q,
               jac_nilpotency=ring.jac_nilpotency,
               elements=ring.num_elements)
        w.emit(op="ring.twist", M=ctx.twist.nilpotency_degree_M,
               mixed=ctx.twist.mixed_nilpotency_degree,
               s=ctx.twist.continuity_exponent_s)
        w.emit(op="ring.filtration", depth=ctx.filt.depth(),
               stabilised=ctx.filt.stabilised,
               **{k: v for k, v in ctx.filt.flags.items()})
    return 0


def cmd_series(args):
    ctx = load_context(args.ring)
    if args.action == "mul":
        a = ctx.from_string(args.a)
        b = ctx.from_string(args.b)
        print(mul(a, b))
    elif args.action == "convert":
        a = ctx.from_string(args.elem, form=args.form)
        out = convert_form(a)
        print(out)
    elif args.action == "order":
        a = ctx.from_string(args.elem)
        o, lead = order_leading(a)
        print(f"order={o} leading={ctx.ring.show(lead)}")
    elif args.action == "commute":
        from .grammar import parse_element
        table = parse_element(ctx.ring, args.coeff)
        if set(table) - {0}:
            print("error: --coeff must be a plain coefficient", file=sys.stderr)
            return 2
        r = table.get(0, ctx.ring.zero())
        print(ctx.commute(args.j, r, side=args.side))
    return 0


def cmd_ore(args):
    ctx = load_context(args.ring)
    if args.action == "test":
        f = ctx.from_string(args.elem)
        res = ore.regularity_test(f, t_bound=args.tbound, cap=args.cap)
        with ReportWriter(args.report) as w:
            if res:
                w.emit(op="ore.test", elem=args.elem, member=True, n=res.n,
                       witness=str(res.g), bound=res.search_bound)
            else:
                w.emit(op="ore.test", elem=args.elem, member=False,
                       absolute=res.absolute, reason=res.reason,
                       bound=res.tested_bound)
        return 0 if res else 1
    if args.action == "invert":
        f = ctx.from_string(args.elem)
        inv = ore.invert_in_Bk(f, level=args.level, t_bound=args.tbound)
        print(inv)
        return 0
    if args.action == "expand":
        num = ctx.from_string(args.num)
        den = ctx.from_string(args.den)
        le = ore.localise(num, den)
        print(le.expand(level=args.level, t_bound=args.tbound))
        return 0
    return 2


def cmd_norm(args):
    ctx = load_context(args.ring)
    rho = Fraction(args.rho)
    nm = norms.build_norm(ctx.ring, ctx.twist, rho=rho)
    if args.action == "check":
        with ReportWriter(args.report) as w:
            w.emit(op="norm.check", ring=ctx.ring.name, kind=nm.kind,
                   rho=nm.rho, D=nm.contraction_D, axioms="pass")
        return 0
    if args.action == "eval":
        x = ctx.from_string(args.elem)
        val = norms.laurent_norm(nm, x, Fraction(args.u))
        print(val)
        return 0
    if args.action == "compare":
        ring = ctx.ring
        power = ring.jac_powers[min(args.power2, len(ring.jac_powers) - 1)]
        nm2 = norms.build_norm(ring, ctx.twist, "ideal_adic", ideal=power,
                               rho=rho)
        eq = norms.equivalence_bounds(nm, nm2)
        print(f"n1={eq.n1} n2={eq.n2} sigma={eq.sigma_num}/{eq.sigma_den} "
              f"verified={eq.verified}")
        return 0
    if args.action == "profile":
        x = ctx.from_string(args.elem)
        u = Fraction(args.u)
        terms = norms.term_norms(nm, x, u)
        total = norms.laurent_norm(nm, x, u)
        with ReportWriter(args.report) as w:
            for e in sorted(terms):
                w.emit(op="norm.profile", exponent=e, term_norm=terms[e])
            w.emit(op="norm.profile", total=total, u=u)
        if args.figures:
            path = os.path.join(args.figures, "norm_profile.png")
            render_norm_profile(terms, u, total, path,
                                title=f"|{args.elem}|_u, u={u}")
            print(f"figure={path}")
        return 0
    return 2


def cmd_iwasawa(args):
    gd = load_group_datum(args.ring)
    if args.action == "check":
        rep = powerful_checks(gd)
        with ReportWriter(args.report) as w:
            w.emit(op="iwasawa.build", ring=gd.ring.name, p=gd.p, m=gd.m,
                   order=gd.group.order, delta_in_jac=gd.delta_in_jac,
                   **{k: v for k, v in gd.flags.items()})
            for line in rep.lines():
                w.emit(op="iwasawa.powerful", info=line)
        return 0
    if args.action == "altgen":
        rep = alternate_generator_demo(gd, h=args.h, s=args.s)
        for line in rep.lines():
            print(line)
        return 0 if rep.verified else 1
    return 2


def cmd_verify(args):
    if args.suite == "all":
        results = verify.run_all(seed=args.seed)
    else:
        results = [verify.run_suite(args.suite, seed=args.seed)]
    all_ok = True
    with ReportWriter(args.report) as w:
        for r in results:
            for name, ok, detail in r.checks:
                w.emit(suite=r.name, check=name,
                       status="pass" if ok else "fail", detail=detail)
            w.emit(suite=r.name, summary=True,
                   status="pass" if r.ok() else "fail",
                   checks=len(r.checks), seconds=f"{r.duration:.2f}")
            all_ok = all_ok and r.ok()
    if args.figures:
        path = os.path.join(args.figures, "verify_summary.png")
        render_suite_figure(results, path)
        print(f"figure={path}")
    return 0 if all_ok else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ring":
            return cmd_ring(args)
        if args.command == "series":
            return cmd_series(args)
        if args.command == "ore":
            return cmd_ore(args)
        if args.command == "norm":
            return cmd_norm(args)
        if args.command == "iwasawa":
            return cmd_iwasawa(args)
        if args.command == "verify":
            return cmd_verify(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def cli_main(argv):
    """Entry point taking an explicit argv list, returning the exit status."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
