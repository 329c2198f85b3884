"""The canonical Ore set of a skew power series ring.

The members are the elements that stay regular after killing radical
coefficients.  Membership is certified by a principally-cofinite witness:
a solution g of g * fbar = t^n (mod t^N) over the semisimple quotient,
which exhibits a unit multiple of t^n inside the left ideal of fbar.
Certified elements are inverted in each Artinian Laurent quotient by a
two-stage procedure: invert over the quotient, then correct the lift by a
finite geometric series in the nilpotent radical part.
"""

from dataclasses import dataclass, field
from math import inf as INF

from .linalg import express, mat_apply, unit_vec
from .rings import quotient_by_radical
from .series import (
    SeriesRing,
    SkewSeries,
    convert_form,
    equal_on_overlap,
    invert_unit_series,
    mul,
    project,
)

DEFAULT_T_BOUND = 8
DEFAULT_PRECISION_CAP = 256


class OreError(ValueError):
    """Localisation failures (zero input, missing witness, precision)."""


class NotCertifiedError(OreError):
    """Raised when inversion is requested without a membership witness."""


class PrecisionExhausted(OreError):
    """The requested t-adic bound cannot hold the inverse."""


@dataclass
class NonMembership:
    """Negative report; absolute only when the reduction is zero."""

    element: SkewSeries
    tested_bound: int
    absolute: bool
    reason: str

    def __bool__(self):
        return False


@dataclass
class RegularityWitness:
    """Certificate g * fbar = t^n * unit at the searched precision."""

    g: SkewSeries
    n: int
    search_bound: int

    def __bool__(self):
        return True


class QuotientContext:
    """Series ring over R/Jac(R) with projection and lift of elements."""

    def __init__(self, ctx: SeriesRing):
        ring = ctx.ring
        if not _delta_into_jac(ctx):
            raise OreError(
                f"delta({ring.name}) is not inside Jac; the canonical Ore set "
                "construction does not apply")
        self.ctx = ctx
        self.qd = quotient_by_radical(ring)
        rbar = self.qd.quotient
        from .rings import build_twist, jac_adic_filtration
        sigma_bar = self.qd.project_matrix(ctx.twist.sigma)
        self.twist_bar = build_twist(rbar, sigma_bar, "zero")
        self.bar_ctx = SeriesRing(rbar, self.twist_bar,
                                  jac_adic_filtration(rbar, self.twist_bar),
                                  name=f"{ring.name}/rad series")

    def project_series(self, a: SkewSeries) -> SkewSeries:
        coeffs = {e: self.qd.project(v) for e, v in a.coeffs.items()}
        return self.bar_ctx.series(coeffs, form=a.form, nbound=a.nbound)

    def lift_series(self, abar: SkewSeries, level) -> SkewSeries:
        coeffs = {e: self.qd.lift(v) for e, v in abar.coeffs.items()}
        return self.ctx.series(coeffs, form=abar.form, level=level,
                               nbound=abar.nbound)


def _delta_into_jac(ctx):
    ring = ctx.ring
    return all(ring.jac.contains(mat_apply(unit_vec(ring.basis_size, i),
                                           ctx.twist.delta, ring.q))
               for i in range(ring.basis_size))


def _quotient_context(ctx) -> QuotientContext:
    qc = ctx.__dict__.get("_ore_quotient")
    if qc is None:
        qc = QuotientContext(ctx)
        ctx.__dict__["_ore_quotient"] = qc
    return qc


def regularity_test(f: SkewSeries, level=None, t_bound=DEFAULT_T_BOUND,
                    cap=DEFAULT_PRECISION_CAP):
    """Certify membership of f in the canonical Ore set, or report failure.

    Searches exponents n = 0, 1, ... for g with g * fbar = t^n mod t^N,
    doubling N up to the cap.  Success is sound unconditionally; failure is
    only "not in S at the tested precision" unless fbar = 0.
    """
    if f.is_zero():
        raise OreError("the zero element is never in the Ore set")
    if f.form != "left":
        f = convert_form(f)
    if f.order() < 0:
        raise OreError("Ore set membership is tested for elements of A "
                       "(support >= 0)")
    qc = _quotient_context(f.ctx)
    fbar = qc.project_series(f)
    if fbar.is_zero():
        return NonMembership(element=f, tested_bound=0, absolute=True,
                             reason="reduction mod Jac is zero")
    N = t_bound
    while True:
        found = _solve_cofinite(qc, fbar, N)
        if found is not None:
            g, n = found
            check = mul(g, fbar).truncate(N)
            want = qc.bar_ctx.t_power(n).truncate(N)
            if not equal_on_overlap(check, want):
                raise OreError("internal: witness failed its own verification")
            return RegularityWitness(g=g, n=n, search_bound=N)
        if N >= cap:
            return NonMembership(element=f, tested_bound=N, absolute=False,
                                 reason=f"no witness up to t-bound {N}")
        N = min(2 * N, cap)


def _solve_cofinite(qc, fbar, N):
    """One Howell pass over the span {e_s t^i * fbar mod t^N}, then test
    the targets t^n for n = 0..N-1 by reduction."""
    bar = qc.bar_ctx
    rbar = bar.ring
    d = rbar.basis_size
    dim = N * d
    gens = []
    fb = fbar.truncate(N)
    for i in range(N):
        for s in range(d):
            gen = mul(bar.series({i: unit_vec(d, s)}), fb).truncate(N)
            gens.append(_flatten(gen, N, d))
    for n in range(N):
        target = [0] * dim
        target[n * d:(n + 1) * d] = list(rbar.one())
        combo = express(gens, tuple(target), rbar.q, rbar.p, rbar.m, dim)
        if combo is not None:
            coeffs = {}
            for idx, c in enumerate(combo):
                if c:
                    i, s = divmod(idx, d)
                    cur = coeffs.get(i, rbar.zero())
                    coeffs[i] = rbar.add(cur, rbar.scale(c, unit_vec(d, s)))
            g = bar.series(coeffs, nbound=INF)
            return g, n
    return None


def _flatten(series_el, N, d):
    out = [0] * (N * d)
    for e, v in series_el.coeffs.items():
        if 0 <= e < N:
            out[e * d:(e + 1) * d] = list(v)
    return tuple(out)


def invert_in_level(s: SkewSeries, witness: RegularityWitness, level=None,
                    t_bound=DEFAULT_T_BOUND, _retries=2):
    """s^-1 in the level-k Artinian Laurent quotient, to t-bound N.

    Stage 1 inverts the reduction via the witness (geometric series in t);
    stage 2 corrects the lift by the finite geometric series of the
    nilpotent error w = 1 - v*s.  The working bound is enlarged and the
    attempt repeated when the final verification detects that truncation
    ate into the requested precision.
    """
    ctx = s.ctx
    if level is None:
        level = ctx.default_level
    if witness is None or not witness:
        raise NotCertifiedError("invert_in_level needs a regularity witness")
    qc = _quotient_context(ctx)
    bar = qc.bar_ctx
    nu = max(1, ctx.ring.jac_nilpotency)
    n = witness.n
    kk = ctx.twist.mixed_nilpotency_degree
    work = (t_bound + (n + kk + 1) * (nu + 2) + 4) * (1 + max(0, kk - 2))
    sbar = qc.project_series(s).truncate(work + n + 1)
    # cofactor u with g * sbar = t^n * (sigma^n twisted u); invert the unit
    prod = mul(witness.g.truncate(work + n + 1), sbar)
    u_cof = _t_shift_left(bar, prod, -n).truncate(work)
    if u_cof.is_zero() or not bar.ring.is_unit(u_cof.coefficient(0)):
        raise OreError("witness cofactor is not a unit at this precision")
    u_inv = invert_unit_series(u_cof, work)
    vbar = mul(mul(u_inv, bar.t_power(-n)), witness.g.truncate(work))
    v0 = qc.lift_series(vbar, level)
    one = ctx.one(level=level)
    w = one - mul(v0, project(s, level) if s.level != level else s).truncate(work)
    acc = one.truncate(work)
    term = one.truncate(work)
    for _ in range(nu + 1):
        term = mul(term, w).truncate(work)
        if term.is_zero():
            break
        acc = acc + term
    if not term.is_zero():
        # residual term only carries t-adic tail error, never radical error
        if not all(ctx.ring.jac.contains(v) for v in term.coeffs.values()):
            raise OreError("radical correction failed to nilpotate")
    s_inv = mul(acc, v0).truncate(t_bound)
    s_at = project(s, level) if s.level != level else s
    left = mul(s_inv, s_at).truncate(t_bound)
    right = mul(s_at, s_inv.truncate(t_bound)).truncate(t_bound)
    one_t = one.truncate(t_bound)
    if not (equal_on_overlap(left, one_t) and equal_on_overlap(right, one_t)):
        if _retries > 0:
            return invert_in_level(s, witness, level=level,
                                   t_bound=2 * t_bound,
                                   _retries=_retries - 1).truncate(t_bound)
        raise PrecisionExhausted(
            f"inverse verification failed at t-bound {t_bound}; "
            f"retry with a larger bound (working bound was {work})")
    return s_inv


def _t_shift_left(bar_ctx, a, j):
    """t^j * a for a left-form series over the twist-only quotient."""
    q = bar_ctx.ring.q
    out = {}
    for e, v in a.coeffs.items():
        w = v
        if j >= 0:
            for _ in range(j):
                w = mat_apply(w, bar_ctx.twist.sigma, q)
        else:
            for _ in range(-j):
                w = mat_apply(w, bar_ctx.twist.sigma_prime, q)
        out[e + j] = w
    nb = a.nbound if a.nbound is INF else a.nbound + j
    return SkewSeries(bar_ctx, a.form, out, a.level, nb)


def invert_in_Bk(s: SkewSeries, level=None, t_bound=DEFAULT_T_BOUND,
                 witness=None, cap=DEFAULT_PRECISION_CAP):
    """Certify (if needed) and invert s in the level-k Laurent quotient."""
    if witness is None:
        witness = regularity_test(s, level=level, t_bound=t_bound, cap=cap)
        if not witness:
            raise NotCertifiedError(
                f"element is not certified in S: {witness.reason}")
    return invert_in_level(s, witness, level=level, t_bound=t_bound)


@dataclass
class LocalisedElement:
    """A fraction numerator * denominator^-1 with cached level expansions.

    The cache maps (level, t_bound) to the expansion; it is extend-only so
    concurrent expansion at distinct levels is safe.
    """

    numerator: SkewSeries
    denominator: SkewSeries
    witness: RegularityWitness
    _cache: dict = field(default_factory=dict)

    def expand(self, level=None, t_bound=DEFAULT_T_BOUND):
        ctx = self.numerator.ctx
        if level is None:
            level = ctx.default_level
        key = (level, t_bound)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        margin = max(1, -self.numerator.i_min if self.numerator.coeffs else 1)
        s_inv = invert_in_level(self.denominator, self.witness, level=level,
                                t_bound=t_bound + margin + self.witness.n + 1)
        num = project(self.numerator, level) if self.numerator.level != level \
            else self.numerator
        out = mul(num, s_inv).truncate(t_bound)
        self._cache[key] = out
        return out

    def expand_right(self, level=None, t_bound=DEFAULT_T_BOUND):
        """The companion expansion y with denominator * y = numerator."""
        ctx = self.numerator.ctx
        if level is None:
            level = ctx.default_level
        margin = max(1, -self.numerator.i_min if self.numerator.coeffs else 1)
        s_inv = invert_in_level(self.denominator, self.witness, level=level,
                                t_bound=t_bound + margin + self.witness.n + 1)
        num = project(self.numerator, level) if self.numerator.level != level \
            else self.numerator
        return mul(s_inv, num).truncate(t_bound)


def localise(a: SkewSeries, s: SkewSeries, witness=None,
             t_bound=DEFAULT_T_BOUND, cap=DEFAULT_PRECISION_CAP) -> LocalisedElement:
    if witness is None:
        witness = regularity_test(s, t_bound=t_bound, cap=cap)
    if not witness:
        raise NotCertifiedError(f"denominator not certified: {witness.reason}")
    return LocalisedElement(numerator=a, denominator=s, witness=witness)


def expand(le: LocalisedElement, level=None, t_bound=DEFAULT_T_BOUND):
    return le.expand(level=level, t_bound=t_bound)


# -- closure and consistency reports -----------------------------------------


@dataclass
class ClosureReport:
    checks: list

    def ok(self):
        return all(flag for _, flag, _ in self.checks)

    def lines(self):
        return [f"check={name} status={'pass' if flag else 'fail'} {detail}"
                for name, flag, detail in self.checks]


def ore_pair(s: SkewSeries, b: SkewSeries, witness=None, level=None,
             t_bound=DEFAULT_T_BOUND):
    """(t', b') with t'*b = b'*s at the working precision, t' in S.

    Uses the expansion x = b * s^-1: the least power t^m clearing the
    negative support of x gives t' = t^m and b' = t^m * x, and a power of
    t is always certified."""
    ctx = s.ctx
    if level is None:
        level = ctx.default_level
    le = localise(b, s, witness=witness, t_bound=t_bound)
    x = le.expand(level=level, t_bound=t_bound)
    m = max(0, -(x.i_min if x.coeffs else 0))
    t_m = ctx.t_power(m, level=level)
    b_prime = mul(t_m, x)
    t_prime = t_m
    lhs = mul(t_prime, project(b, level) if b.level != level else b)
    rhs = mul(b_prime, project(s, level) if s.level != level else s)
    if not equal_on_overlap(lhs, rhs):
        raise OreError("Ore pair verification failed")
    horizon = min(lhs.nbound, rhs.nbound)
    return t_prime, b_prime, horizon


def s_closure_checks(ctx: SeriesRing, samples, seed=0,
                     t_bound=DEFAULT_T_BOUND) -> ClosureReport:
    """Executable closure/saturation/Ore checks on certified samples.

    samples: list of SkewSeries already known to be certified (their
    witnesses are recomputed here so the report is self-contained)."""
    import random
    rng = random.Random(seed)
    checks = []
    certified = []
    for s in samples:
        w = regularity_test(s, t_bound=t_bound)
        checks.append((f"member:{s}", bool(w),
                       f"n={w.n}" if w else f"reason={w.reason}"))
        if w:
            certified.append((s, w))
    if not certified:
        checks.append(("pool", False, "no sample was certified"))
        return ClosureReport(checks=checks)
    for _ in range(min(len(certified), 10)):
        (s1, _), (s2, _) = rng.sample(certified, 2) if len(certified) >= 2 \
            else (certified[0], certified[0])
        prod = mul(s1, s2)
        w = regularity_test(prod, t_bound=2 * t_bound)
        checks.append((f"product:{s1}|{s2}", bool(w),
                       "product of members is a member" if w else w.reason))
        if w:
            # saturation: a*s in S forces s in S; retest the right factor
            w2 = regularity_test(s2, t_bound=t_bound)
            checks.append((f"saturation:{s2}", bool(w2),
                           "right factor recertified"))
    for s, w in certified[:10]:
        b = _random_element(ctx, rng)
        if b.is_zero():
            b = ctx.one()
        try:
            t_prime, b_prime, horizon = ore_pair(s, b, witness=w,
                                                 t_bound=t_bound)
            checks.append((f"ore-pair:{s}", True,
                           f"t'=t^{t_prime.order()} horizon={horizon}"))
        except OreError as exc:
            checks.append((f"ore-pair:{s}", False, str(exc)))
    return ClosureReport(checks=checks)


def _random_element(ctx, rng, window=(-3, 4)):
    n = ctx.ring.basis_size
    q = ctx.ring.q
    coeffs = {}
    for e in range(window[0], window[1]):
        v = tuple(rng.randrange(q) for _ in range(n))
        coeffs[e] = v
    return ctx.series(coeffs)


def product_membership(ctx: SeriesRing, f: SkewSeries, t_bound=DEFAULT_T_BOUND):
    """Componentwise membership over a product coefficient ring.

    Returns (overall, per-component list); membership in the product is
    equivalent to membership of every component."""
    ring = ctx.ring
    if ring.family_tag != "product":
        raise OreError("componentwise membership needs a product ring")
    info = ring.extra["product"]
    results = []
    from .rings import build_twist, jac_adic_filtration
    for fi, factor in enumerate(info["factors"]):
        off = info["offsets"][fi]
        d = factor.basis_size
        for i in range(d):
            row = ctx.twist.sigma[off + i]
            if any(row[j] for j in range(ring.basis_size)
                   if not off <= j < off + d):
                raise OreError("twist does not preserve the product factors; "
                               "componentwise membership does not apply")
        sigma_f = tuple(
            tuple(ctx.twist.sigma[off + i][off + j] for j in range(d))
            for i in range(d))
        delta_f = tuple(
            tuple(ctx.twist.delta[off + i][off + j] for j in range(d))
            for i in range(d))
        tw = build_twist(factor, sigma_f, delta_f)
        sub_ctx = SeriesRing(factor, tw, jac_adic_filtration(factor, tw))
        coeffs = {e: tuple(v[off + i] for i in range(d))
                  for e, v in f.coeffs.items()}
        comp = sub_ctx.series(coeffs, nbound=f.nbound)
        if comp.is_zero():
            results.append(NonMembership(element=comp, tested_bound=0,
                                         absolute=True, reason="component is zero"))
        else:
            results.append(regularity_test(comp, t_bound=t_bound))
    overall = all(bool(r) for r in results)
    return overall, results


# -- radical-level unit checks -------------------------------------------------


def radical_unit_checks(ctx: SeriesRing, level=None, samples=50, seed=0,
                        window=(-2, 3)):
    """1 + (radical-coefficient element) is a unit in every level quotient.

    Inverts 1 + j directly through the finite geometric series (the
    radical part of the level quotient is nilpotent) and verifies both
    one-sided products."""
    import random
    rng = random.Random(seed)
    ring = ctx.ring
    if level is None:
        level = ctx.default_level
    nu = max(1, ring.jac_nilpotency)
    jac_rows = ring.jac.rows
    checks = []
    for i in range(samples):
        if jac_rows:
            coeffs = {}
            for e in range(window[0], window[1]):
                v = ring.zero()
                for r in jac_rows:
                    v = ring.add(v, ring.scale(rng.randrange(ring.q), r))
                coeffs[e] = v
            j_el = ctx.series(coeffs, level=level)
        else:
            j_el = ctx.zero(level=level)
        one = ctx.one(level=level)
        s = one + j_el
        acc = one
        term = one
        ok = False
        for _ in range(nu * (window[1] - window[0] + 2) + 2):
            term = mul(term, -j_el)
            if term.is_zero():
                ok = True
                break
            acc = acc + term
        good = ok and mul(acc, s) == one and mul(s, acc) == one
        checks.append((f"unit:1+jac sample {i}", good, ""))
    return ClosureReport(checks=checks)
