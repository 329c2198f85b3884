"""Exact arithmetic in truncated skew power and Laurent series rings.

Elements are finitely supported sums of coefficient * t^i (left form) or
t^i * coefficient (right form) over a finite coefficient ring with twist
(sigma, delta).  The commutation rule t*r = sigma(r)*t + delta(r) drives
everything; negative powers of t expand through mixed monomial operators
and terminate because mixed words in delta eventually vanish.

Precision is a pair (level k, t-adic bound N): coefficients are canonical
representatives modulo the level-k filtration ideal, and terms with
exponent >= N are unknown.  N = INF means the element is exact.
"""

from math import comb, inf as INF

from .linalg import is_zero_vec, mat_apply, mat_identity, mat_mul, mat_pow
from .rings import CoefficientRing, Filtration, TwistData

KIND_DS = "ds"      # operators built from (delta, sigma)
KIND_DPSP = "dpsp"  # operators built from (delta', sigma')


class SeriesError(ValueError):
    """Series arithmetic misuse (ring/form/precision mismatch)."""


class ZeroSeriesError(SeriesError):
    """Raised where the zero element has no defined order/leading term."""


class PrecisionMismatch(SeriesError):
    """Operands carry different coefficient levels; project first."""


class SeriesRing:
    """Context bundling (ring, twist, filtration) plus operator caches.

    Caches are extend-only dicts keyed by immutable tuples; concurrent
    readers and writers are safe under the GIL, and a stale miss only
    costs a recomputation.
    """

    def __init__(self, ring: CoefficientRing, twist: TwistData, filt: Filtration,
                 name=None):
        self.ring = ring
        self.twist = twist
        self.filt = filt
        self.name = name or ring.name
        self._monomial_cache = {}
        self._commute_cache = {}
        ex = filt.exact_level()
        self.default_level = ex if ex is not None else filt.depth()

    # -- element constructors -------------------------------------------

    def series(self, coeffs, form="left", level=None, nbound=INF):
        if level is None:
            level = self.default_level
        fixed = {}
        for e, v in coeffs.items():
            if isinstance(v, int):
                v = self.ring.from_int(v)
            fixed[int(e)] = tuple(v)
        return SkewSeries(self, form, fixed, level, nbound)

    def zero(self, form="left", level=None, nbound=INF):
        return self.series({}, form, level, nbound)

    def one(self, form="left", level=None):
        return self.series({0: self.ring.one()}, form, level)

    def const(self, vec, form="left", level=None):
        return self.series({0: vec}, form, level)

    def t_power(self, j, form="left", level=None):
        return self.series({j: self.ring.one()}, form, level)

    def from_string(self, text, form="left", level=None, nbound=INF):
        from .grammar import parse_element
        return self.series(parse_element(self.ring, text), form, level, nbound)

    def level_ideal(self, k):
        return self.filt.level(k)

    # -- monomial operators ----------------------------------------------

    def monomial_matrix(self, kind, k, l):
        """Matrix of M_{k,l}(Y, Z): the sum of all words with k letters Y
        and l letters Z, for (Y, Z) = (delta, sigma) or (delta', sigma').

        Computed through M_{k+1,l} = Y o M_{k,l} + Z o M_{k+1,l-1} with
        M_{0,l} = Z^l and M_{k,0} = Y^k, memoised per (kind, k, l).
        Entries with k at or beyond the mixed nilpotency degree are zero
        and are not cached.
        """
        q = self.ring.q
        n = self.ring.basis_size
        if k >= self.twist.mixed_nilpotency_degree:
            return tuple((0,) * n for _ in range(n))
        key = (kind, k, l)
        hit = self._monomial_cache.get(key)
        if hit is not None:
            return hit
        if kind == KIND_DS:
            Y, Z = self.twist.delta, self.twist.sigma
        elif kind == KIND_DPSP:
            Y, Z = self.twist.delta_prime, self.twist.sigma_prime
        else:
            raise SeriesError(f"unknown monomial kind {kind!r}")
        if k == 0:
            mat = mat_pow(Z, l, q)
        elif l == 0:
            mat = mat_pow(Y, k, q)
        else:
            # Y o M_{k-1,l} applies M first, then Y
            a = mat_mul(self.monomial_matrix(kind, k - 1, l), Y, q)
            b = mat_mul(self.monomial_matrix(kind, k, l - 1), Z, q)
            mat = tuple(tuple((x + y) % q for x, y in zip(ra, rb))
                        for ra, rb in zip(a, b))
        self._monomial_cache[key] = mat
        return mat

    def monomial_apply(self, kind, k, l, r):
        return mat_apply(r, self.monomial_matrix(kind, k, l), self.ring.q)

    def monomial_word_count(self, k, l):
        return comb(k + l, k)

    # -- commutation ------------------------------------------------------

    def _commute_basis(self, j, basis_idx, side):
        """Expansion of t^j * e  (side 'left', in left form) or
        e * t^j (side 'right', in right form) for a basis element e,
        at full coefficient precision.  Returns a tuple of (exp, vec).
        """
        key = (j, basis_idx, side)
        hit = self._commute_cache.get(key)
        if hit is not None:
            return hit
        q = self.ring.q
        n = self.ring.basis_size
        K = self.twist.mixed_nilpotency_degree
        r = tuple(1 if i == basis_idx else 0 for i in range(n))
        out = []
        if j >= 0:
            lo = max(0, j - K + 1)
            for m in range(lo, j + 1):
                kind = KIND_DS if side == "left" else KIND_DPSP
                v = self.monomial_apply(kind, j - m, m, r)
                if not is_zero_vec(v):
                    out.append((m, v))
        else:
            for m in range(j, j - K, -1):
                # coefficient of t^m carries j-m delta factors and one
                # outer sigma (sigma' on the left side, sigma on the right)
                if side == "left":
                    v = self.monomial_apply(KIND_DPSP, j - m, -j - 1, r)
                    v = mat_apply(v, self.twist.sigma_prime, q)
                else:
                    v = self.monomial_apply(KIND_DS, j - m, -j - 1, r)
                    v = mat_apply(v, self.twist.sigma, q)
                if not is_zero_vec(v):
                    out.append((m, v))
        out = tuple(out)
        self._commute_cache[key] = out
        return out

    def commute(self, j, r, side="left", level=None):
        """Expand t^j * r (side 'left') or r * t^j (side 'right').

        The result is a SkewSeries in left form for side 'left' and right
        form for side 'right'; it is exact at the given level."""
        if level is None:
            level = self.default_level
        if isinstance(r, int):
            r = self.ring.from_int(r)
        q = self.ring.q
        acc = {}
        for idx, c in enumerate(r):
            if not c:
                continue
            for m, v in self._commute_basis(j, idx, side):
                w = tuple((c * x) % q for x in v)
                cur = acc.get(m)
                acc[m] = w if cur is None else tuple((a + b) % q for a, b in zip(cur, w))
        form = "left" if side == "left" else "right"
        return SkewSeries(self, form, acc, level, INF)

    def __repr__(self):
        return f"SeriesRing({self.name})"


class SkewSeries:
    """A finitely supported skew Laurent element with precision data."""

    __slots__ = ("ctx", "form", "coeffs", "level", "nbound")

    def __init__(self, ctx, form, coeffs, level, nbound):
        if form not in ("left", "right"):
            raise SeriesError(f"unknown form {form!r}")
        self.ctx = ctx
        self.form = form
        self.level = level
        self.nbound = nbound
        ideal = ctx.filt.level(level)
        clean = {}
        for e, v in coeffs.items():
            if nbound is not INF and e >= nbound:
                continue
            red = ideal.reduce(v)
            if not is_zero_vec(red):
                clean[e] = red
        self.coeffs = dict(sorted(clean.items()))

    # -- views -------------------------------------------------------------

    def support(self):
        return tuple(self.coeffs)

    def coefficient(self, e):
        return self.coeffs.get(e, self.ctx.ring.zero())

    @property
    def i_min(self):
        """Lowest known exponent; everything below is exactly zero."""
        return min(self.coeffs) if self.coeffs else self.nbound

    def is_zero(self):
        return not self.coeffs

    def is_exact(self):
        return self.nbound is INF

    def order(self):
        if not self.coeffs:
            raise ZeroSeriesError("the zero element has no order")
        return min(self.coeffs)

    def leading(self):
        return self.coeffs[self.order()]

    def __repr__(self):
        from .grammar import print_element
        prec = "" if self.nbound is INF else f" + O(t^{self.nbound})"
        return f"<{print_element(self.ctx.ring, self.coeffs)}{prec} @level {self.level}>"

    def __str__(self):
        from .grammar import print_element
        return print_element(self.ctx.ring, self.coeffs)

    # -- ring operations ----------------------------------------------------

    def _compat(self, other, op):
        if self.ctx is not other.ctx:
            raise SeriesError(f"{op}: elements live over different series rings")
        if self.form != other.form:
            raise SeriesError(f"{op}: mixed left/right forms; convert first")

    def __eq__(self, other):
        if not isinstance(other, SkewSeries):
            return NotImplemented
        return (self.ctx is other.ctx and self.form == other.form
                and self.level == other.level and self.nbound == other.nbound
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.ctx), self.form, self.level, self.nbound,
                     tuple(self.coeffs.items())))

    def __add__(self, other):
        self._compat(other, "add")
        level = min(self.level, other.level)
        nbound = min(self.nbound, other.nbound)
        q = self.ctx.ring.q
        acc = dict(self.coeffs)
        for e, v in other.coeffs.items():
            cur = acc.get(e)
            acc[e] = v if cur is None else tuple((a + b) % q for a, b in zip(cur, v))
        return SkewSeries(self.ctx, self.form, acc, level, nbound)

    def __neg__(self):
        q = self.ctx.ring.q
        acc = {e: tuple((-x) % q for x in v) for e, v in self.coeffs.items()}
        return SkewSeries(self.ctx, self.form, acc, self.level, self.nbound)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SkewSeries):
            return NotImplemented
        return mul(self, other)

    def shift(self, j):
        """Multiply by t^j on the coefficient-free side (exponent shift)."""
        nbound = self.nbound if self.nbound is INF else self.nbound + j
        acc = {e + j: v for e, v in self.coeffs.items()}
        return SkewSeries(self.ctx, self.form, acc, self.level, nbound)

    def scale_left(self, r):
        """r * self for a plain coefficient r (left form only)."""
        if self.form != "left":
            raise SeriesError("scale_left needs a left-form series")
        if isinstance(r, int):
            r = self.ctx.ring.from_int(r)
        ring = self.ctx.ring
        acc = {e: ring.mul(r, v) for e, v in self.coeffs.items()}
        return SkewSeries(self.ctx, self.form, acc, self.level, self.nbound)

    def truncate(self, nbound):
        nb = min(self.nbound, nbound)
        return SkewSeries(self.ctx, self.form, self.coeffs, self.level, nb)


# -- free functions mirroring the operation surface --------------------------


def mul(a: SkewSeries, b: SkewSeries) -> SkewSeries:
    """Product at shared precision level.

    The t-adic bound of the result is
    min(N_a + i_min(b), N_b + i_min(a)) - (K - 1) where K is the mixed
    nilpotency degree: expanding t^j past a coefficient spills terms up
    to K - 1 exponents below j, so an unknown tail pollutes that far
    down (for delta = 0, K = 1 and the correction vanishes).
    """
    a._compat(b, "mul")
    if a.level != b.level:
        raise PrecisionMismatch(
            f"levels {a.level} != {b.level}; project the finer element first")
    ctx = a.ctx
    ring = ctx.ring
    q = ring.q
    nbound = min(_add_bound(a.nbound, b.i_min), _add_bound(b.nbound, a.i_min))
    if nbound is not INF:
        nbound -= ctx.twist.mixed_nilpotency_degree - 1
    acc = {}
    if a.form == "left":
        for j, aj in a.coeffs.items():
            for l, bl in b.coeffs.items():
                for m, v in _expansion(ctx, j, bl, "left"):
                    e = m + l
                    if e >= nbound:
                        continue
                    w = ring.mul(aj, v)
                    cur = acc.get(e)
                    acc[e] = w if cur is None else tuple(
                        (x + y) % q for x, y in zip(cur, w))
    else:
        for j, aj in a.coeffs.items():
            for l, bl in b.coeffs.items():
                for m, v in _expansion(ctx, l, aj, "right"):
                    e = m + j
                    if e >= nbound:
                        continue
                    w = ring.mul(v, bl)
                    cur = acc.get(e)
                    acc[e] = w if cur is None else tuple(
                        (x + y) % q for x, y in zip(cur, w))
    return SkewSeries(ctx, a.form, acc, a.level, nbound)


def _add_bound(n, i):
    if n is INF or i is INF:
        return INF
    return n + i


def _expansion(ctx, j, r, side):
    q = ctx.ring.q
    out = {}
    for idx, c in enumerate(r):
        if not c:
            continue
        for m, v in ctx._commute_basis(j, idx, side):
            w = tuple((c * x) % q for x in v)
            cur = out.get(m)
            out[m] = w if cur is None else tuple((x + y) % q for x, y in zip(cur, w))
    return out.items()


def commute(ctx, j, r, side="left", level=None):
    return ctx.commute(j, r, side, level)


def monomial_apply(ctx, kind, k, l, r):
    if isinstance(r, int):
        r = ctx.ring.from_int(r)
    return ctx.monomial_apply(kind, k, l, r)


def convert_form(a: SkewSeries) -> SkewSeries:
    """Rewrite between left and right forms; the roundtrip is the identity.

    A finite t-adic bound drops by (mixed nilpotency - 1) because unknown
    high-order terms spill downward by at most that many exponents.
    """
    ctx = a.ctx
    K = ctx.twist.mixed_nilpotency_degree
    if a.nbound is INF:
        nbound = INF
    else:
        nbound = a.nbound - (K - 1)
    target = "right" if a.form == "left" else "left"
    side = "right" if a.form == "left" else "left"
    acc = ctx.zero(form=target, level=a.level, nbound=nbound)
    for e, v in a.coeffs.items():
        # left form term v*t^e expands via the right-form rule and vice versa
        acc = acc + ctx.commute(e, v, side=side, level=a.level).truncate(nbound)
    return acc


def order_leading(b: SkewSeries):
    """(order, leading coefficient); raises ZeroSeriesError on zero."""
    return b.order(), b.leading()


def project(a: SkewSeries, level) -> SkewSeries:
    if level > a.level:
        raise SeriesError(f"cannot refine level {a.level} to {level}")
    return SkewSeries(a.ctx, a.form, a.coeffs, level, a.nbound)


def ore_witness(a: SkewSeries, j: int):
    """(a', N) with a * t^N = t^(-j) * a', N minimal with a' in A.

    a must have non-negative support; j < 0.  N is found by expanding with
    a provisional shift and reading off the lowest exponent.
    """
    if j >= 0:
        raise SeriesError("ore_witness needs a negative exponent j")
    if a.is_zero():
        return a, 0
    if a.order() < 0:
        raise SeriesError("ore_witness expects an element of A (support >= 0)")
    ctx = a.ctx
    K = ctx.twist.mixed_nilpotency_degree
    n0 = -j + K
    prov = ctx.zero(form="left", level=a.level)
    for i, v in a.coeffs.items():
        prov = prov + ctx.commute(j, v, side="left", level=a.level).shift(i + n0)
    low = prov.order()
    n_min = n0 - low
    return prov.shift(-low), n_min


def invert_unit_series(u: SkewSeries, nbound) -> SkewSeries:
    """Inverse of a series whose constant term is a unit, mod t^nbound.

    Writes u = c0 * (1 + v) with order(v) >= 1 and sums the alternating
    geometric series; works identically as a left and right inverse.
    """
    if u.form != "left":
        u = convert_form(u)
    if u.is_zero() or u.order() < 0:
        raise SeriesError("unit inversion expects a power series with unit constant term")
    ctx = u.ctx
    ring = ctx.ring
    c0 = u.coefficient(0)
    c0_inv = ring.inverse(c0)
    scaled = u.truncate(nbound).scale_left(c0_inv)
    v = scaled - ctx.one(level=u.level).truncate(scaled.nbound)
    if not v.is_zero() and v.order() < 1:
        raise SeriesError("constant term did not normalise to 1")
    one = ctx.one(level=u.level).truncate(nbound)
    acc = one
    term = one
    while True:
        term = mul(term, -v).truncate(nbound)
        if term.is_zero():
            break
        acc = acc + term
    return mul(acc, ctx.const(c0_inv, level=u.level)).truncate(nbound)


def equal_on_overlap(a: SkewSeries, b: SkewSeries) -> bool:
    """Exact equality of all coefficients below both t-adic bounds."""
    if a.ctx is not b.ctx or a.form != b.form or a.level != b.level:
        return False
    horizon = min(a.nbound, b.nbound)
    exps = set(a.coeffs) | set(b.coeffs)
    for e in exps:
        if e >= horizon:
            continue
        if a.coefficient(e) != b.coefficient(e):
            return False
    return True


# -- projective tower ---------------------------------------------------------


class TowerCoherenceError(SeriesError):
    """Per-level representatives disagree under projection."""


class TowerElement:
    """An element of the level tower, given by a per-level rule.

    Representatives are computed lazily; every access asserts coherence
    against all cached neighbours.  The cache is extend-only.
    """

    def __init__(self, ctx, rule):
        self.ctx = ctx
        self.rule = rule
        self._cache = {}

    def at(self, level):
        hit = self._cache.get(level)
        if hit is not None:
            return hit
        val = self.rule(level)
        if val.level != level:
            raise TowerCoherenceError(
                f"rule returned level {val.level} at requested level {level}")
        for k2, v2 in list(self._cache.items()):
            if k2 > level:
                if not equal_on_overlap(project(v2, level), val):
                    raise TowerCoherenceError(
                        f"levels {k2} and {level} disagree under projection")
            elif k2 < level:
                if not equal_on_overlap(project(val, k2), v2):
                    raise TowerCoherenceError(
                        f"levels {level} and {k2} disagree under projection")
        self._cache[level] = val
        return val


def tower_element(ctx, rule) -> TowerElement:
    return TowerElement(ctx, rule)


# -- graded pieces -------------------------------------------------------------


class GradedPiece:
    """Image of an element of J_k in the k-th graded piece.

    Coefficients are classes in I_k / I_{k+1}, stored as canonical
    representatives modulo the next filtration level.
    """

    __slots__ = ("grade", "rep")

    def __init__(self, grade, rep):
        self.grade = grade
        self.rep = rep

    def is_zero(self):
        return self.rep.is_zero()

    def __eq__(self, other):
        return (isinstance(other, GradedPiece) and self.grade == other.grade
                and self.rep == other.rep)

    def __mul__(self, other):
        # canonical representatives are honest ring elements, so lift both
        # to the exact level, multiply there, and reduce into the new grade
        ctx = self.rep.ctx
        a = SkewSeries(ctx, self.rep.form, self.rep.coeffs,
                       ctx.default_level, self.rep.nbound)
        b = SkewSeries(ctx, other.rep.form, other.rep.coeffs,
                       ctx.default_level, other.rep.nbound)
        return graded_component(mul(a, b), self.grade + other.grade)

    def __repr__(self):
        return f"<gr_{self.grade}: {self.rep!s}>"


def graded_component(a: SkewSeries, k) -> GradedPiece:
    """The class of a in gr_k; requires every coefficient inside I_k."""
    ctx = a.ctx
    ideal = ctx.filt.level(k)
    for e, v in a.coeffs.items():
        if not ideal.contains(v):
            raise SeriesError(
                f"coefficient at t^{e} is not in filtration level {k}")
    need = min(k + 1, ctx.filt.depth())
    if a.level < need:
        raise SeriesError(
            f"element is only known modulo level {a.level} < {need}")
    return GradedPiece(k, SkewSeries(ctx, a.form, a.coeffs, need, a.nbound))
