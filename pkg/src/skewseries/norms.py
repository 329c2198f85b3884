"""Ring norms and the overconvergent Laurent norm calculus.

Every norm value is an exact rational (a power of the base rho), so all
the inequalities are decided exactly; no floating point appears anywhere.
A norm is only handed out after every axiom has been verified over the
whole (finite) ring:

    (i)   |a - b| <= max(|a|, |b|)
    (ii)  |a| = 0 iff a = 0
    (iii) |ab| <= |a| |b|
    (iv)  |1| = 1
    (v)   |a| <= 1
    (vi)  |sigma(a)| = |a|
    (vii) |delta(a)| <= D |a| for a constant D < 1

The Laurent norm |sum a_i t^i|_u = max |a_i| u^i is defined for rational
u with D < u < 1.  At finite truncation every element is overconvergent;
what the module delivers is the verified norm calculus itself (the limit
condition for infinite tails stays documentation, not code).
"""

from dataclasses import dataclass
from fractions import Fraction

from .linalg import mat_apply, unit_vec
from .rings import CoefficientRing, TwistData
from .series import KIND_DS, SkewSeries

EXHAUSTIVE_CAP = 4096


class NormError(ValueError):
    """Norm construction/use failures, with a witness where available."""


@dataclass(frozen=True)
class RingNorm:
    """An ideal-adic norm |a| = rho^(level of a in the J-adic chain)."""

    ring: CoefficientRing
    twist: TwistData
    kind: str
    rho: Fraction
    powers: tuple  # J^0 = R, J^1, ..., down to 0
    contraction_D: Fraction

    def index(self, a):
        """Largest k with a in J^k, None for a = 0."""
        if all(x == 0 for x in a):
            return None
        k = 0
        for lvl in range(1, len(self.powers)):
            if self.powers[lvl].contains(a):
                k = lvl
            else:
                break
        return k

    def value(self, a):
        k = self.index(a)
        if k is None:
            return Fraction(0)
        return self.rho**k

    def __call__(self, a):
        return self.value(a)


def build_norm(ring, twist, kind="jac_adic", ideal=None, rho=Fraction(1, 2)):
    """Construct and exhaustively verify an ideal-adic norm.

    kind 'jac_adic' uses Jac(R); 'ideal_adic' takes the given ideal span.
    The contraction constant D is the exact maximum of |delta(a)|/|a|
    over the nonzero elements (0 when delta = 0); D >= 1 is rejected.
    """
    rho = Fraction(rho)
    if not (0 < rho < 1):
        raise NormError("rho must be a rational strictly between 0 and 1")
    if kind == "jac_adic":
        powers = ring.jac_powers
    elif kind == "ideal_adic":
        if ideal is None:
            raise NormError("ideal_adic norm needs an ideal")
        powers = [ring.full_span()]
        cur = ideal
        guard = ring.size_log_p + 1
        while not cur.is_zero():
            powers.append(cur)
            cur = ring.ideal_product(cur, ideal)
            if len(powers) > guard:
                raise NormError("the defining ideal is not nilpotent; "
                                "its adic filtration never reaches 0")
        powers.append(cur)
        powers = tuple(powers)
    else:
        raise NormError(f"unknown norm kind {kind!r}")
    if ring.num_elements > EXHAUSTIVE_CAP:
        raise NormError(f"{ring.name} has {ring.num_elements} elements; "
                        f"exhaustive axiom verification caps at {EXHAUSTIVE_CAP}")
    norm = RingNorm(ring=ring, twist=twist, kind=kind, rho=rho,
                    powers=tuple(powers), contraction_D=Fraction(0))
    D = _verify_axioms(norm)
    return RingNorm(ring=ring, twist=twist, kind=kind, rho=rho,
                    powers=tuple(powers), contraction_D=D)


def _verify_axioms(norm):
    ring = norm.ring
    twist = norm.twist
    els = list(ring.elements())
    vals = {a: norm.value(a) for a in els}
    one = ring.one()
    if vals[one] != 1:
        raise NormError("axiom (iv) fails: |1| != 1")
    for a in els:
        va = vals[a]
        if va > 1:
            raise NormError(f"axiom (v) fails at {ring.show(a)}")
        if (va == 0) != all(x == 0 for x in a):
            raise NormError(f"axiom (ii) fails at {ring.show(a)}")
        sa = mat_apply(a, twist.sigma, ring.q)
        if vals[sa] != va:
            raise NormError(f"axiom (vi) fails at {ring.show(a)}: "
                            f"|sigma(a)| = {vals[sa]} != {va}")
    for a in els:
        va = vals[a]
        for b in els:
            if vals[ring.sub(a, b)] > max(va, vals[b]):
                raise NormError(f"axiom (i) fails at ({ring.show(a)}, {ring.show(b)})")
            if vals[ring.mul(a, b)] > va * vals[b]:
                raise NormError(f"axiom (iii) fails at ({ring.show(a)}, {ring.show(b)})")
    D = Fraction(0)
    for a in els:
        va = vals[a]
        if va == 0:
            continue
        da = mat_apply(a, twist.delta, ring.q)
        vda = vals[da]
        if vda == 0:
            continue
        ratio = vda / va
        if ratio > D:
            D = ratio
    if D >= 1:
        raise NormError(f"delta is not contractive: D = {D} >= 1")
    return D


def laurent_norm(norm: RingNorm, x: SkewSeries, u):
    """|sum a_i t^i|_u = max |a_i| u^i, an exact rational.

    u must be a rational with contraction_D < u < 1.  Finitely supported
    elements always qualify for membership in the u-convergent submodule.
    """
    u = Fraction(u)
    _check_u(norm, u)
    best = Fraction(0)
    for e, v in x.coeffs.items():
        val = norm.value(v) * u**e
        if val > best:
            best = val
    return best


def _check_u(norm, u):
    if not (norm.contraction_D < u < 1):
        raise NormError(
            f"u = {u} is outside (D, 1) = ({norm.contraction_D}, 1)")


def term_norms(norm: RingNorm, x: SkewSeries, u):
    """Per-exponent contributions |a_i| u^i (for reports and figures)."""
    u = Fraction(u)
    _check_u(norm, u)
    return {e: norm.value(v) * u**e for e, v in x.coeffs.items()}


@dataclass
class NormCheckReport:
    checks: list

    def ok(self):
        return all(flag for _, flag, _ in self.checks)

    def lines(self):
        return [f"check={name} status={'pass' if flag else 'fail'} {detail}"
                for name, flag, detail in self.checks]


def check_submultiplicative(norm: RingNorm, pairs, u) -> NormCheckReport:
    """Exact |xy|_u <= |x|_u |y|_u and |x+y|_u <= max(|x|_u, |y|_u)."""
    from .series import mul
    u = Fraction(u)
    _check_u(norm, u)
    checks = []
    for i, (x, y) in enumerate(pairs):
        nx, ny = laurent_norm(norm, x, u), laurent_norm(norm, y, u)
        nxy = laurent_norm(norm, mul(x, y), u)
        ok1 = nxy <= nx * ny
        nsum = laurent_norm(norm, x + y, u)
        ok2 = nsum <= max(nx, ny)
        checks.append((f"pair {i}", ok1 and ok2,
                       f"|xy|={nxy} |x||y|={nx * ny} |x+y|={nsum}"))
    return NormCheckReport(checks=checks)


@dataclass
class EquivalenceBounds:
    """Data for the two-sided comparison of two ideal norms.

    With rho_2 = rho_1^sigma the verified inequality reads
    rho_2^n2 * |a|_1^(n2 sigma) <= |a|_2 <= rho_2^(-1) * |a|_1^(sigma/n1),
    decided exactly through integer exponent comparisons.
    """

    n1: int
    n2: int
    sigma_num: int
    sigma_den: int
    verified: bool


def equivalence_bounds(norm1: RingNorm, norm2: RingNorm,
                       max_sigma_search=64) -> EquivalenceBounds:
    if norm1.ring is not norm2.ring:
        raise NormError("norms live on different rings")
    ring = norm1.ring
    n1 = _power_inclusion(ring, norm1.powers, norm2.powers)
    n2 = _power_inclusion(ring, norm2.powers, norm1.powers)
    pp, qq = _rational_log(norm1.rho, norm2.rho, max_sigma_search)
    # |a|_1 = rho1^k, |a|_2 = rho2^m; with rho2 = rho1^(pp/qq):
    #   lower: n2*(k+1) >= m      upper: m*n1 + n1 >= k
    # after rewriting both sides as powers of rho2
    for a in ring.elements():
        k = norm1.index(a)
        if k is None:
            continue
        m = norm2.index(a)
        if not (n2 * (k + 1) >= m and m * n1 + n1 >= k):
            raise NormError(
                f"equivalence inequality fails at {ring.show(a)}: "
                f"k={k} m={m} n1={n1} n2={n2}")
    return EquivalenceBounds(n1=n1, n2=n2, sigma_num=pp, sigma_den=qq,
                             verified=True)


def _power_inclusion(ring, powers_a, powers_b):
    """Minimal n with (J_a)^n inside J_b (guarded; the chains reach 0)."""
    target = powers_b[1] if len(powers_b) > 1 else ring.zero_span()
    for n in range(1, len(powers_a) + 1):
        src = powers_a[n] if n < len(powers_a) else powers_a[-1]
        if target.contains_span(src):
            return n
    raise NormError("no power of the first ideal enters the second; "
                    "the filtrations define different topologies")


def _rational_log(rho1, rho2, cap):
    """(p, q) with rho2^q == rho1^p exactly, smallest q first."""
    for qq in range(1, cap + 1):
        r2q = rho2**qq
        p1 = rho1
        for pp in range(1, cap + 1):
            if p1 == r2q:
                return pp, qq
            if p1 < r2q:
                break
            p1 *= rho1
    raise NormError(
        f"no rational exponent with rho2 = rho1^(p/q) up to {cap}; "
        "equivalence bounds need multiplicatively related bases")


def monomial_norm_bound(norm: RingNorm, ctx, max_total=6) -> NormCheckReport:
    """|M_{k,l}(delta, sigma)(a)| <= D^k |a| on the basis, k + l <= max_total."""
    ring = norm.ring
    D = norm.contraction_D
    checks = []
    for k in range(0, max_total + 1):
        for l in range(0, max_total + 1 - k):
            mat = ctx.monomial_matrix(KIND_DS, k, l)
            for i in range(ring.basis_size):
                a = unit_vec(ring.basis_size, i)
                img = mat_apply(a, mat, ring.q)
                lhs = norm.value(img)
                rhs = (D**k) * norm.value(a)
                ok = lhs <= rhs
                checks.append((f"M[{k},{l}] basis {ring.basis_names[i]}", ok,
                               f"|M(a)|={lhs} D^k|a|={rhs}"))
    return NormCheckReport(checks=checks)
