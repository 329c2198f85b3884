"""Finite coefficient rings with automorphism/derivation data and filtrations.

A ring R is a free Z/p^m-module with a distinguished basis and a rank-3
structure-constant table; every derived object (Jacobson radical, ideal
filtrations, twist maps) is stored as matrices or Howell spans over Z/p^m,
so all invariants are decidable by finite linear algebra.
"""

from dataclasses import dataclass, field
from itertools import product

from . import linalg
from .linalg import (
    Span,
    howell,
    is_zero_mat,
    is_zero_vec,
    mat_apply,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_pow,
    mat_scale,
    mat_sub,
    unit_vec,
    vadd,
    vscale,
    vsub,
    vzero,
)

BRUTE_FORCE_RADICAL_CAP = 4096

FAMILY_TAGS = (
    "modular_integers",
    "finite_field",
    "matrix_ring",
    "group_algebra",
    "product",
    "truncated_polynomial",
    "custom",
)


class RingError(ValueError):
    """Ring construction or validation failure."""


class CoefficientRing:
    """A finite ring given by an additive basis over Z/p^m.

    structure[i][j] is the coordinate vector of (basis_i * basis_j).
    Instances are immutable after construction; the multiplication cache
    is extend-only and safe for concurrent readers under the GIL.
    """

    def __init__(self, name, p, m, structure, unit, basis_names, family_tag,
                 jac_generators=None, simple_block_idempotents=None, extra=None):
        if family_tag not in FAMILY_TAGS:
            raise RingError(f"unknown family tag {family_tag!r}")
        self.name = name
        self.p = p
        self.m = m
        self.q = p**m
        self.structure = tuple(tuple(tuple(c % self.q for c in vec) for vec in row)
                               for row in structure)
        self.basis_size = len(self.structure)
        self.unit = tuple(c % self.q for c in unit)
        self.basis_names = tuple(basis_names)
        self.family_tag = family_tag
        self.extra = dict(extra or {})
        self._mul_cache = {}
        self.size_log_p = self.m * self.basis_size
        self.num_elements = self.q**self.basis_size
        self._validate_table()
        if jac_generators is None:
            jac_generators = self._brute_force_radical()
        self.jac_generators = tuple(tuple(v) for v in jac_generators)
        self.jac = self.ideal(self.jac_generators)
        self.jac_powers = self._jac_power_chain()
        self.jac_nilpotency = len(self.jac_powers) - 1
        self.simple_block_idempotents = (
            tuple(tuple(v) for v in simple_block_idempotents)
            if simple_block_idempotents is not None else None)
        self._check_radical()

    # -- basic arithmetic ------------------------------------------------

    def zero(self):
        return vzero(self.basis_size)

    def one(self):
        return self.unit

    def add(self, a, b):
        return vadd(a, b, self.q)

    def sub(self, a, b):
        return vsub(a, b, self.q)

    def neg(self, a):
        return tuple((-x) % self.q for x in a)

    def scale(self, c, a):
        return vscale(c, a, self.q)

    def mul(self, a, b):
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        n, q = self.basis_size, self.q
        out = [0] * n
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.structure[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                f = (ai * bj) % q
                vec = row[j]
                for k, ck in enumerate(vec):
                    if ck:
                        out[k] = (out[k] + f * ck) % q
        res = tuple(out)
        if self.num_elements <= BRUTE_FORCE_RADICAL_CAP:
            self._mul_cache[key] = res
        return res

    def from_int(self, c):
        return self.scale(c, self.unit)

    def right_mul_matrix(self, a):
        """Matrix of x -> x*a."""
        return tuple(self.mul(unit_vec(self.basis_size, i), a)
                     for i in range(self.basis_size))

    def left_mul_matrix(self, a):
        """Matrix of x -> a*x."""
        return tuple(self.mul(a, unit_vec(self.basis_size, i))
                     for i in range(self.basis_size))

    def is_unit(self, a):
        return mat_inverse(self.right_mul_matrix(a), self.q) is not None

    def inverse(self, a):
        inv = mat_inverse(self.right_mul_matrix(a), self.q)
        if inv is None:
            raise RingError(f"{self.show(a)} is not a unit in {self.name}")
        # x*a = 1  =>  x = 1 applied to the inverse of right multiplication
        return mat_apply(self.unit, inv, self.q)

    def elements(self, cap=None):
        count = self.num_elements
        if cap is not None and count > cap:
            raise RingError(f"{self.name} has {count} elements, cap is {cap}")
        for combo in product(range(self.q), repeat=self.basis_size):
            yield combo

    def show(self, a):
        """Render a coordinate vector in the element grammar's coeff form."""
        parts = []
        for c, nm in zip(a, self.basis_names):
            if not c:
                continue
            if nm == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(nm)
            else:
                parts.append(f"{c}{nm}")
        return "+".join(parts) if parts else "0"

    # -- ideals ----------------------------------------------------------

    def span(self, vectors):
        return howell(vectors, self.q, self.p, self.m, self.basis_size)

    def full_span(self):
        return self.span([unit_vec(self.basis_size, i) for i in range(self.basis_size)])

    def zero_span(self):
        return self.span([])

    def ideal(self, generators):
        """Two-sided ideal generated by the given vectors, as a Span."""
        rows = []
        basis = [unit_vec(self.basis_size, i) for i in range(self.basis_size)]
        for g in generators:
            for ei in basis:
                left = self.mul(ei, g)
                for ej in basis:
                    rows.append(self.mul(left, ej))
        return self.span(rows)

    def ideal_product(self, I, J):
        """The ideal I*J from Howell bases of I and J."""
        rows = [self.mul(x, y) for x in I.rows for y in J.rows]
        return self.span(rows)

    def apply_map_to_span(self, mat, I):
        return self.span([mat_apply(r, mat, self.q) for r in I.rows])

    def _jac_power_chain(self):
        chain = [self.full_span()]
        cur = self.jac
        guard = self.size_log_p + 1
        while not cur.is_zero():
            chain.append(cur)
            cur = self.ideal_product(cur, self.jac)
            if len(chain) > guard:
                raise RingError(f"Jacobson radical of {self.name} is not nilpotent "
                                f"within {guard} steps; radical data is wrong")
        chain.append(cur)
        return tuple(chain)

    def jac_index(self, a):
        """Largest k with a in Jac^k (None for a == 0)."""
        if is_zero_vec(a):
            return None
        k = 0
        for lvl, sp in enumerate(self.jac_powers):
            if sp.contains(a):
                k = lvl
            else:
                break
        return k

    # -- validation ------------------------------------------------------

    def _validate_table(self):
        n = self.basis_size
        if len(self.unit) != n or len(self.basis_names) != n:
            raise RingError("unit vector / names length mismatch with basis")
        if len(set(self.basis_names)) != n or "t" in self.basis_names:
            raise RingError("basis names must be distinct and must not use 't'")
        basis = [unit_vec(n, i) for i in range(n)]
        for i, ei in enumerate(basis):
            if self.mul(self.unit, ei) != ei or self.mul(ei, self.unit) != ei:
                raise RingError(f"unit law fails at basis element {self.basis_names[i]}")
        for i in range(n):
            for j in range(n):
                ab = self.mul(basis[i], basis[j])
                for k in range(n):
                    left = self.mul(ab, basis[k])
                    right = self.mul(basis[i], self.mul(basis[j], basis[k]))
                    if left != right:
                        raise RingError(
                            f"associativity fails at basis triple ({i},{j},{k})")

    def _brute_force_radical(self):
        if self.num_elements > BRUTE_FORCE_RADICAL_CAP:
            raise RingError(
                f"no radical generators supplied and {self.name} has "
                f"{self.num_elements} > {BRUTE_FORCE_RADICAL_CAP} elements")
        els = list(self.elements())
        rad = []
        for a in els:
            # a is in Jac iff 1 - b*a is a unit for every b
            if all(self.is_unit(self.sub(self.unit, self.mul(b, a))) for b in els):
                rad.append(a)
        return rad

    def _check_radical(self):
        # nilpotency was certified while building the power chain; here only
        # cheap sanity: radical elements are non-units and p*1 sits inside
        # whenever m > 1 (the radical kills the semisimple quotient)
        for r in self.jac.rows:
            if self.is_unit(r):
                raise RingError(f"radical of {self.name} contains the unit "
                                f"{self.show(r)}")
        if self.m > 1 and not self.jac.contains(self.scale(self.p, self.unit)):
            raise RingError(f"radical of {self.name} misses p*1")

    def __repr__(self):
        return f"CoefficientRing({self.name})"


# -- built-in families ---------------------------------------------------


def _check_prime(p):
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise RingError(f"{p} is not prime")


def ring_modular(p, m):
    _check_prime(p)
    if m < 1:
        raise RingError("m must be >= 1")
    q = p**m
    structure = (((1,),),)
    return CoefficientRing(
        name=f"Z/{q}", p=p, m=m, structure=structure, unit=(1,),
        basis_names=("1",), family_tag="modular_integers",
        jac_generators=[(p % q,)] if m > 1 else [],
        simple_block_idempotents=[(1,)],
    )


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_mod(a, mod, p):
    a = list(a)
    d = len(mod) - 1
    lead_inv = pow(mod[-1], -1, p)
    while len(a) > d:
        c = (a[-1] * lead_inv) % p
        if c:
            for i in range(d + 1):
                a[len(a) - 1 - d + i] = (a[len(a) - 1 - d + i] - c * mod[i]) % p
        a.pop()
    while len(a) < d:
        a.append(0)
    return a


def _find_irreducible(p, e):
    """Smallest monic irreducible polynomial of degree e over F_p."""
    if e == 1:
        return [0, 1]
    for tail in product(range(p), repeat=e):
        poly = list(tail) + [1]
        if _is_irreducible(poly, p):
            return poly
    raise RingError(f"no irreducible polynomial of degree {e} over F_{p}")


def _is_irreducible(poly, p):
    # trial division by all monic polynomials of degree <= e/2
    e = len(poly) - 1
    if poly[0] == 0:
        return e == 1
    for d in range(1, e // 2 + 1):
        for tail in product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not any(_poly_mod(poly, divisor, p)):
                return False
    return True


def ring_finite_field(p, e):
    _check_prime(p)
    if e < 1:
        raise RingError("field degree must be >= 1")
    modpoly = _find_irreducible(p, e)
    structure = []
    for i in range(e):
        row = []
        for j in range(e):
            prod_poly = [0] * (i + j) + [1]
            row.append(tuple(_poly_mod(prod_poly, modpoly, p)))
        structure.append(tuple(row))
    names = ["1"] + (["a"] if e > 1 else []) + [f"a{k}" for k in range(2, e)]
    ring = CoefficientRing(
        name=f"F_{p**e}", p=p, m=1, structure=structure,
        unit=unit_vec(e, 0), basis_names=names, family_tag="finite_field",
        jac_generators=[], simple_block_idempotents=[unit_vec(e, 0)],
    )
    ring.extra["field"] = {"p": p, "e": e, "modpoly": tuple(modpoly)}
    return ring


def frobenius_matrix(field_ring):
    """Matrix of x -> x^p on a finite_field ring."""
    if field_ring.family_tag != "finite_field":
        raise RingError("frobenius needs a finite_field ring")
    p = field_ring.p
    rows = []
    for i in range(field_ring.basis_size):
        v = unit_vec(field_ring.basis_size, i)
        acc = field_ring.one()
        for _ in range(p):
            acc = field_ring.mul(acc, v)
        rows.append(acc)
    return tuple(rows)


def ring_matrix(p, e, nsize):
    """M_nsize(F_{p^e}) with basis a^k E_ij (row-major matrix units)."""
    _check_prime(p)
    fld = ring_finite_field(p, e)
    d = nsize * nsize * e
    names = []
    idx = {}
    for i in range(nsize):
        for j in range(nsize):
            for k in range(e):
                pre = "" if k == 0 else ("a" if k == 1 else f"a{k}")
                names.append(f"{pre}E{i + 1}{j + 1}")
                idx[(i, j, k)] = len(names) - 1
    structure = [[None] * d for _ in range(d)]
    for (i1, j1, k1), b1 in idx.items():
        for (i2, j2, k2), b2 in idx.items():
            vec = [0] * d
            if j1 == i2:
                coeff = fld.mul(unit_vec(e, k1), unit_vec(e, k2))
                for k, c in enumerate(coeff):
                    if c:
                        vec[idx[(i1, j2, k)]] = c
            structure[b1][b2] = tuple(vec)
    unit = [0] * d
    for i in range(nsize):
        unit[idx[(i, i, 0)]] = 1
    ring = CoefficientRing(
        name=f"M_{nsize}(F_{p**e})", p=p, m=1,
        structure=tuple(tuple(r) for r in structure), unit=tuple(unit),
        basis_names=names, family_tag="matrix_ring",
        jac_generators=[], simple_block_idempotents=[tuple(unit)],
    )
    ring.extra["matrix"] = {"n": nsize, "field": fld, "index": idx}
    return ring


def ring_truncated_polynomial(p, m, degree, var="x"):
    """(Z/p^m)[x]/(x^degree)."""
    _check_prime(p)
    if degree < 1:
        raise RingError("degree must be >= 1")
    q = p**m
    d = degree
    structure = []
    for i in range(d):
        row = []
        for j in range(d):
            vec = [0] * d
            if i + j < d:
                vec[i + j] = 1
            row.append(tuple(vec))
        structure.append(tuple(row))
    names = ["1"] + ([var] if d > 1 else []) + [f"{var}{k}" for k in range(2, d)]
    gens = []
    if m > 1:
        gens.append(tuple([p] + [0] * (d - 1)))
    if d > 1:
        gens.append(unit_vec(d, 1))
    return CoefficientRing(
        name=f"Z/{q}[{var}]/({var}^{d})", p=p, m=m,
        structure=structure, unit=unit_vec(d, 0), basis_names=names,
        family_tag="truncated_polynomial", jac_generators=gens,
        simple_block_idempotents=None if (m > 1 or d > 1) else [unit_vec(d, 0)],
    )


def ring_product(factors):
    """Direct product; basis names are prefixed b1, b2, ... per factor."""
    if not factors:
        raise RingError("empty product")
    p = factors[0].p
    m = max(f.m for f in factors)
    if any(f.p != p for f in factors):
        raise RingError("product factors must share the prime p")
    if any(f.m != m for f in factors):
        raise RingError("product factors must share the modulus p^m")
    q = p**m
    offs = []
    total = 0
    for f in factors:
        offs.append(total)
        total += f.basis_size
    structure = [[tuple([0] * total) for _ in range(total)] for _ in range(total)]
    names = []
    unit = [0] * total
    jac_gens = []
    idems = []
    for fi, f in enumerate(factors):
        off = offs[fi]
        for i in range(f.basis_size):
            nm = f.basis_names[i]
            names.append(f"b{fi + 1}" + ("" if nm == "1" else nm))
        for i in range(f.basis_size):
            for j in range(f.basis_size):
                vec = [0] * total
                for k, c in enumerate(f.structure[i][j]):
                    vec[off + k] = c
                structure[off + i][off + j] = tuple(vec)
        for k, c in enumerate(f.unit):
            unit[off + k] = c
        for g in f.jac_generators:
            vec = [0] * total
            for k, c in enumerate(g):
                vec[off + k] = c
            jac_gens.append(tuple(vec))
        if f.simple_block_idempotents is None:
            idems = None
        if idems is not None:
            for e in f.simple_block_idempotents:
                vec = [0] * total
                for k, c in enumerate(e):
                    vec[off + k] = c
                idems.append(tuple(vec))
    ring = CoefficientRing(
        name=" x ".join(f.name for f in factors), p=p, m=m,
        structure=tuple(tuple(r) for r in structure), unit=tuple(unit),
        basis_names=names, family_tag="product",
        jac_generators=jac_gens, simple_block_idempotents=idems,
    )
    ring.extra["product"] = {"factors": tuple(factors), "offsets": tuple(offs)}
    return ring


def ring_custom(name, p, m, structure, unit, basis_names, jac_generators=None):
    """Hand-entered structure constants, fully validated before use."""
    return CoefficientRing(
        name=name, p=p, m=m, structure=structure, unit=unit,
        basis_names=basis_names, family_tag="custom",
        jac_generators=jac_generators, simple_block_idempotents=None,
    )


def build_ring(spec):
    """Build a ring from a shorthand name or a parsed spec dict.

    Shorthand names: "Z/4", "F_4", "M_2(F_2)", "Z/4[x]/(x^2)",
    "F_2 x F_2" (products of shorthands).
    """
    if isinstance(spec, CoefficientRing):
        return spec
    if isinstance(spec, str):
        return _ring_from_name(spec)
    if isinstance(spec, dict):
        return _ring_from_dict(spec)
    raise RingError(f"cannot build a ring from {spec!r}")


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            while q % p == 0:
                q //= p
                m += 1
            if q != 1:
                raise RingError("modulus is not a prime power")
            return p, m
    raise RingError("modulus must be >= 2")


def _ring_from_name(name):
    s = name.replace(" ", "")
    if " x " in name:
        return ring_product([_ring_from_name(part) for part in name.split(" x ")])
    if s.startswith("Z/"):
        rest = s[2:]
        if "[" in rest:
            qs, tail = rest.split("[", 1)
            var = tail.split("]")[0]
            deg = int(tail.split("^")[1].rstrip(")"))
            p, m = _factor_prime_power(int(qs))
            return ring_truncated_polynomial(p, m, deg, var=var)
        p, m = _factor_prime_power(int(rest))
        return ring_modular(p, m)
    if s.startswith("F_"):
        p, e = _factor_prime_power(int(s[2:]))
        return ring_finite_field(p, e)
    if s.startswith("M_"):
        nsize = int(s[2:s.index("(")])
        inner = s[s.index("(") + 1:s.rindex(")")]
        p, e = _factor_prime_power(int(inner[2:]))
        return ring_matrix(p, e, nsize)
    raise RingError(f"unknown ring shorthand {name!r}")


def _ring_from_dict(d):
    fam = d.get("family")
    if fam == "modular_integers":
        return ring_modular(int(d["p"]), int(d["m"]))
    if fam == "finite_field":
        return ring_finite_field(int(d["p"]), int(d.get("e", 1)))
    if fam == "matrix_ring":
        return ring_matrix(int(d["p"]), int(d.get("e", 1)), int(d["n"]))
    if fam == "truncated_polynomial":
        return ring_truncated_polynomial(int(d["p"]), int(d["m"]),
                                         int(d["degree"]), d.get("var", "x"))
    if fam == "product":
        return ring_product([build_ring(f.strip()) for f in d["factors"].split(",")])
    if fam == "custom":
        return ring_custom(d.get("name", "custom"), int(d["p"]), int(d["m"]),
                           d["structure"], d["unit"], d["basis_names"],
                           d.get("jac_generators"))
    if "name" in d:
        return _ring_from_name(d["name"])
    raise RingError(f"ring spec {d!r} names no known family")


# -- twists ----------------------------------------------------------------


@dataclass(frozen=True)
class TwistData:
    """Automorphism sigma and left sigma-derivation delta, as basis matrices.

    nilpotency_degree_M bounds plain matrix powers of delta and delta';
    mixed_nilpotency_degree bounds mixed words: every monomial in
    delta/sigma/sigma' with at least that many delta factors is zero.
    The mixed degree is the one that makes Laurent commutation sums finite.
    """

    sigma: tuple
    delta: tuple
    sigma_prime: tuple
    delta_prime: tuple
    nilpotency_degree_M: int
    mixed_nilpotency_degree: int
    continuity_exponent_s: int
    mixed_spans: tuple  # U_0 = R, U_k = sigma/sigma'-closure of delta(U_{k-1})

    def apply_sigma(self, ring, v):
        return mat_apply(v, self.sigma, ring.q)

    def apply_delta(self, ring, v):
        return mat_apply(v, self.delta, ring.q)

    def apply_sigma_prime(self, ring, v):
        return mat_apply(v, self.sigma_prime, ring.q)

    def apply_delta_prime(self, ring, v):
        return mat_apply(v, self.delta_prime, ring.q)


class TwistError(ValueError):
    """Invalid twist data."""


def _twist_matrix_from_spec(ring, spec, kind):
    if isinstance(spec, (tuple, list)):
        return tuple(tuple(int(c) % ring.q for c in row) for row in spec)
    if spec == "identity" or (kind == "sigma" and spec is None):
        return mat_identity(ring.basis_size)
    if spec == "zero":
        return tuple(vzero(ring.basis_size) for _ in range(ring.basis_size))
    if spec == "frobenius":
        if ring.family_tag == "finite_field":
            return frobenius_matrix(ring)
        raise TwistError("frobenius twist needs a finite_field ring")
    if isinstance(spec, dict) and spec.get("kind") == "conjugation":
        u = tuple(spec["unit"])
        if not ring.is_unit(u):
            raise TwistError("conjugation element is not a unit")
        u_inv = ring.inverse(u)
        return tuple(ring.mul(ring.mul(u, unit_vec(ring.basis_size, i)), u_inv)
                     for i in range(ring.basis_size))
    raise TwistError(f"cannot interpret twist spec {spec!r}")


def build_twist(ring, sigma_spec, delta_spec="zero"):
    """Validate (sigma, delta) and compute derived data.

    Raises TwistError when sigma is not an automorphism, the derivation
    law fails, or delta is not sigma-nilpotent within the cutoff.
    """
    q, n = ring.q, ring.basis_size
    sigma = _twist_matrix_from_spec(ring, sigma_spec, "sigma")
    if delta_spec == "sigma_minus_id":
        delta = mat_sub(sigma, mat_identity(n), q)
    else:
        delta = _twist_matrix_from_spec(ring, delta_spec, "delta")

    sigma_prime = mat_inverse(sigma, q)
    if sigma_prime is None:
        raise TwistError("sigma is not bijective")
    if mat_apply(ring.unit, sigma, q) != ring.unit:
        raise TwistError("sigma(1) != 1")
    basis = [unit_vec(n, i) for i in range(n)]
    for a in basis:
        sa = mat_apply(a, sigma, q)
        da = mat_apply(a, delta, q)
        for b in basis:
            sb = mat_apply(b, sigma, q)
            if mat_apply(ring.mul(a, b), sigma, q) != ring.mul(sa, sb):
                raise TwistError("sigma is not multiplicative")
            db = mat_apply(b, delta, q)
            want = ring.add(ring.mul(sa, db), ring.mul(da, b))
            if mat_apply(ring.mul(a, b), delta, q) != want:
                raise TwistError("delta violates the left sigma-derivation law")
    # delta' = -delta o sigma^{-1}: apply sigma' first, then delta
    delta_prime = mat_scale(q - 1, mat_mul(sigma_prime, delta, q), q)
    for a in basis:
        for b in basis:
            lhs = mat_apply(ring.mul(a, b), delta_prime, q)
            rhs = ring.add(
                ring.mul(mat_apply(a, delta_prime, q), mat_apply(b, sigma_prime, q)),
                ring.mul(a, mat_apply(b, delta_prime, q)))
            if lhs != rhs:
                raise TwistError("delta' violates the right sigma'-derivation law")

    if ring.apply_map_to_span(sigma, ring.jac) != ring.jac:
        raise TwistError("sigma does not stabilise the Jacobson radical")

    cutoff = ring.basis_size * max(1, ring.jac_nilpotency) * ring.m + 2
    M = _matrix_nilpotency(delta, delta_prime, q, cutoff)
    if M is None:
        raise TwistError(f"delta is not nilpotent within {cutoff} iterations")
    mixed = _mixed_span_chain(ring, sigma, sigma_prime, delta, cutoff)
    if not mixed[-1].is_zero():
        raise TwistError(f"delta is not sigma-nilpotent within {cutoff} iterations")
    s = _continuity_exponent(ring, delta, delta_prime)
    return TwistData(
        sigma=sigma, delta=delta, sigma_prime=sigma_prime, delta_prime=delta_prime,
        nilpotency_degree_M=M, mixed_nilpotency_degree=len(mixed) - 1,
        continuity_exponent_s=s, mixed_spans=tuple(mixed),
    )


def _matrix_nilpotency(delta, delta_prime, q, cutoff):
    n = len(delta)
    powd, powdp = mat_identity(n), mat_identity(n)
    for k in range(cutoff + 1):
        if is_zero_mat(powd) and is_zero_mat(powdp):
            return k
        powd = mat_mul(powd, delta, q)
        powdp = mat_mul(powdp, delta_prime, q)
    return None


def _sigma_closure(ring, sigma, sigma_prime, span):
    cur = span
    while True:
        nxt = linalg.span_sum(
            [cur,
             ring.apply_map_to_span(sigma, cur),
             ring.apply_map_to_span(sigma_prime, cur)],
            ring.q, ring.p, ring.m, ring.basis_size)
        if nxt == cur:
            return cur
        cur = nxt


def _mixed_span_chain(ring, sigma, sigma_prime, delta, cutoff):
    """U_0 = R, U_k = closure under sigma/sigma' of delta(U_{k-1})."""
    chain = [ring.full_span()]
    cur = chain[0]
    for _ in range(cutoff):
        cur = _sigma_closure(ring, sigma, sigma_prime,
                             ring.apply_map_to_span(delta, cur))
        chain.append(cur)
        if cur.is_zero():
            break
    return chain


def _continuity_exponent(ring, delta, delta_prime):
    for s in range(1, ring.jac_nilpotency + 2):
        jac_s = ring.jac_powers[min(s, len(ring.jac_powers) - 1)]
        ok = all(ring.jac.contains(mat_apply(r, delta, ring.q))
                 and ring.jac.contains(mat_apply(r, delta_prime, ring.q))
                 for r in jac_s.rows)
        if ok:
            return s
    return ring.jac_nilpotency + 1


# -- filtrations ------------------------------------------------------------


@dataclass(frozen=True)
class Filtration:
    """Descending chain of sigma/sigma'/delta-stable two-sided ideals.

    levels[0] is the whole ring; the chain is padded so that levels[k]
    is defined for every k up to the stabilisation index.
    """

    levels: tuple
    stabilisation_index: int
    stabilised: bool
    flags: dict = field(default_factory=dict)
    note: str = ""

    def level(self, k):
        if k < len(self.levels):
            return self.levels[k]
        return self.levels[-1]

    def depth(self):
        return len(self.levels) - 1

    def exact_level(self):
        """Smallest k whose level ideal is zero (None if never zero)."""
        for k, sp in enumerate(self.levels):
            if sp.is_zero():
                return k
        return None


class FiltrationError(ValueError):
    """Invalid filtration data."""


def _validate_filtration(ring, twist, levels):
    q = ring.q
    for k, sp in enumerate(levels):
        if k + 1 < len(levels) and not sp.contains_span(levels[k + 1]):
            raise FiltrationError(f"filtration is not descending at level {k}")
        if ring.apply_map_to_span(twist.sigma, sp) != sp:
            raise FiltrationError(f"level {k} is not sigma-stable")
        if ring.apply_map_to_span(twist.sigma_prime, sp) != sp:
            raise FiltrationError(f"level {k} is not sigma'-stable")
        for r in sp.rows:
            if not sp.contains(mat_apply(r, twist.delta, q)):
                raise FiltrationError(f"level {k} is not delta-stable")
    for k in range(len(levels)):
        for l in range(len(levels)):
            kl = min(k + l, len(levels) - 1)
            prod_rows = [ring.mul(x, y) for x in levels[k].rows for y in levels[l].rows]
            if not all(levels[kl].contains(v) for v in prod_rows):
                raise FiltrationError(f"I_{k} * I_{l} is not inside I_{k + l}")


def jac_adic_filtration(ring, twist):
    """The Jac(R)-adic filtration (requires delta(Jac) inside Jac)."""
    levels = list(ring.jac_powers)
    _validate_filtration(ring, twist, levels)
    filt = Filtration(levels=tuple(levels),
                      stabilisation_index=len(levels) - 1, stabilised=True)
    report = check_assumptions(ring, twist, filt)
    filt.flags.update(report.flags)
    return filt


def standard_filtration(ring, twist, depth=None):
    """Levels generated by products of mixed monomial images.

    Level l is the two-sided ideal generated by all products
    U_{m_1} * ... * U_{m_r} over compositions m_1 + ... + m_r = l, where
    U_m is the span of images of monomials in delta/sigma/sigma' with at
    least m delta factors.
    """
    if depth is None:
        depth = ring.basis_size * max(1, ring.jac_nilpotency) * ring.m + 1
    if depth < 1:
        raise FiltrationError("depth must be >= 1")
    U = list(twist.mixed_spans)
    while len(U) <= depth:
        U.append(U[-1])
    # S_0 = R, S_l = sum over j of U_j * S_{l-j}
    S = [ring.full_span()]
    for l in range(1, depth + 1):
        pieces = []
        for j in range(1, l + 1):
            pieces.append(ring.span(
                [ring.mul(x, y) for x in U[j].rows for y in S[l - j].rows]))
        S.append(linalg.span_sum(pieces, ring.q, ring.p, ring.m, ring.basis_size))
    levels = [ring.full_span()]
    for l in range(1, depth + 1):
        levels.append(ring.ideal(S[l].rows))
    stabilised = levels[-1].is_zero() or levels[-1] == levels[-2]
    note = "" if levels[-1].is_zero() else (
        "depth exhausted before reaching zero" if not stabilised else
        f"stabilises at nonzero ideal from level {len(levels) - 2}")
    # trim once stable
    stab = len(levels) - 1
    for k in range(1, len(levels)):
        if levels[k] == levels[k - 1]:
            stab = k - 1
            levels = levels[:k]
            break
    _validate_filtration(ring, twist, levels)
    filt = Filtration(levels=tuple(levels), stabilisation_index=stab,
                      stabilised=levels[-1].is_zero(), note=note)
    report = check_assumptions(ring, twist, filt)
    filt.flags.update(report.flags)
    return filt


def filtration_from_levels(ring, twist, level_gens):
    """Filtration from explicit per-level generator lists (level 0 = R)."""
    levels = [ring.full_span()]
    for gens in level_gens:
        levels.append(ring.ideal(gens))
    _validate_filtration(ring, twist, levels)
    filt = Filtration(levels=tuple(levels),
                      stabilisation_index=len(levels) - 1,
                      stabilised=levels[-1].is_zero())
    report = check_assumptions(ring, twist, filt)
    filt.flags.update(report.flags)
    return filt


@dataclass
class AssumptionReport:
    flags: dict
    witnesses: dict
    notes: tuple


def check_assumptions(ring, twist, filt):
    """Set the (I)/(SI0)/(SI) flags by exhaustive membership tests.

    Openness of the levels is automatic for a finite ring and recorded
    as such rather than checked.
    """
    _validate_filtration(ring, twist, filt.levels)
    flags = {"I": True}
    witnesses = {}
    notes = ("openness automatic: finite rings are discrete",)
    basis = [unit_vec(ring.basis_size, i) for i in range(ring.basis_size)]
    i1 = filt.level(1)
    si0 = True
    for b in basis:
        db = mat_apply(b, twist.delta, ring.q)
        if not i1.contains(db):
            si0 = False
            witnesses["SI0"] = (b, db)
            break
    flags["SI0"] = si0
    si = si0
    if si:
        for k in range(1, len(filt.levels)):
            nxt = filt.level(k + 1)
            for r in filt.levels[k].rows:
                dr = mat_apply(r, twist.delta, ring.q)
                if not nxt.contains(dr):
                    si = False
                    witnesses["SI"] = (r, dr)
                    break
            if not si:
                break
    else:
        si = False
    flags["SI"] = si
    return AssumptionReport(flags=flags, witnesses=witnesses, notes=notes)


# -- quotients ---------------------------------------------------------------


class QuotientData:
    """R/I presented as a ring over Z/p, with projection and a lift section.

    Only quotients killing p*R are supported (always true for R/Jac),
    so the quotient is an F_p-algebra and plain F_p echelon data applies.
    """

    def __init__(self, ring, ideal_span):
        p = ring.p
        n = ring.basis_size
        if ring.m > 1 and not ideal_span.contains(ring.scale(p, ring.one())):
            raise RingError("quotient construction needs p*R inside the ideal")
        rows = [tuple(x % p for x in r) for r in ideal_span.rows]
        self.ring = ring
        self.ideal = ideal_span
        self.mod_p_span = howell(rows, p, p, 1, n)
        pivots = set(self.mod_p_span.pivots)
        self.free_cols = tuple(j for j in range(n) if j not in pivots)
        d = len(self.free_cols)
        if d == 1:
            basis_names = ("1",)
        else:
            basis_names = tuple(ring.basis_names[j] for j in self.free_cols)
        # quotient structure constants via lift-multiply-project
        structure = []
        for i in self.free_cols:
            row = []
            for j in self.free_cols:
                prod = ring.mul(unit_vec(n, i), unit_vec(n, j))
                row.append(self.project(prod))
            structure.append(tuple(row))
        tag = "finite_field" if d == 1 else _quotient_tag(ring)
        self.quotient = CoefficientRing(
            name=f"{ring.name}/rad", p=p, m=1, structure=tuple(structure),
            unit=self.project(ring.one()),
            basis_names=_dedupe_names(basis_names),
            family_tag=tag, jac_generators=[],
            simple_block_idempotents=self._blocks(),
        )
        if tag == "finite_field" and d == 1:
            self.quotient.extra["field"] = {"p": p, "e": 1, "modpoly": (0, 1)}

    def project(self, v):
        res = self.mod_p_span.reduce(tuple(x % self.ring.p for x in v))
        return tuple(res[j] for j in self.free_cols)

    def lift(self, w):
        v = [0] * self.ring.basis_size
        for c, j in zip(w, self.free_cols):
            v[j] = c % self.ring.q
        return tuple(v)

    def project_matrix(self, mat):
        """Image in the quotient of a map that stabilises the ideal."""
        return tuple(self.project(mat_apply(self.lift(unit_vec(len(self.free_cols), i)),
                                            mat, self.ring.q))
                     for i in range(len(self.free_cols)))

    def _blocks(self):
        ring = self.ring
        if ring.jac.is_zero() and ring.simple_block_idempotents is not None:
            return [self.project(e) for e in ring.simple_block_idempotents]
        if ring.family_tag in ("modular_integers", "truncated_polynomial",
                               "group_algebra", "finite_field", "matrix_ring"):
            # local or simple: the quotient is a single simple block
            return [self.project(ring.one())]
        if ring.family_tag == "product":
            out = []
            total = ring.basis_size
            for fi, f in enumerate(ring.extra["product"]["factors"]):
                off = ring.extra["product"]["offsets"][fi]
                sub = QuotientData(f, f.jac)
                blocks = sub.quotient.simple_block_idempotents or []
                for e in blocks:
                    vec = [0] * total
                    for k, c in enumerate(sub.lift(e)):
                        vec[off + k] = c
                    out.append(self.project(tuple(vec)))
            return out
        return None


def _dedupe_names(names):
    seen = {}
    out = []
    for nm in names:
        if nm in seen:
            seen[nm] += 1
            out.append(f"{nm}q{seen[nm]}")
        else:
            seen[nm] = 0
            out.append(nm)
    return tuple(out)


def _quotient_tag(ring):
    if ring.family_tag in ("product", "matrix_ring"):
        return ring.family_tag
    if ring.family_tag == "finite_field":
        return "finite_field"
    return "custom"


def quotient_by_radical(ring):
    """R -> R/Jac(R) with projection/lift and block data."""
    return QuotientData(ring, ring.jac)
