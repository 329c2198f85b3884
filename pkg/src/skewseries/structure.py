"""Semisimple structure theory feeding the localisation machinery.

Covers the orbit decomposition of a semisimple ring under its twist, the
factorisation of matrix-ring automorphisms into an inner part and an
entrywise field automorphism, twist transport along units, and Weierstrass
preparation over division-ring (here: finite field) coefficients.
"""

from dataclasses import dataclass

from .linalg import mat_apply, nullspace, unit_vec
from .rings import CoefficientRing, frobenius_matrix
from .series import SeriesRing, SkewSeries, SeriesError, invert_unit_series, mul


class StructureError(ValueError):
    """Structure-theory preconditions violated."""


# -- cyclic decomposition -----------------------------------------------------


@dataclass
class CyclicBlock:
    """One orbit of simple factors under the twist.

    idempotents are listed in cycle order (sigma maps each onto the next);
    phi0 is the composite automorphism sigma^n restricted to the first
    component, given as a matrix on the ambient ring.
    """

    idempotents: tuple
    length: int
    phi0: tuple
    component_span: object

    def flatten(self, ring, sigma, x):
        """Map x in the block to a tuple of first-component values."""
        out = []
        n = self.length
        q = ring.q
        for c, e in enumerate(self.idempotents):
            piece = ring.mul(e, x)
            power = (n - c) % n
            for _ in range(power):
                piece = mat_apply(piece, sigma, q)
            out.append(piece)
        return tuple(out)

    def unflatten(self, ring, sigma_prime, parts):
        q = ring.q
        n = self.length
        acc = ring.zero()
        for c, y in enumerate(parts):
            power = (n - c) % n
            piece = y
            for _ in range(power):
                piece = mat_apply(piece, sigma_prime, q)
            acc = ring.add(acc, piece)
        return acc


@dataclass
class CyclicDecomposition:
    ring: CoefficientRing
    sigma: tuple
    sigma_prime: tuple
    blocks: tuple

    def report_lines(self):
        lines = [f"ring={self.ring.name} blocks={len(self.blocks)}"]
        for i, blk in enumerate(self.blocks):
            idem = "; ".join(self.ring.show(e) for e in blk.idempotents)
            lines.append(f"block={i} length={blk.length} idempotents=[{idem}]")
        return lines


def decompose_cyclic(ring, sigma, sigma_prime=None) -> CyclicDecomposition:
    """Group the simple-block idempotents of a semisimple ring into
    twist orbits, with the flattening data for each orbit."""
    if not ring.jac.is_zero():
        raise StructureError(f"{ring.name} is not semisimple")
    idems = ring.simple_block_idempotents
    if idems is None:
        raise StructureError(
            f"simple-block data unavailable for {ring.name} (hand-entered ring)")
    if sigma_prime is None:
        from .linalg import mat_inverse
        sigma_prime = mat_inverse(sigma, ring.q)
        if sigma_prime is None:
            raise StructureError("sigma is not invertible")
    _validate_idempotents(ring, idems)
    perm = []
    for e in idems:
        img = mat_apply(e, sigma, ring.q)
        try:
            perm.append(idems.index(img))
        except ValueError:
            raise StructureError(
                f"twist does not permute the given idempotents: sigma({ring.show(e)})"
                f" = {ring.show(img)}") from None
    seen = set()
    blocks = []
    for start in range(len(idems)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        cur = perm[start]
        while cur != start:
            cycle.append(cur)
            seen.add(cur)
            cur = perm[cur]
        n = len(cycle)
        q = ring.q
        phi0 = sigma
        for _ in range(n - 1):
            phi0 = tuple(mat_apply(row, sigma, q) for row in phi0)
        comp_span = ring.span([ring.mul(idems[cycle[0]], unit_vec(ring.basis_size, i))
                               for i in range(ring.basis_size)])
        blocks.append(CyclicBlock(
            idempotents=tuple(idems[c] for c in cycle), length=n,
            phi0=phi0, component_span=comp_span))
    dec = CyclicDecomposition(ring=ring, sigma=sigma, sigma_prime=sigma_prime,
                              blocks=tuple(blocks))
    _validate_decomposition(dec)
    return dec


def _validate_idempotents(ring, idems):
    total = ring.zero()
    for i, e in enumerate(idems):
        if ring.mul(e, e) != e:
            raise StructureError(f"{ring.show(e)} is not idempotent")
        for i2, f in enumerate(idems):
            if i2 != i and not _is_zero(ring.mul(e, f)):
                raise StructureError("idempotents are not orthogonal")
        for b in range(ring.basis_size):
            eb = unit_vec(ring.basis_size, b)
            if ring.mul(e, eb) != ring.mul(eb, e):
                raise StructureError(f"{ring.show(e)} is not central")
        total = ring.add(total, e)
    if total != ring.one():
        raise StructureError("idempotents do not sum to 1")


def _is_zero(v):
    return all(x == 0 for x in v)


def _validate_decomposition(dec):
    ring = dec.ring
    q = ring.q
    for blk in dec.blocks:
        n = blk.length
        # flatten(sigma^n(unflatten(parts))) must act as phi0 on each slot
        for b in range(ring.basis_size):
            x = ring.mul(blk.idempotents[0], unit_vec(ring.basis_size, b))
            parts = tuple(x if c == 0 else ring.zero() for c in range(n))
            y = blk.unflatten(ring, dec.sigma_prime, parts)
            img = y
            for _ in range(n):
                img = mat_apply(img, dec.sigma, q)
            back = blk.flatten(ring, dec.sigma, img)
            want = tuple(mat_apply(x, blk.phi0, q) if c == 0 else ring.zero()
                         for c in range(n))
            if back != want:
                raise StructureError("cycle composite does not act as phi0")


# -- inner factorisation over matrix rings -----------------------------------


@dataclass
class InnerFactorisation:
    """sigma = Int(C) o (entrywise gamma) on a matrix ring over F_q."""

    C: tuple
    C_inv: tuple
    gamma_power: int
    gamma_matrix: tuple


def _matrix_entrywise_map(ring, field_map):
    """The ring-basis matrix applying field_map to every matrix entry."""
    info = ring.extra["matrix"]
    fld = info["field"]
    idx = info["index"]
    e = fld.basis_size
    rows = [None] * ring.basis_size
    for (r, c, k), b in idx.items():
        img_field = mat_apply(unit_vec(e, k), field_map, fld.q)
        vec = [0] * ring.basis_size
        for k2, coeff in enumerate(img_field):
            vec[idx[(r, c, k2)]] = coeff
        rows[b] = tuple(vec)
    return tuple(rows)


def factor_matrix_automorphism(ring, sigma) -> InnerFactorisation:
    """Split an automorphism of M_n(F_q) as Int(C) composed with an
    entrywise field automorphism.

    Iterates gamma over the cyclic automorphism group of F_q and solves
    the linear intertwiner system sigma(E)*S = S*gamma(E) over matrix
    units E; for the right gamma every nonzero solution is invertible.
    C is canonicalised so its first nonzero entry in row-major order is 1.
    """
    if ring.family_tag != "matrix_ring":
        raise StructureError("inner factorisation needs a matrix_ring")
    info = ring.extra["matrix"]
    fld = info["field"]
    e = fld.basis_size
    d = ring.basis_size
    frob = frobenius_matrix(fld) if e > 1 else ((1,),)
    for g in range(e):
        field_map = _field_power(fld, frob, g)
        mg = _matrix_entrywise_map(ring, field_map)
        rows = []
        for s_idx in range(d):
            S = unit_vec(d, s_idx)
            eqn = []
            for b in range(d):
                E = unit_vec(d, b)
                lhs = ring.mul(mat_apply(E, sigma, ring.q), S)
                rhs = ring.mul(S, mat_apply(E, mg, ring.q))
                eqn.extend(ring.sub(lhs, rhs))
            rows.append(tuple(eqn))
        kernel = nullspace(rows, ring.p)
        for cand in kernel:
            if ring.is_unit(cand):
                C = _canonicalise(ring, cand)
                C_inv = ring.inverse(C)
                _verify_inner(ring, sigma, C, C_inv, mg)
                return InnerFactorisation(C=C, C_inv=C_inv, gamma_power=g,
                                          gamma_matrix=field_map)
    raise StructureError("no inner factorisation found: sigma is not an "
                         "automorphism of the matrix ring")


def _field_power(fld, frob, g):
    mat = tuple(unit_vec(fld.basis_size, i) for i in range(fld.basis_size))
    from .linalg import mat_mul
    for _ in range(g):
        mat = mat_mul(mat, frob, fld.q)
    return mat


def _canonicalise(ring, C):
    info = ring.extra["matrix"]
    fld = info["field"]
    idx = info["index"]
    n = info["n"]
    e = fld.basis_size
    for r in range(n):
        for c in range(n):
            entry = tuple(C[idx[(r, c, k)]] for k in range(e))
            if any(entry):
                scalar_inv = fld.inverse(entry)
                scal_vec = [0] * ring.basis_size
                for i in range(n):
                    for k in range(e):
                        scal_vec[idx[(i, i, k)]] = scalar_inv[k]
                return ring.mul(tuple(scal_vec), C)
    raise StructureError("zero candidate for C")


def _verify_inner(ring, sigma, C, C_inv, mg):
    for b in range(ring.basis_size):
        E = unit_vec(ring.basis_size, b)
        want = mat_apply(E, sigma, ring.q)
        got = ring.mul(ring.mul(C, mat_apply(E, mg, ring.q)), C_inv)
        if want != got:
            raise StructureError("intertwiner solution fails verification")


def matrix_entries_of(ring, vec):
    """Matrix-of-field-elements view of a matrix_ring element."""
    info = ring.extra["matrix"]
    fld = info["field"]
    idx = info["index"]
    n = info["n"]
    e = fld.basis_size
    return tuple(tuple(tuple(vec[idx[(r, c, k)]] for k in range(e))
                       for c in range(n)) for r in range(n))


# -- twist transport along inner units ----------------------------------------


def transport_inner(a: SkewSeries, u, target_ctx: SeriesRing, side="pre",
                    check_twists=True) -> SkewSeries:
    """Move a series across the twist change by the inner unit u.

    side 'pre':  source twist Int(u) o sigma, image of t is u*t.
    side 'post': source twist sigma o Int(u), image of t is sigma(u)*t.
    Power series only (non-negative support), pure sigma twists."""
    ring = target_ctx.ring
    if isinstance(u, SkewSeries):
        raise StructureError("u must be a coefficient, not a series")
    if not ring.is_unit(u):
        raise StructureError(f"{ring.show(u)} is not a unit")
    if a.coeffs and a.order() < 0:
        raise StructureError("transport is defined on power series elements")
    if check_twists:
        _check_transport_twists(a.ctx, target_ctx, u, side)
    if side == "pre":
        u_eff = u
    elif side == "post":
        u_eff = target_ctx.twist.apply_sigma(ring, u)
    else:
        raise StructureError(f"unknown side {side!r}")
    ut = target_ctx.series({1: u_eff}, level=a.level)
    out = target_ctx.zero(level=a.level, nbound=a.nbound)
    power = target_ctx.one(level=a.level)
    top = max(a.coeffs) if a.coeffs else -1
    for n in range(0, top + 1):
        v = a.coeffs.get(n)
        if v is not None:
            out = out + power.scale_left(v)
        if n < top:
            power = mul(power, ut)
    return out


def _check_transport_twists(src_ctx, target_ctx, u, side):
    from .linalg import is_zero_mat
    ring = target_ctx.ring
    q = ring.q
    if not (is_zero_mat(src_ctx.twist.delta) and is_zero_mat(target_ctx.twist.delta)):
        raise StructureError("twist transport is defined for pure sigma twists")
    u_inv = ring.inverse(u)
    for b in range(ring.basis_size):
        r = unit_vec(ring.basis_size, b)
        src = mat_apply(r, src_ctx.twist.sigma, q)
        tgt = mat_apply(r, target_ctx.twist.sigma, q)
        if side == "pre":
            want = ring.mul(ring.mul(u, tgt), u_inv)
        else:
            want = mat_apply(ring.mul(ring.mul(u, r), u_inv),
                             target_ctx.twist.sigma, q)
        if src != want:
            raise StructureError(
                "source and target twists are not related by Int(u)")


# -- Weierstrass preparation ---------------------------------------------------


def weierstrass(f: SkewSeries):
    """f = u * t^n with n = order(f) and u a unit, over a finite field.

    Returns (u, n); u is determined mod t^(N - n) when f is known mod t^N.
    """
    ctx = f.ctx
    if ctx.ring.family_tag != "finite_field":
        raise StructureError(
            "Weierstrass preparation needs finite field coefficients")
    if f.is_zero():
        raise SeriesError("order of the zero element is undetermined "
                          "at the working precision")
    n = f.order()
    u = f.shift(-n)
    if not ctx.ring.is_unit(u.coefficient(0)):
        raise StructureError("leading coefficient is not a unit")
    return u, n


def unit_cofactor_inverse(u: SkewSeries, nbound):
    """Inverse of the Weierstrass unit, to the requested t-adic bound."""
    return invert_unit_series(u, nbound)
