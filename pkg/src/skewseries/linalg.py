"""Exact linear algebra over Z/p^m.

Vectors are tuples of ints in [0, q), matrices are tuples of row tuples.
A linear map f is stored row-wise: row i is f(e_i), so applying f to a
vector v is the row-vector product v @ M.

Submodules of (Z/q)^n are kept in Howell normal form, which is the
canonical echelon shape over Z/p^m: membership, equality and canonical
coset representatives all reduce to greedy pivot elimination.
"""

from itertools import product


def vzero(n):
    return (0,) * n


def vadd(u, v, q):
    return tuple((a + b) % q for a, b in zip(u, v))


def vsub(u, v, q):
    return tuple((a - b) % q for a, b in zip(u, v))


def vneg(u, q):
    return tuple((-a) % q for a in u)


def vscale(c, u, q):
    c %= q
    return tuple((c * a) % q for a in u)


def is_zero_vec(u):
    return all(a == 0 for a in u)


def unit_vec(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


def mat_identity(n):
    return tuple(unit_vec(n, i) for i in range(n))


def mat_apply(v, mat, q):
    """Row-vector product v @ mat."""
    n = len(mat[0]) if mat else len(v)
    out = [0] * n
    for vi, row in zip(v, mat):
        if vi:
            for j, rj in enumerate(row):
                if rj:
                    out[j] = (out[j] + vi * rj) % q
    return tuple(out)


def mat_mul(a, b, q):
    """Matrix of (apply a, then b): rows of the composite map."""
    return tuple(mat_apply(row, b, q) for row in a)


def mat_add(a, b, q):
    return tuple(vadd(ra, rb, q) for ra, rb in zip(a, b))


def mat_sub(a, b, q):
    return tuple(vsub(ra, rb, q) for ra, rb in zip(a, b))


def mat_scale(c, a, q):
    return tuple(vscale(c, row, q) for row in a)


def mat_pow(a, k, q):
    n = len(a)
    out = mat_identity(n)
    for _ in range(k):
        out = mat_mul(out, a, q)
    return out


def is_zero_mat(a):
    return all(is_zero_vec(row) for row in a)


def mat_inverse(mat, q):
    """Inverse of a square matrix over Z/q, or None if not invertible.

    Over the local ring Z/p^m a pivot works iff the entry is a unit
    (coprime to q), so plain Gauss-Jordan with unit pivots decides
    invertibility.
    """
    n = len(mat)
    work = [list(row) + list(unit_vec(n, i)) for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if _gcd(work[r][col], q) == 1:
                piv = r
                break
        if piv is None:
            return None
        work[col], work[piv] = work[piv], work[col]
        inv = pow(work[col][col], -1, q)
        work[col] = [(inv * x) % q for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [(x - f * y) % q for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def p_valuation(x, p, m):
    """Largest v with p^v | x, for x in [1, p^m)."""
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if v >= m:
            break
    return v


class Span:
    """A submodule of (Z/q)^n in Howell normal form.

    Immutable; equality of spans is equality of the stored rows.
    """

    __slots__ = ("rows", "pivots", "q", "p", "m", "n")

    def __init__(self, rows, q, p, m, n):
        self.rows = rows
        self.q = q
        self.p = p
        self.m = m
        self.n = n
        self.pivots = tuple(_leading(r) for r in rows)

    def __eq__(self, other):
        return (
            isinstance(other, Span)
            and self.q == other.q
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.q, self.n, self.rows))

    def __repr__(self):
        return f"Span({list(self.rows)!r} mod {self.q})"

    def is_zero(self):
        return not self.rows

    def contains(self, v):
        return is_zero_vec(self.reduce(v))

    def contains_span(self, other):
        return all(self.contains(r) for r in other.rows)

    def reduce(self, v):
        """Canonical coset representative of v modulo this span."""
        v = list(a % self.q for a in v)
        for row, col in zip(self.rows, self.pivots):
            piv = row[col]
            f = v[col] // piv
            if f:
                for j in range(col, self.n):
                    v[j] = (v[j] - f * row[j]) % self.q
        return tuple(v)

    def size_log_p(self):
        """log_p of the number of elements of the span."""
        total = 0
        for row, col in zip(self.rows, self.pivots):
            total += self.m - p_valuation(row[col], self.p, self.m)
        return total

    def elements(self, cap=None):
        """Enumerate all elements (the span is a finite group)."""
        ranges = []
        for row, col in zip(self.rows, self.pivots):
            order = self.q // _gcd(row[col], self.q)
            ranges.append(order)
        count = 1
        for r in ranges:
            count *= r
        if cap is not None and count > cap:
            raise ValueError(f"span has {count} elements, cap is {cap}")
        for combo in product(*[range(r) for r in ranges]):
            v = vzero(self.n)
            for c, row in zip(combo, self.rows):
                if c:
                    v = vadd(v, vscale(c, row, self.q), self.q)
            yield v


def _leading(row):
    for j, x in enumerate(row):
        if x:
            return j
    return None


def howell(rows, q, p, m, n):
    """Howell normal form of the row span of `rows` inside (Z/q)^n."""
    work = []
    for r in rows:
        r = [x % q for x in r]
        if any(r):
            work.append(r)
    result = []
    for col in range(n):
        cand = [r for r in work if r[col]]
        if not cand:
            continue
        piv_row = min(cand, key=lambda r: p_valuation(r[col], p, m))
        work.remove(piv_row)
        v = p_valuation(piv_row[col], p, m)
        pv = p**v
        u_inv = pow(piv_row[col] // pv, -1, q)
        piv_row = [(u_inv * x) % q for x in piv_row]
        for r in work:
            if r[col]:
                f = r[col] // pv
                for j in range(col, n):
                    r[j] = (r[j] - f * piv_row[j]) % q
        work = [r for r in work if any(r)]
        if v > 0:
            ann = [((q // pv) * x) % q for x in piv_row]
            if any(ann):
                work.append(ann)
        result.append(piv_row)
    # reduce entries above each pivot modulo the pivot value
    for idx, row in enumerate(result):
        col = _leading(row)
        pv = row[col]
        for prev in result[:idx]:
            f = prev[col] // pv
            if f:
                for j in range(col, n):
                    prev[j] = (prev[j] - f * row[j]) % q
    return Span(tuple(tuple(r) for r in result), q, p, m, n)


def span_sum(spans, q, p, m, n):
    rows = []
    for s in spans:
        rows.extend(s.rows)
    return howell(rows, q, p, m, n)


def express(gens, target, q, p, m, n):
    """Coefficients c with sum(c_i * gens_i) == target over Z/q, or None.

    Runs Howell elimination while tracking how each work row combines the
    original generators, then reduces the target greedily.
    """
    ngen = len(gens)
    work = []
    for i, g in enumerate(gens):
        row = [x % q for x in g]
        work.append((row, [1 if j == i else 0 for j in range(ngen)]))
    result = []
    for col in range(n):
        cand = [wr for wr in work if wr[0][col]]
        if not cand:
            continue
        piv = min(cand, key=lambda wr: p_valuation(wr[0][col], p, m))
        work.remove(piv)
        row, combo = piv
        v = p_valuation(row[col], p, m)
        pv = p**v
        u_inv = pow(row[col] // pv, -1, q)
        row = [(u_inv * x) % q for x in row]
        combo = [(u_inv * x) % q for x in combo]
        for r, c in work:
            if r[col]:
                f = r[col] // pv
                for j in range(col, n):
                    r[j] = (r[j] - f * row[j]) % q
                for j in range(ngen):
                    c[j] = (c[j] - f * combo[j]) % q
        work = [(r, c) for r, c in work if any(r)]
        if v > 0:
            ann_row = [((q // pv) * x) % q for x in row]
            ann_combo = [((q // pv) * x) % q for x in combo]
            if any(ann_row):
                work.append((ann_row, ann_combo))
        result.append((row, combo, col, pv))
    tgt = [x % q for x in target]
    out = [0] * ngen
    for row, combo, col, pv in result:
        if tgt[col]:
            if tgt[col] % pv:
                return None
            f = tgt[col] // pv
            for j in range(col, n):
                tgt[j] = (tgt[j] - f * row[j]) % q
            for j in range(ngen):
                out[j] = (out[j] + f * combo[j]) % q
    if any(tgt):
        return None
    return tuple(out)


def nullspace(rows, q):
    """Basis of {x : sum x_i rows_i = 0} over a prime modulus q."""
    nrow = len(rows)
    if nrow == 0:
        return ()
    n = len(rows[0])
    work = [(list(r), [1 if j == i else 0 for j in range(nrow)]) for i, r in enumerate(rows)]
    kernel = []
    reduced = []
    for col in range(n):
        piv = None
        for wr in work:
            if wr[0][col] % q:
                piv = wr
                break
        if piv is None:
            continue
        work.remove(piv)
        row, combo = piv
        inv = pow(row[col] % q, -1, q)
        row = [(inv * x) % q for x in row]
        combo = [(inv * x) % q for x in combo]
        for r, c in work:
            if r[col] % q:
                f = r[col] % q
                for j in range(n):
                    r[j] = (r[j] - f * row[j]) % q
                for j in range(nrow):
                    c[j] = (c[j] - f * combo[j]) % q
        reduced.append((row, combo))
    for r, c in work:
        if not any(x % q for x in r):
            kernel.append(tuple(x % q for x in c))
    return tuple(kernel)
