"""Slow reference multiplication by single-step rewriting.

This path never touches the mixed monomial operators: it only uses the
defining relation t*r = sigma(r)*t + delta(r) and its rearrangement
t^-1*r = sigma'(r)*t^-1 + t^-1*delta'(r)*t^-1, applied one t at a time.
It exists as an independent cross-check for the production multiplication.
"""

from .linalg import is_zero_vec, mat_apply
from .series import SkewSeries


def _map_coeffs(ctx, table, mat):
    q = ctx.ring.q
    out = {}
    for e, v in table.items():
        w = mat_apply(v, mat, q)
        if not is_zero_vec(w):
            out[e] = w
    return out


def _shift(table, j):
    return {e + j: v for e, v in table.items()}


def _accumulate(ctx, acc, table):
    q = ctx.ring.q
    for e, v in table.items():
        cur = acc.get(e)
        w = v if cur is None else tuple((a + b) % q for a, b in zip(cur, v))
        if is_zero_vec(w):
            acc.pop(e, None)
        else:
            acc[e] = w


def t_times(ctx, table):
    """t * (sum v_e t^e) via one application of the defining relation."""
    out = {}
    _accumulate(ctx, out, _shift(_map_coeffs(ctx, table, ctx.twist.sigma), 1))
    _accumulate(ctx, out, _map_coeffs(ctx, table, ctx.twist.delta))
    return out


def t_inverse_times(ctx, table, guard=None):
    """t^-1 * (sum v_e t^e) by iterating the rearranged relation.

    Each round moves one delta' inside, so the loop stops after the plain
    nilpotency degree of delta'."""
    if guard is None:
        guard = ctx.twist.nilpotency_degree_M + 1
    out = {}
    work = dict(table)
    rounds = 0
    while work:
        if rounds > guard:
            raise RuntimeError("t^-1 rewriting did not terminate")
        _accumulate(ctx, out, _shift(_map_coeffs(ctx, work, ctx.twist.sigma_prime), -1))
        work = _shift(_map_coeffs(ctx, work, ctx.twist.delta_prime), -1)
        rounds += 1
    return out


def t_power_times(ctx, table, j):
    """t^j * (sum v_e t^e), one t at a time."""
    cur = dict(table)
    if j > 0:
        for _ in range(j):
            cur = t_times(ctx, cur)
    else:
        for _ in range(-j):
            cur = t_inverse_times(ctx, cur)
    return cur


def reference_mul(a: SkewSeries, b: SkewSeries) -> SkewSeries:
    """Product of two exact left-form elements by brute-force rewriting."""
    if a.form != "left" or b.form != "left":
        raise ValueError("the rewriting reference works on left-form elements")
    if not (a.is_exact() and b.is_exact()):
        raise ValueError("the rewriting reference expects exact elements")
    ctx = a.ctx
    ring = ctx.ring
    level = min(a.level, b.level)
    acc = {}
    for j, aj in a.coeffs.items():
        moved = t_power_times(ctx, b.coeffs, j)
        for e, v in moved.items():
            w = ring.mul(aj, v)
            cur = acc.get(e)
            neww = w if cur is None else tuple(
                (x + y) % ring.q for x, y in zip(cur, w))
            if is_zero_vec(neww):
                acc.pop(e, None)
            else:
                acc[e] = neww
    return SkewSeries(ctx, "left", acc, level, float("inf"))
