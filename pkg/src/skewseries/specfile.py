"""Plain-text ring specification files.

Sections and keys (a `#` starts a comment, matrices are semicolon-
separated rows of integers mod p^m):

    [ring]
    name = Z/4[x]/(x^2)          # shorthand, or family = ... with params
    [sigma]
    kind = matrix                 # matrix | identity | frobenius | conjugation
    matrix = 1,0;0,3
    unit = 1+h                    # for kind = conjugation
    [delta]
    kind = sigma_minus_id         # zero | sigma_minus_id | matrix
    [filtration]
    kind = jac_adic               # jac_adic | standard
    depth = 6                     # optional, standard filtration only
    [group]                       # group-algebra mode: builds R, sigma, delta
    p = 2
    m = 2
    generators = (1 2 3 4)        # semicolon-separated cycle strings
    action = (1 4 3 2)            # images of the generators, same order
"""

from .rings import (
    build_ring,
    build_twist,
    jac_adic_filtration,
    standard_filtration,
)
from .series import SeriesRing


class SpecFileError(ValueError):
    """Malformed specification file."""


def parse_spec_text(text):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections.setdefault(current, {})
            continue
        if "=" not in line or current is None:
            raise SpecFileError(f"line {lineno}: expected 'key = value' "
                                f"inside a section, got {raw!r}")
        key, val = line.split("=", 1)
        sections[current][key.strip().lower()] = val.strip()
    return sections


def load_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec_text(fh.read())


def _parse_matrix(text):
    return tuple(tuple(int(x) for x in row.split(",")) for row in text.split(";"))


def context_from_spec(sections) -> SeriesRing:
    """Build the series ring described by parsed sections."""
    if "group" in sections:
        gd = group_datum_from_spec(sections)
        ring, twist = gd.ring, gd.twist
        filt = _filtration_from_spec(sections, ring, twist, default=gd.filt)
        return SeriesRing(ring, twist, filt)
    ring_sec = sections.get("ring")
    if ring_sec is None:
        raise SpecFileError("missing [ring] (or [group]) section")
    if "name" in ring_sec:
        ring = build_ring(ring_sec["name"])
    else:
        ring = build_ring(dict(ring_sec))
    sigma_spec = _twist_spec(sections.get("sigma", {}), ring, "identity")
    delta_spec = _twist_spec(sections.get("delta", {}), ring, "zero")
    twist = build_twist(ring, sigma_spec, delta_spec)
    filt = _filtration_from_spec(sections, ring, twist, default=None)
    if filt is None:
        filt = jac_adic_filtration(ring, twist)
    return SeriesRing(ring, twist, filt)


def _twist_spec(sec, ring, default_kind):
    kind = sec.get("kind", default_kind)
    if kind == "matrix":
        if "matrix" not in sec:
            raise SpecFileError("kind = matrix needs a matrix = ... entry")
        return _parse_matrix(sec["matrix"])
    if kind in ("identity", "zero", "frobenius", "sigma_minus_id"):
        return kind
    if kind == "conjugation":
        from .grammar import parse_element
        table = parse_element(ring, sec["unit"])
        if set(table) - {0}:
            raise SpecFileError("conjugation unit must be a plain coefficient")
        return {"kind": "conjugation", "unit": table.get(0, ring.zero())}
    raise SpecFileError(f"unknown twist kind {kind!r}")


def _filtration_from_spec(sections, ring, twist, default):
    sec = sections.get("filtration")
    if sec is None:
        return default if default is not None else jac_adic_filtration(ring, twist)
    kind = sec.get("kind", "jac_adic")
    if kind == "jac_adic":
        return jac_adic_filtration(ring, twist)
    if kind == "standard":
        depth = int(sec["depth"]) if "depth" in sec else None
        return standard_filtration(ring, twist, depth)
    raise SpecFileError(f"unknown filtration kind {kind!r}")


def group_datum_from_spec(sections):
    from .iwasawa import build_iwasawa
    sec = sections.get("group")
    if sec is None:
        raise SpecFileError("missing [group] section")
    p = int(sec["p"])
    m = int(sec["m"])
    gens = [g.strip() for g in sec.get("generators", "").split(";") if g.strip()]
    action = [a.strip() for a in sec.get("action", "").split(";") if a.strip()]
    degree = int(sec["degree"]) if "degree" in sec else None
    return build_iwasawa(gens, action, p=p, m=m, degree=degree)


def load_context(path) -> SeriesRing:
    return context_from_spec(load_spec(path))


def load_group_datum(path):
    return group_datum_from_spec(load_spec(path))
