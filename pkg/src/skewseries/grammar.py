"""The element grammar shared by the CLI and test fixtures.

    element := [sign] term (sign term)*
    term    := coeff '*' tpow | coeff | tpow
    tpow    := 't' ['^' int]
    coeff   := '(' combo ')' | int [['*'] name] | name
    combo   := [sign] part (sign part)*     part := int [['*'] name] | name

Whitespace is insignificant.  Basis names are the ring's basis_names; the
name "1" is written as a bare integer.  The printer emits a canonical form
(ascending exponents, coefficients reduced into [0, q)) and parses back to
exactly the same coefficient table.
"""

import re

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|([()+\-*^]))")


class GrammarError(ValueError):
    """Unparseable element text."""


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise GrammarError(f"bad character at {text[pos:]!r}")
            break
        if m.group(1) is not None:
            out.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            out.append(("name", m.group(2)))
        else:
            out.append(("sym", m.group(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, ring, tokens):
        self.ring = ring
        self.toks = tokens
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expect_sym(self, s):
        kind, val = self.take()
        if kind != "sym" or val != s:
            raise GrammarError(f"expected {s!r}, found {val!r}")

    def parse_element(self):
        coeffs = {}
        sign = 1
        kind, val = self.peek()
        if kind == "sym" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        while True:
            exp, vec = self.parse_term()
            if sign < 0:
                vec = self.ring.neg(vec)
            cur = coeffs.get(exp)
            coeffs[exp] = vec if cur is None else self.ring.add(cur, vec)
            kind, val = self.peek()
            if kind is None:
                break
            if kind == "sym" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            else:
                raise GrammarError(f"unexpected token {val!r} between terms")
        return coeffs

    def parse_term(self):
        kind, val = self.peek()
        if kind == "name" and val == "t":
            return self.parse_tpow(), self.ring.one()
        vec = self.parse_coeff()
        kind, val = self.peek()
        if kind == "sym" and val == "*":
            save = self.pos
            self.take()
            kind2, val2 = self.peek()
            if kind2 == "name" and val2 == "t":
                return self.parse_tpow(), vec
            self.pos = save
        return 0, vec

    def parse_tpow(self):
        kind, val = self.take()
        if kind != "name" or val != "t":
            raise GrammarError("expected t")
        kind, val = self.peek()
        if kind == "sym" and val == "^":
            self.take()
            return self.parse_int()
        return 1

    def parse_int(self):
        sign = 1
        kind, val = self.peek()
        if kind == "sym" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        kind, val = self.take()
        if kind != "int":
            raise GrammarError(f"expected an integer, found {val!r}")
        return sign * val

    def parse_coeff(self):
        kind, val = self.peek()
        if kind == "sym" and val == "(":
            self.take()
            vec = self.parse_combo()
            self.expect_sym(")")
            return vec
        return self.parse_part()

    def parse_combo(self):
        sign = 1
        kind, val = self.peek()
        if kind == "sym" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.ring.zero()
        while True:
            vec = self.parse_part()
            if sign < 0:
                vec = self.ring.neg(vec)
            acc = self.ring.add(acc, vec)
            kind, val = self.peek()
            if kind == "sym" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            else:
                return acc

    def parse_part(self):
        kind, val = self.take()
        if kind == "int":
            c = val
            kind2, val2 = self.peek()
            if kind2 == "sym" and val2 == "*":
                save = self.pos
                self.take()
                kind3, val3 = self.peek()
                if kind3 == "name" and val3 != "t":
                    self.take()
                    return self.ring.scale(c, self._basis(val3))
                self.pos = save
                return self.ring.from_int(c)
            if kind2 == "name" and val2 != "t":
                self.take()
                return self.ring.scale(c, self._basis(val2))
            return self.ring.from_int(c)
        if kind == "name" and val != "t":
            return self._basis(val)
        raise GrammarError(f"expected a coefficient, found {val!r}")

    def _basis(self, nm):
        try:
            i = self.ring.basis_names.index(nm)
        except ValueError:
            raise GrammarError(
                f"unknown basis name {nm!r} in {self.ring.name} "
                f"(names: {', '.join(self.ring.basis_names)})") from None
        n = self.ring.basis_size
        return tuple(1 if j == i else 0 for j in range(n))


def parse_element(ring, text):
    """Parse element text into a {exponent: coordinate vector} table."""
    toks = _tokenize(text)
    if not toks:
        raise GrammarError("empty element text")
    parser = _Parser(ring, toks)
    coeffs = parser.parse_element()
    return {e: v for e, v in coeffs.items() if not _is_zero(v)}


def _is_zero(v):
    return all(x == 0 for x in v)


def _coeff_parts(ring, vec):
    parts = []
    for c, nm in zip(vec, ring.basis_names):
        if not c:
            continue
        if nm == "1":
            parts.append(str(c))
        elif c == 1:
            parts.append(nm)
        else:
            parts.append(f"{c}{nm}")
    return parts


def print_element(ring, coeffs):
    """Canonical text form; parse_element(print_element(x)) == x."""
    if not coeffs:
        return "0"
    terms = []
    for e in sorted(coeffs):
        vec = coeffs[e]
        parts = _coeff_parts(ring, vec)
        if not parts:
            continue
        cs = "+".join(parts)
        if e == 0:
            terms.append(cs)
        elif len(parts) > 1:
            terms.append(f"({cs})*t^{e}")
        else:
            terms.append(f"{cs}*t^{e}")
    return " + ".join(terms) if terms else "0"
