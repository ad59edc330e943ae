"""Exact scalar and expression arithmetic.

Sparse multivariate polynomials over Fraction coefficients, canonical
rational functions, substitution, partial differentiation and
rewrite-relation reduction.  Everything is immutable and every
RationalExpr is kept in a unique normal form, so structural equality is
algebraic equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from .errors import CyclicBinding, DenominatorVanishes, DivisionByZero

KIND_RANK = {"independent": 0, "parameter": 1, "special": 2, "jet": 3}


@dataclass(frozen=True)
class VariableId:
    """A declared coordinate.

    ``key`` is a context-global sort key: kind rank first, then the
    declaration index (independents, parameters, specials) or
    (dependent index, |mu|, mu) for jets.
    """

    kind: str
    name: str
    key: tuple

    def __lt__(self, other):
        return (self.key, self.name) < (other.key, other.name)

    def __repr__(self):
        return self.name


# A monomial is a tuple of (VariableId, exponent) pairs, sorted by the
# variable order, exponents > 0.  The empty tuple is the unit monomial.
UNIT = ()


def mono_make(pairs):
    items = [(v, e) for v, e in pairs if e]
    items.sort(key=lambda p: (p[0].key, p[0].name))
    return tuple(items)


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = {}
    for v, e in a:
        d[v] = e
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return mono_make(d.items())


def mono_div(a, b):
    """a / b, or None when b does not divide a."""
    d = dict(a)
    for v, e in b:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r == 0:
            d.pop(v, None)
        else:
            d[v] = r
    return mono_make(d.items())


def mono_gcd(a, b):
    db = dict(b)
    out = []
    for v, e in a:
        if v in db:
            out.append((v, min(e, db[v])))
    return mono_make(out)


def mono_degree(a):
    return sum(e for _, e in a)


def mono_pow(a, n):
    return tuple((v, e * n) for v, e in a)


def mono_cmp(a, b):
    """Graded reverse-lexicographic comparison; returns -1, 0 or 1.

    Degrees first; on ties scan variables ascending in the global order
    and the first exponent difference decides with reversed sign.
    """
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    ia, ib = 0, 0
    while ia < len(a) and ib < len(b):
        va, ea = a[ia]
        vb, eb = b[ib]
        ka, kb = (va.key, va.name), (vb.key, vb.name)
        if ka == kb:
            if ea != eb:
                return 1 if ea < eb else -1
            ia += 1
            ib += 1
        elif ka < kb:
            return -1  # a carries the smaller variable: reversed tie-break
        else:
            return 1
    if ia < len(a):
        return -1
    if ib < len(b):
        return 1
    return 0


_MONO_KEY = cmp_to_key(mono_cmp)


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for m, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    c0 = t.get(m)
                    c = c0 + c if c0 is not None else Fraction(c)
                    if c:
                        t[m] = c
                    else:
                        del t[m]
        self.terms = t

    # -- constructors -------------------------------------------------
    @staticmethod
    def const(c):
        c = Fraction(c)
        return Polynomial({UNIT: c}) if c else Polynomial()

    @staticmethod
    def var(v, e=1):
        return Polynomial({((v, e),): Fraction(1)})

    # -- predicates ---------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and UNIT in self.terms)

    def constant_value(self):
        return self.terms.get(UNIT, Fraction(0))

    def variables(self):
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def total_degree(self):
        return max((mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, v):
        d = 0
        for m in self.terms:
            for w, e in m:
                if w == v and e > d:
                    d = e
        return d

    def leading_monomial(self):
        return max(self.terms, key=_MONO_KEY)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, Fraction(0)) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        p = Polynomial.__new__(Polynomial)
        p.terms = t
        return p

    def __neg__(self):
        p = Polynomial.__new__(Polynomial)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return Polynomial()
            p = Polynomial.__new__(Polynomial)
            p.terms = {m: c * other for m, c in self.terms.items()}
            return p
        t = {}
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                s = t.get(m, Fraction(0)) + ca * cb
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        p = Polynomial.__new__(Polynomial)
        p.terms = t
        return p

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power on Polynomial")
        out = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus -----------------------------------------------------
    def partial(self, v):
        t = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(v)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            m2 = mono_make(d.items())
            s = t.get(m2, Fraction(0)) + c * e
            if s:
                t[m2] = s
            else:
                t.pop(m2, None)
        p = Polynomial.__new__(Polynomial)
        p.terms = t
        return p

    def eval(self, point):
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                val *= Fraction(point[v]) ** e
            total += val
        return total

    # -- display ------------------------------------------------------
    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_MONO_KEY, reverse=True):
            c = self.terms[m]
            body = "*".join(
                v.name if e == 1 else f"{v.name}^{e}" for v, e in m
            )
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _int_content_and_scale(p):
    """Return (scaled polynomial with integer coprime coefficients, scale)
    such that p = scale * scaled, scale a positive Fraction (sign kept in
    the polynomial)."""
    if p.is_zero():
        return p, Fraction(1)
    den_lcm = 1
    for c in p.terms.values():
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    num_gcd = 0
    for c in p.terms.values():
        num_gcd = math.gcd(num_gcd, abs(c.numerator * (den_lcm // c.denominator)))
    scale = Fraction(num_gcd, den_lcm)
    q = Polynomial.__new__(Polynomial)
    q.terms = {m: c / scale for m, c in p.terms.items()}
    return q, scale


def poly_divexact(a, b):
    """Exact division a / b, or None when b does not divide a."""
    if b.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if a.is_zero():
        return Polynomial()
    if b.is_constant():
        return a * (Fraction(1) / b.constant_value())
    out = {}
    rem = a
    lb = b.leading_monomial()
    cb = b.terms[lb]
    while not rem.is_zero():
        la = rem.leading_monomial()
        q = mono_div(la, lb)
        if q is None:
            return None
        coef = rem.terms[la] / cb
        out[q] = coef
        rem = rem - Polynomial({q: coef}) * b
    return Polynomial(out)


def _mono_content(p):
    it = iter(p.terms)
    g = next(it)
    for m in it:
        if not g:
            break
        g = mono_gcd(g, m)
    return g


def _as_univariate(p, v):
    """View p as a univariate polynomial in v: dict degree -> Polynomial."""
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        e = d.pop(v, 0)
        rest = mono_make(d.items())
        out.setdefault(e, {})[rest] = out.setdefault(e, {}).get(rest, Fraction(0)) + c
    return {e: Polynomial(t) for e, t in out.items()}


def _from_univariate(coeffs, v):
    total = Polynomial()
    for e, c in coeffs.items():
        total = total + c * (Polynomial.var(v, e) if e else Polynomial.const(1))
    return total


def _poly_content_in(p, v):
    """gcd of the coefficients of p seen as univariate in v."""
    coeffs = list(_as_univariate(p, v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    return g


def _primitive_in(p, v):
    cont = _poly_content_in(p, v)
    prim = poly_divexact(p, cont)
    return cont, prim


def _pseudo_rem(a, b, v):
    """Canonical pseudo-remainder prem(a, b) in v: the remainder of
    lc(b)^(deg a - deg b + 1) * a under division by b."""
    da, db = a.degree_in(v), b.degree_in(v)
    ub = _as_univariate(b, v)
    lcb = ub[db]
    rem = a
    steps = 0
    while not rem.is_zero():
        dr = rem.degree_in(v)
        if dr < db:
            break
        ur = _as_univariate(rem, v)
        lcr = ur[dr]
        shift = Polynomial.var(v, dr - db) if dr > db else Polynomial.const(1)
        rem = rem * lcb - b * lcr * shift
        steps += 1
    for _ in range(da - db + 1 - steps):
        rem = rem * lcb
    return rem


def _norm_primitive(p):
    """Integer-primitive form with positive leading coefficient."""
    if p.is_zero():
        return p
    q, _ = _int_content_and_scale(p)
    if q.leading_coefficient() < 0:
        q = -q
    return q


def poly_gcd(a, b):
    """gcd of two polynomials, integer-primitive with positive leading
    coefficient (1 for coprime inputs)."""
    if a.is_zero():
        return _norm_primitive(b)
    if b.is_zero():
        return _norm_primitive(a)
    ma, mb = _mono_content(a), _mono_content(b)
    mg = mono_gcd(ma, mb)
    a = poly_divexact(a, Polynomial({ma: Fraction(1)}))
    b = poly_divexact(b, Polynomial({mb: Fraction(1)}))
    base = Polynomial({mg: Fraction(1)})
    if a.is_constant() or b.is_constant():
        return _norm_primitive(base)
    # cheap trial divisions first
    if poly_divexact(a, b) is not None:
        return _norm_primitive(base * _norm_primitive(b))
    if poly_divexact(b, a) is not None:
        return _norm_primitive(base * _norm_primitive(a))
    common = a.variables() & b.variables()
    if not common:
        return _norm_primitive(base)
    v = max(common)
    ca, pa = _primitive_in(a, v)
    cb, pb = _primitive_in(b, v)
    cg = poly_gcd(ca, cb)
    if pa.degree_in(v) < pb.degree_in(v):
        pa, pb = pb, pa
    # subresultant polynomial remainder sequence: exact divisions by
    # g*h^delta keep the coefficient growth polynomial, so the content
    # extraction only happens once at the end
    gc = Polynomial.const(1)
    h = Polynomial.const(1)
    while True:
        delta = pa.degree_in(v) - pb.degree_in(v)
        r = _pseudo_rem(pa, pb, v)
        if r.is_zero():
            g = pb
            break
        if r.degree_in(v) == 0:
            g = Polynomial.const(1)
            break
        q = poly_divexact(r, gc * _pow_poly(h, delta))
        if q is None:
            # fall back to the primitive sequence for this step
            _, q = _primitive_in(r, v)
            gc = Polynomial.const(1)
            h = Polynomial.const(1)
            pa, pb = pb, q
            continue
        pa, pb = pb, q
        gc = _as_univariate(pa, v)[pa.degree_in(v)]
        if delta == 1:
            h = gc
        elif delta > 1:
            nh = poly_divexact(_pow_poly(gc, delta), _pow_poly(h, delta - 1))
            h = nh if nh is not None else gc
    if not g.is_constant():
        _, g = _primitive_in(g, v)
    return _norm_primitive(base * cg * g)


def _pow_poly(p, n):
    out = Polynomial.const(1)
    for _ in range(n):
        out = out * p
    return out


class RationalExpr:
    """Canonical ratio of two polynomials.

    Normal form: gcd(num, den) = 1, all coefficients integers with no
    common integer factor across num and den jointly, and den's leading
    coefficient positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalized=False):
        if isinstance(num, (int, Fraction)):
            num = Polynomial.const(num)
        if den is None:
            den = Polynomial.const(1)
        elif isinstance(den, (int, Fraction)):
            den = Polynomial.const(den)
        if _normalized:
            self.num = num
            self.den = den
            return
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            self.num = Polynomial()
            self.den = Polynomial.const(1)
            return
        g = poly_gcd(num, den)
        if not (g.is_constant() and g.constant_value() == 1):
            num = poly_divexact(num, g)
            den = poly_divexact(den, g)
        # joint integer normalization
        nq, ns = _int_content_and_scale(num)
        dq, ds = _int_content_and_scale(den)
        ratio = ns / ds  # num/den = ratio * nq/dq
        nq = nq * ratio.numerator
        dq = dq * ratio.denominator
        # clear the shared integer factor reintroduced by the scaling
        gi = 0
        for c in nq.terms.values():
            gi = math.gcd(gi, abs(c.numerator))
        for c in dq.terms.values():
            gi = math.gcd(gi, abs(c.numerator))
        if gi > 1:
            nq = nq * Fraction(1, gi)
            dq = dq * Fraction(1, gi)
        if dq.leading_coefficient() < 0:
            nq, dq = -nq, -dq
        self.num = nq
        self.den = dq

    # -- helpers ------------------------------------------------------
    @staticmethod
    def const(c):
        return RationalExpr(Polynomial.const(c))

    @staticmethod
    def var(v):
        return RationalExpr(Polynomial.var(v))

    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalExpr):
            return x
        if isinstance(x, Polynomial):
            return RationalExpr(x)
        if isinstance(x, (int, Fraction)):
            return RationalExpr.const(x)
        return NotImplemented

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self):
        return self.den.is_constant()

    def variables(self):
        return self.num.variables() | self.den.variables()

    def complexity(self):
        return len(self.num.terms) + len(self.den.terms)

    # -- field operations ---------------------------------------------
    def __add__(self, other):
        other = RationalExpr._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalExpr(self.num + other.num, self.den)
        return RationalExpr(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = RationalExpr._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RationalExpr._coerce(other) - self

    def __mul__(self, other):
        other = RationalExpr._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalExpr._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalExpr._coerce(other) / self

    def __pow__(self, n):
        if n == 0:
            return RationalExpr.const(1)
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("zero to a negative power")
            return RationalExpr(self.den ** (-n), self.num ** (-n))
        return RationalExpr(self.num**n, self.den**n, _normalized=True)

    def __eq__(self, other):
        other = RationalExpr._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return repr(self.num)
        ns = repr(self.num)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        ds = repr(self.den)
        if len(self.den.terms) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"


ZERO = RationalExpr.const(0)
ONE = RationalExpr.const(1)


@dataclass(frozen=True)
class RewriteRule:
    """Replace every monomial divisible by ``pattern`` using ``replacement``.

    The replacement's monomials must precede the pattern in the term
    order (restricted to the rule's variables) so rewriting terminates.
    """

    pattern: tuple  # a monomial
    replacement: Polynomial

    def __post_init__(self):
        for m in self.replacement.terms:
            proj = mono_make(
                (v, e) for v, e in m if any(v == w for w, _ in self.pattern)
            )
            if mono_cmp(proj, self.pattern) >= 0:
                raise ValueError("rewrite rule does not terminate")


def poly_reduce(p, rules):
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for m in list(p.terms):
                q = mono_div(m, rule.pattern)
                if q is None:
                    continue
                c = p.terms[m]
                p = p - Polynomial({m: c}) + Polynomial({q: c}) * rule.replacement
                changed = True
                break
            if changed:
                break
    return p


# ---------------------------------------------------------------------------
# symcore operations on RationalExpr
# ---------------------------------------------------------------------------


def normalize(e):
    """Expressions built with the overloaded operators are always
    canonical; this re-coerces scalars and asserts the invariant."""
    return RationalExpr._coerce(e)


def coordinate_partial(e, v):
    """Partial derivative treating every VariableId as an independent
    coordinate (no chain rule for specials)."""
    e = normalize(e)
    dn = e.num.partial(v)
    dd = e.den.partial(v)
    if dd.is_zero():
        return RationalExpr(dn, e.den)
    return RationalExpr(dn * e.den - e.num * dd, e.den * e.den)


def partial(e, v, chain=()):
    """Partial derivative with respect to v.

    ``chain`` lists pairs (s, ds) of special-symbol variables based on v
    together with their derivative expressions, e.g. (ch, sh) for
    d/dx ch(x) = sh(x).
    """
    out = coordinate_partial(e, v)
    for s, ds in chain:
        g = coordinate_partial(e, s)
        if not g.is_zero():
            out = out + g * ds
    return out


def _check_acyclic(bindings):
    graph = {}
    for v, repl in bindings.items():
        repl = normalize(repl)
        tgt = repl.variables()
        if v in tgt:
            if repl == RationalExpr.var(v):
                continue  # identity binding, allowed
            raise CyclicBinding(f"{v} appears in its own replacement")
        graph[v] = tgt & set(bindings)
    seen = {}

    def visit(v, stack):
        if v in stack:
            raise CyclicBinding(" -> ".join(w.name for w in stack) + f" -> {v.name}")
        if seen.get(v):
            return
        stack.append(v)
        for w in graph.get(v, ()):
            visit(w, stack)
        stack.pop()
        seen[v] = True

    for v in graph:
        visit(v, [])


def _poly_substitute(p, bindings):
    out = ZERO
    for m, c in p.terms.items():
        term = RationalExpr.const(c)
        for v, e in m:
            repl = bindings.get(v)
            if repl is None:
                term = term * RationalExpr(Polynomial.var(v, e))
            else:
                term = term * (normalize(repl) ** e)
        out = out + term
    return out


def substitute(e, bindings):
    """Simultaneous substitution of variables by expressions."""
    e = normalize(e)
    bindings = {
        v: normalize(r)
        for v, r in bindings.items()
        if normalize(r) != RationalExpr.var(v)
    }
    if not bindings:
        return e
    _check_acyclic(bindings)
    n = _poly_substitute(e.num, bindings)
    d = _poly_substitute(e.den, bindings)
    if d.is_zero():
        raise DivisionByZero("denominator vanished under substitution")
    return n / d


def reduce_expr(e, rules):
    """Exhaustive rewrite of num and den, then renormalization."""
    e = normalize(e)
    if not rules:
        return e
    n = poly_reduce(e.num, rules)
    d = poly_reduce(e.den, rules)
    if d.is_zero():
        raise DivisionByZero("denominator reduced to zero")
    return RationalExpr(n, d)


def eval_point(e, point):
    e = normalize(e)
    dv = e.den.eval(point)
    if dv == 0:
        raise DenominatorVanishes("denominator vanishes at the point")
    return e.num.eval(point) / dv


def is_zero(e):
    return normalize(e).is_zero()
