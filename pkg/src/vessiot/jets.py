"""Jet-space structure.

Contexts declaring coordinates, total (formal) derivatives, prolongation
of vector fields, the Spencer operator, brackets, and exterior calculus
with RationalExpr coefficients.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import symcore
from .errors import OrderOverflow, UnknownVariable
from .parser import parse_expression
from .symcore import (
    Polynomial,
    RationalExpr,
    RewriteRule,
    VariableId,
    mono_make,
)


@dataclass(frozen=True)
class SpecialSpec:
    """A non-rational function symbol: name, base independent, name of the
    derivative expression, optional rewrite rule 'pattern -> replacement'."""

    name: str
    base: str
    derivative: str
    rewrite: str | None = None


class JetContext:
    """Declaration of independents, dependents (with base sets),
    parameters and special symbols, plus a jet-order cap."""

    def __init__(self, independents, dependents, parameters=(), specials=(),
                 max_order=4):
        self.independents = list(independents)
        self.dependents = []
        self.bases = {}
        for dep in dependents:
            if isinstance(dep, str):
                name, base = dep, tuple(self.independents)
            else:
                name, base = dep[0], tuple(dep[1])
            for b in base:
                if b not in self.independents:
                    raise UnknownVariable(f"base variable {b!r} of {name!r}")
            self.dependents.append(name)
            self.bases[name] = base
        self.parameters = list(parameters)
        self.max_order = max_order
        self._vars = {}
        names = (
            self.independents + self.dependents + self.parameters
            + [s.name if isinstance(s, SpecialSpec) else s[0] for s in specials]
        )
        if len(set(names)) != len(names):
            raise ValueError("duplicate declared names")
        for i, n in enumerate(self.independents):
            self._vars[n] = VariableId("independent", n, (0, i))
        for i, n in enumerate(self.parameters):
            self._vars[n] = VariableId("parameter", n, (1, i))
        self.specials = []
        for i, s in enumerate(specials):
            if not isinstance(s, SpecialSpec):
                s = SpecialSpec(*s)
            self.specials.append(s)
            self._vars[s.name] = VariableId("special", s.name, (2, i))
        self._jets = {}
        self._chains = None
        self._rules = None

    # -- variables ----------------------------------------------------
    def var(self, name):
        v = self._vars.get(name)
        if v is None:
            if name in self.bases:
                return self.jet(name, (0,) * len(self.independents))
            raise UnknownVariable(name)
        return v

    def has_name(self, name):
        return name in self._vars or name in self.bases

    def jet(self, dep, mu):
        mu = tuple(mu)
        key = (dep, mu)
        v = self._jets.get(key)
        if v is not None:
            return v
        if dep not in self.bases:
            raise UnknownVariable(f"dependent {dep!r}")
        if len(mu) != len(self.independents):
            raise ValueError("multi-index length mismatch")
        order = sum(mu)
        if order > self.max_order:
            raise OrderOverflow(f"{dep} jet of order {order} > {self.max_order}")
        base = self.bases[dep]
        for x, e in zip(self.independents, mu):
            if e and x not in base:
                raise UnknownVariable(
                    f"{dep} does not depend on {x}; jet {mu} undefined"
                )
        k = self.dependents.index(dep)
        dirs = []
        for x, e in zip(self.independents, mu):
            dirs.extend([x] * e)
        name = dep if order == 0 else f"{dep}[{','.join(dirs)}]"
        v = VariableId("jet", name, (3, k, order, mu))
        self._jets[key] = v
        return v

    def jet_by_dirs(self, dep, dirs):
        mu = [0] * len(self.independents)
        for d in dirs:
            if d not in self.independents:
                raise UnknownVariable(f"direction {d!r}")
            mu[self.independents.index(d)] += 1
        return self.jet(dep, mu)

    def jet_info(self, v):
        """(dependent name, multi-index) of a jet VariableId."""
        if v.kind != "jet":
            raise ValueError(f"{v} is not a jet variable")
        return self.dependents[v.key[1]], v.key[3]

    def multi_indices(self, order, base=None):
        """All multi-indices of exact |mu| = order supported on base."""
        n = len(self.independents)
        allowed = [
            i for i, x in enumerate(self.independents)
            if base is None or x in base
        ]
        out = []
        for combo in itertools.combinations_with_replacement(allowed, order):
            mu = [0] * n
            for i in combo:
                mu[i] += 1
            out.append(tuple(mu))
        return out

    def jets_up_to(self, q, deps=None):
        """All jet VariableIds of order <= q for the given dependents."""
        deps = self.dependents if deps is None else list(deps)
        out = []
        for dep in deps:
            for o in range(q + 1):
                for mu in self.multi_indices(o, self.bases[dep]):
                    out.append(self.jet(dep, mu))
        return out

    def fiber_jet_count(self, q, deps=None):
        return len(self.jets_up_to(q, deps))

    # -- expressions --------------------------------------------------
    def expr(self, text, extra=None):
        """Parse an expression string against this context.

        ``extra`` maps names to RationalExpr definitions usable in the
        text."""

        def resolver(name, directions, pos):
            if directions is None:
                if extra and name in extra:
                    return extra[name]
                if name in self.bases:
                    return RationalExpr.var(
                        self.jet(name, (0,) * len(self.independents))
                    )
                v = self._vars.get(name)
                if v is None:
                    raise UnknownVariable(name)
                return RationalExpr.var(v)
            return RationalExpr.var(self.jet_by_dirs(name, directions))

        return parse_expression(text, resolver)

    # -- rewrite machinery for specials -------------------------------
    def _ensure_special_tables(self):
        if self._chains is not None:
            return
        chains = {}
        rules = []
        for s in self.specials:
            sv = self._vars[s.name]
            dv = self.expr(s.derivative)
            chains.setdefault(s.base, []).append((sv, dv))
            if s.rewrite:
                lhs, rhs = s.rewrite.split("->")
                pat_expr = self.expr(lhs.strip())
                if not pat_expr.is_polynomial() or len(pat_expr.num.terms) != 1:
                    raise ValueError("rewrite pattern must be a single monomial")
                (mono, coef), = pat_expr.num.terms.items()
                repl = self.expr(rhs.strip())
                if not repl.is_polynomial():
                    raise ValueError("rewrite replacement must be polynomial")
                scale = Fraction(1) / (coef / pat_expr.den.constant_value())
                rules.append(RewriteRule(mono, repl.num * (scale / repl.den.constant_value())))
        self._chains = chains
        self._rules = rules

    @property
    def rules(self):
        self._ensure_special_tables()
        return list(self._rules)

    def reduce(self, e):
        return symcore.reduce_expr(e, self.rules)

    # -- calculus -----------------------------------------------------
    def partial(self, e, v):
        """Partial derivative; applies the special-symbol chain rule when
        v is an independent carrying specials."""
        if isinstance(v, str):
            v = self.var(v)
        self._ensure_special_tables()
        chain = self._chains.get(v.name, ()) if v.kind == "independent" else ()
        return symcore.partial(e, v, chain)

    def total_derivative(self, e, i):
        """Formal derivative d_i: partial plus jet-bump terms."""
        if isinstance(i, str):
            xi = i
        else:
            xi = self.independents[i]
        v = self.var(xi)
        e = symcore.normalize(e)
        out = self.partial(e, v)
        idx = self.independents.index(xi)
        for w in sorted(e.variables()):
            if w.kind != "jet":
                continue
            dep, mu = self.jet_info(w)
            if xi not in self.bases[dep]:
                continue  # the section does not depend on x_i
            g = symcore.coordinate_partial(e, w)
            if g.is_zero():
                continue
            bumped = list(mu)
            bumped[idx] += 1
            out = out + g * RationalExpr.var(self.jet(dep, bumped))
        return out

    def total_derivative_multi(self, e, nu):
        for i, times in enumerate(nu):
            for _ in range(times):
                e = self.total_derivative(e, i)
        return e


class VectorField:
    """Finite mapping coordinate VariableId -> RationalExpr."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = {
            v: symcore.normalize(c)
            for v, c in components.items()
            if not symcore.normalize(c).is_zero()
        }

    def component(self, v):
        return self.components.get(v, symcore.ZERO)

    def coordinates(self):
        return set(self.components)

    def apply(self, e):
        """Directional derivative of an expression (coordinate partials)."""
        out = symcore.ZERO
        for v, c in self.components.items():
            g = symcore.coordinate_partial(e, v)
            if not g.is_zero():
                out = out + c * g
        return out

    def __add__(self, other):
        comp = dict(self.components)
        for v, c in other.components.items():
            comp[v] = comp.get(v, symcore.ZERO) + c
        return VectorField(comp)

    def scale(self, c):
        return VectorField({v: c * e for v, e in self.components.items()})

    def __neg__(self):
        return self.scale(RationalExpr.const(-1))

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return not self.components

    def __repr__(self):
        if not self.components:
            return "0"
        return " + ".join(
            f"({c})@{v.name}" for v, c in sorted(self.components.items())
        )


def bracket(xi, eta):
    """Lie bracket [xi, eta] of vector fields on a coordinate chart."""
    comp = {}
    coords = xi.coordinates() | eta.coordinates()
    for v in coords:
        c = xi.apply(eta.component(v)) - eta.apply(xi.component(v))
        if not c.is_zero():
            comp[v] = c
    return VectorField(comp)


def prolong_field(ctx, theta, q):
    """Prolongation of an infinitesimal transformation to order q.

    ``theta`` may have components on the independents (xi^i) and on the
    order-0 jets (eta^k); components are functions of those order-0
    variables (plus parameters).  The lift uses the contact recursion

        eta^{k,mu+1_i} = d_i eta^{k,mu} - sum_j (d_i xi^j) y^k_{mu+1_j},

    which for a vertical field reduces to d_mu applied to eta^k.
    """
    if q > ctx.max_order:
        raise OrderOverflow(f"prolongation order {q} > max_order {ctx.max_order}")
    n = len(ctx.independents)
    xi = {}
    comp = {}
    for v, c in theta.components.items():
        for w in c.variables():
            if w.kind == "jet" and w.key[2] > 0:
                raise ValueError("prolong_field needs order-0 component data")
        if v.kind == "independent":
            xi[ctx.independents.index(v.name)] = c
            comp[v] = c
        elif v.kind == "jet" and v.key[2] == 0:
            comp[v] = c
        else:
            raise ValueError(f"cannot prolong component on {v.name}")
    dxi = {
        (i, j): ctx.total_derivative(xi[j], i) for j in xi for i in range(n)
    }
    for dep in ctx.dependents:
        base = ctx.bases[dep]
        zero_mu = (0,) * n
        eta = {zero_mu: comp.get(ctx.jet(dep, zero_mu), symcore.ZERO)}
        for order in range(q):
            for mu in ctx.multi_indices(order, base):
                if mu not in eta:
                    continue
                for i, x in enumerate(ctx.independents):
                    if x not in base:
                        continue
                    bumped = list(mu)
                    bumped[i] += 1
                    bumped = tuple(bumped)
                    if bumped in eta:
                        continue
                    val = ctx.total_derivative(eta[mu], i)
                    for j, xj in xi.items():
                        if ctx.independents[j] not in base:
                            continue
                        nb = list(mu)
                        nb[j] += 1
                        val = val - dxi[(i, j)] * RationalExpr.var(
                            ctx.jet(dep, nb)
                        )
                    eta[bumped] = val
        for mu, val in eta.items():
            if not val.is_zero():
                comp[ctx.jet(dep, mu)] = val
    return VectorField(comp)


@dataclass
class JetSection:
    """Values f^k_mu, complete for |mu| <= order, as expressions in the
    independents (and possibly jets of auxiliary symbols)."""

    ctx: JetContext
    order: int
    values: dict  # (dep name, mu) -> RationalExpr

    def value(self, dep, mu):
        return self.values[(dep, tuple(mu))]


def holonomic_section(ctx, components, order, deps=None):
    """j_order of an explicit map: all jets by repeated differentiation."""
    deps = list(components) if deps is None else deps
    values = {}
    for dep in deps:
        base = ctx.bases[dep]
        values[(dep, (0,) * len(ctx.independents))] = symcore.normalize(
            components[dep]
        )
        for o in range(order):
            for mu in ctx.multi_indices(o, base):
                cur = values[(dep, mu)]
                for i, x in enumerate(ctx.independents):
                    if x not in base:
                        continue
                    bumped = list(mu)
                    bumped[i] += 1
                    bumped = tuple(bumped)
                    if (dep, bumped) not in values:
                        values[(dep, bumped)] = ctx.total_derivative(cur, i)
    return JetSection(ctx, order, values)


def spencer(ctx, f):
    """Spencer operator: components (k, mu with |mu| <= order-1, i) ->
    d_i f^k_mu - f^k_{mu+1_i}; all zero exactly on holonomic sections."""
    out = {}
    for (dep, mu), val in f.values.items():
        if sum(mu) >= f.order:
            continue
        base = ctx.bases[dep]
        for i, x in enumerate(ctx.independents):
            if x not in base:
                continue
            bumped = list(mu)
            bumped[i] += 1
            out[(dep, mu, x)] = ctx.total_derivative(val, i) - f.value(dep, bumped)
    return out


class DiffForm:
    """Exterior form over an explicit ordered coordinate list.

    ``terms`` maps strictly increasing index tuples (positions into the
    coordinate list) to RationalExpr coefficients; the empty tuple keys a
    grade-0 form.
    """

    __slots__ = ("ctx", "coords", "grade", "terms")

    def __init__(self, ctx, coords, grade, terms):
        self.ctx = ctx
        self.coords = tuple(coords)
        self.grade = grade
        self.terms = {}
        for idx, c in terms.items():
            c = symcore.normalize(c)
            if len(idx) != grade or list(idx) != sorted(set(idx)):
                raise ValueError(f"bad index tuple {idx} for grade {grade}")
            if not c.is_zero():
                self.terms[tuple(idx)] = c

    @staticmethod
    def function(ctx, coords, e):
        return DiffForm(ctx, coords, 0, {(): e})

    @staticmethod
    def d_coord(ctx, coords, name):
        coords = tuple(coords)
        pos = [c.name if hasattr(c, "name") else c for c in coords].index(name)
        return DiffForm(ctx, coords, 1, {(pos,): symcore.ONE})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.coords != other.coords or self.grade != other.grade:
            raise ValueError("form mismatch")
        t = dict(self.terms)
        for idx, c in other.terms.items():
            t[idx] = t.get(idx, symcore.ZERO) + c
        return DiffForm(self.ctx, self.coords, self.grade, t)

    def __neg__(self):
        return DiffForm(
            self.ctx, self.coords, self.grade,
            {i: -c for i, c in self.terms.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, e):
        return DiffForm(
            self.ctx, self.coords, self.grade,
            {i: e * c for i, c in self.terms.items()},
        )

    def coefficient(self, idx):
        return self.terms.get(tuple(idx), symcore.ZERO)

    def __repr__(self):
        if not self.terms:
            return "0"
        names = [c.name if hasattr(c, "name") else c for c in self.coords]
        bits = []
        for idx in sorted(self.terms):
            basis = "^".join(f"d{names[i]}" for i in idx) or "1"
            bits.append(f"({self.terms[idx]}) {basis}")
        return " + ".join(bits)


def _merge_sign(a, b):
    """Merge two strictly increasing tuples; return (merged, sign) or
    (None, 0) when they overlap."""
    out = list(a)
    sign = 1
    for x in b:
        if x in out:
            return None, 0
        pos = len(out)
        while pos > 0 and out[pos - 1] > x:
            pos -= 1
        sign *= (-1) ** (len(out) - pos)
        out.insert(pos, x)
    return tuple(out), sign


def wedge(phi, psi):
    if phi.coords != psi.coords:
        raise ValueError("form mismatch")
    g = phi.grade + psi.grade
    if g > len(phi.coords):
        return DiffForm(phi.ctx, phi.coords, g, {})
    terms = {}
    for ia, ca in phi.terms.items():
        for ib, cb in psi.terms.items():
            idx, sign = _merge_sign(ia, ib)
            if idx is None:
                continue
            add = ca * cb * sign
            terms[idx] = terms.get(idx, symcore.ZERO) + add
    return DiffForm(phi.ctx, phi.coords, g, terms)


def _coord_derivative(ctx, e, coord):
    if coord.kind == "independent":
        return ctx.total_derivative(e, coord.name)
    return symcore.coordinate_partial(e, coord)


def exterior_derivative(phi):
    ctx = phi.ctx
    terms = {}
    for idx, c in phi.terms.items():
        for pos, coord in enumerate(phi.coords):
            dc = _coord_derivative(ctx, c, coord)
            if dc.is_zero():
                continue
            merged, sign = _merge_sign((pos,), idx)
            if merged is None:
                continue
            terms[merged] = terms.get(merged, symcore.ZERO) + dc * sign
    return DiffForm(ctx, phi.coords, phi.grade + 1, terms)


def interior_product(theta, phi):
    """Contraction i(theta) phi."""
    if phi.grade == 0:
        return DiffForm(phi.ctx, phi.coords, 0, {})
    comp = {}
    for pos, coord in enumerate(phi.coords):
        c = theta.component(coord)
        if not c.is_zero():
            comp[pos] = c
    terms = {}
    for idx, c in phi.terms.items():
        for j, pos in enumerate(idx):
            v = comp.get(pos)
            if v is None:
                continue
            rest = idx[:j] + idx[j + 1:]
            add = c * v * ((-1) ** j)
            terms[rest] = terms.get(rest, symcore.ZERO) + add
    return DiffForm(phi.ctx, phi.coords, phi.grade - 1, terms)


def lie_derivative_form(theta, phi):
    """Cartan's formula L(theta) = i(theta) d + d i(theta)."""
    a = interior_product(theta, exterior_derivative(phi))
    if phi.grade == 0:
        return a  # i(theta) of a function is zero
    b = exterior_derivative(interior_product(theta, phi))
    return a + b
