"""Differential-polynomial ideal scaffolding at verification scale:
prolongation of generator sets, syzygy checks, and explicit certificates
for radical-power membership.

Membership claims are certificate-based only: every positive answer comes
with an explicit combination that re-normalizes to the claimed element.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import CertificateSearchExceeded
from .report import CheckReport
from .symcore import RationalExpr, normalize


@dataclass
class DiffPolySet:
    """A finite set of differential-polynomial generators."""

    ctx: object
    generators: list

    def __post_init__(self):
        gens = []
        for g in self.generators:
            g = normalize(g)
            if g.is_zero():
                raise ValueError("zero generator")
            if not g.is_polynomial():
                raise ValueError("generators must be polynomial")
            gens.append(g)
        self.generators = gens


def _canonical_key(e):
    num = tuple(sorted(e.num.terms.items()))
    den = tuple(sorted(e.den.terms.items()))
    return num, den


def prolong_gens(S, r):
    """All formal derivatives d_nu(a), |nu| <= r, of the generators,
    deduplicated by canonical form."""
    if r == 0:
        return S
    ctx = S.ctx
    seen = {}
    frontier = list(S.generators)
    for g in frontier:
        seen.setdefault(_canonical_key(g), g)
    for _ in range(r):
        nxt = []
        for g in frontier:
            for x in ctx.independents:
                dg = normalize(ctx.total_derivative(g, x))
                key = _canonical_key(dg)
                if key not in seen:
                    seen[key] = dg
                    nxt.append(dg)
        frontier = nxt
    return DiffPolySet(ctx, list(seen.values()))


def syzygy_check(combination, name="syzygy"):
    """OK iff the given combination of generator derivatives normalizes
    to zero; otherwise the normal form is reported as witness."""
    res = normalize(combination)
    if res.is_zero():
        return CheckReport(name=name, status="OK")
    return CheckReport(name=name, status="FAIL", witness=res)


def radical_power_membership(ctx, a, direction, r):
    """Certificate that (da)^(2r-1) lies in the differential ideal
    generated by a^r, for the single derivation d along ``direction``.

    Returns (report, certificate) where certificate maps a derivative
    order o to the coefficient of d^o(a^r) in the verified combination.
    The construction iterates the identity
    a^(r-1)*da = (1/r)*d(a^r) by deriving, multiplying by da and removing
    the d^2a-term, which lowers the exponent of a by one each round.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if r > 4:
        raise CertificateSearchExceeded(
            "radical certificates are constructed only up to r = 4"
        )
    a = normalize(a)
    d = lambda e: ctx.total_derivative(e, direction)
    da, dda = d(a), d(d(a))
    cert = {1: RationalExpr.const(1) / r}
    for k in range(1, r):
        new = {}
        for o, c in cert.items():
            main = (da * d(c) - (2 * k - 1) * dda * c) / (r - k)
            if not main.is_zero():
                new[o] = new.get(o, RationalExpr.const(0)) + main
            new[o + 1] = new.get(o + 1, RationalExpr.const(0)) + (
                da * c / (r - k)
            )
        cert = {o: normalize(c) for o, c in new.items() if not c.is_zero()}
    power = a ** r
    rebuilt = RationalExpr.const(0)
    derivs = {0: power}
    top = max(cert)
    for o in range(1, top + 1):
        derivs[o] = d(derivs[o - 1])
    for o, c in cert.items():
        rebuilt = rebuilt + c * derivs[o]
    target = da ** (2 * r - 1)
    residual = normalize(rebuilt - target)
    report = CheckReport(
        name="radical-power-membership",
        status="OK" if residual.is_zero() else "FAIL",
        witness=None if residual.is_zero() else residual,
        numbers={"r": r, "power": 2 * r - 1, "terms": len(cert)},
    )
    return report, cert
