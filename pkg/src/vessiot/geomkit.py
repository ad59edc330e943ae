"""Surface and curve invariants, their compatibility residuals, and the
gauging construction with its structure forms.

All quantities stay inside the rational-function field: curvature data is
reported as squares (kappa^2) or ratios, never via square roots.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DegenerateCurve,
    DegenerateMetric,
    SingularFrame,
    ZeroCurvatureLocus,
)
from .linalg import det, identity, inverse, mat_mul, mat_vec, transpose
from .report import CheckReport
from .symcore import RationalExpr, normalize

ZERO = RationalExpr.const(0)


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), start=ZERO)


def _cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


# ---------------------------------------------------------------------------
# surfaces (2 source coordinates, 3 target components)


@dataclass
class SurfaceData:
    """First form, tangential quantities and the second-form density of an
    explicit surface, all rational in the source coordinates."""

    ctx: object
    omega: dict  # (i, j) with i <= j -> RationalExpr
    gamma: dict  # (r, i, j) with i <= j -> RationalExpr
    sigma: dict  # (i, j) with i <= j -> RationalExpr
    det_omega: RationalExpr
    det_sigma: RationalExpr

    def om(self, i, j):
        return self.omega[(min(i, j), max(i, j))]

    def ga(self, r, i, j):
        return self.gamma[(r, min(i, j), max(i, j))]

    def si(self, i, j):
        return self.sigma[(min(i, j), max(i, j))]


def surface_invariants(ctx, f):
    """Metric, tangential and normal second-order invariants of an
    explicit surface f = (f^1, f^2, f^3)(x^1, x^2)."""
    if len(ctx.independents) != 2 or len(f) != 3:
        raise ValueError("surface data needs 2 source and 3 target components")
    red = ctx.reduce
    p = lambda e, i: ctx.partial(e, ctx.independents[i - 1])
    f1 = [red(p(c, 1)) for c in f]
    f2 = [red(p(c, 2)) for c in f]
    fd = {1: f1, 2: f2}
    omega, gamma, sigma = {}, {}, {}
    for i in (1, 2):
        for j in (1, 2):
            if j < i:
                continue
            omega[(i, j)] = red(_dot(fd[i], fd[j]))
            fij = [red(p(c, j)) for c in fd[i]]
            sigma[(i, j)] = red(
                det([[f1[k], f2[k], fij[k]] for k in range(3)])
            )
            for r in (1, 2):
                gamma[(r, i, j)] = red(_dot(fd[r], fij))
    det_omega = red(omega[(1, 1)] * omega[(2, 2)] - omega[(1, 2)] ** 2)
    if det_omega.is_zero():
        raise DegenerateMetric("det(omega) vanishes identically")
    det_sigma = red(sigma[(1, 1)] * sigma[(2, 2)] - sigma[(1, 2)] ** 2)
    return SurfaceData(ctx, omega, gamma, sigma, det_omega, det_sigma)


def gauss_residual(S):
    """Residual of the second-order compatibility identity expressing
    det(sigma) through the metric and its first derivatives; zero on every
    embedded surface."""
    ctx = S.ctx
    p = lambda e, i: ctx.partial(e, ctx.independents[i - 1])
    lhs = -S.det_omega * (p(S.ga(2, 1, 2), 1) - p(S.ga(2, 1, 1), 2))
    q1 = (
        S.om(2, 2) * S.ga(1, 1, 1) * S.ga(1, 2, 2)
        + S.om(1, 1) * S.ga(2, 1, 1) * S.ga(2, 2, 2)
        - S.om(1, 2)
        * (S.ga(1, 1, 1) * S.ga(2, 2, 2) + S.ga(2, 1, 1) * S.ga(1, 2, 2))
    )
    q2 = (
        S.om(2, 2) * S.ga(1, 1, 2) ** 2
        + S.om(1, 1) * S.ga(2, 1, 2) ** 2
        - 2 * S.om(1, 2) * S.ga(1, 1, 2) * S.ga(2, 1, 2)
    )
    return ctx.reduce(normalize(lhs - (S.det_sigma + q1 - q2)))


def _codazzi_one(S, a, b):
    """First-order compatibility residual for the second form, written for
    the index pair (a, b); the companion residual swaps the two."""
    ctx = S.ctx
    p = lambda e, i: ctx.partial(e, ctx.independents[i - 1])
    lhs = S.det_omega * (p(S.si(a, b), b) - p(S.si(b, b), a))
    rhs = (
        (S.ga(a, b, b) * S.om(b, b) - S.ga(b, b, b) * S.om(a, b))
        * S.si(a, a)
        + (
            2 * S.ga(a, a, b) * S.om(a, b)
            - 2 * S.ga(b, a, b) * S.om(a, a)
            + S.ga(b, a, a) * S.om(a, b)
            - S.ga(a, a, a) * S.om(b, b)
        )
        * S.si(b, b)
        + (
            2 * S.ga(b, a, b) * S.om(a, b)
            - 2 * S.ga(a, a, b) * S.om(b, b)
            + 2 * S.ga(b, b, b) * S.om(a, a)
            - 2 * S.ga(a, b, b) * S.om(a, b)
        )
        * S.si(a, b)
    )
    return ctx.reduce(normalize(lhs - rhs))


def codazzi_residual(S):
    """The pair of first-order compatibility residuals for the second
    form; both zero on every embedded surface."""
    return _codazzi_one(S, 1, 2), _codazzi_one(S, 2, 1)


# ---------------------------------------------------------------------------
# curves (1 source coordinate, 2 or 3 target components)


@dataclass
class CurveData:
    """Differential invariants of an explicit curve; for 3 components the
    third-order quantities and rho = omega*sigma - gamma^2 are included."""

    ctx: object
    m: int
    omega: RationalExpr
    gamma: RationalExpr
    sigma: RationalExpr
    upsilon: RationalExpr
    phi: RationalExpr | None = None
    psi: RationalExpr | None = None
    rho: RationalExpr | None = None

    def identity_report(self):
        """Residuals of the derived relations among the invariants."""
        ctx = self.ctx
        p = lambda e: ctx.partial(e, ctx.independents[0])
        res = {"gamma": ctx.reduce(self.gamma - p(self.omega) / 2)}
        if self.m == 2:
            res["upsilon"] = ctx.reduce(
                self.omega * self.upsilon - self.gamma ** 2 - self.sigma ** 2
            )
        else:
            res["phi"] = ctx.reduce(self.phi - (p(self.gamma) - self.sigma))
            res["psi"] = ctx.reduce(self.psi - p(self.sigma) / 2)
        ok = all(v.is_zero() for v in res.values())
        return CheckReport(
            name="curve-identities",
            status="OK" if ok else "FAIL",
            detail=", ".join(
                f"{k}: {'0' if v.is_zero() else v}" for k, v in res.items()
            ),
        )


def curve_invariants(ctx, f):
    """Differential invariants of an explicit curve with 2 or 3
    components."""
    if len(ctx.independents) != 1 or len(f) not in (2, 3):
        raise ValueError("curve data needs 1 source and 2 or 3 components")
    red = ctx.reduce
    x = ctx.independents[0]
    d1 = [red(ctx.partial(c, x)) for c in f]
    d2 = [red(ctx.partial(c, x)) for c in d1]
    omega = red(_dot(d1, d1))
    if omega.is_zero():
        raise DegenerateCurve("omega vanishes identically")
    gamma = red(_dot(d1, d2))
    if len(f) == 2:
        sigma = red(d1[0] * d2[1] - d1[1] * d2[0])
        upsilon = red(_dot(d2, d2))
        return CurveData(ctx, 2, omega, gamma, sigma, upsilon)
    d3 = [red(ctx.partial(c, x)) for c in d2]
    sigma = red(_dot(d2, d2))
    phi = red(_dot(d1, d3))
    psi = red(_dot(d2, d3))
    upsilon = red(det([d1, d2, d3]))
    rho = red(omega * sigma - gamma ** 2)
    return CurveData(ctx, 3, omega, gamma, sigma, upsilon, phi, psi, rho)


def frenet_squares(C):
    """(kappa^2, tau) from the invariants; tau is None for planar
    curves."""
    red = C.ctx.reduce
    if C.m == 2:
        return red(C.sigma ** 2 / C.omega ** 3), None
    if C.rho.is_zero():
        raise ZeroCurvatureLocus("rho vanishes; torsion undefined")
    return red(C.rho / C.omega ** 3), red(C.upsilon / C.rho)


# ---------------------------------------------------------------------------
# gauging


@dataclass
class Gauging:
    """Matrix/translation pair carrying one moving frame onto another."""

    ctx: object
    A: list  # matrix of RationalExpr
    B: list  # vector of RationalExpr

    def orthogonal_defect(self):
        red = self.ctx.reduce
        prod = mat_mul(self.A, transpose(self.A))
        n = len(self.A)
        return [
            [red(prod[i][j] - identity(n)[i][j]) for j in range(n)]
            for i in range(n)
        ]

    def det_defect(self):
        return self.ctx.reduce(det(self.A) - 1)


def _frame(section):
    """Frame matrix of a section: derivative columns for curves, the two
    tangents and their cross product for surfaces."""
    ctx = section.ctx
    n, deps = len(ctx.independents), ctx.dependents
    if n == 1 and len(deps) in (2, 3):
        if section.order < len(deps):
            raise ValueError("section order too low for the curve frame")
        return [
            [section.value(dep, (o,)) for o in range(1, len(deps) + 1)]
            for dep in deps
        ]
    if n == 2 and len(deps) == 3:
        t1 = [section.value(dep, (1, 0)) for dep in deps]
        t2 = [section.value(dep, (0, 1)) for dep in deps]
        nrm = _cross(t1, t2)
        return [[t1[k], t2[k], nrm[k]] for k in range(3)]
    raise ValueError("no frame construction for this context shape")


def gauging(f, fbar):
    """The (A, B) pair with A = Mbar M^{-1} carrying the frame of f onto
    the frame of fbar, and B the induced translation."""
    ctx = f.ctx
    red = ctx.reduce
    M = _frame(f)
    if red(det(M)).is_zero():
        raise SingularFrame("frame of the source section is singular")
    Mbar = _frame(fbar)
    Minv = inverse(M)
    A = [[red(c) for c in row] for row in mat_mul(Mbar, Minv)]
    zero_mu = (0,) * len(ctx.independents)
    f0 = [f.value(dep, zero_mu) for dep in ctx.dependents]
    fb0 = [fbar.value(dep, zero_mu) for dep in ctx.dependents]
    B = [red(b - c) for b, c in zip(fb0, mat_vec(A, f0))]
    return Gauging(ctx, A, B)


def maurer_cartan(G):
    """Structure forms of a gauging: P = dA A^{-1} and Q = dB - P B, per
    source coordinate.  For a single source coordinate the two matrices
    are returned directly; otherwise dicts keyed by coordinate name."""
    ctx = G.ctx
    red = ctx.reduce
    if red(det(G.A)).is_zero():
        raise SingularFrame("gauging matrix is singular")
    Ainv = [[red(c) for c in row] for row in inverse(G.A)]
    out_p, out_q = {}, {}
    for x in ctx.independents:
        dA = [[ctx.partial(c, x) for c in row] for row in G.A]
        P = [[red(c) for c in row] for row in mat_mul(dA, Ainv)]
        dB = [ctx.partial(c, x) for c in G.B]
        Q = [red(b - c) for b, c in zip(dB, mat_vec(P, G.B))]
        out_p[x], out_q[x] = P, Q
    if len(ctx.independents) == 1:
        x = ctx.independents[0]
        return out_p[x], out_q[x]
    return out_p, out_q
