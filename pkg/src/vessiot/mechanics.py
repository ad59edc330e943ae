"""Integrating-factor and multiplier identities for first-order flows,
the Lagrangian Hessian identity, separability conditions, and the
exterior-closure chain for the contact form of a Hamiltonian.

Unknown functions are modelled as dependents whose jets are free
symbols, so a residual that normalizes to zero is an identity in all of
them.  Hypotheses are imposed by solving a relation for one designated
jet and substituting, never by ideal reduction.
"""
from __future__ import annotations

from .errors import DegenerateHamiltonian, NotAMultiplier, SingularFrame
from .jets import DiffForm, JetContext, exterior_derivative, wedge
from .linalg import det
from .report import CheckReport
from .symcore import (
    RationalExpr,
    coordinate_partial,
    normalize,
    substitute,
)

ZERO = RationalExpr.const(0)


def _solve_and_substitute(expr, relation, designated):
    """Impose ``relation == 0`` on ``expr`` by solving the relation for
    the ``designated`` variable (which must occur with constant nonzero
    coefficient) and substituting."""
    c = coordinate_partial(relation, designated)
    if c.is_zero():
        if not normalize(relation).is_zero():
            raise ValueError(
                "relation does not contain the designated variable"
            )
        return normalize(expr)
    solved = normalize(RationalExpr.var(designated) - relation / c)
    return normalize(substitute(expr, {designated: solved}))


# ---------------------------------------------------------------------------
# first-order invariance condition and its integrating factor


def lie_condition_equivalence(ctx=None, xi=None, eta=None, F=None,
                              flip_chi=False):
    """Verify that the two regroupings of the invariance condition for a
    first-order flow agree, and that chi = 1/(eta - F*xi) satisfies the
    divergence identity d_x(chi) - d_y(-F*chi) = 0 once the condition is
    imposed (solved for the x-derivative of eta).

    With ``flip_chi`` the deliberately wrong factor 1/(eta + F*xi) is
    used instead; the report then carries the nonzero witness.
    """
    if ctx is None:
        ctx = JetContext(["x", "y"], ["xi", "eta", "F"], max_order=3)
    E = ctx.expr
    if xi is None:
        xi = E("xi")
    if eta is None:
        eta = E("eta")
    if F is None:
        F = E("F")
    d = ctx.total_derivative
    cond = (
        d(eta, "x") + F * d(eta, "y") - F * d(xi, "x")
        - F ** 2 * d(xi, "y") - d(F, "x") * xi - d(F, "y") * eta
    )
    W = eta - F * xi
    regrouped = d(W, "x") + F * d(W, "y") - d(F, "y") * W
    equiv = normalize(cond - regrouped)
    if not equiv.is_zero():
        return CheckReport(
            name="lie-condition-equivalence", status="FAIL", witness=equiv,
            detail="the two regroupings of the condition disagree",
        )
    denom = normalize(eta + F * xi) if flip_chi else normalize(W)
    if denom.is_zero():
        raise ValueError("integrating-factor denominator vanishes")
    chi = RationalExpr.const(1) / denom
    omega = -F
    divergence = d(chi, "x") - d(omega * chi, "y")
    deps = {v for v in normalize(cond).variables() if v.kind == "jet"}
    target = None
    if "eta" in ctx.dependents:
        v = ctx.jet("eta", (1, 0))
        if v in deps:
            target = v
    if target is not None:
        residual = _solve_and_substitute(divergence, cond, target)
    else:
        if not normalize(cond).is_zero():
            return CheckReport(
                name="lie-condition-equivalence", status="FAIL",
                witness=normalize(cond),
                detail="specialized data violates the condition",
            )
        residual = normalize(divergence)
    residual = ctx.reduce(residual)
    return CheckReport(
        name="lie-condition-equivalence",
        status="OK" if residual.is_zero() else "FAIL",
        witness=None if residual.is_zero() else residual,
    )


# ---------------------------------------------------------------------------
# Jacobi multipliers


def _jacobian(ctx, phi):
    d = ctx.total_derivative
    return [[normalize(d(c, x)) for x in ctx.independents] for c in phi]


def _adjugate(J):
    n = len(J)
    if n == 1:
        return [[RationalExpr.const(1)]]
    adj = [[None] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            minor = [
                [J[i][j] for j in range(n) if j != c]
                for i in range(n) if i != r
            ]
            adj[c][r] = (-1) ** (r + c) * det(minor)
    return adj


def _pullback_divergence(ctx, J, delta, fields):
    """Delta^3 * sum_j dbar_j(fields[j] / Delta), where the target
    derivations are dbar_j = (J^{-1})^k_j d_k.  Scaling by Delta^3 keeps
    the computation polynomial (Delta != 0, so vanishing is
    equivalent)."""
    d = ctx.total_derivative
    n = len(ctx.independents)
    adj = _adjugate(J)
    d_delta = [d(delta, x) for x in ctx.independents]
    res = ZERO
    for j in range(n):
        for k in range(n):
            res = res + adj[k][j] * (
                d(fields[j], ctx.independents[k]) * delta
                - fields[j] * d_delta[k]
            )
    return normalize(res)


def jacobi_multiplier_identity(n=2, ctx=None, phi=None):
    """The chain-rule identity: for any change of variables phi with
    jacobian determinant Delta, each column of (1/Delta) * d(phi) has
    zero divergence in the target variables."""
    if ctx is None:
        names = [f"x{i}" for i in range(1, n + 1)]
        ctx = JetContext(names, [f"phi{i}" for i in range(1, n + 1)],
                         max_order=3)
    if phi is None:
        phi = [ctx.expr(dep) for dep in ctx.dependents]
    n = len(ctx.independents)
    if len(phi) != n:
        raise ValueError("need one component per variable")
    J = _jacobian(ctx, phi)
    delta = normalize(det(J))
    if delta.is_zero():
        raise SingularFrame("jacobian determinant vanishes identically")
    witness = None
    for i in range(n):
        cols = [J[j][i] for j in range(n)]
        res = _pullback_divergence(ctx, J, delta, cols)
        if not res.is_zero():
            witness = res
            break
    return CheckReport(
        name="jacobi-multiplier-identity",
        status="OK" if witness is None else "FAIL",
        witness=witness,
        numbers={"n": n},
    )


def multiplier_transport(ctx, M, theta, phi):
    """Given a multiplier M for the field theta (sum_i d_i(M theta^i) = 0,
    checked first), verify that M/Delta is a multiplier for the
    transformed field thetabar^j = d_i(phi^j) theta^i in the variables
    phi."""
    d = ctx.total_derivative
    n = len(ctx.independents)
    if len(theta) != n or len(phi) != n:
        raise ValueError("need one component per variable")
    div = ZERO
    for i, x in enumerate(ctx.independents):
        div = div + d(M * theta[i], x)
    div = normalize(div)
    if not div.is_zero():
        raise NotAMultiplier(f"sum d_i(M theta^i) = {div}")
    J = _jacobian(ctx, phi)
    delta = normalize(det(J))
    if delta.is_zero():
        raise SingularFrame("jacobian determinant vanishes identically")
    tbar = [
        normalize(sum((J[j][i] * theta[i] for i in range(n)), start=ZERO))
        for j in range(n)
    ]
    fields = [normalize(M * tbar[j]) for j in range(n)]
    res = _pullback_divergence(ctx, J, delta, fields)
    return CheckReport(
        name="multiplier-transport",
        status="OK" if res.is_zero() else "FAIL",
        witness=None if res.is_zero() else res,
    )


def hessian_multiplier_identity(ctx=None, L=None):
    """The second velocity-derivative of any Lagrangian L(t, x, v) is a
    multiplier for the associated first-order flow: the displayed
    three-term divergence vanishes identically in the jets of L."""
    if ctx is None:
        ctx = JetContext(["t", "x", "v"], ["L"], max_order=4)
    if L is None:
        L = ctx.expr("L")
    d = ctx.total_derivative
    v = ctx.expr(ctx.independents[2])
    Lvv = d(d(L, "v"), "v")
    Lx = d(L, "x")
    Ltv = d(d(L, "t"), "v")
    Lxv = d(d(L, "x"), "v")
    res = normalize(
        d(Lvv, "t") + d(v * Lvv, "x") + d(Lx - Ltv - v * Lxv, "v")
    )
    return CheckReport(
        name="hessian-multiplier-identity",
        status="OK" if res.is_zero() else "FAIL",
        witness=None if res.is_zero() else res,
    )


# ---------------------------------------------------------------------------
# contact form of a Hamiltonian: closure chain and separability


def hj_closure_chain(ctx=None, H=None):
    """Close the contact form dz - p dx + H dt three times over the
    coordinates (t, x, z, p):

    1. its exterior derivative is exactly dx^dp + dH^dt;
    2. wedging the contact form with that 2-form gives the 3-form whose
       transport expresses volume preservation;
    3. the exterior derivative of the 3-form is a multiple of the volume
       form, with coefficient exactly 2 * dH/dz.

    Returns (report, artifacts) where artifacts carries the intermediate
    forms and the extracted volume coefficient.
    """
    if ctx is None:
        ctx = JetContext(["t", "x", "z", "p"], ["H"], max_order=3)
    if H is None:
        H = ctx.expr("H")
    names = ("t", "x", "z", "p")
    if tuple(ctx.independents) != names:
        raise ValueError("closure chain needs coordinates (t, x, z, p)")
    coords = [ctx.var(nm) for nm in names]
    one = {nm: DiffForm.d_coord(ctx, coords, nm) for nm in names}
    p = ctx.expr("p")
    contact = one["z"] - one["x"].scale(p) + one["t"].scale(H)
    two = exterior_derivative(contact)
    dH = exterior_derivative(DiffForm.function(ctx, coords, H))
    expected_two = wedge(one["x"], one["p"]) + wedge(dH, one["t"])
    two_residual = two - expected_two
    three = wedge(contact, two)
    four = exterior_derivative(three)
    coeff = normalize(four.coefficient((0, 1, 2, 3)))
    hz = normalize(ctx.total_derivative(H, "z"))
    coeff_residual = normalize(coeff - 2 * hz)
    ok = two_residual.is_zero() and coeff_residual.is_zero()
    witness = None
    if not two_residual.is_zero():
        witness = next(iter(two_residual.terms.values()))
    elif not coeff_residual.is_zero():
        witness = coeff_residual
    report = CheckReport(
        name="hj-closure-chain",
        status="OK" if ok else "FAIL",
        witness=witness,
    )
    artifacts = {
        "two_form": two,
        "three_form": three,
        "four_form": four,
        "coefficient": coeff,
    }
    return report, artifacts


def separability_conditions(ctx, H):
    """Both obstructions to finding a complete integral of the
    Hamiltonian H by separating x from t: d_z(H) and d_t(d_x(H)/d_p(H)).
    OK iff both normalize to zero."""
    d = ctx.total_derivative
    Hp = normalize(d(H, "p"))
    if Hp.is_zero():
        raise DegenerateHamiltonian("d_p(H) vanishes identically")
    c1 = normalize(d(H, "z")) if "z" in ctx.independents else ZERO
    c2 = normalize(d(d(H, "x") / Hp, "t"))
    ok = c1.is_zero() and c2.is_zero()
    witness = None if ok else (c1 if not c1.is_zero() else c2)
    return CheckReport(
        name="separability-conditions",
        status="OK" if ok else "FAIL",
        witness=witness,
        detail=f"z-dependence: {c1}; mixed quotient: {c2}",
    )
