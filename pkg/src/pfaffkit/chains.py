"""Triangular chain certificates and their verification.

A chain is an ordered list of right-hand sides P_1..P_N with P_i a
polynomial (or rational function) in y_1..y_i only; an element is a
(rational) expression in the chain variables.  Closure under the field
operations and derivatives is constructive: derivatives stay inside the
chain, a multiplicative inverse appends exactly one variable.

Certificates are never trusted: ``verify_forward`` recomputes the
derivative of the candidate element through the chain rules and
``verify_backward`` differentiates candidate assignments through a
defining equation.  Both reduce to exact cross-multiplied polynomial
identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    ChainMismatch,
    InternalInvariant,
    MixedKinds,
    NonConstantBase,
    TriangularityViolated,
    ZeroDenominator,
    ZeroElement,
)
from .diffalg import (
    DiffPoly,
    DiffRatFunc,
    RatFunc,
    dense_to_diffpoly,
    substitute_cleared,
    univar_dense,
)
from .exactfield import UniPoly, extract_linear_roots, poly_gcd


def _chain_vars(n):
    return tuple(f"y{i + 1}" for i in range(n))


class PfaffianChain:
    """Ordered rules y_i' = P_i(y_1..y_i) over a base differential field.

    ``kind`` is ``"polynomial"`` or ``"rational"``; rules are DiffPoly
    (resp. DiffRatFunc) in the full ring y1..yN.  Chains are immutable;
    extension operations return new chains.
    """

    __slots__ = ("base", "kind", "rules", "variables")

    def __init__(self, base, kind, rules, variables=None):
        self.base = base
        self.kind = kind
        self.rules = tuple(rules)
        self.variables = tuple(variables) if variables is not None else _chain_vars(len(self.rules))

    @property
    def order(self):
        return len(self.rules)

    def validate(self):
        if self.kind not in ("polynomial", "rational"):
            raise MixedKinds(f"unknown chain kind {self.kind!r}")
        for i, rule in enumerate(self.rules):
            if self.kind == "polynomial" and not isinstance(rule, DiffPoly):
                raise MixedKinds(f"rule {i + 1} is not polynomial")
            if self.kind == "rational" and not isinstance(rule, (DiffPoly, DiffRatFunc)):
                raise MixedKinds(f"rule {i + 1} has unsupported type")
            used = rule.used_variables() if isinstance(rule, DiffPoly) else (
                rule.num.used_variables() | rule.den.used_variables()
            )
            for v in used:
                j = self.variables.index(v)
                if j > i:
                    raise TriangularityViolated(i + 1, j + 1)
        return self

    def element(self, expr):
        return ChainElement(self, expr)

    def serialize(self):
        """Rule strings in the expression grammar, one per variable."""
        return [f"{v}' = {rule}" for v, rule in zip(self.variables, self.rules)]

    def __eq__(self, other):
        return (
            isinstance(other, PfaffianChain)
            and self.base == other.base
            and self.kind == other.kind
            and self.variables == other.variables
            and all(_rules_equal(a, b) for a, b in zip(self.rules, other.rules))
            and len(self.rules) == len(other.rules)
        )

    def __repr__(self):
        return f"<chain {'; '.join(self.serialize())}>"


def _rules_equal(a, b):
    if isinstance(a, DiffPoly) and isinstance(b, DiffPoly):
        return a == b
    a = a if isinstance(a, DiffRatFunc) else DiffRatFunc.from_poly(a)
    b = b if isinstance(b, DiffRatFunc) else DiffRatFunc.from_poly(b)
    return a == b


@dataclass(frozen=True)
class ChainElement:
    """An expression in the variables of a fixed chain."""

    chain: PfaffianChain
    expr: object  # DiffPoly (polynomial kind) or DiffRatFunc

    def __str__(self):
        return str(self.expr)


class NoetherianSystem:
    """Like a chain but without triangularity: each rule may use all variables."""

    __slots__ = ("base", "rules", "variables")

    def __init__(self, base, rules, variables=None):
        self.base = base
        self.rules = tuple(rules)
        self.variables = tuple(variables) if variables is not None else _chain_vars(len(self.rules))
        for i, rule in enumerate(self.rules):
            if not isinstance(rule, DiffPoly):
                raise MixedKinds(f"rule {i + 1} of a Noetherian system must be polynomial")

    @property
    def order(self):
        return len(self.rules)

    def serialize(self):
        return [f"{v}' = {rule}" for v, rule in zip(self.variables, self.rules)]

    def __repr__(self):
        return f"<noetherian {'; '.join(self.serialize())}>"


def chain_validate(c):
    """Raise TriangularityViolated/MixedKinds unless ``c`` is well formed."""
    return c.validate()


def combine(e1, e2, op):
    """Sum or product of two elements of one chain (no new variables)."""
    if e1.chain is not e2.chain and e1.chain != e2.chain:
        raise ChainMismatch("elements of different chains cannot be combined")
    if op == "+":
        return ChainElement(e1.chain, e1.expr + e2.expr)
    if op in ("*", "x"):
        return ChainElement(e1.chain, e1.expr * e2.expr)
    raise ValueError(f"unsupported combination {op!r}")


def _derive_expr(chain, expr):
    """Total derivative of an expression through the chain rules.

    D(e) = sum_i (de/dy_i) P_i + e^delta; extends to quotients by the
    quotient rule.  The result is a DiffPoly whenever everything in
    sight is polynomial.
    """
    if isinstance(expr, DiffRatFunc):
        dn = _derive_expr(chain, expr.num)
        dd = _derive_expr(chain, expr.den)
        dn = dn if isinstance(dn, DiffRatFunc) else DiffRatFunc.from_poly(dn)
        dd = dd if isinstance(dd, DiffRatFunc) else DiffRatFunc.from_poly(dd)
        num = dn * expr.den - dd * expr.num
        return num / (DiffRatFunc.from_poly(expr.den) ** 2)
    total = expr.coeff_derivation()
    rational = False
    for v, rule in zip(chain.variables, chain.rules):
        part = expr.partial(v)
        if part.is_zero():
            continue
        contrib = part * rule if isinstance(rule, DiffPoly) else DiffRatFunc.from_poly(part) * rule
        if isinstance(contrib, DiffRatFunc):
            rational = True
            total = DiffRatFunc.from_poly(total) if isinstance(total, DiffPoly) else total
        elif rational and isinstance(contrib, DiffPoly):
            contrib = DiffRatFunc.from_poly(contrib)
        total = total + contrib
    return total


def total_derivative(e):
    """D(e) as an element of the same chain; never extends the chain."""
    if e.chain.kind != "polynomial":
        raise MixedKinds("derivative closure is defined for polynomial chains only")
    return ChainElement(e.chain, _derive_expr(e.chain, e.expr))


def invert_element(e):
    """Chain extension computing 1/e: appends z with z' = -z^2 D(e)."""
    if e.chain.kind != "polynomial":
        raise MixedKinds("inverse closure is defined for polynomial chains only")
    if e.expr.is_zero():
        raise ZeroElement("cannot invert the zero element")
    chain = e.chain
    new_vars = chain.variables + (f"y{chain.order + 1}",)
    z = DiffPoly.var(chain.base, new_vars, new_vars[-1])
    de = _derive_expr(chain, e.expr).extend(new_vars)
    new_rule = -(z * z) * de
    extended = PfaffianChain(
        chain.base,
        "polynomial",
        [r.extend(new_vars) for r in chain.rules] + [new_rule],
        new_vars,
    ).validate()
    return extended, ChainElement(extended, z)


def rational_to_noetherian(p, q):
    """Noetherian system for y' = P(y)/Q(y) via the auxiliary w = 1/Q(y).

    ``p`` and ``q`` are univariate DiffPoly in the equation variable;
    the system's rules are polynomial in (y, w):

        y' = w * P(y)
        w' = -w^3 * P(y) * dQ/dy (y) - w^2 * Q^delta(y)
    """
    if q.is_zero():
        raise ZeroDenominator("Q must be nonzero")
    base = p.base
    yname = p.variables[0] if p.variables else "y"
    variables = (yname, "w")
    P = p.extend(variables) if p.variables else DiffPoly.const(base, variables, p.constant_coefficient())
    Q = q.extend(variables) if q.variables else DiffPoly.const(base, variables, q.constant_coefficient())
    w = DiffPoly.var(base, variables, "w")
    qprime = Q.partial(yname)
    qdelta = Q.coeff_derivation()
    rule_y = w * P
    rule_w = -(w ** 3) * P * qprime - (w ** 2) * qdelta
    return NoetherianSystem(base, (rule_y, rule_w), variables)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    index: int | None = None
    witness: object = None

    def __bool__(self):
        return self.ok


# Verification works on *unreduced* numerator/denominator pairs: every
# intermediate step is plain polynomial arithmetic and the final identity
# is decided by cross multiplication.  Reducing along the way looks
# cleaner but triggers severe coefficient blowup in the gcds.

def _pair_of(expr):
    if isinstance(expr, DiffRatFunc):
        return expr.num, expr.den
    return expr, DiffPoly.const(expr.base, expr.variables, 1)


def _pair_add(a, b):
    return a[0] * b[1] + b[0] * a[1], a[1] * b[1]


def _pair_sub(a, b):
    return a[0] * b[1] - b[0] * a[1], a[1] * b[1]


def _pair_mul(a, b):
    return a[0] * b[0], a[1] * b[1]


def _pair_eq(a, b):
    return (a[0] * b[1] - b[0] * a[1]).is_zero()


def _pair_witness(a, b):
    num = a[0] * b[1] - b[0] * a[1]
    den = a[1] * b[1]
    return DiffRatFunc(num, den)


def _subst_pair(poly, pairs):
    """Evaluate ``poly`` at per-variable (num, den) pairs, denominators cleared.

    Exponents are homogenized against the per-variable maximum degree, so
    the result is a single unreduced pair and no rational arithmetic is
    needed on the way.
    """
    variables = poly.variables
    some = next(iter(pairs.values()))
    t_base, t_vars = some[0].base, some[0].variables
    one = DiffPoly.const(t_base, t_vars, 1)
    maxdeg = [0] * len(variables)
    for e in poly.terms:
        for i, k in enumerate(e):
            maxdeg[i] = max(maxdeg[i], k)
    num_pows, den_pows = [], []
    for i, v in enumerate(variables):
        if maxdeg[i] == 0 or v not in pairs:
            num_pows.append(None)
            den_pows.append(None)
            continue
        n, d = pairs[v]
        npow, dpow = [one], [one]
        for _ in range(maxdeg[i]):
            npow.append(npow[-1] * n)
            dpow.append(dpow[-1] * d)
        num_pows.append(npow)
        den_pows.append(dpow)
    total = DiffPoly.zero(t_base, t_vars)
    for e, c in poly.terms.items():
        term = DiffPoly.const(t_base, t_vars, c)
        for i, k in enumerate(e):
            if maxdeg[i] == 0:
                continue
            if num_pows[i] is None:
                raise ArityMismatch(
                    f"no assignment for variable {variables[i]!r}"
                )
            term = term * num_pows[i][k] * den_pows[i][maxdeg[i] - k]
        total = total + term
    den = one
    for i in range(len(variables)):
        if den_pows[i] is not None:
            den = den * den_pows[i][maxdeg[i]]
    return total, den


def _subst_pair_any(rule, pairs):
    if isinstance(rule, DiffRatFunc):
        top = _subst_pair(rule.num, pairs)
        bot = _subst_pair(rule.den, pairs)
        return top[0] * bot[1], top[1] * bot[0]
    return _subst_pair(rule, pairs)


def _derive_poly_pair(chain, p, rule_pairs):
    one = DiffPoly.const(p.base, p.variables, 1)
    acc = (p.coeff_derivation(), one)
    for v, rp in zip(chain.variables, rule_pairs):
        part = p.partial(v)
        if part.is_zero():
            continue
        acc = _pair_add(acc, _pair_mul((part, one), rp))
    return acc


def _derive_pair(chain, expr, rule_pairs):
    if isinstance(expr, DiffPoly):
        return _derive_poly_pair(chain, expr, rule_pairs)
    N, D = expr.num, expr.den
    one = DiffPoly.const(N.base, N.variables, 1)
    dN = _derive_poly_pair(chain, N, rule_pairs)
    dD = _derive_poly_pair(chain, D, rule_pairs)
    num = _pair_sub(_pair_mul(dN, (D, one)), _pair_mul((N, one), dD))
    return num[0], num[1] * D * D


def verify_forward(chain, element, f):
    """Check D(e) = f(e) as an exact identity in the chain's fraction field.

    ``element`` may be a ChainElement or a raw expression; ``f`` is the
    univariate right-hand side of y' = f(y).  Failure carries the
    nonzero difference as a witness.
    """
    chain.validate()
    expr = element.expr if isinstance(element, ChainElement) else element
    rule_pairs = [_pair_of(r) for r in chain.rules]
    lhs = _derive_pair(chain, expr, rule_pairs)
    fname = _univar_name(f)
    e_pair = _pair_of(expr)
    fnum = f.num if isinstance(f, DiffRatFunc) else f
    fden = f.den if isinstance(f, DiffRatFunc) else None
    if fname is None:
        base, variables = e_pair[0].base, e_pair[0].variables
        top = DiffPoly.const(base, variables, fnum.constant_coefficient())
        bot = DiffPoly.const(
            base, variables,
            fden.constant_coefficient() if fden is not None else f.base.one(),
        )
        rhs = (top, bot)
    else:
        top = _subst_pair(fnum, {fname: e_pair})
        if fden is None:
            rhs = top
        else:
            bot = _subst_pair(fden, {fname: e_pair})
            if bot[0].is_zero():
                return VerifyResult(False, witness="f is undefined at the element")
            rhs = (top[0] * bot[1], top[1] * bot[0])
    if _pair_eq(lhs, rhs):
        return VerifyResult(True)
    return VerifyResult(False, witness=_pair_witness(lhs, rhs))


def _univar_name(f):
    if isinstance(f, DiffPoly):
        used = f.used_variables()
    else:
        used = f.num.used_variables() | f.den.used_variables()
    if len(used) > 1:
        raise ArityMismatch("the defining equation must be univariate")
    return used.pop() if used else None


def verify_backward(g, assignments, system):
    """Check assignments h_i(w) against a system, where w' = g(w).

    For every rule the derivative of h_i computed through the defining
    equation (chain rule plus coefficient derivation) must equal
    P_i(h_1..h_n) as an identity of univariate rational functions.
    """
    rules = system.rules
    if len(assignments) != len(rules):
        raise ArityMismatch(
            f"{len(rules)} rules but {len(assignments)} assignments"
        )
    g = g if isinstance(g, DiffRatFunc) else DiffRatFunc.from_poly(g)
    wname = _univar_name(g)
    if wname is None:
        # constant defining equation: any ring carrying the assignments works
        wname = g.variables[0] if g.variables else "w"
    g_pair = _pair_of(g)
    pairs = {}
    h_pairs = []
    for v, h in zip(system.variables, assignments):
        h = h if isinstance(h, DiffRatFunc) else DiffRatFunc.from_poly(h)
        h_pairs.append((h.num, h.den))
        pairs[v] = (h.num, h.den)
    for i, rule in enumerate(rules):
        N, D = h_pairs[i]
        dN, dD = N.partial(wname), D.partial(wname)
        h_prime = (dN * D - N * dD, D * D)
        h_delta = (
            N.coeff_derivation() * D - N * D.coeff_derivation(),
            D * D,
        )
        lhs = _pair_add(_pair_mul(h_prime, g_pair), h_delta)
        rhs = _subst_pair_any(rule, pairs)
        if not _pair_eq(lhs, rhs):
            return VerifyResult(False, index=i + 1, witness=_pair_witness(lhs, rhs))
    return VerifyResult(True)


# ---------------------------------------------------------------------------
# presentation search for y' = f(y) over a constant base

@dataclass(frozen=True)
class PresentationCertificate:
    """A one-rule chain b' = P(b) together with the element h(b) = R(b)/S(b).

    Witnesses that the generic solution of y' = f(y) lives in a
    polynomial chain: with W = R'S - RS' (nonzero since h is
    non-constant) the rule is P = f(h) S^2 / W, which the search only
    accepts when the division is exact.
    """

    r: UniPoly
    s: UniPoly
    p: UniPoly
    chain: PfaffianChain
    element: DiffRatFunc

    def h_str(self):
        from .diffalg import _composite

        r, s = self.r.str("x"), self.s.str("x")
        if self.s == UniPoly.const(1, self.s.field):
            return r
        if _composite(r):
            r = f"({r})"
        if _composite(s):
            s = f"({s})"
        return f"{r}/{s}"


def _to_unipoly(p, name):
    dense = univar_dense(p, name) if p.variables else [p.constant_coefficient()]
    field = p.base.field
    return UniPoly(field, dense)


def _from_unipoly(base, variables, name, u):
    return dense_to_diffpoly(base, variables, name, list(u.coeffs))


def search_presentation(f, candidates=(), degree_bound=3):
    """Look for a presentation certificate for y' = f(y) over constants.

    Candidates h = R/S come from a fixed catalog built on the visible
    zeros and poles of f (plus 0 and 1) together with user-supplied
    (R, S) pairs.  This is a semi-decision: no bound on chain length
    exists, so an empty result is *not* a refutation.  Every returned
    certificate has already passed ``verify_forward``.
    """
    f = f if isinstance(f, DiffRatFunc) else DiffRatFunc.from_poly(f)
    base = f.base
    if base.var is not None:
        raise NonConstantBase("the presentation search needs a constant base field")
    name = _univar_name(f) or (f.variables[0] if f.variables else "y")
    A = _to_unipoly(f.num, name)
    B = _to_unipoly(f.den, name)
    field = A.field

    points = {_as_field_scalar(0, field), _as_field_scalar(1, field)}
    for poly in (A, B):
        roots, _ = extract_linear_roots(poly)
        for root, _mult in roots:
            points.add(root)
    points = sorted(points, key=str)

    x = UniPoly.x(field)
    one = UniPoly.const(1, field)
    catalog = [(x, one), (one, x)]
    for c in points:
        cpoly = UniPoly.const(c, field)
        catalog.append((x + cpoly, one))
        catalog.append((x - cpoly, one))
        catalog.append((one, x - cpoly))
    for c in points:
        for d in points:
            if c == d:
                continue
            catalog.append((x - UniPoly.const(c, field), x - UniPoly.const(d, field)))
    catalog.append((x * x, one))
    catalog.append((one, x * x))
    for r, s in candidates:
        catalog.append((r, s))

    seen = set()
    for r, s in catalog:
        if s.is_zero():
            continue
        g = poly_gcd(r, s)
        if g.degree > 0:
            r, s = r // g, s // g
        key = (r.coeffs, s.coeffs)
        if key in seen:
            continue
        seen.add(key)
        if max(r.degree, s.degree) > degree_bound:
            continue
        w = r.derivative() * s - r * s.derivative()
        if w.is_zero():
            continue  # h constant: not a presentation
        quot = substitute_cleared(A, B, r, s, d=2) / RatFunc(w, UniPoly.const(1, field))
        if not quot.is_polynomial():
            continue
        p = quot.num * quot.den.constant_value().inverse()
        cert = _build_certificate(base, r, s, p, f, name)
        if cert is not None:
            return cert
    return None


def _as_field_scalar(v, field):
    from .exactfield import AlgebraicScalar

    s = AlgebraicScalar._coerce(v)
    return s.lift(field) if s.field != field else s


def _build_certificate(base, r, s, p, f, name):
    variables = ("y1",)
    rule = _from_unipoly(base, variables, "y1", p)
    chain = PfaffianChain(base, "polynomial", (rule,), variables).validate()
    rexpr = _from_unipoly(base, variables, "y1", r)
    sexpr = _from_unipoly(base, variables, "y1", s)
    element = DiffRatFunc(rexpr, sexpr)
    check = verify_forward(chain, element, f)
    if not check.ok:
        raise InternalInvariant(
            "presentation search produced a certificate that fails forward "
            f"verification (witness {check.witness})"
        )
    return PresentationCertificate(r=r, s=s, p=p, chain=chain, element=element)
