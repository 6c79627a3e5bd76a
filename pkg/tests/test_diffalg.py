import random
from fractions import Fraction

import pytest

import pfaffkit as pk
from pfaffkit.diffalg import (
    BaseDiffField,
    DiffIndeterminateExpr,
    DiffPoly,
    DiffRatFunc,
    RatFunc,
    riccati_reduce,
    substitute,
)
from pfaffkit.errors import (
    DenominatorVanishesIdentically,
    NotMonic,
    UnknownVariable,
)

from conftest import rand_diffpoly, rand_fraction

C = BaseDiffField.constants()
Kt = BaseDiffField.rational_functions(var="t")
Kz = BaseDiffField.rational_functions(var="z")


def yvars(base, names=("y1", "y2")):
    return [DiffPoly.var(base, names, n) for n in names]


class TestCoeffDerivation:
    def test_zero_on_constants(self):
        y1, y2 = yvars(C)
        p = 3 * y1 ** 2 * y2 - y2 + 7
        assert p.coeff_derivation().is_zero()

    def test_ddt_coefficientwise(self):
        y1, y2 = yvars(Kt)
        t = Kt.gen()
        p = t * y1 ** 2 + y2
        assert p.coeff_derivation() == y1 ** 2

    def test_quotient_rule_coefficient(self):
        y1, y2 = yvars(Kz)
        z = Kz.gen()
        q = (1 / z) * y1 * y2
        expected = (-1 / (z * z)) * y1 * y2
        assert q.coeff_derivation() == expected

    def test_leibniz_on_random_products(self):
        rng = random.Random(11)
        names = ("y1", "y2")
        for _ in range(200):
            base = Kt if rng.random() < 0.5 else Kz
            p = rand_diffpoly(rng, base, names)
            q = rand_diffpoly(rng, base, names)
            lhs = (p * q).coeff_derivation()
            rhs = p.coeff_derivation() * q + p * q.coeff_derivation()
            assert lhs == rhs


class TestPartialDerivative:
    def test_simple_power(self):
        y1, y2 = yvars(C)
        assert (y1 ** 2 * y2).partial("y1") == 2 * y1 * y2

    def test_constant(self):
        p = DiffPoly.const(C, ("y1", "y2"), 5)
        assert p.partial("y1").is_zero()

    def test_with_t_coefficient(self):
        y1, y2 = yvars(Kt)
        t = Kt.gen()
        assert (t * y1 ** 3).partial("y1") == 3 * t * y1 ** 2

    def test_unknown_variable(self):
        y1, _ = yvars(C)
        with pytest.raises(UnknownVariable):
            y1.partial("w")


class TestSubstitute:
    def setup_method(self):
        self.y = DiffPoly.var(C, ("y",), "y")

    def test_square_of_reciprocal(self):
        f = DiffRatFunc.from_poly(self.y ** 2)
        h = DiffRatFunc(DiffPoly.const(C, ("y",), 1), self.y)
        assert substitute(f, h) == DiffRatFunc(DiffPoly.const(C, ("y",), 1), self.y ** 2)

    def test_half_reciprocal(self):
        f = DiffRatFunc(DiffPoly.const(C, ("y",), 1), 2 * self.y)
        h = DiffRatFunc(DiffPoly.const(C, ("y",), 1), self.y)
        assert substitute(f, h) == DiffRatFunc.from_poly(self.y) * Fraction(1, 2)

    def test_identity_substitution(self):
        f = DiffRatFunc((self.y - 2) * (self.y - 3), self.y * (self.y - 1))
        assert substitute(f, DiffRatFunc.from_poly(self.y)) == f

    def test_denominator_vanishes(self):
        f = DiffRatFunc(DiffPoly.const(C, ("y",), 1), self.y)
        zero = DiffRatFunc.from_poly(DiffPoly.zero(C, ("y",)))
        with pytest.raises(DenominatorVanishesIdentically):
            substitute(f, zero)

    def test_cleared_form(self):
        from pfaffkit.diffalg import substitute_cleared
        import pfaffkit as pk

        x = pk.UniPoly.x(None)
        one = pk.UniPoly.const(1, None)
        # f = 1/(2x) at h = 1/x, cleared by S^2, is the polynomial x^3/2
        out = substitute_cleared(one, 2 * x, one, x, d=2)
        assert out.is_polynomial()
        assert out.num == x ** 3 * Fraction(1, 2)
        # d = 0 recovers plain composition
        plain = substitute_cleared(one, 2 * x, one, x, d=0)
        assert plain == pk.RatFunc(x, pk.UniPoly.const(2, None))

    def test_multiplicative_on_random_instances(self):
        rng = random.Random(23)
        names = ("y",)

        def small():
            num = rand_diffpoly(rng, C, names, max_deg=2, max_terms=2, span=2)
            den = rand_diffpoly(rng, C, names, max_deg=1, max_terms=2, span=2) ** 2 + 1
            return DiffRatFunc(num, den)

        for _ in range(40):
            f, g, h = small(), small(), small()
            assert substitute(f * g, h) == substitute(f, h) * substitute(g, h)


def riccati_oracle(coeffs, base):
    """Expand sum a_k y^(k) through the rewrite y' = u*y and divide by y.

    Independent of the production recursion: derivatives are taken with
    Leibniz through the polynomial ring in (u, u', ..., Y).
    """
    n = len(coeffs) - 1
    names = tuple(f"u{j}" for j in range(max(n, 1))) + ("Y",)
    Y = DiffPoly.var(base, names, "Y")

    def d(p):
        out = p.coeff_derivation()
        for j in range(len(names) - 2):
            pd = p.partial(f"u{j}")
            if pd.is_zero():
                continue
            out = out + pd * DiffPoly.var(base, names, f"u{j + 1}")
        pdy = p.partial("Y")
        if not pdy.is_zero():
            out = out + pdy * (DiffPoly.var(base, names, "u0") * Y)
        return out

    derivs = [Y]
    for _ in range(n):
        derivs.append(d(derivs[-1]))
    total = DiffPoly.zero(base, names)
    for a, dk in zip(coeffs, derivs):
        total = total + dk * base.coerce(a)
    terms = {}
    for e, c in total.terms.items():
        assert e[-1] == 1, "every term must be linear in Y"
        terms[e[:-1]] = c
    return DiffIndeterminateExpr(base, terms)


class TestRiccatiReduce:
    def test_order_one(self):
        red = riccati_reduce([Kt.coerce(-3), Kt.one()], Kt)
        u = DiffIndeterminateExpr.u(Kt)
        assert red == u - DiffIndeterminateExpr.const(Kt, 3)

    def test_order_two(self):
        a, b = Kt.coerce(7), Kt.coerce(5)
        red = riccati_reduce([b, a, Kt.one()], Kt)
        u = DiffIndeterminateExpr.u(Kt)
        u1 = DiffIndeterminateExpr.u(Kt, 1)
        expected = u1 + u * u + a * u + b
        assert red == expected

    def test_airy_like_third_order(self):
        t = Kt.gen()
        red = riccati_reduce([(-1) * t, Kt.coerce(0), Kt.coerce(0), Kt.one()], Kt)
        u = DiffIndeterminateExpr.u(Kt)
        u1 = DiffIndeterminateExpr.u(Kt, 1)
        u2 = DiffIndeterminateExpr.u(Kt, 2)
        expected = u2 + 3 * u * u1 + u * u * u - DiffIndeterminateExpr.const(Kt, t)
        assert red == expected

    def test_not_monic(self):
        with pytest.raises(NotMonic):
            riccati_reduce([Kt.coerce(1), Kt.coerce(2)], Kt)

    def test_matches_independent_expansion(self):
        rng = random.Random(31)
        for n in range(1, 6):
            for _ in range(10):
                coeffs = []
                for _k in range(n):
                    c = Kt.coerce(rand_fraction(rng, 5))
                    if rng.random() < 0.5:
                        c = c * Kt.gen() ** rng.randint(0, 2)
                    if rng.random() < 0.3:
                        c = c / (Kt.gen() ** rng.randint(1, 2) + 1)
                    coeffs.append(c)
                coeffs.append(Kt.one())
                assert riccati_reduce(coeffs, Kt) == riccati_oracle(coeffs, Kt)

    def test_order_and_leading_coefficient(self):
        rng = random.Random(32)
        for n in range(1, 6):
            coeffs = [Kt.coerce(rand_fraction(rng, 4)) for _ in range(n)] + [Kt.one()]
            red = riccati_reduce(coeffs, Kt)
            assert red.order() == n - 1
            top = red.coefficient_of_top()
            assert (top - Kt.one()).is_zero()


class TestRatFuncCoefficients:
    def test_reduction_is_canonical(self):
        t = RatFunc.x(None)
        a = (t ** 2 - 1) / (t - 1)
        assert a == t + 1

    def test_derivative_quotient_rule(self):
        t = RatFunc.x(None)
        f = 1 / t
        assert f.derivative() == -1 / (t * t)

    def test_diffratfunc_cross_multiplied_equality(self):
        names = ("y1", "y2")
        y1, y2 = yvars(C, names)
        a = DiffRatFunc(y1 * y2, y1)             # reduces by monomial content
        b = DiffRatFunc.from_poly(y2)
        assert a == b
