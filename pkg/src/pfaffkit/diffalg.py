"""Differential polynomial algebra over a base differential field.

The base field is either a field of constants K (derivation zero) or
K(t) with d/dt; multivariate differential polynomials carry the
coefficient derivation.  Also home to the rational-function coefficient
type, the logarithmic-derivative (Riccati-style) reduction of a monic
linear equation, and exact composition of univariate rational
functions.

Everything here is a pure value: arithmetic returns new objects and
never mutates, so concurrent use needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DenominatorVanishesIdentically,
    DivisionByZero,
    FieldMismatch,
    NotMonic,
    UnknownVariable,
)
from .exactfield import (
    AlgebraicScalar,
    NumberField,
    UniPoly,
    _coeff_term_str,
    poly_gcd,
    scalar_display_negative,
)


# ---------------------------------------------------------------------------
# rational functions in the independent variable (coefficients of K(t))

class RatFunc:
    """A reduced ratio of univariate polynomials over Q or Q(theta).

    The denominator is monic and coprime to the numerator, so equality
    is structural.  Doubles as the element type of K(t) (with
    ``derivative`` as d/dt) and as plain rational-function arithmetic in
    the presentation search.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if not isinstance(num, UniPoly):
            num = UniPoly.const(num)
        if not isinstance(den, UniPoly):
            den = UniPoly.const(den)
        num, den = num._pair(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            den = UniPoly.const(1, num.field)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lead_inv = den.leading().inverse()
        if not (lead_inv - 1).is_zero():
            num, den = num * lead_inv, den * lead_inv
        self.num = num
        self.den = den

    # -- constructors

    @staticmethod
    def const(c, field=None):
        return RatFunc(UniPoly.const(c, field), UniPoly.const(1, field))

    @staticmethod
    def x(field=None):
        return RatFunc(UniPoly.x(field), UniPoly.const(1, field))

    @property
    def field(self):
        return self.num.field

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.num.constant_value() / self.den.constant_value()

    # -- arithmetic

    @staticmethod
    def _coerce(x, like=None):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, UniPoly):
            return RatFunc(x, UniPoly.const(1, x.field))
        if isinstance(x, (int, Fraction, AlgebraicScalar)):
            field = like.field if like is not None else None
            return RatFunc.const(x, field)
        return None

    def __add__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        return RatFunc(self.num * b.den + b.num * self.den, self.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        return RatFunc(self.num * b.den - b.num * self.den, self.den * b.den)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        return RatFunc(self.num * b.num, self.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        if b.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.num * b.den, self.den * b.num)

    def __rtruediv__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        return b / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def derivative(self):
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __eq__(self, other):
        b = RatFunc._coerce(other, self)
        if b is None:
            return NotImplemented
        return self.num == b.num and self.den == b.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"<ratfunc {self.str('t')}>"

    def str(self, varname):
        num_s = self.num.str(varname)
        if self.is_polynomial():
            return num_s
        den_s = self.den.str(varname)
        if _composite(num_s):
            num_s = f"({num_s})"
        if _composite(den_s):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"


def _composite(s):
    return (" + " in s) or (" - " in s) or ("*" in s) or ("/" in s) or s.startswith("-")


# ---------------------------------------------------------------------------
# base differential fields

@dataclass(frozen=True)
class BaseDiffField:
    """Constants K (derivation zero) or K(t) with derivation d/dt."""

    field: NumberField | None = None
    var: str | None = None

    @staticmethod
    def constants(field=None):
        return BaseDiffField(field, None)

    @staticmethod
    def rational_functions(field=None, var="t"):
        return BaseDiffField(field, var)

    @property
    def kind(self):
        return "constants" if self.var is None else "rational-functions"

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def gen(self):
        if self.var is None:
            raise UnknownVariable("a constant base field has no independent variable")
        return RatFunc.x(self.field)

    def coerce(self, x):
        """Lift ints, fractions, scalars and t-rational functions into the base."""
        if self.var is None:
            c = AlgebraicScalar._coerce(x)
            if c is None:
                if isinstance(x, RatFunc) and x.is_constant():
                    c = x.constant_value()
                else:
                    raise FieldMismatch(f"cannot view {x!r} as a constant of the base field")
            return c.lift(self.field) if c.field != self.field else c
        if isinstance(x, RatFunc):
            if x.field == self.field:
                return x
            if x.field is None:
                return RatFunc(UniPoly(self.field, x.num.coeffs), UniPoly(self.field, x.den.coeffs))
            raise FieldMismatch("rational function over a different number field")
        if isinstance(x, UniPoly):
            return RatFunc(x, UniPoly.const(1, x.field))
        c = AlgebraicScalar._coerce(x)
        if c is None:
            raise FieldMismatch(f"cannot view {x!r} as an element of the base field")
        return RatFunc.const(c.lift(self.field) if c.field != self.field else c, self.field)

    def derive(self, c):
        if self.var is None:
            z = AlgebraicScalar.rational(0)
            return z.lift(self.field) if self.field else z
        return c.derivative()

    def is_zero_elem(self, c):
        return c.is_zero()

    def coeff_str(self, c):
        if self.var is None:
            return str(c)
        return c.str(self.var)

    def coeff_display_negative(self, c):
        if self.var is None:
            return scalar_display_negative(c)
        if c.num.is_zero():
            return False
        return scalar_display_negative(c.num.leading())

    def __str__(self):
        k = "Q" if self.field is None else f"Q({self.field.name})"
        return k if self.var is None else f"{k}({self.var})"


# ---------------------------------------------------------------------------
# multivariate differential polynomials

class DiffPoly:
    """Polynomial in y1..yn over a base differential field.

    ``terms`` maps exponent tuples to nonzero base-field coefficients.
    The variable list is fixed per ring: arithmetic requires equal
    ``(base, variables)``.
    """

    __slots__ = ("base", "variables", "terms")

    def __init__(self, base, variables, terms):
        self.base = base
        self.variables = tuple(variables)
        clean = {}
        for expo, c in terms.items():
            if not c.is_zero():
                clean[tuple(expo)] = c
        self.terms = clean

    # -- constructors

    @staticmethod
    def zero(base, variables):
        return DiffPoly(base, variables, {})

    @staticmethod
    def const(base, variables, c):
        c = base.coerce(c)
        return DiffPoly(base, variables, {(0,) * len(variables): c})

    @staticmethod
    def var(base, variables, name):
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(f"variable {name!r} not in ring {variables}")
        expo = tuple(1 if v == name else 0 for v in variables)
        return DiffPoly(base, variables, {expo: base.one()})

    # -- queries

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self):
        return self.terms.get((0,) * len(self.variables), self.base.zero())

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name):
        i = self._var_index(name)
        return max((e[i] for e in self.terms), default=0)

    def used_variables(self):
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.variables[i])
        return used

    def _var_index(self, name):
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariable(f"variable {name!r} not in ring {self.variables}") from None

    def _check_ring(self, other):
        if self.base != other.base or self.variables != other.variables:
            raise FieldMismatch("differential polynomials from different rings")

    # -- arithmetic

    def _coerce(self, other):
        if isinstance(other, DiffPoly):
            self._check_ring(other)
            return other
        try:
            return DiffPoly.const(self.base, self.variables, other)
        except FieldMismatch:
            return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in b.terms.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return DiffPoly(self.base, self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly(self.base, self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                c = c1 * c2
                cur = out.get(e)
                out[e] = c if cur is None else cur + c
        return DiffPoly(self.base, self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = DiffPoly.const(self.base, self.variables, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- differential structure

    def partial(self, name):
        """Formal partial derivative with respect to a ring variable."""
        i = self._var_index(name)
        out = {}
        for e, c in self.terms.items():
            if not e[i]:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c * e[i]
        return DiffPoly(self.base, self.variables, out)

    def coeff_derivation(self):
        """Apply the base derivation to every coefficient (zero on constants)."""
        out = {}
        for e, c in self.terms.items():
            out[e] = self.base.derive(c)
        return DiffPoly(self.base, self.variables, out)

    # -- structural conversions

    def extend(self, variables):
        """The same polynomial in a larger ring (old variables by name)."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in enumerate(e):
                ne[idx[i]] = k
            out[tuple(ne)] = c
        return DiffPoly(self.base, variables, out)

    def substitute(self, mapping):
        """Evaluate with each variable replaced per ``mapping``.

        Values may be DiffPoly or DiffRatFunc objects of one common
        target ring (variables missing from the mapping must not occur).
        The result is a DiffPoly when every value is polynomial.
        """
        values = []
        target = None
        for v in self.variables:
            val = mapping.get(v)
            values.append(val)
            if val is not None:
                target = val
        if target is None:
            raise UnknownVariable("substitution mapping is empty")
        t_base, t_vars = _ring_of(target)
        acc = DiffRatFunc.from_poly(DiffPoly.zero(t_base, t_vars))
        for e, c in self.terms.items():
            term = DiffRatFunc.from_poly(DiffPoly.const(t_base, t_vars, c))
            for i, k in enumerate(e):
                if not k:
                    continue
                if values[i] is None:
                    raise UnknownVariable(
                        f"no substitution value for variable {self.variables[i]!r}"
                    )
                v = values[i]
                if isinstance(v, DiffPoly):
                    v = DiffRatFunc.from_poly(v)
                term = term * v ** k
            acc = acc + term
        poly = acc.as_polynomial()
        if poly is not None and all(
            isinstance(v, DiffPoly) for v in values if v is not None
        ):
            return poly
        return acc

    # -- identity and printing

    def __eq__(self, other):
        if isinstance(other, DiffRatFunc):
            return other == self
        if isinstance(other, DiffPoly):
            if self.base != other.base or self.variables != other.variables:
                return False
            return self.terms == other.terms
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self.terms == b.terms

    def __hash__(self):
        return hash((self.base, self.variables, frozenset(self.terms.items())))

    def __repr__(self):
        return f"<diffpoly {self}>"

    def sorted_terms(self):
        """Terms in graded-lex order (y1 < y2 < ...), highest first."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def leading_coefficient(self):
        if self.is_zero():
            raise DivisionByZero("zero polynomial has no leading coefficient")
        return self.sorted_terms()[0][1]

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}")
                for v, k in zip(self.variables, e)
                if k
            )
            neg, body = _term_str(self.base, c, mono)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)


def _term_str(base, c, mono):
    if base.var is None:
        return _coeff_term_str(c, mono)
    neg = base.coeff_display_negative(c)
    cpos = -c if neg else c
    s = cpos.str(base.var)
    if not mono:
        return neg, s
    if s == "1":
        return neg, mono
    if ("+" in s) or (" - " in s) or ("/" in s) or s.startswith("-") or "*" in s:
        s = f"({s})"
    return neg, f"{s}*{mono}"


def _ring_of(value):
    if isinstance(value, DiffPoly):
        return value.base, value.variables
    return value.num.base, value.num.variables


# ---------------------------------------------------------------------------
# rational differential functions

class DiffRatFunc:
    """Ratio of two differential polynomials from one ring.

    Fully gcd-reduced in the univariate case; in several variables only
    the common monomial content is cancelled and equality falls back to
    cross-multiplication.  The denominator's graded-lex leading
    coefficient is normalised to 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        num._check_ring(den)
        if den.is_zero():
            raise DivisionByZero("denominator is the zero polynomial")
        num, den = _reduce_fraction(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def from_poly(p):
        return DiffRatFunc(p, DiffPoly.const(p.base, p.variables, 1))

    @property
    def base(self):
        return self.num.base

    @property
    def variables(self):
        return self.num.variables

    def is_zero(self):
        return self.num.is_zero()

    def as_polynomial(self):
        """The underlying DiffPoly when the denominator is constant, else None."""
        if not self.den.is_constant():
            return None
        c = self.den.constant_coefficient()
        inv = 1 / c if isinstance(c, RatFunc) else c.inverse()
        return self.num * inv

    def _coerce(self, other):
        if isinstance(other, DiffRatFunc):
            return other
        if isinstance(other, DiffPoly):
            return DiffRatFunc.from_poly(other)
        try:
            return DiffRatFunc.from_poly(DiffPoly.const(self.base, self.variables, other))
        except FieldMismatch:
            return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return DiffRatFunc(self.num * b.den + b.num * self.den, self.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return DiffRatFunc(-self.num, self.den)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return DiffRatFunc(self.num * b.num, self.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if b.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return DiffRatFunc(self.num * b.den, self.den * b.num)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        return b / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return DiffRatFunc(self.den, self.num) ** (-n)
        return DiffRatFunc(self.num ** n, self.den ** n)

    def coeff_derivation(self):
        nd = self.num.coeff_derivation()
        dd = self.den.coeff_derivation()
        return DiffRatFunc(nd * self.den - self.num * dd, self.den * self.den)

    def partial(self, name):
        np = self.num.partial(name)
        dp = self.den.partial(name)
        return DiffRatFunc(np * self.den - self.num * dp, self.den * self.den)

    def substitute(self, mapping):
        top = self.num.substitute(mapping)
        bot = self.den.substitute(mapping)
        if isinstance(top, DiffPoly):
            top = DiffRatFunc.from_poly(top)
        if isinstance(bot, DiffPoly):
            bot = DiffRatFunc.from_poly(bot)
        if bot.is_zero():
            raise DenominatorVanishesIdentically(
                "substitution makes the denominator vanish identically"
            )
        return top / bot

    def __eq__(self, other):
        if isinstance(other, (DiffPoly, DiffRatFunc)):
            o_base, o_vars = _ring_of(other)
            if self.base != o_base or self.variables != o_vars:
                return False
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if self.num.terms == b.num.terms and self.den.terms == b.den.terms:
            return True
        return (self.num * b.den) == (b.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"<diffratfunc {self}>"

    def __str__(self):
        num_s = str(self.num)
        if self.den.is_constant() and (self.den.constant_coefficient() - self.base.one()).is_zero():
            return num_s
        den_s = str(self.den)
        if _composite(num_s):
            num_s = f"({num_s})"
        if _composite(den_s):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"


def _single_variable(p, q):
    used = set()
    for poly in (p, q):
        used |= poly.used_variables()
    if len(used) > 1:
        return None
    if not used:
        return p.variables[0] if p.variables else None
    return used.pop()


def univar_dense(p, name):
    """Coefficient list (lowest first) of a DiffPoly univariate in ``name``."""
    i = p._var_index(name)
    n = p.degree_in(name)
    out = [p.base.zero() for _ in range(n + 1)]
    for e, c in p.terms.items():
        out[e[i]] = out[e[i]] + c
    return out


def dense_to_diffpoly(base, variables, name, coeffs):
    i = tuple(variables).index(name)
    terms = {}
    for k, c in enumerate(coeffs):
        e = [0] * len(variables)
        e[i] = k
        terms[tuple(e)] = c
    return DiffPoly(base, variables, terms)


def _dense_gcd(a, b):
    def trim(cs):
        while cs and cs[-1].is_zero():
            cs.pop()
        return cs

    def dmod(x, y):
        x = list(x)
        inv = y[-1].inverse()
        while len(x) >= len(y) and x:
            k = len(x) - len(y)
            f = x[-1] * inv
            for i, c in enumerate(y):
                x[i + k] = x[i + k] - f * c
            trim(x)
        return x

    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, dmod(a, b)
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


def _reduce_fraction(num, den):
    base, variables = num.base, num.variables
    if num.is_zero():
        return num, DiffPoly.const(base, variables, 1)
    name = _single_variable(num, den)
    if name is not None and variables:
        a = univar_dense(num, name)
        b = univar_dense(den, name)
        g = _dense_gcd(a, b)
        if len(g) > 1:
            gp = dense_to_diffpoly(base, variables, name, g)
            num = _exact_div_univar(num, gp, name)
            den = _exact_div_univar(den, gp, name)
    else:
        # multivariate: cancel common monomial content only
        def content(p):
            it = iter(p.terms)
            m = list(next(it))
            for e in it:
                m = [min(x, y) for x, y in zip(m, e)]
            return m

        cn, cd = content(num), content(den)
        shift = [min(x, y) for x, y in zip(cn, cd)]
        if any(shift):
            num = DiffPoly(base, variables, {
                tuple(x - s for x, s in zip(e, shift)): c for e, c in num.terms.items()
            })
            den = DiffPoly(base, variables, {
                tuple(x - s for x, s in zip(e, shift)): c for e, c in den.terms.items()
            })
    lead = den.leading_coefficient()
    inv = lead.inverse()
    num = num * inv
    den = den * inv
    return num, den


def _exact_div_univar(p, g, name):
    base, variables = p.base, p.variables
    a = univar_dense(p, name)
    b = univar_dense(g, name)
    out = [base.zero() for _ in range(len(a) - len(b) + 1)]
    a = list(a)
    inv = b[-1].inverse()
    while a and len(a) >= len(b):
        k = len(a) - len(b)
        f = a[-1] * inv
        out[k] = f
        for i, c in enumerate(b):
            a[i + k] = a[i + k] - f * c
        while a and a[-1].is_zero():
            a.pop()
    return dense_to_diffpoly(base, variables, name, out)


# ---------------------------------------------------------------------------
# module-level operations

def coeff_derivation(p):
    """P with the base derivation applied to its coefficients."""
    return p.coeff_derivation()


def partial_derivative(p, name):
    """Formal partial derivative of ``p`` with respect to a ring variable."""
    return p.partial(name)


def substitute(f, h):
    """Exact composition f(h) of univariate rational differential functions.

    ``f`` must involve at most one ring variable; ``h`` replaces it.
    """
    if isinstance(f, DiffPoly):
        f = DiffRatFunc.from_poly(f)
    used = f.num.used_variables() | f.den.used_variables()
    if len(used) > 1:
        raise UnknownVariable("composition requires a univariate function")
    if not used:
        return f
    name = used.pop()
    return f.substitute({name: h})


def substitute_cleared(f_num, f_den, r, s, d=2):
    """The cleared composition f(R/S) * S^d as a reduced rational function.

    ``f_num``/``f_den`` and ``r``/``s`` are UniPoly over one field; the
    caller picks the clearing power ``d``.  With d = 2 this is the form
    whose polynomiality a one-rule chain presentation needs.
    """
    def homog(a):
        deg = max(a.degree, 0)
        out = UniPoly.zero(r.field)
        for i, c in enumerate(a.coeffs):
            out = out + UniPoly.const(c, r.field) * r ** i * s ** (deg - i)
        return out

    if f_den.is_zero():
        raise DivisionByZero("f has a zero denominator")
    atilde = homog(f_num)
    btilde = homog(f_den)
    e = f_den.degree - f_num.degree + d
    if e >= 0:
        return RatFunc(atilde * s ** e, btilde)
    return RatFunc(atilde, btilde * s ** (-e))


# ---------------------------------------------------------------------------
# differential polynomials in one indeterminate u and its derivatives

class DiffIndeterminateExpr:
    """Polynomial in u, u', u'', ... with base-field coefficients.

    Term keys are exponent tuples indexed by derivative order.  The
    total formal derivative D sends u^(j) to u^(j+1) and applies the
    base derivation to coefficients.
    """

    __slots__ = ("base", "terms")

    def __init__(self, base, terms):
        clean = {}
        for e, c in terms.items():
            if not c.is_zero():
                e = tuple(e)
                while e and not e[-1]:
                    e = e[:-1]
                cur = clean.get(e)
                clean[e] = c if cur is None else cur + c
        self.base = base
        self.terms = {e: c for e, c in clean.items() if not c.is_zero()}

    @staticmethod
    def const(base, c):
        return DiffIndeterminateExpr(base, {(): base.coerce(c)})

    @staticmethod
    def u(base, order=0):
        e = (0,) * order + (1,)
        return DiffIndeterminateExpr(base, {e: base.one()})

    def order(self):
        """Largest derivative order appearing (-1 for a constant expression)."""
        top = -1
        for e in self.terms:
            if e:
                top = max(top, len(e) - 1)
        return top

    def coefficient_of_top(self):
        """Coefficient of the monomial u^(order) alone."""
        n = self.order()
        if n < 0:
            return self.base.zero()
        key = (0,) * n + (1,)
        return self.terms.get(key, self.base.zero())

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, DiffIndeterminateExpr):
            return other
        return DiffIndeterminateExpr.const(self.base, other)

    def __add__(self, other):
        b = self._coerce(other)
        out = dict(self.terms)
        for e, c in b.terms.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return DiffIndeterminateExpr(self.base, out)

    __radd__ = __add__

    def __neg__(self):
        return DiffIndeterminateExpr(self.base, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        b = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in b.terms.items():
                n = max(len(e1), len(e2))
                e = tuple(
                    (e1[i] if i < len(e1) else 0) + (e2[i] if i < len(e2) else 0)
                    for i in range(n)
                )
                c = c1 * c2
                cur = out.get(e)
                out[e] = c if cur is None else cur + c
        return DiffIndeterminateExpr(self.base, out)

    __rmul__ = __mul__

    def total_derivative(self):
        """D: shift u^(j) -> u^(j+1) by Leibniz, derive coefficients."""
        out = DiffIndeterminateExpr(self.base, {})
        for e, c in self.terms.items():
            dc = self.base.derive(c)
            if not dc.is_zero():
                out = out + DiffIndeterminateExpr(self.base, {e: dc})
            for j, k in enumerate(e):
                if not k:
                    continue
                ne = list(e) + [0] * (j + 2 - len(e))
                ne[j] -= 1
                ne[j + 1] += 1
                out = out + DiffIndeterminateExpr(
                    self.base, {tuple(ne): c * k}
                )
        return out

    def __eq__(self, other):
        b = self._coerce(other)
        return self.terms == b.terms

    def __hash__(self):
        return hash((self.base, frozenset(self.terms.items())))

    def __repr__(self):
        return f"<u-expr {self}>"

    def __str__(self):
        if not self.terms:
            return "0"
        def key(ec):
            e = ec[0]
            return (sum(e), e)
        parts = []
        for e, c in sorted(self.terms.items(), key=key, reverse=True):
            mono = "*".join(
                ("u" + "'" * j if k == 1 else "u" + "'" * j + f"^{k}")
                for j, k in enumerate(e)
                if k
            )
            neg, body = _term_str(self.base, c, mono)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)


def riccati_reduce(coeffs, base):
    """Order-(n-1) equation satisfied by u = y'/y for a monic linear ODE.

    ``coeffs`` lists a_0 .. a_n of y^(n) + a_(n-1) y^(n-1) + ... + a_0 y,
    with a_n = 1.  Uses the recursion r_0 = 1, r_(k+1) = D(r_k) + u*r_k
    and returns the sum of a_k * r_k.
    """
    coeffs = [base.coerce(c) for c in coeffs]
    if len(coeffs) < 2:
        raise NotMonic("a linear equation needs order >= 1")
    if not (coeffs[-1] - base.one()).is_zero():
        raise NotMonic("leading coefficient must be 1")
    u = DiffIndeterminateExpr.u(base)
    r = DiffIndeterminateExpr.const(base, 1)
    total = DiffIndeterminateExpr(base, {})
    for a in coeffs[:-1]:
        total = total + DiffIndeterminateExpr(base, {e: a * c for e, c in r.terms.items()})
        r = r.total_derivative() + u * r
    return total + r
