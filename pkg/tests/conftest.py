import random
from fractions import Fraction

import pytest

import pfaffkit as pk
from pfaffkit.diffalg import DiffPoly


@pytest.fixture(scope="session")
def sqrt2():
    return pk.nf_new([-2, 0, 1], name="r")


@pytest.fixture(scope="session")
def cbrt2():
    return pk.nf_new([-2, 0, 0, 1], name="c")


def rand_fraction(rng, span=6, nonzero=False):
    while True:
        q = Fraction(rng.randint(-span, span), rng.randint(1, span))
        if q or not nonzero:
            return q


def rand_scalar(rng, field, span=6, nonzero=False):
    while True:
        if field is None:
            s = pk.AlgebraicScalar.rational(rand_fraction(rng, span))
        else:
            s = field.scalar(*[rand_fraction(rng, span) for _ in range(field.degree)])
        if not (nonzero and s.is_zero()):
            return s


def rand_unipoly(rng, field, max_deg=4, span=5):
    deg = rng.randint(0, max_deg)
    coeffs = [rand_scalar(rng, field, span) for _ in range(deg + 1)]
    return pk.UniPoly(field, coeffs)


def rand_diffpoly(rng, base, variables, max_deg=3, max_terms=4, span=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        expo = tuple(rng.randint(0, max_deg) for _ in variables)
        c = base.coerce(rand_fraction(rng, span))
        if base.var is not None and rng.random() < 0.5:
            c = c * base.gen() ** rng.randint(0, 2)
        terms[expo] = c
    return DiffPoly(base, variables, terms) + DiffPoly.zero(base, variables)


def ode(text):
    """Shortcut: parse an order-one equation command string."""
    from pfaffkit.parser import parse_ode_text

    return parse_ode_text(text)


def solve_exact(rows, rhs):
    """Gaussian elimination over exact scalars; returns the solution vector."""
    n = len(rows)
    m = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = None
        for i in range(r, n):
            if not aug[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [v * inv for v in aug[r]]
        for i in range(n):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        assert aug[i][m].is_zero(), "inconsistent linear system"
    sol = [None] * m
    for row, c in enumerate(piv_cols):
        sol[c] = aug[row][m]
    zero = rhs[0] - rhs[0]
    return [s if s is not None else zero for s in sol]
