"""Shared fixtures: the five standard coefficient algebras, operator
structures on small free rings, and closed-form oracles for them.

Each oracle computes the operator image of a polynomial by an independent
route (partial derivatives for derivations, substitution for
endomorphisms, second-order expansion for the truncated case) so the
structure-constant evaluation in the package has something to disagree
with."""

import random
from fractions import Fraction

import pytest

from dfields.algebra import from_presentation, product_algebra, rational_field_algebra
from dfields.dring import make_doperator
from dfields.poly import Ideal, MultiPoly, parse_polynomial


@pytest.fixture(scope="session")
def dual():
    return from_presentation(["e"], ["e^2"])


@pytest.fixture(scope="session")
def twonil():
    return from_presentation(["e1", "e2"], ["e1^2", "e1*e2", "e2^2"])


@pytest.fixture(scope="session")
def q3():
    q = rational_field_algebra()
    return product_algebra(q, q, q)


@pytest.fixture(scope="session")
def qxq():
    q = rational_field_algebra()
    return product_algebra(q, q)


@pytest.fixture(scope="session")
def dual_x_q():
    return product_algebra(from_presentation(["e"], ["e^2"]), rational_field_algebra())


@pytest.fixture(scope="session")
def trunc3():
    return from_presentation(["e"], ["e^3"])


@pytest.fixture(scope="session")
def gauss():
    return from_presentation(["y"], ["y^2 + 1"])


def _poly(text, variables):
    return parse_polynomial(text, variables)


def _derivation_oracle(images):
    """f maps to sum over v of images[v] * df/dv."""

    def oracle(f):
        total = MultiPoly.zero(f.variables)
        for v, img in images.items():
            total = total + img * f.partial_derivative(v)
        return total

    return oracle


def _substitution_oracle(images):
    def oracle(f):
        return f.substitute(images)

    return oracle


def _second_order_oracle(first, second):
    """The level-2 coordinate of a truncated expansion: the second image
    plus half the Hessian term of the first."""

    def oracle(f):
        total = MultiPoly.zero(f.variables)
        for v, img in second.items():
            total = total + img * f.partial_derivative(v)
        for v, pv in first.items():
            for w, pw in first.items():
                total = total + (pv * pw * f.partial_derivative(v).partial_derivative(w)).scale(
                    Fraction(1, 2)
                )
        return total

    return oracle


def operator_fixtures(dual, twonil, q3, dual_x_q, trunc3):
    """(name, algebra, operator, oracle) with oracle(f) -> expected comps."""
    fixtures = []

    ring2 = Ideal(("x", "y"), [])
    vars2 = ring2.variables

    # one derivation
    dx = _poly("y + 1", vars2)
    dy = _poly("x^2", vars2)
    op = make_doperator(dual, ring2, {"x": ("x", dx), "y": ("y", dy)})
    der = _derivation_oracle({"x": dx, "y": dy})
    fixtures.append(("dual", dual, op, lambda f, d=der: (f, d(f))))

    # two independent derivations
    d1 = {"x": _poly("1", vars2), "y": _poly("x", vars2)}
    d2 = {"x": _poly("y", vars2), "y": _poly("2", vars2)}
    op = make_doperator(
        twonil, ring2,
        {"x": ("x", d1["x"], d2["x"]), "y": ("y", d1["y"], d2["y"])},
    )
    o1, o2 = _derivation_oracle(d1), _derivation_oracle(d2)
    fixtures.append(("twonil", twonil, op, lambda f, a=o1, b=o2: (f, a(f), b(f))))

    # two endomorphisms
    s1 = {"x": _poly("x + 1", vars2), "y": _poly("y", vars2)}
    s2 = {"x": _poly("2*x", vars2), "y": _poly("y + x", vars2)}
    op = make_doperator(
        q3, ring2,
        {"x": ("x", s1["x"], s2["x"]), "y": ("y", s1["y"], s2["y"])},
    )
    e1, e2 = _substitution_oracle(s1), _substitution_oracle(s2)
    fixtures.append(("q3", q3, op, lambda f, a=e1, b=e2: (f, a(f), b(f))))

    # a derivation and an endomorphism
    dmap = {"x": _poly("1", vars2), "y": _poly("x*y", vars2)}
    smap = {"x": _poly("x^2", vars2), "y": _poly("y - 1", vars2)}
    op = make_doperator(
        dual_x_q, ring2,
        {"x": ("x", dmap["x"], smap["x"]), "y": ("y", dmap["y"], smap["y"])},
    )
    od, os_ = _derivation_oracle(dmap), _substitution_oracle(smap)
    fixtures.append(("dual_x_q", dual_x_q, op, lambda f, a=od, b=os_: (f, a(f), b(f))))

    # a truncated pair: level 1 and level 2
    u = {"x": _poly("y", vars2), "y": _poly("1", vars2)}
    v = {"x": _poly("x", vars2), "y": _poly("0", vars2)}
    op = make_doperator(
        trunc3, ring2,
        {"x": ("x", u["x"], v["x"]), "y": ("y", u["y"], v["y"])},
    )
    olin = _derivation_oracle(u)
    osec = _second_order_oracle(u, v)
    fixtures.append(("trunc3", trunc3, op, lambda f, a=olin, b=osec: (f, a(f), b(f))))

    return fixtures


@pytest.fixture(scope="session")
def fixture_operators(dual, twonil, q3, dual_x_q, trunc3):
    return operator_fixtures(dual, twonil, q3, dual_x_q, trunc3)


def random_poly(rng, variables, max_degree=3, max_terms=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = [0] * len(variables)
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            exp[rng.randrange(len(variables))] += 1
        coeff = Fraction(rng.randint(-4, 4))
        if coeff:
            key = tuple(exp)
            terms[key] = terms.get(key, Fraction(0)) + coeff
    return MultiPoly(tuple(variables), terms)


@pytest.fixture
def rng():
    return random.Random(987321)
