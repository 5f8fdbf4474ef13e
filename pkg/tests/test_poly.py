"""Polynomial arithmetic, Groebner machinery, and the ideal toolkit."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfields.poly import (
    GREVLEX,
    LEX,
    BudgetExceededError,
    EmptyVarietyError,
    GroebnerBudget,
    Ideal,
    MonomialOrder,
    MultiPoly,
    NotOnVarietyError,
    PolyParseError,
    decide_irreducibility,
    elimination_ideal,
    factor_univariate,
    format_poly,
    ideal_membership,
    is_smooth_point,
    jacobian_rank_at,
    krull_dimension,
    normal_form,
    parse_polynomial,
    radical_membership,
    rational_roots,
    solve_zero_dim,
    squarefree_part,
)

from conftest import random_poly


def P(text, variables=None):
    return parse_polynomial(text, variables)


# ---------------------------------------------------------------------------
# arithmetic


def test_product_difference_of_squares():
    x, y = MultiPoly.variable("x"), MultiPoly.variable("y")
    assert (x + y) * (x - y) == P("x^2 - y^2")


def test_partial_derivative():
    assert P("y - x^2", ("x", "y")).partial_derivative("x") == P("-2*x")


def test_substitution_expands_binomial():
    f = P("x^2", ("x",))
    assert f.substitute({"x": P("x0 + x1")}) == P("x0^2 + 2*x0*x1 + x1^2")


def test_substitution_is_ring_hom_on_samples(rng):
    sub = {"x": P("y - 1", ("x", "y")), "y": P("x*y", ("x", "y"))}
    for _ in range(20):
        f = random_poly(rng, ("x", "y"))
        g = random_poly(rng, ("x", "y"))
        assert (f + g).substitute(sub) == f.substitute(sub) + g.substitute(sub)
        assert (f * g).substitute(sub) == f.substitute(sub) * g.substitute(sub)


def test_pow_and_scale():
    x = MultiPoly.variable("x")
    assert x ** 0 == MultiPoly.one()
    assert (x + 1) ** 3 == P("x^3 + 3*x^2 + 3*x + 1")
    assert (x + 1).scale(Fraction(1, 2)) == P("1/2*x + 1/2")


def test_variable_union_alignment():
    f = P("x", ("x",)) + P("y", ("y",))
    assert f == P("x + y")
    assert f.used_variables() == {"x", "y"}


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(0, 5))
def test_constant_arithmetic_matches_fractions(a, b, n):
    fa = MultiPoly.constant(a)
    fb = MultiPoly.constant(b)
    assert (fa + fb).constant_value() == a + b
    assert (fa * fb).constant_value() == a * b
    assert (fa ** n).constant_value() == Fraction(a) ** n


# ---------------------------------------------------------------------------
# parsing and printing


def test_parse_rejects_implicit_multiplication():
    with pytest.raises(PolyParseError):
        P("2x")


def test_parse_rational_coefficients():
    assert P("3/2*x - 1/3") == MultiPoly.variable("x").scale(Fraction(3, 2)) - Fraction(1, 3)


def test_parse_error_carries_position():
    with pytest.raises(PolyParseError) as err:
        P("x + $")
    assert err.value.line == 1
    assert err.value.column == 5


def test_parse_unknown_variable_rejected():
    with pytest.raises(PolyParseError):
        P("x + z", ("x", "y"))


def test_format_round_trip(rng):
    for _ in range(25):
        f = random_poly(rng, ("x", "y", "z"))
        assert P(format_poly(f), ("x", "y", "z")) == f


def test_format_sorts_by_active_order():
    f = P("x + y^2", ("x", "y"))
    assert format_poly(f, GREVLEX) == "y^2 + x"
    assert format_poly(f, LEX) == "x + y^2"


# ---------------------------------------------------------------------------
# monomial orders


def test_grevlex_vs_lex_disagree_on_classic_pair():
    # x^2 beats y under grevlex (degree first) but also under lex; use the
    # pair where they differ: x*z vs y^2 with x > y > z
    a = (1, 0, 1)
    b = (0, 2, 0)
    assert GREVLEX.key(b) > GREVLEX.key(a)  # same degree, reverse-lex tie-break
    assert LEX.key(a) > LEX.key(b)


def test_block_order_eliminates_first_block():
    order = MonomialOrder("block", block=1)
    assert order.key((1, 0, 0)) > order.key((0, 5, 5))


# ---------------------------------------------------------------------------
# Groebner bases


def test_groebner_two_variables_plain():
    basis = Ideal(("x", "y"), ["x", "y"]).groebner_basis()
    assert [format_poly(g) for g in basis] == ["x", "y"]


def test_groebner_of_unit_ideal():
    basis = Ideal(("x",), ["3"]).groebner_basis()
    assert [format_poly(g) for g in basis] == ["1"]


def test_groebner_deterministic():
    a = Ideal(("x", "y", "z"), ["y - x^2", "y^2 - z"]).groebner_basis()
    b = Ideal(("x", "y", "z"), ["y - x^2", "y^2 - z"]).groebner_basis()
    assert a == b


def test_elimination_classic_quartic():
    ideal = Ideal(("x", "y", "z"), ["y - x^2", "y^2 - z"])
    elim = elimination_ideal(ideal, ("x", "z"))
    assert [format_poly(g) for g in elim.generators] == ["x^4 - z"]


def test_elimination_dominant_projection_gives_zero_ideal():
    elim = elimination_ideal(Ideal(("x", "y"), ["y - x^2"]), ("x",))
    assert not elim.generators


def test_elimination_keep_everything_is_identity():
    ideal = Ideal(("x",), ["x - 1"])
    elim = elimination_ideal(ideal, ("x",))
    assert elim.equals(ideal)


def test_membership_examples():
    assert ideal_membership("x^2", Ideal(("x",), ["x"]))
    assert not ideal_membership("x", Ideal(("x",), ["x^2"]))
    assert radical_membership("x", Ideal(("x",), ["x^2"]))
    assert ideal_membership("y - x^2", Ideal(("x", "y", "z"), ["y - x^2", "y^2 - z"]))


def test_krull_dimension_examples():
    assert krull_dimension(Ideal(("x", "y", "z"), [])) == 3
    assert krull_dimension(Ideal(("x", "y"), ["y - x^2"])) == 1
    assert krull_dimension(Ideal(("x", "y"), ["x", "y"])) == 0
    with pytest.raises(EmptyVarietyError):
        krull_dimension(Ideal(("x",), ["1"]))


def test_budget_exceeded_is_explicit():
    tiny = GroebnerBudget(max_degree=2, max_basis=2000)
    ideal = Ideal(("x", "y"), ["y^2 - x^3"], budget=tiny)
    with pytest.raises(BudgetExceededError):
        ideal.groebner_basis()


def _random_ideal(rng, nvars=3, ngens=3):
    variables = ("x", "y", "z")[:nvars]
    gens = [random_poly(rng, variables) for _ in range(rng.randint(1, ngens))]
    return Ideal(variables, [g for g in gens if not g.is_zero()] or ["x"])


def test_generators_reduce_to_zero_against_basis(rng):
    for _ in range(20):
        ideal = _random_ideal(rng)
        basis = list(ideal.groebner_basis())
        for g in ideal.generators:
            assert normal_form(g, basis).is_zero()


def test_cross_order_membership(rng):
    # every grevlex basis element is in the lex basis's ideal and back
    for _ in range(10):
        ideal = _random_ideal(rng)
        grev = list(ideal.groebner_basis(GREVLEX))
        lex = list(ideal.groebner_basis(LEX))
        for g in grev:
            assert normal_form(g, lex, LEX).is_zero()
        for g in lex:
            assert normal_form(g, grev, GREVLEX).is_zero()


def _sympy_groebner_set(gens, variables):
    import sympy

    symbols = sympy.symbols(" ".join(variables))
    if len(variables) == 1:
        symbols = (symbols,)
    exprs = []
    for g in gens:
        e = sympy.Integer(0)
        for exp, c in g.terms.items():
            mono = sympy.Integer(1)
            for v, p in zip(symbols, exp):
                mono *= v ** p
            e += sympy.Rational(c.numerator, c.denominator) * mono
        exprs.append(e)
    basis = sympy.groebner(exprs, *symbols, order="grevlex")
    out = set()
    for expr in basis.exprs:
        poly = sympy.Poly(expr, *symbols)
        terms = {}
        for exp, c in poly.terms():
            q = sympy.Rational(c)
            terms[tuple(int(x) for x in exp)] = Fraction(int(q.p), int(q.q))
        out.add(frozenset(MultiPoly(variables, terms).monic().terms.items()))
    return out


def test_reduced_basis_matches_independent_implementation(rng):
    # byte-identical reduced bases against a second, unrelated engine
    for _ in range(15):
        ideal = _random_ideal(rng)
        mine = {frozenset(g.terms.items()) for g in ideal.groebner_basis()}
        assert mine == _sympy_groebner_set(ideal.generators, ideal.variables)


def test_cyclic_four_system():
    gens = [
        "a + b + c + d",
        "a*b + b*c + c*d + d*a",
        "a*b*c + b*c*d + c*d*a + d*a*b",
        "a*b*c*d - 1",
    ]
    ideal = Ideal(("a", "b", "c", "d"), gens)
    basis = ideal.groebner_basis()
    assert len(basis) == 7
    mine = {frozenset(g.terms.items()) for g in basis}
    assert mine == _sympy_groebner_set(ideal.generators, ideal.variables)


def test_elimination_result_is_contained_and_keeps_pure_generators(rng):
    for _ in range(10):
        variables = ("x", "y", "z")
        gens = [random_poly(rng, variables) for _ in range(2)]
        pure = random_poly(rng, ("x", "z")).on_variables(variables)
        ideal = Ideal(variables, [g for g in gens + [pure] if not g.is_zero()] or ["x"])
        elim = ideal.elimination_ideal(("x", "z"))
        for g in elim.generators:
            assert ideal.contains(g.on_variables(variables))
        if not pure.is_zero():
            assert elim.contains(pure.on_variables(("x", "z")))


# ---------------------------------------------------------------------------
# Jacobians and smoothness


def test_smooth_parabola_origin():
    ideal = Ideal(("x", "y"), ["y - x^2"])
    assert jacobian_rank_at(ideal.generators, ideal.variables, (0, 0)) == 1
    assert is_smooth_point(ideal, (0, 0))


def test_cuspidal_cubic():
    ideal = Ideal(("x", "y"), ["y^2 - x^3"])
    assert jacobian_rank_at(ideal.generators, ideal.variables, (0, 0)) == 0
    assert not is_smooth_point(ideal, (0, 0))
    assert jacobian_rank_at(ideal.generators, ideal.variables, (1, 1)) == 1
    assert is_smooth_point(ideal, (1, 1))


def test_jacobian_requires_point_on_variety():
    ideal = Ideal(("x", "y"), ["y - x^2"])
    with pytest.raises(NotOnVarietyError):
        jacobian_rank_at(ideal.generators, ideal.variables, (1, 3))


def _bareiss_rank(matrix):
    """Fraction-free Gaussian elimination (Bareiss), as an independent rank."""
    m = [[Fraction(c) for c in row] for row in matrix]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    prev = Fraction(1)
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(rank + 1, rows):
            for c in range(col + 1, cols):
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) / prev
            m[r][col] = Fraction(0)
        prev = m[rank][col]
        rank += 1
        if rank == rows:
            break
    return rank


def test_jacobian_rank_matches_bareiss(rng):
    for _ in range(10):
        variables = ("x", "y", "z")
        gens = []
        for _ in range(2):
            f = random_poly(rng, variables)
            f = f - MultiPoly.constant(f.evaluate({v: 0 for v in variables}), variables)
            gens.append(f)
        gens = [g for g in gens if not g.is_zero()] or [P("x", variables)]
        point = (0, 0, 0)
        rank = jacobian_rank_at(gens, variables, point)
        rows = [
            [g.partial_derivative(v).evaluate({w: 0 for w in variables}) for v in variables]
            for g in gens
        ]
        assert rank == _bareiss_rank(rows)


# ---------------------------------------------------------------------------
# factorisation and solving


def test_factor_difference_of_squares():
    unit, factors = factor_univariate(P("x^2 - 1"))
    assert unit == 1
    assert [(format_poly(f), m) for f, m in factors] == [("x - 1", 1), ("x + 1", 1)]


def test_factor_irreducible_quadratic():
    _, factors = factor_univariate(P("x^2 + 1"))
    assert [(format_poly(f), m) for f, m in factors] == [("x^2 + 1", 1)]


def test_factor_tracks_units_and_multiplicity():
    unit, factors = factor_univariate(P("4*x^2 - 4*x + 1"))
    assert [(format_poly(f), m) for f, m in factors] == [("x - 1/2", 2)]
    assert unit == 4


def test_rational_roots_and_irrational_flag():
    roots, irrational = rational_roots(P("x^3 - 2*x^2 - x + 2"))
    assert roots == [-1, 1, 2]
    assert not irrational
    roots, irrational = rational_roots(P("x^2 - 2"))
    assert roots == []
    assert irrational


def test_squarefree_part():
    assert squarefree_part(P("x^3 - x^2")) == P("x^2 - x")


def test_solve_zero_dim_two_points():
    result = solve_zero_dim(Ideal(("x", "y"), ["x^2 - 1", "y - x"]))
    assert result.points == ((-1, -1), (1, 1))
    assert not result.has_nonrational


def test_solve_zero_dim_flags_irrational():
    result = solve_zero_dim(Ideal(("x",), ["x^2 - 2"]))
    assert result.points == ()
    assert result.has_nonrational


def test_solve_rejects_positive_dimension():
    with pytest.raises(ValueError):
        solve_zero_dim(Ideal(("x", "y"), ["y - x^2"]))


def test_solve_trivial_ideal_has_no_points():
    assert solve_zero_dim(Ideal(("x",), ["1"])).points == ()


def test_solve_points_satisfy_generators_and_bound(rng):
    for _ in range(8):
        u = random_poly(rng, ("x",), max_degree=3)
        v = random_poly(rng, ("y",), max_degree=3)
        if u.is_zero() or u.is_constant():
            u = P("x^2 - 1")
        if v.is_zero() or v.is_constant():
            v = P("y^2 - y")
        ideal = Ideal(("x", "y"), [u.on_variables(("x", "y")), v.on_variables(("x", "y"))])
        if ideal.is_trivial():
            continue
        result = solve_zero_dim(ideal)
        for point in result.points:
            coords = dict(zip(ideal.variables, point))
            assert all(g.evaluate(coords) == 0 for g in ideal.generators)
        assert len(result.points) <= u.total_degree() * v.total_degree()


# ---------------------------------------------------------------------------
# irreducibility (supported cases only)


@pytest.mark.parametrize(
    "gens,variables,status",
    [
        ([], ("x", "y"), "irreducible"),  # affine plane
        (["x + y - 1"], ("x", "y"), "irreducible"),  # linear
        (["y - x^2"], ("x", "y"), "irreducible"),  # principal
        (["x^2 - 1"], ("x",), "reducible"),
        (["x^2 + 1"], ("x",), "irreducible"),  # zero-dim, no rational point
        (["x^2 - 2", "y - x"], ("x", "y"), "irreducible"),  # conjugate pair
        (["x^2 - 1", "y - x"], ("x", "y"), "reducible"),
        (["1"], ("x",), "empty"),
    ],
)
def test_irreducibility_supported_cases(gens, variables, status):
    assert decide_irreducibility(Ideal(variables, gens)).status == status


def test_irreducibility_undetermined_outside_supported_cases():
    # two non-linear generators in three variables, positive-dimensional
    ideal = Ideal(("x", "y", "z"), ["x^2 + y^2 + z^2 - 1", "x*y - z^2"])
    assert decide_irreducibility(ideal).status == "undetermined"
