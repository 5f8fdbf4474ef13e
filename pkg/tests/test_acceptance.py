"""Acceptance criteria, one test per criterion, exact arithmetic throughout.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Stated runtime caps are asserted, not aspirational.
"""

import random
import time
from fractions import Fraction

from dfields.algebra import (
    check_algebra,
    check_assumption_res_field_k,
    local_decompose,
)
from dfields.cli import fixture_names, fixture_text, parse, print_document, run, run_fixture_corpus
from dfields.dring import make_doperator, product_rule_check, tensor_mul
from dfields.dvariety import (
    make_dvariety,
    rational_sharp_points,
    weil_descent,
    zero_section,
)
from dfields.poly import (
    GREVLEX,
    LEX,
    Ideal,
    elimination_ideal,
    format_poly,
    normal_form,
    parse_polynomial,
)
from dfields.prolongation import BaseDStructure, nabla, prolong
from dfields.ucd import check_instance, ucd_instance

from conftest import operator_fixtures, random_poly


def P(text, variables=None):
    return parse_polynomial(text, variables)


def _report(number, message):
    print(f"ACCEPTANCE {number} PASS: {message}")


def test_criterion_1_algebra_axioms(dual, twonil, q3, dual_x_q, trunc3, gauss):
    start = time.perf_counter()
    fixtures = [(dual, 1), (twonil, 1), (q3, 3), (dual_x_q, 2), (trunc3, 1)]
    for algebra, expected_components in fixtures:
        assert check_algebra(algebra).is_valid
        comps = local_decompose(algebra)
        assert len(comps) == expected_components
        assert all(c.residue_dim == 1 for c in comps)
    gauss_comps = local_decompose(gauss)
    assert gauss_comps[0].residue_dim == 2
    assert not check_assumption_res_field_k(gauss).all_residue_fields_rational
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(1, f"five standard algebras decompose as (1, 1, 3, 2, 1) in {elapsed:.3f}s")


def test_criterion_2_product_rule(dual, twonil, q3, dual_x_q, trunc3):
    start = time.perf_counter()
    rng = random.Random(24680)
    fixtures = operator_fixtures(dual, twonil, q3, dual_x_q, trunc3)
    variables = ("x", "y")
    for name, algebra, op, oracle in fixtures:
        for _ in range(50):
            f = random_poly(rng, variables, max_degree=3)
            g = random_poly(rng, variables, max_degree=3)
            assert product_rule_check(op, f, g), name
            image = op.apply(f)
            structural = tensor_mul(op.apply(f), op.apply(g), op.ideal)
            direct = op.apply(f * g)
            assert all(a == b for a, b in zip(structural.comps, direct.comps)), name
            for got, want in zip(image.comps, oracle(f)):
                assert got == want, name
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    _report(2, f"50 random product-rule and oracle checks per algebra in {elapsed:.2f}s")


def test_criterion_3_prolongation_components(dual, qxq):
    parabola = Ideal(("x", "y"), ["y - x^2"])
    result = prolong(BaseDStructure.trivial(dual), parabola)
    got = {format_poly(c.monic()) for _, comps in result.per_generator for c in comps}
    expected = {
        format_poly(P("y_0 - x_0^2", result.variables).monic()),
        format_poly(P("y_1 - 2*x_0*x_1", result.variables).monic()),
    }
    assert got == expected

    twisted = prolong(BaseDStructure.trivial(qxq), parabola)
    got = {format_poly(c.monic()) for _, comps in twisted.per_generator for c in comps}
    expected = {
        format_poly(P("y_0 - x_0^2", twisted.variables).monic()),
        format_poly(P("y_1 - x_1^2", twisted.variables).monic()),
    }
    assert got == expected
    _report(3, "tangent-bundle and product prolongations match exactly")


def test_criterion_4_nabla_soundness(dual, qxq, trunc3):
    parabola = Ideal(("x", "y"), ["y - x^2"])
    cubic = Ideal(("x", "y"), ["y - x^3"])
    cases = [
        (dual, parabola, {"x": ("x", "1"), "y": ("y", "2*x")},
         [(a, a * a) for a in (-2, -1, 0, 1, 2)]),
        (dual, cubic, {"x": ("x", "1"), "y": ("y", "3*x^2")},
         [(a, a ** 3) for a in (-1, 1, 2)]),
        (trunc3, parabola, {"x": ("x", "1", "0"), "y": ("y", "2*x", "1")},
         [(a, a * a) for a in (0, 1, 3)]),
        (qxq, parabola, {"x": ("x", "x"), "y": ("y", "y")},
         [(a, a * a) for a in (-1, 2)]),
    ]
    pairs = 0
    for algebra, ideal, images, points in cases:
        base = BaseDStructure.trivial(algebra)
        op = make_doperator(algebra, ideal, images)
        prolonged = prolong(base, ideal)
        # pointwise soundness
        for point in points:
            image = nabla(op, point)
            coords = dict(zip(prolonged.variables, image))
            assert all(
                g.evaluate(coords) == 0 for g in prolonged.prolonged_ideal.generators
            )
            pairs += 1
        # symbolic soundness: substituting the images into every component
        subs = {}
        for level in range(algebra.dim):
            for v in ideal.variables:
                subs[f"{v}_{level}"] = op.images[v].comps[level]
        for _, comps in prolonged.per_generator:
            for comp in comps:
                assert ideal.contains(comp.substitute(subs).on_variables(ideal.variables))
    assert pairs >= 10
    _report(4, f"{pairs} point images satisfy the prolonged ideal; symbolic form holds")


def test_criterion_5_sharp_point_computations(dual):
    line = Ideal(("x",), [])
    euler = make_dvariety(dual, line, {"x": ("x", "x")})
    result = rational_sharp_points(euler)
    assert result.points == ((0,),)

    parabola = Ideal(("x", "y"), ["y - x^2"])
    flow = make_dvariety(dual, parabola, {"x": ("x", "1"), "y": ("y", "2*x")})
    result = rational_sharp_points(flow)
    assert result.is_empty and result.locus.is_trivial()

    circle = Ideal(("x", "y"), ["x^2 + y^2 - 1"])
    still = make_dvariety(dual, circle, zero_section(dual, circle))
    result = rational_sharp_points(still)
    assert result.dimension == 1
    assert all(
        g.evaluate({"x": Fraction(1), "y": Fraction(0)}) == 0
        for g in result.locus.generators
    )
    _report(5, "scaling flow {0}, parabola flow empty, circle locus dimension 1")


def test_criterion_6_weil_descent(dual):
    fixtures = [
        (P("a^2 + 1"), ("a", "0"), ("x",), ["x - a"], {"x": ("x", "0")}),
        (P("a^2 - 2"), ("a", "0"), ("x",), [], {"x": ("x", "a*x")}),
    ]
    for minpoly, alpha_images, xvars, gens, section in fixtures:
        result = weil_descent(dual, minpoly, alpha_images, xvars, gens, section)
        descended_sharp = rational_sharp_points(result.descended)
        assert descended_sharp.zero_dimensional
        originals = [result.to_original(p) for p in descended_sharp.points]
        assert all(result.is_sharp_over_extension(p) for p in originals)
        assert len(originals) == len(descended_sharp.points)
        for p, orig in zip(descended_sharp.points, originals):
            assert result.to_descended(orig) == p
    _report(6, "sharp-point counts agree across both descents; tables invert")


def test_criterion_7_instance_checking(dual):
    base = BaseDStructure.trivial(dual)
    line = Ideal(("x",), [])
    inst = ucd_instance(
        base, line, Ideal(("x_0", "x_1"), ["x_1 - x_0^2"]), witness=(0, 0)
    )
    report = check_instance(inst)
    assert report.verdict == "verified"
    assert report.exit_code == 0
    assert report.entry("Y_irreducible").detail == "principal-factorisation"

    broken = ucd_instance(base, line, Ideal(("x_0", "x_1"), ["x_0"]), witness=(0, 0))
    broken_report = check_instance(broken)
    assert broken_report.verdict == "refuted"
    assert broken_report.exit_code == 2
    assert "x_0" in broken_report.entry("dominance_pi_0").detail

    # the same outcomes through the command layer
    assert run("ucd check", parse(fixture_text("ode_quadratic.dr"))).exit_code == 0
    assert run("ucd check", parse(fixture_text("ode_broken.dr"))).exit_code == 2
    _report(7, "quadratic-flow instance verified (exit 0); broken dominance refuted (exit 2)")


def test_criterion_8_groebner_engine():
    start = time.perf_counter()
    elim = elimination_ideal(Ideal(("x", "y", "z"), ["y - x^2", "y^2 - z"]), ("x", "z"))
    assert [format_poly(g) for g in elim.generators] == ["x^4 - z"]

    rng = random.Random(13579)
    for _ in range(20):
        variables = ("x", "y", "z")
        gens = [random_poly(rng, variables) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if not g.is_zero()] or [P("x", variables)]
        ideal = Ideal(variables, gens)
        grev = list(ideal.groebner_basis(GREVLEX))
        lex = list(ideal.groebner_basis(LEX))
        for g in ideal.generators:
            assert normal_form(g, grev, GREVLEX).is_zero()
            assert normal_form(g, lex, LEX).is_zero()
        for g in grev:
            assert normal_form(g, lex, LEX).is_zero()
        for g in lex:
            assert normal_form(g, grev, GREVLEX).is_zero()
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report(8, f"elimination quartic and 20 cross-membership checks in {elapsed:.2f}s")


def test_criterion_9_cli_round_trip():
    start = time.perf_counter()
    for name in fixture_names():
        text = fixture_text(name)
        doc = parse(text)
        printed = print_document(doc)
        assert parse(printed) == doc
        assert print_document(parse(printed)) == printed
    ok, lines = run_fixture_corpus()
    assert ok, "\n".join(lines)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report(9, f"{len(fixture_names())} fixture files round-trip and run in {elapsed:.2f}s")
