"""Algebra axioms, presentations, and the local decomposition."""

from fractions import Fraction

import pytest

from dfields.algebra import (
    AlgebraError,
    FiniteDimAlgebra,
    check_algebra,
    check_assumption_res_field_k,
    from_presentation,
    local_decompose,
    mul,
    product_algebra,
    rational_field_algebra,
    residue_projection,
    apply_residue_projection,
)
from dfields.poly import format_poly, univariate_coeffs


def F(x):
    return Fraction(x)


# ---------------------------------------------------------------------------
# axioms


def test_dual_numbers_valid(dual):
    assert check_algebra(dual).is_valid
    assert dual.dim == 2
    assert dual.unit == (1, 0)


def test_product_of_rationals_valid(qxq):
    assert check_algebra(qxq).is_valid
    assert qxq.unit == (1, 1)


def test_altered_dual_table_is_still_a_valid_algebra():
    # flipping e*e from 0 to e presents Q[e]/(e^2 - e), which satisfies all
    # three axiom families; nothing is reported
    a = [[[F(1), F(0)], [F(0), F(1)]], [[F(0), F(1)], [F(0), F(1)]]]
    report = check_algebra(FiniteDimAlgebra(a, (1, 0)))
    assert report.is_valid


def test_broken_unit_row_reported_with_witness():
    # 1*e = 0 violates the unit law at (j, k) = (1, 1)
    a = [[[F(1), F(0)], [F(0), F(0)]], [[F(0), F(0)], [F(0), F(0)]]]
    report = check_algebra(FiniteDimAlgebra(a, (1, 0)))
    assert not report.is_valid
    assert ("unit", (1, 1)) in {(v.kind, v.indices) for v in report.violations}


def test_broken_associativity_reported_with_witness():
    # e*e = 1 with 1*e = 0 cannot be associative: (ee)e = e but e(ee) = 0
    a = [[[F(1), F(0)], [F(0), F(0)]], [[F(0), F(0)], [F(1), F(0)]]]
    report = check_algebra(FiniteDimAlgebra(a, (1, 0)))
    kinds = {v.kind for v in report.violations}
    assert "associativity" in kinds


def test_noncommutative_tensor_reported():
    a = [[[F(1), F(0)], [F(0), F(1)]], [[F(0), F(0)], [F(0), F(0)]]]
    report = check_algebra(FiniteDimAlgebra(a, (1, 0)))
    assert any(v.kind == "commutativity" for v in report.violations)


def test_dimension_mismatch_is_input_error():
    with pytest.raises(AlgebraError):
        FiniteDimAlgebra([[[F(1)]]], (1, 0))


# ---------------------------------------------------------------------------
# multiplication


def test_dual_numbers_square_of_nilpotent(dual):
    eps = dual.basis_element(1)
    assert (eps * eps).is_zero()


def test_unit_is_neutral(dual, q3, trunc3):
    for algebra in (dual, q3, trunc3):
        for i in range(algebra.dim):
            v = algebra.basis_element(i)
            assert mul(algebra, algebra.one(), v) == v


def test_orthogonal_idempotents_in_product(qxq):
    assert (qxq.basis_element(0) * qxq.basis_element(1)).is_zero()


# ---------------------------------------------------------------------------
# presentations


def test_presentation_dual_numbers():
    a = from_presentation(["e"], ["e^2"])
    assert a.dim == 2
    assert a.basis_names == ("1", "e")


def test_presentation_truncated():
    a = from_presentation(["e"], ["e^3"])
    assert a.dim == 3
    assert a.basis_names == ("1", "e", "e^2")


def test_presentation_gaussian():
    a = from_presentation(["y"], ["y^2 + 1"])
    assert a.dim == 2
    y = a.basis_element(1)
    assert (y * y).coords == (-1, 0)


def test_presentation_infinite_dimensional_names_variable():
    with pytest.raises(AlgebraError, match="'y'"):
        from_presentation(["x", "y"], ["x^2"])


def test_truncated_presentations_match_direct_table():
    for n in range(2, 7):
        a = from_presentation(["e"], [f"e^{n}"])
        assert a.dim == n
        for i in range(n):
            for j in range(n):
                expected = [F(0)] * n
                if i + j < n:
                    expected[i + j] = F(1)
                assert list(a.struct_consts[i][j]) == expected


# ---------------------------------------------------------------------------
# local decomposition


def test_component_counts_for_standard_algebras(dual, twonil, q3, dual_x_q, trunc3):
    expected = {id(dual): 1, id(twonil): 1, id(q3): 3, id(dual_x_q): 2, id(trunc3): 1}
    for algebra in (dual, twonil, q3, dual_x_q, trunc3):
        assert len(local_decompose(algebra)) == expected[id(algebra)]
        report = check_assumption_res_field_k(algebra)
        assert report.all_residue_fields_rational
        assert report.is_local == (expected[id(algebra)] == 1)


def test_dual_component_data(dual):
    (comp,) = local_decompose(dual)
    assert format_poly(comp.residue_poly) == "x"
    assert comp.residue_dim == 1
    assert len(comp.max_ideal_basis) == 1
    assert comp.max_ideal_basis[0].coords == (0, 1)
    assert dual.pi_index == 0


def test_product_components_and_projections(qxq):
    comps = local_decompose(qxq)
    assert [c.idempotent.coords for c in comps] == [(1, 0), (0, 1)]
    assert qxq.pi_index == 0
    assert residue_projection(qxq, 1) == ((F(0), F(1)),)
    assert apply_residue_projection(qxq, 1, (3, 7)) == (7,)


def test_gaussian_component(gauss):
    comps = local_decompose(gauss)
    assert len(comps) == 1
    assert format_poly(comps[0].residue_poly) == "y^2 + 1" or format_poly(
        comps[0].residue_poly
    ) == "x^2 + 1"
    assert comps[0].residue_dim == 2
    report = check_assumption_res_field_k(gauss)
    assert not report.all_residue_fields_rational
    assert report.residue_degrees == (2,)
    assert gauss.pi_index is None
    # the residue map of a field is an isomorphism
    assert residue_projection(gauss, 0) == ((F(1), F(0)), (F(0), F(1)))


def test_idempotent_partition_of_unity(dual, twonil, q3, dual_x_q, trunc3):
    for algebra in (dual, twonil, q3, dual_x_q, trunc3):
        comps = local_decompose(algebra)
        total = algebra.zero()
        for c in comps:
            assert c.idempotent.is_idempotent()
            total = total + c.idempotent
        assert total == algebra.one()
        for i, a in enumerate(comps):
            for j, b in enumerate(comps):
                if i != j:
                    assert (a.idempotent * b.idempotent).is_zero()
        for i in range(algebra.dim):
            v = algebra.basis_element(i)
            recombined = algebra.zero()
            for c in comps:
                recombined = recombined + c.idempotent * v
            assert recombined == v


def test_max_ideal_elements_are_nilpotent(dual, twonil, dual_x_q, trunc3):
    for algebra in (dual, twonil, dual_x_q, trunc3):
        for comp in local_decompose(algebra):
            for el in comp.max_ideal_basis:
                assert el.is_nilpotent()


def test_component_dimensions_sum(dual, twonil, q3, dual_x_q, trunc3, gauss):
    for algebra in (dual, twonil, q3, dual_x_q, trunc3, gauss):
        comps = local_decompose(algebra)
        assert sum(c.dim for c in comps) == algebra.dim
        for c in comps:
            assert c.dim == c.residue_dim + len(c.max_ideal_basis)


def test_residue_projection_is_multiplicative(dual, q3, dual_x_q, trunc3, gauss):
    for algebra in (dual, q3, dual_x_q, trunc3, gauss):
        for idx, comp in enumerate(local_decompose(algebra)):
            p_coeffs = univariate_coeffs(comp.residue_poly)

            def res_mul(u, v):
                # multiply in Q[x]/(P) by convolution then reduction
                prod = [Fraction(0)] * (2 * comp.residue_dim)
                for i, a in enumerate(u):
                    for j, b in enumerate(v):
                        prod[i + j] += a * b
                for k in range(len(prod) - 1, comp.residue_dim - 1, -1):
                    c = prod[k]
                    if c:
                        for t, pc in enumerate(p_coeffs):
                            prod[k - comp.residue_dim + t] -= c * pc
                        prod[k] = Fraction(0)
                return tuple(prod[: comp.residue_dim])

            for i in range(algebra.dim):
                for j in range(algebra.dim):
                    u = algebra.basis_element(i)
                    v = algebra.basis_element(j)
                    lhs = apply_residue_projection(algebra, idx, (u * v).coords)
                    rhs = res_mul(
                        apply_residue_projection(algebra, idx, u.coords),
                        apply_residue_projection(algebra, idx, v.coords),
                    )
                    assert lhs == rhs
            assert apply_residue_projection(algebra, idx, algebra.unit)[0] == 1


def test_pi_is_coordinate_zero_for_adapted_algebras(dual, q3, dual_x_q):
    for algebra in (dual, q3, dual_x_q):
        assert algebra.is_pi_adapted()
        assert residue_projection(algebra, algebra.pi_index) == (
            (F(1),) + (F(0),) * (algebra.dim - 1),
        )


def test_serialisation_round_trip(dual_x_q):
    data = dual_x_q.to_dict(with_components=True)
    rebuilt = FiniteDimAlgebra.from_dict(data)
    assert rebuilt.struct_consts == dual_x_q.struct_consts
    assert rebuilt.unit == dual_x_q.unit
    assert data["pi_index"] == 0
    assert len(data["components"]) == 2


def test_product_algebra_shortcut():
    q = rational_field_algebra()
    cube = product_algebra(q, q, q)
    assert cube.dim == 3
    assert check_algebra(cube).is_valid
    assert cube.unit == (1, 1, 1)
