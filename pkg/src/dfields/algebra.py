"""Finite-dimensional commutative Q-algebras given by structure constants.

An algebra is a rank-3 tensor a[i][j][k] with e_i * e_j = sum_k a[i][j][k] e_k
plus the coordinates of 1.  The module checks the algebra axioms, builds
algebras from presentations Q[y1,..]/(relations), decomposes into local
factors (trace-form nilradical, primitive-element splitting, idempotent
lifting), and exposes the residue projections of the factors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .poly import (
    GREVLEX,
    Ideal,
    MultiPoly,
    _standard_monomials,
    factor_univariate,
    format_poly,
    parse_polynomial,
    uni_divmod,
    uni_ext_gcd,
    univariate_coeffs,
    univariate_poly,
)


class AlgebraError(Exception):
    """Structural problem with an algebra or a presentation."""


def _frac(x):
    return Fraction(x)


class FiniteDimAlgebra:
    """A commutative unital Q-algebra of finite dimension.

    ``struct_consts[i][j][k]`` is the e_k coordinate of e_i * e_j and
    ``unit`` holds the coordinates of 1.  The local decomposition is
    computed lazily and cached; ``pi_index`` names the local component
    whose residue projection is the distinguished coordinate-0 map,
    when such a component exists.
    """

    def __init__(self, struct_consts, unit, basis_names=None):
        a = [[[Fraction(c) for c in row] for row in plane] for plane in struct_consts]
        n = len(a)
        if n == 0:
            raise AlgebraError("algebra dimension must be positive")
        for plane in a:
            if len(plane) != n or any(len(row) != n for row in plane):
                raise AlgebraError("structure constants are not an n x n x n tensor")
        b = [Fraction(c) for c in unit]
        if len(b) != n:
            raise AlgebraError("unit vector length does not match dimension")
        if basis_names is None:
            basis_names = tuple(f"e{i}" for i in range(n))
        if len(basis_names) != n:
            raise AlgebraError("basis name count does not match dimension")
        self.dim = n
        self.struct_consts = tuple(tuple(tuple(row) for row in plane) for plane in a)
        self.unit = tuple(b)
        self.basis_names = tuple(basis_names)
        self.presentation = None
        self._components = None
        self._pi_index = None
        self._nonzero = tuple(
            (i, j, k, a[i][j][k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
            if a[i][j][k] != 0
        )

    # -- elements -----------------------------------------------------------

    def element(self, coords):
        return AlgebraElement(self, coords)

    def basis_element(self, i):
        coords = [Fraction(0)] * self.dim
        coords[i] = Fraction(1)
        return AlgebraElement(self, coords)

    def one(self):
        return AlgebraElement(self, self.unit)

    def zero(self):
        return AlgebraElement(self, [Fraction(0)] * self.dim)

    def mul_coords(self, u, v):
        out = [Fraction(0)] * self.dim
        for i, j, k, c in self._nonzero:
            ui = u[i]
            if ui:
                vj = v[j]
                if vj:
                    out[k] += c * ui * vj
        return out

    def multiplication_matrix(self, coords):
        """Matrix of multiplication by the given element."""
        n = self.dim
        m = [[Fraction(0)] * n for _ in range(n)]
        for i, j, k, c in self._nonzero:
            if coords[i]:
                m[k][j] += c * coords[i]
        return m

    # -- axioms -------------------------------------------------------------

    def is_pi_adapted(self):
        """Whether extracting coordinate 0 is an algebra map onto Q, i.e.
        the basis is adapted to a distinguished projection."""
        n = self.dim
        if self.unit[0] != 1:
            return False
        for i in range(n):
            for j in range(n):
                expected = Fraction(1) if (i == 0 and j == 0) else Fraction(0)
                if self.struct_consts[i][j][0] != expected:
                    return False
        return True

    # -- decomposition (lazy) -------------------------------------------------

    @property
    def components(self):
        if self._components is None:
            self._components = _decompose(self)
            for idx, comp in enumerate(self._components):
                if comp.residue_dim == 1 and list(comp.residue_matrix[0]) == [
                    Fraction(1)
                ] + [Fraction(0)] * (self.dim - 1):
                    self._pi_index = idx
                    break
        return self._components

    @property
    def pi_index(self):
        self.components
        return self._pi_index

    def is_local(self):
        return len(self.components) == 1

    # -- serialisation ---------------------------------------------------------

    def to_dict(self, with_components=False):
        data = {
            "dim": self.dim,
            "basis": list(self.basis_names),
            "a": [
                [[str(c) for c in row] for row in plane]
                for plane in self.struct_consts
            ],
            "b": [str(c) for c in self.unit],
        }
        if with_components:
            data["pi_index"] = self.pi_index
            data["components"] = [
                {
                    "idempotent": [str(c) for c in comp.idempotent.coords],
                    "dim": comp.dim,
                    "residue_poly": format_poly(comp.residue_poly),
                    "residue_dim": comp.residue_dim,
                    "max_ideal_basis": [
                        [str(c) for c in el.coords] for el in comp.max_ideal_basis
                    ],
                }
                for comp in self.components
            ]
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            [[[Fraction(c) for c in row] for row in plane] for plane in data["a"]],
            [Fraction(c) for c in data["b"]],
            data.get("basis"),
        )

    def __repr__(self):
        return f"FiniteDimAlgebra(dim={self.dim}, basis={list(self.basis_names)})"


class AlgebraElement:
    """An element of a FiniteDimAlgebra, stored by coordinates."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != algebra.dim:
            raise AlgebraError("coordinate length does not match algebra dimension")
        self.algebra = algebra
        self.coords = coords

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.coords, other.coords)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        return AlgebraElement(self.algebra, self.algebra.mul_coords(self.coords, other.coords))

    __rmul__ = __mul__

    def __pow__(self, n):
        result = self.algebra.one()
        for _ in range(n):
            result = result * self
        return result

    def scale(self, c):
        c = Fraction(c)
        return AlgebraElement(self.algebra, [c * x for x in self.coords])

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.algebra is other.algebra and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_idempotent(self):
        return (self * self).coords == self.coords

    def is_nilpotent(self):
        power = self
        for _ in range(self.algebra.dim):
            if power.is_zero():
                return True
            power = power * self
        return power.is_zero()

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            raise AlgebraError("elements of different algebras")

    def __repr__(self):
        return f"AlgebraElement({[str(c) for c in self.coords]})"


@dataclass(frozen=True)
class LocalComponent:
    """One local factor of the decomposition, with its residue data."""

    idempotent: AlgebraElement
    dim: int
    max_ideal_basis: tuple
    residue_poly: MultiPoly
    residue_dim: int
    residue_matrix: tuple  # rows: coordinates in Q[x]/(P), columns: algebra basis


@dataclass(frozen=True)
class AxiomViolation:
    kind: str  # "commutativity" | "associativity" | "unit"
    indices: tuple

    def describe(self):
        return f"{self.kind} fails at indices {self.indices}"


@dataclass(frozen=True)
class AlgebraReport:
    violations: tuple

    @property
    def is_valid(self):
        return not self.violations

    def describe(self):
        if self.is_valid:
            return "valid commutative unital algebra"
        return "; ".join(v.describe() for v in self.violations)


def check_algebra(algebra):
    """Check commutativity, associativity, and the unit law exactly;
    every violated identity is reported with witness indices."""
    a = algebra.struct_consts
    b = algebra.unit
    n = algebra.dim
    violations = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if a[i][j][k] != a[j][i][k]:
                    violations.append(AxiomViolation("commutativity", (i, j, k)))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    lhs = sum(a[i][j][t] * a[t][k][m] for t in range(n))
                    rhs = sum(a[j][k][t] * a[i][t][m] for t in range(n))
                    if lhs != rhs:
                        violations.append(AxiomViolation("associativity", (i, j, k, m)))
    for j in range(n):
        for k in range(n):
            total = sum(b[i] * a[i][j][k] for i in range(n))
            expected = Fraction(1) if j == k else Fraction(0)
            if total != expected:
                violations.append(AxiomViolation("unit", (j, k)))
    return AlgebraReport(tuple(violations))


def mul(algebra, u, v):
    """Product of two elements; accepts AlgebraElement or raw coordinates."""
    if not isinstance(u, AlgebraElement):
        u = algebra.element(u)
    if not isinstance(v, AlgebraElement):
        v = algebra.element(v)
    return u * v


# ---------------------------------------------------------------------------
# presentations


def _monomial_name(variables, exp):
    parts = [v if e == 1 else f"{v}^{e}" for v, e in zip(variables, exp) if e]
    return "*".join(parts) if parts else "1"


def from_presentation(generators, relations):
    """Build the algebra Q[generators]/(relations).

    The quotient must be finite-dimensional; the basis is the set of
    standard monomials of a Groebner basis of the relations, and the
    multiplication table comes from normal-form reduction of pairwise
    products.
    """
    variables = tuple(generators)
    rels = []
    for r in relations:
        if isinstance(r, str):
            r = parse_polynomial(r, variables)
        rels.append(r.on_variables(variables))
    ideal = Ideal(variables, rels)
    if ideal.is_trivial():
        raise AlgebraError("presentation collapses to the zero ring")
    basis = ideal.groebner_basis()
    lms = [g.leading_exponent(GREVLEX) for g in basis]
    for idx, v in enumerate(variables):
        has_pure_power = any(
            lm[idx] > 0 and all(e == 0 for p, e in enumerate(lm) if p != idx)
            for lm in lms
        )
        if not has_pure_power:
            raise AlgebraError(
                f"infinite-dimensional quotient: variable {v!r} is unbounded"
            )
    monomials = _standard_monomials(ideal)
    # 1 first, then by degree with earlier generators first
    monomials.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
    index = {m: i for i, m in enumerate(monomials)}
    n = len(monomials)

    def coords_of(p):
        vec = [Fraction(0)] * n
        for exp, c in p.terms.items():
            if exp not in index:
                raise AlgebraError("normal form left the standard-monomial span")
            vec[index[exp]] += c
        return vec

    struct = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    monos = [MultiPoly(variables, {m: Fraction(1)}) for m in monomials]
    for i in range(n):
        for j in range(i, n):
            prod = ideal.normal_form(monos[i] * monos[j])
            vec = coords_of(prod)
            for k in range(n):
                struct[i][j][k] = vec[k]
                struct[j][i][k] = vec[k]
    unit = coords_of(ideal.normal_form(MultiPoly.one(variables)))
    names = tuple(_monomial_name(variables, m) for m in monomials)
    algebra = FiniteDimAlgebra(struct, unit, names)
    algebra.presentation = (variables, tuple(rels))
    return algebra


def product_algebra(*factors):
    """Direct product of algebras, on the concatenation of their bases."""
    if not factors:
        raise AlgebraError("product of no algebras")
    n = sum(f.dim for f in factors)
    struct = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    unit = [Fraction(0)] * n
    offset = 0
    for f in factors:
        for i in range(f.dim):
            unit[offset + i] = f.unit[i]
            for j in range(f.dim):
                for k in range(f.dim):
                    struct[offset + i][offset + j][offset + k] = f.struct_consts[i][j][k]
        offset += f.dim
    return FiniteDimAlgebra(struct, unit)


def rational_field_algebra():
    """Q itself as a one-dimensional algebra."""
    return FiniteDimAlgebra([[[Fraction(1)]]], [Fraction(1)], ("1",))


# ---------------------------------------------------------------------------
# local decomposition


def _first_dependence(vectors):
    """Coefficients of the first linear dependence among successive rows,
    or None while they stay independent."""
    transposed = list(map(list, zip(*vectors)))
    ns = linalg.nullspace(transposed)
    if not ns:
        return None
    rel = ns[0]
    lead = max(i for i, c in enumerate(rel) if c != 0)
    return [c / rel[lead] for c in rel[: lead + 1]]


class _Quotient:
    """Coordinates for A/N given a basis of the ideal N."""

    def __init__(self, algebra, nil_basis):
        self.algebra = algebra
        self.nil_basis = nil_basis
        n = algebra.dim
        columns = [list(v) for v in nil_basis]
        self.rep_indices = []
        for i in range(n):
            e = [Fraction(1) if j == i else Fraction(0) for j in range(n)]
            if linalg.rank(list(map(list, zip(*(columns + [e]))))) > len(columns):
                columns.append(e)
                self.rep_indices.append(i)
        self.dim = len(self.rep_indices)
        self._to_coords = linalg.inverse(list(map(list, zip(*columns))))
        if self._to_coords is None:
            raise AlgebraError("nilradical basis is degenerate")

    def project(self, coords):
        full = linalg.mat_vec(self._to_coords, list(coords))
        return full[len(self.nil_basis):]

    def lift(self, qcoords):
        coords = [Fraction(0)] * self.algebra.dim
        for c, idx in zip(qcoords, self.rep_indices):
            coords[idx] += c
        return coords

    def mul(self, u, v):
        return self.project(self.algebra.mul_coords(self.lift(u), self.lift(v)))

    def one(self):
        return self.project(self.algebra.unit)


def _minimal_polynomial_in_quotient(quot, u):
    powers = [quot.one()]
    while True:
        dep = _first_dependence(powers)
        if dep is not None:
            return dep
        if len(powers) > quot.dim + 1:
            raise AlgebraError("minimal polynomial search exceeded quotient dimension")
        powers.append(quot.mul(powers[-1], u))


def _eval_poly_in_quotient(quot, coeffs, u):
    # Horner evaluation of a univariate coefficient list at u in A/N
    result = [Fraction(0)] * quot.dim
    for c in reversed(coeffs):
        result = quot.mul(result, u)
        one = quot.one()
        result = [r + c * o for r, o in zip(result, one)]
    return result


def _decompose(algebra):
    n = algebra.dim
    report = check_algebra(algebra)
    if not report.is_valid:
        raise AlgebraError(f"cannot decompose an invalid algebra: {report.describe()}")

    # nilradical: kernel of the trace form (characteristic 0)
    mult = [algebra.multiplication_matrix(algebra.basis_element(i).coords) for i in range(n)]
    trace_form = [
        [
            sum(linalg.mat_mul(mult[i], mult[j])[d][d] for d in range(n))
            for j in range(n)
        ]
        for i in range(n)
    ]
    nil_basis = linalg.nullspace(trace_form)
    quot = _Quotient(algebra, nil_basis)

    # primitive element for the semisimple quotient
    rng = random.Random(20230517)
    candidates = [quot.project(algebra.basis_element(i).coords) for i in range(n)]
    primitive = None
    minpoly = None
    attempts = 0
    while attempts < 100:
        if candidates:
            u = candidates.pop(0)
        else:
            coords = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
            u = quot.project(coords)
        attempts += 1
        m = _minimal_polynomial_in_quotient(quot, u)
        if len(m) - 1 == quot.dim:
            primitive, minpoly = u, m
            break
    if primitive is None:
        raise AlgebraError(
            "no primitive element found for the semisimple quotient after 100 attempts"
        )

    _, factors = factor_univariate(univariate_poly(minpoly, "x"), "x")
    if any(mult_ != 1 for _, mult_ in factors):
        raise AlgebraError("semisimple quotient has a repeated factor; trace form is wrong")

    # CRT idempotents in the quotient, then unique lifts through the nilradical
    components = []
    power_basis = [quot.one()]
    for _ in range(quot.dim - 1):
        power_basis.append(quot.mul(power_basis[-1], primitive))
    power_matrix = list(map(list, zip(*power_basis)))
    power_inv = linalg.inverse(power_matrix)

    for p, _ in factors:
        p_coeffs = univariate_coeffs(p, "x")
        q_coeffs, rem = uni_divmod(minpoly, p_coeffs)
        assert not rem
        g, u_coeffs, _ = uni_ext_gcd(q_coeffs, p_coeffs)
        assert g == [Fraction(1)]
        # idempotent polynomial u*q reduced mod the minimal polynomial
        prod = [Fraction(0)] * (len(u_coeffs) + len(q_coeffs) - 1)
        for i, uc in enumerate(u_coeffs):
            for j, qc in enumerate(q_coeffs):
                prod[i + j] += uc * qc
        _, idem_coeffs = uni_divmod(prod, minpoly)
        ebar = _eval_poly_in_quotient(quot, idem_coeffs, primitive)

        e = quot.lift(ebar)
        for _ in range(algebra.dim + 2):
            e2 = algebra.mul_coords(e, e)
            if e2 == e:
                break
            e3 = algebra.mul_coords(e2, e)
            e = [3 * a - 2 * b for a, b in zip(e2, e3)]
        else:
            raise AlgebraError("idempotent lifting did not converge")

        # component data
        mult_e = algebra.multiplication_matrix(e)
        image_rows = [linalg.mat_vec(mult_e, algebra.basis_element(i).coords) for i in range(n)]
        comp_dim = linalg.rank(image_rows)
        ideal_rows = [algebra.mul_coords(e, list(v)) for v in nil_basis]
        reduced, pivots = linalg.rref(ideal_rows) if ideal_rows else ([], [])
        max_ideal = tuple(
            AlgebraElement(algebra, reduced[r]) for r in range(len(pivots))
        )

        residue_dim = p.total_degree()
        rows = []
        for i in range(n):
            qc = quot.project(algebra.basis_element(i).coords)
            tpoly = linalg.mat_vec(power_inv, qc)
            _, rem_p = uni_divmod(tpoly, p_coeffs)
            rem_p = rem_p + [Fraction(0)] * (residue_dim - len(rem_p))
            rows.append(rem_p[:residue_dim])
        matrix = tuple(tuple(row[d] for row in rows) for d in range(residue_dim))

        residue_poly = p
        if residue_dim == 1:
            residue_poly = MultiPoly.variable("x")
        components.append(
            LocalComponent(
                idempotent=AlgebraElement(algebra, e),
                dim=comp_dim,
                max_ideal_basis=max_ideal,
                residue_poly=residue_poly,
                residue_dim=residue_dim,
                residue_matrix=matrix,
            )
        )

    # distinguished component first, remainder by descending idempotent coords
    def is_distinguished(comp):
        return comp.residue_dim == 1 and list(comp.residue_matrix[0]) == [
            Fraction(1)
        ] + [Fraction(0)] * (n - 1)

    components.sort(key=lambda c: tuple(c.idempotent.coords), reverse=True)
    components.sort(key=lambda c: 0 if is_distinguished(c) else 1)

    if sum(c.dim for c in components) != n:
        raise AlgebraError("component dimensions do not sum to the algebra dimension")
    return tuple(components)


def local_decompose(algebra):
    """The local factors of the algebra, distinguished component first."""
    return algebra.components


@dataclass(frozen=True)
class ResidueFieldReport:
    all_residue_fields_rational: bool
    residue_degrees: tuple
    is_local: bool


def check_assumption_res_field_k(algebra):
    """Do all local factors have residue field Q?  Also reports whether the
    algebra is local (the single-factor case)."""
    comps = algebra.components
    degrees = tuple(c.residue_dim for c in comps)
    return ResidueFieldReport(
        all_residue_fields_rational=all(d == 1 for d in degrees),
        residue_degrees=degrees,
        is_local=len(comps) == 1,
    )


def residue_projection(algebra, i):
    """Matrix of the residue projection of component i, rows indexed by the
    power basis of Q[x]/(P_i), columns by the algebra basis."""
    comps = algebra.components
    if not 0 <= i < len(comps):
        raise AlgebraError(f"component index {i} out of range")
    return comps[i].residue_matrix


def apply_residue_projection(algebra, i, coords):
    """Image of an element under the residue projection, as coefficients in
    the power basis of Q[x]/(P_i)."""
    matrix = residue_projection(algebra, i)
    return tuple(
        sum((row[j] * Fraction(coords[j]) for j in range(algebra.dim)), Fraction(0))
        for row in matrix
    )
