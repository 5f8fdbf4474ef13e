"""D-varieties: a variety together with a section of the projection from
its prolongation, i.e. an operator structure on its coordinate ring.

Includes the sharp-point machinery (points where the canonical operator
image agrees with the section), restriction to basic opens, the
minimal-prime closure check on supplied decompositions, and descent of a
D-variety along a finite extension Q(alpha)/Q with a verified operator
structure on Q(alpha).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .dring import (
    DOperator,
    DRingError,
    TensorElement,
    is_d_ideal,
    localize_dstructure,
    make_doperator,
    tensor_mul,
)
from .poly import (
    Ideal,
    MultiPoly,
    factor_univariate,
    format_poly,
    parse_polynomial,
    solve_zero_dim,
    univariate_coeffs,
)
from .prolongation import BaseDStructure, prolong


class DVarietyError(Exception):
    """Invalid section data or descent input."""


class DVariety:
    """A variety with a verified section into its prolongation.

    ``section`` maps each coordinate to its image components; the
    equivalent operator on the coordinate ring is kept alongside.
    """

    def __init__(self, algebra, ideal, section, operator):
        self.algebra = algebra
        self.ideal = ideal
        self.section = section
        self.operator = operator

    @property
    def variables(self):
        return self.ideal.variables

    def to_dict(self):
        return {
            "variables": list(self.variables),
            "generators": [format_poly(g) for g in self.ideal.generators],
            "section": {
                v: [format_poly(c) for c in t.comps]
                for v, t in sorted(self.section.items())
            },
        }

    def __repr__(self):
        gens = ", ".join(format_poly(g) for g in self.ideal.generators)
        return f"DVariety(vars={list(self.variables)}, V=<{gens}>)"


def zero_section(algebra, ideal):
    """The section matching the trivial structure: coordinate x maps to
    x * 1_D."""
    return {
        v: tuple(
            MultiPoly.variable(v, ideal.variables).scale(b) for b in algebra.unit
        )
        for v in ideal.variables
    }


def make_dvariety(algebra, ideal, section):
    """Build a D-variety after verifying the section property and that the
    section lands in the prolongation; cross-validated by constructing the
    corresponding ring operator, which runs its own checks."""
    images = {}
    for v in ideal.variables:
        if v not in section:
            raise DVarietyError(f"section missing coordinate {v!r}")
        comps = tuple(
            parse_polynomial(c, ideal.variables) if isinstance(c, str)
            else MultiPoly.constant(c) if not isinstance(c, MultiPoly)
            else c.on_variables(ideal.variables)
            for c in section[v]
        )
        images[v] = comps

    # route 1: section lands in the prolongation of the variety
    base = BaseDStructure.trivial(algebra)
    prolonged = prolong(base, ideal)
    substitution = {}
    for level in range(algebra.dim):
        for v in ideal.variables:
            substitution[f"{v}_{level}"] = images[v][level]
    for f, comps in prolonged.per_generator:
        for j, comp in enumerate(comps):
            value = comp.substitute(substitution).on_variables(ideal.variables)
            if not ideal.contains(value):
                raise DVarietyError(
                    f"section does not land in the prolongation: component {j} "
                    f"of {format_poly(f)} pulls back to "
                    f"{format_poly(ideal.normal_form(value))}"
                )

    # route 2: the corresponding ring operator verifies independently
    try:
        operator = make_doperator(algebra, ideal, images)
    except DRingError as exc:
        raise DVarietyError(f"section is not an operator structure: {exc}") from exc

    tensors = {v: TensorElement(algebra, images[v]) for v in ideal.variables}
    return DVariety(algebra, ideal, tensors, operator)


def dvariety_from_operator(op):
    """View an operator on a coordinate ring as a D-variety."""
    return DVariety(op.algebra, op.ideal, dict(op.images), op)


# ---------------------------------------------------------------------------
# sharp points


@dataclass(frozen=True)
class SharpLocus:
    """The closed locus where the canonical image of a constant point
    agrees with the section; always contains the defining ideal."""

    ideal: Ideal
    dvariety: DVariety


def sharp_locus(dv, base=None):
    """Ideal of the constant-coordinate sharp points: the variety plus
    s_i(x) = b_i * x for every level i >= 1."""
    algebra = dv.algebra
    gens = list(dv.ideal.generators)
    for v in dv.variables:
        var = MultiPoly.variable(v, dv.variables)
        for i in range(1, algebra.dim):
            gens.append(dv.section[v].comps[i] - var.scale(algebra.unit[i]))
    gens = [g for g in gens if not g.is_zero()]
    return SharpLocus(Ideal(dv.variables, gens, dv.ideal.budget), dv)


def is_sharp_point(dv, point, base=None):
    """Pointwise check of the sharp condition; coordinates may be rational
    constants or polynomials in the base parameters."""
    if base is None:
        base = BaseDStructure.trivial(dv.algebra)
    values = {}
    for v, val in zip(dv.variables, point):
        if not isinstance(val, MultiPoly):
            val = MultiPoly.constant(val)
        values[v] = val
    for g in dv.ideal.generators:
        if not g.substitute(values).is_zero():
            return False
    for v in dv.variables:
        nabla_val = base.apply(values[v])
        for i in range(dv.algebra.dim):
            expected = dv.section[v].comps[i].substitute(values)
            if not (nabla_val.comps[i] - expected).is_zero():
                return False
    return True


_SAMPLE_VALUES = tuple(
    Fraction(v) for v in (0, 1, -1, 2, -2, 3, -3, Fraction(1, 2), Fraction(-1, 2), 4, -4)
)


def _sample_points(ideal, limit=5, max_combinations=60000):
    n = len(ideal.variables)
    if len(_SAMPLE_VALUES) ** n > max_combinations:
        return ()
    found = []
    for combo in itertools.product(_SAMPLE_VALUES, repeat=n):
        coords = dict(zip(ideal.variables, combo))
        if all(g.evaluate(coords) == 0 for g in ideal.generators):
            found.append(combo)
            if len(found) >= limit:
                break
    return tuple(found)


@dataclass(frozen=True)
class SharpPointsResult:
    """Rational sharp points when the locus is finite; otherwise the locus
    with its dimension and a few sampled points."""

    locus: Ideal
    dimension: int | None  # None for an empty locus
    points: tuple | None  # None when the locus is positive-dimensional
    has_nonrational: bool
    samples: tuple = ()

    @property
    def is_empty(self):
        return self.dimension is None

    @property
    def zero_dimensional(self):
        return self.dimension == 0


def rational_sharp_points(dv, base=None):
    """Enumerate the rational sharp points when the sharp locus is finite;
    otherwise report the locus and its dimension with sample points.

    Over Q an empty answer does not refute anything: the rational points
    of a positive-dimensional locus may simply be scarce."""
    locus = sharp_locus(dv, base).ideal
    if locus.is_trivial():
        return SharpPointsResult(locus, None, (), False)
    dim = locus.krull_dimension()
    if dim == 0:
        solved = solve_zero_dim(locus)
        return SharpPointsResult(locus, 0, solved.points, solved.has_nonrational)
    return SharpPointsResult(locus, dim, None, False, samples=_sample_points(locus))


def open_dsubvariety(dv, q):
    """The restriction of the D-variety to the basic open set q != 0,
    presented by an inverse variable."""
    if isinstance(q, str):
        q = parse_polynomial(q, dv.variables)
    localized = localize_dstructure(dv.operator, q)
    if localized is dv.operator:
        return dv
    return dvariety_from_operator(localized)


# ---------------------------------------------------------------------------
# minimal primes of a D-ideal (on supplied decompositions)


@dataclass(frozen=True)
class PrimeCheckEntry:
    prime: Ideal
    contains_ideal: bool
    closed_under_operator: bool

    @property
    def passed(self):
        return self.contains_ideal and self.closed_under_operator


@dataclass(frozen=True)
class DIdealFixtureReport:
    entries: tuple

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)


def dideal_fixture_check(op, J, primes):
    """Check a supplied minimal-prime decomposition of a radical D-ideal:
    each prime must contain the ideal and be closed under the operator.

    Primary decomposition is deliberately not computed here; the fixtures
    carry it.  Raises when J itself is not a D-ideal."""
    if isinstance(J, (list, tuple)):
        J = Ideal(op.variables, list(J))
    if not is_d_ideal(op, J):
        raise DRingError("the supplied ideal is not closed under the operator")
    entries = []
    for prime in primes:
        if isinstance(prime, (list, tuple)):
            prime = Ideal(op.variables, list(prime))
        contains = all(prime.contains(g.on_variables(prime.variables)) for g in J.generators)
        closed = is_d_ideal(op, prime) if contains else False
        entries.append(PrimeCheckEntry(prime, contains, closed))
    return DIdealFixtureReport(tuple(entries))


# ---------------------------------------------------------------------------
# descent along a finite extension Q(alpha)/Q


@dataclass
class WeilDescentResult:
    """A descended D-variety plus the point correspondence.

    ``forward_table`` writes each original coordinate as a polynomial in
    the descended coordinates and alpha; ``backward_table`` names, for
    every descended coordinate, which alpha-power coefficient of which
    original coordinate it carries.
    """

    algebra: object
    alpha: str
    minpoly: MultiPoly
    xvars: tuple
    original_ideal: Ideal
    original_section: dict
    ext_operator: DOperator
    descended: DVariety
    forward_table: dict
    backward_table: dict

    @property
    def degree(self):
        return self.minpoly.degree_in(self.alpha)

    def to_descended(self, point):
        """Map a point with coordinates in Q(alpha) (polynomials in alpha)
        to the corresponding rational descended point."""
        out = []
        m_ideal = Ideal((self.alpha,), [self.minpoly])
        for v in self.xvars:
            val = point[v] if isinstance(point, dict) else point[self.xvars.index(v)]
            if not isinstance(val, MultiPoly):
                val = MultiPoly.constant(val)
            val = m_ideal.normal_form(val.on_variables((self.alpha,)))
            coeffs = univariate_coeffs(val, self.alpha)
            coeffs = coeffs + [Fraction(0)] * (self.degree - len(coeffs))
            out.extend(coeffs[: self.degree])
        return tuple(out)

    def to_original(self, point):
        """Map a rational descended point back to Q(alpha) coordinates."""
        out = {}
        for i, v in enumerate(self.xvars):
            coeffs = point[i * self.degree:(i + 1) * self.degree]
            out[v] = MultiPoly(
                (self.alpha,), {(p,): Fraction(c) for p, c in enumerate(coeffs)}
            )
        return out

    def is_sharp_over_extension(self, point):
        """Pointwise sharp check for a point of the original variety with
        Q(alpha) coordinates, using the verified structure on Q(alpha)."""
        m_ideal = self.ext_operator.ideal
        values = {}
        for v in self.xvars:
            val = point[v]
            if not isinstance(val, MultiPoly):
                val = MultiPoly.constant(val)
            values[v] = val.on_variables((self.alpha,))
        for g in self.original_ideal.generators:
            residue = m_ideal.normal_form(
                g.substitute(values).on_variables((self.alpha,))
            )
            if not residue.is_zero():
                return False
        for v in self.xvars:
            image = self.ext_operator.apply(values[v])
            for i in range(self.algebra.dim):
                expected = self.original_section[v][i].substitute(values)
                defect = m_ideal.normal_form(
                    (image.comps[i] - expected).on_variables((self.alpha,))
                )
                if not defect.is_zero():
                    return False
        return True


def weil_descent(algebra, minpoly, alpha_images, xvars, generators, section, budget=None):
    """Descend an affine D-variety over Q(alpha) to one over Q.

    ``minpoly`` is a monic irreducible polynomial in a single symbol alpha;
    ``alpha_images`` gives the operator image of alpha over Q(alpha),
    verified against the minimal polynomial.  ``generators`` and
    ``section`` may mention alpha in their coefficients.  Returns the
    descended D-variety (each original coordinate split into deg(minpoly)
    rational coordinates) plus the substitution tables; sharp points
    correspond under the returned point maps.
    """
    used = minpoly.used_variables()
    if len(used) != 1:
        raise DVarietyError("the minimal polynomial must be univariate")
    alpha = next(iter(used))
    if alpha in xvars:
        raise DVarietyError("alpha cannot also be a coordinate")
    minpoly = minpoly.monic()
    _, factors = factor_univariate(minpoly, alpha)
    if len(factors) != 1 or factors[0][1] != 1:
        raise DVarietyError("the minimal polynomial must be irreducible")
    r = minpoly.degree_in(alpha)
    dim = algebra.dim
    xvars = tuple(xvars)

    # the operator structure on Q(alpha); make_doperator verifies that the
    # images respect the minimal polynomial
    m_ideal = Ideal((alpha,), [minpoly], budget)
    try:
        ext_op = make_doperator(algebra, m_ideal, {alpha: alpha_images})
    except DRingError as exc:
        raise DVarietyError(f"invalid operator structure on Q(alpha): {exc}") from exc

    ring_vars = (alpha,) + xvars
    gens = [
        parse_polynomial(g, ring_vars) if isinstance(g, str) else g.on_variables(ring_vars)
        for g in generators
    ]
    section_comps = {}
    for v in xvars:
        comps = tuple(
            parse_polynomial(c, ring_vars) if isinstance(c, str)
            else MultiPoly.constant(c).on_variables(ring_vars) if not isinstance(c, MultiPoly)
            else c.on_variables(ring_vars)
            for c in section[v]
        )
        if len(comps) != dim:
            raise DVarietyError(f"section of {v!r} needs {dim} components")
        section_comps[v] = comps
    original_ideal = Ideal(ring_vars, gens + [minpoly.on_variables(ring_vars)], budget)

    if r == 1:
        root = -univariate_coeffs(minpoly, alpha)[0]
        subs = {alpha: MultiPoly.constant(root)}
        plain = Ideal(xvars, [g.substitute(subs).on_variables(xvars) for g in gens], budget)
        plain_section = {
            v: tuple(c.substitute(subs).on_variables(xvars) for c in comps)
            for v, comps in section_comps.items()
        }
        descended = make_dvariety(algebra, plain, plain_section)
        forward = {v: MultiPoly.variable(v, xvars) for v in xvars}
        backward = {v: (v, 0) for v in xvars}
        return WeilDescentResult(
            algebra, alpha, minpoly, xvars, original_ideal, section_comps,
            ext_op, descended, forward, backward,
        )

    dvars = tuple(f"{x}_{p}" for x in xvars for p in range(r))
    if len(set(dvars) | set(ring_vars)) != len(dvars) + len(ring_vars):
        raise DVarietyError("descended coordinate names collide; rename the originals")
    full_vars = (alpha,) + dvars
    reduce_ideal = Ideal(full_vars, [minpoly.on_variables(full_vars)], budget)

    phi = {}
    forward = {}
    backward = {}
    for x in xvars:
        expansion = MultiPoly.zero(full_vars)
        for p in range(r):
            term = MultiPoly.variable(f"{x}_{p}", full_vars) * MultiPoly.variable(
                alpha, full_vars
            ) ** p
            expansion = expansion + term
            backward[f"{x}_{p}"] = (x, p)
        phi[x] = expansion
        forward[x] = expansion
    alpha_idx = 0

    def alpha_coefficients(poly):
        """Split an alpha-reduced polynomial into its alpha-power slices."""
        slices = [MultiPoly.zero(dvars) for _ in range(r)]
        poly = poly.on_variables(full_vars)
        for exp, c in poly.terms.items():
            p = exp[alpha_idx]
            rest = exp[1:]
            slices[p] = slices[p] + MultiPoly(dvars, {rest: c})
        return slices

    descended_gens = []
    for g in gens:
        expanded = reduce_ideal.normal_form(g.substitute(phi).on_variables(full_vars))
        descended_gens.extend(s for s in alpha_coefficients(expanded) if not s.is_zero())

    # the comparison matrix: the algebra map alpha^p e_j -> image(alpha)^p e_j
    # on the r(l+1)-dimensional space Q(alpha) tensor D
    dalpha = ext_op.apply(MultiPoly.variable(alpha, (alpha,)))
    powers = [TensorElement.one(algebra, (alpha,)).reduce(m_ideal)]
    for _ in range(r - 1):
        powers.append(tensor_mul(powers[-1], dalpha, m_ideal))
    size = r * dim
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for p in range(r):
        for j in range(dim):
            unit_vec = [Fraction(0)] * dim
            unit_vec[j] = Fraction(1)
            e_j = TensorElement.from_algebra_element(algebra, unit_vec, (alpha,))
            product = tensor_mul(e_j, powers[p], m_ideal)
            for k in range(dim):
                coeffs = univariate_coeffs(product.comps[k], alpha)
                for q, c in enumerate(coeffs):
                    matrix[q * dim + k][p * dim + j] = c
    inverse = linalg.inverse(matrix)
    if inverse is None:
        raise DVarietyError(
            "the operator structure on Q(alpha) does not invert; "
            "descent is not defined"
        )

    descended_section = {name: [None] * dim for name in dvars}
    for x in xvars:
        rhs = [MultiPoly.zero(dvars) for _ in range(size)]
        for k in range(dim):
            comp = reduce_ideal.normal_form(
                section_comps[x][k].substitute(phi).on_variables(full_vars)
            )
            for q, slice_ in enumerate(alpha_coefficients(comp)):
                rhs[q * dim + k] = slice_
        for p in range(r):
            for j in range(dim):
                value = MultiPoly.zero(dvars)
                row = inverse[p * dim + j]
                for idx, coeff in enumerate(row):
                    if coeff:
                        value = value + rhs[idx].scale(coeff)
                descended_section[f"{x}_{p}"][j] = value
    descended_section = {
        name: tuple(comps) for name, comps in descended_section.items()
    }

    descended = make_dvariety(algebra, Ideal(dvars, descended_gens, budget), descended_section)
    return WeilDescentResult(
        algebra, alpha, minpoly, xvars, original_ideal, section_comps,
        ext_op, descended, forward, backward,
    )
