"""Operators from a finitely presented ring R into R tensor D.

A DOperator stores, for every ring variable, the coordinates of its image
in the basis 1 (x) e_0, ..., 1 (x) e_l of R (x) D.  Constants map to
c * 1_D, so the coefficient field carries the unique trivial structure;
richer coefficient rings are modelled upstream by parameter variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import FiniteDimAlgebra
from .poly import (
    Ideal,
    MonomialOrder,
    MultiPoly,
    format_poly,
    groebner_basis_of,
    normal_form,
    parse_polynomial,
)


class DRingError(Exception):
    """Invalid operator data or unsupported operator construction."""


class SectionPropertyError(DRingError):
    """The coordinate-0 component of an image is not the variable itself."""


class WellDefinednessError(DRingError):
    """An image of a defining relation does not vanish on the variety."""

    def __init__(self, generator, component, value):
        self.generator = generator
        self.component = component
        self.value = value
        super().__init__(
            f"component {component} of relation {format_poly(generator)} maps to "
            f"{format_poly(value)}, which is not in the ideal"
        )


class TensorElement:
    """An element of R tensor D: one ring element per basis vector of D."""

    __slots__ = ("algebra", "comps")

    def __init__(self, algebra, comps):
        comps = tuple(
            c if isinstance(c, MultiPoly) else MultiPoly.constant(c) for c in comps
        )
        if len(comps) != algebra.dim:
            raise DRingError("tensor component count does not match dim(D)")
        self.algebra = algebra
        self.comps = comps

    @classmethod
    def constant(cls, algebra, c, variables=()):
        c = Fraction(c)
        return cls(
            algebra,
            [MultiPoly.constant(c * b, variables) for b in algebra.unit],
        )

    @classmethod
    def one(cls, algebra, variables=()):
        return cls.constant(algebra, 1, variables)

    @classmethod
    def from_algebra_element(cls, algebra, coords, variables=()):
        return cls(algebra, [MultiPoly.constant(c, variables) for c in coords])

    def __add__(self, other):
        self._check(other)
        return TensorElement(self.algebra, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        self._check(other)
        return TensorElement(self.algebra, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return TensorElement(self.algebra, [-a for a in self.comps])

    def __mul__(self, other):
        """Product via the structure constants of D (no reduction)."""
        self._check(other)
        return tensor_mul(self, other)

    def scale(self, factor):
        """Multiply every component by a ring element or rational."""
        if not isinstance(factor, MultiPoly):
            factor = MultiPoly.constant(factor)
        return TensorElement(self.algebra, [factor * c for c in self.comps])

    def reduce(self, ideal):
        return TensorElement(self.algebra, [ideal.normal_form(c) for c in self.comps])

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other):
        return (
            isinstance(other, TensorElement)
            and other.algebra is self.algebra
            and all(a == b for a, b in zip(self.comps, other.comps))
        )

    def _check(self, other):
        if not isinstance(other, TensorElement) or other.algebra is not self.algebra:
            raise DRingError("tensor elements over different algebras")

    def __repr__(self):
        return "TensorElement(" + ", ".join(format_poly(c) for c in self.comps) + ")"


def tensor_mul(a, b, ideal=None):
    """Product in R tensor D; components reduced mod ``ideal`` when given."""
    algebra = a.algebra
    comps = [MultiPoly.zero() for _ in range(algebra.dim)]
    for i, j, k, c in algebra._nonzero:
        ai = a.comps[i]
        bj = b.comps[j]
        if ai.is_zero() or bj.is_zero():
            continue
        comps[k] = comps[k] + (ai * bj).scale(c)
    if ideal is not None:
        comps = [ideal.normal_form(p) for p in comps]
    return TensorElement(algebra, comps)


class DOperator:
    """A verified operator structure on Q[variables]/ideal.

    Use :func:`make_doperator` to construct one; it runs the section and
    well-definedness checks.
    """

    def __init__(self, algebra, ideal, images):
        self.algebra = algebra
        self.ideal = ideal
        self.images = images

    @property
    def variables(self):
        return self.ideal.variables

    def apply(self, f):
        """The image of a ring element, components reduced to normal form.

        Coefficients map to c * 1_D; each variable maps to its image; the
        term products are evaluated through the structure constants of D.
        """
        if isinstance(f, str):
            f = parse_polynomial(f, self.variables)
        unknown = f.used_variables() - set(self.variables)
        if unknown:
            raise DRingError(f"unknown variable {sorted(unknown)[0]!r}")
        f = f.on_variables(self.variables)
        powers = {v: [TensorElement.one(self.algebra, self.variables)] for v in self.variables}
        total = TensorElement(
            self.algebra, [MultiPoly.zero(self.variables)] * self.algebra.dim
        )
        for exp, c in f.terms.items():
            term = TensorElement.constant(self.algebra, c, self.variables)
            for v, e in zip(self.variables, exp):
                if not e:
                    continue
                cache = powers[v]
                while len(cache) <= e:
                    cache.append(tensor_mul(cache[-1], self.images[v], self.ideal))
                term = tensor_mul(term, cache[e], self.ideal)
            total = total + term
        return total.reduce(self.ideal)

    def component(self, f, i):
        """The e_i component of the image of f."""
        return self.apply(f).comps[i]

    def to_dict(self):
        return {
            "variables": list(self.variables),
            "relations": [format_poly(g) for g in self.ideal.generators],
            "images": {
                v: [format_poly(self.ideal.normal_form(c)) for c in t.comps]
                for v, t in sorted(self.images.items())
            },
        }

    def __repr__(self):
        rels = ", ".join(format_poly(g) for g in self.ideal.generators)
        return f"DOperator(vars={list(self.variables)}, relations=[{rels}])"


def _coerce_images(algebra, ideal, images):
    out = {}
    for v, img in images.items():
        if v not in ideal.variables:
            raise DRingError(f"image given for {v!r}, which is not a ring variable")
        if isinstance(img, TensorElement):
            comps = img.comps
        else:
            comps = tuple(
                parse_polynomial(c, ideal.variables) if isinstance(c, str)
                else MultiPoly.constant(c) if not isinstance(c, MultiPoly)
                else c
                for c in img
            )
        if len(comps) != algebra.dim:
            raise DRingError(
                f"image of {v!r} has {len(comps)} components; dim(D) is {algebra.dim}"
            )
        out[v] = TensorElement(algebra, [c.on_variables(ideal.variables) for c in comps])
    missing = set(ideal.variables) - set(out)
    if missing:
        raise DRingError(f"no image given for variable {sorted(missing)[0]!r}")
    return out


def make_doperator(algebra, ideal, images, check=True):
    """Build and verify a DOperator.

    Verifies that coordinate extraction at e_0 is the distinguished
    projection of D, that the e_0 component of every image is the variable
    itself (section property), and that every defining relation maps into
    the ideal (well-definedness).
    """
    if not isinstance(algebra, FiniteDimAlgebra):
        raise DRingError("first argument must be a FiniteDimAlgebra")
    if not algebra.is_pi_adapted():
        raise DRingError(
            "the basis of D is not adapted to a distinguished projection "
            "(need e_i*e_j to have no e_0 part except e_0^2 = e_0, and unit "
            "coordinate 0 equal to 1)"
        )
    images = _coerce_images(algebra, ideal, images)
    op = DOperator(algebra, ideal, images)
    if check:
        for v in ideal.variables:
            defect = ideal.normal_form(
                images[v].comps[0] - MultiPoly.variable(v, ideal.variables)
            )
            if not defect.is_zero():
                raise SectionPropertyError(
                    f"component 0 of the image of {v!r} is not {v!r} modulo the ideal"
                )
        for g in ideal.generators:
            if g.is_zero():
                continue
            image = op.apply(g)
            for j, comp in enumerate(image.comps):
                if not comp.is_zero():
                    raise WellDefinednessError(g, j, comp)
    return op


def product_rule_check(op, f, g):
    """Does the image of f*g equal the structure-constant combination of the
    images of f and g?  Always true for a valid operator; exposed as a test
    oracle."""
    if isinstance(f, str):
        f = parse_polynomial(f, op.variables)
    if isinstance(g, str):
        g = parse_polynomial(g, op.variables)
    lhs = op.apply(f * g)
    rhs = tensor_mul(op.apply(f), op.apply(g), op.ideal)
    return all(a == b for a, b in zip(lhs.comps, rhs.comps))


@dataclass(frozen=True)
class AssociatedHom:
    """The composition of the operator with the residue projection of one
    local component: variable images in R[x]/(P_i), given as coefficient
    tuples in the power basis.  An endomorphism when P_i is linear."""

    component_index: int
    residue_poly: MultiPoly
    images: dict

    @property
    def is_endomorphism(self):
        return all(len(t) == 1 for t in self.images.values())

    def endo_images(self):
        if not self.is_endomorphism:
            raise DRingError("associated homomorphism is not an endomorphism")
        return {v: t[0] for v, t in self.images.items()}


def associated_hom(op, i):
    """The i-th associated homomorphism of the operator."""
    comps = op.algebra.components
    if not 0 <= i < len(comps):
        raise DRingError(f"component index {i} out of range")
    comp = comps[i]
    images = {}
    for v, t in op.images.items():
        rows = []
        for row in comp.residue_matrix:
            combined = MultiPoly.zero(op.variables)
            for coeff, poly in zip(row, t.comps):
                if coeff:
                    combined = combined + poly.scale(coeff)
            rows.append(op.ideal.normal_form(combined))
        images[v] = tuple(rows)
    return AssociatedHom(i, comp.residue_poly, images)


def is_d_ideal(op, J):
    """Is J closed under the operator?  Checks generators only; by the
    product rule and linearity this suffices for the whole ideal."""
    if isinstance(J, (list, tuple)):
        J = Ideal(op.variables, list(J))
    for g in op.ideal.generators:
        if not J.contains(g.on_variables(J.variables)):
            raise DRingError("J does not contain the defining ideal of the ring")
    for g in J.generators:
        image = op.apply(g.on_variables(op.variables))
        if not all(J.contains(c.on_variables(J.variables)) for c in image.comps):
            return False
    return True


def _fresh_name(base, taken):
    name = base
    counter = 2
    while name in taken:
        name = f"{base}{counter}"
        counter += 1
    return name


def invert_modulo(ideal, s):
    """The inverse of s in Q[vars]/ideal, or None when s is not a unit.

    Works by adjoining z with s*z = 1 and eliminating z: the normal form of
    z is z-free exactly when the inverse exists, and then equals it.
    """
    z = _fresh_name("z_inv", ideal.variables)
    reordered = (z,) + ideal.variables
    zvar = MultiPoly.variable(z, reordered)
    gens = [g.on_variables(reordered) for g in ideal.generators]
    gens.append(s.on_variables(reordered) * zvar - MultiPoly.one(reordered))
    order = MonomialOrder("block", block=1)
    basis = groebner_basis_of(gens, reordered, order, ideal.budget)
    nf = normal_form(zvar, list(basis), order, ideal.budget)
    if z in nf.used_variables():
        return None
    inverse = nf.on_variables(ideal.variables)
    if not ideal.contains(s * inverse - MultiPoly.one(ideal.variables)):
        return None
    return inverse


def localize_dstructure(op, q, inverse_name="w"):
    """Extend the operator to the localisation R_q, presented by adjoining
    an inverse variable with the relation q*w = 1.

    The image of w is the inverse of the image of q, assembled per local
    component of D: the residue part is inverted in the localised ring, the
    nilpotent part by a terminating geometric series.  For a non-local D
    this requires every associated image of q to be invertible in R_q
    already; otherwise the localisation is reported as impossible.
    """
    if isinstance(q, str):
        q = parse_polynomial(q, op.variables)
    q = q.on_variables(op.variables)
    if op.ideal.contains(q):
        raise DRingError("cannot localise at an element that vanishes on the variety")
    if q.is_constant():
        return op

    comps = op.algebra.components
    if any(c.residue_dim != 1 for c in comps):
        raise DRingError(
            "localisation is only implemented when every local component of D "
            "has residue field Q"
        )

    w = _fresh_name(inverse_name, op.variables)
    new_vars = op.variables + (w,)
    wvar = MultiPoly.variable(w, new_vars)
    new_gens = [g.on_variables(new_vars) for g in op.ideal.generators]
    new_gens.append(q.on_variables(new_vars) * wvar - MultiPoly.one(new_vars))
    new_ideal = Ideal(new_vars, new_gens, op.ideal.budget)

    dq_old = op.apply(q)
    dq = TensorElement(op.algebra, [c.on_variables(new_vars) for c in dq_old.comps])

    inverse = TensorElement(op.algebra, [MultiPoly.zero(new_vars)] * op.algebra.dim)
    for idx, comp in enumerate(comps):
        sigma_q = MultiPoly.zero(new_vars)
        for coeff, poly in zip(comp.residue_matrix[0], dq.comps):
            if coeff:
                sigma_q = sigma_q + poly.scale(coeff)
        sigma_q = new_ideal.normal_form(sigma_q)
        if idx == op.algebra.pi_index:
            sigma_inv = wvar
        else:
            sigma_inv = invert_modulo(new_ideal, sigma_q)
            if sigma_inv is None:
                raise DRingError(
                    f"associated image {format_poly(sigma_q)} of the localised "
                    f"element is not invertible on the localisation "
                    f"(component {idx}); the open set is not closed under the "
                    f"operator"
                )
        e_tensor = TensorElement.from_algebra_element(
            op.algebra, comp.idempotent.coords, new_vars
        )
        u_i = tensor_mul(e_tensor, dq, new_ideal)
        nil = u_i - e_tensor.scale(sigma_q)
        base = nil.scale(sigma_inv).reduce(new_ideal)
        series = e_tensor
        term = e_tensor
        for _ in range(op.algebra.dim + 1):
            term = tensor_mul(term, base, new_ideal).scale(-1)
            if term.is_zero():
                break
            series = series + term
        else:
            raise DRingError("nilpotent part of the localised image did not terminate")
        inverse = inverse + tensor_mul(series, e_tensor.scale(sigma_inv), new_ideal)

    inverse = inverse.reduce(new_ideal)
    check = tensor_mul(dq, inverse, new_ideal)
    unit = TensorElement.one(op.algebra, new_vars).reduce(new_ideal)
    if not all(a == b for a, b in zip(check.comps, unit.comps)):
        raise DRingError("computed image of the inverse does not invert the image")

    new_images = {
        v: TensorElement(op.algebra, [c.on_variables(new_vars) for c in t.comps])
        for v, t in op.images.items()
    }
    new_images[w] = inverse
    return make_doperator(op.algebra, new_ideal, new_images)
