"""Prolongations of affine varieties along an operator on the coefficients.

Given defining equations in variables x over Q (or over Q[t] for declared
parameters t with operator images), each generator f is expanded by
substituting x -> sum_j x_j e_j and pushing coefficients through the
operator; collecting the e_j coordinates of the result yields the
generators of the prolonged ideal.  The prolonged ring orders its
variables block-major: all level-0 names, then level 1, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dring import TensorElement, make_doperator, tensor_mul
from .poly import Ideal, MultiPoly, format_poly, parse_polynomial


class ProlongationError(Exception):
    """Bad prolongation input: name collisions, points off the variety."""


class BaseDStructure:
    """The operator structure on the coefficient ring Q[params].

    Constants map to c * 1_D; each declared parameter carries a
    user-supplied image.  With no parameters this is the unique structure
    on Q itself.
    """

    def __init__(self, algebra, params=(), images=None):
        self.algebra = algebra
        self.params = tuple(params)
        ring = Ideal(self.params, [])
        self.operator = make_doperator(algebra, ring, images or {})

    @classmethod
    def trivial(cls, algebra):
        return cls(algebra, ())

    def apply(self, f):
        """Image of an element of Q[params]."""
        return self.operator.apply(f)

    def sigma_param_images(self, i):
        """sigma_i of every parameter, for components with residue field Q."""
        comp = self.algebra.components[i]
        if comp.residue_dim != 1:
            raise ProlongationError(
                f"component {i} has residue degree {comp.residue_dim}; its "
                f"associated homomorphism is not an endomorphism"
            )
        row = comp.residue_matrix[0]
        out = {}
        for p in self.params:
            t = self.operator.images[p]
            combined = MultiPoly.zero(self.params)
            for coeff, poly in zip(row, t.comps):
                if coeff:
                    combined = combined + poly.scale(coeff)
            out[p] = combined
        return out

    def __repr__(self):
        return f"BaseDStructure(dim(D)={self.algebra.dim}, params={list(self.params)})"


def sigma_twist(base, i, poly):
    """Apply sigma_i to the coefficients of a polynomial over Q[params];
    with no parameters this is the identity."""
    if not base.params:
        return poly
    return poly.substitute(base.sigma_param_images(i))


def prolonged_names(xvars, level):
    return tuple(f"{x}_{level}" for x in xvars)


@dataclass(frozen=True)
class ProlongedVariety:
    """The prolongation of V(ideal): its ideal, and the coordinates of each
    generator's expansion."""

    base: BaseDStructure
    original_ideal: Ideal
    xvars: tuple
    prolonged_ideal: Ideal
    per_generator: tuple  # pairs (generator, tuple of component polys)

    @property
    def variables(self):
        return self.prolonged_ideal.variables

    def block(self, level):
        return prolonged_names(self.xvars, level)

    def to_dict(self):
        return {
            "variables": list(self.variables),
            "generators": [
                {
                    "f": format_poly(f),
                    "components": [format_poly(c) for c in comps],
                }
                for f, comps in self.per_generator
            ],
        }


def _prolonged_variables(base, xvars, dim):
    names = list(base.params)
    for level in range(dim):
        for x in xvars:
            names.append(f"{x}_{level}")
    if len(set(names)) != len(names) or set(names) & set(xvars):
        raise ProlongationError(
            "prolonged coordinate names collide with existing variables; "
            "rename the originals"
        )
    return tuple(names)


def prolong(base, ideal, xvars=None):
    """The prolongation of V(ideal) along the base operator structure.

    ``ideal`` lives in Q[params + xvars]; the result lives in
    Q[params + x_0-block + ... + x_l-block].
    """
    if xvars is None:
        xvars = tuple(v for v in ideal.variables if v not in set(base.params))
    else:
        xvars = tuple(xvars)
    if set(base.params) & set(xvars):
        raise ProlongationError("parameters cannot be geometric variables")
    stray = set(ideal.variables) - set(base.params) - set(xvars)
    if stray:
        raise ProlongationError(
            f"ideal variable {sorted(stray)[0]!r} is neither geometric nor a "
            f"declared parameter"
        )

    dim = base.algebra.dim
    new_vars = _prolonged_variables(base, xvars, dim)
    algebra = base.algebra

    var_tensors = {}
    for x in xvars:
        comps = [
            MultiPoly.variable(f"{x}_{level}", new_vars) for level in range(dim)
        ]
        var_tensors[x] = TensorElement(algebra, comps)
    power_cache = {x: [TensorElement.one(algebra, new_vars)] for x in xvars}

    per_generator = []
    all_components = []
    for f in ideal.generators:
        f = f.on_variables(ideal.variables)
        total = TensorElement(algebra, [MultiPoly.zero(new_vars)] * dim)
        for exp, c in f.terms.items():
            param_mono = {}
            for v, e in zip(ideal.variables, exp):
                if e and v in set(base.params):
                    param_mono[v] = e
            coeff_poly = MultiPoly(
                base.params,
                {tuple(param_mono.get(p, 0) for p in base.params): c},
            )
            tensor = base.apply(coeff_poly)
            term = TensorElement(
                algebra, [p.on_variables(new_vars) for p in tensor.comps]
            )
            for v, e in zip(ideal.variables, exp):
                if not e or v not in var_tensors:
                    continue
                cache = power_cache[v]
                while len(cache) <= e:
                    cache.append(tensor_mul(cache[-1], var_tensors[v]))
                term = tensor_mul(term, cache[e])
            total = total + term
        comps = tuple(p.on_variables(new_vars) for p in total.comps)
        per_generator.append((f, comps))
        all_components.extend(c for c in comps if not c.is_zero())

    prolonged = Ideal(new_vars, all_components, ideal.budget)
    return ProlongedVariety(base, ideal, xvars, prolonged, tuple(per_generator))


def nabla(op, point, xvars=None):
    """The prolongation point of a point of the variety of ``op``: the point
    itself followed by its operator coordinates, block-major.

    Point coordinates are rationals (or parameter polynomials); it must
    satisfy the defining ideal exactly.
    """
    if xvars is None:
        xvars = op.variables
    values = {}
    for v, val in zip(xvars, point):
        if not isinstance(val, MultiPoly):
            val = MultiPoly.constant(val)
        values[v] = val
    for g in op.ideal.generators:
        image = g.substitute(values)
        if not (image.is_zero() or op.ideal.contains(image.on_variables(op.variables))):
            raise ProlongationError(
                f"point does not satisfy {format_poly(g)}: got {format_poly(image)}"
            )
    out = []
    for level in range(op.algebra.dim):
        for v in xvars:
            val = op.images[v].comps[level].substitute(values)
            out.append(val.constant_value() if val.is_constant() else val)
    return tuple(out)


@dataclass(frozen=True)
class PiHatMap:
    """Coordinate data of the projection of the prolongation onto one twist
    of the original variety: each original variable maps to a linear
    combination of its block coordinates.  For residue degree one this is a
    genuine morphism onto an affine variety; otherwise the coordinates land
    in Q[x]/(P_i) and are reported per power-basis slot."""

    component_index: int
    residue_dim: int
    xvars: tuple
    images: dict  # xvar -> tuple of MultiPoly on the prolonged variables

    def substitution(self):
        if self.residue_dim != 1:
            raise ProlongationError(
                "projection with residue degree > 1 has no affine substitution"
            )
        return {v: imgs[0] for v, imgs in self.images.items()}

    def apply_point(self, prolonged_vars, point):
        coords = {v: val for v, val in zip(prolonged_vars, point)}
        out = []
        for v in self.xvars:
            for img in self.images[v]:
                val = img.substitute({k: _as_poly(c) for k, c in coords.items()})
                out.append(val.constant_value() if val.is_constant() else val)
        return tuple(out)


def _as_poly(c):
    return c if isinstance(c, MultiPoly) else MultiPoly.constant(c)


def pi_hat(prolonged, i):
    """The projection of the prolongation induced by the residue map of the
    i-th local component; for the distinguished component this is just
    x -> x_0."""
    algebra = prolonged.base.algebra
    comps = algebra.components
    if not 0 <= i < len(comps):
        raise ProlongationError(f"component index {i} out of range")
    comp = comps[i]
    images = {}
    for x in prolonged.xvars:
        rows = []
        for row in comp.residue_matrix:
            combined = MultiPoly.zero(prolonged.variables)
            for level, coeff in enumerate(row):
                if coeff:
                    combined = combined + MultiPoly.variable(
                        f"{x}_{level}", prolonged.variables
                    ).scale(coeff)
            rows.append(combined)
        images[x] = tuple(rows)
    return PiHatMap(i, comp.residue_dim, prolonged.xvars, images)


@dataclass(frozen=True)
class AlphaHatMap:
    """The product of all projections: the comparison map from the
    prolongation to the product of the twisted copies of the variety."""

    factors: tuple  # PiHatMap per local component

    def apply_point(self, prolonged_vars, point):
        out = []
        for factor in self.factors:
            out.extend(factor.apply_point(prolonged_vars, point))
        return tuple(out)


def alpha_hat(prolonged):
    algebra = prolonged.base.algebra
    n_comps = len(algebra.components)
    factors = tuple(pi_hat(prolonged, i) for i in range(n_comps))
    if any(f.residue_dim != 1 for f in factors):
        raise ProlongationError(
            "comparison map needs every local component to have residue field Q"
        )
    return AlphaHatMap(factors)


def nabla_e(base, point, xvars):
    """The endomorphism-side prolongation point (a, sigma_1(a), ...) of a
    rational or parametric point, computed from the base structure."""
    algebra = base.algebra
    values = []
    for val in point:
        values.append(val if isinstance(val, MultiPoly) else MultiPoly.constant(val))
    out = []
    for i in range(len(algebra.components)):
        comp = algebra.components[i]
        if comp.residue_dim != 1:
            raise ProlongationError("associated maps are not all endomorphisms")
        row = comp.residue_matrix[0]
        for val in values:
            tensor = base.apply(val)
            combined = MultiPoly.zero(base.params)
            for coeff, poly in zip(row, tensor.comps):
                if coeff:
                    combined = combined + poly.scale(coeff)
            out.append(
                combined.constant_value() if combined.is_constant() else combined
            )
    return tuple(out)


def extend_by_point(base, ideal, point_images, xvars=None):
    """Extend the base structure to Q[x]/ideal by prescribing the image of
    the generic point: ``point_images`` lists, block-major, the coordinates
    of a point of the prolongation whose level-0 block is x itself.

    Verifies membership in the prolonged ideal; on success returns the
    verified operator with those images.
    """
    prolonged = prolong(base, ideal, xvars)
    xvars = prolonged.xvars
    dim = base.algebra.dim
    entries = []
    for entry in point_images:
        if isinstance(entry, str):
            entry = parse_polynomial(entry, ideal.variables)
        elif not isinstance(entry, MultiPoly):
            entry = MultiPoly.constant(entry)
        entries.append(entry.on_variables(ideal.variables))
    if len(entries) != len(xvars) * dim:
        raise ProlongationError(
            f"expected {len(xvars) * dim} coordinates, got {len(entries)}"
        )

    substitution = {}
    for level in range(dim):
        for pos, x in enumerate(xvars):
            substitution[f"{x}_{level}"] = entries[level * len(xvars) + pos]
    for pos, x in enumerate(xvars):
        defect = ideal.normal_form(entries[pos] - MultiPoly.variable(x, ideal.variables))
        if not defect.is_zero():
            raise ProlongationError(
                f"level-0 coordinate of {x!r} must be {x!r} itself modulo the ideal"
            )
    for f, comps in prolonged.per_generator:
        for j, comp in enumerate(comps):
            value = comp.substitute(substitution).on_variables(ideal.variables)
            if not ideal.contains(value):
                raise ProlongationError(
                    f"not a point of the prolongation: component {j} of "
                    f"{format_poly(f)} evaluates to {format_poly(ideal.normal_form(value))}"
                )

    images = {}
    for pos, x in enumerate(xvars):
        comps = [entries[level * len(xvars) + pos] for level in range(dim)]
        images[x] = TensorElement(base.algebra, comps)
    for p in base.params:
        t = base.operator.images[p]
        images[p] = TensorElement(
            base.algebra, [c.on_variables(ideal.variables) for c in t.comps]
        )
    return make_doperator(base.algebra, ideal, images)
