"""Sparse multivariate polynomials over Q and the ideal toolkit built on them.

Polynomials are immutable: a tuple of variable names plus a map from
exponent vectors to nonzero Fraction coefficients.  Ideals cache one
reduced Groebner basis per monomial order.  All arithmetic is exact.

Groebner bases are computed with Buchberger's algorithm plus the
Gebauer-Moeller pair criteria; runaway computations hit a configurable
resource budget and raise instead of truncating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy

from . import linalg


class PolyError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceededError(PolyError):
    """A Groebner computation exceeded its resource budget."""


class EmptyVarietyError(PolyError):
    """Raised when an operation needs a nonempty variety but got <1>."""


class NotOnVarietyError(PolyError):
    """Raised when a supposed point of a variety fails to satisfy it."""


class PolyParseError(PolyError):
    """Syntax error in polynomial (or DSL) text, with position info."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: grevlex, lex, or a block elimination order.

    For ``block``, the first ``block`` variables form the elimination
    block; blocks are compared first-block-first, grevlex inside each.
    """

    kind: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.block <= 0:
            raise ValueError("block order needs a positive elimination block size")

    def key(self, exp):
        """Sort key: bigger key = bigger monomial."""
        if self.kind == "lex":
            return exp
        if self.kind == "grevlex":
            return _grevlex_key(exp)
        k = self.block
        return (_grevlex_key(exp[:k]), _grevlex_key(exp[k:]))


def _grevlex_key(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


# ---------------------------------------------------------------------------
# polynomials


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class MultiPoly:
    """A sparse polynomial with rational coefficients.

    ``variables`` is an ordered tuple of names; ``terms`` maps exponent
    tuples (one entry per variable) to nonzero Fractions.  Instances are
    immutable; arithmetic between polynomials on different variable
    tuples extends both to the union.
    """

    __slots__ = ("variables", "terms", "_canon")

    def __init__(self, variables=(), terms=None):
        object.__setattr__(self, "variables", tuple(variables))
        cleaned = {}
        nvars = len(self.variables)
        for exp, c in (terms or {}).items():
            c = _as_fraction(c)
            if c == 0:
                continue
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError("exponent vector does not match variable count")
            if any(e < 0 for e in exp):
                raise ValueError("negative exponents are not allowed")
            cleaned[exp] = cleaned.get(exp, Fraction(0)) + c
        cleaned = {e: c for e, c in cleaned.items() if c != 0}
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c, variables=()):
        c = _as_fraction(c)
        if c == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, name, variables=None):
        variables = (name,) if variables is None else tuple(variables)
        if name not in variables:
            raise ValueError(f"{name!r} is not among the ring variables")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: Fraction(1)})

    @classmethod
    def zero(cls, variables=()):
        return cls(variables, {})

    @classmethod
    def one(cls, variables=()):
        return cls.constant(1, variables)

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exp) for exp in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return sum(self.terms.values(), Fraction(0))

    def total_degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(exp) for exp in self.terms)

    def degree_in(self, var):
        i = self.variables.index(var)
        if not self.terms:
            return -1
        return max(exp[i] for exp in self.terms)

    def used_variables(self):
        used = set()
        for exp in self.terms:
            for v, e in zip(self.variables, exp):
                if e:
                    used.add(v)
        return used

    def canonical(self):
        """Order-independent canonical form, used for equality and hashing."""
        if self._canon is None:
            items = []
            for exp, c in self.terms.items():
                mono = tuple(sorted((v, e) for v, e in zip(self.variables, exp) if e))
                items.append((mono, c))
            object.__setattr__(self, "_canon", frozenset(items))
        return self._canon

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def on_variables(self, variables):
        """The same polynomial expressed on a (super)set of variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = self.used_variables() - set(variables)
        if missing:
            raise ValueError(f"cannot drop used variables {sorted(missing)}")
        pos = {v: i for i, v in enumerate(variables)}
        idx = [pos.get(v) for v in self.variables]
        new_terms = {}
        for exp, c in self.terms.items():
            new_exp = [0] * len(variables)
            for i, e in enumerate(exp):
                if e:
                    new_exp[idx[i]] = e
            new_terms[tuple(new_exp)] = c
        return MultiPoly(variables, new_terms)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.variables)
        if not isinstance(other, MultiPoly):
            return None, None
        if self.variables == other.variables:
            return self, other
        merged = list(self.variables)
        for v in other.variables:
            if v not in merged:
                merged.append(v)
        merged = tuple(merged)
        return self.on_variables(merged), other.on_variables(merged)

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        terms = dict(a.terms)
        for exp, c in b.terms.items():
            terms[exp] = terms.get(exp, Fraction(0)) + c
        return MultiPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                exp = tuple(x + y for x, y in zip(e1, e2))
                c = terms.get(exp)
                terms[exp] = c1 * c2 if c is None else c + c1 * c2
        return MultiPoly(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.one(self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, c):
        c = _as_fraction(c)
        return MultiPoly(self.variables, {e: c * v for e, v in self.terms.items()})

    # -- calculus and evaluation --------------------------------------------

    def partial_derivative(self, var):
        i = self.variables.index(var)
        terms = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            new = list(exp)
            new[i] -= 1
            terms[tuple(new)] = terms.get(tuple(new), Fraction(0)) + c * exp[i]
        return MultiPoly(self.variables, terms)

    def substitute(self, assignment):
        """Ring-homomorphic substitution; values may be MultiPoly or rationals."""
        values = {}
        for v, val in assignment.items():
            if not isinstance(val, MultiPoly):
                val = MultiPoly.constant(val)
            values[v] = val
        result = MultiPoly.zero()
        powers = {v: [MultiPoly.one()] for v in values}
        for exp, c in self.terms.items():
            term = MultiPoly.constant(c)
            for v, e in zip(self.variables, exp):
                if e == 0:
                    continue
                if v in values:
                    cache = powers[v]
                    while len(cache) <= e:
                        cache.append(cache[-1] * values[v])
                    term = term * cache[e]
                else:
                    term = term * MultiPoly((v,), {(e,): Fraction(1)})
            result = result + term
        return result

    def evaluate(self, point):
        """Evaluate at rational coordinates given as {var: value}."""
        total = Fraction(0)
        for exp, c in self.terms.items():
            val = c
            for v, e in zip(self.variables, exp):
                if e:
                    val *= _as_fraction(point[v]) ** e
            total += val
        return total

    # -- leading data --------------------------------------------------------

    def leading_exponent(self, order=GREVLEX):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order=GREVLEX):
        return self.terms[self.leading_exponent(order)]

    def monic(self, order=GREVLEX):
        if not self.terms:
            return self
        return self.scale(Fraction(1) / self.leading_coefficient(order))

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# text form


_TOKEN_KINDS = (
    ("INT", lambda ch: ch.isdigit()),
    ("NAME", lambda ch: ch.isalpha() or ch == "_"),
)
_SYMBOLS = "+-*^(),/;={}[]"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    """Tokens for the polynomial/DSL syntax.  '#' starts a comment."""
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise PolyParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _ExprParser:
    """Recursive-descent parser for polynomial expressions.

    Grammar: expr := term (("+"|"-") term)*; term := factor ("*" factor)*;
    factor := atom ("^" INT)?; atom := NAME | INT ("/" INT)? | "(" expr ")"
    | ("-"|"+") factor.  Implicit multiplication is a syntax error.
    """

    def __init__(self, tokens, pos, variables=None):
        self.tokens = tokens
        self.pos = pos
        self.variables = None if variables is None else tuple(variables)
        self.seen = []

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise PolyParseError(message, tok.line, tok.column)

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().kind == "*":
            self.take()
            node = node * self.parse_factor()
        nxt = self.peek()
        if nxt.kind in ("NAME", "INT", "("):
            self.error(f"missing '*' before {nxt.text!r}", nxt)
        return node

    def parse_factor(self):
        node = self.parse_atom()
        if self.peek().kind == "^":
            caret = self.take()
            tok = self.peek()
            if tok.kind != "INT":
                self.error("exponent must be a nonnegative integer", caret)
            self.take()
            node = node ** int(tok.text)
        return node

    def parse_atom(self):
        tok = self.take()
        if tok.kind == "-":
            return -self.parse_factor()
        if tok.kind == "+":
            return self.parse_factor()
        if tok.kind == "INT":
            num = int(tok.text)
            if self.peek().kind == "/":
                self.take()
                den = self.peek()
                if den.kind != "INT":
                    self.error("expected integer denominator", den)
                self.take()
                if int(den.text) == 0:
                    self.error("zero denominator", den)
                return MultiPoly.constant(Fraction(num, int(den.text)))
            return MultiPoly.constant(num)
        if tok.kind == "NAME":
            if self.variables is not None and tok.text not in self.variables:
                self.error(f"unknown variable {tok.text!r}", tok)
            if tok.text not in self.seen:
                self.seen.append(tok.text)
            return MultiPoly.variable(tok.text)
        if tok.kind == "(":
            node = self.parse_expr()
            closing = self.take()
            if closing.kind != ")":
                self.error("expected ')'", closing)
            return node
        self.error(f"unexpected token {tok.text!r}", tok)


def parse_polynomial(text, variables=None):
    """Parse polynomial text.  With ``variables`` given, unknown names are
    rejected and the result lives on exactly those variables; otherwise the
    variables are taken in order of first appearance."""
    tokens = tokenize(text)
    parser = _ExprParser(tokens, 0, variables)
    poly = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "EOF":
        parser.error(f"unexpected trailing {tail.text!r}", tail)
    if variables is not None:
        return poly.on_variables(tuple(variables))
    return poly.on_variables(tuple(parser.seen))


def _format_coeff(c):
    return str(c)


def format_poly(p, order=GREVLEX):
    """Canonical text for a polynomial: terms sorted descending by order."""
    if not p.terms:
        return "0"
    pieces = []
    for exp in sorted(p.terms, key=order.key, reverse=True):
        c = p.terms[exp]
        mono = "*".join(
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(p.variables, exp)
            if e
        )
        if not mono:
            body = _format_coeff(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{_format_coeff(abs(c))}*{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    sign, first = pieces[0]
    out = ("-" if sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# Groebner machinery


@dataclass(frozen=True)
class GroebnerBudget:
    """Resource caps for basis computations; exceeding them raises."""

    max_degree: int = 40
    max_basis: int = 2000


DEFAULT_BUDGET = GroebnerBudget()


def _exp_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _exp_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _exp_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _exp_coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _mono_times(p, exp, coeff):
    return {
        tuple(e + s for e, s in zip(m, exp)): c * coeff
        for m, c in p.terms.items()
    }


def normal_form(f, basis, order=GREVLEX, budget=None):
    """Remainder of f on full division by ``basis`` (list of nonzero polys).

    All polynomials must share one variable tuple.  The result has no term
    divisible by any basis leading monomial; deterministic for fixed input.
    """
    budget = budget or DEFAULT_BUDGET
    info = [(g, g.leading_exponent(order), g.leading_coefficient(order)) for g in basis]
    work = dict(f.terms)
    remainder = {}
    while work:
        lead = max(work, key=order.key)
        if sum(lead) > budget.max_degree:
            raise BudgetExceededError(
                f"budget exhausted: degree {sum(lead)} exceeds cap {budget.max_degree}"
            )
        c = work.pop(lead)
        if c == 0:
            continue
        for g, glm, glc in info:
            if _exp_divides(glm, lead):
                factor = c / glc
                shift = _exp_sub(lead, glm)
                for m, gc in g.terms.items():
                    if m == glm:
                        continue
                    exp = tuple(e + s for e, s in zip(m, shift))
                    work[exp] = work.get(exp, Fraction(0)) - factor * gc
                    if work[exp] == 0:
                        del work[exp]
                break
        else:
            remainder[lead] = c
    return MultiPoly(f.variables, remainder)


def s_polynomial(f, g, order=GREVLEX):
    lf = f.leading_exponent(order)
    lg = g.leading_exponent(order)
    lcm = _exp_lcm(lf, lg)
    a = MultiPoly(f.variables, _mono_times(f, _exp_sub(lcm, lf), Fraction(1) / f.terms[lf]))
    b = MultiPoly(g.variables, _mono_times(g, _exp_sub(lcm, lg), Fraction(1) / g.terms[lg]))
    return a - b


def _gm_update(G, pairs, h, order):
    """Gebauer-Moeller pair update when h joins the basis."""
    lmh = h.leading_exponent(order)

    def tpair(g1, g2):
        return _exp_lcm(g1.leading_exponent(order), g2.leading_exponent(order))

    candidates = [(h, g) for g in G]
    kept = []
    while candidates:
        _, g1 = candidates.pop(0)
        t1 = _exp_lcm(lmh, g1.leading_exponent(order))
        if _exp_coprime(lmh, g1.leading_exponent(order)):
            kept.append(g1)
            continue
        dominated = any(
            _exp_divides(_exp_lcm(lmh, g2.leading_exponent(order)), t1)
            for _, g2 in candidates
        ) or any(
            _exp_divides(_exp_lcm(lmh, g2.leading_exponent(order)), t1)
            for g2 in kept
        )
        if not dominated:
            kept.append(g1)
    new_pairs = [(h, g) for g in kept if not _exp_coprime(lmh, g.leading_exponent(order))]

    surviving = []
    for g1, g2 in pairs:
        t12 = tpair(g1, g2)
        if (
            not _exp_divides(lmh, t12)
            or _exp_lcm(lmh, g1.leading_exponent(order)) == t12
            or _exp_lcm(lmh, g2.leading_exponent(order)) == t12
        ):
            surviving.append((g1, g2))
    surviving.extend(new_pairs)

    new_G = [g for g in G if not _exp_divides(lmh, g.leading_exponent(order))]
    new_G.append(h)
    return new_G, surviving


def groebner_basis_of(generators, variables, order=GREVLEX, budget=None):
    """Reduced Groebner basis of the ideal spanned by ``generators``."""
    budget = budget or DEFAULT_BUDGET
    variables = tuple(variables)
    gens = [g.on_variables(variables) for g in generators if not g.is_zero()]
    if not gens:
        return ()

    G = []
    pairs = []
    counter = itertools.count()
    queue = [(next(counter), g) for g in gens]
    while queue or pairs:
        if queue:
            _, cand = queue.pop(0)
        else:
            best = min(
                range(len(pairs)),
                key=lambda i: order.key(
                    _exp_lcm(
                        pairs[i][0].leading_exponent(order),
                        pairs[i][1].leading_exponent(order),
                    )
                ),
            )
            f, g = pairs.pop(best)
            cand = s_polynomial(f, g, order)
        reduced = normal_form(cand, G, order, budget) if G else cand
        if reduced.is_zero():
            continue
        reduced = reduced.monic(order)
        if reduced.total_degree() > budget.max_degree:
            raise BudgetExceededError(
                f"budget exhausted: degree {reduced.total_degree()} exceeds cap "
                f"{budget.max_degree}"
            )
        G, pairs = _gm_update(G, pairs, reduced, order)
        if len(G) > budget.max_basis:
            raise BudgetExceededError(
                f"budget exhausted: basis size exceeds cap {budget.max_basis}"
            )

    # minimalise, then interreduce to the unique reduced basis
    minimal = []
    for g in sorted(G, key=lambda p: order.key(p.leading_exponent(order))):
        lm = g.leading_exponent(order)
        if not any(_exp_divides(m.leading_exponent(order), lm) for m in minimal):
            minimal.append(g)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(minimal):
            others = minimal[:i] + minimal[i + 1:]
            r = normal_form(g, others, order, budget).monic(order) if others else g
            if r.terms != g.terms:
                if r.is_zero():
                    minimal.pop(i)
                else:
                    minimal[i] = r
                changed = True
                break
    minimal.sort(key=lambda p: order.key(p.leading_exponent(order)), reverse=True)
    return tuple(minimal)


class Ideal:
    """An ideal of Q[variables] with cached reduced Groebner bases.

    The cache is write-once per monomial order and the computation is
    deterministic, so concurrent duplicate computation is harmless: both
    racers produce the identical reduced basis.
    """

    def __init__(self, variables, generators, budget=None):
        self.variables = tuple(variables)
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = parse_polynomial(g, self.variables)
            gens.append(g.on_variables(self.variables))
        self.generators = tuple(gens)
        self.budget = budget or DEFAULT_BUDGET
        self._bases = {}

    def __repr__(self):
        gens = ", ".join(format_poly(g) for g in self.generators)
        return f"Ideal([{', '.join(self.variables)}], <{gens}>)"

    def groebner_basis(self, order=GREVLEX, budget=None):
        key = (order.kind, order.block)
        if key not in self._bases:
            self._bases[key] = groebner_basis_of(
                self.generators, self.variables, order, budget or self.budget
            )
        return self._bases[key]

    def normal_form(self, f, order=GREVLEX):
        f = f.on_variables(self.variables)
        basis = self.groebner_basis(order)
        if not basis:
            return f
        return normal_form(f, list(basis), order, self.budget)

    def contains(self, f):
        if isinstance(f, str):
            f = parse_polynomial(f, self.variables)
        return self.normal_form(f).is_zero()

    def is_trivial(self):
        """True when 1 is in the ideal (empty variety)."""
        basis = self.groebner_basis()
        return len(basis) == 1 and basis[0].is_constant()

    def is_zero_ideal(self):
        return not self.groebner_basis()

    def radical_contains(self, f):
        """Rabinowitsch test: f is in the radical iff 1 in I + <1 - t*f>."""
        if isinstance(f, str):
            f = parse_polynomial(f, self.variables)
        f = f.on_variables(self.variables)
        if f.is_zero():
            return True
        aux = "t_rad"
        while aux in self.variables:
            aux = aux + "_"
        new_vars = self.variables + (aux,)
        t = MultiPoly.variable(aux, new_vars)
        gens = [g.on_variables(new_vars) for g in self.generators]
        gens.append(MultiPoly.one(new_vars) - t * f.on_variables(new_vars))
        return Ideal(new_vars, gens, self.budget).is_trivial()

    def elimination_ideal(self, keep_vars):
        """Generators of I intersected with Q[keep_vars], via a block order."""
        keep = [v for v in self.variables if v in set(keep_vars)]
        unknown = set(keep_vars) - set(self.variables)
        if unknown:
            raise ValueError(f"not ring variables: {sorted(unknown)}")
        drop = [v for v in self.variables if v not in set(keep)]
        if not drop:
            return Ideal(tuple(keep), self.generators, self.budget)
        reordered = tuple(drop) + tuple(keep)
        order = MonomialOrder("block", block=len(drop))
        basis = groebner_basis_of(
            [g.on_variables(reordered) for g in self.generators],
            reordered,
            order,
            self.budget,
        )
        kept = [g for g in basis if g.used_variables() <= set(keep)]
        return Ideal(tuple(keep), [g.on_variables(tuple(keep)) for g in kept], self.budget)

    def krull_dimension(self):
        """Dimension of V(I): the largest variable set independent modulo
        the leading-term ideal."""
        basis = self.groebner_basis()
        if self.is_trivial():
            raise EmptyVarietyError("empty variety")
        lms = [g.leading_exponent(GREVLEX) for g in basis]
        n = len(self.variables)
        supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in lms]
        for size in range(n, -1, -1):
            for subset in itertools.combinations(range(n), size):
                chosen = frozenset(subset)
                if all(not s <= chosen for s in supports):
                    return size
        return 0

    def equals(self, other):
        """Ideal equality by mutual membership of generators."""
        if set(self.variables) != set(other.variables):
            return False
        return all(self.contains(g.on_variables(self.variables)) for g in other.generators) and all(
            other.contains(g.on_variables(other.variables)) for g in self.generators
        )


# spec-level operation names -------------------------------------------------


def groebner_basis(ideal, order=GREVLEX, budget=None):
    return ideal.groebner_basis(order, budget)


def ideal_membership(f, ideal):
    return ideal.contains(f)


def radical_membership(f, ideal):
    return ideal.radical_contains(f)


def elimination_ideal(ideal, keep_vars):
    return ideal.elimination_ideal(keep_vars)


def krull_dimension(ideal):
    return ideal.krull_dimension()


# ---------------------------------------------------------------------------
# points, Jacobians, smoothness


def _point_map(variables, point):
    if isinstance(point, dict):
        return {v: _as_fraction(point[v]) for v in variables}
    point = tuple(point)
    if len(point) != len(variables):
        raise ValueError("point length does not match variable count")
    return {v: _as_fraction(c) for v, c in zip(variables, point)}


def jacobian_rank_at(generators, variables, point):
    """Exact rank of the Jacobian of ``generators`` at a point of their
    common zero set; raises NotOnVarietyError otherwise."""
    variables = tuple(variables)
    coords = _point_map(variables, point)
    gens = [g.on_variables(variables) for g in generators]
    for g in gens:
        if g.evaluate(coords) != 0:
            raise NotOnVarietyError(
                f"point does not satisfy generator {format_poly(g)}"
            )
    rows = [
        [g.partial_derivative(v).evaluate(coords) for v in variables]
        for g in gens
    ]
    return linalg.rank(rows)


def is_smooth_point(ideal, point):
    """Smoothness at a rational point: Jacobian rank equals codimension."""
    rank = jacobian_rank_at(ideal.generators, ideal.variables, point)
    dim = ideal.krull_dimension()
    return rank == len(ideal.variables) - dim


# ---------------------------------------------------------------------------
# univariate helpers (coefficient-list form, low degree first)


def univariate_coeffs(f, var=None):
    used = f.used_variables()
    if var is None:
        if len(used) > 1:
            raise ValueError("polynomial is not univariate")
        var = next(iter(used)) if used else None
    if var is None:
        return [f.constant_value()] if not f.is_zero() else []
    if not used <= {var}:
        raise ValueError("polynomial is not univariate")
    i = f.variables.index(var)
    deg = f.degree_in(var)
    coeffs = [Fraction(0)] * (deg + 1)
    for exp, c in f.terms.items():
        coeffs[exp[i]] += c
    return coeffs


def univariate_poly(coeffs, var):
    return MultiPoly((var,), {(i,): c for i, c in enumerate(coeffs) if c != 0})


def _uni_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def uni_divmod(a, b):
    a = list(a)
    b = _uni_trim(list(b))
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    while _uni_trim(a) and len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i, bc in enumerate(b):
            a[i + shift] -= factor * bc
        _uni_trim(a)
    return _uni_trim(q), a


def uni_gcd(a, b):
    a = _uni_trim(list(a))
    b = _uni_trim(list(b))
    while b:
        _, r = uni_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def uni_ext_gcd(a, b):
    """Monic g plus u, v with u*a + v*b = g."""
    a = _uni_trim(list(a))
    b = _uni_trim(list(b))
    r0, r1 = a, b
    u0, u1 = [Fraction(1)], []
    v0, v1 = [], [Fraction(1)]

    def sub_mul(x, q, y):
        # x - q*y on coefficient lists
        prod = [Fraction(0)] * (len(q) + len(y) - 1) if q and y else []
        for i, qc in enumerate(q):
            for j, yc in enumerate(y):
                prod[i + j] += qc * yc
        out = [Fraction(0)] * max(len(x), len(prod))
        for i, c in enumerate(x):
            out[i] += c
        for i, c in enumerate(prod):
            out[i] -= c
        return _uni_trim(out)

    while r1:
        q, r = uni_divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, sub_mul(u0, q, u1)
        v0, v1 = v1, sub_mul(v0, q, v1)
    if r0:
        lead = r0[-1]
        r0 = [c / lead for c in r0]
        u0 = [c / lead for c in u0]
        v0 = [c / lead for c in v0]
    return r0, u0, v0


def uni_derivative(a):
    return _uni_trim([a[i] * i for i in range(1, len(a))])


def squarefree_part(f, var=None):
    """f divided by gcd(f, f'), monic."""
    used = f.used_variables()
    if var is None:
        var = next(iter(used))
    coeffs = univariate_coeffs(f, var)
    g = uni_gcd(coeffs, uni_derivative(coeffs))
    q, r = uni_divmod(coeffs, g)
    assert not r
    if q:
        q = [c / q[-1] for c in q]
    return univariate_poly(q, var)


# ---------------------------------------------------------------------------
# factorisation (univariate and small multivariate cases, via sympy)


def _sympy_from_multipoly(f, gens):
    symbols = [sympy.Symbol(v) for v in gens]
    rep = {}
    pos = [f.variables.index(v) for v in gens]
    for exp, c in f.terms.items():
        key = tuple(exp[p] for p in pos)
        rep[key] = sympy.Rational(c.numerator, c.denominator)
    return sympy.Poly.from_dict(rep, *symbols, domain=sympy.QQ)


def _multipoly_from_sympy(poly, gens):
    terms = {}
    for exp, c in poly.terms():
        q = sympy.Rational(c)
        terms[tuple(int(e) for e in exp)] = Fraction(int(q.p), int(q.q))
    return MultiPoly(tuple(gens), terms)


def factor_univariate(f, var=None):
    """Exact factorisation over Q: (unit, [(monic irreducible, multiplicity)])."""
    used = f.used_variables()
    if var is None:
        if len(used) != 1:
            raise ValueError("polynomial is not univariate")
        var = next(iter(used))
    elif not used <= {var}:
        raise ValueError("polynomial is not univariate")
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    spoly = _sympy_from_multipoly(f, [var])
    const, factors = spoly.factor_list()
    unit = Fraction(int(sympy.Rational(const).p), int(sympy.Rational(const).q))
    out = []
    for fac, mult in factors:
        g = _multipoly_from_sympy(fac, [var])
        lc = g.leading_coefficient(LEX)
        unit *= lc ** mult
        out.append((g.scale(Fraction(1) / lc), int(mult)))
    out.sort(key=lambda pair: (pair[0].total_degree(), sorted(pair[0].terms.items())))
    return unit, out


def is_irreducible_univariate(f, var=None):
    _, factors = factor_univariate(f, var)
    return len(factors) == 1 and factors[0][1] == 1 and factors[0][0].total_degree() >= 1


def rational_roots(f, var=None):
    """Distinct rational roots plus a flag for remaining irrational ones."""
    _, factors = factor_univariate(f, var)
    roots = []
    irrational = False
    for g, _ in factors:
        if g.total_degree() == 1:
            coeffs = univariate_coeffs(g)
            roots.append(-coeffs[0] / coeffs[1])
        elif g.total_degree() >= 2:
            irrational = True
    roots.sort()
    return roots, irrational


# ---------------------------------------------------------------------------
# zero-dimensional solving


@dataclass(frozen=True)
class SolveResult:
    points: tuple
    has_nonrational: bool


def solve_zero_dim(ideal):
    """All rational points of a zero-dimensional variety.

    Lex triangularisation with rational-root extraction and back
    substitution.  ``has_nonrational`` reports whether any triangular
    univariate had a non-rational root, in which case non-rational
    solutions exist (or may, on partially explored branches).
    """
    if ideal.is_trivial():
        return SolveResult((), False)
    if ideal.krull_dimension() != 0:
        raise ValueError("ideal is not zero-dimensional")

    nonrational = [False]

    def recurse(variables, gens):
        constants = [g for g in gens if not g.used_variables()]
        if any(not g.is_zero() for g in constants):
            return []
        gens = [g for g in gens if g.used_variables()]
        if not variables:
            return [()]
        if not gens:
            # zero-dimensionality upstream rules this out
            raise ValueError("system became underdetermined")
        basis = groebner_basis_of(gens, variables, LEX, ideal.budget)
        if len(basis) == 1 and basis[0].is_constant():
            return []
        last = variables[-1]
        univars = [g for g in basis if g.used_variables() <= {last}]
        if not univars:
            raise ValueError("system became underdetermined")
        roots, irr = rational_roots(univars[0], last)
        if irr:
            nonrational[0] = True
        solutions = []
        rest = variables[:-1]
        for r in roots:
            substituted = [g.substitute({last: r}).on_variables(rest) for g in basis]
            for partial in recurse(rest, substituted):
                solutions.append(partial + (r,))
        return solutions

    pts = recurse(ideal.variables, list(ideal.generators))
    return SolveResult(tuple(sorted(pts)), nonrational[0])


# ---------------------------------------------------------------------------
# irreducibility in the supported cases


@dataclass(frozen=True)
class IrreducibilityResult:
    status: str  # "irreducible" | "reducible" | "empty" | "undetermined"
    method: str
    detail: str = ""


def _zero_dim_radical(ideal):
    """Radical of a zero-dimensional ideal: adjoin squarefree parts of the
    minimal univariate polynomial of every variable."""
    extra = []
    for v in ideal.variables:
        univ = ideal.elimination_ideal((v,))
        gens = [g for g in univ.generators if not g.is_zero()]
        if not gens:
            raise ValueError("not zero-dimensional")
        extra.append(squarefree_part(gens[0], v).on_variables(ideal.variables))
    return Ideal(ideal.variables, list(ideal.generators) + extra, ideal.budget)


def _standard_monomials(ideal):
    basis = ideal.groebner_basis()
    lms = [g.leading_exponent(GREVLEX) for g in basis]
    n = len(ideal.variables)
    found = []
    seen = set()
    queue = [(0,) * n]
    while queue:
        exp = queue.pop(0)
        if exp in seen:
            continue
        seen.add(exp)
        if any(_exp_divides(lm, exp) for lm in lms):
            continue
        found.append(exp)
        if len(found) > 10000:
            raise BudgetExceededError("budget exhausted: quotient dimension too large")
        for i in range(n):
            bumped = list(exp)
            bumped[i] += 1
            queue.append(tuple(bumped))
    found.sort(key=GREVLEX.key)
    return found


def _minimal_polynomial_mod(ideal, element, monomials):
    """Minimal polynomial of ``element`` in the finite-dimensional quotient,
    as a low-first coefficient list."""
    index = {m: i for i, m in enumerate(monomials)}
    dim = len(monomials)

    def coords(p):
        vec = [Fraction(0)] * dim
        for exp, c in p.terms.items():
            vec[index[exp]] += c
        return vec

    power = ideal.normal_form(MultiPoly.one(ideal.variables))
    rows = [coords(power)]
    while True:
        # look for a dependence among 1, u, ..., u^k
        ns = linalg.nullspace(list(map(list, zip(*rows))))
        if ns:
            rel = ns[0]
            lead = max(i for i, c in enumerate(rel) if c != 0)
            scaled = [c / rel[lead] for c in rel]
            return _uni_trim(scaled)
        if len(rows) > dim + 1:
            raise RuntimeError("minimal polynomial search overran quotient dimension")
        power = ideal.normal_form(power * element)
        rows.append(coords(power))


def decide_irreducibility(ideal, attempts=50):
    """Is V(ideal) irreducible over Q?  Supported cases per the module
    contract: the zero ideal, linear ideals, zero-dimensional ideals, and
    principal ideals in at most two variables.  Everything else is
    ``undetermined``.

    Classification works on the reduced Groebner basis, so the answer does
    not depend on how the ideal was presented."""
    gens = list(ideal.groebner_basis())
    if not gens:
        return IrreducibilityResult("irreducible", "zero-ideal", "affine space")
    if ideal.is_trivial():
        return IrreducibilityResult("empty", "trivial", "contains 1")

    if all(g.total_degree() <= 1 for g in gens):
        return IrreducibilityResult("irreducible", "linear", "affine subspace")

    if len(gens) == 1 and len(gens[0].used_variables()) <= 2:
        f = gens[0]
        used = sorted(f.used_variables())
        spoly = _sympy_from_multipoly(f, used)
        _, factors = spoly.factor_list()
        nontrivial = [fac for fac, _ in factors if fac.total_degree() > 0]
        if len(nontrivial) == 1:
            return IrreducibilityResult("irreducible", "principal-factorisation")
        return IrreducibilityResult(
            "reducible",
            "principal-factorisation",
            f"{len(nontrivial)} distinct irreducible factors",
        )

    if ideal.krull_dimension() == 0:
        radical = _zero_dim_radical(ideal)
        monomials = _standard_monomials(radical)
        quotient_dim = len(monomials)
        if quotient_dim == 0:
            return IrreducibilityResult("empty", "zero-dimensional")
        if quotient_dim == 1:
            return IrreducibilityResult("irreducible", "zero-dimensional", "single rational point")
        candidates = [MultiPoly.variable(v, radical.variables) for v in radical.variables]
        for k in range(1, attempts):
            combo = MultiPoly.zero(radical.variables)
            for i, v in enumerate(radical.variables):
                combo = combo + MultiPoly.variable(v, radical.variables).scale(k ** i)
            candidates.append(combo)
        for u in candidates[:attempts]:
            minpoly = _minimal_polynomial_mod(radical, radical.normal_form(u), monomials)
            if len(minpoly) - 1 == quotient_dim:
                m = univariate_poly(minpoly, "t")
                if is_irreducible_univariate(m, "t"):
                    return IrreducibilityResult("irreducible", "zero-dimensional")
                return IrreducibilityResult(
                    "reducible", "zero-dimensional", "primitive element splits"
                )
        return IrreducibilityResult(
            "undetermined", "zero-dimensional", "no primitive element found"
        )

    return IrreducibilityResult("undetermined", "unsupported-case")
