"""Graded Lie algebras over a cone, with classical and quantum backends.

Elements are finite sums of homogeneous terms indexed by lattice points of
the cone's interior monoid; all arithmetic is truncated at a fixed total
order measured by a positive grading functional.

Backends:

* classical -- terms c * z^m d_n (a derivation of the monomial algebra),
  with pairing(m, n) = 0.  The n-datum is stored primitive and
  lexicographically positive; scale and sign are absorbed into the
  coefficient (d_n is linear in n).
* quantum -- terms c * zhat^m in the commutator Lie algebra of a quantum
  torus twisted by a skew form: zhat^a zhat^b = v^omega(a,b) zhat^(a+b).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .coeffs import Coefficient, LaurentV
from .lattice import (
    Cone,
    Grading,
    SkewForm,
    Vec,
    is_zero_vec,
    pairing,
    primitive,
    primitive_lex,
    standard_cone,
    vadd,
    vneg,
)


class Backend:
    """Shared configuration: rank, cone, grading; subclasses fix the bracket."""

    name = "abstract"

    def __init__(self, rank: int, sigma: Optional[Cone] = None,
                 grading: Optional[Grading] = None):
        self.rank = rank
        self.sigma = sigma or standard_cone(rank)
        self.grading = grading or Grading(tuple([1] * rank))
        self.grading.check_cone(self.sigma)

    def degree(self, m: Vec) -> int:
        return self.grading.degree(m)

    def check_m(self, m: Vec) -> None:
        if is_zero_vec(m):
            raise ValueError("graded term at m = 0")
        if not self.sigma.contains(m):
            raise ValueError(f"{m} is not in the grading cone")

    def __eq__(self, other):
        return (type(self) is type(other) and self.rank == other.rank
                and self.sigma == other.sigma and self.grading == other.grading
                and getattr(self, "skew", None) == getattr(other, "skew", None))

    def __hash__(self):
        return hash((type(self).__name__, self.rank))


class ClassicalBackend(Backend):
    name = "classical"

    # -- Lie keys: (m, n) with n primitive lex-positive ----------------------

    def lie_key(self, m: Vec, n: Vec):
        """Normalize (m, n_raw) to a key plus the absorbed rational scale."""
        self.check_m(m)
        if is_zero_vec(n):
            raise ValueError("classical term with n = 0")
        if pairing(m, n) != 0:
            raise ValueError(f"tropical constraint violated: <{m},{n}> != 0")
        npl, c = primitive_lex(n)
        return (m, npl), Fraction(c)

    def bracket_keys(self, k1, c1: Coefficient, k2, c2: Coefficient):
        (m1, n1), (m2, n2) = k1, k2
        a = pairing(m2, n1)
        b = pairing(m1, n2)
        n = tuple(a * x2 - b * x1 for x2, x1 in zip(n2, n1))
        if is_zero_vec(n):
            return None
        npl, s = primitive_lex(n)
        coeff = (c1 * c2).scale(s)
        if coeff.is_zero():
            return None
        return (vadd(m1, m2), npl), coeff

    def act_keys(self, lie_key, c: Coefficient, alg_key, c2: Coefficient):
        m, n = lie_key
        mp = alg_key
        t = pairing(mp, n)
        if t == 0:
            return None
        coeff = (c * c2).scale(t)
        if coeff.is_zero():
            return None
        return vadd(m, mp), coeff

    def alg_mul_keys(self, k1, c1: Coefficient, k2, c2: Coefficient):
        coeff = c1 * c2
        if coeff.is_zero():
            return None
        return vadd(k1, k2), coeff

    def alg_key_m(self, key) -> Vec:
        return key

    def n_line_of_key(self, key) -> Vec:
        return key[1]


class QuantumBackend(Backend):
    name = "quantum"

    def __init__(self, rank: int, skew: SkewForm, sigma: Optional[Cone] = None,
                 grading: Optional[Grading] = None):
        super().__init__(rank, sigma, grading)
        if skew.rank != rank:
            raise ValueError("skew form rank mismatch")
        self.skew = skew

    def lie_key(self, m: Vec, n=None):
        self.check_m(m)
        return (m, None), Fraction(1)

    def bracket_keys(self, k1, c1: Coefficient, k2, c2: Coefficient):
        (m1, _), (m2, _) = k1, k2
        w = self.skew.omega(m1, m2)
        if w == 0:
            return None
        lv = LaurentV({w: Fraction(1), -w: Fraction(-1)})
        coeff = (c1 * c2).scale_laurent(lv)
        if coeff.is_zero():
            return None
        return (vadd(m1, m2), None), coeff

    def act_keys(self, lie_key, c: Coefficient, alg_key, c2: Coefficient):
        m, _ = lie_key
        mp, np_ = alg_key
        w = self.skew.omega(m, mp) + pairing(m, np_)
        if w == 0:
            return None
        lv = LaurentV({w: Fraction(1), -w: Fraction(-1)})
        coeff = (c * c2).scale_laurent(lv)
        if coeff.is_zero():
            return None
        return (vadd(m, mp), np_), coeff

    def alg_mul_keys(self, k1, c1: Coefficient, k2, c2: Coefficient):
        (m1, n1), (m2, n2) = k1, k2
        w = self.skew.omega(m1, m2) + pairing(m1, n2) - pairing(m2, n1)
        coeff = c1 * c2
        if w != 0:
            coeff = coeff.scale_laurent(LaurentV.v_power(w))
        if coeff.is_zero():
            return None
        return (vadd(m1, m2), vadd(n1, n2)), coeff

    def alg_key_m(self, key) -> Vec:
        return key[0]

    def n_line_of_key(self, key) -> Vec:
        from .lattice import lex_positive
        p = self.skew.p_map(key[0])
        if is_zero_vec(p):
            raise ValueError("degenerate direction: p(m) = 0")
        return lex_positive(primitive(p))


class LieElement:
    """A truncated element of the graded Lie algebra."""

    __slots__ = ("backend", "order", "terms")

    def __init__(self, backend: Backend, order: int, terms: Optional[dict] = None):
        self.backend = backend
        self.order = order
        out = {}
        for key, c in (terms or {}).items():
            if not c:
                continue
            if backend.degree(key[0]) < order:
                out[key] = c
        self.terms = out

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(backend: Backend, order: int) -> "LieElement":
        return LieElement(backend, order)

    @staticmethod
    def term(backend: Backend, order: int, m: Vec, n, coeff) -> "LieElement":
        """A single homogeneous term; coeff may be Coefficient, LaurentV or rational."""
        key, scale = backend.lie_key(m, n)
        c = _as_coeff(coeff).scale(scale)
        return LieElement(backend, order, {key: c})

    # -- linear structure ---------------------------------------------------

    def _compat(self, other: "LieElement") -> None:
        if self.backend != other.backend:
            raise ValueError("backend mismatch")
        if self.order != other.order:
            raise ValueError(f"truncation order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return LieElement(self.backend, self.order, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.backend, self.order,
                          {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def scale(self, c) -> "LieElement":
        if isinstance(c, Coefficient):
            return LieElement(self.backend, self.order,
                              {k: v * c for k, v in self.terms.items()})
        if isinstance(c, LaurentV):
            return LieElement(self.backend, self.order,
                              {k: v.scale_laurent(c) for k, v in self.terms.items()})
        return LieElement(self.backend, self.order,
                          {k: v.scale(Fraction(c)) for k, v in self.terms.items()})

    # -- Lie structure ------------------------------------------------------

    def bracket(self, other: "LieElement") -> "LieElement":
        self._compat(other)
        b = self.backend
        out: dict = {}
        for k1, c1 in self.terms.items():
            d1 = b.degree(k1[0])
            for k2, c2 in other.terms.items():
                if d1 + b.degree(k2[0]) >= self.order:
                    continue
                r = b.bracket_keys(k1, c1, k2, c2)
                if r is None:
                    continue
                key, c = r
                s = out.get(key)
                s = c if s is None else s + c
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return LieElement(b, self.order, out)

    # -- structure queries --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        self._compat(other)
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[k] == other.terms[k] for k in self.terms)

    def min_degree(self) -> Optional[int]:
        if not self.terms:
            return None
        return min(self.backend.degree(k[0]) for k in self.terms)

    def project(self, order: int) -> "LieElement":
        if order > self.order:
            raise ValueError("cannot extend a truncated element")
        return LieElement(self.backend, order, self.terms)

    def lift(self, order: int) -> "LieElement":
        """Reinterpret at a higher truncation (terms unchanged)."""
        if order < self.order:
            raise ValueError("use project to lower the order")
        return LieElement(self.backend, order, self.terms)

    def degree_blocks(self) -> dict:
        out: dict = {}
        for k, c in self.terms.items():
            out.setdefault(self.backend.degree(k[0]), {})[k] = c
        return out

    def direction_blocks(self) -> dict:
        """Group terms by the primitive direction of m."""
        out: dict = {}
        for k, c in self.terms.items():
            out.setdefault(primitive(k[0]), {})[k] = c
        return out

    def tropical_membership(self) -> dict:
        """For each m, the common primitive n-line, or 'mixed'.

        Classical terms report the stored n (already primitive, positive);
        quantum terms report the direction induced by the skew form.
        """
        lines: dict = {}
        for k in self.terms:
            m = k[0]
            n = self.backend.n_line_of_key(k)
            prev = lines.get(m)
            if prev is None:
                lines[m] = n
            elif prev != n and prev != "mixed":
                lines[m] = "mixed"
        return lines

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda p: (p[0][0], p[0][1] or ()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (m, n), c in self.sorted_terms():
            tag = f"z^{m}" if n is None else f"z^{m}d_{n}"
            bits.append(f"({c!r})*{tag}")
        return " + ".join(bits)


def _as_coeff(c) -> Coefficient:
    if isinstance(c, Coefficient):
        return c
    if isinstance(c, LaurentV):
        return Coefficient.laurent(c)
    return Coefficient.rational(Fraction(c))


def log_one_plus(backend: Backend, order: int, m: Vec, n, coeff) -> LieElement:
    """log(1 + c z^m) attached to the direction n, truncated.

    Classical wall functions 1 + c z^m have logarithm
    sum_j (-1)^(j-1)/j c^j z^(jm) d_n.
    """
    c = _as_coeff(coeff)
    out = LieElement.zero(backend, order)
    dm = backend.degree(m)
    power = Coefficient.one(c.tcap)
    j = 0
    while (j + 1) * dm < order:
        j += 1
        power = power * c
        if power.is_zero():
            break
        term = LieElement.term(backend, order, tuple(j * x for x in m), n,
                               power.scale(Fraction((-1) ** (j - 1), j)))
        out = out + term
    return out
