"""Truncated graded algebras acted on by the Lie backends.

An ``AlgebraSeries`` is a finite sum of monomials:

* classical backend -- monomials z^m, m in the lattice M, coefficientwise
  commutative product;
* quantum backend -- monomials zhat^(m, n) of a quantum affine space on
  M x N with twist Omega((m1,n1),(m2,n2)) = omega(m1,m2) + <m1,n2> - <m2,n1>.

Each series carries a base exponent; truncation drops monomials whose
offset from the base has grading degree >= order.  Offsets always lie in
the grading cone, so every operation terminates.

The quantum series with base 0 form the associative envelope of the
quantum Lie backend; ``envelope_exp`` and ``envelope_log`` convert between
group logarithms and invertible series there.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .coeffs import Coefficient, LaurentV
from .lattice import Vec, is_zero_vec, vadd, vsub
from .lie import Backend, ClassicalBackend, LieElement, QuantumBackend, _as_coeff


class AlgebraSeries:
    """A truncated monomial sum over one of the backends."""

    __slots__ = ("backend", "order", "base", "terms")

    def __init__(self, backend: Backend, order: int, base, terms: Optional[dict] = None):
        self.backend = backend
        self.order = order
        self.base = base
        base_m = backend.alg_key_m(base)
        out = {}
        for key, c in (terms or {}).items():
            if not c:
                continue
            off = vsub(backend.alg_key_m(key), base_m)
            if is_zero_vec(off) or backend.grading.degree(off) < order:
                out[key] = c
        self.terms = out

    # -- constructors -------------------------------------------------------

    @staticmethod
    def monomial(backend: Backend, order: int, key, coeff=1) -> "AlgebraSeries":
        c = _as_coeff(coeff)
        key = _norm_key(backend, key)
        return AlgebraSeries(backend, order, key, {key: c})

    @staticmethod
    def unit(backend: Backend, order: int) -> "AlgebraSeries":
        key = _zero_key(backend)
        return AlgebraSeries(backend, order, key, {key: Coefficient.one()})

    @staticmethod
    def zero(backend: Backend, order: int, base=None) -> "AlgebraSeries":
        return AlgebraSeries(backend, order, base if base is not None
                             else _zero_key(backend), {})

    # -- linear structure ---------------------------------------------------

    def _compat(self, other: "AlgebraSeries") -> None:
        if self.backend != other.backend:
            raise ValueError("backend mismatch")
        if self.order != other.order:
            raise ValueError("truncation order mismatch")

    def __add__(self, other: "AlgebraSeries") -> "AlgebraSeries":
        self._compat(other)
        if self.base != other.base:
            raise ValueError("adding series with different base exponents")
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return AlgebraSeries(self.backend, self.order, self.base, out)

    def __neg__(self) -> "AlgebraSeries":
        return AlgebraSeries(self.backend, self.order, self.base,
                             {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "AlgebraSeries") -> "AlgebraSeries":
        return self + (-other)

    def scale(self, c) -> "AlgebraSeries":
        if isinstance(c, Coefficient):
            return AlgebraSeries(self.backend, self.order, self.base,
                                 {k: v * c for k, v in self.terms.items()})
        if isinstance(c, LaurentV):
            return AlgebraSeries(self.backend, self.order, self.base,
                                 {k: v.scale_laurent(c) for k, v in self.terms.items()})
        return AlgebraSeries(self.backend, self.order, self.base,
                             {k: v.scale(Fraction(c)) for k, v in self.terms.items()})

    # -- multiplicative structure -------------------------------------------

    def __mul__(self, other: "AlgebraSeries") -> "AlgebraSeries":
        self._compat(other)
        b = self.backend
        base = _key_add(b, self.base, other.base)
        base_m = b.alg_key_m(base)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                r = b.alg_mul_keys(k1, c1, k2, c2)
                if r is None:
                    continue
                key, c = r
                off = vsub(b.alg_key_m(key), base_m)
                if not is_zero_vec(off) and b.grading.degree(off) >= self.order:
                    continue
                s = out.get(key)
                s = c if s is None else s + c
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return AlgebraSeries(b, self.order, base, out)

    # -- queries -------------------------------------------------------------

    def coefficient_of(self, key) -> Coefficient:
        key = _norm_key(self.backend, key)
        return self.terms.get(key, Coefficient.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AlgebraSeries):
            return NotImplemented
        self._compat(other)
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[k] == other.terms[k] for k in self.terms)

    def min_offset_degree(self) -> Optional[int]:
        if not self.terms:
            return None
        b = self.backend
        base_m = b.alg_key_m(self.base)
        degs = []
        for k in self.terms:
            off = vsub(b.alg_key_m(k), base_m)
            degs.append(0 if is_zero_vec(off) else b.grading.degree(off))
        return min(degs)

    def project(self, order: int) -> "AlgebraSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return AlgebraSeries(self.backend, order, self.base, self.terms)

    def rebase(self, base) -> "AlgebraSeries":
        """Reinterpret relative truncation from a different base exponent."""
        return AlgebraSeries(self.backend, self.order, base, self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda p: _key_sort(p[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c!r})*z^{k}" for k, c in self.sorted_terms())


def _zero_key(backend: Backend):
    z = tuple([0] * backend.rank)
    if isinstance(backend, QuantumBackend):
        return (z, z)
    return z


def _norm_key(backend: Backend, key):
    if isinstance(backend, QuantumBackend):
        m, n = key
        return (tuple(m), tuple(n))
    return tuple(key)


def _key_add(backend: Backend, k1, k2):
    if isinstance(backend, QuantumBackend):
        return (vadd(k1[0], k2[0]), vadd(k1[1], k2[1]))
    return vadd(k1, k2)


def _key_sort(key):
    if isinstance(key[0], tuple):
        return (key[0], key[1])
    return (key, ())


# ---------------------------------------------------------------------------
# Lie action on series.
# ---------------------------------------------------------------------------


def act(g: LieElement, s: AlgebraSeries) -> AlgebraSeries:
    """The derivation action of a Lie element on a series."""
    if g.backend != s.backend:
        raise ValueError("backend mismatch")
    b = s.backend
    base_m = b.alg_key_m(s.base)
    out: dict = {}
    for lk, lc in g.terms.items():
        dl = b.degree(lk[0])
        for ak, ac in s.terms.items():
            off = vsub(b.alg_key_m(ak), base_m)
            da = 0 if is_zero_vec(off) else b.grading.degree(off)
            if dl + da >= s.order:
                continue
            r = b.act_keys(lk, lc, ak, ac)
            if r is None:
                continue
            key, c = r
            acc = out.get(key)
            acc = c if acc is None else acc + c
            if acc:
                out[key] = acc
            elif key in out:
                del out[key]
    return AlgebraSeries(b, s.order, s.base, out)


# ---------------------------------------------------------------------------
# Associative envelope (quantum backend): exp and log of series.
# ---------------------------------------------------------------------------


def lie_to_series(g: LieElement, order: Optional[int] = None) -> AlgebraSeries:
    """Embed a quantum Lie element as a base-0 series (n-component zero)."""
    if not isinstance(g.backend, QuantumBackend):
        raise ValueError("only the quantum backend has an associative envelope")
    order = order or g.order
    z = tuple([0] * g.backend.rank)
    terms = {(m, z): c for (m, _), c in g.terms.items()}
    return AlgebraSeries(g.backend, order, (z, z), terms)


def series_to_lie(s: AlgebraSeries, order: Optional[int] = None) -> LieElement:
    z = tuple([0] * s.backend.rank)
    terms = {}
    for (m, n), c in s.terms.items():
        if n != z:
            raise ValueError("series does not lie in the Lie subalgebra")
        if is_zero_vec(m):
            raise ValueError("series has a constant term")
        terms[(m, None)] = c
    return LieElement(s.backend, order or s.order, terms)


def series_exp(u: AlgebraSeries) -> AlgebraSeries:
    """exp of a series with strictly positive minimal offset degree."""
    if u.min_offset_degree() == 0:
        raise ValueError("exp needs a series without constant term")
    out = AlgebraSeries.unit(u.backend, u.order) + u
    term = u
    j = 1
    while True:
        j += 1
        term = (term * u).scale(Fraction(1, j))
        if term.is_zero():
            break
        out = out + term
    return out


def series_log(s: AlgebraSeries) -> AlgebraSeries:
    """log of a series of the form 1 + (positive-degree terms)."""
    one = AlgebraSeries.unit(s.backend, s.order)
    zero_key = _zero_key(s.backend)
    if not (s.coefficient_of(zero_key) == Coefficient.one()):
        raise ValueError("log needs a series with constant term 1")
    w = s - one
    if w.is_zero():
        return AlgebraSeries.zero(s.backend, s.order)
    out = w
    power = w
    j = 1
    while True:
        j += 1
        power = power * w
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (j - 1), j))
    return out


def envelope_exp(g: LieElement) -> AlgebraSeries:
    return series_exp(lie_to_series(g))


def envelope_log(s: AlgebraSeries, order: Optional[int] = None) -> LieElement:
    return series_to_lie(series_log(s), order)
