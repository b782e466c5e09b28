"""Exact coefficient arithmetic.

Three layers:

* ``LaurentV`` -- Laurent polynomials in a variable v (v = q^(1/2)) over Q,
  extended by denominators that are products of the factors (v^j - v^-j).
  The refined wall-function logarithms live here; everything is exact and
  zero-testing is decidable.  Plain rationals are the special case of a
  constant numerator.
* ``NilMonomial`` -- monomials in deformation variables t_i (truncated at
  t_i^(l+1) = 0 when a cap l is set) and u_ij (always u_ij^2 = 0).
* ``Coefficient`` -- finitely supported maps NilMonomial -> LaurentV; the
  coefficient ring of every series in the package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional


# ---------------------------------------------------------------------------
# Laurent polynomials / localized Laurent fractions in v.
# ---------------------------------------------------------------------------


def _poly_of_factor(j: int) -> dict:
    """The Laurent polynomial v^j - v^-j as an exponent->coeff dict."""
    return {j: Fraction(1), -j: Fraction(-1)}


def _dict_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            elif e in out:
                del out[e]
    return out


def _dict_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        elif e in out:
            del out[e]
    return out


def _dict_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {e: x * c for e, x in a.items()}


def _den_poly(den: dict) -> dict:
    out = {0: Fraction(1)}
    for j, e in sorted(den.items()):
        f = _poly_of_factor(j)
        for _ in range(e):
            out = _dict_mul(out, f)
    return out


def _divide_by_factor(num: dict, j: int) -> Optional[dict]:
    """Exact division of a Laurent polynomial by (v^j - v^-j); None if inexact."""
    if not num:
        return {}
    # shift to an ordinary polynomial in v
    lo = min(num)
    hi = max(num)
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for e, c in num.items():
        coeffs[e - lo] = c
    # divisor v^j - v^-j = v^-j (v^{2j} - 1): divide by (v^{2j} - 1), shift by +j
    d = 2 * j
    n = len(coeffs)
    if n - 1 < d:
        return None
    quot = [Fraction(0)] * (n - d)
    rem = coeffs[:]
    for i in range(n - 1, d - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        quot[i - d] = c
        rem[i] -= c
        rem[i - d] += c
    if any(rem[i] != 0 for i in range(d)):
        return None
    out = {}
    for i, c in enumerate(quot):
        if c:
            out[i + lo + j] = c
    return out


class LaurentV:
    """num / prod_j (v^j - v^-j)^den[j], num a Laurent polynomial over Q."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: Optional[dict] = None):
        self.num = num
        self.den = den or {}
        if not self.num:
            self.den = {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rational(c) -> "LaurentV":
        c = Fraction(c)
        return LaurentV({0: c} if c else {})

    @staticmethod
    def v_power(e: int, c=1) -> "LaurentV":
        c = Fraction(c)
        return LaurentV({e: c} if c else {})

    @staticmethod
    def zero() -> "LaurentV":
        return LaurentV({})

    @staticmethod
    def one() -> "LaurentV":
        return LaurentV({0: Fraction(1)})

    @staticmethod
    def inverse_factor(j: int, c=1) -> "LaurentV":
        """c / (v^j - v^-j)."""
        c = Fraction(c)
        return LaurentV({0: c} if c else {}, {j: 1} if c else {})

    # -- ring operations ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def __neg__(self) -> "LaurentV":
        return LaurentV({e: -c for e, c in self.num.items()}, dict(self.den))

    def __add__(self, other: "LaurentV") -> "LaurentV":
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return LaurentV(_dict_add(self.num, other.num), dict(self.den)).reduced()
        den = {j: max(self.den.get(j, 0), other.den.get(j, 0))
               for j in set(self.den) | set(other.den)}
        a = self.num
        for j, e in den.items():
            extra = e - self.den.get(j, 0)
            for _ in range(extra):
                a = _dict_mul(a, _poly_of_factor(j))
        b = other.num
        for j, e in den.items():
            extra = e - other.den.get(j, 0)
            for _ in range(extra):
                b = _dict_mul(b, _poly_of_factor(j))
        return LaurentV(_dict_add(a, b), den).reduced()

    def __sub__(self, other: "LaurentV") -> "LaurentV":
        return self + (-other)

    def __mul__(self, other: "LaurentV") -> "LaurentV":
        # reduction is lazy: products keep factored denominators as-is
        if not self.num or not other.num:
            return LaurentV({})
        den = dict(self.den)
        for j, e in other.den.items():
            den[j] = den.get(j, 0) + e
        return LaurentV(_dict_mul(self.num, other.num), den)

    def scale(self, c) -> "LaurentV":
        c = Fraction(c)
        if not c:
            return LaurentV({})
        return LaurentV(_dict_scale(self.num, c), dict(self.den))

    def divide(self, other: "LaurentV") -> "LaurentV":
        """Exact division in the fraction field (other must be nonzero)."""
        if not other.num:
            raise ZeroDivisionError("division by zero LaurentV")
        # self/other = self * den(other)-poly * 1/num(other); fold num(other)
        # into factored shape when possible, else do a naive fraction with a
        # one-off polynomial denominator turned into factors by reduction.
        num = _dict_mul(self.num, _den_poly(other.den))
        q = _try_exact_poly_divide(num, other.num)
        if q is not None:
            return LaurentV(q, dict(self.den)).reduced()
        raise ArithmeticError("inexact LaurentV division outside the localized ring")

    def reduced(self) -> "LaurentV":
        """Cancel denominator factors that divide the numerator exactly."""
        if not self.den or not self.num:
            return LaurentV(self.num, {})
        num = self.num
        den = dict(self.den)
        for j in sorted(den):
            while den.get(j, 0) > 0:
                q = _divide_by_factor(num, j)
                if q is None:
                    break
                num = q
                den[j] -= 1
            if den.get(j, 0) == 0:
                den.pop(j, None)
        return LaurentV(num, den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentV):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        a = _dict_mul(self.num, _den_poly(other.den))
        b = _dict_mul(other.num, _den_poly(self.den))
        return a == b

    def __hash__(self):
        r = self.reduced()
        return hash((tuple(sorted(r.num.items())), tuple(sorted(r.den.items()))))

    def bar(self) -> "LaurentV":
        """The involution v -> v^-1."""
        num = {-e: c for e, c in self.num.items()}
        sign = 1
        for j, e in self.den.items():
            if e % 2:
                sign = -sign
        out = LaurentV({e: (c if sign > 0 else -c) for e, c in num.items()},
                       dict(self.den))
        return out

    def as_rational(self) -> Fraction:
        r = self.reduced()
        if r.den or any(e != 0 for e in r.num):
            raise ValueError("not a rational constant")
        return r.num.get(0, Fraction(0))

    def __repr__(self):
        if not self.num:
            return "0"
        parts = []
        for e, c in sorted(self.num.items()):
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*v")
            else:
                parts.append(f"{c}*v^{e}")
        s = " + ".join(parts)
        if self.den:
            d = "*".join(f"(v^{j}-v^-{j})^{e}" if e > 1 else f"(v^{j}-v^-{j})"
                         for j, e in sorted(self.den.items()))
            return f"({s})/({d})"
        return s


def _try_exact_poly_divide(num: dict, div: dict) -> Optional[dict]:
    """Exact Laurent polynomial division num/div, or None if inexact."""
    if not num:
        return {}
    lo_n, hi_n = min(num), max(num)
    lo_d, hi_d = min(div), max(div)
    a = [Fraction(0)] * (hi_n - lo_n + 1)
    for e, c in num.items():
        a[e - lo_n] = c
    b = [Fraction(0)] * (hi_d - lo_d + 1)
    for e, c in div.items():
        b[e - lo_d] = c
    if len(a) < len(b):
        return None
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - 1, len(b) - 2, -1):
        c = a[i]
        if c == 0:
            continue
        k = i - (len(b) - 1)
        f = c / lead
        q[k] = f
        for j, bc in enumerate(b):
            a[k + j] -= f * bc
    if any(c != 0 for c in a):
        return None
    out = {}
    shift = lo_n - lo_d
    for i, c in enumerate(q):
        if c:
            out[i + shift] = c
    return out


def quantum_integer(n: int) -> LaurentV:
    """[n]_v = (v^n - v^-n)/(v - v^-1) as a Laurent polynomial; [0] = 0."""
    if n == 0:
        return LaurentV.zero()
    if n < 0:
        return -quantum_integer(-n)
    return LaurentV({e: Fraction(1) for e in range(-(n - 1), n, 2)})


# ---------------------------------------------------------------------------
# Nilpotent deformation monomials.
# ---------------------------------------------------------------------------


class NilMonomial:
    """A monomial prod t_i^{e_i} * prod u_{ij}; u's are square-free."""

    __slots__ = ("t", "u")

    def __init__(self, t: tuple = (), u: tuple = ()):
        self.t = tuple(sorted((i, e) for i, e in t if e))
        self.u = tuple(sorted(u))

    @staticmethod
    def one() -> "NilMonomial":
        return NilMonomial()

    @staticmethod
    def t_var(i: int, e: int = 1) -> "NilMonomial":
        return NilMonomial(t=((i, e),))

    @staticmethod
    def u_var(i: int, j: int) -> "NilMonomial":
        return NilMonomial(u=((i, j),))

    def mul(self, other: "NilMonomial", tcap: Optional[int]) -> Optional["NilMonomial"]:
        """Product, or None when it collapses to zero under the nilpotency."""
        if self.u or other.u:
            su, ou = set(self.u), set(other.u)
            if su & ou:
                return None
            u = tuple(sorted(su | ou))
        else:
            u = ()
        td = dict(self.t)
        for i, e in other.t:
            td[i] = td.get(i, 0) + e
        if tcap is not None and any(e > tcap for e in td.values()):
            return None
        return NilMonomial(tuple(td.items()), u)

    def is_one(self) -> bool:
        return not self.t and not self.u

    def __eq__(self, other):
        return isinstance(other, NilMonomial) and self.t == other.t and self.u == other.u

    def __hash__(self):
        return hash((self.t, self.u))

    def __lt__(self, other: "NilMonomial"):
        return (self.t, self.u) < (other.t, other.u)

    def __repr__(self):
        parts = [f"t{i}" + (f"^{e}" if e > 1 else "") for i, e in self.t]
        parts += [f"u{i}{j}" for i, j in self.u]
        return "*".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# The full coefficient ring.
# ---------------------------------------------------------------------------


class Coefficient:
    """Finitely supported NilMonomial -> LaurentV map with a t-power cap."""

    __slots__ = ("terms", "tcap")

    def __init__(self, terms: Optional[dict] = None, tcap: Optional[int] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        self.tcap = tcap

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(tcap: Optional[int] = None) -> "Coefficient":
        return Coefficient({}, tcap)

    @staticmethod
    def one(tcap: Optional[int] = None) -> "Coefficient":
        return Coefficient({NilMonomial.one(): LaurentV.one()}, tcap)

    @staticmethod
    def rational(c, tcap: Optional[int] = None) -> "Coefficient":
        lv = LaurentV.from_rational(c)
        return Coefficient({NilMonomial.one(): lv} if lv else {}, tcap)

    @staticmethod
    def laurent(lv: LaurentV, tcap: Optional[int] = None) -> "Coefficient":
        return Coefficient({NilMonomial.one(): lv} if lv else {}, tcap)

    @staticmethod
    def monomial(m: NilMonomial, lv: Optional[LaurentV] = None,
                 tcap: Optional[int] = None) -> "Coefficient":
        lv = LaurentV.one() if lv is None else lv
        return Coefficient({m: lv} if lv else {}, tcap)

    # -- ring structure -----------------------------------------------------

    def _merge_cap(self, other: "Coefficient") -> Optional[int]:
        if self.tcap is None:
            return other.tcap
        if other.tcap is None or other.tcap == self.tcap:
            return self.tcap
        raise ValueError("mixing coefficients with different t-power caps")

    def __add__(self, other: "Coefficient") -> "Coefficient":
        cap = self._merge_cap(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        return Coefficient(out, cap)

    def __neg__(self) -> "Coefficient":
        return Coefficient({m: -c for m, c in self.terms.items()}, self.tcap)

    def __sub__(self, other: "Coefficient") -> "Coefficient":
        return self + (-other)

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        cap = self._merge_cap(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1.mul(m2, cap)
                if m is None:
                    continue
                c = c1 * c2
                if not c:
                    continue
                s = out.get(m)
                s = c if s is None else s + c
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return Coefficient(out, cap)

    def scale(self, c) -> "Coefficient":
        c = Fraction(c)
        if not c:
            return Coefficient({}, self.tcap)
        return Coefficient({m: lv.scale(c) for m, lv in self.terms.items()}, self.tcap)

    def scale_laurent(self, lv: LaurentV) -> "Coefficient":
        if not lv:
            return Coefficient({}, self.tcap)
        return Coefficient({m: c * lv for m, c in self.terms.items()}, self.tcap)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda p: p[0])))

    def reduced(self) -> "Coefficient":
        return Coefficient({m: c.reduced() for m, c in self.terms.items()}, self.tcap)

    def as_rational(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) != 1 or not next(iter(self.terms)).is_one():
            raise ValueError("not a rational constant")
        return next(iter(self.terms.values())).as_rational()

    def proportionality(self, other: "Coefficient") -> Optional[LaurentV]:
        """A LaurentV c with self == other.scale_laurent(c), if one exists."""
        if other.is_zero():
            return LaurentV.zero() if self.is_zero() else None
        if self.is_zero():
            return LaurentV.zero()
        m0, c0 = next(iter(sorted(other.terms.items(), key=lambda p: p[0])))
        mine = self.terms.get(m0)
        if mine is None:
            return None
        ratio = mine.divide(c0)
        if self == other.scale_laurent(ratio):
            return ratio
        return None

    def strip_t_power(self, i: int, e: int) -> "Coefficient":
        """Divide exactly by t_i^e; every monomial must carry that factor."""
        out = {}
        for m, c in self.terms.items():
            td = dict(m.t)
            if td.get(i, 0) < e:
                raise ValueError(f"coefficient not divisible by t{i}^{e}")
            td[i] -= e
            out[NilMonomial(tuple(td.items()), m.u)] = c
        return Coefficient(out, self.tcap)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            parts.append(f"({c!r})" if m.is_one() else f"({c!r})*{m!r}")
        return " + ".join(parts)


def perturbation_substitute(c: Coefficient, l: int) -> Coefficient:
    """Apply t_i -> u_i1 + ... + u_il, expanding with u_ij^2 = 0.

    The image of t_i^k is k! * sum over k-subsets J of prod_{s in J} u_is.
    """
    from itertools import combinations
    from math import factorial

    out = Coefficient.zero(tcap=None)
    for m, lv in c.terms.items():
        if m.u:
            raise ValueError("perturbation_substitute expects t-variables only")
        pieces = [Coefficient.laurent(lv)]
        for i, e in m.t:
            if e > l:
                pieces = [Coefficient.zero()]
                break
            subs = Coefficient.zero()
            for J in combinations(range(1, l + 1), e):
                u = NilMonomial(u=tuple((i, j) for j in J))
                subs = subs + Coefficient.monomial(u)
            subs = subs.scale(factorial(e))
            pieces.append(subs)
        acc = pieces[0]
        for p in pieces[1:]:
            acc = acc * p
        out = out + acc
    return out
