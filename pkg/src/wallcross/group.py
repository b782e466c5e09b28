"""Exponential groups of the truncated graded Lie algebras.

A group element is stored by its logarithm.  Products use the
Baker-Campbell-Hausdorff series, which terminates because every nested
bracket strictly raises the grading degree:

* classical backend -- the Dynkin word expansion of log(e^x e^y), with
  per-word rational coefficients computed once and cached;
* quantum backend -- multiplication in the associative quantum-torus
  envelope followed by the series logarithm (the Dynkin route remains
  available and is used to cross-check).

The faithful action on the monomial algebras ('apply') is the second,
independent representation of group elements; equality of path-ordered
products is decided through it.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Optional, Sequence

from .algebra import (
    AlgebraSeries,
    act,
    envelope_exp,
    envelope_log,
    lie_to_series,
    series_log,
)
from .coeffs import Coefficient
from .lie import Backend, ClassicalBackend, LieElement, QuantumBackend


class GroupElement:
    """exp(log) in the truncated exponential group."""

    __slots__ = ("log", "_env")

    def __init__(self, log: LieElement):
        self.log = log
        self._env = {}

    def envelope(self, order: int, sign: int = 1) -> AlgebraSeries:
        """Cached exponential in the quantum associative envelope."""
        key = (order, sign)
        got = self._env.get(key)
        if got is None:
            got = envelope_exp(self.log.project(order).scale(sign))
            self._env[key] = got
        return got

    @property
    def backend(self) -> Backend:
        return self.log.backend

    @property
    def order(self) -> int:
        return self.log.order

    @staticmethod
    def identity(backend: Backend, order: int) -> "GroupElement":
        return GroupElement(LieElement.zero(backend, order))

    @staticmethod
    def exp(log: LieElement) -> "GroupElement":
        return GroupElement(log)

    def inverse(self) -> "GroupElement":
        return GroupElement(-self.log)

    def power(self, e: int) -> "GroupElement":
        if e == 1:
            return self
        if e == -1:
            return self.inverse()
        if e == 0:
            return GroupElement.identity(self.backend, self.order)
        # parallel homogeneous families commute with themselves only when
        # all brackets vanish; general powers fold through bch
        out = GroupElement.identity(self.backend, self.order)
        g = self if e > 0 else self.inverse()
        for _ in range(abs(e)):
            out = bch_product(g, out)
        return out

    def is_identity(self) -> bool:
        return self.log.is_zero()

    def project(self, order: int) -> "GroupElement":
        return GroupElement(self.log.project(order))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.log == other.log

    def __repr__(self):
        return f"exp({self.log!r})"


# ---------------------------------------------------------------------------
# BCH via the Dynkin word expansion.
# ---------------------------------------------------------------------------

_WORD_COEFF_CACHE: dict = {}


def _word_coeff(word: tuple) -> Fraction:
    """Coefficient of the right-nested bracket of ``word`` in log(e^x e^y).

    ``word`` is a tuple over {0, 1} (0 = x, 1 = y).  The value sums
    (-1)^(n-1) / (n * len * prod r_i! s_i!) over all cuts of the word into
    blocks of the shape x^r y^s.
    """
    cached = _WORD_COEFF_CACHE.get(word)
    if cached is not None:
        return cached
    ln = len(word)
    # weight[i][j]: 1/(r! s!) if word[i:j] == x^r y^s, else None
    weight = [[None] * (ln + 1) for _ in range(ln + 1)]
    for i in range(ln):
        for j in range(i + 1, ln + 1):
            seg = word[i:j]
            r = 0
            while r < len(seg) and seg[r] == 0:
                r += 1
            if any(ch == 0 for ch in seg[r:]):
                continue
            s = len(seg) - r
            weight[i][j] = Fraction(1, factorial(r) * factorial(s))
    # dp[j][n] = sum over cuts of word[:j] into n valid blocks of prod weights
    dp = [dict() for _ in range(ln + 1)]
    dp[0][0] = Fraction(1)
    for j in range(1, ln + 1):
        acc: dict = {}
        for i in range(j):
            w = weight[i][j]
            if w is None:
                continue
            for n, val in dp[i].items():
                acc[n + 1] = acc.get(n + 1, Fraction(0)) + val * w
        dp[j] = acc
    total = Fraction(0)
    for n, val in dp[ln].items():
        total += Fraction((-1) ** (n - 1), n) * val
    total /= ln
    _WORD_COEFF_CACHE[word] = total
    return total


def bch_dynkin(x: LieElement, y: LieElement) -> LieElement:
    """log(e^x e^y) by the Dynkin expansion, exact at the truncation order."""
    if x.backend != y.backend or x.order != y.order:
        raise ValueError("bch operands must share backend and order")
    order = x.order
    z = x + y
    dx = x.min_degree()
    dy = y.min_degree()
    if dx is None or dy is None:
        return z
    # nested brackets of words over {x, y}; suffix results are shared
    suffix_cache: dict = {(0,): x, (1,): y}

    def nested(word: tuple) -> LieElement:
        got = suffix_cache.get(word)
        if got is not None:
            return got
        head = x if word[0] == 0 else y
        rest = nested(word[1:])
        val = head.bracket(rest)
        suffix_cache[word] = val
        return val

    max_len = order - 1
    for ln in range(2, max_len + 1):
        for code in range(1 << ln):
            word = tuple((code >> i) & 1 for i in range(ln))
            nx = word.count(0)
            ny = ln - nx
            if nx * dx + ny * dy >= order:
                continue
            if nx == 0 or ny == 0:
                continue  # pure words have vanishing nested brackets
            val = nested(word)
            if val.is_zero():
                continue
            c = _word_coeff(word)
            if c:
                z = z + val.scale(c)
    return z


def bch_product(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product exp(a.log) exp(b.log) as a group element."""
    if a.backend != b.backend or a.order != b.order:
        raise ValueError("product operands must share backend and order")
    if a.is_identity():
        return b
    if b.is_identity():
        return a
    if isinstance(a.backend, QuantumBackend):
        s = a.envelope(a.order) * b.envelope(b.order)
        return GroupElement(envelope_log(s, a.order))
    return GroupElement(bch_dynkin(a.log, b.log))


def fold_word(word: Sequence[tuple], backend: Backend, order: int) -> GroupElement:
    """Fold crossing factors (group_element, exponent) in application order.

    The first factor of ``word`` acts first, so the group product has later
    factors on the left.  Quantum words fold in the associative envelope
    (one exponential per factor, a single logarithm at the end).
    """
    if isinstance(backend, QuantumBackend):
        s = None
        for g, e in word:
            f = g.envelope(order, 1 if e >= 0 else -1)
            for _ in range(abs(e)):
                s = f if s is None else f * s
        if s is None:
            return GroupElement.identity(backend, order)
        return GroupElement(envelope_log(s, order))
    acc = GroupElement.identity(backend, order)
    for g, e in word:
        f = g if e == 1 else g.inverse() if e == -1 else g.power(e)
        acc = bch_product(f, acc)
    return acc


# ---------------------------------------------------------------------------
# The action of group elements on algebra series.
# ---------------------------------------------------------------------------


def apply(g: GroupElement, s: AlgebraSeries) -> AlgebraSeries:
    """exp of the derivation action: sum_j (1/j!) (log .)^j applied to s."""
    if g.backend != s.backend:
        raise ValueError("backend mismatch")
    out = s
    term = s
    j = 0
    while True:
        j += 1
        term = act(g.log, term).scale(Fraction(1, j))
        if term.is_zero():
            break
        out = out + term
    return out


def apply_word(word: Sequence[tuple], s: AlgebraSeries) -> AlgebraSeries:
    """Apply crossing factors to a series, first factor first."""
    out = s
    for g, e in word:
        if e == 1:
            out = apply(g, out)
        elif e == -1:
            out = apply(g.inverse(), out)
        else:
            f = g if e > 0 else g.inverse()
            for _ in range(abs(e)):
                out = apply(f, out)
    return out


def default_probes(backend: Backend, order: int) -> list:
    """Monomials on which the action is faithful at every truncation order."""
    probes = []
    r = backend.rank
    if isinstance(backend, QuantumBackend):
        zero = tuple([0] * r)
        for i in range(r):
            n = tuple(1 if j == i else 0 for j in range(r))
            probes.append(AlgebraSeries.monomial(backend, order, (zero, n)))
            probes.append(AlgebraSeries.monomial(backend, order, (zero, tuple(-x for x in n))))
    else:
        for i in range(r):
            m = tuple(1 if j == i else 0 for j in range(r))
            probes.append(AlgebraSeries.monomial(backend, order, m))
            probes.append(AlgebraSeries.monomial(backend, order, tuple(-x for x in m)))
    return probes


def automorphism_equal(a: GroupElement, b: GroupElement,
                       probes: Optional[Iterable[AlgebraSeries]] = None) -> bool:
    """Equality through the faithful action on probe monomials."""
    if a.backend != b.backend or a.order != b.order:
        raise ValueError("comparison needs matching backend and order")
    if probes is None:
        probes = default_probes(a.backend, a.order)
    return all(apply(a, p) == apply(b, p) for p in probes)


def word_equal(word_a: Sequence[tuple], word_b: Sequence[tuple],
               backend: Backend, order: int,
               probes: Optional[Iterable[AlgebraSeries]] = None) -> bool:
    """Equality of two crossing words through the action, without BCH."""
    if probes is None:
        probes = default_probes(backend, order)
    return all(apply_word(word_a, p) == apply_word(word_b, p) for p in probes)
