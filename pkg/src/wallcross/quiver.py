"""Acyclic-quiver frontend: skew-symmetrized Euler data, the canonical
initial diagram in the dual plane, canonical flow directions, the base-line
factorization check, and theta functions evaluated two ways.

Conventions: nodes are labeled 1..r with all arrows pointing from lower to
higher index (acyclicity normal form); omega(f_i, f_j) = a_ji - a_ij where
a_ij counts arrows i -> j; p: M -> N is defined by <m', p(m)> = omega(m', m).

Initial walls sit on the coordinate hyperplanes f_i^perp of N_R and carry
the quantum dilogarithm automorphism

    log Theta_i = sum_{j >= 1} (-1)^j zhat^(j f_i) / (j (v^j - v^-j)),

whose exponential is prod_{k>=0} (1 + q^-(k+1/2) zhat^(f_i))^-1.  With the
crossing conventions of the diagram module this series reproduces itself on
added walls (for the two-node quiver with one arrow, that statement is the
pentagon identity).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .coeffs import Coefficient, LaurentV
from .diagram import Diagram, DiagramError, Path, Wall, path_word
from .group import GroupElement, apply_word, default_probes, word_equal
from .lattice import (
    SkewForm,
    Support2,
    Vec,
    is_zero_vec,
    lex_positive,
    pairing,
    perp2,
    primitive,
    vneg,
)
from .lie import LieElement, QuantumBackend


@dataclass(frozen=True)
class QuiverData:
    """An acyclic quiver in normal form: arrows[i][j] counts arrows i->j,
    nonzero only for i < j (1-based node labels)."""

    r: int
    arrows: tuple  # tuple of (i, j, count), 1-based, i < j

    def __post_init__(self):
        for (i, j, c) in self.arrows:
            if not (1 <= i < j <= self.r):
                raise ValueError(
                    "arrows must go from lower to higher node label "
                    "(relabel the quiver into acyclic normal form)")
            if c < 1:
                raise ValueError("arrow count must be positive")

    def arrow_count(self, i: int, j: int) -> int:
        return sum(c for (a, b, c) in self.arrows if (a, b) == (i, j))


def euler_skew(q: QuiverData) -> SkewForm:
    """The skew-symmetrized Euler form omega(f_i, f_j) = a_ji - a_ij."""
    r = q.r
    rows = [[0] * r for _ in range(r)]
    for i in range(1, r + 1):
        for j in range(1, r + 1):
            rows[i - 1][j - 1] = q.arrow_count(j, i) - q.arrow_count(i, j)
    return SkewForm(tuple(tuple(row) for row in rows))


def canonical_direction(m: Vec, skew: SkewForm) -> Vec:
    """The flow direction: -p(m), or -k f_i-dual when m = k f_i."""
    nz = [i for i, x in enumerate(m) if x != 0]
    if len(nz) == 1 and m[nz[0]] > 0:
        k = m[nz[0]]
        return tuple(-k if i == nz[0] else 0 for i in range(len(m)))
    if not skew.is_nondegenerate():
        raise ValueError("canonical direction needs a non-degenerate skew form")
    return vneg(skew.p_map(m))


def quantum_dilog_log(backend: QuantumBackend, order: int, m: Vec) -> LieElement:
    """log of the quantum dilogarithm of zhat^m at the given truncation."""
    out = LieElement.zero(backend, order)
    d = backend.degree(m)
    j = 0
    while (j + 1) * d < order:
        j += 1
        c = Coefficient.laurent(
            LaurentV.inverse_factor(j, Fraction((-1) ** j, j)))
        out = out + LieElement.term(backend, order,
                                    tuple(j * x for x in m), None, c)
    return out


def initial_diagram(q: QuiverData, k: int) -> Diagram:
    """The r coordinate-hyperplane walls with dilogarithm automorphisms."""
    if k < 1:
        raise ValueError("order must be >= 1")
    skew = euler_skew(q)
    backend = QuantumBackend(q.r, skew)
    walls = []
    for i in range(q.r):
        f = tuple(1 if t == i else 0 for t in range(q.r))
        log = quantum_dilog_log(backend, k, f)
        if q.r == 2:
            support = Support2.line((0, 0), perp2(f))
        else:
            from .lattice import SupportCone
            support = SupportCone(tuple(Fraction(0) for _ in range(q.r)), f, None)
        walls.append(Wall(f, None, support, GroupElement(log)))
    return Diagram(backend, "cone", k, walls,
                   flow=lambda m: canonical_direction(m, skew))


# ---------------------------------------------------------------------------
# The base line and its factorization property.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaLine:
    """The probe line t -> (-1,...,-1) + t * slopes with increasing slopes."""

    slopes: tuple

    def __post_init__(self):
        s = self.slopes
        if any(x <= 0 for x in s) or any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
            raise ValueError("slopes must be strictly increasing and positive")

    def point(self, t) -> tuple:
        t = Fraction(t)
        return tuple(Fraction(-1) + t * Fraction(a) for a in self.slopes)

    def path(self, t0=0, t1=None) -> Path:
        r = len(self.slopes)
        if t1 is None:
            # reach strictly past the last initial wall crossing at 1/a_1
            t1 = Fraction(1, 1) / Fraction(self.slopes[0]) + 1
        return Path((self.point(t0), self.point(t1)))


def draw_lambda(D: Diagram, seed: int = 0, max_tries: int = 64) -> LambdaLine:
    """Seeded rational slopes, re-drawn until the probe line misses every
    joint and every non-initial wall support of the diagram, verified
    exactly at the diagram's truncation order."""
    rng = random.Random(seed)
    r = D.backend.rank
    for _ in range(max_tries):
        raw = sorted(set(Fraction(rng.randrange(1, 400), rng.randrange(1, 60))
                         for _ in range(r)))
        if len(raw) < r:
            continue
        lam = LambdaLine(tuple(raw))
        if _lambda_ok(D, lam):
            return lam
    raise DiagramError("could not draw a generic probe line")


def _lambda_ok(D: Diagram, lam: LambdaLine) -> bool:
    if not D.rank2:
        raise DiagramError("the probe-line check is rank-2 only")
    p0, p1 = lam.path().vertices
    direction = tuple(b - a for a, b in zip(p0, p1))
    initial_lines = {w.support_key() for w in D.walls if w.support.kind == "line"}
    for w in D.nontrivial_walls():
        if w.support_key() in initial_lines:
            continue
        from .lattice import segment_hyperplane_crossing
        try:
            hit = segment_hyperplane_crossing(p0, p1, w.support)
        except ValueError:
            return False
        if hit is not None:
            return False
    for j in D.joints():
        d0 = tuple(Fraction(x) - Fraction(y) for x, y in zip(j, p0))
        from .lattice import cross2
        if cross2(d0, direction) == 0:
            return False
    return True


def lambda_factorization_check(D_completed: Diagram, lam: LambdaLine,
                               order: Optional[int] = None) -> bool:
    """Path-ordered product along the probe line equals the ordered product
    of the initial wall automorphisms (checked through the faithful action)."""
    order = order or D_completed.order
    Dk = D_completed.project(order)
    if not _lambda_ok(Dk, lam):
        raise DiagramError("probe line hits a non-initial wall or a joint; re-draw")
    word = path_word(Dk, lam.path())
    initial = [w for w in Dk.walls if w.support.kind == "line"]
    # apply-order w_r, ..., w_1 (the operator product Theta_1 ... Theta_r);
    # lex-ascending m sorts the basis walls in exactly that order
    initial.sort(key=lambda w: w.m)
    expected = [(w.theta.project(order), 1) for w in initial]
    return word_equal(word, expected, Dk.backend, order)


# ---------------------------------------------------------------------------
# Quiver theta functions, two ways.
# ---------------------------------------------------------------------------


def in_dual_interior(backend: QuantumBackend, Q_point) -> bool:
    return all(Fraction(x) > 0 for x in Q_point)


def quiver_theta(D_completed: Diagram, n: Vec, Q_point, k: Optional[int] = None):
    """theta_n at the point Q, computed by broken lines and by transport.

    The two evaluations must agree on a consistent diagram; a mismatch is
    an internal error, never an expected outcome.
    """
    from .theta import theta as theta_broken, theta_by_transport

    k = k or D_completed.order
    backend = D_completed.backend
    if not isinstance(backend, QuantumBackend):
        raise DiagramError("quiver theta runs on the quantum backend")
    if is_zero_vec(n):
        raise ValueError("theta index n must be nonzero")
    if any(x < 0 for x in n):
        raise ValueError("theta index must lie in the dual cone monoid")
    by_lines = theta_broken(D_completed, n, Q_point, k)
    by_transport = theta_by_transport(D_completed, n, Q_point, k)
    if not (by_lines == by_transport):
        raise AssertionError(
            f"broken-line and transport theta disagree at {Q_point} for n={n}")
    return by_lines
