"""Exact lattice geometry: vectors, cones, gradings, rank-2 supports, skew forms.

Lattice vectors are plain tuples of Python ints (arbitrary precision).  Points
of the ambient real vector space are tuples of ``fractions.Fraction``.  All
geometry in this module is exact; no floats appear anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence


Vec = tuple  # lattice vector: tuple[int, ...]
Point = tuple  # rational point: tuple[Fraction, ...]


def vadd(a: Vec, b: Vec) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"rank mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"rank mismatch: {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vscale(c, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def is_zero_vec(a: Vec) -> bool:
    return all(x == 0 for x in a)


def pairing(m: Vec, n: Vec):
    """Canonical pairing between a lattice and its dual: sum of m_i * n_i."""
    if len(m) != len(n):
        raise ValueError(f"rank mismatch: {len(m)} vs {len(n)}")
    return sum(x * y for x, y in zip(m, n))


def content(a: Vec) -> int:
    """Gcd of the coordinates (0 for the zero vector)."""
    g = 0
    for x in a:
        g = math.gcd(g, abs(int(x)))
    return g


def primitive(a: Vec) -> Vec:
    """The primitive vector on the ray of ``a``.  Requires a nonzero."""
    g = content(a)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in a)


def lex_positive(a: Vec) -> Vec:
    """Normalize the sign of a nonzero vector: first nonzero coordinate > 0."""
    for x in a:
        if x > 0:
            return a
        if x < 0:
            return vneg(a)
    raise ValueError("zero vector has no sign normalization")


def primitive_lex(a: Vec) -> tuple[Vec, Fraction]:
    """Split a nonzero rational/integer vector as scale * (primitive, lex-positive).

    Returns ``(p, c)`` with ``a == c * p``, ``p`` primitive and lex-positive.
    """
    fracs = [Fraction(x) for x in a]
    if all(f == 0 for f in fracs):
        raise ValueError("zero vector")
    den = math.lcm(*[f.denominator for f in fracs])
    ints = tuple(int(f * den) for f in fracs)
    p = primitive(ints)
    pl = lex_positive(p)
    # a = (g/den) * p = +-(g/den) * pl
    g = content(ints)
    c = Fraction(g, den)
    if pl != p:
        c = -c
    return pl, c


def cross2(a: Sequence, b: Sequence):
    """2x2 determinant a_0*b_1 - a_1*b_0 (rank-2 cross product)."""
    return a[0] * b[1] - a[1] * b[0]


def perp2(n: Vec) -> Vec:
    """A primitive integer vector spanning n^perp in rank 2."""
    if len(n) != 2:
        raise ValueError("perp2 requires rank 2")
    return primitive((-n[1], n[0]))


def dual_partner(n: Vec) -> Vec:
    """Some integer vector w with pairing(w, n) == 1 (n must be primitive)."""
    if content(n) != 1:
        raise ValueError("dual_partner requires a primitive vector")
    # Solve sum w_i n_i = 1 by iterated extended gcd.
    w = [0] * len(n)
    g = 0
    for i, x in enumerate(n):
        if x == 0:
            continue
        if g == 0:
            g = abs(x)
            w[i] = 1 if x > 0 else -1
            continue
        new_g = math.gcd(g, abs(x))
        # new_g = s*g + t*x
        s, t = _bezout(g, x)
        for j in range(i):
            w[j] *= s
        w[i] = t
        g = new_g
    if g != 1:
        raise ValueError("not primitive")
    return tuple(w)


def _bezout(a: int, b: int) -> tuple[int, int]:
    """Return (s, t) with s*a + t*b == gcd(|a|, |b|) for a >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


@dataclass(frozen=True)
class Cone:
    """A polyhedral cone in M_R given by integer ray generators."""

    generators: tuple

    def __post_init__(self):
        for g in self.generators:
            if is_zero_vec(g):
                raise ValueError("cone generators must be nonzero")

    @property
    def rank(self) -> int:
        return len(self.generators[0])

    def contains(self, v: Vec) -> bool:
        """Exact membership test for an integer or rational vector."""
        if is_zero_vec(v):
            return True
        if self.rank == 2:
            return self._contains2(v)
        return _in_cone_general(self.generators, v)

    def _contains2(self, v: Vec) -> bool:
        # v is in the cone iff it lies weakly between some adjacent pair of
        # generators; for the common simplicial case this is two sign tests.
        gens = self.generators
        for i in range(len(gens)):
            for j in range(len(gens)):
                if i == j:
                    continue
                a, b = gens[i], gens[j]
                d = cross2(a, b)
                if d == 0:
                    continue
                s = cross2(a, v)
                t = cross2(v, b)
                if d > 0 and s >= 0 and t >= 0:
                    return True
                if d < 0 and s <= 0 and t <= 0:
                    return True
        # all generators collinear: v must be a nonnegative multiple
        for g in gens:
            if cross2(g, v) == 0 and pairing(g, v) > 0:
                return True
        return False

    def is_strictly_convex(self) -> bool:
        """True iff the cone contains no line (no nonzero v with -v as well)."""
        for g in self.generators:
            if self.contains(vneg(g)):
                return False
        return True


def _in_cone_general(gens: Sequence[Vec], v: Vec) -> bool:
    """Membership of v in cone(gens) by exact Fourier-Motzkin style search.

    Small instances only (used for rank >= 3 supports); solves for a
    nonnegative combination over all maximal linearly independent subsets.
    """
    from itertools import combinations

    r = len(v)
    target = [Fraction(x) for x in v]
    for size in range(1, min(len(gens), r) + 1):
        for subset in combinations(gens, size):
            sol = _solve_nonneg(subset, target)
            if sol is not None:
                return True
    return False


def _solve_nonneg(gens: Sequence[Vec], target: list) -> Optional[list]:
    """Solve sum c_i gens_i = target with c_i >= 0, exactly; None if no solution."""
    rows = len(target)
    cols = len(gens)
    # Gaussian elimination on the augmented matrix [gens^T | target].
    a = [[Fraction(gens[j][i]) for j in range(cols)] + [target[i]] for i in range(rows)]
    piv_cols = []
    row = 0
    for col in range(cols):
        piv = next((i for i in range(row, rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for i in range(rows):
            if i != row and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        piv_cols.append(col)
        row += 1
        if row == rows:
            break
    for i in range(row, rows):
        if a[i][cols] != 0:
            return None
    sol = [Fraction(0)] * cols
    for i, col in enumerate(piv_cols):
        sol[col] = a[i][cols]
    # Free columns are set to zero; check consistency and nonnegativity.
    for i in range(rows):
        acc = sum(sol[j] * gens[j][i] for j in range(cols))
        if acc != target[i]:
            return None
    if any(c < 0 for c in sol):
        return None
    return sol


def standard_cone(rank: int) -> Cone:
    gens = []
    for i in range(rank):
        e = [0] * rank
        e[i] = 1
        gens.append(tuple(e))
    return Cone(tuple(gens))


@dataclass(frozen=True)
class Grading:
    """A positive linear functional on the cone, used to filter by total order."""

    weights: tuple

    def __post_init__(self):
        if any(w < 1 for w in self.weights):
            raise ValueError("grading weights must be positive integers")

    def degree(self, m: Vec) -> int:
        if len(m) != len(self.weights):
            raise ValueError("rank mismatch")
        return sum(w * x for w, x in zip(self.weights, m))

    def check_cone(self, sigma: Cone) -> None:
        for g in sigma.generators:
            if self.degree(g) < 1:
                raise ValueError(f"grading not positive on cone generator {g}")


def degree_of(m: Vec, sigma: Cone, d: Grading) -> int:
    """Degree of a nonzero cone point; errors outside the cone or at zero."""
    if is_zero_vec(m):
        raise ValueError("degree of the zero vector is undefined")
    if not sigma.contains(m):
        raise ValueError(f"{m} is not in the cone")
    deg = d.degree(m)
    if deg < 1:
        raise ValueError(f"degree of {m} is not positive")
    return deg


# ---------------------------------------------------------------------------
# Rank-2 supports: full lines and rays with rational base points.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Support2:
    """A full line or a closed ray in a rank-2 plane.

    ``base`` is a rational point: for a ray, its endpoint; for a line, any
    point on it (canonicalized to the foot of the perpendicular from the
    origin so that equal lines compare equal).  ``direction`` is primitive;
    for a line it is lex-positive.
    """

    kind: str  # "line" | "ray"
    base: Point
    direction: Vec

    def __post_init__(self):
        if self.kind not in ("line", "ray"):
            raise ValueError(f"unknown support kind {self.kind!r}")
        if len(self.base) != 2 or len(self.direction) != 2:
            raise ValueError("Support2 is rank-2 only")

    @staticmethod
    def line(base: Sequence, direction: Vec) -> "Support2":
        d = lex_positive(primitive(direction))
        b = tuple(Fraction(x) for x in base)
        # canonical base: orthogonal projection of the origin onto the line
        dd = pairing(d, d)
        t = Fraction(-(b[0] * d[0] + b[1] * d[1]), dd)
        b = (b[0] + t * d[0], b[1] + t * d[1])
        return Support2("line", b, d)

    @staticmethod
    def ray(base: Sequence, direction: Vec) -> "Support2":
        d = primitive(direction)
        b = tuple(Fraction(x) for x in base)
        return Support2("ray", b, d)

    def contains(self, p: Sequence) -> bool:
        dx = Fraction(p[0]) - self.base[0]
        dy = Fraction(p[1]) - self.base[1]
        if cross2((dx, dy), self.direction) != 0:
            return False
        if self.kind == "line":
            return True
        t = _param_along(self.direction, (dx, dy))
        return t >= 0

    def param_of(self, p: Sequence) -> Fraction:
        """Parameter t with p == base + t*direction (p must lie on the support line)."""
        dx = Fraction(p[0]) - self.base[0]
        dy = Fraction(p[1]) - self.base[1]
        if cross2((dx, dy), self.direction) != 0:
            raise ValueError("point not on the support line")
        return _param_along(self.direction, (dx, dy))

    def point_at(self, t) -> Point:
        return (
            self.base[0] + Fraction(t) * self.direction[0],
            self.base[1] + Fraction(t) * self.direction[1],
        )

    def boundary_points(self) -> tuple:
        """The topological boundary of the support: ray base points only."""
        return (self.base,) if self.kind == "ray" else ()


def _param_along(d: Vec, v: Sequence) -> Fraction:
    if d[0] != 0:
        return Fraction(v[0], d[0])
    return Fraction(v[1], d[1])


def intersect_supports(a: Support2, b: Support2):
    """Exact intersection classification of two rank-2 supports.

    Returns ``("empty",)``, ``("point", p)`` with a rational point, or
    ``("overlap", seg)`` when the supports share a segment of positive
    length (``seg`` is a pair of endpoints, each possibly None for an
    unbounded end).
    """
    d = cross2(a.direction, b.direction)
    if d != 0:
        # transversal lines: solve base_a + s*dir_a = base_b + t*dir_b
        rx = b.base[0] - a.base[0]
        ry = b.base[1] - a.base[1]
        s = Fraction(cross2((rx, ry), b.direction), d)
        t = Fraction(cross2((rx, ry), a.direction), d)
        if a.kind == "ray" and s < 0:
            return ("empty",)
        if b.kind == "ray" and t < 0:
            return ("empty",)
        return ("point", a.point_at(s))
    # parallel: collinear or disjoint
    rx = b.base[0] - a.base[0]
    ry = b.base[1] - a.base[1]
    if cross2((rx, ry), a.direction) != 0:
        return ("empty",)
    # same line; intersect the parameter ranges on a's parameterization
    lo_a, hi_a = _param_range(a, a)
    lo_b, hi_b = _param_range(a, b)
    lo = lo_a if lo_b is None else (lo_b if lo_a is None else max(lo_a, lo_b))
    hi = hi_a if hi_b is None else (hi_b if hi_a is None else min(hi_a, hi_b))
    if lo is not None and hi is not None:
        if lo > hi:
            return ("empty",)
        if lo == hi:
            return ("point", a.point_at(lo))
    p_lo = a.point_at(lo) if lo is not None else None
    p_hi = a.point_at(hi) if hi is not None else None
    return ("overlap", (p_lo, p_hi))


def _param_range(frame: Support2, s: Support2):
    """Parameter range of support s on frame's line (they must be collinear)."""
    if s.kind == "line":
        return (None, None)
    t0 = frame.param_of(s.base)
    same_dir = pairing(frame.direction, s.direction) > 0
    return (t0, None) if same_dir else (None, t0)


# ---------------------------------------------------------------------------
# Rank-r cone supports (consistency checking of user-supplied diagrams only).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportCone:
    """A codimension-one cone in N_R: apex + (cone in normal^perp).

    ``normal`` is a primitive vector of the dual lattice (the wall's grading
    direction); ``generators`` spans the cone inside the hyperplane
    normal^perp, or None for the full hyperplane.
    """

    apex: Point
    normal: Vec
    generators: Optional[tuple] = None

    def __post_init__(self):
        if self.generators is not None:
            for g in self.generators:
                if pairing(g, self.normal) != 0:
                    raise ValueError("cone generator not tangent to the hyperplane")

    @property
    def rank(self) -> int:
        return len(self.normal)

    def contains(self, p: Sequence) -> bool:
        v = tuple(Fraction(x) - a for x, a in zip(p, self.apex))
        if sum(x * n for x, n in zip(v, self.normal)) != 0:
            return False
        if self.generators is None:
            return True
        return _in_cone_general(self.generators, v)


def segment_hyperplane_crossing(p0: Point, p1: Point, support) -> Optional[tuple]:
    """Transversal crossing of the open segment (p0, p1) with a support.

    Works for Support2 and SupportCone.  Returns (t, point) with t in (0, 1),
    or None.  Raises ValueError on tangency with a point of the support in
    the closed segment (the caller must perturb).
    """
    if isinstance(support, Support2):
        normal = (-support.direction[1], support.direction[0])
        anchor = support.base
    else:
        normal = support.normal
        anchor = support.apex
    h0 = sum((Fraction(a) - Fraction(b)) * n for a, b, n in zip(p0, anchor, normal))
    h1 = sum((Fraction(a) - Fraction(b)) * n for a, b, n in zip(p1, anchor, normal))
    if h0 == h1:
        if h0 == 0:
            # segment inside the hyperplane: tangency if it meets the support
            if support.contains(p0) or support.contains(p1):
                raise ValueError("path runs inside a wall support")
        return None
    if h0 == 0 or h1 == 0:
        if (h0 == 0 and support.contains(p0)) or (h1 == 0 and support.contains(p1)):
            raise ValueError("path vertex lies on a wall support")
        return None
    if (h0 > 0) == (h1 > 0):
        return None
    t = h0 / (h0 - h1)
    pt = tuple(Fraction(a) + t * (Fraction(b) - Fraction(a)) for a, b in zip(p0, p1))
    if support.contains(pt):
        return (t, pt)
    return None


# ---------------------------------------------------------------------------
# Skew forms and the induced map p: M -> N.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SkewForm:
    """An antisymmetric integer bilinear form on M, as a matrix of rows."""

    rows: tuple

    def __post_init__(self):
        r = len(self.rows)
        for i in range(r):
            if len(self.rows[i]) != r:
                raise ValueError("skew form matrix must be square")
            for j in range(r):
                if self.rows[i][j] != -self.rows[j][i]:
                    raise ValueError("skew form must be antisymmetric")

    @property
    def rank(self) -> int:
        return len(self.rows)

    def omega(self, a: Vec, b: Vec):
        return sum(a[i] * sum(self.rows[i][j] * b[j] for j in range(self.rank))
                   for i in range(self.rank))

    def p_map(self, m: Vec) -> Vec:
        """The vector p(m) in N with pairing(m', p(m)) == omega(m', m) for all m'."""
        return tuple(
            sum(self.rows[i][j] * m[j] for j in range(self.rank))
            for i in range(self.rank)
        )

    def is_nondegenerate(self) -> bool:
        return _det_int(self.rows) != 0


def _det_int(rows: Sequence[Sequence[int]]) -> Fraction:
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for i in range(col + 1, n):
            if a[i][col] != 0:
                f = a[i][col] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return det
