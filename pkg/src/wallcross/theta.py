"""Broken lines, theta functions, wall-crossing verification, transport.

A broken line with end (m, Q) is enumerated backward from Q: the final
segment's monomial is guessed among the finitely many exponents below the
truncation order, and at each wall crossed (walking backward) the
predecessor monomials are exactly those whose image under the local wall
automorphism contains the current monomial as a homogeneous summand.  Each
bend strictly lowers the grading degree backward, so the search is finite
and complete at the working order.

Segment slopes: classical/tropical lines travel with tangent -m; quantum
(quiver) lines travel with tangent -p(m) - n where (m, n) grades the
carried monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .algebra import AlgebraSeries
from .coeffs import Coefficient
from .diagram import (
    Diagram,
    DiagramError,
    Path,
    PathOnJointError,
    Wall,
    crossing_sign,
    path_word,
)
from .group import apply, apply_word
from .lattice import (
    Support2,
    Vec,
    cross2,
    intersect_supports,
    is_zero_vec,
    pairing,
    primitive,
    vadd,
    vneg,
    vsub,
)
from .lie import ClassicalBackend, QuantumBackend


class DegenerateEndError(DiagramError):
    """The end point leads through a joint or support; move the point."""


class NoBaseChamberError(DiagramError):
    """No chamber with a pure-monomial theta value could be certified."""


@dataclass(frozen=True)
class Bend:
    point: tuple
    walls: tuple  # (wall, sign) pairs acting at the bend
    key_before: object
    key_after: object
    factor: Coefficient


@dataclass(frozen=True)
class BrokenLine:
    end_m: object
    end_q: tuple
    final_key: object
    coefficient: Coefficient
    bends: tuple

    def monomial(self, D: Diagram, order: int) -> AlgebraSeries:
        base = _base_key(D.backend, self.end_m)
        return AlgebraSeries(D.backend, order, base,
                             {self.final_key: self.coefficient})

    def vertices(self, reach: Fraction = Fraction(3)) -> list:
        """Polyline vertices for rendering, from the unbounded end to Q."""
        pts = [b.point for b in self.bends] + [self.end_q]
        start_key = self.bends[0].key_before if self.bends else self.final_key
        return [None, start_key, pts]


def _base_key(backend, end_m):
    if isinstance(backend, QuantumBackend):
        zero = tuple([0] * backend.rank)
        return (zero, tuple(end_m))
    return tuple(end_m)


def _key_slope(backend, key):
    """The forward tangent of the segment carrying the monomial ``key``."""
    if isinstance(backend, QuantumBackend):
        m, n = key
        return vneg(vadd(backend.skew.p_map(m), n))
    return vneg(key)


def _key_shift(backend, key, shift_m):
    if isinstance(backend, QuantumBackend):
        m, n = key
        return (vadd(m, shift_m), n)
    return vadd(key, shift_m)


def _key_m(backend, key):
    return key[0] if isinstance(backend, QuantumBackend) else key


def cone_offsets(backend, max_degree: int) -> list:
    """All lattice points of the grading cone with degree < max_degree."""
    sigma = backend.sigma
    grading = backend.grading
    r = backend.rank
    bounds = [0] * r
    for g in sigma.generators:
        dg = grading.degree(g)
        for i in range(r):
            bounds[i] = max(bounds[i], abs(g[i]) * ((max_degree + dg - 1) // dg))
    out = [tuple([0] * r)]

    def rec(i, cur):
        if i == r:
            m = tuple(cur)
            if not is_zero_vec(m) and sigma.contains(m) and 0 < grading.degree(m) < max_degree:
                out.append(m)
            return
        for x in range(-bounds[i], bounds[i] + 1):
            rec(i + 1, cur + [x])

    rec(0, [])
    return sorted(set(out))


def _ray_crossings(D: Diagram, start: tuple, direction: Vec, joints: set) -> list:
    """Wall crossings along start + s*direction for s > 0, grouped by point.

    Returns [(s, point, [walls...], hits_joint)] sorted by s.  Joint hits
    are flagged rather than raised so that search branches bending before
    the joint remain valid; a branch that reaches a flagged event is
    degenerate and the end point must be moved.
    """
    hits: dict = {}
    ray = Support2.ray(start, primitive(_as_int_vec(direction)))
    for w in D.nontrivial_walls():
        r = intersect_supports(ray, w.support)
        if r[0] == "empty":
            continue
        if r[0] == "overlap":
            for j in joints:
                if w.support.contains(j) and ray.contains(j):
                    s = ray.param_of(j)
                    if s > 0:
                        hits.setdefault(s, (j, []))
            continue
        p = r[1]
        s = ray.param_of(p)
        if s <= 0:
            continue
        hits.setdefault(s, (p, []))[1].append(w)
    out = []
    for s in sorted(hits):
        p, ws = hits[s]
        out.append((s, p, ws, p in joints))
    return out


def _as_int_vec(v) -> tuple:
    fr = [Fraction(x) for x in v]
    from math import lcm
    den = lcm(*[f.denominator for f in fr]) if fr else 1
    return tuple(int(f * den) for f in fr)


def _bend_word(D: Diagram, walls: Sequence[Wall], tangent) -> list:
    word = []
    for w in walls:
        e = crossing_sign(D.mode, w, tangent)
        if e != 0:
            word.append((w.theta, e))
    return word


def enumerate_broken_lines(D: Diagram, end_m, Q, order: Optional[int] = None) -> list:
    """All broken lines with the given end whose monomials survive the order."""
    order = order or D.order
    backend = D.backend
    Dk = D.project(order)
    Q = tuple(Fraction(x) for x in Q)
    if Dk.on_support(Q):
        raise DegenerateEndError(f"end point {Q} lies on the support")
    base = _base_key(backend, end_m)
    if not isinstance(backend, QuantumBackend) and is_zero_vec(base):
        raise ValueError("broken lines need a nonzero end datum")
    joints = set(Dk.joints())
    results: list = []
    offsets = cone_offsets(backend, order)

    def search(point, key, factors, bends):
        if key == base:
            coeff = Coefficient.one()
            for f in reversed(factors):
                coeff = f * coeff
            results.append(BrokenLine(tuple(end_m), Q, final_key,
                                      coeff, tuple(reversed(bends))))
            return
        slope = _key_slope(backend, key)
        if is_zero_vec(slope):
            return
        crossings = _ray_crossings(Dk, point, vneg(slope), joints)

        def rec(idx):
            if idx == len(crossings):
                return  # ran to infinity with a non-initial monomial
            _s, pt, walls = crossings[idx]
            m_prim = primitive(walls[0].m)
            cur_m = _key_m(backend, key)
            base_m = _key_m(backend, base)
            max_c = backend.grading.degree(vsub(cur_m, base_m)) \
                // backend.grading.degree(m_prim)
            for c in range(1, max_c + 1):
                prev_key = _key_shift(backend, key, vneg(tuple(c * x for x in m_prim)))
                prev_m = _key_m(backend, prev_key)
                off = vsub(prev_m, base_m)
                if not backend.sigma.contains(off):
                    continue
                if not isinstance(backend, QuantumBackend) and is_zero_vec(prev_key):
                    continue
                tangent = _key_slope(backend, prev_key)
                if is_zero_vec(tangent):
                    continue
                word = _bend_word(Dk, walls, tangent)
                if not word:
                    continue
                probe = AlgebraSeries(backend, order, base,
                                      {prev_key: Coefficient.one()})
                image = apply_word(word, probe)
                factor = image.coefficient_of(key)
                if factor.is_zero():
                    continue
                bend = Bend(pt, tuple((w, crossing_sign(Dk.mode, w, tangent))
                                      for w in walls),
                            prev_key, key, factor)
                search(pt, prev_key, factors + [factor], bends + [bend])
            rec(idx + 1)

        rec(0)

    for mu in offsets:
        final_key = _key_shift(backend, base, mu)
        search(Q, final_key, [], [])
    return results


def theta(D: Diagram, end_m, Q, order: Optional[int] = None) -> AlgebraSeries:
    """The broken-line theta function: the sum of final monomials."""
    order = order or D.order
    backend = D.backend
    if not isinstance(backend, QuantumBackend) and is_zero_vec(tuple(end_m)):
        return AlgebraSeries.unit(backend, order)
    base = _base_key(backend, end_m)
    total = AlgebraSeries.zero(backend, order, base)
    for line in enumerate_broken_lines(D, end_m, Q, order):
        total = total + line.monomial(D, order)
    return total


def check_wall_crossing(D: Diagram, end_m, rho: Path, order: Optional[int] = None):
    """Compare theta at the endpoints of a path with the transported value.

    Returns (equal, discrepancy).
    """
    order = order or D.order
    Dk = D.project(order)
    start = theta(Dk, end_m, rho.vertices[0], order)
    end = theta(Dk, end_m, rho.vertices[-1], order)
    word = path_word(Dk, rho)
    transported = apply_word(word, start)
    return transported == end, end - transported


# ---------------------------------------------------------------------------
# Theta by transport from a base chamber.
# ---------------------------------------------------------------------------

_JIGGLES = (
    Fraction(0), Fraction(1, 97), Fraction(-1, 89), Fraction(2, 83),
    Fraction(-3, 79), Fraction(5, 73), Fraction(-7, 71),
)


def _generic_path(D: Diagram, q0, Q) -> Optional[list]:
    for j1 in _JIGGLES:
        cand = (q0[0] + j1, q0[1] + j1 * 2)
        if D.on_support(cand):
            continue
        for j2 in _JIGGLES:
            mid = ((cand[0] + Q[0]) / 2 + j2, (cand[1] + Q[1]) / 2 + j2 * 3)
            path = Path((cand, mid, Q)) if j2 else Path((cand, Q))
            try:
                return path_word(D, path)
            except PathOnJointError:
                continue
    return None


def _pure_base_point(D: Diagram, end_m, order: int) -> Optional[tuple]:
    """A point from which every candidate backward ray misses all supports."""
    backend = D.backend
    u = [0] * backend.rank
    for g in backend.sigma.generators:
        u = [a + b for a, b in zip(u, g)]
    slopes = []
    for mu in cone_offsets(backend, order):
        key = _key_shift(backend, _base_key(backend, end_m), mu)
        if not isinstance(backend, QuantumBackend) and is_zero_vec(key):
            continue
        slope = _key_slope(backend, key)
        if is_zero_vec(slope):
            continue
        slopes.append(primitive(_as_int_vec(slope)))
    walls = D.nontrivial_walls()
    for T in (4, 16, 64, 256):
        for j in _JIGGLES:
            q0 = (Fraction(T) * u[0] + j, Fraction(T) * u[1] + j * 5 + Fraction(1, 101))
            if D.on_support(q0):
                continue
            ok = True
            for slope in slopes:
                ray = Support2.ray(q0, vneg(slope))
                if any(intersect_supports(ray, w.support)[0] != "empty"
                       for w in walls):
                    ok = False
                    break
            if ok:
                return q0
    return None


def theta_by_transport(D: Diagram, end_m, Q, order: Optional[int] = None) -> AlgebraSeries:
    """Transport the pure monomial from a base chamber to Q.

    Quantum mode: the base chamber is the interior of the dual cone, where
    theta is the pure monomial (no wall enters it and all candidate lines
    leave it).  Tropical mode: a deep chamber is searched for and certified
    exactly; if none is found the caller gets NoBaseChamberError.
    """
    order = order or D.order
    backend = D.backend
    Dk = D.project(order)
    Q = tuple(Fraction(x) for x in Q)
    base = _base_key(backend, end_m)
    probe = AlgebraSeries(backend, order, base, {base: Coefficient.one()})
    if isinstance(backend, QuantumBackend):
        if Dk.backend.rank != 2:
            raise DiagramError("transport is rank-2 only")
        q0 = None
        for T in (3, 9, 27, 81):
            cand = (Fraction(T), Fraction(T) * 2 + Fraction(1, 103))
            if not Dk.on_support(cand):
                q0 = cand
                break
        if q0 is None:
            raise NoBaseChamberError("no generic point in the dual cone interior")
    else:
        q0 = _pure_base_point(Dk, end_m, order)
        if q0 is None:
            raise NoBaseChamberError(
                "no chamber with a certified pure theta value was found")
    word = _generic_path(Dk, q0, Q)
    if word is None:
        raise DegenerateEndError("no generic transport path reaches the end point")
    return apply_word(word, probe)
