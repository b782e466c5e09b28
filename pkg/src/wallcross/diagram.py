"""Walls, scattering diagrams, path-ordered products, consistency, equivalence.

Two modes:

* ``tropical`` -- walls (m, n, P, theta) with supports (full lines or rays)
  in the plane of the grading lattice; overlapping walls share an n-line
  and commute.
* ``cone`` -- walls (m, P, theta) with supports in the dual plane (or, in
  rank >= 3, codimension-one cones); distinct walls meet in codimension
  two, so simultaneous crossings never happen.

Crossing sign conventions (fixed once; all results are covariant under a
global flip):

* tropical: a path with tangent gamma' crossing a wall with datum n picks
  up theta^epsilon with epsilon = -sgn<gamma', n>;
* cone: epsilon = +sgn<m_w, gamma'> for the wall's grading direction m_w.

Path-ordered products compose later crossings on the left, so transporting
a value along the path applies the factors in crossing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .group import (
    GroupElement,
    apply_word,
    default_probes,
    fold_word,
)
from .lattice import (
    Point,
    Support2,
    SupportCone,
    Vec,
    cross2,
    is_zero_vec,
    lex_positive,
    pairing,
    primitive,
    segment_hyperplane_crossing,
    vneg,
)
from .lie import Backend, ClassicalBackend, LieElement, QuantumBackend


class DiagramError(ValueError):
    pass


class PathOnJointError(DiagramError):
    """The probe path hits a joint or is tangent to a wall; perturb it."""


@dataclass(frozen=True)
class Wall:
    """A wall: grading direction m, optional tropical datum n, support, theta."""

    m: Vec
    n: Optional[Vec]
    support: object  # Support2 | SupportCone
    theta: GroupElement

    def __post_init__(self):
        if primitive(self.m) != self.m:
            raise DiagramError(f"wall m-datum {self.m} is not primitive")

    def validate(self, mode: str, backend: Backend) -> None:
        backend.check_m(self.m)
        if mode == "tropical":
            if self.n is None or is_zero_vec(self.n):
                raise DiagramError("tropical wall needs a nonzero n")
            if pairing(self.m, self.n) != 0:
                raise DiagramError(f"<m,n> != 0 on wall {self.m}, {self.n}")
            if isinstance(self.support, Support2):
                if pairing(self.support.direction, self.n) != 0:
                    raise DiagramError("support not orthogonal to n")
        else:
            if isinstance(self.support, Support2):
                if pairing(self.support.direction, self.m) != 0:
                    raise DiagramError("cone support not tangent to m^perp")
        for (m_term, _n) in self.theta.log.terms:
            if primitive(m_term) != self.m:
                raise DiagramError(
                    f"log term at {m_term} is not a multiple of the wall datum {self.m}")
            if mode == "tropical" and _n is not None:
                if cross2(_n, self.n) != 0 if len(self.n) == 2 else False:
                    raise DiagramError("log term n-line differs from the wall n")

    def project(self, order: int) -> "Wall":
        return Wall(self.m, self.n, self.support, self.theta.project(order))

    def is_trivial(self) -> bool:
        return self.theta.is_identity()

    def support_key(self):
        s = self.support
        if isinstance(s, Support2):
            return (s.kind, s.base, s.direction)
        return (s.apex, s.normal, s.generators)


class Diagram:
    """A finite-per-order scattering diagram."""

    def __init__(self, backend: Backend, mode: str, order: int,
                 walls: Sequence[Wall], flow: Optional[Callable] = None,
                 validate: bool = True):
        if mode not in ("tropical", "cone"):
            raise DiagramError(f"unknown mode {mode!r}")
        self.backend = backend
        self.mode = mode
        self.order = order
        self.walls = tuple(walls)
        self.flow = flow
        if validate:
            for w in self.walls:
                w.validate(mode, backend)
            if mode == "cone":
                self._check_cone_intersections()

    def _check_cone_intersections(self) -> None:
        rank2 = all(isinstance(w.support, Support2) for w in self.walls)
        if not rank2:
            return
        for i in range(len(self.walls)):
            for j in range(i + 1, len(self.walls)):
                a, b = self.walls[i].support, self.walls[j].support
                from .lattice import intersect_supports
                r = intersect_supports(a, b)
                if r[0] == "overlap":
                    lo, hi = r[1]
                    if lo is None or hi is None or lo != hi:
                        if not (self.walls[i].is_trivial() or self.walls[j].is_trivial()):
                            raise DiagramError(
                                "distinct cone walls overlap in codimension one")

    def project(self, order: int) -> "Diagram":
        if order > self.order:
            raise DiagramError("cannot extend truncation")
        walls = [w.project(order) for w in self.walls]
        walls = [w for w in walls if not w.is_trivial()]
        return Diagram(self.backend, self.mode, order, walls, self.flow,
                       validate=False)

    def nontrivial_walls(self) -> list:
        return [w for w in self.walls if not w.is_trivial()]

    # -- geometry ------------------------------------------------------------

    @property
    def rank2(self) -> bool:
        return all(isinstance(w.support, Support2) for w in self.walls)

    def joints(self) -> list:
        """Ray endpoints and pairwise codimension-two intersections."""
        from .lattice import intersect_supports
        pts = set()
        walls = self.nontrivial_walls()
        for w in walls:
            if isinstance(w.support, Support2):
                for b in w.support.boundary_points():
                    pts.add(b)
            else:
                pts.add(w.support.apex)
        for i in range(len(walls)):
            for j in range(i + 1, len(walls)):
                a, b = walls[i].support, walls[j].support
                if not (isinstance(a, Support2) and isinstance(b, Support2)):
                    continue
                r = intersect_supports(a, b)
                if r[0] == "point":
                    pts.add(r[1])
        return sorted(pts)

    def walls_through(self, p: Point) -> list:
        return [w for w in self.nontrivial_walls() if w.support.contains(p)]

    def on_support(self, p: Point) -> bool:
        return any(w.support.contains(p) for w in self.nontrivial_walls())


@dataclass(frozen=True)
class Path:
    """A piecewise-linear path with rational vertices."""

    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise DiagramError("a path needs at least two vertices")

    @staticmethod
    def through(points: Iterable[Sequence]) -> "Path":
        vs = tuple(tuple(Fraction(x) for x in p) for p in points)
        return Path(vs)

    def segments(self):
        for i in range(len(self.vertices) - 1):
            yield self.vertices[i], self.vertices[i + 1]

    def is_loop(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def reversed(self) -> "Path":
        return Path(tuple(reversed(self.vertices)))


def crossing_sign(mode: str, wall: Wall, tangent: Sequence) -> int:
    if mode == "tropical":
        t = pairing(tangent, wall.n)
        return 0 if t == 0 else (-1 if t > 0 else 1)
    t = pairing(wall.m, tangent)
    return 0 if t == 0 else (1 if t > 0 else -1)


def path_crossing_events(D: Diagram, path: Path) -> list:
    """All transversal wall crossings along the path, grouped by point.

    Each event is (seg_index, t, point, [(wall, sign), ...]).  Raises
    PathOnJointError when the path is tangent to a support, passes through
    a joint, or has an endpoint on the support.
    """
    walls = D.nontrivial_walls()
    for endpoint in (path.vertices[0], path.vertices[-1]):
        if D.on_support(endpoint) and not path.is_loop():
            raise PathOnJointError(f"path endpoint {endpoint} lies on the support")
    events: dict = {}
    for si, (p0, p1) in enumerate(path.segments()):
        tangent = tuple(Fraction(b) - Fraction(a) for a, b in zip(p0, p1))
        for w in walls:
            try:
                hit = segment_hyperplane_crossing(p0, p1, w.support)
            except ValueError as e:
                raise PathOnJointError(str(e)) from None
            if hit is None:
                continue
            t, pt = hit
            sign = crossing_sign(D.mode, w, tangent)
            if sign == 0:
                raise PathOnJointError(f"path tangent to wall at {pt}")
            events.setdefault((si, t), (pt, []))[1].append((w, sign))
    joints = set(D.joints())
    out = []
    for (si, t) in sorted(events):
        pt, hits = events[(si, t)]
        if pt in joints:
            raise PathOnJointError(f"path crosses the joint {pt}")
        if len(hits) > 1:
            _check_simultaneous(D, hits, pt)
        out.append((si, t, pt, hits))
    return out


def _check_simultaneous(D: Diagram, hits: list, pt) -> None:
    if D.mode == "cone":
        raise PathOnJointError(
            f"simultaneous crossing of distinct cone walls at {pt}")
    lines = {lex_positive(w.support.direction) for w, _ in hits}
    if len(lines) > 1:
        raise PathOnJointError(f"path crosses non-overlapping walls at {pt}")
    nlines = {lex_positive(primitive(w.n)) for w, _ in hits}
    if len(nlines) > 1:
        raise DiagramError(f"overlapping walls with different n-lines at {pt}")


def path_word(D: Diagram, path: Path) -> list:
    """Crossing factors (theta, sign) in crossing order."""
    word = []
    for (_si, _t, _pt, hits) in path_crossing_events(D, path):
        for w, sign in hits:
            word.append((w.theta, sign))
    return word


def path_ordered_product(D: Diagram, path: Path, order: Optional[int] = None) -> GroupElement:
    """The ordered product of crossing factors, later crossings leftmost."""
    order = order or D.order
    word = [(g.project(order), e) for g, e in path_word(D, path)]
    return fold_word(word, D.backend, order)


# ---------------------------------------------------------------------------
# Canonical joint loops and consistency.
# ---------------------------------------------------------------------------

_ASPECTS = (
    (Fraction(1), Fraction(1)),
    (Fraction(1), Fraction(3, 5)),
    (Fraction(3, 5), Fraction(1)),
    (Fraction(1), Fraction(2, 7)),
    (Fraction(2, 7), Fraction(1)),
    (Fraction(5, 11), Fraction(1)),
)


def joint_rect_loop(D: Diagram, p: Point, start_scale: Fraction = Fraction(1)) -> Path:
    """A small ccw rational rectangle around the joint p meeting only the
    walls incident to p, transversally."""
    if not D.rank2:
        raise DiagramError("canonical joint loops exist in rank 2 only")
    incident = {id(w) for w in D.walls_through(p)}
    h = Fraction(start_scale)
    for attempt in range(8 * len(_ASPECTS)):
        ax, ay = _ASPECTS[attempt % len(_ASPECTS)]
        hx, hy = h * ax, h * ay
        loop = Path((
            (p[0] + hx, p[1] - hy),
            (p[0] + hx, p[1] + hy),
            (p[0] - hx, p[1] + hy),
            (p[0] - hx, p[1] - hy),
            (p[0] + hx, p[1] - hy),
        ))
        try:
            events = path_crossing_events(D, loop)
        except PathOnJointError:
            if attempt % len(_ASPECTS) == len(_ASPECTS) - 1:
                h /= 2
            continue
        touched = {id(w) for (_s, _t, _pt, hits) in events for w, _e in hits}
        if touched <= incident:
            return loop
        h /= 2
    raise DiagramError(f"no valid rectangle loop found around {p}")


def is_consistent(D: Diagram, order: Optional[int] = None,
                  loops: Optional[Sequence[Path]] = None,
                  probes=None):
    """Identity of loop products around every joint, checked via the action.

    Returns (True, None) or (False, (loop_anchor, discrepancy_log)).  In
    rank 2 the loops default to canonical rectangles around all joints; in
    higher rank the caller must supply probe loops.
    """
    order = order or D.order
    Dk = D.project(order)
    if loops is None:
        if not Dk.rank2:
            raise DiagramError("rank >= 3 consistency needs caller-supplied loops")
        loops = [joint_rect_loop(Dk, p) for p in Dk.joints()]
    if probes is None:
        probes = default_probes(D.backend, order)
    for loop in loops:
        word = [(g.project(order), e) for g, e in path_word(Dk, loop)]
        ok = all(apply_word(word, pr) == pr for pr in probes)
        if not ok:
            disc = fold_word(word, D.backend, order).log
            return False, (loop.vertices[0], disc)
    return True, None


# ---------------------------------------------------------------------------
# Equivalence of rank-2 diagrams via the common support arrangement.
# ---------------------------------------------------------------------------


def _line_key(s: Support2):
    line = Support2.line(s.base, s.direction)
    return (line.base, line.direction)


def _cells_of_line(line: Support2, cut_params: list) -> list:
    """Representative interior points of the 1-cells of a subdivided line."""
    ts = sorted(set(cut_params))
    if not ts:
        return [line.point_at(0)]
    pts = [line.point_at(ts[0] - 1)]
    for a, b in zip(ts, ts[1:]):
        pts.append(line.point_at(Fraction(a + b, 2)))
    pts.append(line.point_at(ts[-1] + 1))
    return pts


def _local_log(D: Diagram, x: Point, nu: Vec, order: int) -> LieElement:
    """Sum of signed logs of the walls through x, for a crossing along nu."""
    total = LieElement.zero(D.backend, order)
    nlines = set()
    for w in D.walls_through(x):
        e = crossing_sign(D.mode, w, nu)
        if e == 0:
            raise DiagramError("co-normal tangent to a wall in equivalence check")
        if D.mode == "tropical":
            nlines.add(lex_positive(primitive(w.n)))
        total = total + w.theta.log.project(order).scale(e)
    if len(nlines) > 1:
        raise DiagramError(f"non-commuting walls share the cell at {x}")
    return total


def equivalent(D1: Diagram, D2: Diagram, order: Optional[int] = None) -> bool:
    """Exact equivalence: equal crossing logs on every 1-cell of the
    common arrangement of both supports."""
    if D1.backend != D2.backend or D1.mode != D2.mode:
        raise DiagramError("equivalence needs a common ambient setup")
    order = order or min(D1.order, D2.order)
    A, B = D1.project(order), D2.project(order)
    if not (A.rank2 and B.rank2):
        raise DiagramError("equivalence comparison is rank-2 only")
    walls = A.nontrivial_walls() + B.nontrivial_walls()
    if not walls:
        return True
    lines: dict = {}
    for w in walls:
        lines.setdefault(_line_key(w.support), []).append(w)
    joints = set(A.joints()) | set(B.joints())
    from .lattice import intersect_supports
    for i in range(len(walls)):
        for j in range(i + 1, len(walls)):
            r = intersect_supports(walls[i].support, walls[j].support)
            if r[0] == "point":
                joints.add(r[1])
    for (base, direction), ws in lines.items():
        line = Support2("line", base, direction)
        cuts = []
        for p in joints:
            if line.contains(p):
                cuts.append(line.param_of(p))
        for w in ws:
            if w.support.kind == "ray":
                cuts.append(line.param_of(w.support.base))
        nu = lex_positive((-direction[1], direction[0]))
        for x in _cells_of_line(line, cuts):
            if _local_log(A, x, nu, order) != _local_log(B, x, nu, order):
                return False
    return True
