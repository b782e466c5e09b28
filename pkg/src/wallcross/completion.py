"""Order-by-order consistent completion of rank-2 initial diagrams, and
perturbation of initial diagrams over nilpotent deformation rings.

The completion runs the inductive factorization: at each grading degree d,
the loop product around every joint is identity modulo degree d by
induction, so its logarithm at truncation d+1 is a sum of homogeneous
degree-d blocks; each block is cancelled by appending an outgoing wall
(ray from the joint in the block's flow direction) carrying the opposite
signed log.  The result is re-verified against the independent
action-based consistency check after every degree.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .coeffs import Coefficient, NilMonomial
from .diagram import (
    Diagram,
    DiagramError,
    Path,
    Wall,
    crossing_sign,
    joint_rect_loop,
    path_ordered_product,
    path_word,
)
from .group import GroupElement, apply_word, default_probes
from .lattice import (
    Support2,
    dual_partner,
    lex_positive,
    pairing,
    perp2,
    primitive,
    vneg,
)
from .lie import LieElement


class NonCentralDiscrepancyError(DiagramError):
    """A degree-d loop discrepancy failed the tropical block constraint."""


class CompletionError(DiagramError):
    pass


def _flow_direction(D: Diagram, m_prim):
    if D.mode == "tropical":
        return vneg(m_prim)
    if D.flow is None:
        raise CompletionError("cone-mode completion needs a flow direction rule")
    return primitive(D.flow(m_prim))


def _new_ray_sign(D: Diagram, direction, m_prim, n_wall) -> int:
    """The sign with which a ccw loop around the joint crosses a new ray.

    A ccw loop around the ray's base crosses it once, with tangent T in the
    open half-plane cross2(direction, T) > 0; the crossing sign is constant
    there, so T may be taken to be the ccw-rotated direction.
    """
    tangent = (-direction[1], direction[0])
    probe_support = Support2.ray((0, 0), direction)
    probe_wall = Wall(m_prim, n_wall, probe_support,
                      GroupElement.identity(D.backend, D.order))
    sign = crossing_sign(D.mode, probe_wall, tangent)
    if sign == 0:
        raise CompletionError("flow direction tangent to the new wall datum")
    return sign


def _blocks_for_wall(D: Diagram, h: LieElement, d: int):
    """Split the degree-d part of a discrepancy log into per-wall blocks.

    Yields (m_prim, n_wall, terms) where terms is a key->Coefficient dict.
    In tropical mode the n-line of each block must be single-valued, else
    the discrepancy is not central in the required sense.
    """
    by_dir: dict = {}
    for key, c in h.terms.items():
        if h.backend.degree(key[0]) != d:
            continue
        by_dir.setdefault(primitive(key[0]), {})[key] = c
    for m_prim, terms in sorted(by_dir.items()):
        if D.mode == "tropical":
            nlines = {key[1] for key in terms}
            if len(nlines) != 1:
                raise NonCentralDiscrepancyError(
                    f"mixed n-lines {sorted(nlines)} in the degree-{d} block at {m_prim}")
            n_wall = next(iter(nlines))
        else:
            n_wall = None
        yield m_prim, n_wall, terms


def complete(D_in: Diagram, k: int) -> Diagram:
    """The consistent completion of an initial rank-2 diagram at order k."""
    if not D_in.rank2:
        raise CompletionError("completion is implemented in rank 2 only")
    for w in D_in.walls:
        if w.support.kind != "line":
            raise CompletionError("initial walls must be supported on full lines")
    walls = list(D_in.walls)
    backend = D_in.backend
    # added walls are indexed by (support key, m, n) for collinear merging
    added: dict = {}

    def current() -> Diagram:
        extra = [Wall(m, n, sup, GroupElement(log))
                 for (sup_key, m, n), (sup, log) in sorted(added.items())]
        return Diagram(backend, D_in.mode, k, walls + extra, D_in.flow,
                       validate=False)

    for d in range(1, k):
        Dd = current().project(d + 1)
        new_blocks = []
        for p in Dd.joints():
            loop = joint_rect_loop(Dd, p)
            g = path_ordered_product(Dd, loop)
            h = g.log
            if h.is_zero():
                continue
            mind = h.min_degree()
            if mind < d:
                raise CompletionError(
                    f"joint {p} inconsistent below the current degree ({mind} < {d})")
            if mind > d:
                continue
            for m_prim, n_wall, terms in _blocks_for_wall(Dd, h, d):
                direction = _flow_direction(Dd, m_prim)
                eps = _new_ray_sign(Dd, direction, m_prim, n_wall)
                log = LieElement(backend, k, terms).scale(-eps)
                new_blocks.append((p, m_prim, n_wall, direction, log))
        if not new_blocks:
            continue
        for p, m_prim, n_wall, direction, log in new_blocks:
            sup = Support2.ray(p, direction)
            key = ((sup.kind, sup.base, sup.direction), m_prim, n_wall)
            if key in added:
                added[key] = (sup, added[key][1] + log)
            else:
                added[key] = (sup, log)
        # re-verify this degree with the independent action-based check
        Dv = current().project(d + 1)
        for p in Dv.joints():
            loop = joint_rect_loop(Dv, p)
            word = path_word(Dv, loop)
            for probe in default_probes(backend, d + 1):
                if apply_word(word, probe) != probe:
                    raise CompletionError(
                        f"factorization at degree {d} failed to cancel at {p}")
    return current()


# ---------------------------------------------------------------------------
# Perturbation over the square-free deformation ring.
# ---------------------------------------------------------------------------


def _strip_initial_log(w: Wall, index: int, max_j: int) -> dict:
    """Decompose a full-line wall log as {j: t-stripped degree-j element}."""
    out: dict = {}
    for key, c in w.theta.log.terms.items():
        m = key[0]
        p = primitive(m)
        if p != w.m:
            raise CompletionError("initial wall log not supported on its m-line")
        j = m[0] // p[0] if p[0] else m[1] // p[1]
        stripped = c.strip_t_power(index, j)
        block = out.setdefault(j, {})
        block[key] = (block[key] + stripped) if key in block else stripped
    return out


def perturb(D_in: Diagram, l: int, seed: int = 0,
            offsets: Optional[Sequence] = None) -> Diagram:
    """Spread each initial wall over 2^l - 1 parallel translated lines.

    The wall with index i and subset J of {1..l} carries the log
    (#J)! * g_(#J),i * prod_{s in J} u_{i,s}, where g_(j),i is the degree-j
    part of the initial log with its t_i^j coefficient removed.  Offsets
    are deterministic from the seed: rationals with denominators 1009 * q.
    """
    from itertools import combinations

    if D_in.mode != "tropical":
        raise CompletionError("perturbation applies to tropical diagrams")
    origin = (Fraction(0), Fraction(0))
    for w in D_in.walls:
        if w.support.kind != "line" or not w.support.contains(origin):
            raise CompletionError("perturbation expects full lines through the origin")
    rng = random.Random(seed)
    new_walls = []
    flat = 0
    for i, w in enumerate(D_in.walls, start=1):
        blocks = _strip_initial_log(w, i, D_in.order)
        direction = w.support.direction
        shift = dual_partner(lex_positive(primitive(w.n)))
        for J in _subsets(l):
            flat += 1
            j = len(J)
            if offsets is not None:
                off = Fraction(offsets[flat - 1])
            else:
                off = Fraction(rng.randrange(1, 1009) * rng.choice((1, -1)),
                               1009 * flat)
            base = (off * shift[0], off * shift[1])
            terms = blocks.get(j)
            log = LieElement(D_in.backend, D_in.order, terms or {})
            u = NilMonomial(u=tuple((i, s) for s in J))
            log = log.scale(Coefficient.monomial(u).scale(factorial(j)))
            new_walls.append(Wall(w.m, w.n, Support2.line(base, direction),
                                  GroupElement(log)))
    supports = [w.support for w in new_walls]
    if len({(s.base, s.direction) for s in supports}) != len(supports):
        return perturb(D_in, l, seed + 1, offsets)
    return Diagram(D_in.backend, "tropical", D_in.order, new_walls, D_in.flow)


def _subsets(l: int):
    from itertools import combinations
    for size in range(1, l + 1):
        for J in combinations(range(1, l + 1), size):
            yield J


def check_generic(D_pert: Diagram, k: int):
    """Pairwise transversality of all candidate tree supports up to order k.

    Returns (True, None) or (False, (tree1, tree2)).  A transversal pair of
    supports must meet in a single point interior to both (a ray base point
    is boundary).
    """
    from .trees import enumerate_weighted_trees, tree_support
    from .lattice import intersect_supports

    trees = enumerate_weighted_trees(D_pert, k)
    sups = []
    for t in trees:
        s = tree_support(t, D_pert)
        if s is not None:
            sups.append((t, s))
    for a in range(len(sups)):
        for b in range(a + 1, len(sups)):
            t1, s1 = sups[a]
            t2, s2 = sups[b]
            from .lattice import cross2
            if cross2(s1.direction, s2.direction) == 0:
                continue
            r = intersect_supports(s1, s2)
            if r[0] != "point":
                continue
            p = r[1]
            if p in s1.boundary_points() or p in s2.boundary_points():
                return False, (t1, t2)
    return True, None
