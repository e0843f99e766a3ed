"""Orientation double covers of projective-plane embeddings.

An unbalanced embedding lifts to a balanced one on the sphere: every vertex
and every edge split in two, and walking across a negative edge switches the
layer.  The deck transformation swaps the layers.  Vertex v lifts to 2v and
2v+1, edge e to 2e and 2e+1, and the layer 1 rotations run backwards, which
is what makes the lifted system balanced.

Faces behave the simplest way possible: a face boundary bounds a disk, so its
sign product is positive and every face lifts to exactly two faces of the
same length, swapped by the deck map.  That face bookkeeping is what
``lift_walk`` uses to lift walks of the face structure.

The reverse direction is ``quotient_by_involution``: dividing a sphere
embedding by a fixed-point-free involution that respects the embedding gives
back a projective-plane graph, checked here by rebuilding the cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .embed import (
    PROJECTIVE,
    SPHERE,
    DomainError,
    DualWalk,
    EmbeddedGraph,
    StructureError,
    edge_of,
)


def _lift_half(h: int, layer: int, twisted: bool) -> int:
    """Half-edge of the cover carrying half h at the given layer of its vertex."""
    e, b = h >> 1, h & 1
    if b == 0:
        m = layer
    else:
        m = layer ^ (1 if twisted else 0)
    return 4 * e + 2 * m + b


@dataclass(eq=False)
class DoubleCover:
    """The orientation double cover of a projective-plane embedding.

    ``cover`` is a sphere embedding with all edges positive.  Ids encode the
    correspondence: cover vertex 2v+layer over vertex v, cover edge 2e+copy
    over edge e.  The deck transformation toggles the low bit of both.
    """

    base: EmbeddedGraph
    cover: EmbeddedGraph
    _face_lift: Dict[Tuple[int, int], int] = field(repr=False)
    _face_layer: Dict[int, int] = field(repr=False)
    _face_base: Dict[int, int] = field(repr=False)
    _deck_face: Dict[int, int] = field(repr=False)
    _parity: Dict[int, int] = field(repr=False)

    @staticmethod
    def lift_vertex(v: int, layer: int) -> int:
        return 2 * v + layer

    @staticmethod
    def base_vertex(cv: int) -> int:
        return cv >> 1

    @staticmethod
    def vertex_layer(cv: int) -> int:
        return cv & 1

    @staticmethod
    def deck_vertex(cv: int) -> int:
        return cv ^ 1

    @staticmethod
    def lift_edge(e: int, copy: int) -> int:
        return 2 * e + copy

    @staticmethod
    def base_edge(ce: int) -> int:
        return ce >> 1

    @staticmethod
    def deck_edge(ce: int) -> int:
        return ce ^ 1

    def face_lift(self, f: int, layer: int) -> int:
        return self._face_lift[(f, layer)]

    def face_layer(self, cf: int) -> int:
        return self._face_layer[cf]

    def face_base(self, cf: int) -> int:
        return self._face_base[cf]

    def deck_face(self, cf: int) -> int:
        return self._deck_face[cf]

    def edge_parity(self, e: int) -> int:
        """1 when crossing edge e switches the face layer, else 0."""
        return self._parity[e]


def double_cover(g: EmbeddedGraph) -> DoubleCover:
    """Build the orientation double cover of a projective-plane embedding."""
    if g.surface != PROJECTIVE:
        raise DomainError("double cover needs an unbalanced projective embedding")
    if not g.is_connected():
        raise DomainError("double cover needs a connected base")

    twisted = {e: g.sign(e) < 0 for e in g.edge_ids()}
    edges: Dict[int, Tuple[int, int, int]] = {}
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        t = 1 if twisted[e] else 0
        for m in (0, 1):
            edges[2 * e + m] = (2 * u + m, 2 * v + (m ^ t), 1)
    rotations: Dict[int, Tuple[int, ...]] = {}
    for v in g.vertices():
        rot = g.rotation(v)
        rotations[2 * v] = tuple(_lift_half(h, 0, twisted[edge_of(h)]) for h in rot)
        rotations[2 * v + 1] = tuple(
            _lift_half(h, 1, twisted[edge_of(h)]) for h in reversed(rot)
        )
    cover = EmbeddedGraph(None, edges, rotations)
    if cover.surface != SPHERE:
        raise StructureError("double cover did not come out balanced")

    def proj_flag(cflag: int) -> int:
        ch, s = cflag >> 1, cflag & 1
        ce = ch >> 1
        h = 2 * (ce >> 1) + (ch & 1)
        layer = cover.vertex_of_half(ch) & 1
        return (h << 1) | (s ^ layer)

    def deck_flag(cflag: int) -> int:
        ch, s = cflag >> 1, cflag & 1
        return ((ch ^ 2) << 1) | (s ^ 1)

    face_base: Dict[int, int] = {}
    by_base: Dict[int, List[int]] = {}
    for cf in cover.faces():
        f = g.face_of_flag(proj_flag(cf.flags[0]))
        face_base[cf.id] = f
        by_base.setdefault(f, []).append(cf.id)

    face_lift: Dict[Tuple[int, int], int] = {}
    face_layer: Dict[int, int] = {}
    for f in g.faces():
        lifts = by_base.get(f.id, [])
        if len(lifts) != 2:
            raise StructureError("face of the base does not lift to two faces")
        h0, s0 = f.flags[0] >> 1, f.flags[0] & 1
        c0 = (_lift_half(h0, 0, twisted[edge_of(h0)]) << 1) | s0
        f0 = cover.face_of_flag(c0)
        f1 = lifts[0] if lifts[1] == f0 else lifts[1]
        if f0 == f1 or f0 not in lifts:
            raise StructureError("face lift bookkeeping is inconsistent")
        face_lift[(f.id, 0)] = f0
        face_lift[(f.id, 1)] = f1
        face_layer[f0] = 0
        face_layer[f1] = 1

    deck_face: Dict[int, int] = {}
    for cf in cover.faces():
        deck_face[cf.id] = cover.face_of_flag(deck_flag(cf.flags[0]))
    for cf, df in deck_face.items():
        if cf == df or deck_face[df] != cf or face_base[df] != face_base[cf]:
            raise StructureError("deck transformation does not swap face lifts")

    parity: Dict[int, int] = {}
    for e in g.edge_ids():
        fa, fb = cover.dual_sides(2 * e)
        parity[e] = face_layer[fa] ^ face_layer[fb]

    return DoubleCover(g, cover, face_lift, face_layer, face_base, deck_face, parity)


def lift_walk(dc: DoubleCover, walk: DualWalk, start_layer: int = 0) -> DualWalk:
    """Lift a dual walk of the base to the cover, starting on a chosen layer.

    The layer of the current face flips exactly on edges of odd parity.  When
    both copies of an edge join the same pair of cover faces, the lower copy
    is taken, so the output is deterministic.
    """
    if walk.host is not dc.base:
        raise DomainError("walk does not live on the base of this cover")
    if start_layer not in (0, 1):
        raise DomainError("layer must be 0 or 1")
    layer = start_layer
    seq: List[int] = [dc.face_lift(walk.seq[0], layer)]
    for i in range(1, len(walk.seq), 2):
        e = walk.seq[i]
        layer ^= dc.edge_parity(e)
        nxt = dc.face_lift(walk.seq[i + 1], layer)
        prev = seq[-1]
        chosen = None
        for ce in (2 * e, 2 * e + 1):
            if sorted(dc.cover.dual_sides(ce)) == sorted((prev, nxt)):
                chosen = ce
                break
        if chosen is None:
            raise StructureError("no edge copy joins the lifted faces")
        seq.append(chosen)
        seq.append(nxt)
    return DualWalk(dc.cover, tuple(seq))


# ----------------------------------------------------------------------
# quotients by a free involution


def quotient_by_involution(g: EmbeddedGraph, sigma: Dict[int, int]) -> EmbeddedGraph:
    """Divide a sphere embedding by a fixed-point-free involution.

    ``sigma`` pairs the vertices.  It must induce a unique pairing of the
    edges with no edge fixed, which rules out loops and parallel edges.  The
    result is a projective-plane embedding whose double cover is the input
    again; that roundtrip is verified before returning.
    """
    if g.surface != SPHERE:
        raise DomainError("quotients are taken of sphere embeddings")
    verts = set(g.vertices())
    if set(sigma) != verts:
        raise DomainError("involution must cover every vertex")
    for v, w in sigma.items():
        if w == v or sigma.get(w) != v:
            raise DomainError("not a fixed-point-free involution")
    if g.loops():
        raise DomainError("loops cannot map freely under an involution")

    # normalize to the all-positive presentation; flips do not change the
    # embedding, and the roundtrip check below compares canonical forms
    pot: Dict[int, int] = {}
    for root in sorted(verts):
        if root in pot:
            continue
        pot[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for h in g.rotation(x):
                e = edge_of(h)
                a, b = g.edge_ends(e)
                y = b if x == a else a
                p = pot[x] ^ (1 if g.sign(e) < 0 else 0)
                if y not in pot:
                    pot[y] = p
                    stack.append(y)
    base = g.flip([v for v in verts if pot[v]])

    by_pair: Dict[Tuple[int, int], List[int]] = {}
    for e in base.edge_ids():
        u, v = base.edge_ends(e)
        by_pair.setdefault((min(u, v), max(u, v)), []).append(e)
    if any(len(es) > 1 for es in by_pair.values()):
        raise DomainError("parallel edges make the induced edge pairing ambiguous")

    emap: Dict[int, int] = {}
    for e in base.edge_ids():
        u, v = base.edge_ends(e)
        key = (min(sigma[u], sigma[v]), max(sigma[u], sigma[v]))
        if key not in by_pair:
            raise DomainError("involution is not a graph automorphism")
        emap[e] = by_pair[key][0]
    for e, e2 in emap.items():
        if e2 == e:
            raise DomainError("an edge fixed by the involution has no free quotient")
        if emap[e2] != e:
            raise DomainError("involution is not a graph automorphism")

    reps = {v for v in verts if v < sigma[v]}

    def rep_vertex(v: int) -> int:
        return v if v in reps else sigma[v]

    def quot_half(h: int) -> int:
        e = edge_of(h)
        er = min(e, emap[e])
        if e == er:
            return 2 * er + (h & 1)
        u0, v0 = base.edge_ends(er)
        w = base.vertex_of_half(h)
        if sigma[w] == u0:
            return 2 * er
        if sigma[w] == v0:
            return 2 * er + 1
        raise StructureError("edge pairing lost an endpoint")

    q_edges: Dict[int, Tuple[int, int, int]] = {}
    for e in base.edge_ids():
        if e > emap[e]:
            continue
        u, v = base.edge_ends(e)
        s = -1 if (u in reps) != (v in reps) else 1
        q_edges[e] = (rep_vertex(u), rep_vertex(v), s)
    q_rot = {v: tuple(quot_half(h) for h in base.rotation(v)) for v in sorted(reps)}

    quotient = EmbeddedGraph(None, q_edges, q_rot)
    if quotient.surface != PROJECTIVE:
        raise DomainError("involution does not act freely on the surface")
    rebuilt = double_cover(quotient).cover
    if rebuilt.canonical_form() != g.canonical_form():
        raise DomainError("involution does not preserve the embedding")
    return quotient


def find_free_involution(
    g: EmbeddedGraph, require_embedding: bool = False
) -> Optional[Dict[int, int]]:
    """Search for a fixed-point-free involutive automorphism of the graph.

    The test is about the abstract multigraph; the embedding is along for the
    ride.  With ``require_embedding`` the involution must additionally divide
    the embedding, i.e. ``quotient_by_involution`` must accept it.  Returns
    the pairing as a dict, or None.  Backtracks over vertices with degree
    profile pruning, which keeps the search tiny on the symmetric inputs this
    is meant for.
    """
    verts = sorted(g.vertices())
    if len(verts) % 2:
        return None
    count: Dict[Tuple[int, int], int] = {}
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        key = (min(u, v), max(u, v))
        count[key] = count.get(key, 0) + 1

    def mult(a: int, b: int) -> int:
        return count.get((min(a, b), max(a, b)), 0)

    profile = {}
    for v in verts:
        nbrs = sorted(
            g.degree(g.vertex_of_half(h ^ 1)) for h in g.rotation(v)
        )
        profile[v] = (g.degree(v), tuple(nbrs))

    sigma: Dict[int, int] = {}

    def extend() -> Optional[Dict[int, int]]:
        free = [v for v in verts if v not in sigma]
        if not free:
            if not require_embedding:
                return dict(sigma)
            try:
                quotient_by_involution(g, sigma)
                return dict(sigma)
            except (DomainError, StructureError):
                return None
        u = free[0]
        for w in free[1:]:
            if profile[w] != profile[u]:
                continue
            if mult(u, u) != mult(w, w) or mult(u, w) != mult(w, u):
                continue
            ok = True
            for a, b in sigma.items():
                if mult(u, a) != mult(w, b):
                    ok = False
                    break
            if not ok:
                continue
            sigma[u] = w
            sigma[w] = u
            found = extend()
            if found is not None:
                return found
            del sigma[u]
            del sigma[w]
        return None

    return extend()
