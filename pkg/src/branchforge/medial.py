"""Medial graphs, straight-ahead decompositions, openings and tightness.

The medial of an embedded graph G places one vertex in the middle of every
edge and draws one edge across every corner of G, joining the midpoints of
the two half-edges bounding that corner.  It is 4-regular, lives on the same
surface, and its faces split into two kinds: one face inside each face of G
and one face around each vertex of G.

Everything here is built on the flag structure of the host, so loops,
parallel edges and negative signs need no special cases.  A medial flag is a
pair (flag of G, side bit) packed as (flag << 1) | side; side 0 faces the
vertex of the G-flag, side 1 faces its face.  Medial vertex ids equal base
edge ids, and medial edge ids equal base corner ids (the half-edge opening
the corner), which downstream certificate code relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .embed import (
    PROJECTIVE,
    DomainError,
    DualWalk,
    EmbeddedGraph,
    StructureError,
    _flag,
    _graph_from_gem,
    edge_of,
    mate,
    odd_closed_walk,
)


@dataclass(eq=False)
class MedialGraph:
    """A medial embedding together with its bookkeeping maps.

    ``edge_of_vertex`` sends each medial vertex to the base edge it sits on
    (the identity map under this construction, kept explicit because callers
    should not depend on the id convention).  ``face_origin`` sends each
    medial face to ("V", v) or ("F", f) naming the base vertex or base face
    it surrounds; it is a bijection onto the disjoint union of the two sets.
    """

    base: EmbeddedGraph
    medial: EmbeddedGraph
    edge_of_vertex: Dict[int, int]
    face_origin: Dict[int, Tuple[str, int]]


def medial(g: EmbeddedGraph) -> MedialGraph:
    """Construct the medial graph of a connected embedding with an edge."""
    if g.n_edges == 0:
        raise DomainError("medial needs at least one edge")
    if not g.is_connected():
        raise DomainError("medial needs a connected embedding")

    flags, t0, t1, t2 = g._gem()
    mflags: List[int] = []
    mt0: Dict[int, int] = {}
    mt1: Dict[int, int] = {}
    mt2: Dict[int, int] = {}
    for ph in flags:
        for t in (0, 1):
            fl = (ph << 1) | t
            mflags.append(fl)
            # crossing the medial edge walks the corner to its other flag;
            # the side toggle crosses the medial vertex along the base edge
            mt0[fl] = (t1[ph] << 1) | t
            mt2[fl] = (ph << 1) | (t ^ 1)
            mt1[fl] = ((t2[ph] if t == 0 else t0[ph]) << 1) | t
    mflags.sort()

    vertex_ids = {8 * e: e for e in g.edge_ids()}
    edge_ids: Dict[int, int] = {}
    for h in g.half_edges():
        a = _flag(h, 1) << 1
        b = _flag(g.next_half(h), 0) << 1
        edge_ids[min(a, b)] = h

    built = _graph_from_gem(mflags, mt0, mt1, mt2, vertex_ids, edge_ids)
    med = built.graph
    if med.surface != g.surface:
        raise StructureError("medial graph landed on the wrong surface")
    if med.n_vertices != g.n_edges or med.n_edges != 2 * g.n_edges:
        raise StructureError("medial graph has wrong counts")
    for x in med.vertices():
        if med.degree(x) != 4:
            raise StructureError("medial graph is not 4-regular")

    face_origin: Dict[int, Tuple[str, int]] = {}
    for v in g.vertices():
        fl = _flag(min(g.rotation(v)), 0) << 1
        mf = med.face_of_flag(built.internal_flag[fl])
        if mf in face_origin:
            raise StructureError("two base vertices share a medial face")
        face_origin[mf] = ("V", v)
    for face in g.faces():
        fl = (face.flags[0] << 1) | 1
        mf = med.face_of_flag(built.internal_flag[fl])
        if mf in face_origin:
            raise StructureError("medial face carries two origins")
        face_origin[mf] = ("F", face.id)
    if len(face_origin) != med.n_faces:
        raise StructureError("medial face origin map is not a bijection")

    edge_of_vertex = {e: e for e in g.edge_ids()}
    return MedialGraph(g, med, edge_of_vertex, face_origin)


def angle_of_medial_edge(base: EmbeddedGraph, medial_edge: int) -> Tuple[int, int]:
    """The (vertex, face) pair of the base corner a medial edge crosses.

    Medial edge ids are base corner ids, i.e. the half-edge h whose corner
    the edge crosses; the corner sits at the vertex of h inside the face
    between h and the next half-edge clockwise.
    """
    h = medial_edge
    v = base.vertex_of_half(h)
    f = base.face_of_flag(_flag(h, 1))
    return v, f


# ----------------------------------------------------------------------
# straight-ahead decomposition


@dataclass(eq=False)
class StraightAheadDecomposition:
    """Edge classes closed under the opposite relation, with their subgraphs.

    At a degree-4 vertex the 1st and 3rd half-edges of the rotation are
    opposite, likewise the 2nd and 4th.  Classes are listed by smallest
    member edge; each subgraph keeps exactly the class edges and the
    vertices they touch.
    """

    classes: Tuple[FrozenSet[int], ...]
    subgraphs: Tuple[EmbeddedGraph, ...]


def straight_ahead(m: EmbeddedGraph) -> StraightAheadDecomposition:
    """Partition the edges by repeatedly walking straight through vertices.

    Every vertex must have degree 4; degree-1 vertices are allowed so that
    cut-open disk forms can be decomposed too.
    """
    parent = {e: e for e in m.edge_ids()}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for v in m.vertices():
        rot = m.rotation(v)
        if len(rot) == 1:
            continue
        if len(rot) != 4:
            raise DomainError("straight-ahead decomposition needs degrees 1 or 4")
        union(edge_of(rot[0]), edge_of(rot[2]))
        union(edge_of(rot[1]), edge_of(rot[3]))

    groups: Dict[int, List[int]] = {}
    for e in m.edge_ids():
        groups.setdefault(find(e), []).append(e)
    classes = tuple(frozenset(groups[r]) for r in sorted(groups))
    subgraphs = tuple(_edge_subgraph(m, cls) for cls in classes)
    return StraightAheadDecomposition(classes, subgraphs)


def _edge_subgraph(g: EmbeddedGraph, keep: Iterable[int]) -> EmbeddedGraph:
    """The sub-embedding on an edge subset, dropping stranded vertices."""
    ks = set(keep)
    halves = set()
    for e in ks:
        halves.add(2 * e)
        halves.add(2 * e + 1)
    edges = {e: g._edges[e] for e in ks}
    rot = {}
    for v in g.vertices():
        r = tuple(h for h in g.rotation(v) if h in halves)
        if r:
            rot[v] = r
    return EmbeddedGraph(None, edges, rot)


# ----------------------------------------------------------------------
# openings


def opening_face_pairs(m: EmbeddedGraph, v: int) -> Dict[str, Tuple[int, int]]:
    """The two opposite face pairs at a degree-4 vertex, by stable name.

    Around v the four corners carry faces (f2, f3, f4, f1) starting from the
    corner that follows the rotation's first half-edge.  Pair "A" is the one
    containing that first corner's face, so A = (f2, f4) and B = (f3, f1).
    An opening through a pair cuts those two faces together.
    """
    rot = m.rotation(v)
    if len(rot) != 4:
        raise DomainError("openings need a degree-4 vertex")
    corner = [m.face_of_flag(_flag(h, 1)) for h in rot]
    return {"A": (corner[0], corner[2]), "B": (corner[1], corner[3])}


def open_at(m: EmbeddedGraph, v: int, pair: str) -> EmbeddedGraph:
    """Open the embedding at a degree-4 vertex through an opposite face pair.

    The vertex disappears and its four edge stubs reconnect pairwise through
    the two corners away from the named pair, so the edge count drops by two
    and every other rotation is untouched.  Reconnected edges multiply their
    signs.  Edge ends that close up into a curve through no remaining vertex
    vanish entirely, which can happen only with loops at v.
    """
    rot = m.rotation(v)
    if len(rot) != 4:
        raise DomainError("openings need a degree-4 vertex")
    h1, h2, h3, h4 = rot
    if pair == "A":
        wire = {h1: h4, h4: h1, h2: h3, h3: h2}
    elif pair == "B":
        wire = {h1: h2, h2: h1, h3: h4, h4: h3}
    else:
        raise DomainError("face pair must be 'A' or 'B'")

    atv = frozenset(rot)
    endpoints = sorted(
        h for h in m.half_edges() if h not in atv and mate(h) in atv
    )
    done = set()
    chains: List[Tuple[int, int, int]] = []
    for g0 in endpoints:
        if g0 in done:
            continue
        s = m.sign(edge_of(g0))
        cur = mate(g0)
        while True:
            nxt = wire[cur]
            s *= m.sign(edge_of(nxt))
            partner = mate(nxt)
            if partner not in atv:
                break
            cur = partner
        g1 = partner
        done.add(g0)
        done.add(g1)
        chains.append((g0, g1, s))

    relabel: Dict[int, int] = {}
    new_edges: Dict[int, Tuple[int, int, int]] = {}
    for e in m.edge_ids():
        a, b = m.edge_ends(e)
        if a != v and b != v:
            new_edges[e] = m._edges[e]
    for g0, g1, s in chains:
        k = edge_of(g0)
        relabel[g0] = 2 * k
        relabel[g1] = 2 * k + 1
        new_edges[k] = (m.vertex_of_half(g0), m.vertex_of_half(g1), s)

    new_rot = {}
    for u in m.vertices():
        if u == v:
            continue
        new_rot[u] = tuple(relabel.get(h, h) for h in m.rotation(u))

    opened = EmbeddedGraph(None, new_edges, new_rot)
    if opened.n_edges != m.n_edges - 2 or opened.n_vertices != m.n_vertices - 1:
        raise StructureError("opening changed the wrong number of elements")
    return opened


# ----------------------------------------------------------------------
# tightness


def dual_odd_girth(m: EmbeddedGraph) -> int:
    """Length of the shortest orientation-reversing closed walk in the dual.

    In the projective plane a closed walk is homotopically non-trivial
    exactly when its sign product is negative, so this is a parity-shortest
    walk search over the dual embedding.
    """
    length, _ = dual_odd_walk(m)
    return length


def dual_odd_walk(m: EmbeddedGraph) -> Tuple[int, DualWalk]:
    """Shortest odd dual walk with its witness; see dual_odd_girth."""
    if m.surface != PROJECTIVE:
        raise DomainError("dual odd girth needs a projective-plane embedding")
    if not m.is_connected():
        raise DomainError("dual odd girth needs a connected embedding")
    d = m.dual()
    rows = [(e,) + d._edges[e] for e in d.edge_ids()]
    found = odd_closed_walk(d.vertices(), rows)
    if found is None:
        raise StructureError("projective dual with no orientation-reversing walk")
    length, seq = found
    return length, DualWalk(m, seq)


def opened_dual_odd_girth(j: EmbeddedGraph) -> int:
    """Dual odd girth extended to the results of openings.

    Openings can leave a graph that no longer fills the projective plane:
    one with at most one face, or one whose embedding collapses to the
    sphere, or a disconnected one.  A noncontractible curve then runs
    through the slack, so the girth counts as 0; when a single component
    still fills the projective plane the other components sit inside one of
    its faces and can be avoided, so its own girth is the answer.
    """
    if j.n_faces <= 1:
        return 0
    if j.surface != PROJECTIVE:
        return 0
    if j.is_connected():
        return dual_odd_girth(j)
    for comp in j.components():
        sub = j.subgraph([comp])
        if sub.surface == PROJECTIVE:
            if sub.n_faces <= 1:
                return 0
            return dual_odd_girth(sub)
    raise StructureError("projective graph without a projective component")


@dataclass(frozen=True)
class TightnessCheck:
    """Boolean result with a failure witness.

    The witness is ("dual_walk", walk) when the host itself has a short
    orientation-reversing dual walk, or ("opening", v, pair, girth) naming
    an opening whose dual odd girth stayed too large.
    """

    ok: bool
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def _require_tightness_host(m: EmbeddedGraph) -> None:
    for v in m.vertices():
        if m.degree(v) != 4:
            raise DomainError("tightness is defined for 4-regular graphs")
    if m.surface != PROJECTIVE:
        raise DomainError("tightness is defined in the projective plane")
    if not m.is_connected():
        raise DomainError("tightness needs a connected graph")


def is_k_tight_direct(m: EmbeddedGraph, k: int) -> TightnessCheck:
    """Definition-level tightness test.

    The graph must have no orientation-reversing closed dual walk shorter
    than k, while every opening at every vertex, through both face pairs,
    admits one of length at most k-1.
    """
    if k < 1:
        raise DomainError("tightness threshold must be at least 1")
    _require_tightness_host(m)
    length, walk = dual_odd_walk(m)
    if length < k:
        return TightnessCheck(False, ("dual_walk", walk))
    for v in sorted(m.vertices()):
        for pair in ("A", "B"):
            got = opened_dual_odd_girth(open_at(m, v, pair))
            if got > k - 1:
                return TightnessCheck(False, ("opening", v, pair, got))
    return TightnessCheck(True)


@dataclass(frozen=True)
class LinsTightness:
    """Tightness via the straight-ahead decomposition, with the range k.

    Tight means every class is a cycle, every cycle reverses orientation,
    and every two cycles share exactly one vertex; k is then the number of
    classes.  The witness explains the first failure.
    """

    ok: bool
    k: Optional[int] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def is_tight_lins(m: EmbeddedGraph) -> LinsTightness:
    """Decide tightness by the shape of the straight-ahead classes."""
    _require_tightness_host(m)
    dec = straight_ahead(m)
    for i, sub in enumerate(dec.subgraphs):
        if any(sub.degree(v) != 2 for v in sub.vertices()) or not sub.is_connected():
            return LinsTightness(False, None, ("not_cycle", i))
        sign = 1
        for e in dec.classes[i]:
            sign *= m.sign(e)
        if sign > 0:
            return LinsTightness(False, None, ("contractible", i))
    verts = [set(sub.vertices()) for sub in dec.subgraphs]
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            shared = len(verts[i] & verts[j])
            if shared != 1:
                return LinsTightness(False, None, ("intersection", i, j, shared))
    return LinsTightness(True, len(dec.classes))
