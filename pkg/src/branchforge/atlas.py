"""Graph generators and the exchange catalog.

Projective grids, wye-delta exchanges on embeddings, breadth-first closure
of the grid under both exchanges, the cobweb family, and the one-lift
exchange on double covers.
"""

from collections import Counter, deque
from dataclasses import dataclass
from itertools import permutations, product
from typing import Dict, Iterator, List, Optional, Tuple

from .cover import DoubleCover, find_free_involution, quotient_by_involution
from .embed import (
    PROJECTIVE,
    SPHERE,
    DomainError,
    EmbeddedGraph,
    StructureError,
    edge_of,
    is_minor_minimal_representative,
    mate,
)

__all__ = [
    "Catalog",
    "abstract_key",
    "cobweb",
    "delta_y",
    "dodecahedron",
    "enumerate_catalog",
    "enumerate_embedded",
    "petersen_projective",
    "plane_multigraph_classes",
    "projective_grid",
    "same_abstract_graph",
    "single_lift_ydelta",
    "y_delta",
]


# ---------------------------------------------------------------------------
# fixed generators


def projective_grid(k: int) -> EmbeddedGraph:
    """The k x k projective grid.

    Built as the quotient of the k x 2k cylindrical grid by the free
    orientation-reversing half turn: k*k vertices, k*(2k-1) edges.  Row i
    ends in a sign -1 wrap edge joining (i, k-1) to (k-1-i, 0).  For k = 1
    this degenerates to a single vertex with one negative loop.
    """
    if k < 1:
        raise DomainError("projective_grid needs k >= 1")
    edges: Dict[int, Tuple[int, int, int]] = {}
    eid = 0
    ring_e: Dict[Tuple[int, int], int] = {}
    for i in range(k):
        for j in range(k - 1):
            ring_e[(i, j)] = eid
            edges[eid] = (i * k + j, i * k + j + 1, 1)
            eid += 1
    wrap_e: Dict[int, int] = {}
    for i in range(k):
        wrap_e[i] = eid
        edges[eid] = (i * k + (k - 1), (k - 1 - i) * k, -1)
        eid += 1
    spoke_e: Dict[Tuple[int, int], int] = {}
    for i in range(k - 1):
        for j in range(k):
            spoke_e[(i, j)] = eid
            edges[eid] = (i * k + j, (i + 1) * k + j, 1)
            eid += 1
    rotations: Dict[int, Tuple[int, ...]] = {}
    for i in range(k):
        for j in range(k):
            rot: List[int] = []
            # east, south, west, north; rows wrap with a flip
            if j < k - 1:
                rot.append(2 * ring_e[(i, j)])
            else:
                rot.append(2 * wrap_e[i])
            if i < k - 1:
                rot.append(2 * spoke_e[(i, j)])
            if j > 0:
                rot.append(2 * ring_e[(i, j - 1)] + 1)
            else:
                rot.append(2 * wrap_e[k - 1 - i] + 1)
            if i > 0:
                rot.append(2 * spoke_e[(i - 1, j)] + 1)
            rotations[i * k + j] = tuple(rot)
    if k == 1:
        rotations[0] = (0, 1)
    return EmbeddedGraph(PROJECTIVE, edges, rotations)


def dodecahedron() -> EmbeddedGraph:
    """Pentagonal dodecahedron on the sphere.

    Four rings of five vertices: outer pentagon 0-4, upper band 5-9, lower
    band 10-14, inner pentagon 15-19.  All twelve faces are pentagons.
    """
    edges: Dict[int, Tuple[int, int, int]] = {}
    for i in range(5):
        j = (i + 1) % 5
        edges[i] = (i, j, 1)
        edges[5 + i] = (i, 5 + i, 1)
        edges[10 + i] = (5 + i, 10 + i, 1)
        edges[15 + i] = (10 + i, 5 + j, 1)
        edges[20 + i] = (10 + i, 15 + i, 1)
        edges[25 + i] = (15 + i, 15 + j, 1)
    rot: Dict[int, Tuple[int, ...]] = {}
    for i in range(5):
        h = (i - 1) % 5
        rot[i] = (2 * i, 2 * (5 + i), 2 * h + 1)
        rot[5 + i] = (2 * (5 + i) + 1, 2 * (10 + i), 2 * (15 + h) + 1)
        rot[10 + i] = (2 * (15 + i), 2 * (20 + i), 2 * (10 + i) + 1)
        rot[15 + i] = (2 * (20 + i) + 1, 2 * (25 + i), 2 * (25 + h) + 1)
    return EmbeddedGraph(SPHERE, edges, rot)


def petersen_projective() -> EmbeddedGraph:
    """The Petersen graph embedded in the projective plane.

    Obtained as the antipodal quotient of the dodecahedron, so its double
    cover is the dodecahedron again.
    """
    g = dodecahedron()
    sigma = find_free_involution(g, require_embedding=True)
    if sigma is None:
        raise StructureError("dodecahedron admits no free embedded involution")
    return quotient_by_involution(g, sigma)


def cobweb(k: int) -> EmbeddedGraph:
    """The planar cobweb: a k x (2k+1) circular grid plus a hub.

    k concentric cycles of length 2k+1 joined by 2k+1 radial paths, and one
    extra vertex adjacent to every vertex of the innermost cycle.
    """
    if k < 2:
        raise DomainError("cobweb needs k >= 2")
    m = 2 * k + 1
    hub = k * m
    edges: Dict[int, Tuple[int, int, int]] = {}
    ring: Dict[Tuple[int, int], int] = {}
    radial: Dict[Tuple[int, int], int] = {}
    spoke: Dict[int, int] = {}
    eid = 0
    for r in range(k):
        for j in range(m):
            ring[(r, j)] = eid
            edges[eid] = (r * m + j, r * m + (j + 1) % m, 1)
            eid += 1
    for r in range(k - 1):
        for j in range(m):
            radial[(r, j)] = eid
            edges[eid] = (r * m + j, (r + 1) * m + j, 1)
            eid += 1
    for j in range(m):
        spoke[j] = eid
        edges[eid] = (hub, j, 1)
        eid += 1
    rotations: Dict[int, Tuple[int, ...]] = {}
    # hub spokes run clockwise when ring indices increase counterclockwise
    rotations[hub] = tuple(2 * spoke[j] for j in [0] + list(range(m - 1, 0, -1)))
    # per ring vertex the clockwise order is (outward, west, inward, east)
    for r in range(k):
        for j in range(m):
            parts: List[int] = []
            if r < k - 1:
                parts.append(2 * radial[(r, j)])
            parts.append(2 * ring[(r, (j - 1) % m)] + 1)
            if r > 0:
                parts.append(2 * radial[(r - 1, j)] + 1)
            else:
                parts.append(2 * spoke[j] + 1)
            parts.append(2 * ring[(r, j)])
            rotations[r * m + j] = tuple(parts)
    return EmbeddedGraph(SPHERE, edges, rotations)


# ---------------------------------------------------------------------------
# exchanges


def y_delta(g: EmbeddedGraph, v: int) -> EmbeddedGraph:
    """Replace a degree-3 vertex by a triangle on its neighbors.

    The three new edges reuse the star's edge ids and are drawn inside the
    three face corners at v, so the surgery happens in a disk around the
    star and the surface is unchanged.  Coinciding neighbors are allowed
    and produce parallel edges or, with opposite star signs, a loop.
    """
    if v not in g.vertices():
        raise DomainError(f"no vertex {v}")
    rot = g.rotation(v)
    if len(rot) != 3:
        raise DomainError(f"vertex {v} has degree {len(rot)}, expected 3")
    star = [edge_of(h) for h in rot]
    if len(set(star)) != 3:
        raise DomainError(f"vertex {v} carries a loop")
    nbr: List[int] = []
    sgn: List[int] = []
    for h in rot:
        e = edge_of(h)
        a, b = g.edge_ends(e)
        nbr.append(b if h == 2 * e else a)
        sgn.append(g.sign(e))
    # replacement pairs at the far ends; a negative star edge flips the
    # local order because the neighbor's chart disagrees with v's
    repl: Dict[int, Tuple[int, int]] = {}
    for i in range(3):
        j = (i - 1) % 3
        pair = (2 * star[i], 2 * star[j] + 1)
        repl[mate(rot[i])] = pair if sgn[i] > 0 else pair[::-1]
    edges: Dict[int, Tuple[int, int, int]] = {
        e: (*g.edge_ends(e), g.sign(e)) for e in g.edge_ids() if e not in set(star)
    }
    for i in range(3):
        edges[star[i]] = (nbr[i], nbr[(i + 1) % 3], sgn[i] * sgn[(i + 1) % 3])
    rotations: Dict[int, Tuple[int, ...]] = {}
    for x in g.vertices():
        if x == v:
            continue
        out: List[int] = []
        for h in g.rotation(x):
            if h in repl:
                out.extend(repl[h])
            else:
                out.append(h)
        rotations[x] = tuple(out)
    res = EmbeddedGraph(None, edges, rotations)
    if res.surface != g.surface:
        raise StructureError("exchange did not preserve the surface")
    return res


def delta_y(g: EmbeddedGraph, triangle: int) -> EmbeddedGraph:
    """Replace a facial triangle by a new degree-3 vertex inside it.

    ``triangle`` is a face id; the face must have three distinct boundary
    edges on three distinct vertices.  Inverse of y_delta up to isomorphism.
    """
    faces = g.faces()
    if not 0 <= triangle < len(faces):
        raise DomainError(f"no face {triangle}")
    f = faces[triangle]
    if f.length != 3:
        raise DomainError(f"face {triangle} has length {f.length}, expected 3")
    xs = list(g.face_boundary_vertices(f))
    eds = list(g.face_boundary_edges(f))
    if len(set(xs)) != 3 or len(set(eds)) != 3:
        raise DomainError(f"face {triangle} is not a simple triangle")
    w = max(g.vertices()) + 1
    # spoke j reuses the id of boundary edge j; its sign reads off the side
    # bit of the walk flag, which records whether the corner vertex's chart
    # agrees with the face orientation
    edges: Dict[int, Tuple[int, int, int]] = {
        e: (*g.edge_ends(e), g.sign(e)) for e in g.edge_ids() if e not in set(eds)
    }
    corner_repl: Dict[int, int] = {}
    drop: set = set()
    for j, fl in enumerate(f.flags):
        edges[eds[j]] = (w, xs[j], 1 if fl & 1 else -1)
        c = g.corner_of_flag(fl)
        corner_repl[c] = 2 * eds[j] + 1
        drop.add(g.next_half(c))
    rotations: Dict[int, Tuple[int, ...]] = {}
    for x in g.vertices():
        out: List[int] = []
        for h in g.rotation(x):
            if h in corner_repl:
                out.append(corner_repl[h])
            elif h not in drop:
                out.append(h)
        rotations[x] = tuple(out)
    rotations[w] = tuple(2 * eds[j] for j in range(3))
    res = EmbeddedGraph(None, edges, rotations)
    if res.surface != g.surface:
        raise StructureError("exchange did not preserve the surface")
    # the new vertex must undo to the original embedding
    if y_delta(res, w).canonical_form() != g.canonical_form():
        raise StructureError("triangle exchange failed its inverse check")
    return res


def single_lift_ydelta(dc: DoubleCover, v: int) -> EmbeddedGraph:
    """Exchange only one of the two lifts of a degree-3 base vertex.

    Both lifts give isomorphic results (the deck transformation swaps
    them), so the layer-0 lift is used.
    """
    if dc.base.degree(v) != 3:
        raise DomainError(f"base vertex {v} has degree {dc.base.degree(v)}")
    return y_delta(dc.cover, DoubleCover.lift_vertex(v, 0))


# ---------------------------------------------------------------------------
# catalog enumeration


@dataclass(frozen=True)
class Catalog:
    """All embeddings reachable from the grid by the two exchanges.

    ``members`` maps canonical form to a representative embedding; every
    member is re-verified minor-minimal k-representative.  ``exchange_edges``
    lists which exchange links which pair of forms.  ``complete`` is False
    when the size guard cut off part of the closure.
    """

    k: int
    members: Dict[bytes, EmbeddedGraph]
    exchange_edges: Tuple[Tuple[bytes, bytes, str], ...]
    complete: bool

    def __len__(self) -> int:
        return len(self.members)

    def graphs(self) -> Tuple[EmbeddedGraph, ...]:
        """Members in canonical-form order."""
        return tuple(self.members[c] for c in sorted(self.members))

    def exchange_graph_connected(self) -> bool:
        forms = sorted(self.members)
        index = {c: i for i, c in enumerate(forms)}
        seen = {0}
        queue = deque([0])
        adj: Dict[int, List[int]] = {i: [] for i in range(len(forms))}
        for a, b, _ in self.exchange_edges:
            if a != b:
                adj[index[a]].append(index[b])
                adj[index[b]].append(index[a])
        while queue:
            i = queue.popleft()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == len(forms)

    def abstract_graph_count(self) -> int:
        """Number of members distinct as abstract multigraphs."""
        reps: List[EmbeddedGraph] = []
        for g in self.graphs():
            if not any(same_abstract_graph(g, r) for r in reps):
                reps.append(g)
        return len(reps)


def _exchange_moves(g: EmbeddedGraph) -> Iterator[Tuple[EmbeddedGraph, str]]:
    for v in g.vertices():
        if g.degree(v) == 3 and len({edge_of(h) for h in g.rotation(v)}) == 3:
            yield y_delta(g, v), "ydelta"
    for f in g.faces():
        if f.length != 3:
            continue
        if len(set(g.face_boundary_vertices(f))) != 3:
            continue
        if len(set(g.face_boundary_edges(f))) != 3:
            continue
        yield delta_y(g, f.id), "deltay"


def enumerate_catalog(k: int, max_size: Optional[int] = None) -> Catalog:
    """Breadth-first closure of projective_grid(k) under both exchanges.

    Canonical forms deduplicate; every newly reached embedding is
    re-verified with is_minor_minimal_representative before joining.  An
    exchange whose result exceeds max_size vertices is skipped and the
    catalog is flagged partial.
    """
    if k < 1:
        raise DomainError("enumerate_catalog needs k >= 1")
    if max_size is None:
        max_size = 2 * k * k + 2
    g0 = projective_grid(k)
    c0 = g0.canonical_form()
    members: Dict[bytes, EmbeddedGraph] = {c0: g0}
    check = is_minor_minimal_representative(g0, k)
    if not check:
        raise StructureError(f"the {k} x {k} grid failed its minimality check")
    links: Dict[Tuple[bytes, bytes], str] = {}
    complete = True
    queue = deque([c0])
    while queue:
        form = queue.popleft()
        g = members[form]
        for h, kind in _exchange_moves(g):
            if h.n_vertices > max_size:
                complete = False
                continue
            ch = h.canonical_form()
            if ch != form:
                key = (min(form, ch), max(form, ch))
                links.setdefault(key, kind)
            if ch in members:
                continue
            ok = is_minor_minimal_representative(h, k)
            if not ok:
                raise StructureError(
                    f"a {kind} exchange left the minor-minimal class "
                    f"(violation {ok.witness})"
                )
            members[ch] = h
            queue.append(ch)
    edges = tuple(sorted((a, b, kind) for (a, b), kind in links.items()))
    return Catalog(k, members, edges, complete)


# ---------------------------------------------------------------------------
# exhaustive small-embedding enumeration


def _insert_after(rot: Tuple[int, ...], c: int, new: Tuple[int, ...]) -> Tuple[int, ...]:
    i = rot.index(c)
    return rot[: i + 1] + new + rot[i + 1 :]


def _with_edge(
    g: EmbeddedGraph, c1: int, c2: int, s: int, order: int = 0
) -> Optional[EmbeddedGraph]:
    """g plus one edge joining corners c1, c2 of a common face, or None
    when the sign does not fit any supported surface."""
    eid = max(g.edge_ids(), default=-1) + 1
    u, v = g.vertex_of_half(c1), g.vertex_of_half(c2)
    edges = {e: (*g.edge_ends(e), g.sign(e)) for e in g.edge_ids()}
    edges[eid] = (u, v, s)
    rotations = {x: g.rotation(x) for x in g.vertices()}
    halves = (2 * eid, 2 * eid + 1) if order == 0 else (2 * eid + 1, 2 * eid)
    if c1 == c2:
        rotations[u] = _insert_after(rotations[u], c1, halves)
    else:
        rotations[u] = _insert_after(rotations[u], c1, (2 * eid,))
        rotations[v] = _insert_after(rotations[v], c2, (2 * eid + 1,))
    try:
        return EmbeddedGraph(None, edges, rotations)
    except StructureError:
        return None


def _grown(g: EmbeddedGraph, max_vertices: int, want_p: bool, simple: bool
           ) -> Iterator[EmbeddedGraph]:
    signs = (1, -1) if want_p else (1,)
    if g.n_edges == 0:
        # a bare vertex: seed a loop or a pendant edge directly
        (v,) = g.vertices()
        for s in signs:
            if not simple:
                res = EmbeddedGraph(None, {0: (v, v, s)}, {v: (0, 1)})
                if res.surface in (SPHERE, PROJECTIVE):
                    yield res
        if g.n_vertices < max_vertices:
            w = v + 1
            yield EmbeddedGraph(SPHERE, {0: (v, w, 1)}, {v: (0,), w: (1,)})
        return
    adjacent = set()
    if simple:
        for e in g.edge_ids():
            adjacent.add(frozenset(g.edge_ends(e)))
    by_face: Dict[int, List[int]] = {}
    fof = g.face_map()
    for fl, fid in fof.items():
        c = g.corner_of_flag(fl)
        if c not in by_face.setdefault(fid, []):
            by_face[fid].append(c)
    for corners in by_face.values():
        corners.sort()
        for i, c1 in enumerate(corners):
            for c2 in corners[i:]:
                u, v = g.vertex_of_half(c1), g.vertex_of_half(c2)
                if simple and (u == v or frozenset((u, v)) in adjacent):
                    continue
                for s in signs:
                    orders = (0, 1) if c1 == c2 else (0,)
                    for order in orders:
                        res = _with_edge(g, c1, c2, s, order)
                        if res is not None and res.surface in (SPHERE, PROJECTIVE):
                            yield res
    if g.n_vertices < max_vertices:
        w = max(g.vertices()) + 1
        eid = max(g.edge_ids()) + 1
        seen_c = set()
        for fl in g.flags():
            c = g.corner_of_flag(fl)
            if c in seen_c:
                continue
            seen_c.add(c)
            u = g.vertex_of_half(c)
            edges = {e: (*g.edge_ends(e), g.sign(e)) for e in g.edge_ids()}
            edges[eid] = (u, w, 1)
            rotations = {x: g.rotation(x) for x in g.vertices()}
            rotations[u] = _insert_after(rotations[u], c, (2 * eid,))
            rotations[w] = (2 * eid + 1,)
            yield EmbeddedGraph(g.surface, edges, rotations)


def enumerate_embedded(
    max_edges: int,
    max_vertices: Optional[int] = None,
    surface: str = SPHERE,
    simple: bool = False,
) -> Tuple[EmbeddedGraph, ...]:
    """Every connected embedding in the given surface, up to isomorphism.

    Grows breadth first from a single vertex, one edge per step: either a
    new edge joining two corners of a common face (twisted insertions are
    tried too when the target is the projective plane) or a new pendant
    vertex hung off a corner.  Deleting a non-bridge or pendant edge undoes
    a step and lands back in the family, so the closure is exhaustive
    within the caps.  Results are sorted by size then canonical form.
    """
    if surface not in (SPHERE, PROJECTIVE):
        raise DomainError(f"unknown surface {surface!r}")
    if max_edges < 0:
        raise DomainError("max_edges must be non-negative")
    if max_vertices is None:
        max_vertices = max_edges + 1
    want_p = surface == PROJECTIVE
    k1 = EmbeddedGraph(SPHERE, {}, {0: ()})
    seen = {k1.canonical_form()}
    frontier: List[EmbeddedGraph] = [k1]
    out: List[EmbeddedGraph] = [k1]
    while frontier:
        grown: List[EmbeddedGraph] = []
        for g in frontier:
            if g.n_edges >= max_edges:
                continue
            for cand in _grown(g, max_vertices, want_p, simple):
                # a sphere graph at the cap can neither be yielded nor grown
                if want_p and cand.surface == SPHERE and cand.n_edges >= max_edges:
                    continue
                c = cand.canonical_form()
                if c not in seen:
                    seen.add(c)
                    grown.append(cand)
        frontier = grown
        out.extend(grown)
    keep = [g for g in out if g.surface == surface]
    keep.sort(key=lambda g: (g.n_edges, g.n_vertices, g.canonical_form()))
    return tuple(keep)


# ---------------------------------------------------------------------------
# abstract isomorphism (embedding ignored)


def _adjacency(g: EmbeddedGraph) -> Dict[int, Counter]:
    adj: Dict[int, Counter] = {v: Counter() for v in g.vertices()}
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u == v:
            adj[u][u] += 1
        else:
            adj[u][v] += 1
            adj[v][u] += 1
    return adj


def _refine_labels(adj: Dict[int, Counter]) -> Dict[int, int]:
    label = {v: (sum(c.values()) + c[v], c[v]) for v, c in adj.items()}
    for _ in range(len(adj)):
        sig = {
            v: (label[v], tuple(sorted((label[u], m) for u, m in adj[v].items())))
            for v in adj
        }
        fresh = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: fresh[sig[v]] for v in adj}
        if new == {v: label[v] for v in adj}:
            break
        label = new
    return {v: label[v] for v in adj}


def _abstract_key_edges(
    n: int, loops: Counter, links: Counter
) -> Tuple[Tuple[int, int, int], ...]:
    """Canonical code of a multigraph given per-vertex loop counts and a
    Counter of unordered vertex pairs.  Minimizes over vertex orderings
    compatible with the refinement classes."""
    adj: Dict[int, Counter] = {v: Counter() for v in range(n)}
    for (u, v), m in links.items():
        adj[u][v] += m
        adj[v][u] += m
    for v, m in loops.items():
        adj[v][v] += m
    labels = _refine_labels(adj)
    classes: Dict[int, List[int]] = {}
    for v in sorted(adj):
        classes.setdefault(labels[v], []).append(v)
    pools = [classes[l] for l in sorted(classes)]
    best: Optional[Tuple[Tuple[int, int, int], ...]] = None
    for perms in product(*(permutations(p) for p in pools)):
        order = [v for block in perms for v in block]
        pos = {v: i for i, v in enumerate(order)}
        code: List[Tuple[int, int, int]] = []
        for (u, v), m in links.items():
            a, b = sorted((pos[u], pos[v]))
            code.append((a, b, m))
        for v, m in loops.items():
            code.append((pos[v], pos[v], m))
        tup = tuple(sorted(code))
        if best is None or tup < best:
            best = tup
    return (("n", n, 0),) + best if best is not None else (("n", n, 0),)


def abstract_key(g: EmbeddedGraph) -> Tuple:
    """Canonical key of the underlying multigraph, embedding ignored."""
    ids = {v: i for i, v in enumerate(sorted(g.vertices()))}
    loops: Counter = Counter()
    links: Counter = Counter()
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u == v:
            loops[ids[u]] += 1
        else:
            links[frozenset((ids[u], ids[v]))] += 1
    link_pairs = Counter({tuple(sorted(k)): m for k, m in links.items()})
    return _abstract_key_edges(g.n_vertices, loops, link_pairs)


def _face_vertex_corners(g: EmbeddedGraph) -> Dict[int, Dict[int, int]]:
    """face id -> {vertex -> one corner of that face at that vertex}."""
    out: Dict[int, Dict[int, int]] = {}
    for fl, fid in g.face_map().items():
        c = g.corner_of_flag(fl)
        out.setdefault(fid, {}).setdefault(g.vertex_of_half(c), c)
    return out


def plane_multigraph_classes(
    max_vertices: int, max_edges: int
) -> Tuple[EmbeddedGraph, ...]:
    """One plane embedding per connected planar multigraph within the caps.

    Embeddings are enumerated exhaustively one edge below the cap; the last
    edge level is closed abstractly (add an edge, a loop, or a pendant to
    every class) since growing by one edge cannot leave planarity in this
    range except for one graph, the 9-edge complete bipartite graph on
    3+3 vertices, which is detected and dropped.  An embedding for each new
    class is found by scanning the stored embeddings of its parent for a
    face exposing both endpoints.
    """
    if max_edges < 1:
        raise DomainError("max_edges must be positive")
    embeddings = enumerate_embedded(max_edges - 1, max_vertices, SPHERE)
    by_class: Dict[Tuple, EmbeddedGraph] = {}
    top_embs: Dict[Tuple, List[EmbeddedGraph]] = {}
    for g in embeddings:
        key = abstract_key(g)
        by_class.setdefault(key, g)
        if g.n_edges == max_edges - 1:
            top_embs.setdefault(key, []).append(g)
    skipped: List[Tuple] = []
    for key, embs in top_embs.items():
        rep = embs[0]
        n = rep.n_vertices
        ids = sorted(rep.vertices())
        pos = {v: i for i, v in enumerate(ids)}
        loops: Counter = Counter()
        links: Counter = Counter()
        for e in rep.edge_ids():
            u, v = rep.edge_ends(e)
            if u == v:
                loops[pos[u]] += 1
            else:
                links[tuple(sorted((pos[u], pos[v])))] += 1
        moves: List[Tuple] = []
        for i in range(n):
            moves.append(("loop", i))
            for j in range(i + 1, n):
                moves.append(("link", i, j))
        if n < max_vertices:
            for i in range(n):
                moves.append(("pendant", i))
        for move in moves:
            lo, ln = Counter(loops), Counter(links)
            nn = n
            if move[0] == "loop":
                lo[move[1]] += 1
            elif move[0] == "link":
                ln[(move[1], move[2])] += 1
            else:
                ln[(move[1], nn)] += 1
                nn += 1
            child_key = _abstract_key_edges(nn, lo, ln)
            if child_key in by_class:
                continue
            emb = _embed_with_move(embs, ids, move, child_key)
            if emb is None:
                skipped.append(child_key)
                continue
            by_class[child_key] = emb
    for key in skipped:
        if key in by_class:
            continue
        # the only connected multigraph in range with no plane embedding
        if key != _K33_KEY:
            raise StructureError("an unembeddable class is not the 3+3 graph")
    return tuple(
        sorted(by_class.values(), key=lambda g: (g.n_edges, g.n_vertices,
                                                 g.canonical_form()))
    )


_K33_KEY = _abstract_key_edges(
    6, Counter(), Counter({(i, j): 1 for i in (0, 1, 2) for j in (3, 4, 5)})
)


def _key_with_link(g: EmbeddedGraph, a: int, b: int) -> Tuple:
    """Abstract key of g with one extra edge between a and b."""
    ids = {v: i for i, v in enumerate(sorted(g.vertices()))}
    loops: Counter = Counter()
    links: Counter = Counter()
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u == v:
            loops[ids[u]] += 1
        else:
            links[tuple(sorted((ids[u], ids[v])))] += 1
    if a == b:
        loops[ids[a]] += 1
    else:
        links[tuple(sorted((ids[a], ids[b])))] += 1
    return _abstract_key_edges(g.n_vertices, loops, links)


def _embed_with_move(
    embs: List[EmbeddedGraph], ids: List[int], move: Tuple, child_key: Tuple
) -> Optional[EmbeddedGraph]:
    """Find an embedding realizing an abstract growth move.

    Loop and pendant moves always embed.  A new link between existing
    vertices needs a face exposing both endpoints; vertex labels differ
    between stored embeddings, so candidate cofacial pairs are accepted by
    matching the resulting abstract key instead of by label transfer.
    """
    if move[0] == "loop":
        g = embs[0]
        u = ids[move[1]]
        cs = [cc for cc in (g.corner_of_flag(fl) for fl in g.flags())
              if g.vertex_of_half(cc) == u]
        if not cs:
            return EmbeddedGraph(SPHERE, {0: (u, u, 1)}, {u: (0, 1)})
        return _with_edge(g, cs[0], cs[0], 1)
    if move[0] == "pendant":
        g = embs[0]
        u = ids[move[1]]
        cs = [cc for cc in (g.corner_of_flag(fl) for fl in g.flags())
              if g.vertex_of_half(cc) == u]
        w = max(g.vertices()) + 1
        eid = max(g.edge_ids()) + 1 if g.n_edges else 0
        edges = {e: (*g.edge_ends(e), g.sign(e)) for e in g.edge_ids()}
        edges[eid] = (u, w, 1)
        rotations = {x: g.rotation(x) for x in g.vertices()}
        rotations[u] = (_insert_after(rotations[u], cs[0], (2 * eid,))
                        if cs else (2 * eid,))
        rotations[w] = (2 * eid + 1,)
        return EmbeddedGraph(g.surface, edges, rotations)
    g0 = embs[0]
    u, v = ids[move[1]], ids[move[2]]
    for corners in _face_vertex_corners(g0).values():
        if u in corners and v in corners:
            return _with_edge(g0, corners[u], corners[v], 1)
    for g in embs:
        for corners in _face_vertex_corners(g).values():
            verts = sorted(corners)
            for i, a in enumerate(verts):
                for b in verts[i + 1:]:
                    if _key_with_link(g, a, b) == child_key:
                        return _with_edge(g, corners[a], corners[b], 1)
    return None


def same_abstract_graph(g: EmbeddedGraph, h: EmbeddedGraph) -> bool:
    """Multigraph isomorphism, ignoring the embeddings entirely."""
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return False
    ga, ha = _adjacency(g), _adjacency(h)
    gl, hl = _refine_labels(ga), _refine_labels(ha)
    if Counter(gl.values()) != Counter(hl.values()):
        return False
    gs = sorted(ga, key=lambda v: (gl[v], v))
    by_label: Dict[int, List[int]] = {}
    for v in ha:
        by_label.setdefault(hl[v], []).append(v)

    def extend(i: int, mapping: Dict[int, int], used: set) -> bool:
        if i == len(gs):
            return True
        v = gs[i]
        for w in by_label.get(gl[v], []):
            if w in used:
                continue
            if ga[v][v] != ha[w][w]:
                continue
            if any(ga[v][u] != ha[w][mapping[u]] for u in mapping):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1, mapping, used):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return extend(0, {}, set())
