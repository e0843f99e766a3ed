"""Width parameters of embedded multigraphs.

Carving width of a plane multigraph is decided through antipodal cut
structures: a family of subgraphs, one per edge plus a vertex set per
face, whose mutual incidence conditions certify that every carving has
a large cut.  A greatest-fixpoint pruning either finds such a family or
proves none exists, and a linear scan over the threshold turns the
decision into the exact width.  Branch width of a plane graph is then
half the carving width of its medial.  Small instances are also solved
by exhaustive enumeration of leaf labelled cubic trees, which gives an
independent oracle for every fast path.
"""

from __future__ import annotations

import json
import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .cover import DoubleCover
from .embed import (
    PROJECTIVE,
    SPHERE,
    DomainError,
    EmbeddedGraph,
    SizeCapError,
    StructureError,
    parse_rot,
    representativity,
    representativity_bruteforce,
    write_rot,
)
from .medial import MedialGraph, angle_of_medial_edge, medial

__all__ = [
    "Antipodality",
    "BranchDecomposition",
    "Carving",
    "CarvingWidth",
    "MinorMinimalityReport",
    "antipodality_decision",
    "branch_width",
    "build_cover_antipodality",
    "bw_bruteforce",
    "carving_width",
    "carving_width_witness",
    "certify_minor_minimal_bw",
    "cw_bruteforce",
    "decomposition_width",
    "decomposition_from_json",
    "antipodality_from_json",
    "optimal_carving",
    "optimal_branch_decomposition",
    "OracleReport",
    "oracle_carving_suite",
    "oracle_medial_suite",
    "oracle_representativity_suite",
    "shortest_closed_dual_walk_through",
    "validate_antipodality",
]

BRUTE_EDGE_CAP = 9
BRUTE_VERTEX_CAP = 9


# ----------------------------------------------------------------------
# explicit decompositions

@dataclass(eq=False)
class Carving:
    """A carving of the vertex set: an unrooted cubic tree whose leaves
    are the vertices.  ``tree`` lists the tree edges over arbitrary node
    ids and ``leaf_map`` sends each leaf node to a graph vertex."""

    tree: Tuple[Tuple[int, int], ...]
    leaf_map: Dict[int, int]

    def to_json(self) -> str:
        payload = {
            "kind": "carving",
            "tree": [[a, b] for a, b in self.tree],
            "leaves": {str(n): x for n, x in sorted(self.leaf_map.items())},
        }
        return json.dumps(payload, sort_keys=True)


@dataclass(eq=False)
class BranchDecomposition:
    """Same tree shape as a carving, but the leaves carry edge ids."""

    tree: Tuple[Tuple[int, int], ...]
    leaf_map: Dict[int, int]

    def to_json(self) -> str:
        payload = {
            "kind": "branch",
            "tree": [[a, b] for a, b in self.tree],
            "leaves": {str(n): x for n, x in sorted(self.leaf_map.items())},
        }
        return json.dumps(payload, sort_keys=True)


def _leaf_sides(
    tree: Sequence[Tuple[int, int]],
    leaf_map: Dict[int, int],
    universe: Iterable[int],
) -> List[FrozenSet[int]]:
    """Leaf items on one side of each tree edge, after shape validation."""
    items = set(universe)
    vals = list(leaf_map.values())
    if len(set(vals)) != len(vals) or set(vals) != items:
        raise StructureError("leaf map is not a bijection onto the decomposed items")
    adj: Dict[int, List[int]] = {n: [] for n in leaf_map}
    for a, b in tree:
        if a == b:
            raise StructureError("decomposition tree has a self loop")
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if not adj:
        raise StructureError("decomposition tree has no nodes")
    if len(tree) != len(adj) - 1:
        raise StructureError("node and edge counts do not make a tree")
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(adj):
        raise StructureError("decomposition tree is not connected")
    if len(adj) == 1:
        return []
    for n, nbrs in adj.items():
        d = len(nbrs)
        if d not in (1, 3):
            raise StructureError(f"tree node {n} has degree {d}, want 1 or 3")
        if (d == 1) != (n in leaf_map):
            raise StructureError(f"tree node {n} disagrees with the leaf map")
    root = next(iter(leaf_map))
    parent: Dict[int, Optional[int]] = {root: None}
    order = [root]
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
                stack.append(y)
    below: Dict[int, Set[int]] = {n: set() for n in adj}
    for n in reversed(order):
        if n in leaf_map:
            below[n].add(leaf_map[n])
        p = parent[n]
        if p is not None:
            below[p] |= below[n]
    sides = []
    for a, b in tree:
        child = b if parent.get(b) == a else a
        sides.append(frozenset(below[child]))
    return sides


def decomposition_width(
    g: EmbeddedGraph, d: Union[Carving, BranchDecomposition]
) -> int:
    """Width of an explicit decomposition, validating its shape first.

    For a carving the width is the largest number of edges crossing a
    tree edge's bipartition of the vertices; loops never cross.  For a
    branch decomposition it is the largest number of vertices incident
    with edges on both sides.  A one leaf tree has width 0.
    """
    if isinstance(d, Carving):
        sides = _leaf_sides(d.tree, d.leaf_map, g.vertices())
        ends = [g.edge_ends(e) for e in g.edge_ids()]
        width = 0
        for side in sides:
            cut = sum(1 for u, v in ends if (u in side) != (v in side))
            width = max(width, cut)
        return width
    if isinstance(d, BranchDecomposition):
        sides = _leaf_sides(d.tree, d.leaf_map, g.edge_ids())
        width = 0
        for side in sides:
            left: Set[int] = set()
            right: Set[int] = set()
            for e in g.edge_ids():
                u, v = g.edge_ends(e)
                if e in side:
                    left.update((u, v))
                else:
                    right.update((u, v))
            width = max(width, len(left & right))
        return width
    raise DomainError("expected a Carving or a BranchDecomposition")


# ----------------------------------------------------------------------
# building optimal decompositions

def _fold_leaves(
    leaves: Sequence[int], nxt: int
) -> Tuple[List[Tuple[int, int]], int]:
    """Caterpillar cubic tree over existing node ids; first and last stay
    degree one, interior leaves hang off fresh internal nodes."""
    if len(leaves) <= 1:
        return [], nxt
    if len(leaves) == 2:
        return [(leaves[0], leaves[1])], nxt
    edges: List[Tuple[int, int]] = []
    prev = leaves[0]
    for x in leaves[1:-1]:
        j = nxt
        nxt += 1
        edges.append((prev, j))
        edges.append((j, x))
        prev = j
    edges.append((prev, leaves[-1]))
    return edges, nxt


def _union_decomposition(parts, cls):
    """Join per-component decompositions into one cubic tree.

    Component joins subdivide an existing tree edge on each side (bare
    single-leaf parts attach directly), so every cross cut separates whole
    components and adds nothing to the width.
    """
    tree: List[Tuple[int, int]] = []
    leaf_map: Dict[int, int] = {}
    nxt = 0
    for part in parts:
        nodes = sorted(set(part.leaf_map) | {x for e in part.tree for x in e})
        ren = {x: nxt + i for i, x in enumerate(nodes)}
        nxt += len(nodes)
        ptree = [(ren[a], ren[b]) for a, b in part.tree]
        pleafs = {ren[a]: v for a, v in part.leaf_map.items()}
        if not leaf_map:
            tree, leaf_map = ptree, pleafs
            continue
        if tree:
            a, b = tree[0]
            ja = nxt
            nxt += 1
            tree[0:1] = [(a, ja), (ja, b)]
        else:
            ja = next(iter(leaf_map))
        if ptree:
            a, b = ptree[0]
            jb = nxt
            nxt += 1
            ptree[0:1] = [(a, jb), (jb, b)]
        else:
            jb = next(iter(pleafs))
        tree += ptree + [(ja, jb)]
        leaf_map.update(pleafs)
    return cls(tuple(tree), leaf_map)


def _brute_carving(g: EmbeddedGraph) -> Carving:
    """Smallest carving by exhaustive search over cubic trees."""
    n = g.n_vertices
    if n > BRUTE_VERTEX_CAP:
        raise SizeCapError(
            f"carving construction fell back to brute force, which caps at "
            f"{BRUTE_VERTEX_CAP} vertices, got {n}"
        )
    verts = sorted(g.vertices())
    if n == 1:
        return Carving((), {0: verts[0]})
    vidx = {v: i for i, v in enumerate(verts)}
    pairs = []
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u != v:
            pairs.append((vidx[u], vidx[v]))
    full = (1 << n) - 1
    cut = [0] * (full + 1)
    for s in range(full + 1):
        cut[s] = sum(1 for u, v in pairs if ((s >> u) & 1) != ((s >> v) & 1))
    best: Optional[int] = None
    best_tree: Tuple[Tuple[int, int], ...] = ()
    for tree in _cubic_trees(n):
        w = 0
        for s in _tree_side_masks(tree, n):
            w = max(w, cut[s])
            if best is not None and w >= best:
                break
        if best is None or w < best:
            best = w
            best_tree = tree
    return Carving(best_tree, {i: verts[i] for i in range(n)})


def _carving_component(g: EmbeddedGraph) -> Carving:
    """Optimal carving of a connected loopless component.

    Repeatedly merges an adjacent pair whose contraction keeps the width,
    as decided by the antipodality fixpoint; unfolding the merges in
    reverse turns each merged leaf into a cherry.  Every cut this builds
    was certified at some stage, so the width never exceeds the target.
    """
    verts = sorted(g.vertices())
    if len(verts) == 1:
        return Carving((), {0: verts[0]})
    if len(verts) == 2:
        return Carving(((0, 1),), {0: verts[0], 1: verts[1]})
    k = _cw_connected(g).width
    merges: List[Tuple[int, int]] = []
    cur = g
    while cur.n_vertices > 2:
        mult: Counter = Counter()
        by_pair: Dict[Tuple[int, int], int] = {}
        for e in sorted(cur.edge_ids()):
            u, v = cur.edge_ends(e)
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            mult[key] += 1
            by_pair.setdefault(key, e)
        degs = {v: cur.degree(v) for v in cur.vertices()}
        cands = sorted(
            (degs[u] + degs[v] - 2 * mult[(u, v)], u, v) for (u, v) in mult
        )
        chosen = None
        for cut_size, u, v in cands:
            if cut_size > k:
                break
            nxt = cur.contract_edge(by_pair[(u, v)]).without_loops()
            if antipodality_decision(nxt, k + 1) is None:
                chosen = (u, v, nxt)
                break
        if chosen is None:
            return _brute_carving(g)
        u, v, cur = chosen
        merges.append((u, v))
    a, b = sorted(cur.vertices())
    tree: List[Tuple[int, int]] = [(0, 1)]
    where = {a: 0, b: 1}
    nxt_id = 2
    for u, v in reversed(merges):
        node = where.pop(min(u, v))
        lu, lv = nxt_id, nxt_id + 1
        nxt_id += 2
        tree.append((node, lu))
        tree.append((node, lv))
        where[u] = lu
        where[v] = lv
    return Carving(tuple(tree), {n: x for x, n in where.items()})


def optimal_carving(g: EmbeddedGraph) -> Carving:
    """An explicit carving achieving the carving width.

    Loops never cross a cut, so they are ignored; components are carved
    separately and joined.  The result is re-validated before return.
    """
    want = carving_width(g)
    core = g.without_loops()
    parts = [_carving_component(core.subgraph(c)) for c in core.components()]
    carving = _union_decomposition(parts, Carving)
    got = decomposition_width(g, carving)
    if got != want:
        raise StructureError(f"built a carving of width {got}, wanted {want}")
    return carving


def _attach_chain(
    tree: List[Tuple[int, int]],
    host_leaf: int,
    chain: List[int],
    nxt: int,
) -> int:
    """Hang a caterpillar of new leaves beside an existing leaf node."""
    at = None
    for i, (a, b) in enumerate(tree):
        if host_leaf in (a, b):
            at = i
            break
    if at is None:
        anchor = host_leaf
    else:
        a, b = tree[at]
        anchor = nxt
        nxt += 1
        tree[at : at + 1] = [(a, anchor), (anchor, b)]
    grown, nxt = _fold_leaves([anchor] + chain, nxt)
    tree.extend(grown)
    return nxt


def _branch_component(c: EmbeddedGraph) -> BranchDecomposition:
    """Optimal branch decomposition of one connected component.

    The loopless skeleton rides on an optimal carving of its medial,
    whose vertices stand for the skeleton's edges; loops hang in chains
    beside a leaf carrying an edge at their vertex, for an extra order
    of at most two, matching how loops enter the width.
    """
    s = c.without_loops()
    loops = sorted(c.loops())
    if s.n_edges == 0:
        if len(loops) == 1:
            return BranchDecomposition((), {0: loops[0]})
        tree, _ = _fold_leaves(list(range(len(loops))), len(loops))
        return BranchDecomposition(tuple(tree), dict(enumerate(loops)))
    if s.n_edges == 1:
        base_tree: List[Tuple[int, int]] = []
        leaf_map = {0: sorted(s.edge_ids())[0]}
    else:
        med = medial(s)
        carv = _carving_component(med.medial.without_loops())
        base_tree = list(carv.tree)
        leaf_map = {
            n: med.edge_of_vertex[mv] for n, mv in carv.leaf_map.items()
        }
    if loops:
        by_vertex: Dict[int, List[int]] = {}
        for l in loops:
            by_vertex.setdefault(c.edge_ends(l)[0], []).append(l)
        skeleton = set(s.edge_ids())
        nxt = max(set(leaf_map) | {x for e in base_tree for x in e}) + 1
        for x in sorted(by_vertex):
            host = min(
                n
                for n, e in leaf_map.items()
                if e in skeleton and x in s.edge_ends(e)
            )
            chain = []
            for l in sorted(by_vertex[x]):
                leaf_map[nxt] = l
                chain.append(nxt)
                nxt += 1
            nxt = _attach_chain(base_tree, host, chain, nxt)
    return BranchDecomposition(tuple(base_tree), leaf_map)


def optimal_branch_decomposition(g: EmbeddedGraph) -> BranchDecomposition:
    """An explicit branch decomposition achieving the branch width."""
    want = branch_width(g)
    parts = []
    for comp in g.components():
        c = g.subgraph(comp)
        if c.n_edges:
            parts.append(_branch_component(c))
    if not parts:
        raise DomainError("a branch decomposition needs at least one edge")
    dec = _union_decomposition(parts, BranchDecomposition)
    got = decomposition_width(g, dec)
    if got != want:
        raise StructureError(f"built a decomposition of width {got}, wanted {want}")
    return dec


# ----------------------------------------------------------------------
# brute force oracles over all cubic trees

def _cubic_trees(n: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """All unrooted cubic trees with leaves 0..n-1, one edge list each.

    Built by inserting leaf i into every edge of every smaller tree, so
    the count is 1*3*5*...*(2n-5).  Internal nodes get ids from n up.
    """
    if n < 1:
        return
    if n == 1:
        yield ()
        return

    def grow(edges: List[Tuple[int, int]], leaf: int, nxt: int):
        if leaf == n:
            yield tuple(edges)
            return
        for i in range(len(edges)):
            a, b = edges[i]
            rest = edges[:i] + edges[i + 1 :] + [(a, nxt), (nxt, b), (nxt, leaf)]
            yield from grow(rest, leaf + 1, nxt + 1)

    yield from grow([(0, 1)], 2, n)


def _tree_side_masks(edges: Tuple[Tuple[int, int], ...], n_leaves: int) -> List[int]:
    """Bitmask of leaves on one side of each tree edge, in edge order."""
    adj: Dict[int, List[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    root = edges[0][0]
    parent: Dict[int, Optional[int]] = {root: None}
    order = [root]
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
                stack.append(y)
    mask = {n: (1 << n) if n < n_leaves else 0 for n in adj}
    for n in reversed(order):
        p = parent[n]
        if p is not None:
            mask[p] |= mask[n]
    return [mask[b if parent.get(b) == a else a] for a, b in edges]


def bw_bruteforce(g: EmbeddedGraph) -> int:
    """Exact branch width by trying every cubic tree over the edges."""
    m = g.n_edges
    if m > BRUTE_EDGE_CAP:
        raise SizeCapError(f"brute force branch width caps at {BRUTE_EDGE_CAP} edges, got {m}")
    if m <= 1:
        return 0
    eids = sorted(g.edge_ids())
    vidx = {v: i for i, v in enumerate(sorted(g.vertices()))}
    endmask = []
    for e in eids:
        u, v = g.edge_ends(e)
        endmask.append((1 << vidx[u]) | (1 << vidx[v]))
    full = (1 << m) - 1
    # span[S] = vertices touched by the edge subset S, as a bitmask
    span = [0] * (full + 1)
    for s in range(1, full + 1):
        low = s & -s
        span[s] = span[s ^ low] | endmask[low.bit_length() - 1]
    best = m + 1
    for tree in _cubic_trees(m):
        w = 0
        for s in _tree_side_masks(tree, m):
            w = max(w, bin(span[s] & span[full ^ s]).count("1"))
            if w >= best:
                break
        best = min(best, w)
    return best


def cw_bruteforce(g: EmbeddedGraph) -> int:
    """Exact carving width by trying every cubic tree over the vertices."""
    n = g.n_vertices
    if n > BRUTE_VERTEX_CAP:
        raise SizeCapError(f"brute force carving width caps at {BRUTE_VERTEX_CAP} vertices, got {n}")
    if n <= 1:
        return 0
    vidx = {v: i for i, v in enumerate(sorted(g.vertices()))}
    pairs = []
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u != v:
            pairs.append((vidx[u], vidx[v]))
    full = (1 << n) - 1
    cut = [0] * (full + 1)
    for s in range(full + 1):
        c = 0
        for u, v in pairs:
            if ((s >> u) & 1) != ((s >> v) & 1):
                c += 1
        cut[s] = c
    best = None
    for tree in _cubic_trees(n):
        w = 0
        for s in _tree_side_masks(tree, n):
            w = max(w, cut[s])
            if best is not None and w >= best:
                break
        if best is None or w < best:
            best = w
    assert best is not None
    return best


# ----------------------------------------------------------------------
# dual distance machinery

def _dual_distances(g: EmbeddedGraph) -> List[List[int]]:
    """All pairs unit distance matrix between faces, across shared edges."""
    nf = len(g.faces())
    adj: List[List[int]] = [[] for _ in range(nf)]
    for e in g.edge_ids():
        a, b = g.dual_sides(e)
        adj[a].append(b)
        adj[b].append(a)
    dist = []
    for src in range(nf):
        row = [-1] * nf
        row[src] = 0
        q = deque([src])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if row[y] < 0:
                    row[y] = row[x] + 1
                    q.append(y)
        dist.append(row)
    return dist


def shortest_closed_dual_walk_through(
    g: EmbeddedGraph, e1: int, e2: int, _dist: Optional[List[List[int]]] = None
) -> int:
    """Length of the shortest closed walk in the face adjacency graph
    that crosses both e1 and e2.

    Such a walk decomposes into the two crossings plus two face paths
    joining their sides, so the minimum is 2 plus the better of the two
    pairings of endpoints.
    """
    if e1 == e2:
        raise DomainError("need two distinct edges")
    if not g.is_connected():
        raise DomainError("dual walks need a connected host")
    d = _dist if _dist is not None else _dual_distances(g)
    a1, b1 = g.dual_sides(e1)
    a2, b2 = g.dual_sides(e2)
    return 2 + min(d[a1][a2] + d[b1][b2], d[a1][b2] + d[b1][a2])


# ----------------------------------------------------------------------
# antipodalities

@dataclass(eq=False)
class Antipodality:
    """A witness that every carving of ``host`` has a cut of size at
    least ``range_k``.

    Each edge e carries a subgraph (vertex set plus edge set) that stays
    away from e; each face carries a nonempty vertex set.  The defining
    conditions are checked by :func:`validate_antipodality`.
    """

    host: EmbeddedGraph
    range_k: int
    edge_vertices: Dict[int, FrozenSet[int]]
    edge_edges: Dict[int, FrozenSet[int]]
    face_vertices: Dict[int, FrozenSet[int]]

    def to_json(self) -> str:
        payload = {
            "range": self.range_k,
            "edges": {
                str(e): {
                    "vertices": sorted(self.edge_vertices[e]),
                    "edges": sorted(self.edge_edges[e]),
                }
                for e in sorted(self.edge_vertices)
            },
            "faces": {str(f): sorted(vs) for f, vs in self.face_vertices.items()},
        }
        return json.dumps(payload, sort_keys=True)


def _subgraph_components(
    g: EmbeddedGraph, vs: Iterable[int], es: Iterable[int]
) -> List[Set[int]]:
    """Connected components, as vertex sets, of the subgraph (vs, es)."""
    adj: Dict[int, List[int]] = {v: [] for v in vs}
    for e in es:
        u, v = g.edge_ends(e)
        adj[u].append(v)
        adj[v].append(u)
    comps: List[Set[int]] = []
    seen: Set[int] = set()
    for s in adj:
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def validate_antipodality(a: Antipodality) -> None:
    """Check every defining condition from scratch; raise on failure.

    Conditions, for range k: (1) alpha(e) is a nonempty subgraph that
    avoids both ends of e; (2) for each face f on either side of e,
    alpha(f) is a nonempty subset of V(alpha(e)) and every component of
    alpha(e) meets alpha(f); (3) any edge listed in alpha(e) admits no
    closed dual walk through both edges shorter than k.
    """
    g = a.host
    k = a.range_k
    eset = set(g.edge_ids())
    fset = {f.id for f in g.faces()}
    if set(a.edge_vertices) != eset or set(a.edge_edges) != eset:
        raise StructureError("antipodality does not cover every edge")
    if set(a.face_vertices) != fset:
        raise StructureError("antipodality does not cover every face")
    dist = _dual_distances(g)
    for e in sorted(eset):
        vs = a.edge_vertices[e]
        if not vs:
            raise StructureError(f"alpha({e}) has no vertices")
        u, v = g.edge_ends(e)
        if u in vs or v in vs:
            raise StructureError(f"alpha({e}) touches an end of edge {e}")
        for e2 in sorted(a.edge_edges[e]):
            x, y = g.edge_ends(e2)
            if x not in vs or y not in vs:
                raise StructureError(f"alpha({e}) lists edge {e2} without its ends")
            w = shortest_closed_dual_walk_through(g, e, e2, dist)
            if w < k:
                raise StructureError(
                    f"edges {e} and {e2} admit a closed dual walk of length {w} < {k}"
                )
    for f in sorted(fset):
        if not a.face_vertices[f]:
            raise StructureError(f"alpha(face {f}) is empty")
    for e in sorted(eset):
        comps = _subgraph_components(g, a.edge_vertices[e], a.edge_edges[e])
        for f in set(g.dual_sides(e)):
            fv = a.face_vertices[f]
            if not fv <= a.edge_vertices[e]:
                raise StructureError(f"alpha(face {f}) leaves alpha(edge {e})")
            for comp in comps:
                if not comp & fv:
                    raise StructureError(
                        f"a component of alpha({e}) misses alpha(face {f})"
                    )


def antipodality_decision(
    g: EmbeddedGraph,
    k: int,
    _dist: Optional[List[List[int]]] = None,
    _seed: Optional[Antipodality] = None,
) -> Optional[Antipodality]:
    """Find an antipodality of range k in a connected plane host, or None.

    Starts from the largest candidate family (everything allowed by the
    local conditions) and alternately shrinks face sets to the common
    vertices of their incident edge subgraphs and drops subgraph
    components that miss some incident face set.  Any valid family is
    contained in every iterate, so reaching a fixpoint with no empty
    part is both sound and complete.  A previously found antipodality of
    lower range may be passed as a seed; pruning then resumes from it.
    """
    if g.n_vertices < 2:
        raise DomainError("antipodality needs at least 2 vertices")
    if not g.is_connected():
        raise DomainError("antipodality needs a connected host")
    if g.surface != SPHERE:
        raise DomainError("antipodality needs a plane embedding")
    dist = _dist if _dist is not None else _dual_distances(g)
    eids = sorted(g.edge_ids())
    ends = {e: g.edge_ends(e) for e in eids}
    allv = set(g.vertices())
    ev: Dict[int, Set[int]] = {}
    ee: Dict[int, Set[int]] = {}
    fv: Dict[int, Set[int]] = {}
    if _seed is None:
        for e in eids:
            u, v = ends[e]
            ev[e] = allv - {u, v}
            far: Set[int] = set()
            for e2 in eids:
                x, y = ends[e2]
                if e2 == e or x in (u, v) or y in (u, v):
                    continue
                if shortest_closed_dual_walk_through(g, e, e2, dist) >= k:
                    far.add(e2)
            ee[e] = far
        for f in g.faces():
            fv[f.id] = set(allv)
    else:
        # a fixpoint for a smaller range contains every valid family for
        # this one, so re-filtering its edges and re-pruning is complete
        for e in eids:
            ev[e] = set(_seed.edge_vertices[e])
            ee[e] = {
                e2
                for e2 in _seed.edge_edges[e]
                if shortest_closed_dual_walk_through(g, e, e2, dist) >= k
            }
        fv = {f: set(vs) for f, vs in _seed.face_vertices.items()}
    sides = {e: tuple(sorted(set(g.dual_sides(e)))) for e in eids}
    incident: Dict[int, List[int]] = {f: [] for f in fv}
    for e in eids:
        for f in sides[e]:
            incident[f].append(e)
    changed = True
    while changed:
        changed = False
        for f in sorted(fv):
            cur = fv[f]
            for e in incident[f]:
                cur = cur & ev[e]
            if cur != fv[f]:
                if not cur:
                    return None
                fv[f] = cur
                changed = True
        for e in eids:
            keep: Set[int] = set()
            for comp in _subgraph_components(g, ev[e], ee[e]):
                if all(comp & fv[f] for f in sides[e]):
                    keep |= comp
            if keep != ev[e]:
                if not keep:
                    return None
                ev[e] = keep
                ee[e] = {
                    e2 for e2 in ee[e] if ends[e2][0] in keep and ends[e2][1] in keep
                }
                changed = True
    found = Antipodality(
        g,
        k,
        {e: frozenset(s) for e, s in ev.items()},
        {e: frozenset(s) for e, s in ee.items()},
        {f: frozenset(s) for f, s in fv.items()},
    )
    validate_antipodality(found)
    return found


# ----------------------------------------------------------------------
# carving width

@dataclass(eq=False)
class CarvingWidth:
    """Carving width together with the lower bound certificate: either
    ("degree", v) naming a vertex of that degree, an Antipodality of
    that range, or None when the width is 0."""

    width: int
    witness: object

    def __int__(self) -> int:
        return self.width


def carving_width_witness(g: EmbeddedGraph) -> CarvingWidth:
    """Carving width of a plane multigraph, with a matching certificate.

    Loops never cross a carving cut, so they are removed up front; the
    value is the maximum over connected components.  Within a component
    the scan starts at the maximum degree, which every carving must pay
    at the leaf cut, and climbs while an antipodality one higher exists.
    """
    for _, surf in g.component_surfaces():
        if surf != SPHERE:
            raise DomainError("carving width needs a plane embedding")
    core = g.without_loops()
    best = CarvingWidth(0, None)
    for comp in core.components():
        if len(comp) < 2:
            continue
        res = _cw_connected(core.subgraph(comp))
        if res.width > best.width:
            best = res
    return best


def carving_width(g: EmbeddedGraph) -> int:
    return carving_width_witness(g).width


def _cw_connected(g: EmbeddedGraph) -> CarvingWidth:
    # host is loopless, connected, and has at least 2 vertices
    degs = {v: g.degree(v) for v in sorted(g.vertices())}
    vmax = max(degs, key=lambda v: degs[v])
    k = degs[vmax]
    wit: object = ("degree", vmax)
    dist = _dual_distances(g)
    seed: Optional[Antipodality] = None
    cap = 2 * g.n_edges + 1
    while k <= cap:
        a = antipodality_decision(g, k + 1, _dist=dist, _seed=seed)
        if a is None:
            return CarvingWidth(k, wit)
        k += 1
        wit = a
        seed = a
    raise StructureError("carving width scan exceeded the cut size bound")


# ----------------------------------------------------------------------
# branch width

def branch_width(g: EmbeddedGraph) -> int:
    """Branch width of a plane multigraph.

    The value is the maximum over connected components.  A component
    with at most one edge has width 0; one with at most 4 edges goes to
    the brute force oracle; otherwise loops are dropped (a loop leaf can
    sit next to any other edge at its vertex for separation order at
    most 2, so it never raises the width beyond max(width, 1)) and the
    width is half the carving width of the medial, which is always even.
    """
    for _, surf in g.component_surfaces():
        if surf != SPHERE:
            raise DomainError("branch width needs a plane embedding")
    width = 0
    for comp in g.components():
        width = max(width, _bw_component(g.subgraph(comp)))
    return width


def _bw_component(c: EmbeddedGraph) -> int:
    if c.n_edges <= 1:
        return 0
    if c.n_edges <= 4:
        return bw_bruteforce(c)
    s = c.without_loops()
    if s.n_edges == 0:
        return 1
    if s.n_edges <= 4:
        base = bw_bruteforce(s)
    else:
        med = medial(s).medial
        w = carving_width(med)
        if w % 2:
            raise StructureError("carving width of a medial must be even")
        base = w // 2
    if s.n_edges == c.n_edges:
        return base
    if base >= 2:
        return base
    # loops on a width-one skeleton: width stays 1 only when one vertex
    # carries every loop and meets every remaining edge, since otherwise
    # some edge leaf cut covers both of its ends
    loop_at = {u for e in c.edge_ids()
               for u, v in [c.edge_ends(e)] if u == v}
    centers = None
    for e in s.edge_ids():
        ends = set(s.edge_ends(e))
        centers = ends if centers is None else centers & ends
    if len(loop_at) == 1 and centers and loop_at <= centers:
        return 1
    return 2


# ----------------------------------------------------------------------
# antipodalities of covers

def _has_bridge(g: EmbeddedGraph) -> bool:
    """Whether some edge disconnects its component when removed.

    Parallel edges and loops are never bridges; the search walks half
    of each nonloop edge once, tracking lowpoints iteratively.
    """
    adj: Dict[int, List[Tuple[int, int]]] = {v: [] for v in g.vertices()}
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        if u != v:
            adj[u].append((e, v))
            adj[v].append((e, u))
    idx: Dict[int, int] = {}
    low: Dict[int, int] = {}
    count = 0
    for root in sorted(adj):
        if root in idx:
            continue
        idx[root] = low[root] = count
        count += 1
        stack: List[Tuple[int, Optional[int], int, int]] = [(root, None, -1, 0)]
        while stack:
            v, par, pe, i = stack.pop()
            if i < len(adj[v]):
                stack.append((v, par, pe, i + 1))
                e, w = adj[v][i]
                if e == pe:
                    continue
                if w in idx:
                    if idx[w] < low[v]:
                        low[v] = idx[w]
                else:
                    idx[w] = low[w] = count
                    count += 1
                    stack.append((w, v, e, 0))
            else:
                if par is not None:
                    if low[v] > idx[par]:
                        return True
                    if low[v] < low[par]:
                        low[par] = low[v]
    return False


def build_cover_antipodality(dc: DoubleCover, med: MedialGraph, k: int) -> Antipodality:
    """Antipodality of range 4k in the medial of a double cover.

    Requires k >= 2, a loopless bridgeless cover, and a base whose
    noncontractible curves all meet it at least k times.  Every medial
    face bounds a cycle; the subgraph for the medial edge at the angle
    (v, f) is the union of the cycles around the deck partners of v and
    f, and the vertex set for a medial face is the cycle around the
    deck partner of its origin.  The result is validated before return.
    """
    if k < 2:
        raise DomainError("cover antipodality needs range parameter at least 2")
    if med.base is not dc.cover:
        raise DomainError("medial graph was not built from the given cover")
    cover = dc.cover
    if cover.loops():
        raise DomainError("cover has a loop")
    if _has_bridge(cover):
        raise DomainError("cover has a bridge")
    if representativity(dc.base) < k:
        raise DomainError(f"base representativity is below {k}")
    m = med.medial
    face_of_origin = {origin: fid for fid, origin in med.face_origin.items()}
    cyc_v: Dict[int, FrozenSet[int]] = {}
    cyc_e: Dict[int, FrozenSet[int]] = {}
    for f in m.faces():
        vs = m.face_boundary_vertices(f)
        es = m.face_boundary_edges(f)
        if len(set(vs)) != len(vs) or len(set(es)) != len(es):
            raise StructureError("a medial face does not bound a cycle")
        cyc_v[f.id] = frozenset(vs)
        cyc_e[f.id] = frozenset(es)
    pair_of_edge: Dict[Tuple[int, int], int] = {}
    for a in m.edge_ids():
        v, f = angle_of_medial_edge(cover, a)
        if (v, f) in pair_of_edge:
            raise DomainError("two medial edges share a vertex face angle")
        pair_of_edge[(v, f)] = a
    ev: Dict[int, FrozenSet[int]] = {}
    ee: Dict[int, FrozenSet[int]] = {}
    for (v, f), a in pair_of_edge.items():
        pv = face_of_origin[("V", DoubleCover.deck_vertex(v))]
        pf = face_of_origin[("F", dc.deck_face(f))]
        ev[a] = cyc_v[pv] | cyc_v[pf]
        ee[a] = cyc_e[pv] | cyc_e[pf]
    fv: Dict[int, FrozenSet[int]] = {}
    for fid, origin in med.face_origin.items():
        kind, x = origin
        if kind == "V":
            partner = ("V", DoubleCover.deck_vertex(x))
        else:
            partner = ("F", dc.deck_face(x))
        fv[fid] = cyc_v[face_of_origin[partner]]
    found = Antipodality(m, 4 * k, ev, ee, fv)
    validate_antipodality(found)
    return found


# ----------------------------------------------------------------------
# minor minimality certification

@dataclass(eq=False)
class MinorMinimalityReport:
    """Outcome of checking that a plane graph has the stated branch
    width while every single edge deletion or contraction lowers it.
    ``entries`` holds (edge, op, width of that minor) for every edge."""

    ok: bool
    width: int
    target: int
    entries: Tuple[Tuple[int, str, int], ...]

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> str:
        payload = {
            "ok": self.ok,
            "width": self.width,
            "target": self.target,
            "minors": [
                {"edge": e, "op": op, "width": w} for e, op, w in self.entries
            ],
        }
        return json.dumps(payload, sort_keys=True)


def worker_count() -> int:
    """Worker pool size from BRANCHFORGE_THREADS; 1 means run serial."""
    raw = os.environ.get("BRANCHFORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"BRANCHFORGE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _minor_width_task(args: Tuple[str, int, str]) -> Tuple[int, str, int]:
    text, e, op = args
    g = parse_rot(text)
    minor = g.delete_edge(e) if op == "delete" else g.contract_edge(e)
    return (e, op, branch_width(minor))


def map_tasks(fn, args_list):
    """Run tasks serially or on a process pool, keeping input order."""
    n = worker_count()
    if n <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, args_list))


def certify_minor_minimal_bw(g: EmbeddedGraph, b: int) -> MinorMinimalityReport:
    """Check branch width b and strict decrease under every minor step.

    Contracting a loop means deleting it, so loop entries repeat under
    both ops; that keeps the report exhaustive over (edge, op) pairs.
    """
    if b < 1:
        raise DomainError("target width must be at least 1")
    base = branch_width(g)
    text = write_rot(g)
    tasks = [
        (text, e, op) for e in sorted(g.edge_ids()) for op in ("delete", "contract")
    ]
    entries = map_tasks(_minor_width_task, tasks)
    ok = base == b and all(w < b for _, _, w in entries)
    return MinorMinimalityReport(ok, base, b, tuple(entries))


# ----------------------------------------------------------------------
# exhaustive cross-check suites

ProgressFn = Optional[Callable[[int, int], None]]


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one exhaustive fast-vs-brute sweep."""

    suite: str
    checked: int
    mismatches: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _mismatch(fast: int, slow: int, g: EmbeddedGraph) -> str:
    return f"fast {fast} != brute {slow} on\n{write_rot(g)}"


def oracle_carving_suite(
    max_vertices: int = 6, max_edges: int = 9, progress: ProgressFn = None
) -> OracleReport:
    """Fixpoint carving width against the cubic-tree value, one plane
    embedding per connected planar multigraph within the caps."""
    from .atlas import plane_multigraph_classes

    classes = plane_multigraph_classes(max_vertices, max_edges)
    bad: List[str] = []
    for i, g in enumerate(classes):
        fast = carving_width(g)
        slow = cw_bruteforce(g)
        if fast != slow:
            bad.append(_mismatch(fast, slow, g))
        if progress is not None:
            progress(i + 1, len(classes))
    return OracleReport("carving", len(classes), tuple(bad))


def oracle_medial_suite(
    min_edges: int = 2, max_edges: int = 7, progress: ProgressFn = None
) -> OracleReport:
    """Doubled brute-force branch width against the carving width of the
    medial, over every embedding of every connected simple plane graph
    in the edge range."""
    from .atlas import enumerate_embedded

    embs = [
        g
        for g in enumerate_embedded(max_edges, None, SPHERE, simple=True)
        if g.n_edges >= min_edges
    ]
    bad: List[str] = []
    for i, g in enumerate(embs):
        fast = carving_width(medial(g).medial)
        slow = 2 * bw_bruteforce(g)
        if fast != slow:
            bad.append(_mismatch(fast, slow, g))
        if progress is not None:
            progress(i + 1, len(embs))
    return OracleReport("medial", len(embs), tuple(bad))


def oracle_representativity_suite(
    max_edges: int = 8, progress: ProgressFn = None
) -> OracleReport:
    """Dual-walk representativity against exhaustive noose search, over
    every projective embedding of a connected simple graph within the
    edge cap."""
    from .atlas import enumerate_embedded

    embs = enumerate_embedded(max_edges, None, PROJECTIVE, simple=True)
    bad: List[str] = []
    for i, g in enumerate(embs):
        fast = representativity(g)
        slow = representativity_bruteforce(g, cap=2 * max_edges)
        if fast != slow:
            bad.append(_mismatch(fast, slow, g))
        if progress is not None:
            progress(i + 1, len(embs))
    return OracleReport("representativity", len(embs), tuple(bad))


# ----------------------------------------------------------------------
# reading certificates back

def decomposition_from_json(text: str) -> Union[Carving, BranchDecomposition]:
    """Parse a serialized carving or branch decomposition."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"certificate is not valid JSON: {exc}") from None
    kind = payload.get("kind")
    if kind not in ("carving", "branch"):
        raise StructureError(f"unknown certificate kind {kind!r}")
    try:
        tree = tuple((int(a), int(b)) for a, b in payload["tree"])
        leaf_map = {int(n): int(x) for n, x in payload["leaves"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed decomposition payload: {exc}") from None
    cls = Carving if kind == "carving" else BranchDecomposition
    return cls(tree, leaf_map)


def antipodality_from_json(host: EmbeddedGraph, text: str) -> Antipodality:
    """Parse a serialized antipodality against its host embedding."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"certificate is not valid JSON: {exc}") from None
    try:
        k = int(payload["range"])
        ev = {
            int(e): frozenset(int(v) for v in d["vertices"])
            for e, d in payload["edges"].items()
        }
        ee = {
            int(e): frozenset(int(x) for x in d["edges"])
            for e, d in payload["edges"].items()
        }
        fv = {
            int(f): frozenset(int(v) for v in vs)
            for f, vs in payload["faces"].items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed antipodality payload: {exc}") from None
    return Antipodality(host, k, ev, ee, fv)
