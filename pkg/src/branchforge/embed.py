"""Embedded multigraphs on the sphere and in the projective plane.

An embedding is stored as a signed rotation system.  Every vertex carries the
clockwise cyclic order of its incident half-edges, and every edge carries a
sign: +1 when a traveller crossing the edge keeps its local sense of rotation,
-1 when the edge reverses it.  Edge e owns the two half-edges 2e and 2e+1,
with half 2e incident to the first endpoint and half 2e+1 to the second.

Faces, duals and all surgery operations are driven by an internal flag
structure.  A flag is one quarter of an edge: half-edge h together with a side
bit s, packed as the integer (h << 1) | s.  Side 1 of h lies in the corner
between h and the next half-edge clockwise; side 0 lies in the corner before
h.  Three fixed-point-free involutions act on flags:

    t2: toggle the side bit                        (same vertex, same edge)
    t1: move to the other flag of the same corner  (same vertex, same face)
    t0: cross the edge; positive edges toggle the
        side bit, negative edges keep it           (same edge, same face)

Vertices are the orbits of <t1, t2>, edges the orbits of <t0, t2>, faces the
orbits of <t0, t1>.  Composing t0 then t1 walks the directed boundary of a
face; every face consists of exactly two such directed walks, one for each
sense of traversal.

Supported closed surfaces are the sphere ("S", Euler characteristic 2) and
the projective plane ("P", Euler characteristic 1).  Each component must be
cellularly embedded; a component with the wrong characteristic is rejected.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

SPHERE = "S"
PROJECTIVE = "P"


class GraphError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(GraphError):
    """The data does not describe a valid embedded graph."""


class DomainError(GraphError):
    """The graph is valid but outside the domain of the requested operation."""


class SizeCapError(GraphError):
    """An exhaustive routine was asked to run above its size cap."""


def mate(h: int) -> int:
    """The other half-edge of the same edge."""
    return h ^ 1


def edge_of(h: int) -> int:
    """The edge owning half-edge h."""
    return h >> 1


def _flag(h: int, s: int) -> int:
    return (h << 1) | s


def _half(flag: int) -> int:
    return flag >> 1


def _side(flag: int) -> int:
    return flag & 1


@dataclass(frozen=True)
class Face:
    """One face of an embedding.

    ``flags`` is one of the two directed boundary walks, the one containing
    the smallest flag of the face, rotated to start there.  Its length equals
    the number of edge sides on the boundary.
    """

    id: int
    flags: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.flags)

    def __repr__(self) -> str:
        return f"Face(id={self.id}, length={self.length})"


class EmbeddedGraph:
    """A multigraph with a fixed cellular embedding, given by rotations and signs.

    Parameters
    ----------
    surface:
        "S", "P", or None.  None derives the surface from the data; a given
        tag is checked against the derived one.
    edges:
        dict mapping edge id (non-negative int) to (u, v, sign).  Half-edge
        2e must appear in the rotation of u, half-edge 2e+1 in the rotation
        of v.  sign is +1 or -1.
    rotations:
        dict mapping vertex id to the clockwise tuple of its half-edges.
        Vertices with no edges have an empty tuple.

    Instances are immutable; every surgery returns a new graph.
    """

    __slots__ = (
        "_surface",
        "_edges",
        "_rot",
        "_vertex_of_half",
        "_sigma",
        "_sigma_inv",
        "_faces",
        "_face_of_flag",
        "_components",
        "_gem_cache",
        "_canon_cache",
    )

    def __init__(
        self,
        surface: Optional[str],
        edges: Dict[int, Tuple[int, int, int]],
        rotations: Dict[int, Sequence[int]],
        validate: bool = True,
    ) -> None:
        self._edges: Dict[int, Tuple[int, int, int]] = {
            int(e): (u, v, s) for e, (u, v, s) in edges.items()
        }
        self._rot: Dict[int, Tuple[int, ...]] = {
            v: tuple(r) for v, r in rotations.items()
        }
        self._faces: Optional[Tuple[Face, ...]] = None
        self._face_of_flag: Optional[Dict[int, int]] = None
        self._components: Optional[Tuple[FrozenSet[int], ...]] = None
        self._gem_cache = None
        self._canon_cache = None

        self._vertex_of_half: Dict[int, int] = {}
        self._sigma: Dict[int, int] = {}
        self._sigma_inv: Dict[int, int] = {}
        for v, rot in self._rot.items():
            for i, h in enumerate(rot):
                if h in self._vertex_of_half:
                    raise StructureError(f"half-edge {h} placed twice")
                self._vertex_of_half[h] = v
                nxt = rot[(i + 1) % len(rot)]
                self._sigma[h] = nxt
                self._sigma_inv[nxt] = h

        if validate:
            self._check_structure()
        derived = self._derive_surface()
        if surface is None:
            self._surface = derived
        else:
            if surface not in (SPHERE, PROJECTIVE):
                raise StructureError(f"unknown surface tag {surface!r}")
            if validate and surface != derived:
                raise StructureError(
                    f"surface tag {surface} does not match embedding ({derived})"
                )
            self._surface = surface

    # ------------------------------------------------------------------
    # validation and surface derivation

    def _check_structure(self) -> None:
        seen_halves = set(self._vertex_of_half)
        want = set()
        for e, (u, v, s) in self._edges.items():
            if e < 0:
                raise StructureError(f"negative edge id {e}")
            if s not in (1, -1):
                raise StructureError(f"edge {e} has sign {s}, expected +1 or -1")
            if u not in self._rot or v not in self._rot:
                raise StructureError(f"edge {e} joins unknown vertex")
            if self._vertex_of_half.get(2 * e) != u:
                raise StructureError(f"half-edge {2 * e} must sit at vertex {u}")
            if self._vertex_of_half.get(2 * e + 1) != v:
                raise StructureError(f"half-edge {2 * e + 1} must sit at vertex {v}")
            want.add(2 * e)
            want.add(2 * e + 1)
        if seen_halves != want:
            stray = sorted(seen_halves - want)[:4]
            raise StructureError(f"rotations mention half-edges of no edge: {stray}")

    def _derive_surface(self) -> str:
        projective_seen = False
        for comp in self.components():
            chi = self._component_chi(comp)
            if chi == 2:
                continue
            if chi == 1:
                if projective_seen:
                    raise StructureError("two components need a crosscap each")
                projective_seen = True
            else:
                raise StructureError(
                    f"component has Euler characteristic {chi}; only the sphere "
                    f"(2) and the projective plane (1) are supported"
                )
        return PROJECTIVE if projective_seen else SPHERE

    def _component_chi(self, comp: FrozenSet[int]) -> int:
        ne = 0
        for v in comp:
            ne += len(self._rot[v])
        ne //= 2
        if ne == 0:
            # a bare vertex sits in a disk of whatever surface hosts it
            return 2
        nf = 0
        fof = self.face_map()
        seen = set()
        for v in comp:
            for h in self._rot[v]:
                for s in (0, 1):
                    f = fof[_flag(h, s)]
                    if f not in seen:
                        seen.add(f)
                        nf += 1
        return len(comp) - ne + nf

    def is_balanced(self) -> bool:
        """True when every cycle has positive sign product.

        Balanced systems describe orientable surfaces, so this agrees with
        the surface tag: sphere components are balanced, projective ones not.
        """
        pot: Dict[int, int] = {}
        adj: Dict[int, List[Tuple[int, int]]] = {v: [] for v in self._rot}
        for e, (u, v, s) in self._edges.items():
            if u == v:
                if s < 0:
                    return False
                continue
            adj[u].append((v, s))
            adj[v].append((u, s))
        for root in self._rot:
            if root in pot:
                continue
            pot[root] = 0
            stack = [root]
            while stack:
                x = stack.pop()
                for y, s in adj[x]:
                    p = pot[x] ^ (1 if s < 0 else 0)
                    if y not in pot:
                        pot[y] = p
                        stack.append(y)
                    elif pot[y] != p:
                        return False
        return True

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def surface(self) -> str:
        return self._surface

    @property
    def n_vertices(self) -> int:
        return len(self._rot)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self._rot))

    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self._edges))

    def edge_ends(self, e: int) -> Tuple[int, int]:
        u, v, _ = self._edges[e]
        return u, v

    def sign(self, e: int) -> int:
        return self._edges[e][2]

    def rotation(self, v: int) -> Tuple[int, ...]:
        return self._rot[v]

    def degree(self, v: int) -> int:
        return len(self._rot[v])

    def vertex_of_half(self, h: int) -> int:
        return self._vertex_of_half[h]

    def next_half(self, h: int) -> int:
        """Next half-edge clockwise at the same vertex."""
        return self._sigma[h]

    def prev_half(self, h: int) -> int:
        return self._sigma_inv[h]

    def half_edges(self) -> Tuple[int, ...]:
        return tuple(sorted(self._vertex_of_half))

    def loops(self) -> Tuple[int, ...]:
        return tuple(sorted(e for e, (u, v, _) in self._edges.items() if u == v))

    def max_degree(self) -> int:
        return max((len(r) for r in self._rot.values()), default=0)

    def __repr__(self) -> str:
        return (
            f"EmbeddedGraph(surface={self._surface!r}, "
            f"n={self.n_vertices}, m={self.n_edges})"
        )

    # ------------------------------------------------------------------
    # flags and faces

    def flags(self) -> List[int]:
        out = []
        for h in self._vertex_of_half:
            out.append(_flag(h, 0))
            out.append(_flag(h, 1))
        out.sort()
        return out

    def _t0(self, flag: int) -> int:
        h, s = _half(flag), _side(flag)
        if self._edges[edge_of(h)][2] > 0:
            return _flag(mate(h), s ^ 1)
        return _flag(mate(h), s)

    def _t1(self, flag: int) -> int:
        h, s = _half(flag), _side(flag)
        if s == 1:
            return _flag(self._sigma[h], 0)
        return _flag(self._sigma_inv[h], 1)

    @staticmethod
    def _t2(flag: int) -> int:
        return flag ^ 1

    def _gem(self):
        """Flag set with its three involutions, as dicts."""
        if self._gem_cache is None:
            flags = self.flags()
            t0 = {f: self._t0(f) for f in flags}
            t1 = {f: self._t1(f) for f in flags}
            t2 = {f: f ^ 1 for f in flags}
            self._gem_cache = (flags, t0, t1, t2)
        return self._gem_cache

    def faces(self) -> Tuple[Face, ...]:
        """All faces, ids assigned in order of their smallest flag."""
        if self._faces is None:
            self._trace_faces()
        return self._faces

    def face_map(self) -> Dict[int, int]:
        """Map from every flag to the id of its face."""
        if self._face_of_flag is None:
            self._trace_faces()
        return self._face_of_flag

    def face_of_flag(self, flag: int) -> int:
        return self.face_map()[flag]

    @property
    def n_faces(self) -> int:
        return len(self.faces())

    def _trace_faces(self) -> None:
        fof: Dict[int, int] = {}
        faces: List[Face] = []
        for start in self.flags():
            if start in fof:
                continue
            walk = [start]
            cur = self._t1(self._t0(start))
            while cur != start:
                walk.append(cur)
                cur = self._t1(self._t0(cur))
            partner_start = self._t0(start)
            if partner_start in walk:
                raise StructureError("face boundary closes onto its own reverse")
            fid = len(faces)
            for f in walk:
                fof[f] = fid
            cur = partner_start
            for _ in range(len(walk)):
                fof[cur] = fid
                cur = self._t1(self._t0(cur))
            faces.append(Face(fid, tuple(walk)))
        self._faces = tuple(faces)
        self._face_of_flag = fof

    def dual_sides(self, e: int) -> Tuple[int, int]:
        """The two faces on the sides of edge e, as an ordered pair."""
        fof = self.face_map()
        return fof[_flag(2 * e, 0)], fof[_flag(2 * e, 1)]

    def face_boundary_edges(self, f: Face) -> Tuple[int, ...]:
        """Edges crossed by the directed boundary walk, in order."""
        return tuple(edge_of(_half(flag)) for flag in f.flags)

    def face_boundary_vertices(self, f: Face) -> Tuple[int, ...]:
        """Vertices visited by the directed boundary walk, in order."""
        return tuple(self._vertex_of_half[_half(flag)] for flag in f.flags)

    def corner_of_flag(self, flag: int) -> int:
        """The corner id of a flag: the half-edge opening that corner."""
        h, s = _half(flag), _side(flag)
        return h if s == 1 else self._sigma_inv[h]

    # ------------------------------------------------------------------
    # connectivity

    def components(self) -> Tuple[FrozenSet[int], ...]:
        if self._components is None:
            seen: Dict[int, int] = {}
            comps: List[FrozenSet[int]] = []
            for root in sorted(self._rot):
                if root in seen:
                    continue
                comp = {root}
                stack = [root]
                seen[root] = len(comps)
                while stack:
                    x = stack.pop()
                    for h in self._rot[x]:
                        y = self._vertex_of_half[mate(h)]
                        if y not in seen:
                            seen[y] = len(comps)
                            comp.add(y)
                            stack.append(y)
                comps.append(frozenset(comp))
            self._components = tuple(comps)
        return self._components

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def component_of(self, v: int) -> FrozenSet[int]:
        for comp in self.components():
            if v in comp:
                return comp
        raise DomainError(f"no vertex {v}")

    def component_surfaces(self) -> Tuple[Tuple[FrozenSet[int], str], ...]:
        out = []
        for comp in self.components():
            chi = self._component_chi(comp)
            out.append((comp, SPHERE if chi == 2 else PROJECTIVE))
        return tuple(out)

    def subgraph(self, vs: Iterable[int]) -> "EmbeddedGraph":
        """Restriction to a union of components."""
        vset = set(vs)
        for v in vset:
            if v not in self._rot:
                raise DomainError(f"no vertex {v}")
        edges = {}
        for e, (u, v, s) in self._edges.items():
            if u in vset and v in vset:
                edges[e] = (u, v, s)
            elif u in vset or v in vset:
                raise DomainError("vertex set is not a union of components")
        rot = {v: self._rot[v] for v in vset}
        return EmbeddedGraph(None, edges, rot)

    # ------------------------------------------------------------------
    # surgeries

    def flip(self, vs: Iterable[int]) -> "EmbeddedGraph":
        """Reverse the rotation at each given vertex.

        Edges with exactly one end flipped change sign; the embedding itself
        is unchanged up to homeomorphism.
        """
        vset = set(vs)
        for v in vset:
            if v not in self._rot:
                raise DomainError(f"no vertex {v}")
        edges = {}
        for e, (u, v, s) in self._edges.items():
            if (u in vset) != (v in vset):
                s = -s
            edges[e] = (u, v, s)
        rot = {
            v: tuple(reversed(r)) if v in vset else r for v, r in self._rot.items()
        }
        return EmbeddedGraph(self._surface, edges, rot, validate=False)

    def delete_edge(self, e: int) -> "EmbeddedGraph":
        """Remove edge e, keeping both endpoints.  The surface is re-derived."""
        if e not in self._edges:
            raise DomainError(f"no edge {e}")
        edges = {k: val for k, val in self._edges.items() if k != e}
        dead = (2 * e, 2 * e + 1)
        rot = {
            v: tuple(h for h in r if h not in dead) for v, r in self._rot.items()
        }
        return EmbeddedGraph(None, edges, rot)

    def contract_edge(self, e: int) -> "EmbeddedGraph":
        """Contract edge e; a loop contraction is a deletion.

        The merged vertex keeps the smaller of the two endpoint ids.  A
        negative edge is made positive first by flipping the second endpoint.
        """
        if e not in self._edges:
            raise DomainError(f"no edge {e}")
        u, v, s = self._edges[e]
        if u == v:
            return self.delete_edge(e)
        g = self.flip([v]) if s < 0 else self
        keep, gone = min(u, v), max(u, v)
        ru = list(g._rot[u])
        rv = list(g._rot[v])
        i = ru.index(2 * e)
        j = rv.index(2 * e + 1)
        merged = tuple(ru[:i] + rv[j + 1 :] + rv[:j] + ru[i + 1 :])
        edges = {}
        for k, (a, b, t) in g._edges.items():
            if k == e:
                continue
            a2 = keep if a in (u, v) else a
            b2 = keep if b in (u, v) else b
            edges[k] = (a2, b2, t)
        rot = {w: r for w, r in g._rot.items() if w not in (u, v)}
        rot[keep] = merged
        return EmbeddedGraph(None, edges, rot)

    def without_loops(self) -> "EmbeddedGraph":
        """Delete every loop edge in one pass."""
        dead_edges = set(self.loops())
        if not dead_edges:
            return self
        dead = set()
        for e in dead_edges:
            dead.add(2 * e)
            dead.add(2 * e + 1)
        edges = {k: v for k, v in self._edges.items() if k not in dead_edges}
        rot = {v: tuple(h for h in r if h not in dead) for v, r in self._rot.items()}
        return EmbeddedGraph(None, edges, rot)

    # ------------------------------------------------------------------
    # dual

    def dual(self) -> "EmbeddedGraph":
        """The surface dual of a connected embedding.

        Dual vertex ids equal primal face ids, and edge ids are preserved.
        """
        if not self.is_connected():
            raise DomainError("dual requires a connected embedding")
        flags, t0, t1, t2 = self._gem()
        vertex_ids = {f.flags[0]: f.id for f in self.faces()}
        edge_ids = {4 * e: e for e in self._edges}
        built = _graph_from_gem(flags, t2, t1, t0, vertex_ids, edge_ids)
        return built.graph

    # ------------------------------------------------------------------
    # canonical form

    def canonical_form(self) -> bytes:
        """A byte string equal for exactly the isomorphic embeddings.

        Isomorphism here means a relabelling of vertices and edges together
        with a homeomorphism of the surface, mirror images included.
        """
        if self._canon_cache is None:
            self._canon_cache = self._canonicalize()
        return self._canon_cache[0]

    def _canonicalize(self):
        flags, t0, t1, t2 = self._gem()
        comp_flags = self._flag_components()
        parts = []
        for fl in comp_flags:
            sig, order = _component_canon(fl, t0, t1, t2, self._flag_invariants(fl))
            parts.append((sig, order))
        parts.sort(key=lambda p: p[0])
        bare = sum(1 for comp in self.components() if self._comp_edgeless(comp))
        blob = b"|".join(p[0] for p in parts) + b"#" + str(bare).encode()
        return blob, parts

    def _comp_edgeless(self, comp: FrozenSet[int]) -> bool:
        return all(not self._rot[v] for v in comp)

    def _flag_components(self) -> List[List[int]]:
        out = []
        for comp in self.components():
            fl = []
            for v in sorted(comp):
                for h in self._rot[v]:
                    fl.append(_flag(h, 0))
                    fl.append(_flag(h, 1))
            if fl:
                fl.sort()
                out.append(fl)
        return out

    def _flag_invariants(self, fl: List[int]) -> Dict[int, Tuple[int, int, int, int]]:
        faces = self.faces()
        fof = self.face_map()
        inv = {}
        for f in fl:
            h = _half(f)
            d1 = len(self._rot[self._vertex_of_half[h]])
            d2 = len(self._rot[self._vertex_of_half[mate(h)]])
            inv[f] = (d1, faces[fof[f]].length, d2, faces[fof[f ^ 1]].length)
        return inv

    def iso_signature(self):
        if self._canon_cache is None:
            self._canon_cache = self._canonicalize()
        return self._canon_cache


def _component_canon(fl, t0, t1, t2, inv):
    """Minimal breadth-first code of one gem component over candidate roots."""
    best_inv = min(inv[f] for f in fl)
    starts = [f for f in fl if inv[f] == best_inv]
    n = len(fl)
    fmt = "<3H" if n < 65536 else "<3I"
    pack = struct.Struct(fmt).pack
    best = None
    best_order = None
    for s in starts:
        num = {s: 0}
        order = [s]
        for f in order:
            for t in (t0, t1, t2):
                g = t[f]
                if g not in num:
                    num[g] = len(order)
                    order.append(g)
        sig = b"".join(pack(num[t0[f]], num[t1[f]], num[t2[f]]) for f in order)
        if best is None or sig < best:
            best = sig
            best_order = order
    return struct.pack("<I", n) + best, best_order


def iso_map(g: EmbeddedGraph, h: EmbeddedGraph) -> Optional[Dict[str, Dict[int, int]]]:
    """Explicit isomorphism between two embeddings, or None.

    Returns vertex, edge and face bijections from g to h.  Graphs made only
    of bare vertices are matched by sorted order.
    """
    sig_g, parts_g = g.iso_signature()
    sig_h, parts_h = h.iso_signature()
    if sig_g != sig_h:
        return None
    vmap: Dict[int, int] = {}
    emap: Dict[int, int] = {}
    fmap: Dict[int, int] = {}
    fof_g, fof_h = g.face_map(), h.face_map()
    for (sg, og), (sh, oh) in zip(
        sorted(parts_g, key=lambda p: p[0]), sorted(parts_h, key=lambda p: p[0])
    ):
        if sg != sh:
            return None
        for fg, fh in zip(og, oh):
            vmap[g.vertex_of_half(_half(fg))] = h.vertex_of_half(_half(fh))
            emap[edge_of(_half(fg))] = edge_of(_half(fh))
            fmap[fof_g[fg]] = fof_h[fh]
    bare_g = sorted(v for v in g.vertices() if g.degree(v) == 0)
    bare_h = sorted(v for v in h.vertices() if h.degree(v) == 0)
    for a, b in zip(bare_g, bare_h):
        vmap[a] = b
    return {"vertices": vmap, "edges": emap, "faces": fmap}


# ----------------------------------------------------------------------
# building a graph back from a gem


@dataclass(frozen=True)
class BuiltGraph:
    graph: EmbeddedGraph
    vertex_of_flag: Dict[int, int]
    half_of_flag: Dict[int, int]
    internal_flag: Dict[int, int]


def _orbit(start, gens):
    seen = {start}
    order = [start]
    for f in order:
        for t in gens:
            g = t[f]
            if g not in seen:
                seen.add(g)
                order.append(g)
    return order


def _graph_from_gem(flags, t0, t1, t2, vertex_ids=None, edge_ids=None) -> BuiltGraph:
    """Reconstruct an embedded graph from flag involutions.

    Ids default to ranks by smallest flag; explicit maps (smallest orbit flag
    to desired id) override.  Per vertex the local sense is chosen so that the
    orbit through its smallest flag reads the rotation forward.
    """
    flagset = set(flags)
    for t in (t0, t1, t2):
        for f in flags:
            if t[f] == f or t[t[f]] != f or t[f] not in flagset:
                raise StructureError("flag involution is not a free involution")
    for f in flags:
        if t0[t2[f]] != t2[t0[f]]:
            raise StructureError("edge involutions of the gem do not commute")

    vertex_orbit: Dict[int, int] = {}
    vertex_min: List[int] = []
    for f in flags:
        if f in vertex_orbit:
            continue
        orb = _orbit(f, (t1, t2))
        vid = len(vertex_min)
        for x in orb:
            vertex_orbit[x] = vid
        vertex_min.append(f)

    edge_orbit: Dict[int, int] = {}
    edge_min: List[int] = []
    for f in flags:
        if f in edge_orbit:
            continue
        orb = _orbit(f, (t0, t2))
        if len(orb) != 4:
            raise StructureError("edge orbit of the gem has wrong size")
        eid = len(edge_min)
        for x in orb:
            edge_orbit[x] = eid
        edge_min.append(f)

    def vid_of(idx: int) -> int:
        if vertex_ids is not None:
            return vertex_ids[vertex_min[idx]]
        return idx

    def eid_of(idx: int) -> int:
        if edge_ids is not None:
            return edge_ids[edge_min[idx]]
        return idx

    # the two t2 pairs of each edge orbit are its half-edges; the pair
    # holding the orbit's smallest flag becomes half 2e
    half_of_flag: Dict[int, int] = {}
    for idx, mn in enumerate(edge_min):
        e = eid_of(idx)
        first = (mn, t2[mn])
        second = (t0[mn], t2[t0[mn]])
        for x in first:
            half_of_flag[x] = 2 * e
        for x in second:
            half_of_flag[x] = 2 * e + 1

    rotations: Dict[int, Tuple[int, ...]] = {}
    chosen: Dict[int, int] = {}
    for idx, mn in enumerate(vertex_min):
        walk = [mn]
        cur = t1[t2[mn]]
        while cur != mn:
            walk.append(cur)
            cur = t1[t2[cur]]
        rot = []
        seen_halves = set()
        for f in walk:
            chosen[f] = 1
            hh = half_of_flag[f]
            if hh in seen_halves:
                raise StructureError("vertex orbit walks a half-edge twice")
            seen_halves.add(hh)
            rot.append(hh)
        if 2 * len(walk) != len(_orbit(mn, (t1, t2))):
            raise StructureError("vertex orbit does not split into two walks")
        rotations[vid_of(idx)] = tuple(rot)

    edges: Dict[int, Tuple[int, int, int]] = {}
    for idx, mn in enumerate(edge_min):
        e = eid_of(idx)
        ca = mn if chosen.get(mn) else t2[mn]
        other = t0[mn]
        cb = other if chosen.get(other) else t2[other]
        if not chosen.get(ca) or not chosen.get(cb):
            raise StructureError("no oriented flag for an edge end")
        if t0[ca] == cb:
            s = -1
        elif t0[ca] == t2[cb]:
            s = 1
        else:
            raise StructureError("edge ends are not mates in the gem")
        u = vid_of(vertex_orbit[mn])
        v = vid_of(vertex_orbit[other])
        edges[e] = (u, v, s)

    graph = EmbeddedGraph(None, edges, rotations)
    vmap = {f: vid_of(vertex_orbit[f]) for f in flags}
    internal = {
        f: (half_of_flag[f] << 1) | (0 if chosen.get(f) else 1) for f in flags
    }
    return BuiltGraph(graph, vmap, half_of_flag, internal)


# ----------------------------------------------------------------------
# dual walks


@dataclass(frozen=True)
class DualWalk:
    """A walk in the face adjacency structure of a host embedding.

    ``seq`` alternates faces and edges, (f0, e1, f1, ..., ek, fk); each edge
    must have exactly the two neighbouring faces as its sides.  A walk is
    closed when it ends on its starting face.
    """

    host: EmbeddedGraph
    seq: Tuple[int, ...]

    def __post_init__(self):
        s = self.seq
        if len(s) % 2 == 0 or len(s) < 1:
            raise StructureError("dual walk must alternate faces and edges")
        nf = self.host.n_faces
        for i in range(0, len(s), 2):
            if not (0 <= s[i] < nf):
                raise StructureError(f"no face {s[i]} in host")
        for i in range(1, len(s), 2):
            sides = self.host.dual_sides(s[i])
            if sorted((s[i - 1], s[i + 1])) != sorted(sides):
                raise StructureError(
                    f"edge {s[i]} does not join faces {s[i - 1]} and {s[i + 1]}"
                )

    @property
    def length(self) -> int:
        return len(self.seq) // 2

    @property
    def closed(self) -> bool:
        return self.seq[0] == self.seq[-1]

    def faces(self) -> Tuple[int, ...]:
        return self.seq[0::2]

    def edges(self) -> Tuple[int, ...]:
        return self.seq[1::2]

    def reverse(self) -> "DualWalk":
        return DualWalk(self.host, tuple(reversed(self.seq)))


# ----------------------------------------------------------------------
# radial graph and representativity


def radial_graph(g: EmbeddedGraph) -> Tuple[EmbeddedGraph, int]:
    """The vertex-face incidence graph, embedded in the same surface.

    Nodes are the vertices of g plus one node per face, numbered offset + f
    where offset is one past the largest vertex id.  The edge for the corner
    opened by half-edge h gets id h, with half 2h at the vertex end.  Every
    face of the result is a quadrilateral, one around each edge of g.
    Returns (radial, offset).

    The radial edge through a corner is the segment separating the corner's
    two flags, so the whole structure is read off the flag involutions: a
    radial flag is a pair (flag of g, end bit), the end bit toggles across
    the radial edge, t2 of g crosses it sideways, and moving along the node
    is t2 of g at a vertex node and t0 of g at a face node.
    """
    offset = max(g.vertices(), default=-1) + 1
    if g.n_edges == 0:
        empty = EmbeddedGraph(None, {}, {v: () for v in g.vertices()})
        return empty, offset

    flags, t0, t1, t2 = g._gem()
    rflags = []
    rt0: Dict[int, int] = {}
    rt1: Dict[int, int] = {}
    rt2: Dict[int, int] = {}
    for ph in flags:
        for t in (0, 1):
            fl = (ph << 1) | t
            rflags.append(fl)
            rt0[fl] = (ph << 1) | (t ^ 1)
            rt2[fl] = (t1[ph] << 1) | t
            rt1[fl] = ((t2[ph] if t == 0 else t0[ph]) << 1) | t
    rflags.sort()

    vertex_ids: Dict[int, int] = {}
    for v in g.vertices():
        rot = g.rotation(v)
        if rot:
            vertex_ids[_flag(min(rot), 0) << 1] = v
    for face in g.faces():
        vertex_ids[(face.flags[0] << 1) | 1] = offset + face.id
    edge_ids: Dict[int, int] = {}
    for h in g.half_edges():
        # corner opened by h holds the flags (h, 1) and (next, 0)
        a = _flag(h, 1) << 1
        b = _flag(g.next_half(h), 0) << 1
        edge_ids[min(a, b)] = h

    built = _graph_from_gem(rflags, rt0, rt1, rt2, vertex_ids, edge_ids)
    radial = built.graph
    bare = [v for v in g.vertices() if g.degree(v) == 0]
    if bare:
        rot = {v: radial.rotation(v) for v in radial.vertices()}
        rot.update({v: () for v in bare})
        edges = {e: radial._edges[e] for e in radial.edge_ids()}
        radial = EmbeddedGraph(None, edges, rot)
    if radial.surface != g.surface:
        raise StructureError("radial graph landed on the wrong surface")
    for f in radial.faces():
        if f.length != 4:
            raise StructureError("radial graph has a non-quadrilateral face")
    return radial, offset


def odd_closed_walk(
    nodes: Iterable[int],
    edges: Iterable[Tuple[int, int, int, int]],
    through: Optional[int] = None,
):
    """Shortest closed walk with negative sign product in a signed multigraph.

    ``edges`` holds (edge id, end, end, sign) rows.  Searches the parity
    double cover by breadth-first search from every node (or only ``through``).
    Returns (length, walk) with walk = (x0, e1, x1, ..., ek, x0), or None if
    every closed walk is positive.
    """
    adj: Dict[int, List[Tuple[int, int, int]]] = {v: [] for v in nodes}
    for e, a, b, s in edges:
        adj[a].append((e, b, s))
        if a != b:
            adj[b].append((e, a, s))
        elif s < 0:
            # a negative loop closes an odd walk of length 1 by itself
            adj[a].append((e, a, s))
    for v in adj:
        adj[v].sort()
    starts = [through] if through is not None else sorted(adj)
    best = None
    for s0 in starts:
        if s0 not in adj:
            raise DomainError(f"no node {s0}")
        dist = {(s0, 0): 0}
        parent = {}
        queue = [(s0, 0)]
        qi = 0
        goal = (s0, 1)
        while qi < len(queue) and goal not in dist:
            x, layr = queue[qi]
            qi += 1
            d = dist[(x, layr)]
            if best is not None and d + 1 >= best[0]:
                continue
            for e, y, sg in adj[x]:
                nxt = (y, layr ^ (1 if sg < 0 else 0))
                if nxt not in dist:
                    dist[nxt] = d + 1
                    parent[nxt] = (x, layr, e)
                    queue.append(nxt)
        if goal in dist and (best is None or dist[goal] < best[0]):
            walk = [s0]
            cur = goal
            back = []
            while cur != (s0, 0):
                x, layr, e = parent[cur]
                back.append((e, cur[0]))
                cur = (x, layr)
            back.reverse()
            seq: List[int] = [s0]
            for e, y in back:
                seq.append(e)
                seq.append(y)
            best = (dist[goal], tuple(seq))
    return best


def representativity(g: EmbeddedGraph) -> int:
    """Least number of crossings with the graph over noncontractible curves.

    Defined for projective-plane embeddings.  A curve in general position
    meets the surface in vertices and faces alternately, so the value is half
    the length of the shortest odd closed walk in the radial graph.
    """
    if g.surface != PROJECTIVE:
        raise DomainError("representativity needs a projective-plane embedding")
    radial, _ = radial_graph(g)
    rows = [(e,) + radial._edges[e] for e in radial.edge_ids()]
    found = odd_closed_walk(radial.vertices(), rows)
    if found is None:
        raise StructureError("projective embedding with no odd walk")
    length, _ = found
    if length % 2:
        raise StructureError("odd walk of odd length in a bipartite radial graph")
    return length // 2


def representativity_bruteforce(g: EmbeddedGraph, cap: int = 14) -> int:
    """Independent check of representativity by enumerating simple cycles.

    The shortest negative closed walk can be taken simple, so enumerating
    all simple cycles of the radial graph and keeping the negative ones is
    a complete, if slow, reference.  Guarded by a node cap.
    """
    if g.surface != PROJECTIVE:
        raise DomainError("representativity needs a projective-plane embedding")
    radial, _ = radial_graph(g)
    if radial.n_vertices > cap:
        raise SizeCapError(f"radial graph above the {cap} node cap")
    adj: Dict[int, List[Tuple[int, int, int]]] = {v: [] for v in radial.vertices()}
    for e in radial.edge_ids():
        a, b, s = radial._edges[e]
        adj[a].append((e, b, s))
        adj[b].append((e, a, s))
    for v in adj:
        adj[v].sort()
    best = [None]

    def dfs(start, v, used, sgn, length, visited):
        if best[0] is not None and length >= best[0]:
            return
        for e, w, s in adj[v]:
            if e in used:
                continue
            if w == start:
                if sgn * s < 0 and (best[0] is None or length + 1 < best[0]):
                    best[0] = length + 1
            elif w > start and w not in visited:
                used.add(e)
                visited.add(w)
                dfs(start, w, used, sgn * s, length + 1, visited)
                visited.discard(w)
                used.discard(e)

    for start in sorted(adj):
        dfs(start, start, set(), 1, 0, {start})
    if best[0] is None:
        raise StructureError("projective embedding with no negative cycle")
    return best[0] // 2


def _rep_or_zero(g: EmbeddedGraph) -> int:
    """Representativity extended to sphere results of surgery, which get 0."""
    if g.surface == SPHERE:
        return 0
    return representativity(g)


@dataclass(frozen=True)
class MinimalityCheck:
    """Outcome of a minor-minimality test, usable directly as a boolean.

    On failure ``witness`` names the reason: ``("representativity", r)`` when
    the graph itself is below the threshold, or ``("delete", e)`` or
    ``("contract", e)`` giving an edge whose surgery stays at or above it.
    """

    ok: bool
    witness: Optional[Tuple[str, int]] = None

    def __bool__(self) -> bool:
        return self.ok


def is_minor_minimal_representative(g: EmbeddedGraph, k: int) -> MinimalityCheck:
    """Whether g keeps representativity >= k while every proper minor drops below k.

    Deleting or contracting a single edge covers all minors, since both
    operations only ever lower the value.
    """
    if k < 1:
        raise DomainError("minimality threshold must be at least 1")
    r = representativity(g)
    if r < k:
        return MinimalityCheck(False, ("representativity", r))
    for e in g.edge_ids():
        if _rep_or_zero(g.delete_edge(e)) >= k:
            return MinimalityCheck(False, ("delete", e))
        if _rep_or_zero(g.contract_edge(e)) >= k:
            return MinimalityCheck(False, ("contract", e))
    return MinimalityCheck(True)


# ----------------------------------------------------------------------
# file format


def parse_rot(text: str) -> EmbeddedGraph:
    """Read the plain text embedding format.

    Lines: ``surface S|P``, ``vertices n``, ``edges m``, then m lines
    ``edge <id> <u> <v> <+1|-1>`` and n lines ``rot <v> <half...>``.  Blank
    lines and ``#`` comments are ignored.  Signs must be written +1 or -1.
    """
    surface = None
    nv = ne = None
    edges: Dict[int, Tuple[int, int, int]] = {}
    rotations: Dict[int, Tuple[int, ...]] = {}
    order = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "surface":
                if surface is not None:
                    raise StructureError(f"line {lineno}: repeated surface line")
                if len(tok) != 2 or tok[1] not in (SPHERE, PROJECTIVE):
                    raise StructureError(f"line {lineno}: surface must be S or P")
                surface = tok[1]
            elif kind == "vertices":
                nv = int(tok[1])
            elif kind == "edges":
                ne = int(tok[1])
            elif kind == "edge":
                if len(tok) != 5:
                    raise StructureError(f"line {lineno}: edge needs id, ends, sign")
                e, u, v = int(tok[1]), int(tok[2]), int(tok[3])
                if tok[4] == "+1":
                    s = 1
                elif tok[4] == "-1":
                    s = -1
                else:
                    raise StructureError(f"line {lineno}: sign must be +1 or -1")
                if e in edges:
                    raise StructureError(f"line {lineno}: repeated edge id {e}")
                edges[e] = (u, v, s)
            elif kind == "rot":
                v = int(tok[1])
                if v in rotations:
                    raise StructureError(f"line {lineno}: repeated rotation for {v}")
                rotations[v] = tuple(int(x) for x in tok[2:])
            else:
                raise StructureError(f"line {lineno}: unknown directive {kind!r}")
        except (ValueError, IndexError):
            raise StructureError(f"line {lineno}: malformed {kind!r} line") from None
        order.append(kind)
    if surface is None or nv is None or ne is None:
        raise StructureError("missing surface, vertices or edges header")
    if len(edges) != ne:
        raise StructureError(f"expected {ne} edge lines, found {len(edges)}")
    if len(rotations) != nv:
        raise StructureError(f"expected {nv} rot lines, found {len(rotations)}")
    try:
        return EmbeddedGraph(surface, edges, rotations)
    except StructureError:
        raise
    except KeyError as exc:
        raise StructureError(f"inconsistent embedding data: {exc}") from None


def write_rot(g: EmbeddedGraph) -> str:
    """Serialize an embedding in the plain text format, byte stable."""
    out = [f"surface {g.surface}", f"vertices {g.n_vertices}", f"edges {g.n_edges}"]
    for e in g.edge_ids():
        u, v = g.edge_ends(e)
        s = "+1" if g.sign(e) > 0 else "-1"
        out.append(f"edge {e} {u} {v} {s}")
    for v in g.vertices():
        halves = " ".join(str(h) for h in g.rotation(v))
        out.append(f"rot {v} {halves}".rstrip())
    return "\n".join(out) + "\n"
