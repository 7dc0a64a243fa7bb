"""Embedded dual graphs of layouts and their cycle decompositions.

The dual of a cell complex has one vertex per cell and one edge per
contact.  The extended dual of a global layout adds four marker
vertices ``l``, ``t``, ``r``, ``b`` for the sides of the root box,
joined to the regions touching that side and to each other in a
4-cycle; the result is a plane graph whose inner faces are all
triangles and whose outer face is the marker quadrilateral.

Embeddings are stored as rotation systems: for every vertex the tuple
of its neighbours in counterclockwise geometric order.  Faces fall out
of the usual half-edge walk (follow ``u -> v``, then leave ``v`` by the
neighbour preceding ``u`` in counterclockwise order); with rotations
oriented this way every inner face comes out counterclockwise and the
outer face clockwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .geometry import (
    Direction,
    GlobalLayout,
    Rect,
    RectComplex,
    TwoLevelLayout,
    validate_layout,
)

log = logging.getLogger(__name__)

#: Ids of the four side markers of an extended dual.
LEFT_MARK, TOP_MARK, RIGHT_MARK, BOTTOM_MARK = "l", "t", "r", "b"
MARKS = (LEFT_MARK, TOP_MARK, RIGHT_MARK, BOTTOM_MARK)


@dataclass(frozen=True)
class PlaneGraph:
    """An embedded graph: counterclockwise neighbour order per vertex.

    ``outer`` designates the outer face as the cycle of vertices in the
    order of its (clockwise) face walk, or None when no face has been
    singled out (plain duals).
    """

    rotation: Mapping[str, tuple[str, ...]]
    outer: tuple[str, ...] | None = None

    @staticmethod
    def of(
        rotation: Mapping[str, Sequence[str]], outer: Sequence[str] | None = None
    ) -> "PlaneGraph":
        rot = {v: tuple(nbrs) for v, nbrs in rotation.items()}
        for v, nbrs in rot.items():
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"repeated neighbour around {v!r}")
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at {v!r}")
                if u not in rot or v not in rot[u]:
                    raise ValueError(f"edge {v!r}-{u!r} is not symmetric")
        g = PlaneGraph(rot, tuple(outer) if outer is not None else None)
        if rot and g.is_connected:
            v, e, f = len(rot), len(g.edges), len(g.faces)
            if v - e + f != 2:
                raise ValueError("rotation system is not a plane embedding")
        if g.outer is not None and _canon_cycle(g.outer) not in {
            _canon_cycle(f) for f in g.faces
        }:
            raise ValueError("designated outer cycle is not a face")
        return g

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.rotation)

    def __contains__(self, v: str) -> bool:
        return v in self.rotation

    def __len__(self) -> int:
        return len(self.rotation)

    def neighbours(self, v: str) -> tuple[str, ...]:
        return self.rotation[v]

    @cached_property
    def is_connected(self) -> bool:
        if not self.rotation:
            return True
        seen = {next(iter(self.rotation))}
        stack = list(seen)
        while stack:
            for u in self.rotation[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.rotation)

    @cached_property
    def edges(self) -> frozenset[frozenset[str]]:
        return frozenset(
            frozenset((u, v)) for u in self.rotation for v in self.rotation[u]
        )

    def has_edge(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edges

    def _next_in_face(self, u: str, v: str) -> tuple[str, str]:
        nbrs = self.rotation[v]
        w = nbrs[nbrs.index(u) - 1]
        return v, w

    @cached_property
    def faces(self) -> tuple[tuple[str, ...], ...]:
        """All face walks, each closed and visited exactly once."""
        seen: set[tuple[str, str]] = set()
        out = []
        for u in self.rotation:
            for v in self.rotation[u]:
                if (u, v) in seen:
                    continue
                walk = []
                a, b = u, v
                while (a, b) not in seen:
                    seen.add((a, b))
                    walk.append(a)
                    a, b = self._next_in_face(a, b)
                if (a, b) != (u, v):
                    raise ValueError("face walk does not close; embedding broken")
                out.append(tuple(walk))
        return tuple(out)

    @cached_property
    def inner_faces(self) -> tuple[tuple[str, ...], ...]:
        if self.outer is None:
            raise ValueError("no designated outer face")
        mark = _canon_cycle(self.outer)
        return tuple(f for f in self.faces if _canon_cycle(f) != mark)

    def is_triangulated(self) -> bool:
        """Quadrilateral outer face, every inner face a triangle."""
        return (
            self.outer is not None
            and len(self.outer) == 4
            and all(len(f) == 3 for f in self.inner_faces)
        )


def _canon_cycle(cycle: Sequence[str]) -> tuple[str, ...]:
    """Rotation- and reflection-independent form of a closed walk."""
    best = None
    seq = list(cycle)
    for cand in (seq, seq[::-1]):
        k = cand.index(min(cand))
        rot = tuple(cand[k:] + cand[:k])
        if best is None or rot < best:
            best = rot
    return best


# ---------------------------------------------------------------------------
# construction from geometry


def _sides_of(rect: Rect, around: Iterable[tuple[str, Rect, Direction]]) -> tuple[str, ...]:
    """Neighbours of one rectangle in ccw geometric order.

    Right side bottom-up, top side right-to-left, left side top-down,
    bottom side left-to-right; within a side the start of the shared
    segment orders the items.
    """
    right, top, left, bottom = [], [], [], []
    for other, r, d in around:
        if d.horizontal:
            lo = max(rect.y_min, r.y_min)
            (right if d is Direction.RIGHT else left).append(
                (lo if d is Direction.RIGHT else -lo, other)
            )
        else:
            lo = max(rect.x_min, r.x_min)
            (top if d is Direction.TOP else bottom).append(
                (-lo if d is Direction.TOP else lo, other)
            )
    out = []
    for bucket in (right, top, left, bottom):
        out.extend(name for _k, name in sorted(bucket))
    return tuple(out)


def dual_graph(source: RectComplex | TwoLevelLayout) -> PlaneGraph:
    """The embedded dual of a complex (or of a layout's cells)."""
    complex_ = source if isinstance(source, RectComplex) else RectComplex.of(source.cells)
    per_cell: dict[str, list[tuple[str, Rect, Direction]]] = {c.id: [] for c in complex_}
    for a, b, d, _ov in complex_.adjacencies:
        per_cell[a].append((b, complex_[b].rect, d))
    rotation = {c.id: _sides_of(c.rect, per_cell[c.id]) for c in complex_}
    return PlaneGraph.of(rotation)


def extended_dual(layout: GlobalLayout | TwoLevelLayout) -> PlaneGraph:
    """The region dual plus the four side markers of the root box."""
    if isinstance(layout, TwoLevelLayout):
        layout = layout.global_layout
    problems = validate_layout(layout.as_layout())
    if problems:
        raise ValueError(f"layout invalid: {problems[0].message}")
    root = layout.root
    regions = layout.by_id
    for m in MARKS:
        if m in regions:
            raise ValueError(f"region id {m!r} collides with a side marker")
    around: dict[str, list[tuple[str, Rect, Direction]]] = {rid: [] for rid in regions}
    for a, b, d, _ov in layout.adjacencies:
        around[a].append((b, regions[b], d))
    for rid, rect in regions.items():
        if rect.x_min == root.x_min:
            around[rid].append((LEFT_MARK, rect, Direction.LEFT))
        if rect.x_max == root.x_max:
            around[rid].append((RIGHT_MARK, rect, Direction.RIGHT))
        if rect.y_min == root.y_min:
            around[rid].append((BOTTOM_MARK, rect, Direction.BOTTOM))
        if rect.y_max == root.y_max:
            around[rid].append((TOP_MARK, rect, Direction.TOP))
    rotation: dict[str, tuple[str, ...]] = {
        rid: _sides_of(regions[rid], cs) for rid, cs in around.items()
    }
    on = {
        LEFT_MARK: sorted(
            (r for r in regions if regions[r].x_min == root.x_min),
            key=lambda r: regions[r].y_min,
        ),
        RIGHT_MARK: sorted(
            (r for r in regions if regions[r].x_max == root.x_max),
            key=lambda r: -regions[r].y_min,
        ),
        BOTTOM_MARK: sorted(
            (r for r in regions if regions[r].y_min == root.y_min),
            key=lambda r: -regions[r].x_min,
        ),
        TOP_MARK: sorted(
            (r for r in regions if regions[r].y_max == root.y_max),
            key=lambda r: regions[r].x_min,
        ),
    }
    rotation[LEFT_MARK] = (BOTTOM_MARK, *on[LEFT_MARK], TOP_MARK)
    rotation[RIGHT_MARK] = (TOP_MARK, *on[RIGHT_MARK], BOTTOM_MARK)
    rotation[TOP_MARK] = (LEFT_MARK, *on[TOP_MARK], RIGHT_MARK)
    rotation[BOTTOM_MARK] = (RIGHT_MARK, *on[BOTTOM_MARK], LEFT_MARK)
    g = PlaneGraph.of(rotation, outer=(LEFT_MARK, TOP_MARK, RIGHT_MARK, BOTTOM_MARK))
    if not g.is_triangulated():
        raise ValueError("extended dual is not triangulated; layout degenerate")
    return g


# ---------------------------------------------------------------------------
# separating cycles


def has_separating_triangle(g: PlaneGraph) -> tuple[str, str, str] | None:
    """A non-facial triangle if one exists (smallest by sorted ids).

    In a plane graph whose inner faces are all triangles, a triangle
    either bounds a face or has vertices strictly on both sides, so
    non-facial is the same as separating.
    """
    facial = {frozenset(f) for f in g.faces if len(f) == 3}
    found = []
    for u, v in {tuple(sorted(e)) for e in g.edges}:
        common = set(g.rotation[u]) & set(g.rotation[v])
        for w in common:
            tri = frozenset((u, v, w))
            if len(tri) == 3 and tri not in facial:
                found.append(tuple(sorted(tri)))
    return min(found) if found else None


def _cycles4(g: PlaneGraph) -> Iterator[tuple[str, str, str, str]]:
    """All chordless 4-cycles, one orientation each."""
    idx = {v: i for i, v in enumerate(g.rotation)}
    for b in g.rotation:
        for a in g.rotation[b]:
            if idx[a] >= idx[b]:
                continue
            for c in g.rotation[b]:
                if idx[c] <= idx[a] or c == b or g.has_edge(a, c):
                    continue
                for d in g.rotation[c]:
                    if d == b or idx[d] <= idx[a] or not g.has_edge(d, a):
                        continue
                    if g.has_edge(b, d):
                        continue
                    if idx[b] < idx[d]:
                        yield (a, b, c, d)


def interior_of(g: PlaneGraph, cycle: Sequence[str]) -> frozenset[str]:
    """Vertices strictly inside the cycle (the side away from the outer face)."""
    if g.outer is None:
        raise ValueError("interior is only defined with a designated outer face")
    cyc = list(cycle)
    cyc_edges = {
        frozenset((cyc[i], cyc[(i + 1) % len(cyc)])) for i in range(len(cyc))
    }
    faces = g.faces
    by_edge: dict[frozenset[str], list[int]] = {}
    for fi, f in enumerate(faces):
        for i in range(len(f)):
            by_edge.setdefault(frozenset((f[i], f[(i + 1) % len(f)])), []).append(fi)
    outer_ix = next(
        fi for fi, f in enumerate(faces) if _canon_cycle(f) == _canon_cycle(g.outer)
    )
    outside = {outer_ix}
    stack = [outer_ix]
    while stack:
        fi = stack.pop()
        f = faces[fi]
        for i in range(len(f)):
            e = frozenset((f[i], f[(i + 1) % len(f)]))
            if e in cyc_edges:
                continue
            for gi in by_edge[e]:
                if gi not in outside:
                    outside.add(gi)
                    stack.append(gi)
    onto = set(cyc)
    inside_vertices = {
        v
        for fi, f in enumerate(faces)
        if fi not in outside
        for v in f
        if v not in onto
    }
    return frozenset(inside_vertices)


def separating_4cycles(
    g: PlaneGraph, *, nontrivial_only: bool = True
) -> list[tuple[tuple[str, str, str, str], frozenset[str]]]:
    """(cycle, interior) pairs, smallest interiors first."""
    least = 2 if nontrivial_only else 1
    out = []
    for cyc in _cycles4(g):
        inner = interior_of(g, cyc)
        if len(inner) >= least and len(inner) + 4 < len(g):
            out.append((cyc, inner))
    out.sort(key=lambda p: (len(p[1]), tuple(sorted(p[0]))))
    return out


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class DecompositionNode:
    """One separation component: a graph free of nontrivial separating
    4-cycles; non-root nodes remember the cycle they were cut along and
    the placeholder vertex standing for them in the parent."""

    graph: PlaneGraph
    cut: tuple[str, str, str, str] | None = None
    placeholder: str | None = None
    children: tuple["DecompositionNode", ...] = ()

    def walk(self) -> Iterator["DecompositionNode"]:
        yield self
        for ch in self.children:
            yield from ch.walk()


def _cut_interior(
    g: PlaneGraph, cycle: tuple[str, str, str, str], inner: frozenset[str], name: str
) -> tuple[PlaneGraph, PlaneGraph]:
    """Split g along a separating 4-cycle: (outer remainder, inner part)."""
    keep_in = inner | set(cycle)
    inner_rot: dict[str, tuple[str, ...]] = {}
    for v in keep_in:
        if v in inner:
            inner_rot[v] = g.rotation[v]
        else:
            inner_rot[v] = tuple(u for u in g.rotation[v] if u in keep_in)
    child = PlaneGraph.of(inner_rot, outer=cycle)
    # The cycle tuple carries no orientation; recover the clockwise outer
    # walk as actually traced so the placeholder's rotation below can be
    # its reverse (clockwise from outside = counterclockwise from inside).
    walk = next(
        f for f in child.faces if _canon_cycle(f) == _canon_cycle(cycle)
    )
    outer_rot: dict[str, list[str]] = {}
    for v in g.rotation:
        if v in inner:
            continue
        if v in set(cycle):
            nbrs: list[str] = []
            placed = False
            for u in g.rotation[v]:
                if u in inner:
                    if not placed:
                        nbrs.append(name)
                        placed = True
                else:
                    nbrs.append(u)
            outer_rot[v] = nbrs
        else:
            outer_rot[v] = list(g.rotation[v])
    outer_rot[name] = list(walk[::-1])
    remainder = PlaneGraph.of(outer_rot, outer=g.outer)
    return remainder, child


def decompose_4cycles(g: PlaneGraph) -> DecompositionNode:
    """Tree of separation components, innermost cycles cut first."""
    if not g.is_triangulated():
        raise ValueError("decomposition needs a triangulated graph with a quad outer face")
    if has_separating_triangle(g) is not None:
        raise ValueError("graph has a separating triangle; no rectangular layout exists")
    work = g
    pieces: list[tuple[str, tuple[str, str, str, str], PlaneGraph]] = []
    n = 0
    while True:
        cycles = separating_4cycles(work)
        if not cycles:
            break
        cycle, inner = cycles[0]
        name = f"~{n}"
        while name in work:
            n += 1
            name = f"~{n}"
        work, child = _cut_interior(work, cycle, inner, name)
        pieces.append((name, cycle, child))
        n += 1
    # A placeholder ends up either in the root remainder or inside the
    # child of exactly one later cut; pieces are cut innermost-first, so
    # walking them in cut order builds every child before its parent.
    hosts: dict[str, str | None] = {
        name: next((pn for pn, _c, pg in pieces[i + 1 :] if name in pg), None)
        for i, (name, _cyc, _child) in enumerate(pieces)
    }
    by_host: dict[str | None, list[str]] = {}
    for name, _cyc, _child in pieces:
        by_host.setdefault(hosts[name], []).append(name)
    nodes: dict[str, DecompositionNode] = {}
    for name, cycle, child in pieces:
        nodes[name] = DecompositionNode(
            child,
            cut=cycle,
            placeholder=name,
            children=tuple(nodes[m] for m in by_host.get(name, ())),
        )
    return DecompositionNode(work, children=tuple(nodes[m] for m in by_host.get(None, ())))


def _splice(parent: PlaneGraph, child: PlaneGraph, placeholder: str, cut: Sequence[str]) -> PlaneGraph:
    """Substitute a cut component back for its placeholder vertex."""
    cutset = set(cut)
    rot: dict[str, tuple[str, ...]] = {}
    for v, nbrs in parent.rotation.items():
        if v == placeholder:
            continue
        if v in cutset:
            els = child.rotation[v]
            k = next(i for i, u in enumerate(els) if u in cutset)
            run = [u for u in els[k:] + els[:k] if u not in cutset]
            i = nbrs.index(placeholder)
            rot[v] = nbrs[:i] + tuple(run) + nbrs[i + 1 :]
        else:
            rot[v] = nbrs
    for v, nbrs in child.rotation.items():
        if v not in cutset:
            rot[v] = nbrs
    return PlaneGraph.of(rot, outer=parent.outer)


def reassemble(node: DecompositionNode) -> PlaneGraph:
    """Undo the decomposition: splice every child back in, bottom-up."""
    g = node.graph
    for ch in node.children:
        assert ch.placeholder is not None and ch.cut is not None
        g = _splice(g, reassemble(ch), ch.placeholder, ch.cut)
    return g
