"""Regular edge labelings: the combinatorial encoding of region layouts.

A labeling colors every inner edge of an embedded region graph either
blue (the two regions share a vertical boundary, directed left to
right) or red (horizontal boundary, directed bottom to top).  Around
every inner vertex the four kinds of incidence appear as contiguous
nonempty blocks in counterclockwise order -- outgoing blue, outgoing
red, incoming blue, incoming red -- matching the right, top, left and
bottom sides of the region.  The four outer vertices act as the sides
of the bounding box: every inner edge at them carries one fixed label.

Labelings of a fixed graph form a distributive lattice whose covering
moves rotate one item -- a single edge, or all four edges of a
degree-4 inner vertex at once -- a quarter turn counterclockwise.
``build_flip_poset`` walks from the lattice minimum to the maximum and
records, for every individual rotation along the way, the earlier
rotations it depends on; downward-closed sets of the resulting event
poset correspond exactly to the labelings reachable by counterclockwise
moves.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .dualgraph import MARKS, PlaneGraph, extended_dual
from .geometry import Direction, GlobalLayout, Rect, TwoLevelLayout

log = logging.getLogger(__name__)

#: Flip item: an inner edge as a sorted vertex pair, or a vertex id.
FlipItem = tuple[str, str] | str

# edge states cycle under a counterclockwise quarter turn:
# blue forward (right of) -> red forward (above) -> blue backward -> ...
_CCW_STATE = {
    ("blue", True): ("red", True),
    ("red", True): ("blue", False),
    ("blue", False): ("red", False),
    ("red", False): ("blue", True),
}
_CW_STATE = {v: k for k, v in _CCW_STATE.items()}

# side roles, by position in the ``corners`` tuple
_LEFT, _TOP, _RIGHT, _BOTTOM = range(4)


class LabelingError(ValueError):
    """A labeling or flip request violates the structural rules."""


@dataclass(frozen=True)
class RegularEdgeLabeling:
    """Colored orientation of the inner edges of an embedded graph.

    ``corners`` names the four outer vertices in the order of the outer
    face walk, starting with the one playing the left side; rotating
    this tuple reorients the same graph.  ``blue`` and ``red`` hold
    directed pairs; an edge appears in exactly one of them, in exactly
    one direction.
    """

    graph: PlaneGraph
    corners: tuple[str, str, str, str]
    blue: frozenset[tuple[str, str]]
    red: frozenset[tuple[str, str]]

    def __hash__(self) -> int:
        return hash((self.corners, self.blue, self.red))

    @cached_property
    def corner_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.corners)}

    @cached_property
    def inner_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.graph.vertices if v not in self.corner_index)

    def state(self, a: str, b: str) -> tuple[str, bool]:
        """(color, forward) of edge a-b; forward means directed a -> b."""
        if (a, b) in self.blue:
            return ("blue", True)
        if (b, a) in self.blue:
            return ("blue", False)
        if (a, b) in self.red:
            return ("red", True)
        if (b, a) in self.red:
            return ("red", False)
        raise LabelingError(f"edge {a!r}-{b!r} carries no label")

    def direction(self, a: str, b: str) -> Direction:
        """Which side of region ``a`` the neighbour ``b`` lies on."""
        color, fwd = self.state(a, b)
        if color == "blue":
            return Direction.RIGHT if fwd else Direction.LEFT
        return Direction.TOP if fwd else Direction.BOTTOM

    def with_edges(
        self, blue: Iterable[tuple[str, str]], red: Iterable[tuple[str, str]]
    ) -> "RegularEdgeLabeling":
        return RegularEdgeLabeling(self.graph, self.corners, frozenset(blue), frozenset(red))


def _is_outer_edge(rel: RegularEdgeLabeling, a: str, b: str) -> bool:
    return a in rel.corner_index and b in rel.corner_index


def _vertex_ok(rel: RegularEdgeLabeling, v: str) -> bool:
    """Local labeling rule at one vertex."""
    role = rel.corner_index.get(v)
    if role is not None:
        want = {
            _LEFT: ("blue", True),
            _RIGHT: ("blue", False),
            _BOTTOM: ("red", True),
            _TOP: ("red", False),
        }[role]
        for u in rel.graph.rotation[v]:
            if u in rel.corner_index:
                continue
            if rel.state(v, u) != want:
                return False
        return True
    codes = []
    for u in rel.graph.rotation[v]:
        color, fwd = rel.state(v, u)
        codes.append((color, fwd))
    if len(codes) < 4:
        return False
    # exactly four nonempty blocks, counterclockwise in the order
    # blue-out (right side), red-out (top), blue-in (left), red-in (bottom)
    ring = ["blue-out", "red-out", "blue-in", "red-in"]
    names = {
        ("blue", True): "blue-out",
        ("red", True): "red-out",
        ("blue", False): "blue-in",
        ("red", False): "red-in",
    }
    seq = [names[c] for c in codes]
    starts = [i for i in range(len(seq)) if seq[i] != seq[i - 1]]
    if len(starts) != 4:
        return False
    order = [seq[i] for i in starts]
    k = order.index("blue-out") if "blue-out" in order else -1
    return k >= 0 and order[k:] + order[:k] == ring


def validate_labeling(rel: RegularEdgeLabeling) -> None:
    """Raise LabelingError unless ``rel`` is regular everywhere."""
    g = rel.graph
    if g.outer is None:
        raise LabelingError("labeled graph needs a designated outer face")
    rots = {tuple(g.outer[i:] + g.outer[:i]) for i in range(len(g.outer))}
    if rel.corners not in rots:
        raise LabelingError("corners must be a rotation of the outer face walk")
    labeled = set()
    for u, v in (*rel.blue, *rel.red):
        if not g.has_edge(u, v):
            raise LabelingError(f"label on missing edge {u!r}-{v!r}")
        if _is_outer_edge(rel, u, v):
            raise LabelingError(f"outer edge {u!r}-{v!r} must stay unlabeled")
        pair = frozenset((u, v))
        if pair in labeled:
            raise LabelingError(f"edge {u!r}-{v!r} labeled twice")
        labeled.add(pair)
    inner = {e for e in g.edges if not all(x in rel.corner_index for x in e)}
    if labeled != inner:
        missing = sorted(tuple(sorted(e)) for e in inner - labeled)
        raise LabelingError(f"unlabeled inner edges: {missing}")
    for v in g.vertices:
        if not _vertex_ok(rel, v):
            raise LabelingError(f"labeling is irregular at {v!r}")


def labeling_from_layout(layout: GlobalLayout | TwoLevelLayout) -> RegularEdgeLabeling:
    """Read the labeling off a drawn layout: side relations become colors."""
    if isinstance(layout, TwoLevelLayout):
        layout = layout.global_layout
    g = extended_dual(layout)
    root = layout.root
    blue = set()
    red = set()
    for a, b, d, _ov in layout.adjacencies:
        if d is Direction.RIGHT:
            blue.add((a, b))
        elif d is Direction.TOP:
            red.add((a, b))
    for rid, rect in layout.by_id.items():
        if rect.x_min == root.x_min:
            blue.add((MARKS[_LEFT], rid))
        if rect.x_max == root.x_max:
            blue.add((rid, MARKS[_RIGHT]))
        if rect.y_min == root.y_min:
            red.add((MARKS[_BOTTOM], rid))
        if rect.y_max == root.y_max:
            red.add((rid, MARKS[_TOP]))
    rel = RegularEdgeLabeling(g, MARKS, frozenset(blue), frozenset(red))
    validate_labeling(rel)
    return rel


# ---------------------------------------------------------------------------
# drawing a labeling


class _DSU:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _wall_coordinates(
    regions: Sequence[str],
    edges: Iterable[tuple[str, str]],
    cross: Iterable[tuple[str, str]],
    lo_corner: str,
    hi_corner: str,
) -> tuple[dict[str, int], dict[str, int], int]:
    """Longest-path positions of the walls induced by one color class.

    ``edges`` of the measured axis merge into shared walls; ``cross``
    edges of the other color order the walls further, so that regions
    touching across the other axis overlap by at least one unit on this
    one (otherwise staggered walls could collapse into alignment and
    pinch a contact down to a point).  Returns (low side per region,
    high side per region, total extent).
    """
    dsu = _DSU()
    LO, HI = ("wall", "lo"), ("wall", "hi")
    for u, v in edges:
        if u == lo_corner:
            dsu.union(("lo-of", v), LO)
        elif v == hi_corner:
            dsu.union(("hi-of", u), HI)
        else:
            dsu.union(("hi-of", u), ("lo-of", v))
    succ: dict = {}
    indeg: dict = {}
    nodes = {dsu.find(LO), dsu.find(HI)}

    def arc(a, b) -> None:
        succ.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1

    region_set = set(regions)
    for r in regions:
        a, b = dsu.find(("lo-of", r)), dsu.find(("hi-of", r))
        nodes.update((a, b))
        arc(a, b)
    for u, v in cross:
        if u in region_set and v in region_set:
            arc(dsu.find(("lo-of", u)), dsu.find(("hi-of", v)))
            arc(dsu.find(("lo-of", v)), dsu.find(("hi-of", u)))
    order = [n for n in nodes if indeg.get(n, 0) == 0]
    pos = {n: 0 for n in order}
    seen = []
    while order:
        n = order.pop()
        seen.append(n)
        for m in succ.get(n, ()):
            pos[m] = max(pos.get(m, 0), pos[n] + 1)
            indeg[m] -= 1
            if indeg[m] == 0:
                order.append(m)
    if len(seen) != len(nodes):
        raise LabelingError("labeling walls form a cycle; not a valid labeling")
    lo = {r: pos[dsu.find(("lo-of", r))] for r in regions}
    hi = {r: pos[dsu.find(("hi-of", r))] for r in regions}
    return lo, hi, pos[dsu.find(HI)]


def layout_from_labeling(rel: RegularEdgeLabeling) -> GlobalLayout:
    """Draw the labeling: longest-path layering of the wall classes.

    The four corner vertices become the sides of the root rectangle;
    every other vertex becomes a region.
    """
    validate_labeling(rel)
    regions = rel.inner_vertices
    left_c, top_c, right_c, bottom_c = rel.corners
    x_lo, x_hi, width = _wall_coordinates(regions, rel.blue, rel.red, left_c, right_c)
    y_lo, y_hi, height = _wall_coordinates(regions, rel.red, rel.blue, bottom_c, top_c)
    rects = {
        r: Rect(x_lo[r], y_lo[r], x_hi[r], y_hi[r]) for r in regions
    }
    return GlobalLayout.of(Rect(0, 0, width, height), rects)


# ---------------------------------------------------------------------------
# flips


def _rotated_sets(
    rel: RegularEdgeLabeling, pairs: Sequence[tuple[str, str]], ccw: bool
) -> RegularEdgeLabeling:
    """New labeling with each (a, b) edge turned a quarter turn."""
    blue = set(rel.blue)
    red = set(rel.red)
    table = _CCW_STATE if ccw else _CW_STATE
    for a, b in pairs:
        color, fwd = rel.state(a, b)
        (blue if color == "blue" else red).discard((a, b) if fwd else (b, a))
        ncolor, nfwd = table[(color, fwd)]
        (blue if ncolor == "blue" else red).add((a, b) if nfwd else (b, a))
    return rel.with_edges(blue, red)


def _try_flip(
    rel: RegularEdgeLabeling, item: FlipItem, ccw: bool
) -> RegularEdgeLabeling | None:
    """The flipped labeling, or None when the move breaks regularity."""
    if isinstance(item, str):
        if item in rel.corner_index:
            return None
        nbrs = rel.graph.rotation.get(item)
        if nbrs is None or len(nbrs) != 4:
            return None
        out = _rotated_sets(rel, [(item, u) for u in nbrs], ccw)
        check = (item, *nbrs)
    else:
        a, b = item
        if not rel.graph.has_edge(a, b) or _is_outer_edge(rel, a, b):
            return None
        out = _rotated_sets(rel, [(a, b)], ccw)
        check = (a, b)
    if all(_vertex_ok(out, v) for v in check):
        return out
    return None


def apply_flip(rel: RegularEdgeLabeling, item: FlipItem, ccw: bool = True) -> RegularEdgeLabeling:
    """Rotate one item a quarter turn; LabelingError when not applicable."""
    out = _try_flip(rel, item, ccw)
    if out is None:
        raise LabelingError(f"flip not applicable: {item!r}")
    return out


def flip_candidates(rel: RegularEdgeLabeling) -> list[FlipItem]:
    """Items that could ever rotate: inner region-region edges and
    degree-4 inner vertices (corner-incident edges never move)."""
    items: list[FlipItem] = []
    for e in rel.graph.edges:
        a, b = sorted(e)
        if a not in rel.corner_index and b not in rel.corner_index:
            items.append((a, b))
    for v in rel.inner_vertices:
        if len(rel.graph.rotation[v]) == 4:
            items.append(v)
    return sorted(items, key=_item_key)


def _item_key(item: FlipItem) -> tuple[str, str, str]:
    if isinstance(item, str):
        return ("vertex", item, "")
    return ("edge", item[0], item[1])


def applicable_flips(rel: RegularEdgeLabeling, ccw: bool = True) -> list[FlipItem]:
    return [it for it in flip_candidates(rel) if _try_flip(rel, it, ccw) is not None]


def minimal_labeling(rel: RegularEdgeLabeling) -> RegularEdgeLabeling:
    """Descend by clockwise moves to the unique lattice minimum."""
    current = rel
    items = flip_candidates(rel)
    budget = 4 * (len(items) + 4) ** 2
    moved = True
    while moved:
        moved = False
        for item in items:
            nxt = _try_flip(current, item, ccw=False)
            while nxt is not None:
                budget -= 1
                if budget < 0:
                    raise LabelingError("descent did not terminate; labeling broken")
                current = nxt
                moved = True
                nxt = _try_flip(current, item, ccw=False)
    return current


# ---------------------------------------------------------------------------
# the event poset


class FlipEvent(NamedTuple):
    """The ``number``-th quarter turn of ``item`` on the way up the lattice."""

    item: FlipItem
    number: int


@dataclass(frozen=True)
class FlipPoset:
    """Counterclockwise rotation events and their dependency order.

    ``events`` is a linear extension (the ascent that built the poset);
    ``preds`` maps an event to every event strictly below it, i.e. the
    events present in any labeling where it has happened.  Downward-
    closed event sets correspond one-to-one with the labelings reachable
    from ``base`` by counterclockwise moves.  ``weights`` is attached by
    the optimizers; it defaults to all zero.
    """

    base: RegularEdgeLabeling
    events: tuple[FlipEvent, ...]
    preds: Mapping[FlipEvent, frozenset[FlipEvent]]  # full down-sets
    weights: Mapping[FlipEvent, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.events)

    def with_weights(self, weights: Mapping[FlipEvent, int]) -> "FlipPoset":
        unknown = set(weights) - set(self.events)
        if unknown:
            raise LabelingError(f"weights for unknown events: {sorted(unknown)!r}")
        return FlipPoset(self.base, self.events, self.preds, dict(weights))

    def is_closed(self, chosen: frozenset[FlipEvent]) -> bool:
        return all(self.preds[e] <= chosen for e in chosen)

    def realize(self, chosen: Iterable[FlipEvent]) -> RegularEdgeLabeling:
        """Apply a downward-closed set of events to the base labeling."""
        chosen = frozenset(chosen)
        if not self.is_closed(chosen):
            raise LabelingError("event set is not downward closed")
        current = self.base
        for e in self.events:  # ascent order is a linear extension
            if e in chosen:
                current = apply_flip(current, e.item, ccw=True)
        return current

    def all_closed_sets(self) -> Iterator[frozenset[FlipEvent]]:
        """Every downward-closed subset (exponential; small posets only)."""

        def grow(i: int, chosen: frozenset[FlipEvent]) -> Iterator[frozenset[FlipEvent]]:
            if i == len(self.events):
                yield chosen
                return
            e = self.events[i]
            yield from grow(i + 1, chosen)
            if self.preds[e] <= chosen:
                yield from grow(i + 1, chosen | {e})

        return grow(0, frozenset())


def _touched_vertices(item: FlipItem, rel: RegularEdgeLabeling) -> tuple[str, ...]:
    if isinstance(item, str):
        return (item, *rel.graph.rotation[item])
    return item


def _down_set(
    state: RegularEdgeLabeling, counts: Mapping[FlipItem, int], target: FlipEvent
) -> frozenset[FlipEvent]:
    """Events of the least labeling in which ``target`` has happened.

    Clockwise descent that never unwinds ``target`` itself.  Any other
    undoable rotation sits above or beside the target in the lattice, so
    undoing it keeps a labeling containing the event; the walk can only
    stop once exactly the target and what it depends on remain.
    """
    left = {it: c for it, c in counts.items() if c}
    budget = 4 * (sum(left.values()) + 4) ** 2
    moved = True
    while moved:
        moved = False
        for item in sorted(left, key=_item_key):
            while left[item] and (item, left[item]) != target:
                nxt = _try_flip(state, item, ccw=False)
                if nxt is None:
                    break
                budget -= 1
                if budget < 0:
                    raise LabelingError("descent did not terminate; labeling broken")
                state = nxt
                left[item] -= 1
                moved = True
    return frozenset(
        FlipEvent(it, j) for it, c in left.items() for j in range(1, c + 1)
    )


def build_flip_poset(rel: RegularEdgeLabeling) -> FlipPoset:
    """Ascend from the lattice minimum, recording every rotation event.

    An event depends on everything in its down-set, found by walking
    back down from the point where it happened (see ``_down_set``); a
    single enabling move is not enough, because an event can wait on
    several others at once.  Applicable counterclockwise moves must stay
    applicable until used; the builder verifies this as it goes.
    """
    base = minimal_labeling(rel)
    items = flip_candidates(base)
    by_vertex: dict[str, list[FlipItem]] = {}
    for it in items:
        for v in _touched_vertices(it, base):
            by_vertex.setdefault(v, []).append(it)
    current = base
    count: dict[FlipItem, int] = {it: 0 for it in items}
    usable = {it for it in items if _try_flip(base, it, ccw=True) is not None}
    at_base = frozenset(usable)
    events: list[FlipEvent] = []
    preds: dict[FlipEvent, frozenset[FlipEvent]] = {}
    budget = 4 * (len(items) + 4) ** 2
    while usable:
        if len(events) > budget:
            raise LabelingError("ascent did not terminate; labeling broken")
        item = min(usable, key=_item_key)
        count[item] += 1
        ev = FlipEvent(item, count[item])
        current = apply_flip(current, item, ccw=True)
        events.append(ev)
        if ev.number == 1 and item in at_base:
            preds[ev] = frozenset()  # applicable from the start: waits on nothing
        else:
            preds[ev] = _down_set(current, count, ev) - {ev}
        affected = {
            other
            for v in _touched_vertices(item, current)
            for other in by_vertex.get(v, ())
        }
        affected.add(item)
        for other in affected:
            now = _try_flip(current, other, ccw=True) is not None
            was = other in usable
            if now and not was:
                usable.add(other)
            elif was and not now:
                if other != item:
                    raise LabelingError(
                        "a pending rotation was disabled; the lattice model broke"
                    )
                usable.discard(item)
    poset = FlipPoset(base, tuple(events), preds)
    log.debug("flip poset: %d events from %d items", len(events), len(items))
    return poset
