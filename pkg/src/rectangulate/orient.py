"""Maximizing the outside contacts that survive a redraw.

The input layout already decides which cell pairs could ever stay
neighbours: a cell reaches its region's boundary only on sides where no
cell of its own region blocks it.  Counting the surviving pairs per
region pair and side gives a weight table, and every optimizer here
maximizes the same sum; they differ in how much of the arrangement they
get to choose.

``solve_fixed_layout`` keeps a given arrangement and draws the best
compatible treemap.  ``optimize_component`` walks the quarter-turn
lattice of one component by solving a max-weight closure cut, and
``solve_unconstrained`` composes component optima across separating
4-cycles into the best arrangement sharing the input's extended dual.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dualgraph import MARKS, DecompositionNode, PlaneGraph, decompose_4cycles, extended_dual
from .extend import extend_selected, is_extensible, mark_engaged
from .geometry import (
    Adjacency,
    Cell,
    Direction,
    GlobalLayout,
    Rect,
    TwoLevelLayout,
    canonical_adjacencies,
    compress_global,
    validate_layout,
)
from .rel import (
    FlipEvent,
    FlipPoset,
    RegularEdgeLabeling,
    apply_flip,
    build_flip_poset,
    layout_from_labeling,
    validate_labeling,
)

# corner roles in ``corners`` tuple order
_SIDES = (Direction.LEFT, Direction.TOP, Direction.RIGHT, Direction.BOTTOM)


@dataclass(frozen=True)
class WeightTable:
    """How many outside contacts each region pair can keep, per side.

    Entries live once per unordered pair, keyed under the smaller name;
    ``weight`` answers for either order by flipping the direction.
    Missing entries mean zero.  Values may go negative: the free solver
    folds child component scores in as synthetic entries.
    """

    entries: Mapping[tuple[str, str, Direction], int]

    @staticmethod
    def of(
        entries: Mapping[tuple[str, str, Direction], int]
        | Iterable[tuple[tuple[str, str, Direction], int]],
    ) -> "WeightTable":
        items = entries.items() if isinstance(entries, Mapping) else entries
        out: dict[tuple[str, str, Direction], int] = {}
        for (a, b, d), w in items:
            if a == b:
                raise ValueError(f"weight between {a!r} and itself")
            key = (a, b, d) if a < b else (b, a, d.opposite)
            if out.setdefault(key, w) != w:
                raise ValueError(f"conflicting weights for pair {key[:2]!r}")
        return WeightTable(out)

    def weight(self, a: str, b: str, d: Direction) -> int:
        key = (a, b, d) if a < b else (b, a, d.opposite)
        return self.entries.get(key, 0)

    def merged(self, extra: Mapping[tuple[str, str, Direction], int]) -> "WeightTable":
        out = dict(self.entries)
        for key, w in WeightTable.of(extra).entries.items():
            if key in out:
                raise ValueError(f"entry {key!r} already present")
            out[key] = w
        return WeightTable(out)


def compute_weights(layout: TwoLevelLayout) -> WeightTable:
    """Count the outside contacts that can survive, per pair and side.

    A contact (a, b) with b on side d of a survives some redraw exactly
    when a can reach its region's d boundary and b the opposite one;
    every other contact is walled in by its own region.  Regions must be
    convex for reachability to be a per-cell question.
    """
    comps = layout.regions
    for name, comp in comps.items():
        if not comp.convex:
            raise ValueError(f"region {name!r} is not convex")
    region_of = {c.id: c.region for c in layout.cells}
    counts: dict[tuple[str, str, Direction], int] = defaultdict(int)
    for adj in layout.external_adjacencies:
        if adj.a > adj.b:
            continue  # each contact once; the table mirrors directions itself
        ra, rb = region_of[adj.a], region_of[adj.b]
        if is_extensible(comps[ra], adj.a, adj.direction) and is_extensible(
            comps[rb], adj.b, adj.direction.opposite
        ):
            key = (ra, rb, adj.direction) if ra < rb else (rb, ra, adj.direction.opposite)
            counts[key] += 1
    return WeightTable(dict(counts))


@dataclass(frozen=True)
class SolveReport:
    """What a solve produced, and the fate of every outside contact."""

    output: TwoLevelLayout
    preserved_external: int
    preserved_internal: int
    dropped: tuple[Adjacency, ...]
    new_adjacencies: tuple[Adjacency, ...]


def _make_report(layout: TwoLevelLayout, out: TwoLevelLayout) -> SolveReport:
    out_ext = {(a.a, a.b, a.direction) for a in out.external_adjacencies}
    out_int = {(a.a, a.b, a.direction) for a in out.internal_adjacencies}
    in_ext = {(a.a, a.b, a.direction) for a in layout.external_adjacencies}
    kept_ext = kept_int = 0
    dropped = []
    for adj in canonical_adjacencies(layout.external_adjacencies):
        if (adj.a, adj.b, adj.direction) in out_ext:
            kept_ext += 1
        else:
            dropped.append(adj)
    for adj in canonical_adjacencies(layout.internal_adjacencies):
        kept_int += (adj.a, adj.b, adj.direction) in out_int
    new = tuple(
        adj
        for adj in canonical_adjacencies(out.external_adjacencies)
        if (adj.a, adj.b, adj.direction) not in in_ext
    )
    return SolveReport(out, kept_ext, kept_int, tuple(dropped), new)


# ---------------------------------------------------------------------------
# fixed-target solving: extend every region, then order the grid lines


def _transpose(r: Rect) -> Rect:
    return Rect(r.y_min, r.x_min, r.y_max, r.x_max)


def _transpose_global(gl: GlobalLayout) -> GlobalLayout:
    return GlobalLayout.of(
        _transpose(gl.root), [(name, _transpose(r)) for name, r in gl.regions]
    )


def _axis_positions(
    target: GlobalLayout,
    ext: Mapping[str, Mapping[str, Rect]],
    pairs: Sequence[tuple[str, str, str, str]],
) -> dict[tuple[str, int], int]:
    """Output x for every vertical grid line of every extended region.

    Nodes are grid lines; target walls glue region boundaries together.
    Arcs force strict left-to-right order three ways: each region's own
    line chain, an x-overlap arc per surviving pair, and one interleaved
    chain per horizontal wall so that lines meeting the wall from below
    and from above never share an output coordinate (four cells would
    meet in a point there).  Each wall's chain is a topological merge of
    its two sides against the arcs already collected, so it never orders
    a pair apart.  Longest paths then give the tightest integer drawing.
    """
    boxes = {
        rid: Rect(
            min(r.x_min for r in m.values()),
            min(r.y_min for r in m.values()),
            max(r.x_max for r in m.values()),
            max(r.y_max for r in m.values()),
        )
        for rid, m in ext.items()
    }

    # maximal vertical walls of the target; touching collinear edges merge
    by_x: dict[int, list[tuple[int, int, str, str]]] = defaultdict(list)
    for rid, rect in target.by_id.items():
        by_x[rect.x_min].append((rect.y_min, rect.y_max, rid, "L"))
        by_x[rect.x_max].append((rect.y_min, rect.y_max, rid, "R"))
    wall_of: dict[tuple[str, str], tuple] = {}
    for x, segs in by_x.items():
        hi = None
        group = 0
        for y0, y1, rid, side in sorted(segs):
            if hi is None or y0 > hi:
                group += 1
                hi = y1
            else:
                hi = max(hi, y1)
            wall_of[(rid, side)] = ("w", x, group)

    arcs: set[tuple[tuple, tuple]] = set()
    nodes: set[tuple] = set()

    def node_of(rid: str, v: int) -> tuple:
        if v == boxes[rid].x_min:
            return wall_of[(rid, "L")]
        if v == boxes[rid].x_max:
            return wall_of[(rid, "R")]
        return ("r", rid, v)

    for rid, mapping in ext.items():
        xs = sorted({v for r in mapping.values() for v in (r.x_min, r.x_max)})
        chain = [node_of(rid, v) for v in xs]
        nodes.update(chain)
        arcs.update(zip(chain, chain[1:]))

    # vertically adjacent regions must keep overlapping in x
    for adj in target.adjacencies:
        if adj.direction is Direction.TOP:
            arcs.add((wall_of[(adj.a, "L")], wall_of[(adj.b, "R")]))
            arcs.add((wall_of[(adj.b, "L")], wall_of[(adj.a, "R")]))

    # horizontal walls: group the touching top/bottom edges into stretches
    root = target.root
    segs_at: dict[int, list[tuple[int, int, str, bool]]] = defaultdict(list)
    for rid, rect in target.by_id.items():
        if rect.y_max != root.y_max:
            segs_at[rect.y_max].append((rect.x_min, rect.x_max, rid, True))
        if rect.y_min != root.y_min:
            segs_at[rect.y_min].append((rect.x_min, rect.x_max, rid, False))
    stretches: list[tuple[list[tuple[int, str]], list[tuple[int, str]]]] = []
    top_stretch: dict[str, int] = {}
    for y in sorted(segs_at):
        below: list[tuple[int, str]] = []
        above: list[tuple[int, str]] = []
        hi = None
        for x0, x1, rid, is_below in sorted(segs_at[y]):
            if hi is not None and x0 > hi:
                stretches.append((below, above))
                below, above, hi = [], [], None
            hi = x1 if hi is None else max(hi, x1)
            (below if is_below else above).append((x0, rid))
        stretches.append((below, above))
    for i, (below, _above) in enumerate(stretches):
        for _x0, rid in below:
            top_stretch[rid] = i

    anchors: dict[int, list[tuple[str, str, str, str]]] = defaultdict(list)
    for ra, rb, a, b in pairs:
        anchors[top_stretch[ra]].append((ra, rb, a, b))

    def boundary_seq(side_regions: list[tuple[int, str]], top: bool) -> list[tuple]:
        seq: list[tuple] = []
        for j, (_x0, rid) in enumerate(side_regions):
            if j:
                seq.append(wall_of[(rid, "L")])
            edge = boxes[rid].y_max if top else boxes[rid].y_min
            row = sorted(
                (r for r in ext[rid].values() if (r.y_max if top else r.y_min) == edge),
                key=lambda r: r.x_min,
            )
            seq.extend(("r", rid, r.x_max) for r in row[:-1])
        return seq

    per_stretch: list[tuple[list[tuple], list[tuple]]] = []
    for i, (below, above) in enumerate(stretches):
        below.sort()
        above.sort()
        bseq = boundary_seq(below, top=True)
        aseq = boundary_seq(above, top=False)
        posb = {n: j for j, n in enumerate(bseq)}
        posa = {n: j for j, n in enumerate(aseq)}
        crossing: list[tuple[int, int, str, str]] = []
        for ra, rb, a, b in anchors.get(i, ()):
            la = node_of(ra, ext[ra][a].x_min)
            lb = node_of(rb, ext[rb][b].x_min)
            arcs.add((la, node_of(rb, ext[rb][b].x_max)))
            arcs.add((lb, node_of(ra, ext[ra][a].x_max)))
            crossing.append((posb.get(la, -1), posa.get(lb, -1), ra, rb))
        # Two survivor pairs cross when the target walks them in opposite
        # orders along the two sides of the wall; no coordinate assignment
        # can then satisfy both.  Targets drawn from the input's own dual
        # never do this, but a free-form target may.
        crossing.sort()
        best_above = -1
        j = 0
        while j < len(crossing):
            g = j
            while g < len(crossing) and crossing[g][0] == crossing[j][0]:
                g += 1
            for t in range(j, g):
                if crossing[t][1] < best_above:
                    raise ValueError(
                        f"target reverses the input's contact order between "
                        f"regions {crossing[t][2]!r} and {crossing[t][3]!r}; "
                        "the compatible contacts cannot all be preserved"
                    )
                best_above = max(best_above, crossing[t][1])
            j = g
        per_stretch.append((bseq, aseq))

    # Interleave each wall's two sides only after every insurance arc is
    # known, taking whichever side's next line nothing still pending must
    # precede; a blocked head on both sides means the surviving contacts
    # make contradictory demands across walls.
    rev: dict[tuple, set[tuple]] = defaultdict(set)
    for u, v in arcs:
        rev[v].add(u)

    def forced_after(head: tuple, pending: list[tuple]) -> bool:
        if not pending:
            return False
        want = set(pending)
        seen = {head}
        stack = [head]
        while stack:
            for u in rev[stack.pop()]:
                if u in want:
                    return True
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return False

    for bseq, aseq in per_stretch:
        emitted: list[tuple] = []
        bi = ai = 0
        while bi < len(bseq) or ai < len(aseq):
            if bi < len(bseq) and not forced_after(bseq[bi], aseq[ai:]):
                nxt = bseq[bi]
                bi += 1
            elif ai < len(aseq) and not forced_after(aseq[ai], bseq[bi:]):
                nxt = aseq[ai]
                ai += 1
            else:
                raise ValueError(
                    "surviving contacts order the cell boundaries along a "
                    "shared wall in contradictory ways for this target"
                )
            if emitted:
                arcs.add((emitted[-1], nxt))
                rev[nxt].add(emitted[-1])
            emitted.append(nxt)

    for u, v in arcs:
        nodes.add(u)
        nodes.add(v)
    succ: dict[tuple, list[tuple]] = defaultdict(list)
    indeg: dict[tuple, int] = defaultdict(int)
    for u, v in sorted(arcs):
        succ[u].append(v)
        indeg[v] += 1
    queue = deque(sorted(n for n in nodes if not indeg[n]))
    coord: dict[tuple, int] = {n: 0 for n in queue}
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in succ[u]:
            coord[v] = max(coord.get(v, 0), coord[u] + 1)
            indeg[v] -= 1
            if not indeg[v]:
                queue.append(v)
    if seen != len(nodes):
        raise AssertionError("line ordering constraints form a cycle")
    return {
        (rid, v): coord[node_of(rid, v)]
        for rid, mapping in ext.items()
        for r in mapping.values()
        for v in (r.x_min, r.x_max)
    }


def solve_fixed_layout(layout: TwoLevelLayout, target: GlobalLayout) -> SolveReport:
    """Redraw the layout with its regions arranged as ``target`` says.

    Every oriented contact inside a region survives.  Outside contacts
    survive exactly when the weight table says they can, and the report
    is checked against that sum before returning.
    """
    weights = compute_weights(layout)  # also rejects non-convex regions
    comps = layout.regions
    marks = mark_engaged(layout, target)
    chosen: dict[str, set[tuple[str, Direction]]] = {r: set() for r in comps}
    for m in marks:
        region = layout.by_id[m.cell_id].region
        if is_extensible(comps[region], m.cell_id, m.direction):
            chosen[region].add((m.cell_id, m.direction))
    ext = {
        r: dict(
            extend_selected(
                comps[r], sorted(chosen[r], key=lambda s: (s[0], s[1].value))
            ).mapping
        )
        for r in comps
    }

    region_of = {c.id: c.region for c in layout.cells}
    axis_pairs: dict[Direction, list[tuple[str, str, str, str]]] = {
        Direction.TOP: [],
        Direction.RIGHT: [],
    }
    for adj in layout.external_adjacencies:
        if adj.direction not in axis_pairs:
            continue
        ra, rb = region_of[adj.a], region_of[adj.b]
        if target.direction_between(ra, rb) is not adj.direction:
            continue
        if is_extensible(comps[ra], adj.a, adj.direction) and is_extensible(
            comps[rb], adj.b, adj.direction.opposite
        ):
            axis_pairs[adj.direction].append((ra, rb, adj.a, adj.b))

    xs = _axis_positions(target, ext, axis_pairs[Direction.TOP])
    ys = _axis_positions(
        _transpose_global(target),
        {r: {cid: _transpose(rc) for cid, rc in m.items()} for r, m in ext.items()},
        axis_pairs[Direction.RIGHT],
    )
    cells = [
        Cell(
            cid,
            Rect(xs[(r, rc.x_min)], ys[(r, rc.y_min)], xs[(r, rc.x_max)], ys[(r, rc.y_max)]),
            r,
        )
        for r in sorted(ext)
        for cid, rc in sorted(ext[r].items())
    ]
    width = max(c.rect.x_max for c in cells)
    height = max(c.rect.y_max for c in cells)
    out = TwoLevelLayout.of(Rect(0, 0, width, height), cells)
    problems = validate_layout(out)
    if problems:
        raise AssertionError(f"drawn layout is invalid: {problems[0].message}")

    report = _make_report(layout, out)
    expected = sum(
        weights.weight(adj.a, adj.b, adj.direction)
        for adj in canonical_adjacencies(target.adjacencies)
    )
    if report.preserved_external != expected:
        raise AssertionError("preserved contacts disagree with the weight table")
    if report.preserved_internal != len(canonical_adjacencies(layout.internal_adjacencies)):
        raise AssertionError("an inside contact was lost in the redraw")
    return report


# ---------------------------------------------------------------------------
# lattice optimization: max-weight closures of the rotation poset


class _Dinic:
    """Just enough max-flow for the closure cuts below."""

    def __init__(self, n: int) -> None:
        self.adj: list[list[list[int]]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int) -> None:
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def _bfs(self, s: int, t: int) -> list[int] | None:
        level = [-1] * len(self.adj)
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _rev in self.adj[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u: int, t: int, f: int, level: list[int], it: list[int]) -> int:
        if u == t:
            return f
        while it[u] < len(self.adj[u]):
            edge = self.adj[u][it[u]]
            v, cap, rev = edge
            if cap > 0 and level[v] == level[u] + 1:
                d = self._dfs(v, t, min(f, cap), level, it)
                if d > 0:
                    edge[1] -= d
                    self.adj[v][rev][1] += d
                    return d
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while (level := self._bfs(s, t)) is not None:
            it = [0] * len(self.adj)
            while (pushed := self._dfs(s, t, 1 << 62, level, it)) > 0:
                flow += pushed
        return flow

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, cap, _rev in self.adj[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def max_weight_closure(poset: FlipPoset) -> tuple[frozenset[FlipEvent], int]:
    """Best downward-closed event set by total weight; exact, via min-cut.

    The classic reduction: a source feeds positive events, negative
    events feed the sink, and an infinite arc per dependency keeps
    closures intact across the cut.  Ties go to the smallest optimal
    closure (the residual-reachable side), so an all-nonpositive poset
    yields the empty set.
    """
    if not poset.events:
        return frozenset(), 0
    idx = {e: i + 2 for i, e in enumerate(poset.events)}
    inf = sum(abs(poset.weights.get(e, 0)) for e in poset.events) + 1
    net = _Dinic(len(poset.events) + 2)
    for e in poset.events:
        w = poset.weights.get(e, 0)
        if w > 0:
            net.add(0, idx[e], w)
        elif w < 0:
            net.add(idx[e], 1, -w)
        for p in poset.preds[e]:
            net.add(idx[e], idx[p], inf)
    net.max_flow(0, 1)
    reach = net.reachable(0)
    chosen = frozenset(e for e in poset.events if idx[e] in reach)
    return chosen, sum(poset.weights.get(e, 0) for e in chosen)


def labeling_weight(rel: RegularEdgeLabeling, weights: WeightTable) -> int:
    """Total table weight of the contacts a labeling commits to."""
    total = 0
    for u, v in rel.blue:
        total += weights.weight(u, v, Direction.RIGHT)
    for u, v in rel.red:
        total += weights.weight(u, v, Direction.TOP)
    return total


def assign_flip_weights(poset: FlipPoset, weights: WeightTable) -> FlipPoset:
    """Attach the contact gain of each quarter turn, replayed in order.

    Walking the ascent that built the poset keeps every edge's current
    side known, so an event's weight is the table difference across its
    turn, summed over the four spokes for a vertex event.  Along any
    maximal chain the differences telescope to the gap between the end
    labelings' totals.
    """
    out: dict[FlipEvent, int] = {}
    current = poset.base
    for ev in poset.events:
        item = ev.item
        edges = (
            [(item, u) for u in current.graph.rotation[item]]
            if isinstance(item, str)
            else [item]
        )
        gain = 0
        for a, b in edges:
            d = current.direction(a, b)
            gain += weights.weight(a, b, d.ccw()) - weights.weight(a, b, d)
        out[ev] = gain
        current = apply_flip(current, item, ccw=True)
    return poset.with_weights(out)


def optimize_component(
    start: RegularEdgeLabeling, weights: WeightTable
) -> tuple[RegularEdgeLabeling, int]:
    """Best labeling in ``start``'s rotation lattice, with its weight.

    The lattice is explored implicitly: weight the rotation poset, solve
    the max-weight closure, and realize the winning ideal.  The returned
    weight is absolute and re-counted from the winner as a self-check.
    """
    poset = assign_flip_weights(build_flip_poset(start), weights)
    chosen, gain = max_weight_closure(poset)
    best = poset.realize(chosen)
    total = labeling_weight(poset.base, weights) + gain
    if labeling_weight(best, weights) != total:
        raise AssertionError("event weights lost track of the contact total")
    return best, total


# ---------------------------------------------------------------------------
# the free variant: optimize every separation component, then compose


def _rot_cw(r: Rect, box: Rect) -> Rect:
    """Quarter-turn ``r`` clockwise inside ``box``; result is origin-based."""
    w = box.x_max - box.x_min
    return Rect(
        r.y_min - box.y_min,
        w - (r.x_max - box.x_min),
        r.y_max - box.y_min,
        w - (r.x_min - box.x_min),
    )


def _cut_side(rect: Rect, box: Rect) -> Direction:
    """Which side of ``box`` this outside rectangle covers in full."""
    if rect.x_max == box.x_min and rect.y_min <= box.y_min and rect.y_max >= box.y_max:
        return Direction.LEFT
    if rect.x_min == box.x_max and rect.y_min <= box.y_min and rect.y_max >= box.y_max:
        return Direction.RIGHT
    if rect.y_max == box.y_min and rect.x_min <= box.x_min and rect.x_max >= box.x_max:
        return Direction.BOTTOM
    if rect.y_min == box.y_max and rect.x_min <= box.x_min and rect.x_max >= box.x_max:
        return Direction.TOP
    raise AssertionError("cut region does not cover a full block side")


_MARK_SIDE = dict(zip(MARKS, _SIDES))


def _component_labeling(
    graph: PlaneGraph,
    rects: Mapping[str, Rect],
    corners: tuple[str, str, str, str],
) -> RegularEdgeLabeling:
    """Read one component's labeling off drawn rectangles.

    ``rects`` places every non-corner vertex; the corner vertices play
    the box sides in (left, top, right, bottom) order.
    """
    role = dict(zip(corners, _SIDES))
    blue: set[tuple[str, str]] = set()
    red: set[tuple[str, str]] = set()
    for e in graph.edges:
        u, v = sorted(e)
        if u in role and v in role:
            continue
        if v in role:
            u, v = v, u
        if u in role:
            d = role[u]
            if d is Direction.LEFT:
                blue.add((u, v))
            elif d is Direction.RIGHT:
                blue.add((v, u))
            elif d is Direction.BOTTOM:
                red.add((u, v))
            else:
                red.add((v, u))
            continue
        ru, rv = rects[u], rects[v]
        if ru.x_max == rv.x_min and min(ru.y_max, rv.y_max) > max(ru.y_min, rv.y_min):
            blue.add((u, v))
        elif rv.x_max == ru.x_min and min(ru.y_max, rv.y_max) > max(ru.y_min, rv.y_min):
            blue.add((v, u))
        elif ru.y_max == rv.y_min and min(ru.x_max, rv.x_max) > max(ru.x_min, rv.x_min):
            red.add((u, v))
        elif rv.y_max == ru.y_min and min(ru.x_max, rv.x_max) > max(ru.x_min, rv.x_min):
            red.add((v, u))
        else:
            raise AssertionError(f"linked rectangles {u!r}, {v!r} do not touch")
    rel = RegularEdgeLabeling(graph, corners, frozenset(blue), frozenset(red))
    validate_labeling(rel)
    return rel


@dataclass
class _Solved:
    """One decomposition node's optima, for all four ways to place it."""

    node: DecompositionNode
    by_k: dict[int, tuple[RegularEdgeLabeling, int]]
    children: list["_Solved"]
    carrier: str | None = None  # cut vertex whose fold entries carry the score
    side0: Direction | None = None  # carrier's side before any rotation


def _solve_node(
    node: DecompositionNode, rect_of: Mapping[str, Rect], table: WeightTable
) -> _Solved:
    root = node.placeholder is None
    kids = [_solve_node(ch, rect_of, table) for ch in node.children]
    extra: dict[tuple[str, str, Direction], int] = {}
    for s in kids:
        p = s.node.placeholder
        assert p is not None and s.carrier is not None and s.side0 is not None
        for k in range(4):
            extra[(p, s.carrier, s.side0.cw(k))] = s.by_k[k][1]
    local = table.merged(extra) if extra else table

    cut = MARKS if root else node.cut
    assert cut is not None
    cset = set(cut)
    interior = [v for v in node.graph.vertices if v not in cset]
    rects = {v: rect_of[v] for v in interior}
    box = Rect(
        min(r.x_min for r in rects.values()),
        min(r.y_min for r in rects.values()),
        max(r.x_max for r in rects.values()),
        max(r.y_max for r in rects.values()),
    )
    role0 = {
        c: _MARK_SIDE[c] if c in _MARK_SIDE else _cut_side(rect_of[c], box)
        for c in cut
    }
    if len(set(role0.values())) != 4:
        raise AssertionError("cut regions do not cover four distinct sides")
    outer0 = tuple(
        next(c for c in cut if role0[c] is side) for side in _SIDES
    )
    graph = PlaneGraph.of(node.graph.rotation, outer=outer0)

    by_k: dict[int, tuple[RegularEdgeLabeling, int]] = {}
    for k in (0,) if root else range(4):
        corners = tuple(
            next(c for c in cut if role0[c].cw(k) is side) for side in _SIDES
        )
        start = _component_labeling(graph, rects, corners)  # type: ignore[arg-type]
        by_k[k] = optimize_component(start, local)
        rects = {v: _rot_cw(r, box) for v, r in rects.items()}
        box = _rot_cw(box, box)
    if root:
        return _Solved(node, by_k, kids)
    carrier = min(cset)
    return _Solved(node, by_k, kids, carrier, role0[carrier])


def _graft(host: GlobalLayout, p: str, sub: GlobalLayout) -> GlobalLayout:
    """Replace region ``p`` of ``host`` by a whole drawn component.

    Host coordinates are scaled up far enough that the transplanted
    interior lines can never collide with host lines crossing the patch
    column or row, so no four-corner point can appear at the seam.
    """
    pr = host.by_id[p]
    mx = sub.root.x_max - sub.root.x_min + 1
    my = sub.root.y_max - sub.root.y_min + 1

    def gx(x: int) -> int:
        return pr.x_max * mx if x == sub.root.x_max else pr.x_min * mx + x - sub.root.x_min

    def gy(y: int) -> int:
        return pr.y_max * my if y == sub.root.y_max else pr.y_min * my + y - sub.root.y_min

    regions = [
        (name, Rect(r.x_min * mx, r.y_min * my, r.x_max * mx, r.y_max * my))
        for name, r in host.regions
        if name != p
    ]
    regions += [
        (name, Rect(gx(r.x_min), gy(r.y_min), gx(r.x_max), gy(r.y_max)))
        for name, r in sub.regions
    ]
    root = Rect(
        host.root.x_min * mx, host.root.y_min * my, host.root.x_max * mx, host.root.y_max * my
    )
    return GlobalLayout.of(root, regions)


def _compose(sol: _Solved, k: int) -> GlobalLayout:
    """Draw a solved component and transplant its children into place."""
    lab = sol.by_k[k][0]
    gl = layout_from_labeling(lab)
    for s in sol.children:
        p = s.node.placeholder
        assert p is not None and s.carrier is not None and s.side0 is not None
        d = lab.direction(p, s.carrier)
        kk = next(k2 for k2 in range(4) if s.side0.cw(k2) is d)
        gl = _graft(gl, p, _compose(s, kk))
    return gl


def solve_unconstrained(layout: TwoLevelLayout) -> SolveReport:
    """Free-arrangement variant: the best layout sharing the input's dual.

    Decomposes the extended dual along nontrivial separating 4-cycles,
    optimizes each component's rotation lattice for all four placements,
    folds child optima into a synthetic weight on one placeholder edge,
    and realizes the winning arrangement with the fixed-target solver.
    """
    table = compute_weights(layout)
    gl = layout.global_layout
    tree = decompose_4cycles(extended_dual(gl))
    rect_of = dict(gl.by_id)
    for node in reversed(list(tree.walk())):  # children before their parents
        if node.placeholder is None:
            continue
        cset = set(node.cut or ())
        inner = [rect_of[v] for v in node.graph.vertices if v not in cset]
        rect_of[node.placeholder] = Rect(
            min(r.x_min for r in inner),
            min(r.y_min for r in inner),
            max(r.x_max for r in inner),
            max(r.y_max for r in inner),
        )
    solved = _solve_node(tree, rect_of, table)
    target = compress_global(_compose(solved, 0))
    report = solve_fixed_layout(layout, target)
    if report.preserved_external != solved.by_k[0][1]:
        raise AssertionError("composed score and drawn layout disagree")
    return report
