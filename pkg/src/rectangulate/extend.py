"""Rectangular extensions of rectangle complexes.

A rectangular extension enlarges every cell of a complex (cell ids and
adjacency orientations unchanged, new contacts allowed) until the union
of the cells is exactly the bounding rectangle.  The constructions here
grow cells into hole space one full edge at a time; stuck "windmill"
holes (four cells cyclically overhanging a rectangular hole) are
dissolved by raising the ledge under the hole, and residual four-corner
points are repaired by a half-unit shear on a refined grid.

`extend_selected` additionally forces chosen extensible cells onto the
output boundary, which is what the engaged-cell machinery of the solver
modules is built on.
"""

from __future__ import annotations

import logging
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .geometry import (
    Cell,
    Direction,
    GlobalLayout,
    Grid,
    Rect,
    RectComplex,
    TwoLevelLayout,
    _point_violations,
    boundary_walk,
    grid_of,
)

log = logging.getLogger(__name__)

_DIRS = (Direction.LEFT, Direction.RIGHT, Direction.BOTTOM, Direction.TOP)

# Clockwise order in which a boundary walk exposes the four sides.
_CLOCKWISE = (Direction.TOP, Direction.RIGHT, Direction.BOTTOM, Direction.LEFT)


class ExtensionError(Exception):
    """No rectangular extension could be constructed."""


@dataclass(frozen=True)
class ExtensionResult:
    """A rectangular complex extending an input complex cell-for-cell.

    ``mapping`` sends each input cell id to its enlarged rectangle; the
    same rectangles (with regions and ids carried over) form ``complex``,
    whose union is a single rectangle.  Every oriented adjacency of the
    input is present in the output; the output may have extra ones.
    """

    complex: RectComplex
    mapping: Mapping[str, Rect]


@dataclass(frozen=True, order=True)
class EngagedMark:
    """A cell whose side ``direction`` wants to lie on its region's boundary.

    Raised by an external adjacency of the cell in that direction whose
    partner region sits on the same side in the target arrangement.
    """

    cell_id: str
    direction: Direction
    partner_region: str


# ---------------------------------------------------------------------------
# occupancy helpers (plain id -> Rect dicts; regions reattached at the end)


def _grid(rects: Mapping[str, Rect], bbox: Rect) -> Grid:
    cells = [Cell(cid, r, "") for cid, r in rects.items()]
    return grid_of(cells, extra_x=(bbox.x_min, bbox.x_max), extra_y=(bbox.y_min, bbox.y_max))


def _holes(grid: Grid) -> list[set[tuple[int, int]]]:
    """Connected components of empty grid squares, lowest-leftmost first."""
    empties = {
        (i, j)
        for i in range(grid.nx)
        for j in range(grid.ny)
        if grid.cells[i][j] is None
    }
    comps: list[set[tuple[int, int]]] = []
    while empties:
        seed = empties.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            i, j = stack.pop()
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb in empties:
                    empties.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(comp)
    comps.sort(key=lambda c: min((j, i) for i, j in c))
    return comps


def _span(grid: Grid, rect: Rect) -> tuple[int, int, int, int]:
    """Index ranges (i0, i1, j0, j1) covered by ``rect`` in ``grid``."""
    return (
        bisect_left(grid.xs, rect.x_min),
        bisect_left(grid.xs, rect.x_max),
        bisect_left(grid.ys, rect.y_min),
        bisect_left(grid.ys, rect.y_max),
    )


def _side_squares(grid: Grid, rect: Rect, d: Direction) -> list[tuple[int, int]]:
    """Grid squares just outside ``rect`` along its ``d`` side."""
    i0, i1, j0, j1 = _span(grid, rect)
    if d is Direction.LEFT:
        return [(i0 - 1, j) for j in range(j0, j1)]
    if d is Direction.RIGHT:
        return [(i1, j) for j in range(j0, j1)]
    if d is Direction.BOTTOM:
        return [(i, j0 - 1) for i in range(i0, i1)]
    return [(i, j1) for i in range(i0, i1)]


def _grow(grid: Grid, rects: dict[str, Rect], cid: str, d: Direction) -> None:
    """Extend cell ``cid`` in direction ``d`` strip by strip while the next
    strip of grid squares is entirely empty.  Mutates ``rects`` and patches
    grid ownership in place (no new grid lines are ever needed)."""
    r = rects[cid]
    i0, i1, j0, j1 = _span(grid, r)
    if d.horizontal:
        step = -1 if d is Direction.LEFT else 1
        col = i0 - 1 if d is Direction.LEFT else i1
        while 0 <= col < grid.nx and all(grid.cells[col][j] is None for j in range(j0, j1)):
            for j in range(j0, j1):
                grid.cells[col][j] = cid
            col += step
        new_coord = grid.xs[col + 1] if d is Direction.LEFT else grid.xs[col]
    else:
        step = -1 if d is Direction.BOTTOM else 1
        row = j0 - 1 if d is Direction.BOTTOM else j1
        while 0 <= row < grid.ny and all(grid.cells[i][row] is None for i in range(i0, i1)):
            for i in range(i0, i1):
                grid.cells[i][row] = cid
            row += step
        new_coord = grid.ys[row + 1] if d is Direction.BOTTOM else grid.ys[row]
    rects[cid] = r.with_side(d, new_coord)


def _full_edge_candidates(
    grid: Grid, rects: Mapping[str, Rect], hole: set[tuple[int, int]]
) -> list[tuple[str, Direction]]:
    out = []
    for cid, r in rects.items():
        for d in _DIRS:
            squares = _side_squares(grid, r, d)
            if squares and all(s in hole for s in squares):
                out.append((cid, d))
    return out


# ---------------------------------------------------------------------------
# windmill holes

# A windmill hole is rectangular, each side fully covered by one cell, and
# each of the four cells overhangs past exactly one corner, cyclically; no
# cell offers a full free edge, so plain growth is stuck.  The dissolving
# move raises the ledge the hole rests on: every cell whose top lies on the
# ledge line and that must move with the hole's bottom cover grows upward by
# some delta >= 1, and the cells standing on them shrink from below by the
# same delta.  Contacts across the ledge move as a block, so no adjacency is
# lost; rotating/mirroring the frame makes one normalized move serve every
# chirality and growth direction.


def _rot90(r: Rect) -> Rect:
    # quarter turn counterclockwise: (x, y) -> (-y, x)
    return Rect(-r.y_max, r.x_min, -r.y_min, r.x_max)


def _mirror(r: Rect) -> Rect:
    # reflect across the y axis: (x, y) -> (-x, y)
    return Rect(-r.x_max, r.y_min, -r.x_min, r.y_max)


def _transforms():
    """(forward, inverse) rect maps: four rotations, optionally mirrored."""
    for m in (False, True):
        for k in range(4):

            def fwd(r: Rect, k: int = k, m: bool = m) -> Rect:
                if m:
                    r = _mirror(r)
                for _ in range(k):
                    r = _rot90(r)
                return r

            def inv(r: Rect, k: int = k, m: bool = m) -> Rect:
                for _ in range((4 - k) % 4):
                    r = _rot90(r)
                if m:
                    r = _mirror(r)
                return r

            yield fwd, inv


def _as_windmill(rects: Mapping[str, Rect], grid: Grid, hole: set[tuple[int, int]]) -> Rect | None:
    """The hole's rectangle if it is a windmill of the normalized chirality
    (bottom cover overhangs left, right cover down, top right, left up)."""
    is_ = sorted({i for i, _ in hole})
    js = sorted({j for _, j in hole})
    i0, i1 = is_[0], is_[-1] + 1
    j0, j1 = js[0], js[-1] + 1
    if len(hole) != (i1 - i0) * (j1 - j0):
        return None

    def cover(squares: list[tuple[int, int]]) -> Rect | None:
        owners = {grid.owner(i, j) for i, j in squares}
        if len(owners) != 1 or None in owners:
            return None
        return rects[owners.pop()]

    b = cover([(i, j0 - 1) for i in range(i0, i1)])
    t = cover([(i, j1) for i in range(i0, i1)])
    lf = cover([(i0 - 1, j) for j in range(j0, j1)])
    rt = cover([(i1, j) for j in range(j0, j1)])
    if b is None or t is None or lf is None or rt is None:
        return None
    if len({b, t, lf, rt}) != 4:
        return None
    x1, x2 = grid.xs[i0], grid.xs[i1]
    y1, y2 = grid.ys[j0], grid.ys[j1]
    if (
        b.x_min < x1 and b.x_max == x2
        and rt.y_min < y1 and rt.y_max == y2
        and t.x_min == x1 and t.x_max > x2
        and lf.y_min == y1 and lf.y_max > y2
    ):
        return Rect(x1, y1, x2, y2)
    return None


def _x_overlap(a: Rect, b: Rect) -> int:
    return min(a.x_max, b.x_max) - max(a.x_min, b.x_min)


def _raise_ledge(rects: dict[str, Rect], hole: Rect) -> bool:
    """Grow the cells ending at the hole's bottom line upward, shrinking the
    cells standing on them, by the largest safe amount.  True on progress."""
    y1 = hole.y_min
    grow = {
        cid
        for cid, r in rects.items()
        if r.y_max == y1 and _x_overlap(r, hole) > 0
    }
    shrink: set[str] = set()
    changed = True
    while changed:
        changed = False
        for cid, r in rects.items():
            if cid in shrink or r.y_min != y1:
                continue
            if any(_x_overlap(r, rects[g]) > 0 for g in grow):
                shrink.add(cid)
                changed = True
        for cid, r in rects.items():
            if cid in grow or r.y_max != y1:
                continue
            if any(_x_overlap(r, rects[u]) > 0 for u in shrink):
                grow.add(cid)
                changed = True

    delta = hole.height
    for uid in shrink:
        u = rects[uid]
        delta = min(delta, u.height - 1)
        for wid, w in rects.items():
            if wid == uid:
                continue
            touches = w.x_max == u.x_min or w.x_min == u.x_max
            if touches and min(u.y_max, w.y_max) - max(u.y_min, w.y_min) > 0:
                delta = min(delta, min(u.y_max, w.y_max) - y1 - 1)
    for gid in grow:
        g = rects[gid]
        for wid, w in rects.items():
            if wid in shrink or wid in grow:
                continue
            if w.y_min >= y1 and _x_overlap(g, w) > 0:
                delta = min(delta, w.y_min - y1)

    if delta < 1:
        return False
    for gid in grow:
        rects[gid] = rects[gid].with_side(Direction.TOP, y1 + delta)
    for uid in shrink:
        rects[uid] = rects[uid].with_side(Direction.BOTTOM, y1 + delta)
    return True


def _dissolve_windmill(rects: dict[str, Rect], bbox: Rect) -> None:
    for fwd, inv in _transforms():
        turned = {cid: fwd(r) for cid, r in rects.items()}
        tb = fwd(bbox)
        grid = _grid(turned, tb)
        for hole in _holes(grid):
            wm = _as_windmill(turned, grid, hole)
            if wm is not None and _raise_ledge(turned, wm):
                for cid, r in turned.items():
                    rects[cid] = inv(r)
                return
    raise ExtensionError("stuck hole is not a removable windmill")


# ---------------------------------------------------------------------------
# four-corner repair

# Greedy growth may leave points where four cells meet, i.e. two cells
# touching in a single point diagonally, which no valid complex allows.
# Doubling all coordinates and dropping the half-open strip right of the
# lowest-leftmost such point by one refined unit separates the two corner
# pairs without losing any contact: every contact is at least two refined
# units long, moves by at most one, and the shifted strip ends exactly where
# both the upper and lower cell chains break (they break together because
# the union is a full rectangle).


def _crosses(rects: Mapping[str, Rect]) -> list[tuple[int, int]]:
    seen: dict[tuple[int, int], set[str]] = defaultdict(set)
    for cid, r in rects.items():
        for p in r.corners:
            seen[p].add(cid)
    return sorted(p for p, owners in seen.items() if len(owners) == 4)


def _chain_end(runs: list[tuple[int, int, str]], start: int) -> int:
    z = start
    for lo, hi, _ in runs:
        if lo == z:
            z = hi
        elif lo > z:
            break
    return z


def _repair_crosses(rects: dict[str, Rect]) -> bool:
    repaired = False
    guard = 16 + 4 * len(rects)
    while True:
        crosses = _crosses(rects)
        if not crosses:
            return repaired
        if guard <= 0:
            raise ExtensionError("four-corner repair did not converge")
        guard -= 1
        repaired = True
        for cid, r in rects.items():
            rects[cid] = Rect(2 * r.x_min, 2 * r.y_min, 2 * r.x_max, 2 * r.y_max)
        x, y = (2 * v for v in crosses[0])
        below = sorted(
            (r.x_min, r.x_max, cid)
            for cid, r in rects.items()
            if r.y_max == y and r.x_min >= x
        )
        above = sorted(
            (r.x_min, r.x_max, cid)
            for cid, r in rects.items()
            if r.y_min == y and r.x_min >= x
        )
        zb = _chain_end(below, x)
        za = _chain_end(above, x)
        if zb != za:
            raise ExtensionError("four-corner repair found a ragged seam")
        for lo, hi, cid in below:
            if hi <= zb:
                rects[cid] = rects[cid].with_side(Direction.TOP, y - 1)
        for lo, hi, cid in above:
            if hi <= zb:
                rects[cid] = rects[cid].with_side(Direction.BOTTOM, y - 1)


# ---------------------------------------------------------------------------
# the fill loop


def _fill(rects: dict[str, Rect], bbox: Rect) -> None:
    """Grow ``rects`` in place until they tile ``bbox`` exactly.

    Holes are processed in lexicographic order of their lowest-leftmost
    square; within a hole the full-free-edge cell with the smallest
    (id, direction) grows first.  When no hole offers a full free edge, a
    windmill must be present and is dissolved by the ledge move.
    """
    budget = 64 + 16 * max(1, len(rects)) ** 2
    moves = 0
    while True:
        grid = _grid(rects, bbox)
        holes = _holes(grid)
        if not holes:
            break
        if moves >= budget:
            raise ExtensionError("hole filling did not converge")
        moves += 1
        grown = False
        for hole in holes:
            cand = _full_edge_candidates(grid, rects, hole)
            if cand:
                cid, d = min(cand, key=lambda t: (t[0], t[1].value))
                _grow(grid, rects, cid, d)
                grown = True
                break
        if not grown:
            _dissolve_windmill(rects, bbox)
    if _repair_crosses(rects):
        _recompress(rects)


def _recompress(rects: dict[str, Rect]) -> None:
    xs = sorted({v for r in rects.values() for v in (r.x_min, r.x_max)})
    ys = sorted({v for r in rects.values() for v in (r.y_min, r.y_max)})
    xmap = {v: i for i, v in enumerate(xs)}
    ymap = {v: i for i, v in enumerate(ys)}
    for cid, r in rects.items():
        rects[cid] = Rect(xmap[r.x_min], ymap[r.y_min], xmap[r.x_max], ymap[r.y_max])


# ---------------------------------------------------------------------------
# validity and result assembly


def _check_complex(complex: RectComplex) -> None:
    if not len(complex):
        raise ValueError("empty complex")
    grid_of(complex.cells)  # raises on overlapping cells
    bad = _point_violations(list(complex.cells))
    if bad:
        raise ValueError(f"invalid complex: {bad[0].message}")


def _assert_extension(before: RectComplex, after: RectComplex) -> None:
    bbox = after.bbox
    if sum(c.rect.area for c in after) != bbox.area:
        raise ExtensionError("extension does not tile its bounding box")
    grid_of(after.cells)
    bad = _point_violations(list(after.cells))
    if bad:
        raise ExtensionError(f"extension is not a valid complex: {bad[0].message}")
    old = {(a.a, a.b, a.direction) for a in before.adjacencies}
    new = {(a.a, a.b, a.direction) for a in after.adjacencies}
    missing = old - new
    if missing:
        raise ExtensionError(f"extension dropped adjacencies: {sorted(missing)[:3]}")


def _result(before: RectComplex, rects: dict[str, Rect]) -> ExtensionResult:
    cells = tuple(Cell(c.id, rects[c.id], c.region) for c in before)
    after = RectComplex.of(cells)
    _assert_extension(before, after)
    return ExtensionResult(after, {c.id: c.rect for c in cells})


# ---------------------------------------------------------------------------
# public operations


def rectangular_extension(complex: RectComplex) -> ExtensionResult:
    """Grow every cell until the union is the bounding rectangle.

    The input must be a valid complex; it may have holes or even be
    disconnected.  All oriented adjacencies survive (more may appear).
    """
    _check_complex(complex)
    rects = {c.id: c.rect for c in complex}
    _fill(rects, complex.bbox)
    return _result(complex, rects)


def is_extensible(complex: RectComplex, cell_id: str, d: Direction) -> bool:
    """Can the cell's ``d`` side reach the boundary of some extension?

    For convex complexes this is simply the absence of a same-complex
    neighbour on the ``d`` side; any blocked cell stays blocked in every
    extension because that contact must be preserved.  Raises ValueError
    when the complex is not convex or the cell is unknown.
    """
    if not complex.convex:
        raise ValueError("complex is not convex")
    if cell_id not in complex.by_id:
        raise ValueError(f"no cell {cell_id!r} in complex")
    return not complex.neighbours(cell_id, d)


def mark_engaged(layout: TwoLevelLayout, global_target: GlobalLayout) -> list[EngagedMark]:
    """Marks for cells whose external adjacency matches the target's side.

    One mark per (cell, direction, partner region).  External adjacencies
    whose region pair is not adjacent in the same direction in the target
    simply produce no mark.  Raises ValueError when the target's regions
    differ from the layout's, or when some region's marks are not
    consecutive per direction along its clockwise boundary — such a target
    cannot be realized by extending this layout's regions.
    """
    if set(global_target.region_ids) != set(layout.region_ids):
        raise ValueError("target regions differ from layout regions")
    by_id = layout.by_id
    marks: set[EngagedMark] = set()
    for adj in layout.external_adjacencies:
        ra = by_id[adj.a].region
        rb = by_id[adj.b].region
        if global_target.direction_between(ra, rb) is adj.direction:
            marks.add(EngagedMark(adj.a, adj.direction, rb))
    out = sorted(marks, key=lambda m: (m.cell_id, m.direction.value, m.partner_region))
    _check_marks_consecutive(layout, out)
    return out


def _cyclically_blocked(dirs: Sequence[Direction]) -> bool:
    """Does each direction occupy one contiguous cyclic block?"""
    n = len(dirs)
    distinct = len(set(dirs))
    if distinct <= 1:
        return True
    boundaries = sum(1 for i in range(n) if dirs[i] is not dirs[(i + 1) % n])
    return boundaries == distinct


def _check_marks_consecutive(layout: TwoLevelLayout, marks: Sequence[EngagedMark]) -> None:
    by_region: dict[str, list[EngagedMark]] = defaultdict(list)
    by_id = layout.by_id
    for m in marks:
        by_region[by_id[m.cell_id].region].append(m)
    for region, ms in by_region.items():
        walk = boundary_walk(layout.regions[region])
        pos: dict[tuple[str, Direction], int] = {}
        for idx, seg in enumerate(walk):
            pos.setdefault((seg.cell, seg.side), idx)
        try:
            ordered = sorted(ms, key=lambda m: pos[(m.cell_id, m.direction)])
        except KeyError as exc:
            raise ValueError(f"engaged cell side not on boundary of region {region!r}: {exc}") from exc
        if not _cyclically_blocked([m.direction for m in ordered]):
            raise ValueError(
                f"region {region!r}: engaged marks are not consecutive per direction; "
                "this target cannot be realized by extending the region"
            )


def _selection_walk_order(
    complex: RectComplex, selection: Sequence[tuple[str, Direction]]
) -> list[tuple[str, Direction]]:
    walk = boundary_walk(complex)
    pos: dict[tuple[str, Direction], int] = {}
    for idx, seg in enumerate(walk):
        pos.setdefault((seg.cell, seg.side), idx)
    try:
        return sorted(set(selection), key=lambda s: pos[(s[0], s[1])])
    except KeyError as exc:
        raise ValueError(f"selected cell side not on the boundary: {exc}") from exc


def _check_selection_order(ordered: Sequence[tuple[str, Direction]]) -> None:
    dirs = [d for _, d in ordered]
    if not _cyclically_blocked(dirs):
        raise ValueError("selection not contiguous: repeated direction blocks along the boundary")
    block_order: list[Direction] = []
    for d in dirs:
        if not block_order or block_order[-1] is not d:
            block_order.append(d)
    if block_order and block_order[0] is block_order[-1] and len(block_order) > 1:
        block_order.pop()
    expected = [d for d in _CLOCKWISE if d in block_order]
    if len(block_order) > 2 and not _is_rotation(block_order, expected):
        raise ValueError("selection not contiguous: directions out of clockwise order")


def _is_rotation(seq: Sequence[Direction], of: Sequence[Direction]) -> bool:
    if len(seq) != len(of):
        return False
    doubled = list(of) + list(of)
    return any(doubled[i : i + len(seq)] == list(seq) for i in range(len(of)))


def extend_selected(
    complex: RectComplex, selection: Sequence[tuple[str, Direction]]
) -> ExtensionResult:
    """Rectangular extension with every selected (cell, direction) extreme.

    Selected cells must be extensible in their direction, and the selection,
    read along a clockwise boundary walk, must form one block per direction
    with the blocks in clockwise order; otherwise no extension can place all
    of them on the boundary and a ValueError is raised.  An empty selection
    degrades to ``rectangular_extension``.
    """
    _check_complex(complex)
    if not complex.convex:
        raise ValueError("complex is not convex")
    for cid, d in selection:
        if cid not in complex.by_id:
            raise ValueError(f"no cell {cid!r} in complex")
        if complex.neighbours(cid, d):
            raise ValueError(f"not extensible: cell {cid!r} is blocked on its {d.value} side")
    if not selection:
        return rectangular_extension(complex)

    ordered = _selection_walk_order(complex, selection)
    _check_selection_order(ordered)

    bbox = complex.bbox
    rects = {c.id: c.rect for c in complex}
    for cid, d in ordered:
        rects[cid] = rects[cid].with_side(d, bbox.side(d))
    try:
        _grid(rects, bbox)
    except ValueError as exc:
        raise ValueError(f"selection not contiguous: {exc}") from exc

    _fill(rects, bbox)
    result = _result(complex, rects)
    out_bbox = result.complex.bbox
    for cid, d in ordered:
        if result.mapping[cid].side(d) != out_bbox.side(d):
            raise ExtensionError(f"cell {cid!r} failed to reach the {d.value} boundary")
    return result
