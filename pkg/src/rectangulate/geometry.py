"""Exact integer rectilinear geometry for two-level layouts.

Everything in this package lives on an integer grid: axis-aligned
rectangles with positive area, cells (rectangles carrying an identity and
a region), rectangle complexes, and two-level layouts.  This module also
derives all oriented adjacency relations and validates the geometric
ground rules the solvers rely on: interior-disjointness, edge-to-edge
contact (no two cells may meet in a single point), at most three cells
around any point, and connected, hole-free regions.

All predicates are exact integer comparisons; there is no tolerance
anywhere.
"""

from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right, insort
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

log = logging.getLogger(__name__)

Point = tuple[int, int]


class Direction(Enum):
    """One of the four axis directions.

    ``ccw`` steps through the quarter-turn cycle left -> bottom -> right
    -> top -> left, i.e. it rotates the direction vector by +90 degrees.
    """

    LEFT = "left"
    RIGHT = "right"
    TOP = "top"
    BOTTOM = "bottom"

    def __neg__(self) -> "Direction":
        return _OPPOSITE[self]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]

    def ccw(self, steps: int = 1) -> "Direction":
        return _CCW_RING[(_CCW_RING.index(self) + steps) % 4]

    def cw(self, steps: int = 1) -> "Direction":
        return self.ccw(-steps)

    @property
    def horizontal(self) -> bool:
        """True for LEFT/RIGHT (movement along the x axis)."""
        return self in (Direction.LEFT, Direction.RIGHT)

    @property
    def vector(self) -> Point:
        return _VECTOR[self]


_OPPOSITE = {
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
    Direction.TOP: Direction.BOTTOM,
    Direction.BOTTOM: Direction.TOP,
}
_CCW_RING = (Direction.LEFT, Direction.BOTTOM, Direction.RIGHT, Direction.TOP)
_VECTOR = {
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
    Direction.TOP: (0, 1),
    Direction.BOTTOM: (0, -1),
}


@dataclass(frozen=True, order=True)
class Rect:
    """Axis-aligned rectangle with positive area on the integer grid."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError(f"rectangle must have positive area: {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def corners(self) -> tuple[Point, Point, Point, Point]:
        return (
            (self.x_min, self.y_min),
            (self.x_max, self.y_min),
            (self.x_max, self.y_max),
            (self.x_min, self.y_max),
        )

    def side(self, d: Direction) -> int:
        """Coordinate of the side facing direction ``d``."""
        if d is Direction.LEFT:
            return self.x_min
        if d is Direction.RIGHT:
            return self.x_max
        if d is Direction.BOTTOM:
            return self.y_min
        return self.y_max

    def with_side(self, d: Direction, coord: int) -> "Rect":
        """A copy with the side facing ``d`` moved to ``coord``."""
        if d is Direction.LEFT:
            return Rect(coord, self.y_min, self.x_max, self.y_max)
        if d is Direction.RIGHT:
            return Rect(self.x_min, self.y_min, coord, self.y_max)
        if d is Direction.BOTTOM:
            return Rect(self.x_min, coord, self.x_max, self.y_max)
        return Rect(self.x_min, self.y_min, self.x_max, coord)

    def interval(self, horizontal: bool) -> tuple[int, int]:
        """The x interval if ``horizontal`` else the y interval."""
        return (self.x_min, self.x_max) if horizontal else (self.y_min, self.y_max)

    def contains_point(self, x: int, y: int) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and other.x_max <= self.x_max
            and other.y_max <= self.y_max
        )

    def overlaps_interior(self, other: "Rect") -> bool:
        return (
            self.x_min < other.x_max
            and other.x_min < self.x_max
            and self.y_min < other.y_max
            and other.y_min < self.y_max
        )

    def translated(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)


def bounding_box(rects: Iterable[Rect]) -> Rect:
    rs = list(rects)
    if not rs:
        raise ValueError("bounding box of nothing")
    return Rect(
        min(r.x_min for r in rs),
        min(r.y_min for r in rs),
        max(r.x_max for r in rs),
        max(r.y_max for r in rs),
    )


@dataclass(frozen=True)
class Cell:
    """One rectangle of a complex: identity, geometry, region membership.

    Identifiers are plain strings so layouts serialize naturally and all
    tie-breaking order is lexicographic.
    """

    id: str
    rect: Rect
    region: str


class Adjacency(NamedTuple):
    """Oriented contact: ``b`` lies on side ``direction`` of ``a``.

    ``overlap`` is the shared segment length (always >= 1).  Adjacency
    lists carry both orientations of every contact, so ``(a, b, d)`` is
    present iff ``(b, a, -d)`` is.
    """

    a: str
    b: str
    direction: Direction
    overlap: int

    def reversed(self) -> "Adjacency":
        return Adjacency(self.b, self.a, self.direction.opposite, self.overlap)


def _interval_meets(
    src: list[tuple[int, int, str]], dst: list[tuple[int, int, str]]
) -> Iterable[tuple[str, str, int]]:
    """All pairs from src x dst whose intervals overlap in >= 1 unit."""
    src = sorted(src)
    dst = sorted(dst)
    i = j = 0
    while i < len(src) and j < len(dst):
        s_lo, s_hi, s_id = src[i]
        d_lo, d_hi, d_id = dst[j]
        lo = max(s_lo, d_lo)
        hi = min(s_hi, d_hi)
        if hi - lo >= 1:
            yield s_id, d_id, hi - lo
        if s_hi <= d_hi:
            i += 1
        if d_hi <= s_hi:
            j += 1


def contacts(items: Iterable[tuple[str, Rect]]) -> list[tuple[str, str, Direction, int]]:
    """Oriented edge contacts between named rectangles, both orientations.

    Grouping by the shared side coordinate keeps this O(n log n) plus
    output size; no pair of rectangles is ever tested that does not share
    a grid line.
    """
    items = list(items)
    side_lists: dict[Direction, dict[int, list[tuple[int, int, str]]]] = {
        d: defaultdict(list) for d in (Direction.LEFT, Direction.RIGHT, Direction.BOTTOM, Direction.TOP)
    }
    for name, r in items:
        side_lists[Direction.LEFT][r.x_min].append((r.y_min, r.y_max, name))
        side_lists[Direction.RIGHT][r.x_max].append((r.y_min, r.y_max, name))
        side_lists[Direction.BOTTOM][r.y_min].append((r.x_min, r.x_max, name))
        side_lists[Direction.TOP][r.y_max].append((r.x_min, r.x_max, name))
    out: list[tuple[str, str, Direction, int]] = []
    for x, rights in side_lists[Direction.RIGHT].items():
        lefts = side_lists[Direction.LEFT].get(x)
        if not lefts:
            continue
        for a, b, ov in _interval_meets(rights, lefts):
            out.append((a, b, Direction.RIGHT, ov))
            out.append((b, a, Direction.LEFT, ov))
    for y, tops in side_lists[Direction.TOP].items():
        bottoms = side_lists[Direction.BOTTOM].get(y)
        if not bottoms:
            continue
        for a, b, ov in _interval_meets(tops, bottoms):
            out.append((a, b, Direction.TOP, ov))
            out.append((b, a, Direction.BOTTOM, ov))
    return out


def _adjacency_sort_key(adj: Adjacency) -> tuple[str, str, str]:
    return (adj.a, adj.b, adj.direction.value)


def compute_adjacencies(cells: Iterable[Cell]) -> tuple[list[Adjacency], list[Adjacency]]:
    """Split oriented cell contacts into (internal, external) lists.

    Internal means both cells belong to the same region.  Zero-length
    (single point) contacts never appear here; they are a validation
    error, not an adjacency.
    """
    cells = list(cells)
    region = {c.id: c.region for c in cells}
    internal: list[Adjacency] = []
    external: list[Adjacency] = []
    for a, b, d, ov in contacts((c.id, c.rect) for c in cells):
        bucket = internal if region[a] == region[b] else external
        bucket.append(Adjacency(a, b, d, ov))
    internal.sort(key=_adjacency_sort_key)
    external.sort(key=_adjacency_sort_key)
    return internal, external


def canonical_adjacencies(adjs: Iterable[Adjacency]) -> list[Adjacency]:
    """One record per contact: keep the RIGHT/TOP orientation only."""
    return [a for a in adjs if a.direction in (Direction.RIGHT, Direction.TOP)]


@dataclass(frozen=True)
class RectComplex:
    """A set of interior-disjoint cells meeting edge-to-edge."""

    cells: tuple[Cell, ...]

    @staticmethod
    def of(cells: Iterable[Cell]) -> "RectComplex":
        out = tuple(sorted(cells, key=lambda c: c.id))
        ids = [c.id for c in out]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate cell ids in complex")
        return RectComplex(out)

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    @cached_property
    def by_id(self) -> dict[str, Cell]:
        return {c.id: c for c in self.cells}

    def __getitem__(self, cell_id: str) -> Cell:
        return self.by_id[cell_id]

    @cached_property
    def bbox(self) -> Rect:
        return bounding_box(c.rect for c in self.cells)

    @cached_property
    def adjacencies(self) -> tuple[Adjacency, ...]:
        out = [Adjacency(a, b, d, ov) for a, b, d, ov in contacts((c.id, c.rect) for c in self.cells)]
        out.sort(key=_adjacency_sort_key)
        return tuple(out)

    @cached_property
    def _neighbour_index(self) -> dict[tuple[str, Direction], tuple[str, ...]]:
        out: dict[tuple[str, Direction], list[str]] = {}
        for adj in self.adjacencies:
            out.setdefault((adj.a, adj.direction), []).append(adj.b)
        return {k: tuple(v) for k, v in out.items()}

    def neighbours(self, cell_id: str, d: Direction) -> list[str]:
        """Cells of this complex adjacent to ``cell_id`` on its ``d`` side."""
        return list(self._neighbour_index.get((cell_id, d), ()))

    @cached_property
    def convex(self) -> bool:
        """Cached :func:`is_convex` of the cells (raises like it, too)."""
        return is_convex(self.cells)


@dataclass(frozen=True)
class GlobalLayout:
    """The top level on its own: one rectangle per region, tiling the root."""

    root: Rect
    regions: tuple[tuple[str, Rect], ...]

    @staticmethod
    def of(root: Rect, rects: dict[str, Rect] | Iterable[tuple[str, Rect]]) -> "GlobalLayout":
        pairs = rects.items() if isinstance(rects, dict) else rects
        return GlobalLayout(root, tuple(sorted(pairs)))

    @cached_property
    def by_id(self) -> dict[str, Rect]:
        return dict(self.regions)

    def rect(self, region: str) -> Rect:
        return self.by_id[region]

    @cached_property
    def region_ids(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.regions)

    @cached_property
    def adjacencies(self) -> tuple[Adjacency, ...]:
        out = [Adjacency(a, b, d, ov) for a, b, d, ov in contacts(self.regions)]
        out.sort(key=_adjacency_sort_key)
        return tuple(out)

    @cached_property
    def _dir_by_pair(self) -> dict[tuple[str, str], Direction]:
        return {(adj.a, adj.b): adj.direction for adj in self.adjacencies}

    def direction_between(self, r: str, s: str) -> Direction | None:
        """Orientation of the (r, s) region adjacency, or None if not adjacent."""
        return self._dir_by_pair.get((r, s))

    def as_layout(self) -> "TwoLevelLayout":
        """View the global layout as a one-cell-per-region layout (for validation)."""
        return TwoLevelLayout.of(self.root, [Cell(name, r, name) for name, r in self.regions])


@dataclass(frozen=True)
class TwoLevelLayout:
    """Root rectangle plus the full set of cells, each assigned to a region."""

    root: Rect
    cells: tuple[Cell, ...]

    @staticmethod
    def of(root: Rect, cells: Iterable[Cell]) -> "TwoLevelLayout":
        return TwoLevelLayout(root, tuple(sorted(cells, key=lambda c: c.id)))

    @cached_property
    def by_id(self) -> dict[str, Cell]:
        return {c.id: c for c in self.cells}

    @cached_property
    def region_ids(self) -> tuple[str, ...]:
        return tuple(sorted({c.region for c in self.cells}))

    @cached_property
    def regions(self) -> dict[str, RectComplex]:
        grouped: dict[str, list[Cell]] = defaultdict(list)
        for c in self.cells:
            grouped[c.region].append(c)
        return {name: RectComplex.of(cs) for name, cs in sorted(grouped.items())}

    @cached_property
    def _split_adjacencies(self) -> tuple[tuple[Adjacency, ...], tuple[Adjacency, ...]]:
        internal, external = compute_adjacencies(self.cells)
        return tuple(internal), tuple(external)

    @property
    def internal_adjacencies(self) -> tuple[Adjacency, ...]:
        return self._split_adjacencies[0]

    @property
    def external_adjacencies(self) -> tuple[Adjacency, ...]:
        return self._split_adjacencies[1]

    @cached_property
    def global_layout(self) -> GlobalLayout:
        """The induced top level; every region must be a rectangle.

        Raises ValueError when some region is not a rectangle (its cells
        do not fill their bounding box).
        """
        rects = {}
        for name, comp in self.regions.items():
            box = comp.bbox
            if sum(c.rect.area for c in comp) != box.area:
                raise ValueError(f"region {name!r} is not a rectangle")
            rects[name] = box
        return GlobalLayout.of(self.root, rects)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    """One broken invariant: a short code, human text, offending subjects."""

    code: str
    message: str
    subjects: tuple[str, ...] = ()


def _overlap_pairs(cells: Sequence[Cell], cap: int = 64) -> list[tuple[int, int]]:
    """Indices of interior-overlapping cell pairs.

    Sweep over x, keeping active cells ordered by their y interval.  The
    first overlap in sweep order is always found; enumeration beyond
    that is best effort (and capped), which is all validation needs.
    """
    opens: dict[int, list[int]] = defaultdict(list)
    closes: dict[int, list[int]] = defaultdict(list)
    for i, c in enumerate(cells):
        opens[c.rect.x_min].append(i)
        closes[c.rect.x_max].append(i)
    active: list[tuple[int, int, int]] = []
    pairs: list[tuple[int, int]] = []
    for x in sorted(set(opens) | set(closes)):
        for i in closes.get(x, ()):
            r = cells[i].rect
            k = bisect_left(active, (r.y_min, r.y_max, i))
            if k < len(active) and active[k] == (r.y_min, r.y_max, i):
                active.pop(k)
        for i in opens.get(x, ()):
            if len(pairs) > cap:
                return pairs
            r = cells[i].rect
            k = bisect_left(active, (r.y_min, r.y_max, i))
            j = k - 1
            while j >= 0:
                _, hi, other = active[j]
                if hi > r.y_min:
                    pairs.append((other, i))
                    j -= 1
                else:
                    break
            j = k
            while j < len(active):
                lo, _, other = active[j]
                if lo < r.y_max:
                    pairs.append((other, i))
                    j += 1
                else:
                    break
            insort(active, (r.y_min, r.y_max, i))
    return pairs


def _strict_span_hits(entries: list[tuple[int, int, int]] | None, q: int) -> Iterable[int]:
    """Indices of sorted (lo, hi, idx) entries with lo < q < hi.

    Entries come from one side of one grid line, so in a layout without
    overlaps they are pairwise disjoint and at most one can span q; a
    short backward scan keeps this robust on broken inputs too.
    """
    if not entries:
        return
    k = bisect_left(entries, (q,))
    for j in range(k - 1, max(k - 9, -1), -1):
        lo, hi, idx = entries[j]
        if lo < q < hi:
            yield idx


def _point_violations(cells: Sequence[Cell]) -> list[Violation]:
    corner_owners: dict[Point, list[int]] = defaultdict(list)
    edge_maps: dict[tuple[Direction, int], list[tuple[int, int, int]]] = defaultdict(list)
    for i, c in enumerate(cells):
        r = c.rect
        for p in r.corners:
            corner_owners[p].append(i)
        edge_maps[(Direction.LEFT, r.x_min)].append((r.y_min, r.y_max, i))
        edge_maps[(Direction.RIGHT, r.x_max)].append((r.y_min, r.y_max, i))
        edge_maps[(Direction.BOTTOM, r.y_min)].append((r.x_min, r.x_max, i))
        edge_maps[(Direction.TOP, r.y_max)].append((r.x_min, r.x_max, i))
    for entries in edge_maps.values():
        entries.sort()
    out = []
    for p, owners in sorted(corner_owners.items()):
        px, py = p
        incident = set(owners)
        for side, coord, q in (
            (Direction.LEFT, px, py),
            (Direction.RIGHT, px, py),
            (Direction.BOTTOM, py, px),
            (Direction.TOP, py, px),
        ):
            incident.update(_strict_span_hits(edge_maps.get((side, coord)), q))
        names = tuple(sorted({cells[i].id for i in incident}))
        if len(incident) > 3:
            out.append(
                Violation(
                    "point-contact",
                    f"{len(incident)} cells meet at point {p}; at most 3 may share a point",
                    names,
                )
            )
            continue
        for i, j in combinations(sorted(set(owners)), 2):
            ri, rj = cells[i].rect, cells[j].rect
            x_lo, x_hi = max(ri.x_min, rj.x_min), min(ri.x_max, rj.x_max)
            y_lo, y_hi = max(ri.y_min, rj.y_min), min(ri.y_max, rj.y_max)
            if x_lo == x_hi and y_lo == y_hi:
                out.append(
                    Violation(
                        "point-contact",
                        f"cells {cells[i].id!r} and {cells[j].id!r} meet only at point {p}",
                        tuple(sorted({cells[i].id, cells[j].id})),
                    )
                )
                break
    return out


class Grid(NamedTuple):
    """Compressed occupancy grid: which cell covers each unit square."""

    xs: tuple[int, ...]
    ys: tuple[int, ...]
    cells: list[list[str | None]]

    @property
    def nx(self) -> int:
        return len(self.xs) - 1

    @property
    def ny(self) -> int:
        return len(self.ys) - 1

    def owner(self, i: int, j: int) -> str | None:
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return self.cells[i][j]
        return None


def grid_of(cells: Iterable[Cell], *, extra_x: Iterable[int] = (), extra_y: Iterable[int] = ()) -> Grid:
    """Build the compressed occupancy grid of a cell set.

    Raises ValueError if two cells overlap (grid squares are owned by
    exactly one cell).
    """
    cs = list(cells)
    xs = sorted({v for c in cs for v in (c.rect.x_min, c.rect.x_max)} | set(extra_x))
    ys = sorted({v for c in cs for v in (c.rect.y_min, c.rect.y_max)} | set(extra_y))
    grid = [[None] * (len(ys) - 1) for _ in range(len(xs) - 1)]
    for c in cs:
        i0 = bisect_left(xs, c.rect.x_min)
        i1 = bisect_left(xs, c.rect.x_max)
        j0 = bisect_left(ys, c.rect.y_min)
        j1 = bisect_left(ys, c.rect.y_max)
        for i in range(i0, i1):
            col = grid[i]
            for j in range(j0, j1):
                if col[j] is not None:
                    raise ValueError(f"cells {col[j]!r} and {c.id!r} overlap")
                col[j] = c.id
    return Grid(tuple(xs), tuple(ys), grid)


def _occupied_components(grid: Grid) -> int:
    seen = [[False] * grid.ny for _ in range(grid.nx)]
    count = 0
    for si in range(grid.nx):
        for sj in range(grid.ny):
            if grid.cells[si][sj] is None or seen[si][sj]:
                continue
            count += 1
            stack = [(si, sj)]
            seen[si][sj] = True
            while stack:
                i, j = stack.pop()
                for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                    if 0 <= ni < grid.nx and 0 <= nj < grid.ny and not seen[ni][nj] and grid.cells[ni][nj] is not None:
                        seen[ni][nj] = True
                        stack.append((ni, nj))
    return count


def _has_hole(grid: Grid) -> bool:
    """True iff some empty square is enclosed by occupied ones."""
    nx, ny = grid.nx, grid.ny
    seen = [[False] * ny for _ in range(nx)]
    stack = []
    for i in range(nx):
        for j in range(ny):
            if grid.cells[i][j] is None and (i in (0, nx - 1) or j in (0, ny - 1)):
                seen[i][j] = True
                stack.append((i, j))
    while stack:
        i, j = stack.pop()
        for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
            if 0 <= ni < nx and 0 <= nj < ny and not seen[ni][nj] and grid.cells[ni][nj] is None:
                seen[ni][nj] = True
                stack.append((ni, nj))
    return any(
        grid.cells[i][j] is None and not seen[i][j] for i in range(nx) for j in range(ny)
    )


def validate_layout(layout: TwoLevelLayout) -> list[Violation]:
    """Check every layout invariant; returns reports, never raises.

    An empty list means the layout is a valid two-level layout: unique
    ids, cells tile the root exactly, contacts are edge-to-edge with at
    most three cells at any point, and every region is connected with no
    holes.
    """
    out: list[Violation] = []
    cells = layout.cells

    counts: dict[str, int] = defaultdict(int)
    for c in cells:
        counts[c.id] += 1
    for cell_id, n in sorted(counts.items()):
        if n > 1:
            out.append(Violation("duplicate-id", f"cell id {cell_id!r} appears {n} times", (cell_id,)))

    outside = [c for c in cells if not layout.root.contains_rect(c.rect)]
    for c in outside:
        out.append(Violation("not-in-root", f"cell {c.id!r} {c.rect.as_tuple()} is not inside the root", (c.id,)))

    overlap_pairs = _overlap_pairs(cells)
    flawed: set[str] = {c.id for c in outside}
    for i, j in overlap_pairs:
        a, b = sorted((cells[i].id, cells[j].id))
        out.append(Violation("overlap", f"cells {a!r} and {b!r} overlap in their interiors", (a, b)))
        flawed.update((a, b))

    point_violations = _point_violations(cells)
    out.extend(point_violations)
    for v in point_violations:
        flawed.update(v.subjects)

    if not overlap_pairs and not outside:
        covered = sum(c.rect.area for c in cells)
        if covered != layout.root.area:
            out.append(
                Violation(
                    "coverage",
                    f"cells cover area {covered} but the root has area {layout.root.area}",
                )
            )

    grouped: dict[str, list[Cell]] = defaultdict(list)
    for c in cells:
        grouped[c.region].append(c)
    for region, members in sorted(grouped.items()):
        if any(c.id in flawed for c in members) or any(counts[c.id] > 1 for c in members):
            continue  # geometry already reported; grid would be unreliable
        grid = grid_of(members)
        if _occupied_components(grid) != 1:
            out.append(Violation("region-disconnected", f"region {region!r} is not connected", (region,)))
            continue
        if _has_hole(grid):
            out.append(Violation("region-hole", f"region {region!r} has a hole", (region,)))
    return out


# ---------------------------------------------------------------------------
# convexity and boundary walks


def is_convex(complex_or_cells: RectComplex | Iterable[Cell]) -> bool:
    """Orthogonal convexity: every grid line meets the union in one segment.

    Raises ValueError when the union is disconnected or has a hole (the
    predicate is only defined for simple complexes).
    """
    cells = list(complex_or_cells)
    grid = grid_of(cells)
    if _occupied_components(grid) != 1:
        raise ValueError("complex is disconnected")
    if _has_hole(grid):
        raise ValueError("complex has a hole")
    for j in range(grid.ny):
        occupied = [i for i in range(grid.nx) if grid.cells[i][j] is not None]
        if occupied and occupied[-1] - occupied[0] + 1 != len(occupied):
            return False
    for i in range(grid.nx):
        occupied = [j for j in range(grid.ny) if grid.cells[i][j] is not None]
        if occupied and occupied[-1] - occupied[0] + 1 != len(occupied):
            return False
    return True


class BoundarySegment(NamedTuple):
    """One maximal run of a single cell's side along the outer boundary."""

    cell: str
    side: Direction
    start: Point
    end: Point


def boundary_walk(complex_or_cells: RectComplex | Iterable[Cell]) -> list[BoundarySegment]:
    """Clockwise walk of the outer boundary of a simple complex.

    The walk starts at the lexicographically smallest boundary vertex
    (bottom-left), heads up the left side, and lists one segment per
    maximal (cell, exposed side) run.  Raises ValueError on complexes
    whose boundary is not a single simple cycle (holes, pinch points,
    disconnected unions).
    """
    grid = grid_of(complex_or_cells)
    edges: dict[Point, tuple[Point, str, Direction]] = {}

    def add(u: Point, v: Point, owner: str, side: Direction) -> None:
        if u in edges:
            raise ValueError("complex boundary is not a simple cycle")
        edges[u] = (v, owner, side)

    for i in range(grid.nx):
        for j in range(grid.ny):
            owner = grid.cells[i][j]
            if owner is None:
                continue
            if grid.owner(i - 1, j) is None:
                add((i, j), (i, j + 1), owner, Direction.LEFT)
            if grid.owner(i + 1, j) is None:
                add((i + 1, j + 1), (i + 1, j), owner, Direction.RIGHT)
            if grid.owner(i, j - 1) is None:
                add((i + 1, j), (i, j), owner, Direction.BOTTOM)
            if grid.owner(i, j + 1) is None:
                add((i, j + 1), (i + 1, j + 1), owner, Direction.TOP)

    if not edges:
        raise ValueError("empty complex has no boundary")
    start = min(edges)
    walk: list[tuple[str, Direction, Point, Point]] = []
    u = start
    while True:
        v, owner, side = edges.pop(u)
        walk.append((owner, side, u, v))
        u = v
        if u == start:
            break
    if edges:
        raise ValueError("complex boundary is not a single cycle (hole or disconnected)")

    def pt(p: Point) -> Point:
        return (grid.xs[p[0]], grid.ys[p[1]])

    segments: list[BoundarySegment] = []
    for owner, side, u, v in walk:
        if segments and segments[-1].cell == owner and segments[-1].side is side:
            segments[-1] = segments[-1]._replace(end=pt(v))
        else:
            segments.append(BoundarySegment(owner, side, pt(u), pt(v)))
    return segments


# ---------------------------------------------------------------------------
# coordinate compression


def _compress_map(values: Iterable[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(sorted(set(values)))}


def compress_layout(layout: TwoLevelLayout) -> TwoLevelLayout:
    """Remap all coordinates onto 0..m preserving order (and thus all contacts)."""
    xs = _compress_map(
        [layout.root.x_min, layout.root.x_max]
        + [v for c in layout.cells for v in (c.rect.x_min, c.rect.x_max)]
    )
    ys = _compress_map(
        [layout.root.y_min, layout.root.y_max]
        + [v for c in layout.cells for v in (c.rect.y_min, c.rect.y_max)]
    )

    def remap(r: Rect) -> Rect:
        return Rect(xs[r.x_min], ys[r.y_min], xs[r.x_max], ys[r.y_max])

    return TwoLevelLayout.of(
        remap(layout.root), [Cell(c.id, remap(c.rect), c.region) for c in layout.cells]
    )


def compress_global(gl: GlobalLayout) -> GlobalLayout:
    xs = _compress_map(
        [gl.root.x_min, gl.root.x_max] + [v for _, r in gl.regions for v in (r.x_min, r.x_max)]
    )
    ys = _compress_map(
        [gl.root.y_min, gl.root.y_max] + [v for _, r in gl.regions for v in (r.y_min, r.y_max)]
    )

    def remap(r: Rect) -> Rect:
        return Rect(xs[r.x_min], ys[r.y_min], xs[r.x_max], ys[r.y_max])

    return GlobalLayout.of(remap(gl.root), [(name, remap(r)) for name, r in gl.regions])
