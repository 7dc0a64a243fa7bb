"""Tests for regular edge labelings, lattice moves, and the event poset."""

import random

import pytest

from gen import random_complex, two_tier_layout
from oracles import all_labelings_brute
from rectangulate.dualgraph import MARKS, extended_dual, separating_4cycles
from rectangulate.geometry import Direction, GlobalLayout, Rect, validate_layout
from rectangulate.rel import (
    FlipEvent,
    LabelingError,
    applicable_flips,
    apply_flip,
    build_flip_poset,
    flip_candidates,
    labeling_from_layout,
    layout_from_labeling,
    minimal_labeling,
    validate_labeling,
)

# Four arms around a two-cell core; the arm ring is a separating
# 4-cycle, which disconnects the flip lattice (see the witness test).
WINDMILL = GlobalLayout.of(
    Rect(0, 0, 6, 6),
    {
        "A": Rect(0, 0, 4, 2),
        "B": Rect(4, 0, 6, 4),
        "C": Rect(2, 4, 6, 6),
        "D": Rect(0, 2, 2, 6),
        "E": Rect(2, 2, 4, 3),
        "F": Rect(2, 3, 4, 4),
    },
)

# Pinwheel around a degree-4 centre: the one shape whose vertex flip moves.
CENTER = GlobalLayout.of(
    Rect(0, 0, 3, 3),
    {
        "A": Rect(0, 0, 2, 1),
        "B": Rect(2, 0, 3, 2),
        "C": Rect(1, 2, 3, 3),
        "D": Rect(0, 1, 1, 3),
        "X": Rect(1, 1, 2, 2),
    },
)

# Two staggered columns; one movable edge.
STAGGER = GlobalLayout.of(
    Rect(0, 0, 4, 4),
    {
        "A": Rect(0, 0, 2, 2),
        "B": Rect(0, 2, 2, 4),
        "C": Rect(2, 0, 4, 3),
        "D": Rect(2, 3, 4, 4),
    },
)

# Pinwheel with the left arm split along its length: a three-element
# lattice whose ascent mixes a vertex event and an edge event.
SPLITWHEEL = GlobalLayout.of(
    Rect(0, 0, 6, 6),
    {
        "A": Rect(0, 0, 4, 2),
        "B": Rect(4, 0, 6, 4),
        "C": Rect(2, 4, 6, 6),
        "D1": Rect(0, 2, 2, 5),
        "D2": Rect(0, 5, 2, 6),
        "X": Rect(2, 2, 4, 4),
    },
)


def rects(gl):
    return {k: (r.x_min, r.y_min, r.x_max, r.y_max) for k, r in gl.by_id.items()}


def brute(rel):
    return all_labelings_brute(rel.graph, rel.corners)


def bfs_labelings(rel):
    """Everything reachable from ``rel`` by flips, in both directions."""
    seen = {rel}
    frontier = [rel]
    while frontier:
        nxt = []
        for cur in frontier:
            for ccw in (True, False):
                for item in applicable_flips(cur, ccw):
                    out = apply_flip(cur, item, ccw)
                    if out not in seen:
                        seen.add(out)
                        nxt.append(out)
        frontier = nxt
    return seen


def eight_cell_instance():
    """A fixed 8-cell layout whose lattice needs a two-rotation event."""
    rng = random.Random(0)
    comp = random_complex(rng, rng.randrange(5, 10))
    bb = comp.bbox
    assert sum(c.rect.area for c in comp.cells) == bb.area
    cells = {c.id: c.rect.translated(-bb.x_min, -bb.y_min) for c in comp.cells}
    return GlobalLayout.of(Rect(0, 0, bb.width, bb.height), cells)


def clean_random_layouts(limit):
    """Random rectangle-filling layouts without nontrivial separating 4-cycles."""
    out = []
    seed = 0
    while len(out) < limit and seed < 500:
        rng = random.Random(seed)
        seed += 1
        comp = random_complex(rng, rng.randrange(5, 10))
        bb = comp.bbox
        if sum(c.rect.area for c in comp.cells) != bb.area:
            continue
        cells = {c.id: c.rect.translated(-bb.x_min, -bb.y_min) for c in comp.cells}
        layout = GlobalLayout.of(Rect(0, 0, bb.width, bb.height), cells)
        if separating_4cycles(extended_dual(layout)):
            continue
        out.append(layout)
    return out


class TestLabelingFromLayout:
    def test_windmill_colors(self):
        rel = labeling_from_layout(WINDMILL)
        assert rel.corners == MARKS
        assert sorted(rel.blue) == [
            ("A", "B"), ("B", "r"), ("C", "r"), ("D", "C"), ("D", "E"),
            ("D", "F"), ("E", "B"), ("F", "B"), ("l", "A"), ("l", "D"),
        ]
        assert sorted(rel.red) == [
            ("A", "D"), ("A", "E"), ("B", "C"), ("C", "t"), ("D", "t"),
            ("E", "F"), ("F", "C"), ("b", "A"), ("b", "B"),
        ]

    def test_direction_matches_the_drawing(self):
        rel = labeling_from_layout(WINDMILL)
        for a, b, d, _ in WINDMILL.adjacencies:
            assert rel.direction(a, b) is d

    def test_marker_edges_point_outward(self):
        rel = labeling_from_layout(WINDMILL)
        assert rel.direction("A", "l") is Direction.LEFT
        assert rel.direction("C", "t") is Direction.TOP
        assert rel.direction("B", "r") is Direction.RIGHT
        assert rel.direction("A", "b") is Direction.BOTTOM

    def test_state_is_mirror_symmetric(self):
        rel = labeling_from_layout(WINDMILL)
        assert rel.state("A", "B") == ("blue", True)
        assert rel.state("B", "A") == ("blue", False)
        assert rel.state("E", "F") == ("red", True)

    def test_unlabeled_pair_raises(self):
        rel = labeling_from_layout(WINDMILL)
        with pytest.raises(LabelingError, match="carries no label"):
            rel.state("A", "C")

    def test_two_tier_layouts_produce_valid_labelings(self):
        for seed in range(10):
            rng = random.Random(seed)
            rel = labeling_from_layout(two_tier_layout(rng, 4, 8))
            assert rel.corners == MARKS  # validated on construction


class TestValidateLabeling:
    def test_missing_inner_label(self):
        rel = labeling_from_layout(CENTER)
        broken = rel.with_edges(rel.blue - {("A", "B")}, rel.red)
        with pytest.raises(LabelingError, match="unlabeled inner edges"):
            validate_labeling(broken)

    def test_double_label(self):
        rel = labeling_from_layout(CENTER)
        broken = rel.with_edges(rel.blue, rel.red | {("A", "B")})
        with pytest.raises(LabelingError, match="labeled twice"):
            validate_labeling(broken)

    def test_outer_edge_must_stay_unlabeled(self):
        rel = labeling_from_layout(CENTER)
        broken = rel.with_edges(rel.blue | {("l", "t")}, rel.red)
        with pytest.raises(LabelingError, match="must stay unlabeled"):
            validate_labeling(broken)

    def test_label_on_missing_edge(self):
        rel = labeling_from_layout(CENTER)
        broken = rel.with_edges(rel.blue | {("A", "C")}, rel.red)
        with pytest.raises(LabelingError, match="label on missing edge"):
            validate_labeling(broken)

    def test_recoloring_one_edge_is_irregular(self):
        rel = labeling_from_layout(CENTER)
        assert ("A", "B") in rel.blue
        broken = rel.with_edges(rel.blue - {("A", "B")}, rel.red | {("A", "B")})
        with pytest.raises(LabelingError, match="irregular at"):
            validate_labeling(broken)

    def test_corners_must_walk_the_outer_face(self):
        rel = labeling_from_layout(CENTER)
        scrambled = type(rel)(rel.graph, ("l", "t", "b", "r"), rel.blue, rel.red)
        with pytest.raises(LabelingError, match="rotation of the outer face"):
            validate_labeling(scrambled)


class TestLayoutFromLabeling:
    def test_windmill_compact_drawing(self):
        gl = layout_from_labeling(labeling_from_layout(WINDMILL))
        assert rects(gl) == {
            "A": (0, 0, 2, 1),
            "B": (2, 0, 3, 3),
            "C": (1, 3, 3, 4),
            "D": (0, 1, 1, 4),
            "E": (1, 1, 2, 2),
            "F": (1, 2, 2, 3),
        }
        assert gl.root == Rect(0, 0, 3, 4)

    def test_windmill_round_trip(self):
        rel = labeling_from_layout(WINDMILL)
        again = labeling_from_layout(layout_from_labeling(rel))
        assert (again.blue, again.red) == (rel.blue, rel.red)

    def test_flip_unreachable_labeling_draws(self):
        """The windmill's second labeling also corresponds to a drawing."""
        rel = labeling_from_layout(WINDMILL)
        other = next(lr for lr in brute(rel) if lr != (rel.blue, rel.red))
        gl = layout_from_labeling(rel.with_edges(*other))
        assert rects(gl) == {
            "A": (0, 0, 1, 2),
            "B": (1, 0, 4, 1),
            "C": (3, 1, 4, 3),
            "D": (0, 2, 3, 3),
            "E": (1, 1, 2, 2),
            "F": (2, 1, 3, 2),
        }
        assert gl.root == Rect(0, 0, 4, 3)

    def test_random_round_trips(self):
        for seed in range(30):
            rng = random.Random(seed)
            layout = two_tier_layout(rng, rng.randrange(3, 7), 9)
            rel = labeling_from_layout(layout)
            drawn = layout_from_labeling(rel)
            assert not validate_layout(drawn.as_layout())
            again = labeling_from_layout(drawn)
            assert (again.blue, again.red) == (rel.blue, rel.red)


class TestFlips:
    def test_windmill_is_flip_frozen(self):
        rel = labeling_from_layout(WINDMILL)
        assert applicable_flips(rel, ccw=True) == []
        assert applicable_flips(rel, ccw=False) == []

    def test_center_rotates_at_the_middle(self):
        rel = labeling_from_layout(CENTER)
        assert applicable_flips(rel, ccw=True) == []
        assert applicable_flips(rel, ccw=False) == ["X"]

    def test_stagger_rotates_one_edge(self):
        rel = labeling_from_layout(STAGGER)
        assert applicable_flips(rel, ccw=False) == [("B", "C")]

    def test_vertex_flip_touches_only_the_star(self):
        rel = labeling_from_layout(CENTER)
        out = apply_flip(rel, "X", ccw=False)
        changed = {
            frozenset(e)
            for e in (rel.blue ^ out.blue) | (rel.red ^ out.red)
        }
        assert changed == {frozenset(("X", u)) for u in rel.graph.rotation["X"]}

    def test_flips_are_involutions(self):
        for seed in range(12):
            rng = random.Random(seed)
            rel = labeling_from_layout(two_tier_layout(rng, 4, 8))
            for ccw in (True, False):
                for item in applicable_flips(rel, ccw):
                    there = apply_flip(rel, item, ccw)
                    back = apply_flip(there, item, not ccw)
                    assert (back.blue, back.red) == (rel.blue, rel.red)

    def test_inapplicable_flip_raises(self):
        rel = labeling_from_layout(WINDMILL)
        with pytest.raises(LabelingError, match="flip not applicable"):
            apply_flip(rel, ("E", "F"), ccw=True)

    def test_candidates_exclude_corner_incident_edges(self):
        rel = labeling_from_layout(CENTER)
        for item in flip_candidates(rel):
            if isinstance(item, str):
                assert item not in rel.corner_index
            else:
                assert not set(item) & set(MARKS)

    def test_stagger_has_inert_vertex_candidates(self):
        # degree-4 vertices are candidates even when they never move
        rel = labeling_from_layout(STAGGER)
        cands = flip_candidates(rel)
        assert "A" in cands and "D" in cands
        assert all(item == ("B", "C") for item in applicable_flips(rel, False))


class TestMinimalLabeling:
    def test_fixed_point(self):
        rel = labeling_from_layout(WINDMILL)
        assert minimal_labeling(rel) == rel

    def test_center_descends_one_step(self):
        rel = labeling_from_layout(CENTER)
        low = minimal_labeling(rel)
        assert low == apply_flip(rel, "X", ccw=False)
        assert applicable_flips(low, ccw=False) == []

    def test_all_lattice_elements_share_one_minimum(self):
        for gl in (CENTER, STAGGER, SPLITWHEEL):
            rel = labeling_from_layout(gl)
            low = minimal_labeling(rel)
            for blue, red in brute(rel):
                assert minimal_labeling(rel.with_edges(blue, red)) == low


class TestFlipPoset:
    def test_center_poset_is_one_event(self):
        poset = build_flip_poset(labeling_from_layout(CENTER))
        assert [(e.item, e.number) for e in poset.events] == [("X", 1)]
        assert poset.preds[FlipEvent("X", 1)] == frozenset()

    def test_splitwheel_chains_vertex_then_edge(self):
        poset = build_flip_poset(labeling_from_layout(SPLITWHEEL))
        assert [(e.item, e.number) for e in poset.events] == [
            ("X", 1),
            (("C", "D1"), 1),
        ]
        assert poset.preds[FlipEvent(("C", "D1"), 1)] == {FlipEvent("X", 1)}

    def test_eight_cell_dependency_table(self):
        """An event can wait on several rotations, twice on the same edge."""
        poset = build_flip_poset(labeling_from_layout(eight_cell_instance()))
        table = {
            (e.item, e.number): sorted((p.item, p.number) for p in poset.preds[e])
            for e in poset.events
        }
        assert table == {
            (("c3", "c6"), 1): [],
            (("c1", "c3"), 1): [(("c3", "c6"), 1)],
            (("c1", "c6"), 1): [(("c1", "c3"), 1), (("c3", "c6"), 1)],
            (("c5", "c6"), 1): [(("c3", "c6"), 1)],
            (("c3", "c5"), 1): [(("c3", "c6"), 1), (("c5", "c6"), 1)],
            (("c3", "c6"), 2): [
                (("c1", "c3"), 1),
                (("c1", "c6"), 1),
                (("c3", "c5"), 1),
                (("c3", "c6"), 1),
                (("c5", "c6"), 1),
            ],
        }

    def test_ascent_order_is_a_linear_extension(self):
        for gl in (SPLITWHEEL, eight_cell_instance()):
            poset = build_flip_poset(labeling_from_layout(gl))
            done = set()
            for ev in poset.events:
                assert poset.preds[ev] <= done
                done.add(ev)

    def test_closed_sets_count_the_labelings(self):
        checked = 0
        for layout in clean_random_layouts(15):
            rel = labeling_from_layout(layout)
            poset = build_flip_poset(rel)
            closed = list(poset.all_closed_sets())
            labs = brute(rel)
            assert len(closed) == len(labs)
            realized = {(r.blue, r.red) for r in map(poset.realize, closed)}
            assert realized == labs
            checked += 1
        assert checked == 15

    def test_flip_reachability_matches_enumeration_when_clean(self):
        for layout in clean_random_layouts(6):
            rel = labeling_from_layout(layout)
            assert {(r.blue, r.red) for r in bfs_labelings(rel)} == brute(rel)

    def test_windmill_lattice_is_disconnected(self):
        """With a nontrivial separating 4-cycle, flips miss labelings."""
        rel = labeling_from_layout(WINDMILL)
        assert separating_4cycles(rel.graph)
        assert len(brute(rel)) == 2
        assert len(bfs_labelings(rel)) == 1
        poset = build_flip_poset(rel)
        assert poset.events == ()
        assert len(list(poset.all_closed_sets())) == 1

    def test_realize_rejects_gapped_sets(self):
        poset = build_flip_poset(labeling_from_layout(SPLITWHEEL))
        with pytest.raises(LabelingError, match="not downward closed"):
            poset.realize({FlipEvent(("C", "D1"), 1)})

    def test_realize_of_everything_is_the_top(self):
        rel = labeling_from_layout(SPLITWHEEL)
        poset = build_flip_poset(rel)
        top = poset.realize(poset.events)
        assert applicable_flips(top, ccw=True) == []
        # the input sat strictly between the two lattice ends
        assert (top.blue, top.red) != (rel.blue, rel.red)
        assert (poset.base.blue, poset.base.red) != (rel.blue, rel.red)

    def test_weights_must_name_real_events(self):
        poset = build_flip_poset(labeling_from_layout(CENTER))
        with pytest.raises(LabelingError, match="unknown events"):
            poset.with_weights({FlipEvent(("A", "B"), 1): 3})
