"""Tests for the tailed-graph container and its slot bookkeeping."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwscatter.graph import (
    Arc,
    DanglingArc,
    DuplicateTailIndex,
    EmptyInterior,
    GraphError,
    NotBalanced,
    Tail,
    build_graph,
    from_finite_graph,
)


def two_cycle():
    return build_graph(
        ["u", "v"],
        [("u", "v"), ("v", "u")],
        [(1, "u", "u")],
    )


def test_carrier_layout():
    g = two_cycle()
    assert g.n_arcs == 2
    assert g.n_tails == 1
    assert g.carrier_dim == 4
    assert g.carrier_labels() == ["arc0", "arc1", "in1", "out1"]


def test_named_arcs_keep_their_labels():
    g = build_graph(
        ["u", "v"],
        [Arc("u", "v", "fwd"), ("v", "u")],
        [(1, "v", "v")],
    )
    assert g.carrier_labels()[0] == "fwd"
    assert g.carrier_labels()[1] == "arc1"


def test_slot_index_blocks():
    g = two_cycle()
    assert g.slot_index(("arc", 0)) == 0
    assert g.slot_index(("arc", 1)) == 1
    assert g.slot_index(("in", 1)) == 2
    assert g.slot_index(("out", 1)) == 3
    with pytest.raises(KeyError):
        g.slot_index(("sideways", 1))


def test_coin_slot_order_arcs_before_tails():
    g = two_cycle()
    # incoming side of u: the interior arc v->u, then the incoming tail
    assert g.in_slots("u") == [("arc", 1), ("in", 1)]
    assert g.out_slots("u") == [("arc", 0), ("out", 1)]
    assert g.in_slots("v") == [("arc", 0)]
    assert g.out_slots("v") == [("arc", 1)]


def test_degree_counts_tails():
    g = two_cycle()
    assert g.degree("u") == 2
    assert g.degree("v") == 1


def test_slot_partition():
    g = two_cycle()
    in_all = sorted(g.slot_index(k) for v in g.vertices for k in g.in_slots(v))
    out_all = sorted(g.slot_index(k) for v in g.vertices for k in g.out_slots(v))
    # every arc plus every incoming tail appears exactly once on the in side
    assert in_all == [0, 1, 2]
    assert out_all == [0, 1, 3]


def test_unbalanced_graph_rejected():
    with pytest.raises(NotBalanced):
        build_graph(["u", "v"], [("u", "v")], [(1, "u", "u")])


def test_tails_can_rebalance_vertices():
    # u has out-degree 2 / in-degree 1 from the arcs; an incoming tail at u
    # and an outgoing tail at v square both coins up.
    g = build_graph(
        ["u", "v"],
        [("u", "v"), ("u", "v"), ("v", "u")],
        [(1, "u", "v")],
    )
    assert g.degree("u") == 2
    assert g.degree("v") == 2


def test_dangling_arc_rejected():
    with pytest.raises(DanglingArc):
        build_graph(["u"], [("u", "w")], [(1, "u", "u")])


def test_dangling_tail_rejected():
    with pytest.raises(DanglingArc):
        build_graph(["u"], [("u", "u")], [(1, "w", "u")])


def test_duplicate_tail_index_rejected():
    with pytest.raises(DuplicateTailIndex):
        build_graph(
            ["u"],
            [("u", "u"), ("u", "u")],
            [(1, "u", "u"), (1, "u", "u")],
        )


def test_empty_interior_rejected():
    with pytest.raises(EmptyInterior):
        build_graph([], [], [(1, "u", "u")])


def test_arcless_vertex_is_allowed():
    # a bare junction: the tail pair meets a vertex with no interior arcs
    g = build_graph(["u"], [], [(1, "u", "u")])
    assert g.carrier_labels() == ["in1", "out1"]
    assert g.degree("u") == 1


def test_duplicate_vertices_rejected():
    with pytest.raises(GraphError):
        build_graph(["u", "u"], [("u", "u")], [(1, "u", "u")])


def test_no_tails_rejected():
    with pytest.raises(GraphError):
        build_graph(["u"], [("u", "u")], [])


def test_tail_indices_must_start_at_one():
    with pytest.raises(GraphError):
        build_graph(["u"], [("u", "u")], [(2, "u", "u")])


def test_from_finite_graph_cuts_boundary():
    # square v0 -> v1 -> b -> v2 -> v0 cut open at b
    g = from_finite_graph(
        ["v0", "v1", "v2", "b"],
        [("v0", "v1"), ("v1", "b"), ("b", "v2"), ("v2", "v0")],
        ["b"],
    )
    assert g.vertices == ("v0", "v1", "v2")
    assert g.n_arcs == 2
    assert g.n_tails == 1
    (tail,) = g.tails
    # incoming half lands where b's out-arc pointed, outgoing half leaves
    # from where b's in-arc originated
    assert tail == Tail(index=1, in_vertex="v2", out_vertex="v1")


def test_from_finite_graph_needs_matching_boundary_degrees():
    # boundary vertex with 2 out-arcs and 1 in-arc cannot be paired up
    with pytest.raises(GraphError):
        from_finite_graph(
            ["v0", "b"],
            [("v0", "v0"), ("b", "v0"), ("b", "v0"), ("v0", "b")],
            ["b"],
        )


@st.composite
def cycle_unions(draw):
    nv = draw(st.integers(min_value=1, max_value=4))
    names = [f"v{i}" for i in range(nv)]
    n_cycles = draw(st.integers(min_value=1, max_value=3))
    arcs = []
    for _ in range(n_cycles):
        seq = draw(st.lists(st.integers(0, nv - 1), min_size=1, max_size=5))
        for i in range(len(seq)):
            arcs.append((names[seq[i]], names[seq[(i + 1) % len(seq)]]))
    n_tails = draw(st.integers(min_value=1, max_value=3))
    anchors = draw(st.lists(st.integers(0, nv - 1), min_size=n_tails, max_size=n_tails))
    tails = [(n + 1, names[a], names[a]) for n, a in enumerate(anchors)]
    return names, arcs, tails


@given(cycle_unions())
@settings(max_examples=60, deadline=None)
def test_cycle_unions_are_balanced(data):
    names, arcs, tails = data
    g = build_graph(names, arcs, tails)
    # each slot shows up exactly once per side
    in_all = sorted(g.slot_index(k) for v in g.vertices for k in g.in_slots(v))
    out_all = sorted(g.slot_index(k) for v in g.vertices for k in g.out_slots(v))
    n, t = g.n_arcs, g.n_tails
    assert in_all == list(range(n + t))
    assert out_all == list(range(n)) + list(range(n + t, n + 2 * t))


@given(cycle_unions())
@settings(max_examples=30, deadline=None)
def test_dropping_an_arc_breaks_balance(data):
    names, arcs, tails = data
    build_graph(names, arcs, tails)
    if arcs[0][0] == arcs[0][1]:
        return  # removing a self-loop keeps every vertex balanced
    with pytest.raises(NotBalanced):
        build_graph(names, arcs[1:], tails)
