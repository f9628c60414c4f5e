import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsdeploy.beam_routing import (
    Box,
    GraphNode,
    Wall,
    best_path,
    build_graph,
    enumerate_paths,
    path_snr,
    segment_hits_box,
    segments_intersect,
)
from irsdeploy.irs_model import IrsPanel, co_phase_align
from irsdeploy.link_eval import (
    TransmitBudget,
    cascade_report,
    configure_chain,
    double_reflection,
    hop_channel,
    siso_single_reflection,
)
from irsdeploy.propagation import ArrayGeometry

from oracles import (
    brute_force_routes,
    monte_carlo_snr,
    random_routing_nodes,
    reference_best_route,
    segment_meets_box,
    segments_cross,
)

BUDGET = TransmitBudget(1e-2, 1e-12)
pt = st.tuples(st.integers(-10, 10), st.integers(-10, 10)).map(lambda p: (p[0] / 2, p[1] / 2))


def irs(id_, pos, n=16, kind="passive", budget=0.0):
    return GraphNode(id_, "irs", pos, IrsPanel((0, 0), ArrayGeometry(n, axis=(0, 1, 0)), kind, budget))


@settings(max_examples=300)
@given(pt, pt, pt, pt)
def test_segment_intersection_matches_oracle(p, q, a, b):
    assert segments_intersect(p, q, a, b) == segments_cross(p, q, a, b)


@settings(max_examples=300)
@given(pt, pt, st.tuples(st.integers(-8, 6), st.integers(1, 5), st.integers(-8, 6), st.integers(1, 5)))
def test_box_clip_matches_oracle(p, q, box):
    x0, w, y0, h = (v / 2 for v in box)
    bx = Box(x0, x0 + w, y0, y0 + h)
    assert segment_hits_box(p, q, bx) == segment_meets_box(p, q, (bx.x_min, bx.x_max, bx.y_min, bx.y_max))


def test_no_obstacles_complete_graph():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (10, 0)),
             irs("a", (5, 5)), irs("b", (5, -5))]
    g = build_graph(nodes)
    assert g.graph.number_of_edges() == 6


def test_wall_blocks_only_direct_link():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (10, 0)), irs("a", (5, 5))]
    g = build_graph(nodes, [Wall((5, -1), (5, 1))])
    assert not g.has_edge("bs", "ue")
    assert g.has_edge("bs", "a") and g.has_edge("a", "ue")


def test_graph_rejects_duplicates():
    with pytest.raises(ValueError):
        build_graph([GraphNode("x", "bs", (0, 0)), GraphNode("x", "user", (1, 0))])
    with pytest.raises(ValueError):
        build_graph([GraphNode("x", "bs", (0, 0)), GraphNode("y", "user", (0, 0))])
    with pytest.raises(ValueError):
        GraphNode("r", "irs", (1, 1))
    with pytest.raises(ValueError):
        GraphNode("r", "relay", (1, 1))


@pytest.mark.parametrize("seed", range(10))
def test_random_graph_edges_match_geometric_oracle(seed):
    nodes, boxes = random_routing_nodes(np.random.default_rng(seed))
    g = build_graph(nodes, boxes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            blocked = any(segment_meets_box(tuple(a.position), tuple(b.position),
                                            (o.x_min, o.x_max, o.y_min, o.y_max)) for o in boxes)
            assert g.has_edge(a.id, b.id) == (not blocked)
    assert all(u != v for u, v in g.graph.edges)


def test_one_hop_equals_single_reflection():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (30, 0)), irs("a", (10, 6), 32)]
    g = build_graph(nodes, [Box(14, 16, -2, 2)])
    rp = path_snr(g, ("bs", "a", "ue"), BUDGET)
    panel = g.nodes["a"].panel
    h1 = hop_channel(g.nodes["bs"], panel, g.links, "bs", "irs").entries[:, 0]
    h2 = hop_channel(panel, g.nodes["ue"], g.links, "irs", "user").entries[0]
    ref = siso_single_reflection(BUDGET, h1, h2, panel, co_phase_align(h1, h2)).snr
    assert rp.snr == pytest.approx(ref, rel=1e-9)
    assert rp.hops == 1 and rp.array_gains == (32 ** 2,)


def test_two_hop_passive_equals_double_reflection():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (30, 0)),
             irs("a", (3, 8), 16), irs("b", (27, 8), 16)]
    g = build_graph(nodes)
    rp = path_snr(g, ("bs", "a", "b", "ue"), BUDGET)
    pa, pb = g.nodes["a"].panel, g.nodes["b"].panel
    h1 = hop_channel(g.nodes["bs"], pa, g.links, "bs", "irs").entries[:, 0]
    d = hop_channel(pa, pb, g.links, "irs", "irs").entries
    h2 = hop_channel(pb, g.nodes["ue"], g.links, "irs", "user").entries[0]
    panels = configure_chain(BUDGET, h1, [d], h2, [pa, pb])
    ref = double_reflection(BUDGET, h1, d, h2, *panels).snr
    assert rp.snr == pytest.approx(ref, rel=1e-12)


def test_three_hop_matches_monte_carlo():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (12, 0)),
             irs("a", (1, 3), 4), irs("b", (6, 5), 4, "active", 1e-4), irs("c", (11, 3), 4)]
    g = build_graph(nodes)
    path = ("bs", "a", "b", "c", "ue")
    rp = path_snr(g, path, BUDGET)
    elems = [g.nodes[n].element for n in path]
    roles = [g.nodes[n].role for n in path]
    ch = [hop_channel(a, b, g.links, ra, rb).entries
          for a, b, ra, rb in zip(elems, elems[1:], roles, roles[1:])]
    panels = configure_chain(BUDGET, ch[0][:, 0], ch[1:-1], ch[-1][0], elems[1:-1])
    mc = monte_carlo_snr(BUDGET.p_t, BUDGET.noise_power, ch[0][:, 0], ch[1:-1], ch[-1][0], panels,
                         draws=400_000, seed=1)
    assert mc == pytest.approx(rp.snr, rel=0.01)
    closed = cascade_report(BUDGET, ch[0][:, 0], ch[1:-1], ch[-1][0], panels).snr
    assert closed == pytest.approx(rp.snr, rel=1e-12)


def test_invalid_paths_rejected():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (10, 0)), irs("a", (5, 5))]
    g = build_graph(nodes, [Wall((5, -1), (5, 1))])
    for bad in [("bs", "ue"), ("a", "ue"), ("bs", "a"), ("bs", "a", "a", "ue"), ("bs",)]:
        with pytest.raises(ValueError):
            path_snr(g, bad)


def test_single_path_and_disconnected():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (10, 0)), irs("a", (5, 5))]
    g = build_graph(nodes, [Wall((5, -1), (5, 1))])
    assert best_path(g, BUDGET).nodes == ("bs", "a", "ue")
    g2 = build_graph(nodes, [Wall((5, -1), (5, 1)), Wall((0, 3), (10, 3))])
    r = best_path(g2, BUDGET)
    assert not r.connected and r.max_hops == 3
    assert best_path(g, BUDGET, max_hops=0).connected is False
    with pytest.raises(ValueError):
        best_path(g, BUDGET, max_hops=-1)


def test_direct_link_is_zero_hop_route():
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (5, 0)), irs("a", (40, 40), 8)]
    r = best_path(build_graph(nodes), BUDGET)
    assert r.nodes == ("bs", "ue") and r.hops == 0


def test_ties_prefer_fewer_hops_then_ids():
    # mirror-image IRSs give identical SNRs; the lexicographically smaller id wins
    nodes = [GraphNode("bs", "bs", (0, 0)), GraphNode("ue", "user", (20, 0)),
             irs("m", (10, 5), 16), irs("k", (10, -5), 16)]
    g = build_graph(nodes, [Wall((10, -1), (10, 1))])
    snr_m = path_snr(g, ("bs", "m", "ue")).snr
    snr_k = path_snr(g, ("bs", "k", "ue")).snr
    assert snr_m == pytest.approx(snr_k, rel=1e-12)
    r = best_path(g)
    expected = min([("bs", "m", "ue"), ("bs", "k", "ue")],
                   key=lambda p: (-path_snr(g, p).snr, len(p), p))
    assert r.nodes == expected


@pytest.mark.parametrize("seed", range(15))
def test_best_path_matches_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    nodes, boxes = random_routing_nodes(rng)
    g = build_graph(nodes, boxes)
    max_hops = int(rng.integers(1, 4))
    ref = reference_best_route(g, BUDGET, max_hops)
    got = best_path(g, BUDGET, max_hops)
    if ref is None:
        assert not got.connected
    else:
        assert got.nodes == ref
    roles = {k: v.role for k, v in g.nodes.items()}
    assert sorted(enumerate_paths(g, "bs", "ue", max_hops)) == sorted(
        brute_force_routes(g.graph, roles, "bs", "ue", max_hops))


@pytest.mark.parametrize("seed", range(15))
def test_fast_mode_matches_enumeration_for_passive_graphs(seed):
    rng = np.random.default_rng(500 + seed)
    nodes, boxes = random_routing_nodes(rng, active_prob=0.0)
    g = build_graph(nodes, boxes)
    for max_hops in (1, 2, 3):
        slow = best_path(g, BUDGET, max_hops)
        fast = best_path(g, BUDGET, max_hops, fast=True)
        assert fast.connected == slow.connected
        if slow.connected:
            assert fast.snr == pytest.approx(slow.snr, rel=1e-9)
