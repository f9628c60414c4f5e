"""Multi-reflection route selection over a line-of-sight graph of BSs, IRSs
and users.

A route is ``BS -> IRS ... -> user`` with no repeated node; its hop count is
the number of reflections, so the direct link is a 0-hop route. Blockage is
decided in the ground plane against boxes and wall segments.
"""

import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .irs_model import IrsPanel
from .link_eval import (
    LinkReport,
    TransmitBudget,
    cascade_report,
    configure_chain,
    dominant_column,
    dominant_row,
    hop_channel,
)
from .propagation import SINGLE_ANTENNA, LinkModels, Position, path_loss

ROLES = ("bs", "irs", "user")


@dataclass(frozen=True)
class GraphNode:
    """A BS, IRS or user. IRS nodes carry their panel, the others an array."""

    id: str
    role: str
    position: Position
    panel: IrsPanel = None
    geometry: object = SINGLE_ANTENNA

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        object.__setattr__(self, "position", Position.of(self.position))
        if self.role == "irs":
            if self.panel is None:
                raise ValueError(f"IRS node {self.id!r} needs a panel")
            object.__setattr__(self, "panel", self.panel.with_position(self.position))

    @property
    def element(self):
        """The object channels are built from (panel or plain node)."""
        return self.panel if self.role == "irs" else self


@dataclass(frozen=True)
class Box:
    """Axis-aligned blocking rectangle in the ground plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("box bounds are inverted")

    def blocks(self, p, q):
        return segment_hits_box(p, q, self)


@dataclass(frozen=True)
class Wall:
    """Blocking line segment in the ground plane."""

    start: tuple
    end: tuple

    def blocks(self, p, q):
        return segments_intersect(p, q, self.start, self.end)


def _orient(a, b, c):
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)


def _on_segment(a, b, c):
    return (min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12
            and min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12)


def segments_intersect(p, q, a, b):
    """Closed 2-D segments ``pq`` and ``ab`` share at least one point."""
    p, q, a, b = (tuple(map(float, v[:2])) for v in (p, q, a, b))
    o1, o2, o3, o4 = _orient(p, q, a), _orient(p, q, b), _orient(a, b, p), _orient(a, b, q)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and _on_segment(p, q, a)) or (o2 == 0 and _on_segment(p, q, b))
            or (o3 == 0 and _on_segment(a, b, p)) or (o4 == 0 and _on_segment(a, b, q)))


def segment_hits_box(p, q, box):
    """Liang-Barsky clip of segment ``pq`` against a closed box."""
    x0, y0 = float(p[0]), float(p[1])
    dx, dy = float(q[0]) - x0, float(q[1]) - y0
    t0, t1 = 0.0, 1.0
    for d, lo, hi, s in ((dx, box.x_min, box.x_max, x0), (dy, box.y_min, box.y_max, y0)):
        if d == 0.0:
            if s < lo or s > hi:
                return False
            continue
        ta, tb = (lo - s) / d, (hi - s) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return False
    return True


@dataclass
class IrsGraph:
    """Nodes plus an undirected ``networkx`` graph holding only LoS edges."""

    nodes: dict
    graph: nx.Graph
    obstacles: tuple = ()
    links: LinkModels = field(default_factory=LinkModels)

    def has_edge(self, a, b):
        return self.graph.has_edge(a, b)

    def with_edge(self, a, b):
        """Copy with an extra LoS edge (blockage ignored)."""
        g = self.graph.copy()
        g.add_edge(a, b, distance=self.nodes[a].position.distance_to(self.nodes[b].position))
        return IrsGraph(self.nodes, g, self.obstacles, self.links)

    def ids(self, role):
        return sorted(n for n, v in self.nodes.items() if v.role == role)


def build_graph(nodes, obstacles=(), links=LinkModels()):
    """Connect every pair of nodes whose ground-plane segment is unobstructed."""
    nodes = list(nodes)
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("node ids must be unique")
    seen = {}
    for n in nodes:
        key = tuple(n.position)
        if key in seen:
            raise ValueError(f"nodes {seen[key]!r} and {n.id!r} share a position")
        seen[key] = n.id
    g = nx.Graph()
    for n in nodes:
        g.add_node(n.id, role=n.role)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            p, q = tuple(a.position), tuple(b.position)
            if not any(ob.blocks(p, q) for ob in obstacles):
                g.add_edge(a.id, b.id, distance=a.position.distance_to(b.position))
    return IrsGraph({n.id: n for n in nodes}, g, tuple(obstacles), links)


@dataclass
class ReflectionPath:
    """A route with its end-to-end evaluation.

    ``path_losses`` holds the large-scale gain of each hop and
    ``array_gains`` the coherent gain of each panel (``N^2`` when passive).
    """

    nodes: tuple
    report: LinkReport
    path_losses: tuple = ()
    array_gains: tuple = ()

    connected = True

    @property
    def hops(self):
        return len(self.nodes) - 2

    @property
    def snr(self):
        return self.report.snr


@dataclass
class Disconnected:
    """No BS-to-user route within the hop limit."""

    source: str
    target: str
    max_hops: int
    connected = False
    nodes = ()
    report = None


def _validate_path(graph, path):
    path = tuple(path)
    if len(path) < 2:
        raise ValueError("a path needs at least a BS and a user")
    roles = [graph.nodes[n].role for n in path]
    if roles[0] != "bs" or roles[-1] != "user" or any(r != "irs" for r in roles[1:-1]):
        raise ValueError(f"path must be BS -> IRS... -> user, got roles {roles}")
    if len(set(path)) != len(path):
        raise ValueError("path repeats a node")
    for a, b in zip(path, path[1:]):
        if not graph.has_edge(a, b):
            raise ValueError(f"path uses missing edge {a!r}-{b!r}")
    return path


def path_snr(graph, path, budget=TransmitBudget()):
    """Exact SNR of a route from its cascade signal equation.

    The BS uses maximum-ratio transmission towards the first hop and the user
    combines along the last hop; every panel is co-phased and amplified in
    order along the route.
    """
    path = _validate_path(graph, path)
    links = graph.links
    elems = [graph.nodes[n].element for n in path]
    roles = [graph.nodes[n].role for n in path]
    chans = [hop_channel(a, b, links, ra, rb).entries
             for a, b, ra, rb in zip(elems, elems[1:], roles, roles[1:])]
    losses = tuple(
        path_loss(a.position.distance_to(b.position), links.for_roles(ra, rb))
        for a, b, ra, rb in zip(elems, elems[1:], roles, roles[1:]))
    w = dominant_row(chans[0]).conj()
    if len(path) == 2:
        h = chans[0] @ w
        amp = dominant_column(chans[0]).conj() @ h
        sig = budget.p_t * abs(amp) ** 2
        return ReflectionPath(path, LinkReport.from_terms(sig, {"receiver": budget.noise_power}),
                              losses, ())
    h_first = chans[0] @ w
    last = chans[-1]
    h_last = dominant_column(last).conj() @ last
    panels = configure_chain(budget, h_first, chans[1:-1], h_last, elems[1:-1])
    report = cascade_report(budget, h_first, chans[1:-1], h_last, panels)
    gains = tuple(float(np.mean(p.amplitudes) ** 2 * p.n_elements ** 2) for p in panels)
    return ReflectionPath(path, report, losses, gains)


def _endpoints(graph, source, target):
    if source is None:
        bss = graph.ids("bs")
        if len(bss) != 1:
            raise ValueError("graph has several BSs; pass source")
        source = bss[0]
    if target is None:
        users = graph.ids("user")
        if len(users) != 1:
            raise ValueError("graph has several users; pass target")
        target = users[0]
    return source, target


def enumerate_paths(graph, source, target, max_hops):
    """Simple BS-to-user routes through IRS nodes with at most ``max_hops`` reflections,
    in depth-first order over sorted neighbour ids."""
    g = graph.graph
    out = []

    def walk(path):
        node = path[-1]
        for nb in sorted(g.neighbors(node)):
            if nb == target:
                out.append(tuple(path) + (nb,))
            elif graph.nodes[nb].role == "irs" and nb not in path and len(path) <= max_hops:
                walk(path + [nb])

    walk([source])
    return out


def _route_key(snr, path):
    # larger snr first, then fewer hops, then lexicographic ids
    return (-snr, len(path), path)


def best_path(graph, budget=TransmitBudget(), max_hops=3, source=None, target=None, fast=False):
    """Highest-SNR route with at most ``max_hops`` reflections.

    ``fast=True`` uses a log-domain dynamic program that is exact for
    passive panels; graphs with active panels fall back to enumeration.
    Returns :class:`Disconnected` when no route exists.
    """
    if int(max_hops) != max_hops or max_hops < 0:
        raise ValueError(f"max_hops must be a non-negative integer, got {max_hops}")
    source, target = _endpoints(graph, source, target)
    if fast and all(n.panel.is_passive for n in graph.nodes.values() if n.role == "irs"):
        path = _fast_route(graph, source, target, int(max_hops))
        if path is None:
            return Disconnected(source, target, max_hops)
        if path != ():
            return path_snr(graph, path, budget)
    best, best_key = None, None
    for path in enumerate_paths(graph, source, target, int(max_hops)):
        cand = path_snr(graph, path, budget)
        key = _route_key(cand.snr, path)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best if best is not None else Disconnected(source, target, max_hops)


def _edge_log_gain(graph, a, b):
    """log of the rank-one cascade factor contributed by hop ``a -> b`` and panel ``b``."""
    na, nb = graph.nodes[a], graph.nodes[b]
    d = na.position.distance_to(nb.position)
    g = math.log(path_loss(d, graph.links.for_roles(na.role, nb.role)))
    if na.role == "bs":
        g += math.log(na.geometry.element_count)
    if nb.role == "irs":
        g += 2 * math.log(nb.panel.n_elements)
    else:
        g += math.log(nb.geometry.element_count)
    return g


def _fast_route(graph, source, target, max_hops):
    """Hop-limited longest walk in log gain. Returns the route, ``None`` if the
    user is unreachable, or ``()`` when the best walk repeats a node (the
    caller then enumerates)."""
    g = graph.graph
    layer = {source: (0.0, (source,))}
    best = None
    for step in range(max_hops + 1):
        nxt = {}
        for node, (val, walk) in sorted(layer.items()):
            for nb in sorted(g.neighbors(node)):
                role = graph.nodes[nb].role
                if role == "bs" or (role == "user" and nb != target):
                    continue
                cand = (val + _edge_log_gain(graph, node, nb), walk + (nb,))
                if nb == target:
                    if best is None or (-cand[0], len(cand[1]), cand[1]) < (-best[0], len(best[1]), best[1]):
                        best = cand
                    continue
                if step == max_hops:
                    continue
                cur = nxt.get(nb)
                if cur is None or (-cand[0], cand[1]) < (-cur[0], cur[1]):
                    nxt[nb] = cand
        layer = nxt
    if best is None:
        return None
    walk = best[1]
    return walk if len(set(walk)) == len(walk) else ()
