"""Deployment optimizers: IRS placement, element allocation, hybrid order
selection, architecture comparison and D-MIMO association.

Every optimizer is an exhaustive search over a finite candidate set, so its
trace doubles as its own oracle. The placement and allocation searches are
also exposed as scikit-learn style estimators whose ``fit`` takes a problem
description and stores the result in trailing-underscore attributes.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .irs_model import IrsPanel
from .link_eval import (
    LinkModels,
    Node,
    TransmitBudget,
    _as_points,
    align_mimo_panel,
    cascade_report,
    configure_chain,
    hop_channel,
    mimo_capacity,
    multiuser_centralized_rate,
    multiuser_distributed_rate,
    received_powers,
    spatial_frequency,
    static_area_config,
)
from .propagation import ArrayGeometry, Position


@dataclass
class DeploymentSolution:
    """Optimizer output.

    ``trace`` lists every evaluated ``(candidate, objective)`` pair in
    evaluation order; ``objective`` is the best of them.
    """

    positions: list
    element_split: list
    objective: float
    trace: list = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# candidate grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchGrid:
    """Segment or rectangle of candidate positions.

    ``domain`` is ``("segment", p0, p1)`` or ``("rectangle", (x0, x1), (y0, y1))``
    (the rectangle lies at height ``z``). Each refinement level halves the
    step and probes the neighbours of the incumbent.
    """

    domain: tuple
    resolution: float = 0.5
    refinement_levels: int = 0
    z: float = 0.0

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError("resolution must be > 0")
        if self.refinement_levels < 0:
            raise ValueError("refinement_levels must be >= 0")
        if self.domain[0] not in ("segment", "rectangle"):
            raise ValueError(f"unknown domain {self.domain[0]!r}")

    @classmethod
    def segment(cls, p0, p1, resolution=0.5, refinement_levels=0):
        return cls(("segment", tuple(Position.of(p0)), tuple(Position.of(p1))),
                   resolution, refinement_levels)

    @classmethod
    def rectangle(cls, x_range, y_range, resolution=0.5, refinement_levels=0, z=0.0):
        return cls(("rectangle", tuple(x_range), tuple(y_range)), resolution,
                   refinement_levels, z)

    def _axis(self, lo, hi, step):
        n = max(int(math.floor((hi - lo) / step + 1e-9)), 0)
        pts = lo + step * np.arange(n + 1)
        if hi - pts[-1] > 1e-9 * max(1.0, abs(hi)):
            pts = np.append(pts, hi)
        return pts

    def points(self):
        """Initial candidates, endpoints of the domain always included."""
        kind, a, b = self.domain
        if kind == "segment":
            p0, p1 = np.asarray(a, float), np.asarray(b, float)
            length = np.linalg.norm(p1 - p0)
            if length == 0:
                return p0[None, :]
            t = self._axis(0.0, length, self.resolution) / length
            return p0[None, :] + t[:, None] * (p1 - p0)[None, :]
        xs = self._axis(a[0], a[1], self.resolution)
        ys = self._axis(b[0], b[1], self.resolution)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, self.z)])

    def neighbours(self, point, step):
        """Points one ``step`` away from ``point`` along each domain axis,
        clipped to the domain."""
        kind, a, b = self.domain
        point = np.asarray(point, float)
        if kind == "segment":
            p0, p1 = np.asarray(a, float), np.asarray(b, float)
            length = np.linalg.norm(p1 - p0)
            if length == 0:
                return np.empty((0, 3))
            u = (p1 - p0) / length
            t = float((point - p0) @ u)
            ts = [s for s in (t - step, t + step) if -1e-12 <= s <= length + 1e-12]
            return np.array([p0 + np.clip(s, 0, length) * u for s in ts]).reshape(-1, 3)
        out = []
        for dx, dy in ((-step, 0), (step, 0), (0, -step), (0, step)):
            x, y = point[0] + dx, point[1] + dy
            if a[0] - 1e-12 <= x <= a[1] + 1e-12 and b[0] - 1e-12 <= y <= b[1] + 1e-12:
                out.append((x, y, self.z))
        return np.array(out).reshape(-1, 3)


def _better(score, point, best_score, best_point):
    """Strictly better objective, or an exact tie at smaller (x, y)."""
    if best_point is None or score > best_score:
        return True
    return score == best_score and (point[0], point[1]) < (best_point[0], best_point[1])


def grid_argmax(objective, grid, feasible=None):
    """Exhaustive search over ``grid`` with neighbour refinement.

    Returns ``(best_point, best_value, trace, level_values)`` where
    ``level_values[k]`` is the incumbent after refinement level ``k``.
    """
    pts = grid.points()
    if feasible is not None:
        pts = pts[[feasible(p) for p in pts]]
    if len(pts) == 0:
        raise ValueError("empty candidate grid")
    trace, seen = [], set()
    best_point, best_score = None, -np.inf

    def visit(p):
        nonlocal best_point, best_score
        key = tuple(np.round(p, 12))
        if key in seen:
            return
        seen.add(key)
        score = float(objective(p))
        trace.append((tuple(float(v) for v in p), score))
        if _better(score, p, best_score, best_point):
            best_point, best_score = np.asarray(p, float), score

    for p in pts:
        visit(p)
    levels = [best_score]
    step = grid.resolution
    for _ in range(grid.refinement_levels):
        step /= 2
        for p in grid.neighbours(best_point, step):
            if feasible is None or feasible(p):
                visit(p)
        levels.append(best_score)
    return best_point, best_score, trace, levels


# ---------------------------------------------------------------------------
# single IRS placement
# ---------------------------------------------------------------------------

@dataclass
class PlacementProblem:
    """Point-to-point link ``bs -> IRS -> user`` with a movable panel.

    ``panel`` is a template whose position is replaced by each candidate.
    """

    bs: Node
    user: Node
    panel: IrsPanel
    budget: TransmitBudget = field(default_factory=TransmitBudget)
    links: LinkModels = field(default_factory=LinkModels)
    include_direct: bool = False
    standoff: float = 1.0

    def default_grid(self, resolution=0.5, refinement_levels=0):
        """The BS-user segment shortened by ``standoff`` at both ends."""
        p0, p1 = self.bs.position.as_array(), self.user.position.as_array()
        d = np.linalg.norm(p1 - p0)
        if d <= 2 * self.standoff:
            raise ValueError("BS and user are too close for the standoff")
        u = (p1 - p0) / d
        return SearchGrid.segment(p0 + self.standoff * u, p1 - self.standoff * u,
                                  resolution, refinement_levels)

    def feasible(self, p):
        p = Position.of(p)
        tol = 1e-9
        return (p.distance_to(self.bs.position) >= self.standoff - tol
                and p.distance_to(self.user.position) >= self.standoff - tol)


def placement_snr(problem, position, panel=None):
    """SNR with the panel at ``position``, co-phased and amplified."""
    panel = (problem.panel if panel is None else panel).with_position(position)
    bs, user, links = problem.bs, problem.user, problem.links
    h1 = hop_channel(bs, panel, links, "bs", "irs").entries[:, 0]
    h2 = hop_channel(panel, user, links, "irs", "user").entries[0]
    h_d = hop_channel(bs, user, links, "bs", "user").entries[0, 0] if problem.include_direct else 0.0
    [configured] = configure_chain(problem.budget, h1, [], h2, [panel])
    return cascade_report(problem.budget, h1, [], h2, [configured], h_d).snr


def _with_kind(panel, kind, n_active=None):
    if kind is None:
        return panel
    return IrsPanel(panel.position, panel.geometry, kind, panel.amp_power_budget,
                    panel.constraint, panel.amp_noise_power, n_active=n_active)


class SingleIrsPlacement(BaseEstimator):
    """Grid search for the SNR-maximizing position of one IRS.

    Parameters
    ----------
    panel_kind : {'passive', 'active', 'hybrid'} or None
        Overrides the kind of the problem's panel template.
    n_active : int, optional
        Active element count when ``panel_kind='hybrid'``.
    resolution : float
        Initial grid step in meters.
    refinement_levels : int
        Number of step-halving neighbour probes around the incumbent.
    grid : SearchGrid, optional
        Explicit candidate domain; defaults to the standoff-clipped BS-user segment.
    """

    def __init__(self, panel_kind=None, n_active=None, resolution=0.5, refinement_levels=0,
                 grid=None):
        self.panel_kind = panel_kind
        self.n_active = n_active
        self.resolution = resolution
        self.refinement_levels = refinement_levels
        self.grid = grid

    def fit(self, problem, y=None):
        panel = _with_kind(problem.panel, self.panel_kind, self.n_active)
        grid = self.grid or problem.default_grid(self.resolution, self.refinement_levels)
        best, score, trace, levels = grid_argmax(
            lambda p: placement_snr(problem, p, panel), grid, problem.feasible)
        self.position_ = Position.of(best)
        self.objective_ = score
        self.trace_ = trace
        self.level_objectives_ = levels
        self.solution_ = DeploymentSolution([self.position_], [panel.n_elements], score, trace)
        return self


def place_single_irs(problem, panel_kind=None, grid=None, n_active=None):
    """SNR-optimal IRS position on ``grid`` (see :class:`SingleIrsPlacement`)."""
    return SingleIrsPlacement(panel_kind, n_active, grid=grid).fit(problem).solution_


@dataclass
class HybridPlacement:
    n_active_values: list
    solutions: list
    coincide: bool
    spread: float


def place_hybrid_irs(problem, n_active_values, grid=None):
    """Optimal position for every active/passive split of a hybrid panel.

    ``coincide`` tells whether all optima lie within one grid step of each other.
    """
    n = problem.panel.n_elements
    grid = grid or problem.default_grid()
    solutions = []
    for na in n_active_values:
        if not 0 <= na <= n:
            raise ValueError(f"n_active must be in [0, {n}], got {na}")
        kind = "passive" if na == 0 else "active" if na == n else "hybrid"
        solutions.append(place_single_irs(problem, kind, grid, n_active=na))
    pts = np.array([s.positions[0].as_array() for s in solutions])
    spread = float(np.max(np.linalg.norm(pts[:, None] - pts[None, :], axis=-1))) if len(pts) else 0.0
    return HybridPlacement(list(n_active_values), solutions,
                           bool(spread <= grid.resolution + 1e-9), spread)


# ---------------------------------------------------------------------------
# element allocation between two panels
# ---------------------------------------------------------------------------

@dataclass
class DoubleIrsProblem:
    """``bs -> panel1 -> panel2 -> user`` with panel templates whose element
    counts are set by the allocation."""

    bs: Node
    user: Node
    panel1: IrsPanel
    panel2: IrsPanel
    budget: TransmitBudget = field(default_factory=TransmitBudget)
    links: LinkModels = field(default_factory=LinkModels)


def _resized(panel, n, kind=None, position=None):
    geom = panel.geometry.with_count(n)
    kind = kind or panel.kind
    return IrsPanel(position if position is not None else panel.position, geom, kind,
                    panel.amp_power_budget, panel.constraint, panel.amp_noise_power,
                    n_active=n if kind == "hybrid" else None)


def double_snr(problem, n1, n2):
    """SNR of the double-reflection link with ``n1`` and ``n2`` elements."""
    p1, p2 = _resized(problem.panel1, n1), _resized(problem.panel2, n2)
    links = problem.links
    h1 = hop_channel(problem.bs, p1, links, "bs", "irs").entries[:, 0]
    d = hop_channel(p1, p2, links, "irs", "irs").entries
    h2 = hop_channel(p2, problem.user, links, "irs", "user").entries[0]
    panels = configure_chain(problem.budget, h1, [d], h2, [p1, p2])
    return cascade_report(problem.budget, h1, [d], h2, panels).snr


class ElementAllocation(BaseEstimator):
    """Brute-force split of ``total_n`` elements over two panels.

    Every split with ``n1, n2 >= 1`` is evaluated; exact ties go to the
    larger ``n2``.
    """

    def __init__(self, total_n=64, evaluator=None):
        self.total_n = total_n
        self.evaluator = evaluator

    def fit(self, problem, y=None):
        if int(self.total_n) != self.total_n or self.total_n < 2:
            raise ValueError(f"total_n must be an integer >= 2, got {self.total_n}")
        evaluate = self.evaluator or double_snr
        trace = []
        best = None
        for n1 in range(1, int(self.total_n)):
            n2 = int(self.total_n) - n1
            score = float(evaluate(problem, n1, n2))
            trace.append(((n1, n2), score))
            # n2 decreases along the loop, so only a strict gain moves the incumbent
            if best is None or score > best[1]:
                best = ((n1, n2), score)
        self.split_ = best[0]
        self.objective_ = best[1]
        self.trace_ = trace
        self.solution_ = DeploymentSolution(
            [problem.panel1.position, problem.panel2.position], list(best[0]), best[1], trace)
        return self


def allocate_elements(problem, total_n, evaluator=None):
    """Best ``(n1, n2)`` split by exhaustive search."""
    return ElementAllocation(total_n, evaluator).fit(problem).solution_


# ---------------------------------------------------------------------------
# multi-IRS MIMO allocation
# ---------------------------------------------------------------------------

def compositions(units, parts):
    """All ways to write ``units`` as an ordered sum of ``parts`` non-negative integers."""
    for bars in itertools.combinations(range(units + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars + (units + parts - 1,):
            out.append(b - prev - 1)
            prev = b
        yield tuple(out)


@dataclass
class MultiIrsProblem:
    """MIMO link assisted by panels at candidate ``sites`` (the first ``K`` are used)."""

    bs: Node
    user: Node
    sites: list
    panel_axis: tuple = (1.0, 0.0, 0.0)
    links: LinkModels = field(default_factory=LinkModels)
    include_direct: bool = False


def site_channels(problem, total_n, k_factor=math.inf, rng=None):
    """BS->site and site->user blocks for a full ``total_n``-element panel at
    every site. Smaller panels are the leading sub-arrays of these blocks."""
    out = []
    for site in problem.sites:
        panel = IrsPanel(site, ArrayGeometry(total_n, axis=problem.panel_axis))
        h1 = hop_channel(problem.bs, panel, problem.links, "bs", "irs", k_factor, rng).entries
        h2 = hop_channel(panel, problem.user, problem.links, "irs", "user", k_factor, rng).entries
        out.append((h1, h2))
    return out


class MultiIrsAllocation(BaseEstimator):
    """Water-filling capacity maximized over element splits among ``n_panels`` IRSs.

    Elements are allocated in blocks of ``total_n // units`` and a panel may
    receive zero blocks. With several channel realizations the objective is
    the mean capacity.
    """

    def __init__(self, total_n=256, n_panels=1, units=16):
        self.total_n = total_n
        self.n_panels = n_panels
        self.units = units

    def _blocks(self, problem, channels):
        if self.n_panels > len(problem.sites):
            raise ValueError("more panels than candidate sites")
        if self.total_n % self.units:
            raise ValueError("total_n must be divisible by units")
        size = self.total_n // self.units
        m, u = problem.bs.geometry.element_count, problem.user.geometry.element_count
        blocks = {(k, 0): np.zeros((u, m), complex) for k in range(self.n_panels)}
        for k in range(self.n_panels):
            h1, h2 = channels[k]
            for j in range(1, self.units + 1):
                n = j * size
                a, b = h1[:n], h2[:, :n]
                cfg = align_mimo_panel(a, b)
                blocks[k, j] = b @ (cfg.coefficients[:, None] * a)
        return blocks

    def fit(self, problem, budget=None, realizations=None):
        """``realizations`` is a list of :func:`site_channels` outputs (LoS by default)."""
        budget = budget or TransmitBudget()
        if realizations is None:
            realizations = [site_channels(problem, self.total_n)]
        all_blocks = [self._blocks(problem, ch) for ch in realizations]
        direct = None
        if problem.include_direct:
            direct = hop_channel(problem.bs, problem.user, problem.links, "bs", "user").entries
        size = self.total_n // self.units
        trace, best = [], None
        for split in compositions(self.units, self.n_panels):
            rates = []
            for blocks in all_blocks:
                h = sum(blocks[k, j] for k, j in enumerate(split))
                if direct is not None:
                    h = h + direct
                rates.append(mimo_capacity(budget, h).rate)
            rate = float(np.mean(rates))
            n_split = tuple(j * size for j in split)
            trace.append((n_split, rate))
            if best is None or rate > best[1]:
                best = (n_split, rate)
        self.split_, self.objective_, self.trace_ = best[0], best[1], trace
        self.solution_ = DeploymentSolution(
            [Position.of(s) for s in problem.sites[: self.n_panels]], list(best[0]), best[1], trace)
        return self


def multi_irs_capacity(problem, budget, total_n, n_panels, units=16, realizations=None):
    """Best capacity and split with ``n_panels`` IRSs sharing ``total_n`` elements."""
    return MultiIrsAllocation(total_n, n_panels, units).fit(problem, budget, realizations).solution_


# ---------------------------------------------------------------------------
# centralized vs distributed
# ---------------------------------------------------------------------------

@dataclass
class MultiUserProblem:
    """Multi-antenna BS serving ``users`` via one BS-side panel or per-user panels.

    Distributed panel ``k`` sits ``user_offset`` meters from user ``k`` on the
    segment towards the BS; the centralized panel sits ``bs_offset`` meters
    from the BS towards the mean user direction.
    """

    bs: Node
    users: list
    budget: TransmitBudget = field(default_factory=TransmitBudget)
    links: LinkModels = field(default_factory=LinkModels)
    bs_offset: float = 2.0
    user_offset: float = 2.0
    panel_axis: tuple = (0.0, 1.0, 0.0)
    include_direct: bool = False

    def central_panel(self, n):
        b = self.bs.position.as_array()
        d = np.mean([u.position.as_array() - b for u in self.users], axis=0)
        d = d / np.linalg.norm(d)
        return IrsPanel(tuple(b + self.bs_offset * d), ArrayGeometry(n, axis=self.panel_axis))

    def distributed_panels(self, n):
        k = len(self.users)
        if n % k:
            raise ValueError(f"N={n} is not divisible by the number of users {k}")
        b = self.bs.position.as_array()
        panels = []
        for u in self.users:
            p = u.position.as_array()
            d = (p - b) / np.linalg.norm(p - b)
            panels.append(IrsPanel(tuple(p - self.user_offset * d),
                                   ArrayGeometry(n // k, axis=self.panel_axis)))
        return panels


@dataclass
class ArchitectureComparison:
    n_values: list
    centralized: np.ndarray
    distributed: np.ndarray
    crossover: int = None

    def rows(self):
        return [(n, c, d) for n, c, d in zip(self.n_values, self.centralized, self.distributed)]


def crossover_point(n_values, first, second):
    """Smallest N where ``second >= first``, or ``None``."""
    for n, a, b in zip(n_values, first, second):
        if b >= a:
            return n
    return None


def compare_architectures(problem, n_values):
    """Sum-rate of TDMA with a centralized panel vs ZF with per-user panels."""
    cen, dist = [], []
    for n in n_values:
        cen.append(multiuser_centralized_rate(problem.budget, problem.bs, problem.users,
                                              problem.central_panel(n), problem.links,
                                              problem.include_direct).sum_rate)
        dist.append(multiuser_distributed_rate(problem.budget, problem.bs, problem.users,
                                               problem.distributed_panels(n), problem.links,
                                               problem.include_direct).sum_rate)
    cen, dist = np.array(cen), np.array(dist)
    return ArchitectureComparison(list(n_values), cen, dist,
                                  crossover_point(n_values, cen, dist))


# ---------------------------------------------------------------------------
# D-MIMO association
# ---------------------------------------------------------------------------

@dataclass
class Association:
    assignment: np.ndarray
    min_power: float
    powers: np.ndarray
    points: np.ndarray
    configs: list
    pass_min_powers: list


def dmimo_associate(bs_list, area, panel, budget=None, links=LinkModels(), passes=2):
    """Split an area among distributed BSs sharing one static IRS.

    Points are first grouped by IRS departure angle into ``B`` equal-count
    sectors (sector ``j`` goes to ``bs_list[j]``). Each pass designs one
    static max-min configuration per BS for its current sector, then moves
    every point to the BS that delivers the most power. The pass with the
    best worst-case power is returned.
    """
    if not bs_list:
        raise ValueError("need at least one BS")
    budget = budget or TransmitBudget()
    pts = _as_points(area)
    n_bs = len(bs_list)
    order = np.argsort(spatial_frequency(panel, pts, links), kind="stable")
    assignment = np.empty(len(pts), dtype=int)
    for j, grp in enumerate(np.array_split(order, n_bs)):
        assignment[grp] = j
    best, history = None, []
    for _ in range(passes):
        configs, powers = [], np.zeros((n_bs, len(pts)))
        for j, bs in enumerate(bs_list):
            mine = pts[assignment == j]
            if len(mine) == 0:
                configs.append(None)
                continue
            cfg = static_area_config(budget, bs, panel, mine, links)
            configs.append(cfg)
            powers[j] = received_powers(budget, bs, panel, cfg, pts, links)
        assignment = np.argmax(powers, axis=0)
        served = powers.max(axis=0)
        history.append(float(served.min()))
        if best is None or history[-1] > best.min_power:
            best = Association(assignment.copy(), history[-1], served, pts, configs, history)
    best.pass_min_powers = history
    return best


def area_power_slope(n_values, min_powers):
    """Least-squares slope of ``log(min_power)`` against ``log(N)``."""
    return float(np.polyfit(np.log(n_values), np.log(min_powers), 1)[0])


# ---------------------------------------------------------------------------
# hybrid double-IRS order
# ---------------------------------------------------------------------------

ORDERS = ("BAPU", "BPAU")


@dataclass
class HybridDoubleProblem:
    """One active and one passive panel between a BS and a user.

    Both panels sit on the line ``y = panel_y`` at x positions from
    ``x_candidates``; the active share of ``N`` runs over ``fractions / 16``.
    """

    bs: Node
    user: Node
    budget: TransmitBudget = field(default_factory=TransmitBudget)
    amp_power_budget: float = 1e-2
    constraint: str = "total"
    amp_noise_power: float = 1e-10
    panel_y: float = 2.0
    x_candidates: tuple = None
    fractions: tuple = tuple(range(1, 16))
    links: LinkModels = field(default_factory=LinkModels)

    def xs(self):
        if self.x_candidates is not None:
            return tuple(self.x_candidates)
        length = self.bs.position.distance_to(self.user.position)
        return tuple(np.linspace(1.0, length - 1.0, 6))


def hybrid_double_rate(problem, order, n_active, n_passive, x1, x2):
    """Rate of BAPU (active first) or BPAU (passive first) with panels at ``x1``, ``x2``."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    kinds = ("active", "passive") if order == "BAPU" else ("passive", "active")
    counts = (n_active, n_passive) if order == "BAPU" else (n_passive, n_active)
    panels = [IrsPanel((x, problem.panel_y, 0.0), ArrayGeometry(n), k, problem.amp_power_budget
                       if k == "active" else 0.0, problem.constraint, problem.amp_noise_power)
              for x, n, k in zip((x1, x2), counts, kinds)]
    links = problem.links
    h1 = hop_channel(problem.bs, panels[0], links, "bs", "irs").entries[:, 0]
    d = hop_channel(panels[0], panels[1], links, "irs", "irs").entries
    h2 = hop_channel(panels[1], problem.user, links, "irs", "user").entries[0]
    configured = configure_chain(problem.budget, h1, [d], h2, panels)
    return cascade_report(problem.budget, h1, [d], h2, configured).rate


def best_hybrid_double(problem, order, n):
    """Joint brute force over active share and panel positions for one order."""
    best = None
    trace = []
    xs = problem.xs()
    for f in problem.fractions:
        n_active = max(1, round(n * f / 16))
        n_passive = n - n_active
        if n_passive < 1:
            continue
        for x1 in xs:
            for x2 in xs:
                if x1 == x2:
                    continue
                r = hybrid_double_rate(problem, order, n_active, n_passive, x1, x2)
                cand = (n_active, n_passive, x1, x2)
                trace.append((cand, r))
                if best is None or r > best[1]:
                    best = (cand, r)
    if best is None:
        raise ValueError(f"no valid split for N={n}")
    (na, npas, x1, x2), r = best
    return DeploymentSolution([Position(x1, problem.panel_y), Position(x2, problem.panel_y)],
                              [na, npas], r, trace)


@dataclass
class OrderComparison:
    n_values: list
    rates: dict
    solutions: dict
    crossover: int = None


def order_hybrid_double(problem, orders=ORDERS, n_values=(16, 32, 64, 128, 256, 512)):
    """Best rate per transmission order and N, plus the N where BPAU overtakes BAPU."""
    rates, sols = {}, {}
    for order in orders:
        sols[order] = [best_hybrid_double(problem, order, n) for n in n_values]
        rates[order] = np.array([s.objective for s in sols[order]])
    cross = None
    if set(orders) == set(ORDERS):
        cross = crossover_point(n_values, rates["BAPU"], rates["BPAU"])
    return OrderComparison(list(n_values), rates, sols, cross)

