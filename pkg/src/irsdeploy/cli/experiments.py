"""Named experiments. Each runner turns a Scenario into ResultTables.

Sweeps are split into independent tasks that are mapped over a process
pool for ``jobs > 1``; results are always collected in sweep order and
every random stream is derived from the scenario seed and the stream's
own index, never from the worker that runs it.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..beam_routing import Box, GraphNode, Wall, best_path, build_graph, enumerate_paths, path_snr
from ..deploy_opt import (
    HybridDoubleProblem,
    MultiIrsProblem,
    MultiUserProblem,
    PlacementProblem,
    area_power_slope,
    best_hybrid_double,
    compare_architectures,
    crossover_point,
    dmimo_associate,
    multi_irs_capacity,
    place_hybrid_irs,
    placement_snr,
    site_channels,
)
from ..fieldtrial import (
    STAT_KEYS,
    TWO_USER_TRIAL,
    MeasurementLog,
    cdf,
    improvement_stats,
    quantile,
    read_log,
    synthetic_drive_log,
)
from ..irs_model import IrsPanel
from ..link_eval import Area, Node, TransmitBudget, received_powers, static_area_config
from ..propagation import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    LinkModels,
    PathLossModel,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
)
from .results import ResultTable
from .scenario import EXPERIMENTS, Scenario


class ExperimentError(ValueError):
    """The scenario does not fit the requested experiment."""


def ordered_map(fn, tasks, jobs=1):
    """``[fn(t) for t in tasks]``, optionally on ``jobs`` worker processes."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def task_rng(seed, *index):
    """Generator for the random stream at ``index`` of a seeded run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(index)))


# ---------------------------------------------------------------------------
# scenario -> model objects
# ---------------------------------------------------------------------------

def links_of(scn):
    pl = scn["path_loss"]
    beta0 = float(db_to_linear(pl["beta0_db"]))
    models = {k: PathLossModel(beta0, pl[k]) for k in ("bs_irs", "irs_user", "direct", "inter_irs")}
    return LinkModels(wavelength=SPEED_OF_LIGHT / scn["carrier_hz"], **models)


def budget_of(scn, experiment, p_t_dbm=None):
    p = scn.transmit_power_dbm(experiment) if p_t_dbm is None else p_t_dbm
    return TransmitBudget(float(dbm_to_watt(p)), float(dbm_to_watt(scn["noise_power_dbm"])))


def geometry_of(node, scn, count=None):
    wavelength = SPEED_OF_LIGHT / scn["carrier_hz"]
    n = count if count is not None else (node["elements"] if node["role"] == "irs" else node["antennas"])
    return ArrayGeometry(int(n), node["spacing_wavelengths"] * wavelength, tuple(node["axis"]))


def node_of(node, scn):
    return Node(node["id"], tuple(node["position"]), geometry_of(node, scn))


def panel_of(node, scn, kind=None, count=None, n_active=None):
    kind = kind or node["kind"]
    budget = 0.0 if node["amp_budget_dbm"] is None else float(dbm_to_watt(node["amp_budget_dbm"]))
    if kind == "hybrid" and n_active is None:
        n_active = node["n_active"]
    return IrsPanel(tuple(node["position"]), geometry_of(node, scn, count), kind, budget,
                    node["constraint"], float(dbm_to_watt(scn["amp_noise_power_dbm"])),
                    n_active=n_active)


def _one(scn, role, experiment):
    nodes = scn.nodes(role)
    if len(nodes) != 1:
        raise ExperimentError(f"{experiment} needs exactly one '{role}' node, found {len(nodes)}")
    return nodes[0]


def _require_los(scn, experiment):
    if not math.isinf(scn["fading"]["k_factor"]):
        raise ExperimentError(f"{experiment} evaluates line-of-sight channels only; "
                              "set fading.k_factor to .inf")


def _meta(scn, experiment, **extra):
    meta = {"experiment": experiment, "seed": scn.seed, "scenario_sha256": scn.digest(),
            "version": __version__}
    meta.update({k: v for k, v in extra.items()})
    return meta


def _db(x):
    return float(linear_to_db(x)) if x > 0 else -math.inf


# ---------------------------------------------------------------------------
# fig2: multi-IRS MIMO capacity
# ---------------------------------------------------------------------------

def _fig2_problem(scn):
    bs, ue = node_of(_one(scn, "bs", "fig2"), scn), node_of(_one(scn, "user", "fig2"), scn)
    sites = scn.nodes("irs")
    params = scn.params("fig2")
    if len(sites) < max(params["panel_counts"]):
        raise ExperimentError(f"fig2 needs at least {max(params['panel_counts'])} IRS site nodes")
    problem = MultiIrsProblem(bs, ue, [tuple(s["position"]) for s in sites],
                              tuple(sites[0]["axis"]), links_of(scn), scn["include_direct"])
    return problem, params


def _fig2_realizations(scn, problem, total_n):
    k = scn["fading"]["k_factor"]
    if math.isinf(k):
        return [site_channels(problem, total_n)]
    return [site_channels(problem, total_n, k, task_rng(scn.seed, r))
            for r in range(scn["fading"]["realizations"])]


def _fig2_task(args):
    data, p_t_dbm = args
    scn = Scenario(data)
    problem, params = _fig2_problem(scn)
    real = _fig2_realizations(scn, problem, params["total_elements"])
    budget = budget_of(scn, "fig2", p_t_dbm)
    return [multi_irs_capacity(problem, budget, params["total_elements"], k, params["units"], real)
            for k in params["panel_counts"]]


def run_fig2(scn, jobs=1):
    problem, params = _fig2_problem(scn)
    if params["total_elements"] % params["units"]:
        raise ExperimentError("fig2.total_elements must be divisible by fig2.units")
    counts = params["panel_counts"]
    sols = ordered_map(_fig2_task, [(scn.data, p) for p in params["p_t_dbm"]], jobs)
    cap = ResultTable("fig2_capacity", ["p_t_dbm"] + [f"capacity_k{k}" for k in counts],
                      metadata=_meta(scn, "fig2", total_elements=params["total_elements"]))
    kmax = max(counts)
    split = ResultTable("fig2_split", ["p_t_dbm", "k"] + [f"n_site{i + 1}" for i in range(kmax)],
                        metadata=_meta(scn, "fig2"))
    for p, row in zip(params["p_t_dbm"], sols):
        cap.rows.append(tuple([p] + [s.objective for s in row]))
        for k, s in zip(counts, row):
            split.rows.append(tuple([p, k] + list(s.element_split) + [0] * (kmax - k)))
    if len(counts) > 1:
        k1, kk = cap.column(f"capacity_k{min(counts)}"), cap.column(f"capacity_k{kmax}")
        gains = [(b - a) / a if a > 0 else 0.0 for a, b in zip(k1, kk)]
        cap.metadata["max_relative_gain"] = format(max(gains), ".6g")
    return [cap, split]


# ---------------------------------------------------------------------------
# fig3: centralized vs distributed
# ---------------------------------------------------------------------------

def _fig3_problem(scn):
    _require_los(scn, "fig3")
    params = scn.params("fig3")
    users = [node_of(u, scn) for u in scn.nodes("user")]
    if not users:
        raise ExperimentError("fig3 needs at least one 'user' node")
    bs = node_of(_one(scn, "bs", "fig3"), scn)
    if bs.geometry.element_count < len(users):
        raise ExperimentError("fig3 needs at least as many BS antennas as users")
    return MultiUserProblem(bs, users, budget_of(scn, "fig3"), links_of(scn), params["bs_offset"],
                            params["user_offset"], tuple(params["panel_axis"]),
                            scn["include_direct"]), params


def _fig3_task(args):
    data, n = args
    problem, _ = _fig3_problem(Scenario(data))
    c = compare_architectures(problem, [n])
    return float(c.centralized[0]), float(c.distributed[0])


def run_fig3(scn, jobs=1):
    problem, params = _fig3_problem(scn)
    k = len(problem.users)
    bad = [n for n in params["n_values"] if n % k]
    if bad:
        raise ExperimentError(f"fig3.n_values {bad} are not divisible by the {k} users")
    res = ordered_map(_fig3_task, [(scn.data, n) for n in params["n_values"]], jobs)
    cen, dist = [r[0] for r in res], [r[1] for r in res]
    cross = crossover_point(params["n_values"], cen, dist)
    t = ResultTable("fig3_sum_rate", ["n", "centralized", "distributed"],
                    [(n, c, d) for n, c, d in zip(params["n_values"], cen, dist)],
                    _meta(scn, "fig3", crossover_n="none" if cross is None else cross))
    return [t]


# ---------------------------------------------------------------------------
# fig4: BAPU vs BPAU
# ---------------------------------------------------------------------------

def _fig4_problem(scn):
    _require_los(scn, "fig4")
    params = scn.params("fig4")
    bs, ue = node_of(_one(scn, "bs", "fig4"), scn), node_of(_one(scn, "user", "fig4"), scn)
    xs = None if params["x_candidates"] is None else tuple(params["x_candidates"])
    return HybridDoubleProblem(
        bs, ue, budget_of(scn, "fig4"), float(dbm_to_watt(params["amp_budget_dbm"])),
        params["constraint"], float(dbm_to_watt(scn["amp_noise_power_dbm"])),
        params["panel_y"], xs, tuple(params["fractions"]), links_of(scn)), params


def _fig4_task(args):
    data, order, n = args
    problem, _ = _fig4_problem(Scenario(data))
    return best_hybrid_double(problem, order, n)


def run_fig4(scn, jobs=1):
    _, params = _fig4_problem(scn)
    ns = params["n_values"]
    tasks = [(scn.data, order, n) for order in ("BAPU", "BPAU") for n in ns]
    sols = ordered_map(_fig4_task, tasks, jobs)
    bapu, bpau = sols[: len(ns)], sols[len(ns):]
    cross = crossover_point(ns, [s.objective for s in bapu], [s.objective for s in bpau])
    rate = ResultTable("fig4_rate", ["n", "bapu", "bpau"],
                       [(n, a.objective, b.objective) for n, a, b in zip(ns, bapu, bpau)],
                       _meta(scn, "fig4", crossover_n="none" if cross is None else cross))
    cols = ["n"]
    for o in ("bapu", "bpau"):
        cols += [f"{o}_n_active", f"{o}_n_passive", f"{o}_x1", f"{o}_x2"]
    best = ResultTable("fig4_design", cols, metadata=_meta(scn, "fig4"))
    for n, a, b in zip(ns, bapu, bpau):
        row = [n]
        for s in (a, b):
            row += [s.element_split[0], s.element_split[1], s.positions[0].x, s.positions[1].x]
        best.rows.append(tuple(row))
    return [rate, best]


# ---------------------------------------------------------------------------
# placement
# ---------------------------------------------------------------------------

def _placement_problem(scn):
    _require_los(scn, "placement")
    params = scn.params("placement")
    bs, ue = node_of(_one(scn, "bs", "placement"), scn), node_of(_one(scn, "user", "placement"), scn)
    irs = _one(scn, "irs", "placement")
    if irs["amp_budget_dbm"] is None:
        raise ExperimentError("placement compares passive and active panels; "
                              "give the IRS node an amp_budget_dbm")
    problem = PlacementProblem(bs, ue, panel_of(irs, scn, kind="active"), budget_of(scn, "placement"),
                               links_of(scn), scn["include_direct"], params["standoff"])
    return problem, params


def _heatmap_task(args):
    data, x = args
    scn = Scenario(data)
    problem, params = _placement_problem(scn)
    hm = params["heatmap"]
    ys = np.arange(hm["y_range"][0], hm["y_range"][1] + 1e-9, hm["resolution"])
    passive = IrsPanel(problem.panel.position, problem.panel.geometry, "passive")
    rows = []
    for y in ys:
        p = (float(x), float(y), 0.0)
        if not problem.feasible(p):
            continue
        rows.append((float(x), float(y), _db(placement_snr(problem, p, passive)),
                     _db(placement_snr(problem, p))))
    return rows


def run_placement(scn, jobs=1):
    problem, params = _placement_problem(scn)
    n = problem.panel.n_elements
    splits = params["n_active_values"] or sorted({0, n // 4, n // 2, 3 * n // 4, n})
    grid = problem.default_grid(params["resolution"], params["refinement_levels"])
    hyb = place_hybrid_irs(problem, splits, grid)
    seg = ResultTable("placement_optimum", ["n_active", "x", "y", "z", "snr", "snr_db"],
                      metadata=_meta(scn, "placement", optima_coincide=int(hyb.coincide),
                                     segment=f"{grid.domain[1]}->{grid.domain[2]}"))
    for na, s in zip(splits, hyb.solutions):
        p = s.positions[0]
        seg.rows.append((na, p.x, p.y, p.z, s.objective, _db(s.objective)))
    hm = params["heatmap"]
    x_range = hm["x_range"] or [problem.bs.position.x, problem.user.position.x]
    xs = np.arange(x_range[0], x_range[1] + 1e-9, hm["resolution"])
    rows = ordered_map(_heatmap_task, [(scn.data, float(x)) for x in xs], jobs)
    heat = ResultTable("placement_heatmap", ["x", "y", "snr_passive_db", "snr_active_db"],
                       [r for chunk in rows for r in chunk], _meta(scn, "placement"))
    return [seg, heat]


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------

def _coverage_setup(scn):
    _require_los(scn, "coverage")
    params = scn.params("coverage")
    bs = node_of(_one(scn, "bs", "coverage"), scn)
    a = params["area"]
    area = Area(tuple(a["x_range"]), tuple(a["y_range"]), 0.0, a["nx"], a["ny"])
    return bs, area, params


def dmimo_bs_nodes(bs, irs_position, count, radius, half_angle):
    """``count`` single-antenna BSs on an arc of ``radius`` around the IRS,
    centred on the direction of the primary BS."""
    c = np.asarray(irs_position, float)
    u = bs.position.as_array() - c
    base = math.atan2(u[1], u[0])
    angles = np.linspace(-half_angle, half_angle, count) if count > 1 else [0.0]
    return [Node(f"{bs.id}_{j}", (c[0] + radius * math.cos(base + t), c[1] + radius * math.sin(base + t),
                                   bs.position.z), bs.geometry)
            for j, t in enumerate(angles)]


def _coverage_task(args):
    data, n = args
    scn = Scenario(data)
    bs, area, params = _coverage_setup(scn)
    budget, links = budget_of(scn, "coverage"), links_of(scn)
    pts = area.points()
    geom = ArrayGeometry(n, links.wavelength / 2, tuple(params["panel_axis"]))
    side = []
    for pos in (params["bs_side"], params["user_side"]):
        panel = IrsPanel(tuple(pos), geom)
        cfg = static_area_config(budget, bs, panel, pts, links)
        side.append(float(received_powers(budget, bs, panel, cfg, pts, links).min()))
    panel = IrsPanel(tuple(params["bs_side"]), geom)
    dm = []
    for b in params["bs_counts"]:
        nodes = dmimo_bs_nodes(bs, params["bs_side"], b, params["dmimo_radius"],
                               params["dmimo_half_angle"])
        dm.append(dmimo_associate(nodes, pts, panel, budget, links).min_power)
    return side, dm


def run_coverage(scn, jobs=1):
    bs, area, params = _coverage_setup(scn)
    ns = params["n_values"]
    res = ordered_map(_coverage_task, [(scn.data, n) for n in ns], jobs)
    side_rows = [(n, s[0], s[1]) for n, (s, _) in zip(ns, res)]
    dm_rows = [tuple([n] + list(d)) for n, (_, d) in zip(ns, res)]
    slopes = {}
    if len(ns) > 1:
        slopes["slope_bs_side"] = format(area_power_slope(ns, [r[1] for r in side_rows]), ".6g")
        slopes["slope_user_side"] = format(area_power_slope(ns, [r[2] for r in side_rows]), ".6g")
    side = ResultTable("coverage_side", ["n", "bs_side_min_power", "user_side_min_power"],
                       side_rows, _meta(scn, "coverage", **slopes))
    dm_slopes = {}
    if len(ns) > 1:
        for j, b in enumerate(params["bs_counts"]):
            dm_slopes[f"slope_b{b}"] = format(area_power_slope(ns, [r[j + 1] for r in dm_rows]), ".6g")
    dm = ResultTable("coverage_dmimo", ["n"] + [f"min_power_b{b}" for b in params["bs_counts"]],
                     dm_rows, _meta(scn, "coverage", **dm_slopes))
    return [side, dm]


# ---------------------------------------------------------------------------
# routing
# ---------------------------------------------------------------------------

def routing_graph(scn):
    links = links_of(scn)
    nodes = []
    for n in scn.nodes():
        if n["role"] == "irs":
            nodes.append(GraphNode(n["id"], "irs", tuple(n["position"]), panel_of(n, scn)))
        else:
            nodes.append(GraphNode(n["id"], n["role"], tuple(n["position"]),
                                   geometry=geometry_of(n, scn)))
    obstacles = [Box(*o["box"]) if "box" in o else Wall(*map(tuple, o["wall"]))
                 for o in scn["obstacles"]]
    return build_graph(nodes, obstacles, links)


def run_routing(scn, jobs=1):
    _require_los(scn, "routing")
    params = scn.params("routing")
    bs = _one(scn, "bs", "routing")["id"]
    users = [u["id"] for u in scn.nodes("user")]
    if not users:
        raise ExperimentError("routing needs at least one 'user' node")
    graph = routing_graph(scn)
    budget = budget_of(scn, "routing")
    active = {n.id for n in graph.nodes.values() if n.role == "irs" and not n.panel.is_passive}
    best = ResultTable("routing_best", ["user", "path", "hops", "snr", "snr_db", "rate",
                                        "uses_active_irs"], metadata=_meta(scn, "routing"))
    hops = ResultTable("routing_hops", ["user", "hop", "tx", "rx", "distance", "path_loss_db",
                                        "rx_array_gain_db"], metadata=_meta(scn, "routing"))
    cands = ResultTable("routing_candidates", ["user", "path", "hops", "snr_db"],
                        metadata=_meta(scn, "routing"))
    for user in users:
        r = best_path(graph, budget, params["max_hops"], bs, user, fast=params["fast"])
        if not r.connected:
            best.rows.append((user, "disconnected", -1, 0.0, -math.inf, 0.0, 0))
            continue
        best.rows.append((user, ">".join(r.nodes), r.hops, r.snr, _db(r.snr), r.report.rate,
                          int(bool(active & set(r.nodes)))))
        for i, (a, b) in enumerate(zip(r.nodes, r.nodes[1:])):
            d = graph.nodes[a].position.distance_to(graph.nodes[b].position)
            gain = r.array_gains[i] if i < len(r.array_gains) else 1.0
            hops.rows.append((user, i, a, b, d, _db(r.path_losses[i]), _db(gain)))
        for p in enumerate_paths(graph, bs, user, params["max_hops"]):
            cands.rows.append((user, ">".join(p), len(p) - 2, _db(path_snr(graph, p, budget).snr)))
    return [best, hops, cands]


# ---------------------------------------------------------------------------
# field trial
# ---------------------------------------------------------------------------

def run_fieldtrial(scn, jobs=1):
    params = scn.params("fieldtrial")
    if params["log"] is not None:
        path = params["log"]
        if not os.path.isabs(path) and scn.source and os.path.exists(scn.source):
            path = os.path.join(os.path.dirname(os.path.abspath(scn.source)), path)
        log, origin = read_log(path), os.path.basename(path)
    else:
        log = synthetic_drive_log(params["samples_per_location"], task_rng(scn.seed, 0),
                                  params["median_off_dbm"])
        origin = "synthetic"
    meta = _meta(scn, "fieldtrial", log=origin)
    dist = ResultTable("fieldtrial_cdf", ["location", "state", "rsrp_dbm", "fraction"], metadata=meta)
    cov = ResultTable("fieldtrial_coverage", ["location", "state", "samples", "median_rsrp_dbm",
                                              "fraction_below_threshold"],
                      metadata=dict(meta, threshold_dbm=params["threshold_dbm"]))
    for loc in log.groups() + ["all"]:
        sub = log if loc == "all" else log.subset(loc)
        for state in ("off", "on"):
            v = getattr(sub, f"rsrp_{state}")
            v = v[~np.isnan(v)]
            if v.size == 0:
                continue
            c = cdf(v)
            if loc != "all":
                dist.rows.extend((loc, state, x, f) for x, f in c)
            cov.rows.append((loc, state, v.size, quantile(c, 0.5), c.below(params["threshold_dbm"])))
    stats = ResultTable("fieldtrial_stats", ["log", "group"] + list(STAT_KEYS), metadata=meta)
    logs = [(origin, log)]
    if params["include_two_user_trial"]:
        logs.append(("two_user", MeasurementLog.from_records(TWO_USER_TRIAL)))
    for name, lg in logs:
        for group, s in improvement_stats(lg).items():
            stats.rows.append(tuple([name, group] + [s[k] for k in STAT_KEYS]))
    return [stats, cov, dist]


RUNNERS = {
    "fig2": run_fig2, "fig3": run_fig3, "fig4": run_fig4, "placement": run_placement,
    "coverage": run_coverage, "routing": run_routing, "fieldtrial": run_fieldtrial,
}


def run_experiment(name, scenario, jobs=1):
    """Run experiment ``name`` on ``scenario`` and return its tables."""
    if name not in RUNNERS:
        raise ExperimentError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    declared = scenario["experiment"]
    if declared is not None and declared != name:
        raise ExperimentError(f"scenario is written for '{declared}', not '{name}'")
    if jobs < 1:
        raise ExperimentError("jobs must be >= 1")
    return RUNNERS[name](scenario, jobs)
