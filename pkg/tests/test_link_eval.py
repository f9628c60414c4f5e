import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsdeploy.irs_model import IrsPanel, ReflectionConfig, amplify, co_phase_align
from irsdeploy.link_eval import (
    Area,
    LinkModels,
    Node,
    TransmitBudget,
    amplify_chain,
    area_min_power,
    assemble_multi_irs_channel,
    cascade_report,
    configure_chain,
    distributed_effective_channels,
    dominant_row,
    double_reflection,
    hop_channel,
    mimo_capacity,
    multiuser_centralized_rate,
    multiuser_distributed_rate,
    point_config,
    received_powers,
    siso_single_reflection,
    static_area_config,
    water_filling,
    zero_forcing,
)
from irsdeploy.propagation import ArrayGeometry, path_loss, PathLossModel

from oracles import brute_water_filling_grid, monte_carlo_snr

BUDGET = TransmitBudget(1e-2, 1e-12)


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def active(n, budget=1e-4, constraint="total", noise=1e-10):
    return IrsPanel((0, 0, 0), ArrayGeometry(n), "active", budget, constraint, noise)


def passive(n):
    return IrsPanel((0, 0, 0), ArrayGeometry(n))


def test_unit_siso_and_double():
    b = TransmitBudget(1.0, 1.0)
    assert siso_single_reflection(b, [1.0], [1.0], passive(1)).snr == pytest.approx(1.0)
    r = double_reflection(TransmitBudget(3.0, 1.0), [1.0], [[1.0]], [1.0], passive(1), passive(1))
    assert r.snr == pytest.approx(3.0)


def test_path_loss_reference_values():
    assert path_loss(1.0, PathLossModel(1e-3, 2.0)) == pytest.approx(1e-3)
    assert path_loss(10.0, PathLossModel(1e-3, 2.0)) == pytest.approx(1e-5)
    assert path_loss(100.0, PathLossModel(1e-3, 2.2)) == pytest.approx(3.9811e-8, abs=1e-12)


def _los_link(n, bs=(0, 0), irs=(5, 3), user=(40, 0)):
    links = LinkModels()
    panel = IrsPanel(irs, ArrayGeometry(n))
    h1 = hop_channel(Node("b", bs), panel, links, "bs", "irs").entries[:, 0]
    h2 = hop_channel(panel, Node("u", user), links, "irs", "user").entries[0]
    return h1, h2, panel


@pytest.mark.parametrize("n", [8, 32, 128])
def test_cophased_snr_quadruples_when_n_doubles(n):
    snrs = []
    for m in (n, 2 * n):
        h1, h2, panel = _los_link(m)
        snrs.append(siso_single_reflection(BUDGET, h1, h2, panel, co_phase_align(h1, h2)).snr)
    assert snrs[1] / snrs[0] == pytest.approx(4.0, rel=1e-9)


def test_equal_split_best_for_double_passive():
    links = LinkModels()
    bs, user = Node("b", (0, 0)), Node("u", (40, 0))
    snrs = {}
    for n1 in range(1, 16):
        p1 = IrsPanel((2, 2), ArrayGeometry(n1))
        p2 = IrsPanel((38, 2), ArrayGeometry(16 - n1))
        h1 = hop_channel(bs, p1, links, "bs", "irs").entries[:, 0]
        d = hop_channel(p1, p2, links, "irs", "irs").entries
        h2 = hop_channel(p2, user, links, "irs", "user").entries[0]
        panels = configure_chain(BUDGET, h1, [d], h2, [p1, p2])
        snrs[n1] = cascade_report(BUDGET, h1, [d], h2, panels).snr
    assert max(snrs, key=snrs.get) == 8
    # N1^2 N2^2 law on a rank-one inter-panel hop
    assert snrs[4] / snrs[8] == pytest.approx((4 * 12) ** 2 / 64 ** 2, rel=1e-9)


def test_cascade_noise_terms_named():
    rng = np.random.default_rng(1)
    panels = [active(3), passive(2)]
    h1, d, h2 = rand_c(rng, 3) * 1e-3, rand_c(rng, 2, 3) * 1e-3, rand_c(rng, 2) * 1e-3
    panels = configure_chain(BUDGET, h1, [d], h2, panels)
    rep = cascade_report(BUDGET, h1, [d], h2, panels)
    assert set(rep.noise_terms) == {"receiver", "irs1_amplification"}
    assert rep.rate == pytest.approx(np.log2(1 + rep.snr))


def test_power_violation_rejected():
    rng = np.random.default_rng(2)
    h1, h2 = rand_c(rng, 4) * 1e-3, rand_c(rng, 4) * 1e-3
    p = active(4).with_amplitudes(np.full(4, 1e6))
    with pytest.raises(ValueError):
        siso_single_reflection(BUDGET, h1, h2, p)
    with pytest.raises(ValueError):
        siso_single_reflection(BUDGET, h1, h2[:3], passive(4))


def _random_chain(rng, hops, kinds):
    sizes = rng.integers(2, 5, hops)
    panels = []
    for n, kind in zip(sizes, kinds):
        cfg = ReflectionConfig(rng.uniform(0, 2 * np.pi, n))
        if kind == "active":
            panels.append(active(int(n), 10 ** rng.uniform(-6, -3), rng.choice(["total", "per_element"]),
                                 10 ** rng.uniform(-11, -9)).with_config(cfg))
        else:
            panels.append(passive(int(n)).with_config(cfg))
    h_first = rand_c(rng, sizes[0]) * 10 ** rng.uniform(-4, -2)
    inter = [rand_c(rng, sizes[i + 1], sizes[i]) * 10 ** rng.uniform(-3, -1) for i in range(hops - 1)]
    h_last = rand_c(rng, sizes[-1]) * 10 ** rng.uniform(-4, -2)
    budget = TransmitBudget(10 ** rng.uniform(-3, 0), 10 ** rng.uniform(-13, -11))
    panels = amplify_chain(budget, h_first, inter, h_last, panels)
    return budget, h_first, inter, h_last, panels


@pytest.mark.parametrize("kinds", [("passive",), ("active",), ("active", "active"),
                                   ("passive", "active", "passive")])
def test_closed_form_matches_monte_carlo(kinds):
    rng = np.random.default_rng(len(kinds) * 7 + kinds.count("active"))
    budget, h_first, inter, h_last, panels = _random_chain(rng, len(kinds), kinds)
    closed = cascade_report(budget, h_first, inter, h_last, panels).snr
    empirical = monte_carlo_snr(budget.p_t, budget.noise_power, h_first, inter, h_last, panels,
                                draws=400_000, seed=5)
    assert empirical == pytest.approx(closed, rel=0.01)


def test_double_with_single_links_matches_monte_carlo():
    rng = np.random.default_rng(9)
    budget = TransmitBudget(1e-2, 1e-12)
    h1, h2 = rand_c(rng, 3) * 1e-3, rand_c(rng, 2) * 1e-3
    d = rand_c(rng, 2, 3) * 1e-2
    g2, g1 = rand_c(rng, 2) * 1e-4, rand_c(rng, 3) * 1e-4
    p1 = active(3, 1e-4).with_config(ReflectionConfig(rng.uniform(0, 6, 3)))
    p1 = amplify(p1, budget.p_t * np.abs(h1) ** 2)
    p2 = passive(2).with_config(ReflectionConfig(rng.uniform(0, 6, 2)))
    rep = double_reflection(budget, h1, d, h2, p1, p2, include_single_links=True,
                            g_bs_irs2=g2, g_irs1_user=g1)
    # explicit signal equation with both single-reflection branches
    r = np.random.default_rng(0)
    t = 400_000
    s = np.sqrt(budget.p_t) * np.exp(2j * np.pi * r.random(t))
    v1 = np.sqrt(p1.amp_noise_power / 2) * (r.standard_normal((3, t)) + 1j * r.standard_normal((3, t)))
    z = np.sqrt(budget.noise_power / 2) * (r.standard_normal(t) + 1j * r.standard_normal(t))
    c1 = p1.amplitudes * np.exp(1j * p1.phases)
    c2 = p2.amplitudes * np.exp(1j * p2.phases)
    out1 = c1[:, None] * (h1[:, None] * s + v1)
    y = h2 @ (c2[:, None] * (d @ out1 + g2[:, None] * s)) + g1 @ out1 + z
    gain = np.vdot(s, y) / np.vdot(s, s).real
    noise = np.mean(np.abs(y - gain * s) ** 2)
    assert abs(gain) ** 2 * budget.p_t / noise == pytest.approx(rep.snr, rel=0.01)


def test_configure_chain_meets_budgets_exactly():
    rng = np.random.default_rng(4)
    h1, d, h2 = rand_c(rng, 4) * 1e-3, rand_c(rng, 4, 4) * 1e-2, rand_c(rng, 4) * 1e-3
    panels = configure_chain(BUDGET, h1, [d], h2, [active(4, 1e-4), active(4, 1e-4)])
    # second panel sees the first panel's amplified noise too
    x2 = d @ (panels[0].config.coefficients * np.sqrt(BUDGET.p_t) * h1)
    m = d * panels[0].config.coefficients[None, :]
    load2 = np.abs(x2) ** 2 + 1e-10 * np.sum(np.abs(m) ** 2, axis=1) + 1e-10
    assert np.sum(panels[1].amplitudes ** 2 * load2) == pytest.approx(1e-4, rel=1e-9)


# -------------------------------------------------------------------- MIMO

def _kkt_residual(gains, p_t, powers, mu):
    res = abs(powers.sum() - p_t) / p_t
    on = powers > 0
    res = max(res, float(np.max(np.abs(powers[on] + 1 / gains[on] - mu), initial=0.0)) / mu)
    off = ~on & (gains > 0)
    if off.any():
        res = max(res, float(np.max(np.maximum(mu - 1 / gains[off], 0))) / mu)
    return res


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=8), st.floats(1e-3, 10.0))
def test_water_filling_kkt(gains, p_t):
    gains = np.array(gains)
    powers, mu = water_filling(gains, p_t)
    assert np.all(powers >= 0)
    assert _kkt_residual(gains, p_t, powers, mu) <= 1e-9


def test_water_filling_worked_example_against_grid():
    # singular values {1, 0.1}, p_t = 1, noise 0.01
    res = mimo_capacity(TransmitBudget(1.0, 0.01), np.diag([1.0, 0.1]))
    grid = brute_water_filling_grid([100.0, 1.0], 1.0, 1e-5)
    assert res.rate == pytest.approx(grid, abs=1e-4)
    # KKT: mu = (1 + 0.01 + 1) / 2
    np.testing.assert_allclose(res.powers, [1.005 - 0.01, 1.005 - 1.0], atol=1e-12)


def test_mimo_capacity_edge_cases():
    z = mimo_capacity(BUDGET, np.zeros((2, 2)))
    assert z.rate == 0.0 and np.all(z.powers == 0)
    one = mimo_capacity(TransmitBudget(2.0, 0.5), np.array([[3.0]]))
    assert one.rate == pytest.approx(np.log2(1 + 2.0 * 9 / 0.5))
    eq = mimo_capacity(TransmitBudget(100.0, 1.0), np.eye(3))
    np.testing.assert_allclose(eq.powers, 100 / 3)


def _mimo_nodes():
    ula = ArrayGeometry(4, axis=(0, 1, 0))
    return Node("bs", (0, 0), ula), Node("ue", (100, 0), ula)


def test_multi_irs_rank():
    bs, ue = _mimo_nodes()
    s = [0.25, -0.25, 0.75, -0.75]
    panels = [IrsPanel((50, 50 * v / np.sqrt(1 - v * v)), ArrayGeometry(64, axis=(0, 1, 0))) for v in s]
    h1 = assemble_multi_irs_channel(bs, ue, panels[:1]).entries
    h4 = assemble_multi_irs_channel(bs, ue, panels).entries
    sv1, sv4 = np.linalg.svd(h1, compute_uv=False), np.linalg.svd(h4, compute_uv=False)
    assert np.sum(sv1 > 1e-6 * sv1[0]) == 1
    assert np.sum(sv4 > 1e-3 * sv4[0]) == 4
    same = assemble_multi_irs_channel(bs, ue, [panels[0], panels[0]]).entries
    sv = np.linalg.svd(same, compute_uv=False)
    assert sv[1] <= 1e-9 * sv[0]


def test_centralized_single_user_reduces_to_siso():
    bs, user = Node("bs", (0, 0)), Node("u", (60, 10))
    panel = IrsPanel((2, 0), ArrayGeometry(32, axis=(0, 1, 0)))
    res = multiuser_centralized_rate(BUDGET, bs, [user], panel)
    links = LinkModels()
    h1 = hop_channel(bs, panel, links, "bs", "irs").entries[:, 0]
    h2 = hop_channel(panel, user, links, "irs", "user").entries[0]
    ref = siso_single_reflection(BUDGET, h1, h2, panel, co_phase_align(h1, h2)).snr
    assert res.snrs[0] == pytest.approx(ref, rel=1e-9)
    assert res.sum_rate == pytest.approx(np.log2(1 + ref))


def test_centralized_symmetric_users_equal_rates():
    bs = Node("bs", (0, 0), ArrayGeometry(4, axis=(0, 1, 0)))
    users = [Node("a", (80, 20)), Node("b", (80, -20))]
    panel = IrsPanel((2, 0), ArrayGeometry(32, axis=(0, 1, 0)))
    r = multiuser_centralized_rate(BUDGET, bs, users, panel)
    assert r.rates[0] == pytest.approx(r.rates[1], rel=1e-9)


def test_zero_forcing_against_pseudo_inverse():
    rng = np.random.default_rng(3)
    h = rand_c(rng, 2, 4)
    h[1] = 0.7 * h[0] + 0.3 * h[1]
    snrs, w = zero_forcing(BUDGET, h)
    hw = h @ w
    assert abs(hw[0, 1]) < 1e-9 * abs(hw[0, 0]) and abs(hw[1, 0]) < 1e-9 * abs(hw[1, 1])
    pinv = np.linalg.pinv(h)
    expected = BUDGET.p_t / 2 / BUDGET.noise_power / np.sum(np.abs(pinv) ** 2, axis=0)
    np.testing.assert_allclose(snrs, expected, rtol=1e-9)
    with pytest.raises(ValueError):
        zero_forcing(BUDGET, rand_c(rng, 3, 2))


def test_zero_forcing_orthogonal_channels():
    h = np.array([[1.0, 0, 0], [0, 2.0, 0]], complex)
    snrs, _ = zero_forcing(TransmitBudget(2.0, 1.0), h)
    np.testing.assert_allclose(snrs, [1.0, 4.0])


def test_distributed_needs_enough_antennas():
    bs = Node("bs", (0, 0))
    users = [Node("a", (50, 10)), Node("b", (50, -10))]
    panels = [IrsPanel((48, 10), ArrayGeometry(8)), IrsPanel((48, -10), ArrayGeometry(8))]
    with pytest.raises(ValueError):
        multiuser_distributed_rate(BUDGET, bs, users, panels)
    bs4 = Node("bs", (0, 0), ArrayGeometry(4, axis=(0, 1, 0)))
    h = distributed_effective_channels(bs4, users, panels)
    assert h.shape == (2, 4)


# ------------------------------------------------------------- point-to-area

def _area_setup(n):
    bs = Node("bs", (0, 0))
    panel = IrsPanel((2, 0), ArrayGeometry(n, axis=(0, 1, 0)))
    return bs, panel


def test_single_point_area_gain_n_squared():
    bs = Node("bs", (0, 0))
    target = (60, 5, 0)
    out = []
    for n in (16, 32):
        panel = IrsPanel((2, 0), ArrayGeometry(n, axis=(0, 1, 0)))
        cfg = point_config(bs, panel, target)
        out.append(area_min_power(BUDGET, bs, panel, cfg, [target]).min_power)
    assert out[1] / out[0] == pytest.approx(4.0, rel=1e-9)


def test_two_point_area_is_min_of_points():
    bs, panel = _area_setup(32)
    cfg = point_config(bs, panel, (60, 0, 0))
    pts = [(55, 1, 0), (65, -1, 0)]
    cov = area_min_power(BUDGET, bs, panel, cfg, pts)
    single = [area_min_power(BUDGET, bs, panel, cfg, [p]).min_power for p in pts]
    assert cov.min_power == pytest.approx(min(single), rel=1e-12)
    assert tuple(cov.argmin) == pts[int(np.argmin(single))]


def test_static_config_is_maxmin_over_its_candidates():
    bs, panel = _area_setup(64)
    area = Area((50, 70), (-1, 1), nx=11, ny=5)
    best = static_area_config(BUDGET, bs, panel, area.points())
    centre = point_config(bs, panel, area.center)
    p_best = received_powers(BUDGET, bs, panel, best, area.points()).min()
    p_centre = received_powers(BUDGET, bs, panel, centre, area.points()).min()
    assert p_best >= p_centre


def test_bs_mrt_direction_unit_norm():
    rng = np.random.default_rng(0)
    h = rand_c(rng, 5, 3)
    v = dominant_row(h, iters=50)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    u, s, vh = np.linalg.svd(h)
    assert abs(np.vdot(vh[0], v)) == pytest.approx(1.0, rel=1e-6)
