"""End-to-end SNR and rate evaluation for IRS-aided links.

Every evaluator works from the explicit signal equation. A panel applies
``Phi = diag(a_n exp(j phi_n))`` to whatever arrives at it; an active
element additionally injects circular Gaussian noise of power
``sigma_v^2`` before amplification, i.e. the panel output is
``Phi (incident + v)``. Channels are ordered ``(rx, tx)`` so a hop from
panel ``i`` to panel ``i + 1`` is an ``N_{i+1} x N_i`` matrix, the first hop
is the vector seen by the elements of panel 1 and the last hop is the row
combining the elements of the final panel at the receiver.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    check_complex_matrix,
    check_complex_vector,
    check_finite_scalar,
)
from .irs_model import amplify, co_phase_align, verify_power, ReflectionConfig
from .propagation import (
    SINGLE_ANTENNA,
    ChannelMatrix,
    LinkModels,
    Position,
    los_channel,
    rician_channel,
)


@dataclass(frozen=True)
class TransmitBudget:
    p_t: float = 1.0
    noise_power: float = 1e-12  # -90 dBm

    def __post_init__(self):
        check_finite_scalar(self.p_t, "p_t", minimum=0.0, strict=True)
        check_finite_scalar(self.noise_power, "noise_power", minimum=0.0, strict=True)

    def with_power(self, p_t):
        return TransmitBudget(p_t, self.noise_power)


@dataclass
class LinkReport:
    snr: float
    rate: float
    signal_power: float
    noise_terms: dict = field(default_factory=dict)

    @property
    def noise_power(self):
        return float(sum(self.noise_terms.values()))

    @classmethod
    def from_terms(cls, signal_power, noise_terms):
        snr = signal_power / sum(noise_terms.values())
        return cls(float(snr), float(np.log2(1 + snr)), float(signal_power), dict(noise_terms))


@dataclass(frozen=True)
class Node:
    """A transceiver: position plus antenna array."""

    id: str
    position: Position
    geometry: object = SINGLE_ANTENNA

    def __post_init__(self):
        object.__setattr__(self, "position", Position.of(self.position))


# ---------------------------------------------------------------------------
# cascades
# ---------------------------------------------------------------------------

def dominant_row(h, iters=4):
    """Unit-norm row direction ``v^H`` of the strongest right singular vector.

    Exact in one step for rank-one (LoS) blocks.
    """
    h = np.asarray(h, dtype=complex)
    v = h[np.argmax(np.sum(np.abs(h) ** 2, axis=1))].conj()
    for _ in range(iters):
        v = h.conj().T @ (h @ v)
        norm = np.linalg.norm(v)
        if norm == 0:
            break
        v = v / norm
    return v.conj()


def dominant_column(h, iters=4):
    """Unit-norm strongest left singular vector of ``h``."""
    return dominant_row(np.asarray(h).conj().T, iters).conj()


def _chain_shapes(h_first, inter, h_last, panels):
    if len(panels) < 1 or len(inter) != len(panels) - 1:
        raise ValueError("need one panel per reflection and len(panels) - 1 inter-panel hops")
    h_first = check_complex_vector(h_first, "h_first", length=panels[0].n_elements)
    h_last = check_complex_vector(h_last, "h_last", length=panels[-1].n_elements)
    mats = []
    for i, d in enumerate(inter):
        d = d.entries if hasattr(d, "entries") else d
        shape = (panels[i + 1].n_elements, panels[i].n_elements)
        mats.append(check_complex_matrix(d, f"inter[{i}]", shape=shape))
    return h_first, mats, h_last


def _incident_powers(p_t, h_first, mats, panels):
    """Per-element incident power (signal plus upstream amplification noise)
    at every panel of a chain, given the panels' current configurations."""
    incident = []
    x = np.sqrt(p_t) * h_first
    noise_cov_diag = np.zeros(panels[0].n_elements)
    # maps from each upstream noise source to the current panel input
    noise_maps = []
    for i, panel in enumerate(panels):
        incident.append(np.abs(x) ** 2 + noise_cov_diag)
        if i == len(panels) - 1:
            break
        c = panel.config.coefficients
        hop = mats[i] * c[None, :]
        x = hop @ x
        noise_maps = [(hop @ m, s) for m, s in noise_maps]
        if panel.n_active and panel.amp_noise_power > 0:
            noise_maps.append((hop[:, : panel.n_active], panel.amp_noise_power))
        noise_cov_diag = np.zeros(panels[i + 1].n_elements)
        for m, s in noise_maps:
            noise_cov_diag += s * np.sum(np.abs(m) ** 2, axis=1)
    return incident


def configure_chain(budget, h_first, inter, h_last, panels):
    """Co-phase and amplify every panel of a reflection chain in order.

    Panel ``i`` is co-phased between the signal actually arriving at it and
    the dominant row direction of the next hop, which is the exact optimum
    for rank-one (LoS) hops. Active elements are then given the largest
    common amplitude their budget allows for that incident power.
    """
    h_first, mats, h_last = _chain_shapes(h_first, inter, h_last, panels)
    panels = list(panels)
    x = np.sqrt(budget.p_t) * h_first
    for i in range(len(panels)):
        h_out = h_last if i == len(panels) - 1 else dominant_row(mats[i])
        panels[i] = panels[i].with_config(co_phase_align(x, h_out))
        incident = _incident_powers(budget.p_t, h_first, mats, panels)[i]
        panels[i] = amplify(panels[i], incident)
        if i < len(panels) - 1:
            x = mats[i] @ (panels[i].config.coefficients * x)
    return panels


def amplify_chain(budget, h_first, inter, h_last, panels):
    """Keep every panel's phases and give its active elements the largest
    common amplitude the budget allows, in chain order."""
    h_first, mats, h_last = _chain_shapes(h_first, inter, h_last, panels)
    panels = list(panels)
    for i in range(len(panels)):
        panels[i] = amplify(panels[i], _incident_powers(budget.p_t, h_first, mats, panels)[i])
    return panels


def _check_power(budget, h_first, mats, panels, rtol=1e-9):
    incident = _incident_powers(budget.p_t, h_first, mats, panels)
    for i, (panel, p) in enumerate(zip(panels, incident)):
        if panel.n_active:
            check = verify_power(panel, p, rtol=rtol)
            if not check.ok:
                raise ValueError(
                    f"panel {i} violates its amplification budget by a factor {check.excess:.6g}")


def cascade_report(budget, h_first, inter, h_last, panels, h_direct=0.0, check_power=True):
    """Exact SNR of a chain ``BS -> panel_1 -> ... -> panel_H -> user``.

    ``y = h_last^T Phi_H (... D_1 Phi_1 (h_first s + v_1) ... + v_H) + h_direct s + z``.
    """
    h_first, mats, h_last = _chain_shapes(h_first, inter, h_last, panels)
    if check_power:
        _check_power(budget, h_first, mats, panels)
    # row transfer from the output of panel i to the receiver
    rows = [None] * len(panels)
    r = h_last
    for i in range(len(panels) - 1, -1, -1):
        rows[i] = r
        if i > 0:
            r = (r * panels[i].config.coefficients) @ mats[i - 1]
    coeff0 = panels[0].config.coefficients
    amplitude = np.sum(rows[0] * coeff0 * h_first) + h_direct
    terms = {"receiver": budget.noise_power}
    for i, panel in enumerate(panels):
        if panel.n_active:
            g = (rows[i] * panel.config.coefficients)[: panel.n_active]
            terms[f"irs{i + 1}_amplification"] = panel.amp_noise_power * float(np.sum(np.abs(g) ** 2))
    return LinkReport.from_terms(budget.p_t * abs(amplitude) ** 2, terms)


def siso_single_reflection(budget, h1, h2, panel, config=None, h_direct=0.0):
    """Single-antenna link through one IRS.

    ``h1[n]`` is the BS to element ``n`` channel and ``h2[n]`` the element
    ``n`` to user channel. Passive: ``snr = p_t |sum h2 c h1 + h_d|^2 / sigma^2``.
    Active elements add ``sigma_v^2 sum_active |h2_n c_n|^2`` to the noise.
    """
    if config is not None:
        panel = panel.with_config(config)
    return cascade_report(budget, h1, [], h2, [panel], h_direct)


def double_reflection(budget, h1, d_inter, h2, panel1, panel2, configs=None,
                      include_single_links=False, g_bs_irs2=None, g_irs1_user=None,
                      h_direct=0.0):
    """Single-antenna link through two IRSs, optionally with the single-reflection
    links ``BS -> IRS 2 -> user`` (``g_bs_irs2``) and ``BS -> IRS 1 -> user``
    (``g_irs1_user``) combined coherently.

    ``y = h2^T Phi2 (D Phi1 (h1 s + v1) + g2 s + v2) + g1^T Phi1 (h1 s + v1) + h_d s + z``.
    Which panels are active is given by their kinds, so BAPU is
    ``(active, passive)`` and BPAU is ``(passive, active)``.
    """
    if configs is not None:
        panel1, panel2 = panel1.with_config(configs[0]), panel2.with_config(configs[1])
    d = d_inter.entries if hasattr(d_inter, "entries") else d_inter
    if not include_single_links:
        return cascade_report(budget, h1, [d], h2, [panel1, panel2], h_direct)

    h1, (d,), h2 = _chain_shapes(h1, [d], h2, [panel1, panel2])
    g2 = check_complex_vector(g_bs_irs2, "g_bs_irs2", length=panel2.n_elements)
    g1 = check_complex_vector(g_irs1_user, "g_irs1_user", length=panel1.n_elements)
    c1, c2 = panel1.config.coefficients, panel2.config.coefficients
    # power check with the extra BS -> IRS 2 illumination
    x2 = d @ (c1 * h1) + g2
    noise_in2 = np.zeros(panel2.n_elements)
    if panel1.n_active:
        m = (d * c1[None, :])[:, : panel1.n_active]
        noise_in2 = panel1.amp_noise_power * np.sum(np.abs(m) ** 2, axis=1)
    for panel, p in ((panel1, budget.p_t * np.abs(h1) ** 2),
                     (panel2, budget.p_t * np.abs(x2) ** 2 + noise_in2)):
        if panel.n_active and not verify_power(panel, p).ok:
            raise ValueError("panel violates its amplification budget")
    row2 = h2 * c2
    row1 = (row2 @ d + g1) * c1
    amplitude = np.sum(row1 * h1) + np.sum(row2 * g2) + h_direct
    terms = {"receiver": budget.noise_power}
    for i, (panel, row) in enumerate(((panel1, row1), (panel2, row2))):
        if panel.n_active:
            terms[f"irs{i + 1}_amplification"] = panel.amp_noise_power * float(
                np.sum(np.abs(row[: panel.n_active]) ** 2))
    return LinkReport.from_terms(budget.p_t * abs(amplitude) ** 2, terms)


def align_double(h1, d_inter, h2, g_bs_irs2=None, g_irs1_user=None, h_direct=0.0, iters=20):
    """Phase configurations for a passive double-IRS link.

    Starts from the rank-one alignment of the double-reflection cascade; when
    single-reflection links are present, alternates closed-form co-phasing of
    each panel against the rest of the received sum.
    """
    d = d_inter.entries if hasattr(d_inter, "entries") else np.asarray(d_inter, dtype=complex)
    h1, h2 = np.asarray(h1, dtype=complex), np.asarray(h2, dtype=complex)
    c1 = co_phase_align(h1, dominant_row(d)).coefficients
    c2 = co_phase_align(d @ (c1 * h1), h2).coefficients
    if g_bs_irs2 is None and g_irs1_user is None:
        return ReflectionConfig(np.angle(c1)), ReflectionConfig(np.angle(c2))
    g2 = np.zeros(len(h2), complex) if g_bs_irs2 is None else np.asarray(g_bs_irs2, complex)
    g1 = np.zeros(len(h1), complex) if g_irs1_user is None else np.asarray(g_irs1_user, complex)
    for _ in range(iters):
        # panel 1 against the fixed remainder
        out1 = (h2 * c2) @ d + g1
        rest = np.sum(h2 * c2 * g2) + h_direct
        c1 = co_phase_align(h1, out1, _ref(rest)).coefficients
        inc2 = d @ (c1 * h1) + g2
        rest = np.sum(g1 * c1 * h1) + h_direct
        c2 = co_phase_align(inc2, h2, _ref(rest)).coefficients
    return ReflectionConfig(np.angle(c1)), ReflectionConfig(np.angle(c2))


def _ref(rest):
    """Reference phase for co-phasing: the fixed remainder's phase when it is
    non-zero, otherwise zero."""
    return float(np.angle(rest)) if abs(rest) > 0 else 0.0


# ---------------------------------------------------------------------------
# MIMO
# ---------------------------------------------------------------------------

@dataclass
class CapacityResult:
    rate: float
    powers: np.ndarray
    singular_values: np.ndarray
    water_level: float


def water_filling(gains, p_t):
    """Allocate ``p_t`` over channels with SNR-per-watt ``gains``.

    Returns ``(powers, water_level)`` with ``p_i = max(0, mu - 1/g_i)``.
    """
    gains = np.asarray(gains, dtype=float)
    powers = np.zeros_like(gains)
    positive = np.flatnonzero(gains > 0)
    if positive.size == 0:
        return powers, 0.0
    order = positive[np.argsort(-gains[positive])]
    inv = 1.0 / gains[order]
    mu = 0.0
    for k in range(order.size, 0, -1):
        mu = (p_t + inv[:k].sum()) / k
        if mu > inv[k - 1]:
            break
    powers[order] = np.maximum(mu - inv, 0.0)
    # remove rounding drift so the budget holds exactly up to float precision
    active = powers > 0
    powers[active] += (p_t - powers.sum()) / active.sum()
    return powers, float(mu)


def mimo_capacity(budget, effective_channel):
    """Water-filling capacity ``sum log2(1 + p_i s_i^2 / sigma^2)`` of a MIMO channel."""
    h = effective_channel.entries if hasattr(effective_channel, "entries") else effective_channel
    h = check_complex_matrix(h, "effective_channel")
    s = np.linalg.svd(h, compute_uv=False)
    gains = s ** 2 / budget.noise_power
    powers, mu = water_filling(gains, budget.p_t)
    rate = float(np.sum(np.log2(1 + powers * gains)))
    return CapacityResult(rate, powers, s, mu)


def hop_channel(tx, rx, links, tx_role, rx_role, k_factor=math.inf, rng=None):
    """Channel block for a hop between two nodes/panels of the given roles."""
    model = links.for_roles(tx_role, rx_role)
    h = los_channel(tx.position, tx.geometry, rx.position, rx.geometry, model, links.wavelength)
    return rician_channel(h, k_factor, rng) if not math.isinf(k_factor) else h


def align_mimo_panel(h_in, h_out):
    """Co-phase a panel between a BS->IRS block ``h_in`` (N x M) and an
    IRS->user block ``h_out`` (U x N) along their dominant directions."""
    return co_phase_align(h_in @ dominant_row(h_in).conj(), dominant_column(h_out).conj() @ h_out)


def assemble_multi_irs_channel(bs, user, panels, configs=None, links=LinkModels(),
                               include_direct=False, k_factor=math.inf, rng=None):
    """Effective BS->user MIMO channel ``sum_k H2k Phi_k H1k`` (+ direct link)."""
    if not panels:
        raise ValueError("need at least one panel")
    if configs is not None and len(configs) != len(panels):
        raise ValueError("one config per panel expected")
    total = np.zeros((user.geometry.element_count, bs.geometry.element_count), complex)
    for k, panel in enumerate(panels):
        h1 = hop_channel(bs, panel, links, "bs", "irs", k_factor, rng).entries
        h2 = hop_channel(panel, user, links, "irs", "user", k_factor, rng).entries
        cfg = align_mimo_panel(h1, h2) if configs is None else configs[k]
        total += h2 @ (cfg.coefficients[:, None] * h1)
    if include_direct:
        total += hop_channel(bs, user, links, "bs", "user", k_factor, rng).entries
    return ChannelMatrix(total, links.wavelength)


# ---------------------------------------------------------------------------
# multi-user
# ---------------------------------------------------------------------------

@dataclass
class MultiUserRates:
    rates: np.ndarray
    snrs: np.ndarray
    time_fractions: np.ndarray

    @property
    def sum_rate(self):
        return float(np.sum(self.rates))


def _bs_beam_channel(bs, panel, links, k_factor=math.inf, rng=None):
    """BS->IRS block and the incident vector at the IRS under the BS's
    dominant (MRT) beam towards the panel."""
    g = hop_channel(bs, panel, links, "bs", "irs", k_factor, rng).entries
    w = dominant_row(g).conj()
    return g, g @ w


def multiuser_centralized_rate(budget, bs, users, panel, links=LinkModels(),
                               include_direct=False):
    """TDMA with one BS-side panel re-co-phased for every user slot.

    User ``k`` owns a ``1/K`` time share; in its slot the BS beamforms on the
    cascade (MRT) so ``snr_k = p_t ||h2_k^T Phi_k G||^2 / sigma^2``.
    """
    if not users:
        raise ValueError("need at least one user")
    g, incident = _bs_beam_channel(bs, panel, links)
    k_users = len(users)
    snrs = np.empty(k_users)
    for k, user in enumerate(users):
        h2 = hop_channel(panel, user, links, "irs", "user").entries[0]
        cfg = co_phase_align(incident, h2)
        h_eff = (h2 * cfg.coefficients) @ g
        if include_direct:
            h_eff = h_eff + hop_channel(bs, user, links, "bs", "user").entries[0]
        snrs[k] = budget.p_t * float(np.sum(np.abs(h_eff) ** 2)) / budget.noise_power
    fractions = np.full(k_users, 1.0 / k_users)
    return MultiUserRates(fractions * np.log2(1 + snrs), snrs, fractions)


def zero_forcing(budget, h_eff):
    """Per-user SNRs under ZF precoding with unit-norm beams and ``p_t/K`` each.

    ``h_eff`` is ``K x M`` with ``M >= K``. Returns ``(snrs, W)``.
    """
    h = check_complex_matrix(h_eff, "h_eff")
    k_users, m = h.shape
    if m < k_users:
        raise ValueError(f"zero-forcing needs M >= K, got M={m}, K={k_users}")
    w = np.linalg.pinv(h)
    w = w / np.linalg.norm(w, axis=0, keepdims=True)
    gain = np.abs(np.sum(h * w.T, axis=1)) ** 2
    return budget.p_t / k_users * gain / budget.noise_power, w


def distributed_effective_channels(bs, users, panels, links=LinkModels(), include_direct=False):
    """``K x M`` effective channels when panel ``k`` is co-phased for user ``k``."""
    if len(panels) != len(users):
        raise ValueError("distributed architecture needs one panel per user")
    m = bs.geometry.element_count
    rows = np.zeros((len(users), m), complex)
    beams = [_bs_beam_channel(bs, p, links) for p in panels]
    configs = []
    for j, (panel, (g, incident)) in enumerate(zip(panels, beams)):
        h2 = hop_channel(panel, users[j], links, "irs", "user").entries[0]
        configs.append(co_phase_align(incident, h2))
    for k, user in enumerate(users):
        for panel, (g, _), cfg in zip(panels, beams, configs):
            h2 = hop_channel(panel, user, links, "irs", "user").entries[0]
            rows[k] += (h2 * cfg.coefficients) @ g
        if include_direct:
            rows[k] += hop_channel(bs, user, links, "bs", "user").entries[0]
    return rows


def multiuser_distributed_rate(budget, bs, users, panels, links=LinkModels(),
                               include_direct=False):
    """SDMA with one user-side panel per user and zero-forcing at the BS."""
    if not users:
        raise ValueError("need at least one user")
    if bs.geometry.element_count < len(users):
        raise ValueError("zero-forcing needs at least as many BS antennas as users")
    h = distributed_effective_channels(bs, users, panels, links, include_direct)
    snrs, _ = zero_forcing(budget, h)
    k_users = len(users)
    return MultiUserRates(np.log2(1 + snrs), snrs, np.ones(k_users))


# ---------------------------------------------------------------------------
# point-to-area
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Area:
    """Axis-aligned rectangle sampled on a uniform ``nx x ny`` grid at height ``z``."""

    x_range: tuple
    y_range: tuple
    z: float = 0.0
    nx: int = 21
    ny: int = 21

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid resolution must be positive")
        if self.x_range[1] < self.x_range[0] or self.y_range[1] < self.y_range[0]:
            raise ValueError("empty area")

    def points(self):
        xs = np.linspace(*self.x_range, self.nx) if self.nx > 1 else np.array([np.mean(self.x_range)])
        ys = np.linspace(*self.y_range, self.ny) if self.ny > 1 else np.array([np.mean(self.y_range)])
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, self.z)])

    @property
    def center(self):
        return Position(np.mean(self.x_range), np.mean(self.y_range), self.z)


def _as_points(area):
    pts = area.points() if isinstance(area, Area) else np.atleast_2d(np.asarray(area, float))
    if pts.size == 0:
        raise ValueError("empty area")
    if pts.shape[1] == 2:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    return pts


def irs_to_points(panel, points, links=LinkModels()):
    """``P x N`` matrix of IRS->point channels (single-antenna receivers)."""
    pts = _as_points(points)
    return np.vstack([
        hop_channel(panel, Node("p", Position.of(p)), links, "irs", "user").entries[0]
        for p in pts
    ])


def point_config(bs, panel, target, links=LinkModels()):
    """Static configuration co-phasing the cascade towards one point."""
    _, incident = _bs_beam_channel(bs, panel, links)
    h2 = hop_channel(panel, Node("t", Position.of(target)), links, "irs", "user").entries[0]
    return co_phase_align(incident, h2)


def spatial_frequency(panel, points, links=LinkModels()):
    """Per-element phase progression of the IRS->point response along the panel axis."""
    pts = _as_points(points)
    src = panel.position.as_array()
    u = pts - src[None, :]
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    k = 2 * np.pi / links.wavelength
    return k * panel.geometry.element_spacing * (u @ np.asarray(panel.geometry.axis, float))


def broad_beam_config(bs, panel, points, links=LinkModels(), margin=1.0):
    """Static configuration spreading the beam over the angular span of ``points``.

    The phase profile is the incident-compensating co-phase plus a quadratic
    (chirp) term whose local spatial frequency sweeps the span of
    ``spatial_frequency(points)`` widened by ``margin`` beamwidths
    (``2 pi / N``) in total. A span narrower than the main lobe collapses to
    a beam pointed at the span centre. Linear panels only.
    """
    if panel.geometry.layout != "linear":
        raise ValueError("broad_beam_config supports linear panels only")
    _, incident = _bs_beam_channel(bs, panel, links)
    n = panel.n_elements
    psi = spatial_frequency(panel, points, links)
    half = margin * np.pi / n
    lo, hi = psi.min() - half, psi.max() + half
    idx = np.arange(n)
    sweep = lo * idx + (hi - lo) * idx ** 2 / (2 * max(n - 1, 1))
    # the IRS transmits on this hop, so element n sees exp(+j n psi)
    return ReflectionConfig(-sweep - np.angle(incident))


@dataclass
class AreaCoverage:
    min_power: float
    argmin: Position
    powers: np.ndarray
    points: np.ndarray


def received_powers(budget, bs, panel, config, points, links=LinkModels(), include_direct=False):
    """Received signal power at each point for a fixed IRS configuration."""
    pts = _as_points(points)
    g, incident = _bs_beam_channel(bs, panel, links)
    h2 = irs_to_points(panel, pts, links)
    amp = h2 @ (config.coefficients * incident)
    if include_direct:
        w = dominant_row(g).conj()
        for i, p in enumerate(pts):
            amp[i] += hop_channel(bs, Node("p", Position.of(p)), links, "bs", "user").entries[0] @ w
    return budget.p_t * np.abs(amp) ** 2


def area_min_power(budget, bs, panel, config, area, links=LinkModels(), include_direct=False):
    """Worst-case received power over the grid of ``area`` for a static config."""
    pts = _as_points(area)
    powers = received_powers(budget, bs, panel, config, pts, links, include_direct)
    i = int(np.argmin(powers))
    return AreaCoverage(float(powers[i]), Position.of(pts[i]), powers, pts)


STATIC_BEAM_MARGINS = (0.0, 0.25, 0.5, 1.0)


def static_area_config(budget, bs, panel, points, links=LinkModels(), margins=STATIC_BEAM_MARGINS):
    """Max-min static configuration for covering ``points`` from one BS.

    Candidates are a beam pointed at the centroid of ``points`` and chirped
    broad beams with the given margins (linear panels only); the candidate
    with the largest worst-case received power wins, earliest on ties.
    """
    pts = _as_points(points)
    candidates = [point_config(bs, panel, Position.of(pts.mean(axis=0)), links)]
    if panel.geometry.layout == "linear":
        candidates += [broad_beam_config(bs, panel, pts, links, m) for m in margins]
    scores = [received_powers(budget, bs, panel, c, pts, links).min() for c in candidates]
    return candidates[int(np.argmax(scores))]


double_reflection_snr = double_reflection
