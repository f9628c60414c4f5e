"""IRS panels and their reflection configurations."""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_complex_vector, check_finite_scalar
from .propagation import ArrayGeometry, Position

KINDS = ("passive", "active", "hybrid")
CONSTRAINTS = ("total", "per_element")
DEFAULT_AMP_NOISE = 1e-10  # -70 dBm

TWO_PI = 2 * np.pi


def wrap_phase(phases):
    """Map phases into ``[0, 2pi)``."""
    p = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    p[p >= TWO_PI] = 0.0
    return p


@dataclass
class ReflectionConfig:
    phases: np.ndarray
    amplitudes: np.ndarray = None

    def __post_init__(self):
        self.phases = wrap_phase(np.atleast_1d(self.phases))
        if self.amplitudes is None:
            self.amplitudes = np.ones_like(self.phases)
        self.amplitudes = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if self.amplitudes.shape != self.phases.shape:
            raise ValueError("phases and amplitudes must have the same length")
        if np.any(self.amplitudes < 0) or not np.all(np.isfinite(self.amplitudes)):
            raise ValueError("amplitudes must be finite and non-negative")

    def __len__(self):
        return self.phases.size

    @property
    def coefficients(self):
        """Complex reflection coefficients ``amplitude * exp(j phase)``."""
        return self.amplitudes * np.exp(1j * self.phases)


@dataclass(frozen=True, eq=False)
class IrsPanel:
    """An IRS with its placement, hardware kind and current configuration.

    For ``kind='hybrid'`` the first ``n_active`` elements are active. The
    amplification budget is the total over active elements when
    ``constraint='total'`` and the budget of each active element when
    ``constraint='per_element'``.
    """

    position: Position
    geometry: ArrayGeometry
    kind: str = "passive"
    amp_power_budget: float = 0.0
    constraint: str = "total"
    amp_noise_power: float = DEFAULT_AMP_NOISE
    n_active: int = None
    config: ReflectionConfig = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "position", Position.of(self.position))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.constraint not in CONSTRAINTS:
            raise ValueError(f"constraint must be one of {CONSTRAINTS}, got {self.constraint!r}")
        check_finite_scalar(self.amp_power_budget, "amp_power_budget", minimum=0.0)
        check_finite_scalar(self.amp_noise_power, "amp_noise_power", minimum=0.0)
        n = self.geometry.element_count
        n_active = {"passive": 0, "active": n}.get(self.kind, self.n_active)
        if n_active is None or not 0 <= n_active <= n:
            raise ValueError(f"hybrid panel needs 0 <= n_active <= {n}, got {self.n_active}")
        object.__setattr__(self, "n_active", int(n_active))
        config = self.config
        if config is None:
            config = ReflectionConfig(np.zeros(n))
        if len(config) != n:
            raise ValueError(f"config has {len(config)} elements, panel has {n}")
        passive = ~self.active_mask
        if np.any(config.amplitudes[passive] != 1.0):
            raise ValueError("passive elements must have unit amplitude")
        object.__setattr__(self, "config", config)

    @property
    def n_elements(self):
        return self.geometry.element_count

    @property
    def n_passive(self):
        return self.n_elements - self.n_active

    @property
    def active_mask(self):
        mask = np.zeros(self.n_elements, dtype=bool)
        mask[: self.n_active] = True
        return mask

    @property
    def is_passive(self):
        return self.n_active == 0

    @property
    def phases(self):
        return self.config.phases

    @property
    def amplitudes(self):
        return self.config.amplitudes

    def with_config(self, config):
        return replace(self, config=config)

    def with_amplitudes(self, amplitudes):
        return self.with_config(ReflectionConfig(self.phases, amplitudes))

    def with_position(self, position):
        return replace(self, position=Position.of(position))


def co_phase_align(h_in, h_out, reference_phase=0.0):
    """Closed-form co-phasing of a single-reflection cascade.

    Sets ``phi_n = reference_phase - arg(h_in[n] * h_out[n])`` so that every
    term of ``sum_n h_out[n] exp(j phi_n) h_in[n]`` lands on the reference
    phase. Amplitudes are 1.
    """
    h_in = check_complex_vector(h_in, "h_in")
    h_out = check_complex_vector(h_out, "h_out", length=h_in.size)
    return ReflectionConfig(reference_phase - np.angle(h_in * h_out))


def _incident_array(panel, incident_power_per_element):
    p = np.asarray(incident_power_per_element, dtype=float)
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("incident power must be finite and non-negative")
    return np.broadcast_to(p, (panel.n_active,)) if p.ndim == 0 else p[: panel.n_active]


def amplification_factor(panel, incident_power_per_element):
    """Common amplitude of the active elements that meets the budget with equality.

    ``incident_power_per_element`` is the signal plus upstream-noise power
    arriving at each element (scalar or per-element array). Under the total
    constraint ``a^2 * sum_n (p_n + sigma_v^2) = P_a``; under the per-element
    constraint the most heavily loaded element sits exactly on its budget.
    """
    if panel.n_active == 0:
        raise ValueError("amplification_factor needs a panel with active elements")
    p = _incident_array(panel, incident_power_per_element)
    load = p + panel.amp_noise_power
    if panel.amp_power_budget == 0.0:
        warnings.warn("zero amplification budget: active elements are switched off",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    if panel.constraint == "total":
        denom = float(np.sum(load))
    else:
        denom = float(np.max(load))
    if denom == 0.0:
        raise ValueError("amplification is unbounded with zero incident power and zero noise")
    return float(np.sqrt(panel.amp_power_budget / denom))


def amplify(panel, incident_power_per_element):
    """Return ``panel`` with its active amplitudes set by :func:`amplification_factor`."""
    if panel.n_active == 0:
        return panel
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        a = amplification_factor(panel, incident_power_per_element)
    amplitudes = np.ones(panel.n_elements)
    amplitudes[: panel.n_active] = a
    return panel.with_amplitudes(amplitudes)


@dataclass
class PowerCheck:
    ok: bool
    element_power: np.ndarray
    total_power: float
    budget: float
    excess: float


def verify_power(panel, incident_power_per_element, rtol=1e-9):
    """Compare the amplified output power of ``panel`` with its budget.

    ``excess`` is the ratio of used to allowed power (total power for the
    total constraint, the largest element power otherwise).
    """
    if panel.n_active == 0:
        return PowerCheck(True, np.zeros(0), 0.0, 0.0, 0.0)
    p = _incident_array(panel, incident_power_per_element)
    amps = panel.amplitudes[: panel.n_active]
    element_power = amps ** 2 * (p + panel.amp_noise_power)
    total = float(np.sum(element_power))
    used = total if panel.constraint == "total" else float(np.max(element_power))
    budget = panel.amp_power_budget
    if budget == 0.0:
        excess = 0.0 if used == 0.0 else np.inf
    else:
        excess = used / budget
    return PowerCheck(bool(used <= budget * (1 + rtol)), element_power, total, budget, excess)


def quantize_phases(config, bits):
    """Snap each phase to the nearest of ``2**bits`` uniform levels.

    Exact ties go to the lower level; the top level wraps to 0.
    """
    if int(bits) != bits or bits < 1:
        raise ValueError(f"bits must be a positive integer, got {bits}")
    levels = 2 ** int(bits)
    step = TWO_PI / levels
    k = np.ceil(config.phases / step - 0.5)
    return ReflectionConfig(np.mod(k, levels) * step, config.amplitudes.copy())


def split_hybrid(panel, n_active):
    """Split a surface into co-located active and passive sub-panels.

    An empty side is returned as ``None``. The active sub-panel inherits the
    amplification budget, constraint and noise of ``panel``.
    """
    n = panel.n_elements
    if int(n_active) != n_active or not 0 <= n_active <= n:
        raise ValueError(f"n_active must be in [0, {n}], got {n_active}")
    n_active = int(n_active)
    phases, amps = panel.phases, panel.amplitudes
    active = passive = None
    if n_active > 0:
        amp = amps[:n_active] if panel.n_active >= n_active else np.ones(n_active)
        active = IrsPanel(panel.position, panel.geometry.with_count(n_active), "active",
                          panel.amp_power_budget, panel.constraint, panel.amp_noise_power,
                          config=ReflectionConfig(phases[:n_active], amp))
    if n_active < n:
        passive = IrsPanel(panel.position, panel.geometry.with_count(n - n_active), "passive",
                           config=ReflectionConfig(phases[n_active:]))
    return active, passive


def hybrid_panel(position, geometry, n_active, amp_power_budget=0.0, constraint="total",
                 amp_noise_power=DEFAULT_AMP_NOISE):
    return IrsPanel(position, geometry, "hybrid", amp_power_budget, constraint,
                    amp_noise_power, n_active=n_active)
