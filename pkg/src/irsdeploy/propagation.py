"""Radio channel primitives: path loss, far-field array responses and
line-of-sight / Rician channel matrices.

All gains are linear power ratios, distances are meters, and every
function is a pure function of its inputs.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    check_complex_matrix,
    check_finite_scalar,
    check_random_state,
    check_unit_vector,
)

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 2.6e9
DEFAULT_WAVELENGTH = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ
DEFAULT_BETA0 = 1e-3  # -30 dB at 1 m


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watt(x_dbm):
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float)) + 30.0


@dataclass(frozen=True)
class Position:
    """Point in a right-handed frame; the ground plane is ``z = 0``."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, check_finite_scalar(getattr(self, name), name))
        if self.z < 0:
            raise ValueError(f"z must be >= 0, got {self.z}")

    @classmethod
    def of(cls, p):
        if isinstance(p, Position):
            return p
        p = tuple(float(v) for v in p)
        if len(p) == 2:
            p = p + (0.0,)
        return cls(*p)

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other):
        return float(np.linalg.norm(Position.of(other).as_array() - self.as_array()))

    def __iter__(self):
        return iter((self.x, self.y, self.z))


@dataclass(frozen=True)
class PathLossModel:
    beta0: float = DEFAULT_BETA0
    alpha: float = 2.2

    def __post_init__(self):
        check_finite_scalar(self.beta0, "beta0", minimum=0.0, strict=True)
        check_finite_scalar(self.alpha, "alpha", minimum=2.0)


@dataclass(frozen=True)
class LinkModels:
    """Path-loss model per link class plus the carrier wavelength."""

    bs_irs: PathLossModel = field(default_factory=lambda: PathLossModel(alpha=2.2))
    irs_user: PathLossModel = field(default_factory=lambda: PathLossModel(alpha=2.8))
    direct: PathLossModel = field(default_factory=lambda: PathLossModel(alpha=3.5))
    inter_irs: PathLossModel = field(default_factory=lambda: PathLossModel(alpha=2.2))
    wavelength: float = DEFAULT_WAVELENGTH

    def for_roles(self, tx_role, rx_role):
        """Pick the model for a hop between two node roles ('bs', 'irs', 'user')."""
        roles = {tx_role, rx_role}
        if roles == {"irs"}:
            return self.inter_irs
        if roles == {"bs", "irs"}:
            return self.bs_irs
        if roles == {"irs", "user"}:
            return self.irs_user
        if roles == {"bs", "user"}:
            return self.direct
        raise ValueError(f"no link class for {tx_role!r} -> {rx_role!r}")


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear or planar array.

    Element ``n`` of a linear array sits at ``n * spacing * axis`` relative to
    the reference position. A planar array of ``rows x cols`` elements puts
    element ``(r, c)`` (flattened row-major) at
    ``c * spacing * axis + r * spacing * axis2``.
    """

    element_count: int = 1
    element_spacing: float = DEFAULT_WAVELENGTH / 2
    axis: tuple = (1.0, 0.0, 0.0)
    layout: str = "linear"
    rows: int = None
    cols: int = None
    axis2: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if int(self.element_count) != self.element_count or self.element_count < 1:
            raise ValueError(f"element_count must be a positive integer, got {self.element_count}")
        check_finite_scalar(self.element_spacing, "element_spacing", minimum=0.0, strict=True)
        check_unit_vector(self.axis, "axis")
        if self.layout == "planar":
            if self.rows is None or self.cols is None or self.rows * self.cols != self.element_count:
                raise ValueError("planar layout needs rows * cols == element_count")
            check_unit_vector(self.axis2, "axis2")
        elif self.layout != "linear":
            raise ValueError(f"unknown layout {self.layout!r}")

    def with_count(self, n):
        """Linear array with the same spacing and axis but ``n`` elements."""
        return ArrayGeometry(n, self.element_spacing, self.axis)

    def element_offsets(self):
        spacing = self.element_spacing
        axis = np.asarray(self.axis, dtype=float)
        if self.layout == "linear":
            idx = np.arange(self.element_count)
            return spacing * idx[:, None] * axis[None, :]
        r, c = np.divmod(np.arange(self.element_count), self.cols)
        axis2 = np.asarray(self.axis2, dtype=float)
        return spacing * (c[:, None] * axis[None, :] + r[:, None] * axis2[None, :])


SINGLE_ANTENNA = ArrayGeometry(1)


@dataclass
class ChannelMatrix:
    """Complex ``rx_dim x tx_dim`` channel block with its carrier wavelength."""

    entries: np.ndarray
    wavelength: float = DEFAULT_WAVELENGTH
    tx: Position = None
    rx: Position = None

    def __post_init__(self):
        self.entries = check_complex_matrix(self.entries, "entries")

    @property
    def shape(self):
        return self.entries.shape

    def frobenius_sq(self):
        return float(np.sum(np.abs(self.entries) ** 2))


def path_loss(d, model=PathLossModel()):
    """Large-scale power gain ``beta0 * d**-alpha`` with ``d`` clamped to 1 m.

    Accepts scalars or arrays; raises on non-finite distances.
    """
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError("distance must be finite")
    gain = model.beta0 * np.maximum(d, 1.0) ** (-model.alpha)
    return float(gain) if gain.ndim == 0 else gain


def steering_vector(geometry, direction, wavelength=DEFAULT_WAVELENGTH):
    """Far-field array response; entry n is ``exp(-j 2pi/lambda <p_n, u>)``."""
    u = check_unit_vector(direction, "direction")
    check_finite_scalar(wavelength, "wavelength", minimum=0.0, strict=True)
    proj = geometry.element_offsets() @ u
    return np.exp(-2j * np.pi / wavelength * proj)


def unit_direction(src, dst):
    delta = Position.of(dst).as_array() - Position.of(src).as_array()
    d = np.linalg.norm(delta)
    if d == 0.0:
        raise ValueError("coincident positions have no direction")
    return delta / d


def los_channel(tx_position, tx_geometry, rx_position, rx_geometry,
                model=PathLossModel(), wavelength=DEFAULT_WAVELENGTH):
    """Rank-one far-field LoS channel from ``tx`` to ``rx``.

    ``H = sqrt(path_loss(d)) * a_rx a_tx^H`` where both steering vectors are
    taken along the propagation direction ``u = (rx - tx) / d``, so entry
    ``(m, n)`` carries phase ``-2pi/lambda <p_m - p_n, u>``.
    """
    tx_position, rx_position = Position.of(tx_position), Position.of(rx_position)
    u = unit_direction(tx_position, rx_position)
    d = tx_position.distance_to(rx_position)
    a_tx = steering_vector(tx_geometry, u, wavelength)
    a_rx = steering_vector(rx_geometry, u, wavelength)
    entries = np.sqrt(path_loss(d, model)) * np.outer(a_rx, a_tx.conj())
    return ChannelMatrix(entries, wavelength, tx_position, rx_position)


def rician_channel(los, k_factor, rng_seed=None):
    """Mix a LoS block with i.i.d. circular Gaussian scattering.

    ``k_factor = inf`` returns ``los`` unchanged. The scatter component is
    scaled so its expected squared Frobenius norm equals that of ``los``,
    hence ``E||H||_F^2 = ||los||_F^2`` for every K.
    """
    k = float(k_factor)
    if np.isnan(k) or k < 0:
        raise ValueError(f"k_factor must be >= 0, got {k_factor}")
    if np.isinf(k):
        return los
    rng = check_random_state(rng_seed)
    rows, cols = los.shape
    var = los.frobenius_sq() / (rows * cols)
    scatter = np.sqrt(var / 2) * (rng.standard_normal((rows, cols))
                                  + 1j * rng.standard_normal((rows, cols)))
    entries = np.sqrt(k / (k + 1)) * los.entries + np.sqrt(1 / (k + 1)) * scatter
    return ChannelMatrix(entries, los.wavelength, los.tx, los.rx)
