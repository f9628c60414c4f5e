import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irsdeploy.propagation import (
    DEFAULT_WAVELENGTH,
    ArrayGeometry,
    LinkModels,
    PathLossModel,
    Position,
    dbm_to_watt,
    linear_to_db,
    los_channel,
    path_loss,
    rician_channel,
    steering_vector,
    watt_to_dbm,
)

coords = st.floats(-200, 200, allow_nan=False)


def test_path_loss_frozen_values():
    # beta0 * d^-alpha, evaluated by hand: 1e-3 * 10^-2.2 and 1e-3 * 100^-3.5
    assert path_loss(10.0, PathLossModel(1e-3, 2.2)) == pytest.approx(6.3095734448019305e-06, rel=1e-12)
    assert path_loss(100.0, PathLossModel(1e-3, 3.5)) == pytest.approx(1e-10, rel=1e-12)


def test_path_loss_clamps_below_one_meter():
    m = PathLossModel(1e-3, 2.8)
    assert path_loss(0.0, m) == path_loss(0.3, m) == path_loss(1.0, m) == 1e-3


def test_path_loss_vectorized_and_rejects_nan():
    d = np.array([1.0, 2.0, 4.0])
    g = path_loss(d, PathLossModel(1.0, 2.0))
    np.testing.assert_allclose(g, [1.0, 0.25, 0.0625])
    with pytest.raises(ValueError):
        path_loss(np.nan)
    with pytest.raises(ValueError):
        path_loss(np.inf)


@given(st.floats(1.0, 1e4), st.floats(1.0, 1e4), st.floats(2.0, 4.0))
def test_path_loss_monotone(d1, d2, alpha):
    m = PathLossModel(1e-3, alpha)
    if d1 < d2:
        assert path_loss(d1, m) >= path_loss(d2, m)


def test_model_validation():
    with pytest.raises(ValueError):
        PathLossModel(alpha=1.5)
    with pytest.raises(ValueError):
        PathLossModel(beta0=0.0)
    with pytest.raises(ValueError):
        Position(0, 0, -1)
    with pytest.raises(ValueError):
        ArrayGeometry(0)
    with pytest.raises(ValueError):
        ArrayGeometry(4, axis=(1, 1, 0))
    with pytest.raises(ValueError):
        ArrayGeometry(6, layout="planar", rows=2, cols=2)


def test_link_models_roles():
    links = LinkModels()
    assert links.for_roles("bs", "irs").alpha == 2.2
    assert links.for_roles("irs", "user").alpha == 2.8
    assert links.for_roles("user", "bs").alpha == 3.5
    assert links.for_roles("irs", "irs").alpha == 2.2
    with pytest.raises(ValueError):
        links.for_roles("bs", "bs")


def test_db_conversions_roundtrip():
    assert dbm_to_watt(30) == pytest.approx(1.0)
    assert watt_to_dbm(1e-3) == pytest.approx(0.0)
    assert linear_to_db(100.0) == pytest.approx(20.0)


def test_steering_vector_explicit():
    lam = DEFAULT_WAVELENGTH
    geom = ArrayGeometry(3, lam / 2, (1.0, 0.0, 0.0))
    u = np.array([np.cos(0.4), np.sin(0.4), 0.0])
    # element n at n*lam/2 along x: phase -pi n cos(0.4)
    expected = np.exp(-1j * np.pi * np.arange(3) * np.cos(0.4))
    np.testing.assert_allclose(steering_vector(geom, u), expected, atol=1e-12)


def test_planar_offsets_row_major():
    g = ArrayGeometry(6, 0.5, (1, 0, 0), "planar", rows=2, cols=3, axis2=(0, 0, 1))
    off = g.element_offsets()
    np.testing.assert_allclose(off[4], [0.5, 0.0, 0.5])


@settings(max_examples=50, deadline=None)
@given(coords, coords, coords, coords, st.integers(1, 16), st.integers(1, 16))
def test_los_channel_rank_one_and_norm(x0, y0, x1, y1, m, n):
    if math.hypot(x1 - x0, y1 - y0) < 1e-3:
        return
    model = PathLossModel(1e-3, 2.2)
    h = los_channel((x0, y0), ArrayGeometry(m, axis=(0, 1, 0)), (x1, y1), ArrayGeometry(n), model)
    d = math.hypot(x1 - x0, y1 - y0)
    assert h.shape == (n, m)
    # every entry has magnitude sqrt(PL) and the block is rank one
    np.testing.assert_allclose(np.abs(h.entries), math.sqrt(path_loss(d, model)), rtol=1e-9)
    s = np.linalg.svd(h.entries, compute_uv=False)
    assert s[1:].sum() <= 1e-9 * s[0]
    assert h.frobenius_sq() == pytest.approx(m * n * path_loss(d, model), rel=1e-9)


def test_los_channel_reciprocity_single_antennas():
    a = los_channel((0, 0), ArrayGeometry(1), (7, 3), ArrayGeometry(1))
    b = los_channel((7, 3), ArrayGeometry(1), (0, 0), ArrayGeometry(1))
    np.testing.assert_allclose(a.entries, b.entries)


def test_rician_infinite_k_is_los_and_seeded():
    los = los_channel((0, 0), ArrayGeometry(4), (20, 5), ArrayGeometry(8))
    assert rician_channel(los, math.inf) is los
    a = rician_channel(los, 3.0, 11)
    b = rician_channel(los, 3.0, 11)
    np.testing.assert_array_equal(a.entries, b.entries)
    with pytest.raises(ValueError):
        rician_channel(los, -1.0)


def test_rician_preserves_mean_power():
    los = los_channel((0, 0), ArrayGeometry(4), (20, 5), ArrayGeometry(8))
    rng = np.random.default_rng(3)
    for k in (0.0, 1.0, 10.0):
        p = np.mean([rician_channel(los, k, rng).frobenius_sq() for _ in range(4000)])
        assert p == pytest.approx(los.frobenius_sq(), rel=0.03)
