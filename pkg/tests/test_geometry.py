import warnings

import numpy as np
import pytest

from hopfion.geometry import (
    CartesianPoint,
    NearFocalRingWarning,
    PointAtInfinityError,
    ToroidalPoint,
    cartesian_gradient,
    check_scale,
    focal_ring_distance,
    frame,
    grad_scale_factors,
    on_axis,
    tau,
    to_cartesian,
    to_toroidal,
    volume_weight,
)


def test_round_trip(rng):
    p = ToroidalPoint(rng.uniform(0.01, 8.0, 500), rng.uniform(-np.pi, np.pi, 500), rng.uniform(0, 2 * np.pi, 500))
    for a in (0.5, 1.0, 3.0):
        back = to_toroidal(to_cartesian(p, a), a)
        assert np.allclose(back.eta, p.eta, rtol=1e-12, atol=1e-12)
        assert np.allclose(np.angle(np.exp(1j * (back.xi - p.xi))), 0.0, atol=1e-11)
        assert np.allclose(np.angle(np.exp(1j * (back.phi - p.phi))), 0.0, atol=1e-11)


def test_cartesian_formula_direct():
    eta, xi, phi, a = 0.7, 0.3, 1.1, 2.0
    t = np.cosh(eta) - np.cos(xi)
    c = to_cartesian(ToroidalPoint(eta, xi, phi), a)
    assert np.isclose(c.x, a / t * np.sinh(eta) * np.cos(phi))
    assert np.isclose(c.y, a / t * np.sinh(eta) * np.sin(phi))
    assert np.isclose(c.z, a / t * np.sin(xi))


def test_tau_stable_near_axis():
    p = ToroidalPoint(1e-9, 1e-9, 0.0)
    assert tau(p) == pytest.approx(1e-18, rel=1e-6)


def test_tau_large_eta_no_overflow():
    c = to_cartesian(ToroidalPoint(np.array([5.0, 40.0, 400.0]), 0.2, 0.0), 1.0)
    assert np.all(np.isfinite(c.as_array()))
    # eta -> inf collapses onto the focal ring
    assert np.hypot(c.x[-1], c.y[-1]) == pytest.approx(1.0, abs=1e-12)


def test_axis_maps_to_eta_zero():
    p = to_toroidal(CartesianPoint(0.0, 0.0, 0.7))
    assert p.eta == 0.0
    assert on_axis(p)
    assert p.phi == 0.0


def test_focal_ring_and_warning():
    with pytest.warns(NearFocalRingWarning):
        p = to_toroidal(CartesianPoint(1.0, 0.0, 0.0))
    assert np.isinf(p.eta)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        to_toroidal(CartesianPoint(1.0 + 1e-3, 0.0, 0.0))
    assert focal_ring_distance(CartesianPoint(0.0, 2.0, 0.0)) == pytest.approx(1.0)


def test_point_at_infinity_rejected():
    with pytest.raises(PointAtInfinityError):
        to_cartesian(ToroidalPoint(0.0, 0.0, 0.0))


@pytest.mark.parametrize("a", [0.0, -1.0, np.inf, np.nan])
def test_bad_scale(a):
    with pytest.raises(ValueError):
        check_scale(a)


def test_frame_orthonormal_right_handed(rng):
    p = ToroidalPoint(rng.uniform(0.1, 4, 100), rng.uniform(-3, 3, 100), rng.uniform(0, 6, 100))
    e1, e2, e3 = frame(p)
    for u in (e1, e2, e3):
        assert np.allclose(np.linalg.norm(u, axis=-1), 1.0)
    assert np.allclose(np.sum(e1 * e2, axis=-1), 0.0, atol=1e-13)
    assert np.allclose(np.cross(e1, e2), e3, atol=1e-12)


def test_scale_factors_against_jacobian(rng):
    # finite-difference Jacobian of the coordinate map as an independent oracle
    a = 1.7
    p = ToroidalPoint(rng.uniform(0.2, 3, 40), rng.uniform(-3, 3, 40), rng.uniform(0, 6, 40))
    h = grad_scale_factors(p, a)
    d = 1e-6
    for k in range(3):
        c = [p.eta, p.xi, p.phi]
        cp, cm = list(c), list(c)
        cp[k] = cp[k] + d
        cm[k] = cm[k] - d
        col = (to_cartesian(ToroidalPoint(*cp), a).as_array() - to_cartesian(ToroidalPoint(*cm), a).as_array()) / (2 * d)
        assert np.allclose(np.linalg.norm(col, axis=-1), h[k], rtol=1e-8)
        assert np.allclose(col / h[k][:, None], frame(p)[k], atol=1e-7)
    assert np.allclose(volume_weight(p, a), h[0] * h[1] * h[2])


def test_cartesian_gradient_matches_fd(rng):
    a = 1.0
    fn = lambda e, x, f: np.sinh(e) * np.cos(2 * x) + np.sin(f)
    p = ToroidalPoint(rng.uniform(0.3, 2, 20), rng.uniform(-3, 3, 20), rng.uniform(0, 6, 20))
    g = cartesian_gradient(
        p, a,
        np.cosh(p.eta) * np.cos(2 * p.xi),
        -2 * np.sinh(p.eta) * np.sin(2 * p.xi),
        np.cos(p.phi),
    )
    xyz = to_cartesian(p, a).as_array()
    d = 1e-6
    for k in range(3):
        dx = np.zeros(3)
        dx[k] = d
        pp = to_toroidal(CartesianPoint.from_array(xyz + dx), a)
        pm = to_toroidal(CartesianPoint.from_array(xyz - dx), a)
        fd = (fn(pp.eta, pp.xi, pp.phi) - fn(pm.eta, pm.xi, pm.phi)) / (2 * d)
        assert np.allclose(g[..., k], fd, atol=1e-6)
