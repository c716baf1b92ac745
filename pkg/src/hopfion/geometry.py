"""Toroidal coordinates (eta, xi, phi) around a focal ring of radius ``a``.

    x = (a / tau) sinh(eta) cos(phi)
    y = (a / tau) sinh(eta) sin(phi)
    z = (a / tau) sin(xi),        tau = cosh(eta) - cos(xi)

eta = 0 is the z-axis, eta -> inf is the focal ring, and (eta, xi) = (0, 0)
is spatial infinity.  The triad (e_eta, e_xi, e_phi) is right-handed.

All functions accept scalars or broadcastable numpy arrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Above this eta the cosh-ratio form of the chart is used (no overflow).
_ETA_SWITCH = 1.0
NEAR_RING_TOL = 1e-8


class PointAtInfinityError(ValueError):
    """Raised for the excluded chart point eta = 0, xi = 0."""


class NearFocalRingWarning(UserWarning):
    """Inverse map evaluated within NEAR_RING_TOL * a of the focal ring."""


@dataclass(frozen=True)
class CartesianPoint:
    x: np.ndarray | float
    y: np.ndarray | float
    z: np.ndarray | float

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.x, self.y, self.z), axis=-1)

    @classmethod
    def from_array(cls, xyz) -> "CartesianPoint":
        xyz = np.asarray(xyz, dtype=float)
        return cls(xyz[..., 0], xyz[..., 1], xyz[..., 2])


@dataclass(frozen=True)
class ToroidalPoint:
    eta: np.ndarray | float
    xi: np.ndarray | float
    phi: np.ndarray | float

    @property
    def shape(self):
        return np.broadcast(self.eta, self.xi, self.phi).shape


def check_scale(a: float) -> float:
    a = float(a)
    if not (a > 0 and np.isfinite(a)):
        raise ValueError(f"scale a must be a positive finite length, got {a!r}")
    return a


def tau(p: ToroidalPoint) -> np.ndarray:
    """cosh(eta) - cos(xi), written without cancellation near infinity."""
    eta = np.asarray(p.eta, dtype=float)
    xi = np.asarray(p.xi, dtype=float)
    with np.errstate(over="ignore"):
        return 2.0 * np.sinh(0.5 * eta) ** 2 + 2.0 * np.sin(0.5 * xi) ** 2


def _radial_parts(eta, xi):
    """Return (sinh(eta)/tau, sin(xi)/tau, 1/tau) overflow-free."""
    eta = np.asarray(eta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    small = eta < _ETA_SWITCH
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        t_small = 2.0 * np.sinh(0.5 * eta) ** 2 + 2.0 * np.sin(0.5 * xi) ** 2
        sech = 1.0 / np.cosh(eta)
        denom = 1.0 - np.cos(xi) * sech
        rho_small = np.sinh(eta) / t_small
        rho_large = np.tanh(eta) / denom
        z_small = np.sin(xi) / t_small
        z_large = np.sin(xi) * sech / denom
        inv_small = 1.0 / t_small
        inv_large = sech / denom
    return (
        np.where(small, rho_small, rho_large),
        np.where(small, z_small, z_large),
        np.where(small, inv_small, inv_large),
    )


def _check_finite_point(eta, xi):
    at_inf = (np.asarray(eta) == 0.0) & (np.cos(xi) == 1.0)
    if np.any(at_inf):
        raise PointAtInfinityError("eta = 0, xi = 0 is the point at infinity of the toroidal chart")


def to_cartesian(p: ToroidalPoint, a: float = 1.0) -> CartesianPoint:
    a = check_scale(a)
    _check_finite_point(p.eta, p.xi)
    rho, z, _ = _radial_parts(p.eta, p.xi)
    phi = np.asarray(p.phi, dtype=float)
    return CartesianPoint(a * rho * np.cos(phi), a * rho * np.sin(phi), a * z)


def to_toroidal(c: CartesianPoint, a: float = 1.0, warn: bool = True) -> ToroidalPoint:
    """Inverse chart.

    eta = ln(d1/d2) from the distances d1, d2 to the nearest and farthest
    points of the focal ring.  On the ring itself eta is +inf (never NaN);
    within ``NEAR_RING_TOL * a`` of it a NearFocalRingWarning is issued since
    eta is then only known to the absolute accuracy of the input coordinates.
    On the axis phi is canonicalized to 0.
    """
    a = check_scale(a)
    x = np.asarray(c.x, dtype=float)
    y = np.asarray(c.y, dtype=float)
    z = np.asarray(c.z, dtype=float)
    rho = np.hypot(x, y)
    d2sq = (rho - a) ** 2 + z**2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d2sq > 0, 4.0 * a * rho / d2sq, np.inf)
    eta = 0.5 * np.log1p(ratio)
    xi = np.arctan2(2.0 * a * z, x**2 + y**2 + z**2 - a**2)
    # xi in [-pi, pi)
    xi = np.where(xi >= np.pi, xi - 2.0 * np.pi, xi)
    phi = np.where(rho > 0, np.mod(np.arctan2(y, x), 2.0 * np.pi), 0.0)
    if warn and np.any(np.sqrt(d2sq) < NEAR_RING_TOL * a):
        warnings.warn(
            "point(s) on or near the focal ring: eta has reduced precision (inf on the ring)",
            NearFocalRingWarning,
            stacklevel=2,
        )
    return ToroidalPoint(eta, xi, phi)


def focal_ring_distance(c: CartesianPoint, a: float = 1.0) -> np.ndarray:
    rho = np.hypot(np.asarray(c.x, dtype=float), np.asarray(c.y, dtype=float))
    return np.hypot(rho - a, np.asarray(c.z, dtype=float))


def grad_scale_factors(p: ToroidalPoint, a: float = 1.0):
    """Scale factors (h_eta, h_xi, h_phi) = (a/tau, a/tau, a sinh(eta)/tau).

    h_phi vanishes on the axis eta = 0; use :func:`on_axis` to detect it.
    """
    a = check_scale(a)
    _check_finite_point(p.eta, p.xi)
    rho, _, inv_tau = _radial_parts(p.eta, p.xi)
    h = a * inv_tau
    return h, h, a * rho


def on_axis(p: ToroidalPoint) -> np.ndarray:
    return np.asarray(p.eta) == 0.0


def volume_weight(p: ToroidalPoint, a: float = 1.0) -> np.ndarray:
    """d^3x = (a/tau)^3 sinh(eta) d(eta) d(xi) d(phi)."""
    h, _, h_phi = grad_scale_factors(p, a)
    return h * h * h_phi


def frame(p: ToroidalPoint):
    """Orthonormal frame (e_eta, e_xi, e_phi), each with shape (..., 3) in Cartesian components."""
    eta = np.asarray(p.eta, dtype=float)
    xi = np.asarray(p.xi, dtype=float)
    phi = np.asarray(p.phi, dtype=float)
    eta, xi, phi = np.broadcast_arrays(eta, xi, phi)
    _check_finite_point(eta, xi)
    _, _, inv_tau = _radial_parts(eta, xi)
    with np.errstate(over="ignore", invalid="ignore"):
        # cosh*inv_tau and sinh*inv_tau stay bounded where cosh overflows
        ch_t = np.where(eta < _ETA_SWITCH, np.cosh(eta) * inv_tau, 1.0 / (1.0 - np.cos(xi) / np.cosh(eta)))
        sh_t = np.where(eta < _ETA_SWITCH, np.sinh(eta) * inv_tau, np.tanh(eta) / (1.0 - np.cos(xi) / np.cosh(eta)))
    cx, sx = np.cos(xi), np.sin(xi)
    cp, sp = np.cos(phi), np.sin(phi)
    radial_eta = inv_tau - cx * ch_t
    e_eta = np.stack([radial_eta * cp, radial_eta * sp, -sx * sh_t], axis=-1)
    radial_xi = -sx * sh_t
    e_xi = np.stack([radial_xi * cp, radial_xi * sp, cx * ch_t - inv_tau], axis=-1)
    e_phi = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return e_eta, e_xi, e_phi


def cartesian_gradient(p: ToroidalPoint, a, d_eta, d_xi, d_phi):
    """Cartesian gradient from coordinate partial derivatives of a scalar.

    Works for complex scalars.  Axis points (h_phi = 0) must be excluded by the
    caller or carry d_phi = 0.
    """
    h, _, h_phi = grad_scale_factors(p, a)
    e_eta, e_xi, e_phi = frame(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_phi = np.where(h_phi > 0, np.asarray(d_phi) / np.where(h_phi > 0, h_phi, 1.0), 0.0)
    g_eta = np.asarray(d_eta) / h
    g_xi = np.asarray(d_xi) / h
    return g_eta[..., None] * e_eta + g_xi[..., None] * e_xi + g_phi[..., None] * e_phi
