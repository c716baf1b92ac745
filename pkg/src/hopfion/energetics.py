"""Static energy by four routes: closed form, reduced 1-D integral, profile
integral, and 3-D grid quadrature of the energy density."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from . import kernels
from .ansatz import (
    ETA_MAX,
    HopfionSolution,
    IntegrationConstants,
    ModelSpec,
    SpecError,
    boundary_constants,
    g_integrand,
    integration_constants,
    validate_spec,
)
from .dynamics import jet
from .geometry import ToroidalPoint, grad_scale_factors, volume_weight

FOUR_PI2 = (2.0 * math.pi) ** 2
# (2 pi)^2 * 8 * 2^(3/4), equal to (2 pi)^2 * 8^(3/4) * 4^(3/4)
REDUCED_PREFACTOR = FOUR_PI2 * 8.0 * 2.0**0.75
CLOSED_PREFACTOR = FOUR_PI2 * 4.0 * 2.0**0.25
_BREAKS = (0.0, 0.5, 2.0, 6.0, 15.0, ETA_MAX)


class QuadratureError(RuntimeError):
    pass


@dataclass
class EnergyReport:
    e_closed: float | None
    e_reduced: float
    e_profile: float
    e_grid: float | None = None

    def spread(self, other: str, reference: str = "e_closed") -> float | None:
        ref, val = getattr(self, reference), getattr(self, other)
        if ref is None or val is None:
            return None
        return abs(val - ref) / abs(ref)

    def spreads(self) -> dict[str, float | None]:
        ref = "e_closed" if self.e_closed is not None else "e_reduced"
        return {name: self.spread(name, ref) for name in ("e_reduced", "e_profile", "e_grid") if name != ref}


def energy_closed(spec: ModelSpec) -> float:
    """(2 pi)^2 4 2^(1/4) prod|m_i|^(2 alpha_i) sqrt(1+|q|) sqrt(|q|)."""
    qr = spec.qratio
    if not qr.is_constant:
        raise SpecError("closed-form energy needs a common n_i^2/m_i^2")
    q = qr.abs_q
    if not (0.0 < q < 1.0):
        raise SpecError(f"closed-form energy needs 0 < |q| < 1, got {q}")
    return CLOSED_PREFACTOR * spec.m_product() * math.sqrt((1.0 + q) * q)


def _quad_pieces(fn, rel=1e-12):
    total, err = 0.0, 0.0
    for lo, hi in zip(_BREAKS[:-1], _BREAKS[1:]):
        val, e = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=rel, limit=400)
        total += val
        err += e

    def in_t(t):
        return fn(-math.log(t)) / t

    val, e = integrate.quad(in_t, 0.0, math.exp(-ETA_MAX), epsabs=0.0, epsrel=rel, limit=100)
    total += val
    err += e
    return total, err


def reduced_integral(spec: ModelSpec) -> tuple[float, float]:
    """int_0^inf g = int sinh prod(m^2 sinh^2 + n^2)^(-2 alpha) d eta, with its error estimate."""
    return _quad_pieces(lambda e: float(g_integrand(spec, e)))


def energy_reduced(spec: ModelSpec, k: Sequence[float] | IntegrationConstants | None = None, rtol: float = 1e-9) -> float:
    """(2 pi)^2 8 2^(3/4) prod k_i^(4 alpha_i) times the reduced integral."""
    if k is None:
        k = integration_constants(spec) if spec.qratio.is_constant else boundary_constants(spec)
    if isinstance(k, IntegrationConstants):
        k = k.k
    if any(not (kk > 0) for kk in k):
        raise SpecError("k_i must be positive")
    c = math.prod(kk ** (4.0 * al) for kk, al in zip(k, spec.alpha))
    val, err = reduced_integral(spec)
    if not (val > 0 and err <= rtol * val):
        probe = [(e, float(g_integrand(spec, e))) for e in (1e-3, 0.1, 1.0, 5.0, 20.0)]
        raise QuadratureError(f"reduced energy integral did not converge: {val} +- {err}; integrand samples {probe}")
    return REDUCED_PREFACTOR * c * val


def profile_density(sol: HopfionSolution, eta) -> np.ndarray:
    """sinh(eta) prod_i (s_i'^2 M_i / 4)^alpha_i, M_i = m_i^2 + n_i^2/sinh^2."""
    eta = np.asarray(eta, dtype=float)
    out = np.sinh(eta)
    for prof, al, mi, ni in zip(sol.profiles, sol.spec.alpha, sol.spec.m, sol.spec.n):
        ds = prof.ds(eta)
        dss = prof.ds_over_sinh(eta)
        out = out * (0.25 * (mi * mi * ds * ds + ni * ni * dss * dss)) ** al
    return out


def energy_profile(sol: HopfionSolution) -> float:
    """Energy from the shape functions themselves (their derivatives enter directly)."""
    val, _ = _quad_pieces(lambda e: float(profile_density(sol, e)), rel=1e-11)
    return REDUCED_PREFACTOR * val


def energy_density(sol: HopfionSolution, p: ToroidalPoint) -> np.ndarray:
    """8^(3/4) prod (K_i . grad u_i*)^alpha_i / (1+|u_i|^2)^(4 alpha_i) at points p."""
    shape = np.broadcast(p.eta, p.xi, p.phi).shape
    pf = ToroidalPoint(*(np.broadcast_to(np.asarray(c, dtype=float), shape).ravel() for c in (p.eta, p.xi, p.phi)))
    js = [jet(sol, i, pf) for i in range(sol.spec.N)]
    grad = np.ascontiguousarray(np.stack([j.grad for j in js]))
    s = np.ascontiguousarray(np.stack([np.asarray(j.s, dtype=float) for j in js]))
    dens = kernels.energy_density(grad, s, np.asarray(sol.spec.alpha, dtype=float))
    return dens.reshape(shape)


def eta_nodes(n: int, eta_max: float = 20.0):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * eta_max * (x + 1.0), 0.5 * eta_max * w


def energy_grid(sol: HopfionSolution, n_eta: int = 256, n_xi: int = 64, n_phi: int = 8, eta_max: float = 20.0) -> float:
    """3-D product quadrature: Gauss-Legendre in eta, periodic trapezoid in xi and phi."""
    eta, w_eta = eta_nodes(n_eta, eta_max)
    xi = -np.pi + 2.0 * np.pi * np.arange(n_xi) / n_xi
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    E, X, P = np.meshgrid(eta, xi, phi, indexing="ij")
    pts = ToroidalPoint(E, X, P)
    dens = energy_density(sol, pts) * volume_weight(pts, sol.spec.a)
    cell = (2.0 * np.pi / n_xi) * (2.0 * np.pi / n_phi)
    return float(np.einsum("i,ijk->", w_eta, dens) * cell)


def energy_report(sol: HopfionSolution, grid: tuple[int, int, int] | None = None) -> EnergyReport:
    spec = sol.spec
    closed = energy_closed(spec) if spec.qratio.closed_form else None
    k = sol.constants if sol.constants is not None else None
    rep = EnergyReport(closed, energy_reduced(spec, k), energy_profile(sol))
    if grid is not None:
        rep.e_grid = energy_grid(sol, *grid)
    return rep


def energy_sum_model(windings: Iterable[tuple[int, int]]) -> float:
    """Sum of independent single-field (alpha = 3/4) closed-form energies."""
    return math.fsum(energy_closed(validate_spec([0.75], [m], [n])) for m, n in windings)


def energy_density_axis_safe(sol: HopfionSolution, p: ToroidalPoint) -> np.ndarray:
    """Same density written as 8^(3/4) (tau/a)^3 prod (m^2 s'^2 + n^2 (s'/sinh)^2)^alpha.

    Finite on the axis; eta is clipped to ETA_MAX so focal-ring points return
    the ring limit to within exp(-2 ETA_MAX).
    """
    eta = np.minimum(np.asarray(p.eta, dtype=float), ETA_MAX)
    pc = ToroidalPoint(eta, p.xi, p.phi)
    h, _, _ = grad_scale_factors(pc, sol.spec.a)
    out = kernels.EIGHT_34 / h**3
    for prof, al, mi, ni in zip(sol.profiles, sol.spec.alpha, sol.spec.m, sol.spec.n):
        ds = prof.ds(eta)
        dss = prof.ds_over_sinh(eta)
        out = out * (mi * mi * ds * ds + ni * ni * dss * dss) ** al
    return out
