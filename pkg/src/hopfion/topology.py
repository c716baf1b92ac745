"""CP^1 lift, Abelian potential, Hopf charges and Vakulenko-Kapitansky bounds.

Conventions
-----------
The lift used here satisfies ``n = Z^dagger sigma Z`` for the ansatz field
``u = f exp(i(m xi + n phi))``:

    Z1 = sqrt(1 - s) exp(-i m xi),   Z2 = sqrt(s) exp(+i n phi)

which is the complex conjugate of the four-component construction from g1, g2
(see :func:`phi_components`); that construction reproduces the reflected
field (n1, -n2, n3).  Both give the same Hopf charge.

With ``A_k = -Im(Z^dagger d_k Z)`` one has ``curl A = -(1/2) n . (d n x d n)``
and the Hopf charge ``Q = (1/4 pi^2) int A . curl A d^3x`` evaluates to
``+m n`` for the right-handed orientation of (x, y, z).  :func:`hopf_analytic`
keeps the closed expression ``-n m``; the two differ by the orientation
convention only.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .ansatz import ClosedFormProfile, HopfionSolution, ModelSpec, SpecError, validate_spec
from .energetics import FOUR_PI2, energy_closed, eta_nodes
from .geometry import ToroidalPoint, frame, grad_scale_factors, volume_weight

VK_PREFACTOR = FOUR_PI2 * 4.0 * 2.0**0.75


@dataclass(frozen=True)
class CP1Lift:
    Z1: np.ndarray
    Z2: np.ndarray

    def norm2(self):
        return np.abs(self.Z1) ** 2 + np.abs(self.Z2) ** 2

    def to_n(self) -> np.ndarray:
        """n = Z^dagger sigma Z."""
        w = np.conj(self.Z1) * self.Z2
        return np.stack([2.0 * w.real, 2.0 * w.imag, np.abs(self.Z1) ** 2 - np.abs(self.Z2) ** 2], axis=-1)


def g_functions(eta, q: float):
    """(g1^2, g2^2) = (cosh - sqrt(q^2 + sinh^2), sqrt(1 + sinh^2/q^2) - cosh), cancellation-free."""
    q = abs(float(q))
    if not (0.0 < q < 1.0):
        raise SpecError(f"g-functions are defined on the 0 < |q| < 1 branch, got |q| = {q}")
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be nonnegative")
    sh, ch = np.sinh(eta), np.cosh(eta)
    rw = np.sqrt(q * q + sh * sh)
    g1 = (1.0 - q * q) / (ch + rw)
    g2 = sh * sh * (1.0 - q * q) / (q * (rw + q * ch))
    return g1, g2


def _lift_amplitudes(sol: HopfionSolution, i: int, eta):
    """(|Z1|^2, |Z2|^2) = (1 - s, s); from g1, g2 on the closed-form branch."""
    prof = sol.profiles[i]
    if isinstance(prof, ClosedFormProfile):
        g1, g2 = g_functions(eta, prof.q)
        tot = g1 + g2
        return g1 / tot, g2 / tot
    return prof.one_minus_s(eta), prof.s(eta)


def phi_components(sol: HopfionSolution, i: int, p: ToroidalPoint) -> np.ndarray:
    """The four real objects (Phi1..Phi4) with (Phi3, Phi4) winding as -n phi, shape (..., 4)."""
    r1, r2 = _lift_amplitudes(sol, i, p.eta)
    m, n = sol.spec.m[i], sol.spec.n[i]
    a1, a2 = np.sqrt(r1), np.sqrt(r2)
    xi, phi = np.asarray(p.xi), np.asarray(p.phi)
    return np.stack(np.broadcast_arrays(a1 * np.cos(m * xi), a1 * np.sin(m * xi), a2 * np.cos(n * phi), -a2 * np.sin(n * phi)), axis=-1)


def cp1_lift(sol: HopfionSolution, i: int, p: ToroidalPoint) -> CP1Lift:
    r1, r2 = _lift_amplitudes(sol, i, p.eta)
    m, n = sol.spec.m[i], sol.spec.n[i]
    z1 = np.sqrt(r1) * np.exp(-1j * m * np.asarray(p.xi, dtype=float))
    z2 = np.sqrt(r2) * np.exp(1j * n * np.asarray(p.phi, dtype=float))
    z1, z2 = np.broadcast_arrays(z1, z2)
    return CP1Lift(z1, z2)


def abelian_potential(sol: HopfionSolution, i: int, p: ToroidalPoint) -> np.ndarray:
    """A = -Im(Z^dagger grad Z) in Cartesian components, shape (..., 3).

    Only the xi and phi directions contribute: A = (m |Z1|^2 / h_xi) e_xi - (n |Z2|^2 / h_phi) e_phi.
    """
    eta = np.asarray(p.eta, dtype=float)
    if np.any(eta <= 0.0) or np.any(~np.isfinite(eta)):
        raise ValueError("abelian_potential: axis (eta = 0) and focal ring (eta = inf) are coordinate-singular")
    r1, r2 = _lift_amplitudes(sol, i, eta)
    h, _, h_phi = grad_scale_factors(p, sol.spec.a)
    _, e_xi, e_phi = frame(p)
    m, n = sol.spec.m[i], sol.spec.n[i]
    return (m * r1 / h)[..., None] * e_xi - (n * r2 / h_phi)[..., None] * e_phi


def hopf_analytic(m: int, n: int) -> int:
    """Closed-form charge -n m of the ansatz (boundary-term evaluation)."""
    return -int(n) * int(m)


def _d_eta(fn, eta):
    """4th-order central difference with a step relative to eta."""
    d = 1e-3 * np.minimum(eta, 1.0)
    return (8.0 * (fn(eta + d) - fn(eta - d)) - (fn(eta + 2 * d) - fn(eta - 2 * d))) / (12.0 * d)


def _spectral_derivative(a, axis, length=2.0 * np.pi):
    npts = a.shape[axis]
    k = np.fft.fftfreq(npts, d=length / npts) * 2.0 * np.pi
    if npts % 2 == 0:
        k[npts // 2] = 0.0
    shape = [1] * a.ndim
    shape[axis] = npts
    return np.fft.ifft(np.fft.fft(a, axis=axis) * (1j * k).reshape(shape), axis=axis)


def hopf_numeric(sol: HopfionSolution, i: int, resolution: tuple[int, int, int] = (128, 64, 64), eta_max: float = 20.0) -> float:
    """(1/4 pi^2) int A . curl A d^3x on an (eta, xi, phi) product grid.

    Gauss-Legendre in eta; xi and phi derivatives are spectral on periodic
    grids and the eta derivative is a finite difference of the lift, so the
    potential is never differentiated analytically.
    """
    n_eta, n_xi, n_phi = resolution
    eta, w_eta = eta_nodes(n_eta, eta_max)
    xi = -np.pi + 2.0 * np.pi * np.arange(n_xi) / n_xi
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    E, X, P = np.meshgrid(eta, xi, phi, indexing="ij")
    pts = ToroidalPoint(E, X, P)

    def lift_at(e):
        L = cp1_lift(sol, i, ToroidalPoint(e, X, P))
        return np.stack([L.Z1, L.Z2])

    Z = lift_at(E)
    dZ_eta = _d_eta(lift_at, E)
    dZ_xi = _spectral_derivative(Z, axis=2)
    dZ_phi = _spectral_derivative(Z, axis=3)
    h, _, h_phi = grad_scale_factors(pts, sol.spec.a)
    dZ = np.stack([dZ_eta / h, dZ_xi / h, dZ_phi / h_phi])
    flat = Z.reshape(2, -1)
    dflat = np.ascontiguousarray(dZ.reshape(3, 2, -1))
    dens = kernels.hopf_density(np.ascontiguousarray(flat), dflat).reshape(E.shape)
    dens = dens * volume_weight(pts, sol.spec.a)
    cell = (2.0 * np.pi / n_xi) * (2.0 * np.pi / n_phi)
    return float(np.einsum("i,ijk->", w_eta, dens) * cell / (4.0 * np.pi**2))


def vk_bound(spec: ModelSpec, charges: Sequence[float]) -> float:
    """(2 pi)^2 4 2^(3/4) prod |Q_i|^alpha_i."""
    if len(charges) != spec.N:
        raise ValueError(f"need {spec.N} charges, got {len(charges)}")
    if any(q == 0 for q in charges):
        warnings.warn("zero topological charge: the bound degenerates to 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return VK_PREFACTOR * math.prod(abs(q) ** al for q, al in zip(charges, spec.alpha))


def sum_model_vk_bound(charges: Sequence[float]) -> float:
    """Bound for the non-interacting sum of single-field models."""
    return VK_PREFACTOR * math.fsum(abs(q) ** 0.75 for q in charges)


def analytic_charges(spec: ModelSpec) -> tuple[int, ...]:
    return tuple(hopf_analytic(m, n) for m, n in zip(spec.m, spec.n))


def vk_ratio(spec: ModelSpec) -> float:
    return energy_closed(spec) / vk_bound(spec, analytic_charges(spec))


def analytic_vk_ratio(q: float) -> float:
    q = abs(q)
    return math.sqrt(1.0 + q) / (math.sqrt(2.0) * q**0.25)


def vk_inequality_margin(q) -> np.ndarray:
    """sqrt(1+|q|) sqrt|q| - sqrt(2) |q|^(3/4), nonnegative everywhere."""
    q = np.abs(np.asarray(q, dtype=float))
    return np.sqrt(1.0 + q) * np.sqrt(q) - np.sqrt(2.0) * q**0.75


@dataclass
class ScalingCheck:
    lam: float
    energy_ratio: float
    expected: float
    vk_ratio_base: float
    vk_ratio_scaled: float
    integral_windings: bool

    @property
    def deviation(self) -> float:
        return abs(self.energy_ratio / self.expected - 1.0)


def charge_scaling_check(spec: ModelSpec, lam: float) -> ScalingCheck:
    """Scale every charge by lam via m, n -> sqrt(lam) m, sqrt(lam) n (q fixed)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    r = math.sqrt(lam)
    m2 = [mi * r for mi in spec.m]
    n2 = [ni * r for ni in spec.n]
    integral = all(abs(x - round(x)) < 1e-12 for x in m2 + n2)
    if integral:
        scaled = validate_spec(spec.alpha, [round(x) for x in m2], [round(x) for x in n2], spec.a)
        e2 = energy_closed(scaled)
        vk2 = vk_ratio(scaled)
    else:
        warnings.warn(
            f"lambda = {lam} gives non-integral windings; checking the energy formula only",
            RuntimeWarning,
            stacklevel=2,
        )
        scaled = ModelSpec(spec.alpha, tuple(m2), tuple(n2), spec.a)
        e2 = energy_closed(scaled)
        charges = [-a * b for a, b in zip(m2, n2)]
        vk2 = e2 / vk_bound(scaled, charges)
    e1 = energy_closed(spec)
    return ScalingCheck(lam, e2 / e1, lam**0.75, vk_ratio(spec), vk2, integral)


class Interaction(enum.Enum):
    ATTRACTIVE = "attractive"
    NONINTERACTING = "noninteracting"
    REPULSIVE = "repulsive"


def interaction_class(alpha: float) -> Interaction:
    """alpha < 1 attractive, alpha = 1 non-interacting, alpha > 1 repulsive."""
    if alpha < 1.0:
        return Interaction.ATTRACTIVE
    if alpha > 1.0:
        return Interaction.REPULSIVE
    return Interaction.NONINTERACTING


@dataclass
class TopologyReport:
    charges_analytic: tuple[int, ...]
    charges_numeric: tuple[float, ...] | None
    vk_bound: float
    vk_ratio: float | None
    interactions: tuple[Interaction, ...] = field(default=())


def topology_report(sol: HopfionSolution, resolution: tuple[int, int, int] | None = None) -> TopologyReport:
    spec = sol.spec
    qa = analytic_charges(spec)
    qn = None
    if resolution is not None:
        qn = tuple(hopf_numeric(sol, i, resolution) for i in range(spec.N))
    bound = vk_bound(spec, qa)
    ratio = energy_closed(spec) / bound if spec.qratio.closed_form else None
    return TopologyReport(qa, qn, bound, ratio, tuple(interaction_class(a) for a in spec.alpha))


def hopf_density_axis_safe(sol: HopfionSolution, i: int, p: ToroidalPoint) -> np.ndarray:
    """A . curl A of field i in closed form, m n (tau/a)^3 s'/sinh(eta); finite on the axis."""
    from .ansatz import ETA_MAX

    eta = np.minimum(np.asarray(p.eta, dtype=float), ETA_MAX)
    pc = ToroidalPoint(eta, p.xi, p.phi)
    h, _, _ = grad_scale_factors(pc, sol.spec.a)
    return sol.spec.m[i] * sol.spec.n[i] * sol.profiles[i].ds_over_sinh(eta) / h**3 * np.ones(np.broadcast(p.eta, p.xi, p.phi).shape)
