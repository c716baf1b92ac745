"""K-vectors, equation-of-motion currents and finite-difference residuals.

Static fields only.  All contractions are positive (Euclidean) spatial dot
products, so ``K . grad u*`` is the nonnegative quantity entering the energy
density.  Gradients are Cartesian components.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .ansatz import HopfionSolution, phase
from .geometry import CartesianPoint, ToroidalPoint, cartesian_gradient, grad_scale_factors, to_cartesian, to_toroidal

POSITIVITY_TOL = 1e-10
DEFAULT_STEP = 1e-4
MIN_STEP = 1e-7


class SingularPointError(ValueError):
    """A fractional power would act on a non-positive or complex base."""


@dataclass(frozen=True)
class FieldJet:
    u: np.ndarray
    grad: np.ndarray  # (..., 3) complex
    s: np.ndarray | None = None  # 1/(1+|u|^2) if known more accurately than from u

    def inv1p(self):
        if self.s is not None:
            return self.s
        return 1.0 / (1.0 + np.abs(self.u) ** 2)


@dataclass
class ResidualReport:
    """Normalized divergence residual over a point sample.

    ``max_abs_residual`` uses the Richardson combination of the central
    differences at ``step`` and ``step/2``; ``raw_residual`` and
    ``refined_residual`` are the plain second-order values at those steps.
    """

    max_abs_residual: float
    sample_points: int
    worst_point: ToroidalPoint
    step: float = DEFAULT_STEP
    raw_residual: float | None = None
    refined_residual: float | None = None

    @property
    def observed_order(self) -> float | None:
        if not self.raw_residual or not self.refined_residual:
            return None
        return float(np.log2(self.raw_residual / self.refined_residual))


def cdot(a, b):
    """Bilinear (non-conjugating) dot over the last axis."""
    return np.sum(a * b, axis=-1)


def jet(sol: HopfionSolution, i: int, p: ToroidalPoint) -> FieldJet:
    eta = np.asarray(p.eta, dtype=float)
    if np.any(eta <= 0.0):
        raise ValueError("jets are not defined on the axis eta = 0")
    spec = sol.spec
    prof = sol.profiles[i]
    f = prof.f(eta)
    df = prof.df(eta)
    e = np.exp(1j * phase(spec, i, p))
    u = f * e
    grad = cartesian_gradient(p, spec.a, df * e, 1j * spec.m[i] * f * e, 1j * spec.n[i] * f * e)
    return FieldJet(u, grad, np.broadcast_to(prof.s(eta), np.shape(u)))


def jets(sol: HopfionSolution, p: ToroidalPoint) -> list[FieldJet]:
    return [jet(sol, i, p) for i in range(sol.spec.N)]


def k_vector(j: FieldJet) -> np.ndarray:
    """K = (grad u* . grad u) grad u - (grad u . grad u) grad u*."""
    g = j.grad
    gc = g.conj()
    return cdot(gc, g)[..., None] * g - cdot(g, g)[..., None] * gc


def energy_factor(j: FieldJet, check: bool = True) -> np.ndarray:
    """K . grad u*, asserted real and positive before it is raised to fractional powers."""
    val = cdot(k_vector(j), j.grad.conj())
    if check:
        scale = np.maximum(np.abs(val), np.finfo(float).tiny)
        if np.any(np.abs(val.imag) > POSITIVITY_TOL * scale):
            raise SingularPointError("K . grad u* has a non-negligible imaginary part")
        if np.any(val.real <= 0.0):
            raise SingularPointError("K . grad u* vanishes; the weight (K . grad u*)^(alpha-1) is singular")
    return val.real


def weighted_k(js: Sequence[FieldJet], alpha: Sequence[float], j: int) -> np.ndarray:
    """Product-weighted current for field j from the jets of all fields."""
    w = 1.0
    for i, (ji, al) in enumerate(zip(js, alpha)):
        kd = energy_factor(ji)
        s = ji.inv1p()
        if i == j:
            w = w * kd ** (al - 1.0) * s ** (4.0 * al - 2.0)
        else:
            w = w * kd**al * s ** (4.0 * al)
    return np.asarray(w)[..., None] * k_vector(js[j])


def cal_k(sol: HopfionSolution, j: int, p: ToroidalPoint) -> np.ndarray:
    return weighted_k(jets(sol, p), sol.spec.alpha, j)


def cal_k_cartesian(sol: HopfionSolution, j: int, xyz: np.ndarray) -> np.ndarray:
    return cal_k(sol, j, to_toroidal(CartesianPoint.from_array(xyz), sol.spec.a))


# --------------------------------------------------------------------------- residuals


def sample_region(n: int = 100, eta_range=(0.2, 2.5), seed: int = 0) -> ToroidalPoint:
    rng = np.random.default_rng(seed)
    return ToroidalPoint(
        rng.uniform(*eta_range, n),
        rng.uniform(-np.pi, np.pi, n),
        rng.uniform(0.0, 2.0 * np.pi, n),
    )


def _divergence(vec_fn: Callable[[np.ndarray], np.ndarray], xyz: np.ndarray, h: float) -> np.ndarray:
    div = 0.0
    for k in range(3):
        dx = np.zeros(3)
        dx[k] = h
        div = div + (vec_fn(xyz + dx)[..., k] - vec_fn(xyz - dx)[..., k]) / (2.0 * h)
    return div


def _normalized_residuals(vec_fn, p: ToroidalPoint, a: float, h: float):
    """Per-point |div V| * (a/tau) / |V| at steps h, h/2 and their Richardson combination."""
    if h < MIN_STEP * a:
        raise ValueError(f"finite-difference step {h} is below {MIN_STEP} a; roundoff would dominate")
    xyz = to_cartesian(p, a).as_array()
    d1 = _divergence(vec_fn, xyz, h)
    d2 = _divergence(vec_fn, xyz, h / 2)
    scale = grad_scale_factors(p, a)[0] / np.linalg.norm(vec_fn(xyz), axis=-1)
    return np.abs(d1) * scale, np.abs(d2) * scale, np.abs((4.0 * d2 - d1) / 3.0) * scale


def _report(vec_fn, p: ToroidalPoint, a: float, step: float | None) -> ResidualReport:
    h = (DEFAULT_STEP if step is None else step) * a
    raw, refined, extrap = _normalized_residuals(vec_fn, p, a, h)
    worst = int(np.argmax(extrap))
    wp = ToroidalPoint(np.asarray(p.eta)[worst], np.asarray(p.xi)[worst], np.asarray(p.phi)[worst])
    return ResidualReport(float(extrap[worst]), int(extrap.size), wp, h / a, float(raw.max()), float(refined.max()))


def eom_residual(
    sol: HopfionSolution,
    j: int,
    points: ToroidalPoint | None = None,
    step: float | None = None,
) -> ResidualReport:
    """max |div K_j| * (a/tau) / |K_j| over the sample, by central differences.

    The local coordinate length a/tau makes the residual dimensionless and
    independent of where the point sits relative to the focal ring.
    """
    p = sample_region() if points is None else points
    return _report(lambda x: cal_k_cartesian(sol, j, x), p, sol.spec.a, step)


@dataclass(frozen=True)
class Generator:
    """Scalar G of the fields with its partials dG/du_i, dG/du_i*."""

    name: str
    du: Callable[[Sequence[np.ndarray]], np.ndarray]
    duc: Callable[[Sequence[np.ndarray]], np.ndarray]


def g_linear(i: int) -> Generator:
    return Generator(f"u{i + 1}", lambda u: np.ones_like(u[i]), lambda u: np.zeros_like(u[i]))


def g_abs2(i: int) -> Generator:
    return Generator(f"|u{i + 1}|^2", lambda u: np.conj(u[i]), lambda u: u[i])


def g_cross(i: int, j: int) -> Generator:
    """G = u_i u_j*, differentiated with respect to field i."""
    return Generator(f"u{i + 1} u{j + 1}*", lambda u: np.conj(u[j]), lambda u: np.zeros_like(u[j]))


def current(sol: HopfionSolution, i: int, G: Generator, xyz: np.ndarray) -> np.ndarray:
    """J = K_i dG/du_i - K_i* dG/du_i*."""
    p = to_toroidal(CartesianPoint.from_array(xyz), sol.spec.a)
    js = jets(sol, p)
    K = weighted_k(js, sol.spec.alpha, i)
    u = [jj.u for jj in js]
    return K * np.asarray(G.du(u))[..., None] - K.conj() * np.asarray(G.duc(u))[..., None]


def current_divergence(
    sol: HopfionSolution,
    i: int,
    G: Generator,
    points: ToroidalPoint | None = None,
    step: float | None = None,
) -> ResidualReport:
    p = sample_region() if points is None else points
    return _report(lambda x: current(sol, i, G, x), p, sol.spec.a, step)
