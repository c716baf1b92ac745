"""Model parameters, shape functions and the toroidal field ansatz.

Each field is ``u_i = f_i(eta) exp(i (m_i xi + n_i phi))``.  Shape functions
are stored through ``s(eta) = 1 / (1 + f(eta)**2)``, which lives in [0, 1]
and goes from 0 on the axis (f = inf, n = north pole) to 1 on the focal ring
(f = 0, n = south pole).

The reduced field equation for every field reads

    -f_j f_j' / (1 + f_j^2)^2 = (C / k_j) * g(eta),   C = prod_i k_i^(4 alpha_i)
    g(eta) = sinh(eta) * prod_i (m_i^2 sinh^2(eta) + n_i^2)^(-2 alpha_i)

so that ``s_j' = 2 (C / k_j) g`` and ``s_j = l_j + 2 (C / k_j) G(eta)`` with
``G`` an antiderivative of ``g``.  The antiderivative is fixed by its value
at infinity, ``G(inf) = anchor``; ``G(eta) = anchor - int_eta^inf g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .geometry import ToroidalPoint, check_scale

SCALING_SUM = 0.75
SUM_TOL = 1e-12
ETA_MIN = 1e-6
ETA_MAX = 30.0


class SpecError(ValueError):
    """Invalid model parameters."""


class ProfileError(ValueError):
    """Integration constants admit no profile with 0 <= s <= 1."""


@dataclass(frozen=True)
class ModelSpec:
    alpha: tuple[float, ...]
    m: tuple[int, ...]
    n: tuple[int, ...]
    a: float = 1.0

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> tuple[float, ...]:
        return tuple(ni / mi for mi, ni in zip(self.m, self.n))

    @property
    def qratio(self) -> "QRatio":
        return QRatio.from_spec(self)

    def with_scale(self, a: float) -> "ModelSpec":
        return ModelSpec(self.alpha, self.m, self.n, check_scale(a))

    def m_product(self) -> float:
        """prod_i |m_i|^(2 alpha_i)."""
        return math.prod(abs(mi) ** (2.0 * al) for mi, al in zip(self.m, self.alpha))


@dataclass(frozen=True)
class QRatio:
    q: tuple[float, ...]
    is_constant: bool

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> "QRatio":
        q = spec.q
        q2 = [x * x for x in q]
        const = all(math.isclose(v, q2[0], rel_tol=1e-14, abs_tol=0.0) for v in q2)
        return cls(q, const)

    @property
    def abs_q(self) -> float:
        """|q| of the constant branch."""
        if not self.is_constant:
            raise SpecError("q_i^2 differ between fields; no single |q|")
        return abs(self.q[0])

    @property
    def closed_form(self) -> bool:
        return self.is_constant and 0.0 < abs(self.q[0]) < 1.0


def validate_spec(alpha, m, n, a: float = 1.0) -> ModelSpec:
    """Build a ModelSpec, enforcing sum(alpha) = 3/4 and nonzero windings."""
    alpha = tuple(float(x) for x in np.atleast_1d(alpha))
    try:
        m_i = tuple(_as_int(x, "m") for x in np.atleast_1d(m))
        n_i = tuple(_as_int(x, "n") for x in np.atleast_1d(n))
    except TypeError as exc:
        raise SpecError(str(exc)) from None
    if not alpha:
        raise SpecError("at least one field is required")
    if not (len(alpha) == len(m_i) == len(n_i)):
        raise SpecError(f"alpha, m, n must have equal lengths; got {len(alpha)}, {len(m_i)}, {len(n_i)}")
    if not all(np.isfinite(alpha)):
        raise SpecError("alpha entries must be finite")
    total = math.fsum(alpha)
    if abs(total - SCALING_SUM) > SUM_TOL:
        raise SpecError(
            f"scaling-instability violation: sum(alpha) = {total!r} but the scaling condition requires 3/4"
        )
    zero = [i for i, (mi, ni) in enumerate(zip(m_i, n_i)) if mi == 0 or ni == 0]
    if zero:
        raise SpecError(
            f"trivial topology not admitted by the boundary conditions: zero winding in field(s) {zero}"
        )
    try:
        a = check_scale(a)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return ModelSpec(alpha, m_i, n_i, a)


def _as_int(x, name):
    xf = float(x)
    if not xf.is_integer():
        raise TypeError(f"{name} windings must be integers, got {x!r}")
    return int(xf)


def g_integrand(spec: ModelSpec, eta) -> np.ndarray:
    """sinh(eta) * prod (m^2 sinh^2 + n^2)^(-2 alpha): the reduced-ODE source without constants."""
    eta = np.asarray(eta, dtype=float)
    sh = np.sinh(eta)
    out = sh.copy()
    for al, mi, ni in zip(spec.alpha, spec.m, spec.n):
        out = out * (mi * mi * sh * sh + ni * ni) ** (-2.0 * al)
    return out


def g_tail(spec: ModelSpec, eta0: float) -> float:
    """int_eta0^inf g, using t = exp(-eta) so the exponential tail is finite-range."""
    if eta0 >= ETA_MAX:
        return _asymptotic_tail(spec, eta0)

    def in_t(t):
        return g_integrand(spec, -math.log(t)) / t

    t0 = math.exp(-eta0)
    tm = math.exp(-ETA_MAX)
    val, _ = integrate.quad(in_t, tm, t0, epsabs=0.0, epsrel=1e-13, limit=200)
    return val + _asymptotic_tail(spec, ETA_MAX)


def _asymptotic_tail(spec, eta0):
    # g ~ prod |m|^(-4 alpha) / sinh^2 for large eta; int_eta^inf csch^2 = coth - 1
    mprod = math.prod(abs(mi) ** (-4.0 * al) for mi, al in zip(spec.m, spec.alpha))
    return mprod * 2.0 / math.expm1(2.0 * eta0)


# --------------------------------------------------------------------------- profiles


class ShapeProfile:
    """Shape function f(eta) >= 0, evaluated through s = 1/(1+f^2)."""

    kind = "abstract"

    def s(self, eta):
        raise NotImplementedError

    def one_minus_s(self, eta):
        return 1.0 - self.s(eta)

    def ds(self, eta):
        raise NotImplementedError

    def ds_over_sinh(self, eta):
        """s'(eta)/sinh(eta), finite on the axis."""
        eta = np.asarray(eta, dtype=float)
        e = np.maximum(eta, 1e-8)
        return self.ds(e) / np.sinh(e)

    def f(self, eta):
        with np.errstate(divide="ignore"):
            return np.sqrt(self.one_minus_s(eta) / self.s(eta))

    def df(self, eta):
        s = self.s(eta)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.ds(eta) / (2.0 * s * s * self.f(eta))

    def ode_lhs(self, eta):
        """-f f' / (1+f^2)^2 = s'/2."""
        return 0.5 * self.ds(eta)


@dataclass(frozen=True)
class IntegrationConstants:
    """Constants of the general solution.

    ``anchor`` is the value of the antiderivative G at infinity.  With the
    default ``anchor = 0`` each ``l_j`` is simply ``s_j(inf)``.
    """

    k: tuple[float, ...]
    l: tuple[float, ...]
    anchor: float = 0.0

    def c_over_k(self, spec: ModelSpec, j: int) -> float:
        if any(not (kk > 0) for kk in self.k):
            raise ProfileError("integration constants k_i must be positive for real fractional powers")
        c = math.prod(kk ** (4.0 * al) for kk, al in zip(self.k, spec.alpha))
        return c / self.k[j]


class ClosedFormProfile(ShapeProfile):
    """1/(1+f^2) = [1 - |q| cosh(eta) / sqrt(q^2 + sinh^2 eta)] / (1 - |q|)."""

    kind = "closed-form"

    def __init__(self, q: float):
        q = abs(float(q))
        if not (0.0 < q < 1.0):
            raise SpecError(f"closed-form profile needs 0 < |q| < 1, got |q| = {q}")
        self.q = q

    def _wc(self, eta):
        eta = np.asarray(eta, dtype=float)
        with np.errstate(over="ignore"):
            sh = np.sinh(np.minimum(eta, 350.0))
            ch = np.cosh(np.minimum(eta, 350.0))
            rw = np.sqrt(self.q * self.q + sh * sh)
        return sh, ch, rw

    def s(self, eta):
        # cancellation-free rewrite of the bracket
        sh, ch, rw = self._wc(eta)
        q = self.q
        out = (1.0 + q) * sh * sh / (rw * (rw + q * ch))
        # past s = 1/2 take 1 - (1 - s), which cannot round above 1
        out = np.where(out > 0.5, 1.0 - self.one_minus_s(eta), out)
        return np.where(np.asarray(eta) >= 350.0, 1.0, out)

    def one_minus_s(self, eta):
        sh, ch, rw = self._wc(eta)
        q = self.q
        out = q * (1.0 + q) / (rw * (ch + rw))
        return np.where(np.asarray(eta) >= 350.0, 0.0, out)

    def f(self, eta):
        sh, ch, rw = self._wc(eta)
        q = self.q
        with np.errstate(divide="ignore"):
            f2 = q * (rw + q * ch) / ((ch + rw) * sh * sh)
        return np.where(np.asarray(eta) >= 350.0, 0.0, np.sqrt(f2))

    def ds(self, eta):
        sh, _, rw = self._wc(eta)
        with np.errstate(over="ignore"):
            out = self.q * (1.0 + self.q) * sh / rw**3
        return np.where(np.asarray(eta) >= 350.0, 0.0, out)

    def ds_over_sinh(self, eta):
        _, _, rw = self._wc(eta)
        with np.errstate(over="ignore"):
            out = self.q * (1.0 + self.q) / rw**3
        return np.where(np.asarray(eta) >= 350.0, 0.0, out)

    def __repr__(self):
        return f"ClosedFormProfile(q={self.q})"


def closed_form_profile(q: float) -> ClosedFormProfile:
    return ClosedFormProfile(q)


def rootless_s(q: float, eta):
    """The bracket with cosh/(q^2 + sinh^2) instead of its square root.

    Only kept to demonstrate that it violates 0 <= s <= 1 near the axis.
    """
    q = abs(q)
    eta = np.asarray(eta, dtype=float)
    return (1.0 - q * np.cosh(eta) / (q * q + np.sinh(eta) ** 2)) / (1.0 - q)


class TabulatedProfile(ShapeProfile):
    """Profile built by quadrature of the reduced ODE on a log-spaced eta grid.

    The head integral H(eta) = int_0^eta g and tail T(eta) = int_eta^inf g
    are stored as log H, log T against log eta and interpolated with cubic
    Hermite splines using the exact nodal slopes.  s is assembled from H
    below the crossover and from T above it, so both s and 1 - s keep full
    relative accuracy.
    """

    kind = "tabulated"

    def __init__(self, spec: ModelSpec, j: int, constants: IntegrationConstants, nodes: int = 4000):
        self.spec = spec
        self.j = j
        self.constants = constants
        amp = 2.0 * constants.c_over_k(spec, j)
        self.amp = amp

        x = np.linspace(math.log(ETA_MIN), math.log(ETA_MAX), nodes)
        eta = np.exp(x)
        # Gauss-Legendre in log(eta) on each cell
        gx, gw = np.polynomial.legendre.leggauss(10)
        lo, hi = x[:-1], x[1:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xs = mid[:, None] + half[:, None] * gx[None, :]
        es = np.exp(xs)
        cells = (g_integrand(spec, es) * es * gw[None, :]).sum(axis=1) * half
        head0 = _head_below(spec, ETA_MIN)
        H = head0 + np.concatenate([[0.0], np.cumsum(cells)])
        tail_top = g_tail(spec, ETA_MAX)
        T = tail_top + np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        self.total = H[-1] + tail_top

        gn = g_integrand(spec, eta)
        self._logH = CubicHermiteSpline(x, np.log(H), eta * gn / H)
        self._logT = CubicHermiteSpline(x, np.log(T), -eta * gn / T)
        self._x = x
        self._H, self._T = H, T
        self._cross = float(x[np.argmin(np.abs(H - T))])

        s_inf = constants.l[j] + amp * constants.anchor
        s_0 = s_inf - amp * self.total
        tol = 64 * np.finfo(float).eps
        if abs(s_0) < tol:
            s_0 = 0.0
        if abs(s_inf - 1.0) < tol:
            s_inf = 1.0
        if s_0 < 0.0 or s_inf > 1.0 or amp <= 0.0:
            raise ProfileError(
                f"no valid profile for these constants: s ranges over [{s_0:.6g}, {s_inf:.6g}], outside [0, 1]"
            )
        self.s0, self.s_inf = s_0, s_inf

    def _head(self, eta):
        eta = np.asarray(eta, dtype=float)
        x = np.log(np.clip(eta, ETA_MIN, ETA_MAX))
        h = np.exp(self._logH(x))
        # below ETA_MIN: H ~ c eta^2
        return np.where(eta < ETA_MIN, self._H[0] * (eta / ETA_MIN) ** 2, h)

    def _tail(self, eta):
        eta = np.asarray(eta, dtype=float)
        x = np.log(np.clip(eta, ETA_MIN, ETA_MAX))
        t = np.exp(self._logT(x))
        big = eta > ETA_MAX
        if np.any(big):
            asym = np.vectorize(lambda e: _asymptotic_tail(self.spec, e))(np.where(big, eta, ETA_MAX))
            t = np.where(big, asym, t)
        return t

    def s(self, eta):
        eta = np.asarray(eta, dtype=float)
        low = np.log(np.maximum(eta, 1e-300)) < self._cross
        return np.where(low, self.s0 + self.amp * self._head(eta), self.s_inf - self.amp * self._tail(eta))

    def one_minus_s(self, eta):
        eta = np.asarray(eta, dtype=float)
        low = np.log(np.maximum(eta, 1e-300)) < self._cross
        return np.where(low, 1.0 - self.s0 - self.amp * self._head(eta), (1.0 - self.s_inf) + self.amp * self._tail(eta))

    def ds(self, eta):
        """Derivative of the stored interpolant (not of the ODE right-hand side)."""
        eta = np.asarray(eta, dtype=float)
        e = np.clip(eta, ETA_MIN, ETA_MAX)
        x = np.log(e)
        low = x < self._cross
        dh = self._head(e) * self._logH(x, 1) / e
        dt = -self._tail(e) * self._logT(x, 1) / e
        out = self.amp * np.where(low, dh, dt)
        out = np.where(eta < ETA_MIN, self.amp * 2.0 * self._H[0] * eta / ETA_MIN**2, out)
        if np.any(eta > ETA_MAX):
            gi = g_integrand(self.spec, np.minimum(eta, 350.0))
            out = np.where(eta > ETA_MAX, self.amp * gi, out)
        return out

    def ds_over_sinh(self, eta):
        eta = np.asarray(eta, dtype=float)
        e = np.maximum(eta, ETA_MIN)
        small = self.amp * 2.0 * self._H[0] / ETA_MIN**2
        return np.where(eta < ETA_MIN, small, self.ds(e) / np.sinh(e))

    def __repr__(self):
        return f"TabulatedProfile(field={self.j}, k={self.constants.k}, l={self.constants.l[self.j]})"


def _head_below(spec, eta0):
    val, _ = integrate.quad(lambda e: float(g_integrand(spec, e)), 0.0, eta0, epsabs=0.0, epsrel=1e-13)
    return val


def general_profile(spec: ModelSpec, j: int, k: Sequence[float], l_j: float, anchor: float = 0.0, nodes: int = 4000):
    """Tabulated profile of field ``j`` for user constants (any windings)."""
    l = [0.0] * spec.N
    l[j] = float(l_j)
    consts = IntegrationConstants(tuple(float(x) for x in k), tuple(l), float(anchor))
    return TabulatedProfile(spec, j, consts, nodes=nodes)


def integration_constants(spec: ModelSpec) -> IntegrationConstants:
    """Common k and l = -1/(|q|-1) of the constant-q branch.

    k is fixed by demanding that the general solution reach s = 0 on the axis
    and s = 1 on the ring:  k^2 = |q|(1+|q|) prod|m_i|^(4 alpha_i) / 2.
    ``anchor`` reproduces the closed-form antiderivative
    G = -prod|m|^(-4 alpha) cosh(eta) / ((1-q^2) sqrt(q^2 + sinh^2 eta)).
    """
    qr = spec.qratio
    if not qr.is_constant:
        raise SpecError("integration_constants needs n_i^2/m_i^2 equal for all fields; use boundary_constants")
    q = qr.abs_q
    if q == 1.0:
        raise SpecError("|q| = 1 makes the integration constants singular")
    if q > 1.0:
        raise SpecError("only the |q| < 1 branch is supported")
    mp4 = math.prod(abs(mi) ** (4.0 * al) for mi, al in zip(spec.m, spec.alpha))
    k = math.sqrt(q * (1.0 + q) * mp4 / 2.0)
    l = -1.0 / (q - 1.0)
    anchor = -1.0 / (mp4 * (1.0 - q * q))
    return IntegrationConstants((k,) * spec.N, (l,) * spec.N, anchor)


def boundary_constants(spec: ModelSpec) -> IntegrationConstants:
    """Constants meeting s(0) = 0 and s(inf) = 1 for arbitrary windings.

    Both conditions force a common k with 2 k^2 int_0^inf g = 1 and, with
    anchor 0, l = 1.
    """
    total = _head_below(spec, 1.0) + g_tail(spec, 1.0)
    k = math.sqrt(1.0 / (2.0 * total))
    return IntegrationConstants((k,) * spec.N, (1.0,) * spec.N, 0.0)


class PerturbedProfile(ShapeProfile):
    """f -> f (1 + eps sin(eta)); used as a non-solution fixture."""

    kind = "perturbed"

    def __init__(self, base: ShapeProfile, eps: float = 0.01):
        self.base, self.eps = base, float(eps)

    def _parts(self, eta):
        eta = np.asarray(eta, dtype=float)
        s, oms, ds = self.base.s(eta), self.base.one_minus_s(eta), self.base.ds(eta)
        # the ring limit does not depend on the (undefined) phase of sin there
        e = np.where(np.isfinite(eta), eta, 0.0)
        b = 1.0 + self.eps * np.sin(e)
        P = b * b
        dP = 2.0 * b * self.eps * np.cos(e)
        D = s + oms * P
        return s, oms, ds, P, dP, D

    def s(self, eta):
        s, _, _, _, _, D = self._parts(eta)
        return s / D

    def one_minus_s(self, eta):
        _, oms, _, P, _, D = self._parts(eta)
        return oms * P / D

    def ds(self, eta):
        s, oms, ds, P, dP, D = self._parts(eta)
        return (ds * P - s * oms * dP) / (D * D)


# --------------------------------------------------------------------------- solutions


@dataclass(frozen=True)
class HopfionSolution:
    spec: ModelSpec
    profiles: tuple[ShapeProfile, ...]
    constants: IntegrationConstants | None = None
    qratio: QRatio = field(default=None)

    def __post_init__(self):
        if len(self.profiles) != self.spec.N:
            raise SpecError(f"need {self.spec.N} profiles, got {len(self.profiles)}")
        if self.qratio is None:
            object.__setattr__(self, "qratio", self.spec.qratio)

    def with_scale(self, a: float) -> "HopfionSolution":
        return HopfionSolution(self.spec.with_scale(a), self.profiles, self.constants, self.qratio)

    def perturbed(self, eps: float = 0.01) -> "HopfionSolution":
        return HopfionSolution(self.spec, tuple(PerturbedProfile(p, eps) for p in self.profiles), self.constants, self.qratio)


def build_solution(spec: ModelSpec, constants: IntegrationConstants | None = None, nodes: int = 4000) -> HopfionSolution:
    """Closed-form profiles on the constant-q branch, tabulated ones otherwise."""
    qr = spec.qratio
    if constants is None and qr.closed_form:
        prof = ClosedFormProfile(qr.abs_q)
        return HopfionSolution(spec, (prof,) * spec.N, integration_constants(spec), qr)
    if constants is None:
        constants = boundary_constants(spec)
    profiles = tuple(TabulatedProfile(spec, j, constants, nodes=nodes) for j in range(spec.N))
    return HopfionSolution(spec, profiles, constants, qr)


def phase(spec: ModelSpec, i: int, p: ToroidalPoint):
    return spec.m[i] * np.asarray(p.xi, dtype=float) + spec.n[i] * np.asarray(p.phi, dtype=float)


def eval_u(sol: HopfionSolution, i: int, p: ToroidalPoint):
    """u_i = f_i(eta) exp(i(m_i xi + n_i phi)); modulus inf on the axis (north-pole limit)."""
    _check_index(sol, i)
    f = sol.profiles[i].f(p.eta)
    th = phase(sol.spec, i, p)
    with np.errstate(invalid="ignore"):
        out = f * np.exp(1j * th)
    return np.where(np.isinf(f), complex(np.inf, 0.0), out)


def eval_n(sol: HopfionSolution, i: int, p: ToroidalPoint) -> np.ndarray:
    """Unit vector (..., 3); n^3 = 1 - 2s and n^1 + i n^2 = 2 sqrt(s(1-s)) e^{i theta}."""
    _check_index(sol, i)
    prof = sol.profiles[i]
    s = prof.s(p.eta)
    oms = prof.one_minus_s(p.eta)
    th = phase(sol.spec, i, p)
    amp = 2.0 * np.sqrt(np.clip(s * oms, 0.0, None))
    n3 = oms - s
    return np.stack(np.broadcast_arrays(amp * np.cos(th), amp * np.sin(th), n3), axis=-1)


def n_from_u(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    d = 1.0 + np.abs(u) ** 2
    return np.stack([2 * u.real / d, 2 * u.imag / d, (np.abs(u) ** 2 - 1.0) / d], axis=-1)


def u_from_n(n) -> np.ndarray:
    """Inverse stereographic projection (undefined at the north pole)."""
    n = np.asarray(n, dtype=float)
    return (n[..., 0] + 1j * n[..., 1]) / (1.0 - n[..., 2])


def _check_index(sol, i):
    if not (0 <= i < sol.spec.N):
        raise IndexError(f"field index {i} out of range for N = {sol.spec.N}")
