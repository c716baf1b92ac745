"""Invariant suite shared by the ``verify`` command and the tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .ansatz import HopfionSolution, TabulatedProfile, g_integrand
from .dynamics import (
    FieldJet,
    cdot,
    current_divergence,
    eom_residual,
    g_abs2,
    g_cross,
    g_linear,
    jet,
    k_vector,
    sample_region,
)
from .energetics import energy_report
from .topology import analytic_charges, analytic_vk_ratio, hopf_numeric, vk_bound

DEFAULT_TOLERANCES = {
    "identity": 1e-10,
    "ode": 1e-10,
    "ode_tabulated": 1e-8,
    "boundary": 1e-8,
    "eom": 1e-5,
    "sensitivity": 10.0,
    "reduced": 1e-8,
    "profile": 1e-6,
    "grid": 1e-3,
    "hopf": 0.02,
    "vk": 1e-8,
}


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    gating: bool = True
    note: str = ""
    larger: bool = False

    def line(self) -> str:
        tag = ("PASS" if self.passed else "FAIL") if self.gating else "INFO"
        cmp = ">=" if self.larger else "<"
        extra = f"  ({self.note})" if self.note else ""
        return f"{tag}  {self.name}: {self.value:.3e} {cmp} {self.tol:.1e}{extra}"


@dataclass
class SuiteResult:
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def add(self, name, value, tol, gating=True, note="", larger=False) -> Check:
        value = float(value)
        passed = bool(value >= tol) if larger else bool(value < tol)
        c = Check(name, value, tol, passed, gating, note, larger)
        self.checks.append(c)
        return c


def random_jets(n: int = 200, seed: int = 1) -> list[FieldJet]:
    """Jets of the random smooth fields u = c0 + c.x + x.B.x at random points."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(4):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = B + B.T
        x = rng.uniform(-2.0, 2.0, size=(n, 3))
        u = 0.3 + x @ c + np.einsum("pi,ij,pj->p", x, B, x)
        grad = c + 2.0 * x @ B
        out.append(FieldJet(u, grad))
    return out


def identity_residuals(js) -> tuple[float, float]:
    """max |K . grad u| / |grad u|^3 and max |Im(K . grad u*)| / |grad u|^4."""
    r1 = r2 = 0.0
    for j in js:
        K = k_vector(j)
        g2 = np.sum(np.abs(j.grad) ** 2, axis=-1)
        r1 = max(r1, float(np.max(np.abs(cdot(K, j.grad)) / g2**1.5)))
        r2 = max(r2, float(np.max(np.abs(cdot(K, j.grad.conj()).imag) / g2**2)))
    return r1, r2


def ode_residual(sol: HopfionSolution, j: int, eta, ds=None) -> float:
    """max over eta of |s'/2 - (C/k_j) g| / ((C/k_j) g), pointwise relative."""
    c = sol.constants.c_over_k(sol.spec, j)
    rhs = c * g_integrand(sol.spec, eta)
    lhs = 0.5 * (sol.profiles[j].ds(eta) if ds is None else ds)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), np.finfo(float).tiny)))


def boundary_residual(sol: HopfionSolution, j: int) -> float:
    """max(|s(0)|, |1 - s(inf)|) from the stored profile."""
    prof = sol.profiles[j]
    return float(max(abs(prof.s(0.0)), abs(prof.one_minus_s(np.inf))))


def run_suite(
    sol: HopfionSolution,
    tolerances: dict | None = None,
    quick: bool = False,
    grid: tuple[int, int, int] = (256, 64, 8),
    hopf_grid: tuple[int, int, int] = (128, 64, 64),
    perturb: float = 0.0,
    samples: int = 100,
) -> SuiteResult:
    """Run the invariant suite; ``perturb`` replaces the profiles by f (1 + eps sin eta)."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    t0 = time.perf_counter()
    res = SuiteResult()
    spec = sol.spec
    test = sol.perturbed(perturb) if perturb else sol
    pts = sample_region(samples)

    r1, r2 = identity_residuals(random_jets())
    res.add("identity K.du = 0 (random fields)", r1, tol["identity"])
    res.add("identity Im(K.du*) = 0 (random fields)", r2, tol["identity"])
    sj = [jet(test, i, pts) for i in range(spec.N)]
    r1, r2 = identity_residuals(sj)
    res.add("identity K.du = 0 (solution)", r1, tol["identity"])
    res.add("identity Im(K.du*) = 0 (solution)", r2, tol["identity"])

    eta = np.linspace(0.01, 10.0, 200)
    for j in range(spec.N):
        key = "ode_tabulated" if isinstance(test.profiles[j], TabulatedProfile) else "ode"
        res.add(f"ode residual field {j + 1}", ode_residual(test, j, eta), tol[key])
        res.add(f"boundary limits field {j + 1}", boundary_residual(test, j), tol["boundary"])

    for j in range(spec.N):
        eom = eom_residual(test, j, pts).max_abs_residual
        res.add(f"eom residual field {j + 1}", eom, tol["eom"])
        if not perturb:
            bad = eom_residual(sol.perturbed(0.01), j, pts).max_abs_residual
            res.add(f"eom field {j + 1} perturbation sensitivity", bad / max(eom, 1e-300), tol["sensitivity"], larger=True)
        res.add(f"current G=u{j + 1}", current_divergence(test, j, g_linear(j), pts).max_abs_residual, tol["eom"])
        res.add(f"current G=|u{j + 1}|^2", current_divergence(test, j, g_abs2(j), pts).max_abs_residual, tol["eom"])
    if spec.N >= 2:
        val = current_divergence(test, 0, g_cross(0, 1), pts).max_abs_residual
        res.add("current G=u1 u2*", val, tol["eom"], gating=False, note="cross-field G is not conserved on these solutions")

    rep = energy_report(test, None if quick else grid)
    ref = rep.e_closed if rep.e_closed is not None else rep.e_reduced
    if rep.e_closed is not None:
        res.add("energy reduced vs closed", abs(rep.e_reduced - ref) / ref, tol["reduced"])
    res.add("energy profile vs reference", abs(rep.e_profile - ref) / ref, tol["profile"])
    if rep.e_grid is not None:
        res.add("energy grid vs reference", abs(rep.e_grid - ref) / ref, tol["grid"])

    qa = analytic_charges(spec)
    if not quick:
        for i in range(spec.N):
            qn = hopf_numeric(test, i, hopf_grid)
            res.add(
                f"hopf |Q| field {i + 1}",
                abs(abs(qn) - abs(qa[i])) / abs(qa[i]),
                tol["hopf"],
                note=f"numeric {qn:.6f}, closed expression {qa[i]}",
            )
    bound = vk_bound(spec, qa)
    ratio = ref / bound
    res.add("vk ratio", ratio, 1.0, larger=True)
    if rep.e_closed is not None:
        res.add("vk ratio vs analytic", abs(ratio - analytic_vk_ratio(spec.qratio.abs_q)), tol["vk"])

    res.elapsed = time.perf_counter() - t0
    return res
