"""Sampling the solution on Cartesian boxes for export."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .ansatz import ETA_MIN, ETA_MAX, HopfionSolution, eval_n
from .energetics import energy_density_axis_safe
from .geometry import CartesianPoint, NearFocalRingWarning, to_toroidal
from .topology import hopf_density_axis_safe


@dataclass
class BoxSample:
    axes: tuple[np.ndarray, np.ndarray, np.ndarray]
    n: list[np.ndarray]  # per field, (nx, ny, nz, 3)
    energy_density: np.ndarray
    hopf_density: list[np.ndarray]

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(len(ax) for ax in self.axes)

    @property
    def origin(self) -> tuple[float, float, float]:
        return tuple(float(ax[0]) for ax in self.axes)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(float(ax[1] - ax[0]) if len(ax) > 1 else 1.0 for ax in self.axes)


def half_level_eta(sol: HopfionSolution, i: int) -> float:
    """eta at which n^3 of field i changes sign (s = 1/2)."""
    prof = sol.profiles[i]
    return brentq(lambda e: float(prof.s(e)) - 0.5, ETA_MIN, ETA_MAX, xtol=1e-14)


def default_half_width(sol: HopfionSolution) -> float:
    """Cube half-width holding every n^3 = 0 torus with a 25% margin, at least 3a.

    The torus eta = eta0 reaches out to a coth(eta0/2) from the z axis.
    """
    a = sol.spec.a
    reach = max(a / np.tanh(0.5 * half_level_eta(sol, i)) for i in range(sol.spec.N))
    return max(3.0 * a, 1.25 * reach)


def sample_box(sol: HopfionSolution, half_width: float, res: int) -> BoxSample:
    """Fields on the cube [-L, L]^3 with ``res`` points per side, indexed [ix, iy, iz]."""
    if res < 2:
        raise ValueError("export resolution must be at least 2")
    if not half_width > 0:
        raise ValueError("box half-width must be positive")
    ax = np.linspace(-half_width, half_width, res)
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    with warnings.catch_warnings():
        # grid nodes that land on the focal ring are evaluated in the ring limit
        warnings.simplefilter("ignore", NearFocalRingWarning)
        p = to_toroidal(CartesianPoint(X, Y, Z), sol.spec.a)
    ns = [eval_n(sol, i, p) for i in range(sol.spec.N)]
    e = energy_density_axis_safe(sol, p)
    hd = [hopf_density_axis_safe(sol, i, p) for i in range(sol.spec.N)]
    return BoxSample((ax, ax, ax), ns, e, hd)


def field_arrays(box: BoxSample) -> tuple[dict, dict]:
    """(scalars, vectors) keyed by export names; field i is suffixed _i (1-based)."""
    scalars, vectors = {}, {}
    for i, n in enumerate(box.n):
        vectors[f"n_{i + 1}"] = n
        scalars[f"n3_{i + 1}"] = n[..., 2]
    scalars["energy_density"] = box.energy_density
    for i, h in enumerate(box.hopf_density):
        scalars[f"AB_density_{i + 1}"] = h
    return scalars, vectors
