import math

import numpy as np
import pytest
from scipy.integrate import quad

from hopfion.ansatz import SpecError, build_solution, validate_spec
from hopfion.dynamics import sample_region
from hopfion.energetics import (
    CLOSED_PREFACTOR,
    REDUCED_PREFACTOR,
    energy_closed,
    energy_density,
    energy_density_axis_safe,
    energy_grid,
    energy_profile,
    energy_reduced,
    energy_report,
    energy_sum_model,
    profile_density,
    reduced_integral,
)


def test_prefactors_consistent():
    assert REDUCED_PREFACTOR == pytest.approx((2 * math.pi) ** 2 * 8**0.75 * 4**0.75, rel=1e-15)
    assert CLOSED_PREFACTOR == pytest.approx((2 * math.pi) ** 2 * 4 * 2**0.25, rel=1e-15)


def test_closed_value(spec_q05):
    assert energy_closed(spec_q05) == pytest.approx(459.9947257665858, rel=1e-14)


def test_reduced_integral_closed_form():
    # single field: int_0^inf sinh / (m^2 sinh^2 + n^2)^(3/2) = 1/(m n (m + n)), via c = cosh
    for m, n in [(2, 1), (5, 3), (1, 4)]:
        spec = validate_spec([0.75], [m], [n])
        val, err = reduced_integral(spec)
        assert val == pytest.approx(1.0 / (m * n * (n + m)), rel=1e-12)
        assert err < 1e-12 * val


def test_routes_agree_general_q(sol_general):
    rep = energy_report(sol_general, grid=(256, 64, 8))
    assert rep.e_closed is None
    assert rep.e_reduced == pytest.approx(438.97178885884676, rel=1e-9)
    assert rep.spread("e_profile", "e_reduced") < 1e-9
    assert rep.spread("e_grid", "e_reduced") < 1e-6


def test_profile_density_independent_quad(sol_q05):
    val, _ = quad(lambda e: float(profile_density(sol_q05, e)), 0, 40, limit=200, epsrel=1e-12)
    assert REDUCED_PREFACTOR * val == pytest.approx(energy_closed(sol_q05.spec), rel=1e-10)


def test_density_routes_agree(sol_two_field):
    p = sample_region(60, (0.05, 6.0), seed=5)
    assert np.allclose(energy_density_axis_safe(sol_two_field, p), energy_density(sol_two_field, p), rtol=1e-12)


def test_axis_safe_density_finite(sol_q05):
    from hopfion.geometry import ToroidalPoint

    d = energy_density_axis_safe(sol_q05, ToroidalPoint(np.array([0.0, 1e-12, np.inf]), 0.3, 0.0))
    assert np.all(np.isfinite(d)) and np.all(d > 0)


def test_grid_converges(sol_q05):
    e = energy_closed(sol_q05.spec)
    coarse = abs(energy_grid(sol_q05, 32, 16, 4) / e - 1)
    fine = abs(energy_grid(sol_q05, 128, 32, 4) / e - 1)
    assert fine < coarse
    assert fine < 1e-6


def test_scale_invariance():
    for a in (0.5, 2.0):
        sol = build_solution(validate_spec([0.75], [2], [1], a=a))
        assert energy_grid(sol, 128, 32, 4) == pytest.approx(energy_closed(sol.spec), rel=1e-6)


def test_bad_inputs(spec_q05):
    with pytest.raises(SpecError):
        energy_closed(validate_spec([0.375, 0.375], [1, 3], [1, 1]))
    with pytest.raises(SpecError):
        energy_reduced(spec_q05, [-1.0])


def test_sum_model():
    assert energy_sum_model([(2, 1), (4, 2)]) == pytest.approx(
        energy_closed(validate_spec([0.75], [2], [1])) + energy_closed(validate_spec([0.75], [4], [2]))
    )
