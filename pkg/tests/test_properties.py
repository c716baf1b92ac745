import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfion.ansatz import ClosedFormProfile, SpecError, build_solution, eval_n, validate_spec
from hopfion.dynamics import FieldJet
from hopfion.energetics import energy_closed
from hopfion.geometry import ToroidalPoint, to_cartesian, to_toroidal
from hopfion.topology import analytic_vk_ratio, vk_inequality_margin, vk_ratio
from hopfion.verify import identity_residuals

finite = dict(allow_nan=False, allow_infinity=False)
unit_q = st.floats(1e-6, 1 - 1e-6, **finite)


@given(st.floats(0.01, 12, **finite), st.floats(-3.1, 3.1, **finite), st.floats(0, 6.28, **finite), st.floats(0.1, 10, **finite))
def test_coordinate_round_trip(eta, xi, phi, a):
    back = to_toroidal(to_cartesian(ToroidalPoint(eta, xi, phi), a), a)
    assert math.isclose(float(back.eta), eta, rel_tol=1e-9, abs_tol=1e-9)
    assert abs(np.angle(np.exp(1j * (float(back.xi) - xi)))) < 1e-8


@given(st.lists(st.floats(-5, 5, **finite), min_size=6, max_size=6))
def test_k_identities_any_gradient(v):
    g = np.array(v[:3]) + 1j * np.array(v[3:])
    if np.sum(np.abs(g) ** 2) < 1e-6:
        return
    r1, r2 = identity_residuals([FieldJet(np.zeros(()), g)])
    assert r1 < 1e-12 and r2 < 1e-12


@given(unit_q, st.floats(0, 60, **finite))
def test_profile_in_unit_interval(q, eta):
    p = ClosedFormProfile(q)
    s = float(p.s(eta))
    assert 0.0 <= s <= 1.0
    assert abs(s + float(p.one_minus_s(eta)) - 1.0) < 4e-16
    assert float(p.ds(eta)) >= 0.0


@given(unit_q)
def test_vk_inequality(q):
    assert analytic_vk_ratio(q) >= 1.0 - 1e-15
    assert vk_inequality_margin(q) >= -1e-15


@settings(max_examples=40)
@given(st.integers(1, 3), st.integers(1, 9), st.integers(1, 9), st.integers(1, 4))
def test_vk_ratio_depends_on_q_only(N, m, n, scale):
    if n >= m:
        return
    spec = validate_spec([0.75 / N] * N, [m * (i + 1) * scale for i in range(N)], [n * (i + 1) * scale for i in range(N)])
    assert math.isclose(vk_ratio(spec), analytic_vk_ratio(n / m), rel_tol=1e-12)


@given(st.lists(st.floats(0.01, 1.0, **finite), min_size=1, max_size=4))
def test_scaling_condition_enforced(alpha):
    N = len(alpha)
    try:
        validate_spec(alpha, [2] * N, [1] * N)
    except SpecError as exc:
        assert abs(math.fsum(alpha) - 0.75) > 1e-12
        assert "scaling" in str(exc)
    else:
        assert abs(math.fsum(alpha) - 0.75) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.floats(0.0, 20, **finite), st.floats(-3, 3, **finite), st.floats(0, 6, **finite))
def test_n_is_unit(m, n, eta, xi, phi):
    if n == m:
        return  # |q| = 1 has no closed-form branch
    sol = build_solution(validate_spec([0.75], [m], [n]))
    v = eval_n(sol, 0, ToroidalPoint(eta, xi, phi))
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12


@given(unit_q, st.floats(0.1, 10, **finite))
def test_energy_scale_free(q, a):
    # closed energy depends on the windings only through prod m^(2 alpha) and |q|
    spec = validate_spec([0.75], [7], [3], a=a)
    assert energy_closed(spec) == energy_closed(validate_spec([0.75], [7], [3]))
