import numpy as np
import pytest

from hopfion import build_solution, validate_spec


@pytest.fixture(scope="session")
def spec_q05():
    return validate_spec([0.75], [2], [1])


@pytest.fixture(scope="session")
def sol_q05(spec_q05):
    return build_solution(spec_q05)


@pytest.fixture(scope="session")
def sol_two_field():
    return build_solution(validate_spec([0.375, 0.375], [2, 4], [1, 2]))


@pytest.fixture(scope="session")
def sol_general():
    # q_1 = 1, q_2 = 1/3: no closed form, tabulated profiles with boundary constants
    return build_solution(validate_spec([0.375, 0.375], [1, 3], [1, 1]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
