import numpy as np
import pytest

from gsens.core import NonFiniteError
from gsens.estimation import solve_scalar_root


def test_linear_function_root():
    result = solve_scalar_root(lambda x: x - 2.0, (0.0, 10.0))
    assert result.solved
    assert result.root == pytest.approx(2.0, abs=1e-10)
    assert result.residual <= 1e-10
    assert result.multiplicity == 1


def test_no_real_root_returns_no_solution():
    result = solve_scalar_root(lambda x: x * x + 1.0, (-5.0, 5.0))
    assert not result.solved
    assert result.root is None
    assert result.roots == ()


def test_root_on_scan_point_counted_once():
    result = solve_scalar_root(lambda x: x, (-10.0, 10.0))
    assert result.root == 0.0
    assert result.multiplicity == 1


def test_multiple_roots_pick_smallest_absolute_value():
    result = solve_scalar_root(lambda x: (x - 1.0) * (x + 3.0), (-10.0, 10.0))
    assert result.root == pytest.approx(1.0, abs=1e-10)
    assert result.multiplicity == 2
    assert result.roots[0] == pytest.approx(-3.0, abs=1e-10)


def test_non_finite_value_raises():
    with pytest.raises(NonFiniteError):
        solve_scalar_root(lambda x: np.nan if x > 0.5 else x - 2.0, (-1.0, 1.0))


def test_invalid_bracket():
    with pytest.raises(ValueError):
        solve_scalar_root(lambda x: x, (1.0, 1.0))


def test_root_outside_bracket_is_no_solution():
    result = solve_scalar_root(lambda x: x - 20.0, (-10.0, 10.0))
    assert not result.solved
