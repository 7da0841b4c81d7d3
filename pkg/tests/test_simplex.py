import math

import numpy as np
import pytest

from facegraph.simplex import nelder_mead


def quadratic(center):
    c = np.asarray(center, dtype=np.float64)
    return lambda x: float(((x - c) ** 2).sum())


def rosenbrock(x):
    return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2


class TestNelderMead:
    def test_quadratic_minimum(self):
        r = nelder_mead(quadratic([3.0, -2.0]), np.zeros(2))
        assert np.abs(r.x - [3.0, -2.0]).max() < 1e-6
        assert r.converged

    def test_rosenbrock_from_standard_start(self):
        r = nelder_mead(rosenbrock, np.array([-1.2, 1.0]))
        assert np.abs(r.x - [1.0, 1.0]).max() < 1e-4

    def test_constant_function_terminates_immediately(self):
        r = nelder_mead(lambda x: 7.5, np.array([2.0, 3.0, 4.0]))
        assert r.converged
        assert r.iterations == 0
        assert r.fun == 7.5
        assert np.array_equal(r.x, [2.0, 3.0, 4.0])

    def test_trace_monotone_non_increasing(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            x0 = rng.uniform(-2, 2, 4)
            r = nelder_mead(lambda x: float(np.abs(x).sum() + np.sin(x).sum()), x0)
            assert (np.diff(r.trace) <= 0).all()

    def test_higher_dimension(self):
        r = nelder_mead(quadratic(np.arange(6) * 0.3), np.ones(6))
        assert np.abs(r.x - np.arange(6) * 0.3).max() < 1e-5

    def test_non_finite_at_start_fatal(self):
        with pytest.raises(ValueError, match="not finite"):
            nelder_mead(lambda x: math.inf, np.zeros(2))

    def test_non_finite_region_is_avoided(self):
        # objective blows up left of x = -0.5; minimum at x = 1 reachable
        def f(x):
            if x[0] < -0.5:
                return math.nan
            return float((x[0] - 1.0) ** 2 + x[1] ** 2)

        r = nelder_mead(f, np.array([-0.4, 0.3]))
        assert np.abs(r.x - [1.0, 0.0]).max() < 1e-6

    def test_max_iterations_cap(self):
        r = nelder_mead(rosenbrock, np.array([-1.2, 1.0]), max_iterations=5)
        assert r.iterations == 5
        assert not r.converged

    def test_best_value_never_worse_than_start(self):
        f = quadratic([0.5, 0.5])
        start = np.array([5.0, -5.0])
        r = nelder_mead(f, start, max_iterations=3)
        assert r.fun <= f(start)
