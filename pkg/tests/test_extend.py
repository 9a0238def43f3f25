import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticeckn.extend import (
    Cell,
    QuadratureRule,
    barycentric_coeffs,
    equivalence_ratios,
    evaluate_extension,
    extension_grad_lp_norm,
    extension_lp_norm,
    offsets,
)
from latticeckn.funcspace import LatticeFunction
from latticeckn.lattice import Box


def random_function(rng, N=2, L=3):
    box = Box(N, L)
    arr = rng.random(box.shape) * (rng.random(box.shape) < 0.6)
    arr[(L,) * N] = 1.0
    return LatticeFunction.from_dense(arr, box)


def test_coefficient_examples():
    for N in (1, 2, 3):
        for k, off in enumerate(offsets(N)):
            c = barycentric_coeffs(off.astype(float), N)
            assert c[k] == 1.0 and np.sum(c) == 1.0
        assert np.all(barycentric_coeffs([0.5] * N, N) == 2.0**-N)
    assert barycentric_coeffs([0.25], 1).tolist() == [0.75, 0.25]
    with pytest.raises(ValueError):
        barycentric_coeffs([1.5, 0.0], 2)


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_partition_of_unity(x):
    c = barycentric_coeffs(x, 3)
    assert np.all(c >= 0) and abs(math.fsum(c) - 1.0) <= 1e-14


def test_extension_examples(rng):
    assert evaluate_extension(LatticeFunction.delta(2), (0.5, 0.5)) == 0.25
    u = random_function(rng)
    for x in itertools.product(range(-4, 5), repeat=2):
        assert evaluate_extension(u, x) == u(x)
    lin = LatticeFunction(2, {(i, j): float(i) for i in range(-3, 4) for j in range(-3, 4)})
    for x in rng.uniform(-2.9, 2.9, size=(20, 2)):
        assert evaluate_extension(lin, x) == pytest.approx(x[0], abs=1e-13)


def test_extension_is_linear_and_continuous(rng):
    u, v = random_function(rng), random_function(rng)
    for x in rng.uniform(-3, 3, size=(20, 2)):
        lhs = evaluate_extension(u * 2.0 + v * -0.5, x)
        assert lhs == pytest.approx(2.0 * evaluate_extension(u, x) - 0.5 * evaluate_extension(v, x), abs=1e-13)
    # approaching a cell face from both sides
    eps = 1e-12
    for y in rng.uniform(-3, 3, size=5):
        assert evaluate_extension(u, (1 - eps, y)) == pytest.approx(evaluate_extension(u, (1.0, y)), abs=1e-10)


def test_cell_of():
    c = Cell.of(LatticeFunction.delta(2), (-1, -1))
    assert c.values == (0.0, 0.0, 0.0, 1.0)


def test_hat_function_norms():
    u = LatticeFunction.delta(1)
    assert extension_lp_norm(u, 2) == pytest.approx(math.sqrt(2 / 3), abs=1e-10)
    assert extension_grad_lp_norm(u, 2) == pytest.approx(math.sqrt(2), abs=1e-10)
    assert extension_lp_norm(LatticeFunction(2), 2) == 0.0
    assert extension_grad_lp_norm(LatticeFunction(2), 3) == 0.0


def test_tensor_rule_integrates_monomials():
    pts, w = QuadratureRule(3).tensor(2)
    assert math.fsum(w) == pytest.approx(1.0, abs=1e-15)
    # int x^4 y^2 over the unit square
    assert float(np.sum(w * pts[:, 0] ** 4 * pts[:, 1] ** 2)) == pytest.approx(1 / 15, abs=1e-15)


def test_gradient_norm_against_direct_formula_in_2d():
    # u = delta_0, p = 2: on each of the four cells |grad|^2 = x^2 + y^2 in local coordinates
    u = LatticeFunction.delta(2)
    assert extension_grad_lp_norm(u, 2) ** 2 == pytest.approx(4 * (2 / 3), abs=1e-13)
    assert extension_lp_norm(u, 2) ** 2 == pytest.approx(4 * (1 / 9), abs=1e-13)


def test_quadrature_doubling_is_exact_for_p2(rng):
    for _ in range(5):
        u = random_function(rng)
        for f in (extension_lp_norm, extension_grad_lp_norm):
            assert abs(f(u, 2, QuadratureRule(4)) - f(u, 2, QuadratureRule(8))) < 1e-12


def test_equivalence_ratios(rng):
    sample = [random_function(rng) for _ in range(20)]
    s = equivalence_ratios(sample, 2)
    assert 0 < s.lp_min <= s.lp_max < 10 * s.lp_min
    assert 0 < s.grad_min <= s.grad_max < 10 * s.grad_min
    t = equivalence_ratios([u * 7.5 for u in sample], 2)
    assert t.lp == pytest.approx(s.lp, rel=1e-13) and t.grad == pytest.approx(s.grad, rel=1e-13)
    const = LatticeFunction.from_dense(np.ones(Box(2, 6).shape), Box(2, 6))
    c = equivalence_ratios([const], 2)
    assert s.grad_min * 0.5 < c.grad[0] < s.grad_max * 2
    with pytest.raises(ValueError):
        equivalence_ratios([LatticeFunction(2)], 2)
