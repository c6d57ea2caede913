import math

import numpy as np
from numpy.testing import assert_allclose

from micz_lab import dual


def test_product_rule():
    x, y = dual.seed([2.0, 3.0])
    f = x * x * y
    assert_allclose(f.val, 12.0)
    assert_allclose(f.grad, [12.0, 4.0])


def test_quotient_and_power():
    (x,) = dual.seed([0.7])
    f = 1.0 / x + x**3
    assert_allclose(f.grad, [-1 / 0.49 + 3 * 0.49])


def test_elementary_functions_match_closed_forms():
    (x,) = dual.seed([0.4])
    cases = [
        (dual.sqrt(x), 0.5 / math.sqrt(0.4)),
        (dual.exp(x), math.exp(0.4)),
        (dual.log(x), 1 / 0.4),
        (dual.sin(x), math.cos(0.4)),
        (dual.cos(x), -math.sin(0.4)),
        (dual.sinh(x), math.cosh(0.4)),
        (dual.cosh(x), math.sinh(0.4)),
        (dual.asinh(x), 1 / math.sqrt(1 + 0.16)),
    ]
    for f, d in cases:
        assert_allclose(f.grad[0], d, rtol=1e-14)


def test_atan2_partials():
    y, x = dual.seed([0.3, -0.8])
    f = dual.atan2(y, x)
    r2 = 0.73
    assert_allclose(f.val, math.atan2(0.3, -0.8))
    assert_allclose(f.grad, [-0.8 / r2, -0.3 / r2])


def test_complex_values_with_real_seeds():
    a, b = dual.seed([0.5, -1.5])
    z = a + 1j * b
    f = z * dual.conj(z)
    assert_allclose(dual.real(f).grad, [1.0, -3.0])
    assert_allclose(dual.imag(f).grad, [0.0, 0.0], atol=1e-15)


def test_nested_second_derivative():
    (outer,) = dual.seed([1.3])
    (inner,) = dual.seed([outer])
    f = inner * inner * inner
    first = f.grad[0]  # d/dx x^3 as an outer Dual
    assert_allclose(first.val, 3 * 1.69)
    assert_allclose(first.grad[0], 6 * 1.3)


def test_comparisons_use_value():
    (x,) = dual.seed([2.0])
    assert x > 1.0 and x < 3.0 and abs(-x).val == 2.0


def test_numpy_scalar_defers_to_dual():
    (x,) = dual.seed([2.0])
    f = np.float64(3.0) * x
    assert isinstance(f, dual.Dual)
    assert_allclose(f.grad, [3.0])
