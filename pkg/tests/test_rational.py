import numpy as np
import pytest

from diskbundle.errors import DataError, ParameterError
from diskbundle.rational import RationalFunction, poly_add, poly_from_roots, poly_mul, poly_roots


def test_polynomial_evaluation():
    f = RationalFunction([1.0, 2.0, 3.0])  # 1 + 2z + 3z^2
    assert f(0.0) == 1.0
    assert f(1.0) == 6.0
    assert f(2.0) == 1 + 4 + 12


def test_rational_evaluation_and_pole():
    f = RationalFunction([1.0], [1.0, -0.5])  # 1/(1 - 0.5 z)
    assert f(0.0) == 1.0
    assert abs(f(1.0) - 2.0) < 1e-15
    assert np.allclose(f.poles(), [2.0])


def test_exact_derivative_matches_symbolic():
    f = RationalFunction([0.0, 1.0, 1.0], [1.0, -0.25])  # (z + z^2)/(1 - z/4)
    z = 0.3 + 0.1j
    h = 1e-6
    numeric = (f(z + h) - f(z - h)) / (2 * h)
    assert abs(f.eval_deriv(z) - numeric) < 1e-8
    assert abs(f.deriv()(z) - f.eval_deriv(z)) < 1e-12


def test_vectorized_evaluation():
    f = RationalFunction([1.0, 1.0])
    z = np.array([0.0, 1.0, 1j])
    assert np.allclose(f(z), [1.0, 2.0, 1 + 1j])


def test_arithmetic():
    a = RationalFunction([0.0, 1.0])            # z
    b = RationalFunction([1.0], [1.0, -0.5])    # 1/(1-0.5z)
    z = 0.37 - 0.21j
    assert abs((a * b)(z) - a(z) * b(z)) < 1e-14
    assert abs((a + b)(z) - (a(z) + b(z))) < 1e-14


def test_poly_helpers():
    assert np.allclose(poly_mul([1, 1], [1, -1]), [1, 0, -1])
    assert np.allclose(poly_add([1, 2], [3]), [4, 2])
    roots = poly_roots(poly_from_roots([0.5, -2.0]))
    assert sorted(np.round(roots.real, 10)) == [-2.0, 0.5]


def test_zero_denominator_rejected():
    with pytest.raises(ParameterError):
        RationalFunction([1.0], [0.0])


def test_json_round_trip():
    f = RationalFunction([1.0, 2.0 + 1.0j], [1.0, 0.0, -0.125])
    g = RationalFunction.from_jsonable(f.to_jsonable())
    assert np.array_equal(f.num, g.num)
    assert np.array_equal(f.den, g.den)


def test_json_validation_names_field():
    with pytest.raises(DataError) as err:
        RationalFunction.from_jsonable({"num": [[1.0, 0.0]], "den": [[1.0]]}, field="entries[0][1]")
    assert "entries[0][1].den" in str(err.value)
