import cmath
import math

import numpy as np
import numpy.testing as npt
import pytest
import scipy.special
from hypothesis import given, strategies as st

from critmet import numerics
from critmet.errors import ConfigurationError, DomainError, NumericalError, ValidationError


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return a + a.T


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_ql_matches_lapack(rng, n):
    a = random_symmetric(rng, n)
    ql = numerics.eigh_symmetric(a, method="ql")
    la = numerics.eigh_symmetric(a, method="lapack")
    npt.assert_allclose(ql.values, la.values, atol=1e-10)
    npt.assert_allclose(ql.vectors.T @ ql.vectors, np.eye(n), atol=1e-10)
    npt.assert_allclose(a @ ql.vectors, ql.vectors * ql.values, atol=1e-9)


def test_ql_degenerate_spectrum():
    a = np.diag([1.0, 1.0, 2.0, 2.0, 2.0])
    q = np.linalg.qr(np.random.default_rng(0).normal(size=(5, 5)))[0]
    es = numerics.eigh_symmetric(q @ a @ q.T, method="ql")
    npt.assert_allclose(es.values, [1, 1, 2, 2, 2], atol=1e-12)


def test_eigh_rejects_bad_input():
    with pytest.raises(ValidationError):
        numerics.eigh_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValidationError):
        numerics.eigh_symmetric(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        numerics.eigh_symmetric(np.eye(2), method="jacobi")


def test_check_hermitian():
    h = np.array([[1.0, 1j], [-1j, 2.0]])
    npt.assert_array_equal(numerics.check_hermitian(h), h)
    with pytest.raises(ValidationError):
        numerics.check_hermitian(np.array([[1.0, 1j], [1j, 2.0]]))


def test_pseudoinverse_rank_one():
    v = np.array([1.0, -1.0]) / math.sqrt(2)
    a = 2.0 * np.outer(v, v)
    npt.assert_allclose(numerics.pseudoinverse_psd(a), 0.5 * np.outer(v, v), atol=1e-14)
    npt.assert_array_equal(numerics.pseudoinverse_psd(np.zeros((3, 3))), np.zeros((3, 3)))
    with pytest.raises(DomainError):
        numerics.pseudoinverse_psd(np.diag([1.0, -1.0]))


def test_pseudoinverse_penrose_conditions(rng):
    b = rng.normal(size=(6, 3))
    a = b @ b.T
    p = numerics.pseudoinverse_psd(a)
    npt.assert_allclose(a @ p @ a, a, atol=1e-10)
    npt.assert_allclose(p @ a @ p, p, atol=1e-10)


def test_digamma_special_values():
    euler = 0.5772156649015329
    npt.assert_allclose(numerics.digamma(1.0).real, -euler, atol=1e-12)
    npt.assert_allclose(numerics.digamma(0.5).real, -euler - 2 * math.log(2), atol=1e-12)
    npt.assert_allclose(numerics.digamma(2.0).real, 1 - euler, atol=1e-12)


def test_digamma_frozen_complex():
    npt.assert_allclose(numerics.digamma(1 + 2j), 0.7145915153739784 + 1.3208072826422297j, rtol=1e-13)


@pytest.mark.parametrize("z", [0.1 + 0.1j, -2.5 + 0.3j, 3.7 - 8j, 25 + 1e-3j, 0.5 + 40j, -7.2])
def test_digamma_against_scipy(z):
    npt.assert_allclose(numerics.digamma(z), scipy.special.psi(complex(z)), rtol=1e-12, atol=1e-12)


def test_digamma_identities():
    z = 0.3 + 0.7j
    npt.assert_allclose(numerics.digamma(z + 1), numerics.digamma(z) + 1 / z, rtol=1e-13)
    # reflection psi(1-z) - psi(z) = pi cot(pi z)
    npt.assert_allclose(numerics.digamma(1 - z) - numerics.digamma(z), math.pi / cmath.tan(math.pi * z), rtol=1e-12)
    npt.assert_allclose(numerics.digamma(z.conjugate()), numerics.digamma(z).conjugate(), rtol=1e-14)


def test_digamma_pole():
    with pytest.raises(DomainError):
        numerics.digamma(-3.0)
    with pytest.raises(DomainError):
        numerics.digamma(0.0)


@given(st.floats(0.05, 30.0), st.floats(1e-6, 20.0))
def test_digamma_difference_real_y(a, y):
    direct = (numerics.digamma(a + 1j * y) - numerics.digamma(a - 1j * y)) / (2j * y)
    npt.assert_allclose(numerics.digamma_difference(a, y), direct.real, rtol=1e-9)


@given(st.floats(0.5, 30.0), st.floats(0.01, 0.95))
def test_digamma_difference_imaginary_y(a, frac):
    y = frac * a
    direct = (numerics.digamma(a - y) - numerics.digamma(a + y)).real / (-2 * y)
    npt.assert_allclose(numerics.digamma_difference(a, 1j * y), direct, rtol=1e-8)


def test_digamma_difference_trigamma_limit():
    npt.assert_allclose(numerics.digamma_difference(1.0, 0.0), math.pi ** 2 / 6, rtol=1e-13)
    npt.assert_allclose(numerics.digamma_difference(1.3, 1e-9), scipy.special.polygamma(1, 1.3), rtol=1e-13)
    npt.assert_allclose(numerics.digamma_difference(1.3, 0.7), 0.9784490049919851, rtol=1e-13)
    with pytest.raises(DomainError):
        numerics.digamma_difference(1.0, 2j)
    with pytest.raises(ValidationError):
        numerics.digamma_difference(1.0, 1 + 1j)


def test_finite_differences():
    npt.assert_allclose(numerics.central_diff(np.sin, 0.4, 1e-5), math.cos(0.4), rtol=1e-9)
    npt.assert_allclose(numerics.richardson_diff(np.exp, 1.0, 1e-2), math.e, rtol=1e-9)
    with pytest.raises(ValidationError):
        numerics.central_diff(np.sin, 0.0, 0.0)
    with pytest.raises(DomainError):
        numerics.central_diff(lambda x: 1.0 / x if x > 0 else math.inf, 0.0, 1e-3)


def test_fits():
    x = np.array([1.0, 2, 4, 8, 16])
    res = numerics.loglog_fit(x, 3.0 * x ** 1.5)
    npt.assert_allclose([res.exponent, res.prefactor, res.r_squared], [1.5, 3.0, 1.0], rtol=1e-12)
    slope, intercept, r2 = numerics.linear_fit(x, 2 * x - 1)
    npt.assert_allclose([slope, intercept, r2], [2, -1, 1], atol=1e-12)
    with pytest.raises(DomainError):
        numerics.loglog_fit(x, -x)
    with pytest.raises(ValidationError):
        numerics.loglog_fit(x[:2], x[:2])
    with pytest.raises(DomainError):
        numerics.linear_fit(np.ones(3), x[:3])


def test_propagation_two_level():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    psi = numerics.propagate_schrodinger(h, [1.0, 0.0], 0.7, 1e-3)
    npt.assert_allclose(psi, [math.cos(0.7), -1j * math.sin(0.7)], atol=1e-10)
    with pytest.raises(ConfigurationError):
        numerics.propagate_schrodinger(h, [1.0, 0.0], 1.0, 0.5)
    with pytest.raises(ConfigurationError):
        numerics.propagate_schrodinger(h, [1.0, 0.0], 1.0, -1.0)


def test_golden_and_grid_max():
    x, fx = numerics.golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    npt.assert_allclose([x, fx], [0.3, 0.0], atol=1e-9)
    x, fx = numerics.grid_then_golden_max(lambda t: math.cos(2 * (t - 2.9)), 0.0, math.pi, periodic=True)
    npt.assert_allclose([x, fx], [2.9, 1.0], atol=1e-8)
    # flat profile keeps the first grid point
    assert numerics.grid_then_golden_max(lambda t: 1.0, 0.0, 1.0) == (0.0, 1.0)


def test_operator_norm():
    npt.assert_allclose(numerics.operator_norm(np.diag([1.0, -3.0])), 3.0)


def test_numerical_error_is_arithmetic():
    assert issubclass(NumericalError, ArithmeticError)
