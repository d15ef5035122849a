import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from dfie.specfun import (DomainError, SingularArgumentError, bessel_table, double_factorials, layer_radial,
                          log_derivatives, single_layer_eigenvalue, single_layer_eigenvalue_difference,
                          small_z_static_limit)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 60), r=st.floats(1e-2, 100.0), t=st.floats(0.0, np.pi))
def test_wronskian(n, r, t):
    z = r * np.exp(1j * t)
    W = bessel_table(n, z).wronskian()[n]
    assert abs(W - 1j / z ** 2) <= 1e-12 * abs(1j / z ** 2)


@pytest.mark.parametrize("z", [0.3, 2.5, 17.0, 80.0])
def test_real_argument_matches_scipy(z):
    t = bessel_table(40, z)
    n = np.arange(41)
    j, y = special.spherical_jn(n, z), special.spherical_yn(n, z)
    np.testing.assert_allclose(t.j.real, j, rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(t.h1, j + 1j * y, rtol=1e-12)
    np.testing.assert_allclose(t.dj.real, special.spherical_jn(n, z, derivative=True), rtol=1e-11, atol=1e-300)


@pytest.mark.parametrize("z,n", [(2 + 1j, 7), (1e-3 + 1e-3j, 12), (30 + 20j, 45), (5j, 3), (0.5 + 60j, 20)])
def test_complex_argument_against_mpmath(z, n):
    t = bessel_table(n, z)
    mpmath.mp.dps = 60
    jm = complex(mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.besselj(n + 0.5, z))
    hm = complex(mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.hankel1(n + 0.5, z))
    assert abs(t.j[n] - jm) <= 1e-12 * abs(jm)
    assert abs(t.h1[n] - hm) <= 1e-12 * abs(hm)


def test_double_factorials():
    odd, lower = double_factorials(5)
    np.testing.assert_array_equal(odd, [1, 3, 15, 105, 945, 10395])
    np.testing.assert_array_equal(lower, [1, 1, 3, 15, 105, 945])


def test_argument_errors():
    with pytest.raises(SingularArgumentError):
        bessel_table(3, 0.0)
    with pytest.raises(DomainError):
        bessel_table(3, 1 - 1j)
    with pytest.raises(DomainError):
        bessel_table(3, complex(np.nan, 0))
    with pytest.raises(ValueError):
        bessel_table(-1, 1.0)
    t = bessel_table(3, 0.0, with_h1=False)
    np.testing.assert_array_equal(t.j, [1, 0, 0, 0])


@pytest.mark.parametrize("n", [0, 1, 5, 20])
def test_single_layer_eigenvalue_and_static_limit(n):
    k = 1.7 + 0.2j
    t = bessel_table(n, k)
    assert abs(single_layer_eigenvalue(n, k) - 1j * k * t.j[n] * t.h1[n]) < 1e-13
    assert single_layer_eigenvalue(n, 0) == pytest.approx(small_z_static_limit(n)[0])
    # s_n(k) = 1/(2n+1) + O(k) (the O(k) term is i k for n = 0)
    assert abs(single_layer_eigenvalue(n, 1e-7) - 1 / (2 * n + 1)) < 2e-7


@pytest.mark.parametrize("n", [0, 1, 4, 9])
@pytest.mark.parametrize("k0,k", [(1e-4, 1.3e-4), (1e-2, (-2 + 1j) ** 0.5 * 1e-2), (0.3, 0.45 + 0.1j)])
def test_eigenvalue_difference_series(n, k0, k):
    mpmath.mp.dps = 50

    def s(kk):
        kk = mpmath.mpc(kk)
        j = mpmath.sqrt(mpmath.pi / (2 * kk)) * mpmath.besselj(n + 0.5, kk)
        y = mpmath.sqrt(mpmath.pi / (2 * kk)) * mpmath.bessely(n + 0.5, kk)
        return 1j * kk * j * (j + 1j * y)

    ref = complex(s(k0) - s(k))
    got = single_layer_eigenvalue_difference(n, k0, k)
    assert abs(got - ref) <= 1e-12 * abs(ref)


def test_layer_radial_continuity_and_jump():
    k = 2 + 0.5j
    fi, dfi, _ = layer_radial(8, k, [1.0], "int")
    fe, dfe, _ = layer_radial(8, k, [1.0], "ext")
    np.testing.assert_allclose(fi, fe, rtol=1e-13)
    # d/dr jumps by -1 across a unit single layer
    np.testing.assert_allclose(dfe - dfi, -np.ones_like(dfe), atol=1e-12)
    with pytest.raises(ValueError):
        layer_radial(3, k, [1.0], "both")


def test_log_derivatives():
    z = 3 + 1j
    dj, dh = log_derivatives(10, z)
    t = bessel_table(10, z)
    np.testing.assert_allclose(dj, z * t.dj / t.j, rtol=1e-12)
    np.testing.assert_allclose(dh, z * t.dh1 / t.h1, rtol=1e-12)
