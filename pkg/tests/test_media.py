import numpy as np
import pytest

from dfie.media import InvalidMaterialError, Medium, ProblemSetup, default_nmax, make_setup, validate_setup, wavenumber


@pytest.mark.parametrize("eps,mu", [(1.3, 1), (-2 + 1j, -1 + 1j), (-3 + 1j, -2 + 0.5j), (1 + 1e-12j, 4)])
def test_passive_accepted_and_branch(eps, mu):
    st = make_setup(2.0, eps, mu)
    assert st.k.imag >= 0
    assert st.k ** 2 == pytest.approx(4.0 * complex(eps) * complex(mu))


@pytest.mark.parametrize("eps,mu,param", [(-1.0, 1.0, "interior.epsilon"), (1.0, 1 - 0.1j, "interior.mu"),
                                          (np.nan, 1.0, "interior.epsilon"), (0.0, 1.0, "interior.epsilon")])
def test_rejects_active_or_invalid(eps, mu, param):
    with pytest.raises(InvalidMaterialError) as e:
        make_setup(1.0, eps, mu)
    assert e.value.param == param


def test_rejects_bad_exterior_and_omega():
    with pytest.raises(InvalidMaterialError):
        make_setup(1.0, 1.3, 1.0, eps0=-1.0)
    with pytest.raises(ValueError):
        make_setup(-1.0, 1.3, 1.0)
    with pytest.raises(ValueError):
        make_setup(float("inf"), 1.3, 1.0)
    with pytest.raises(ValueError):
        make_setup(1.0, 1.3, 1.0, n_max=-2)


def test_zero_frequency():
    st = make_setup(0.0, -2 + 1j, -1 + 1j)
    assert st.k == 0 and st.k0 == 0
    assert wavenumber(0.0, Medium(2.0, 2.0)) == 0


def test_swapped_and_nmax():
    st = validate_setup(ProblemSetup(3.0, Medium(2 + 1j, 0.5), Medium(1.0, 1.5)))
    sw = st.swapped()
    assert (sw.eps, sw.mu, sw.eps0, sw.mu0) == (st.mu, st.eps, st.mu0, st.eps0)
    assert sw.k == st.k and sw.k0 == st.k0
    assert st.nmax == default_nmax(3.0, st.interior, st.exterior) >= 4
    assert make_setup(1.0, 1.3, 1.0, n_max=7).nmax == 7
