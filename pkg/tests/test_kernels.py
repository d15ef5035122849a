import os
import subprocess
import sys

import numpy as np
import pytest

from dfie import _kernels_py as py
from dfie import kernels

cy = pytest.importorskip("dfie._kernels")


def _z(rng, n=500):
    return rng.uniform(0, 80, n) + 1j * rng.uniform(0, 10, n)


def test_backend_selected():
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("name", ["jhat", "hhat"])
def test_bessel_backends_agree(name):
    z = _z(np.random.default_rng(1))
    a, b = getattr(py, name)(z, 50), getattr(cy, name)(z, 50)
    np.testing.assert_allclose(b, a, rtol=1e-11, atol=1e-300)


def test_scaled_bessel_and_legendre_backends_agree():
    rng = np.random.default_rng(2)
    z = _z(rng)
    for u, v in zip(py.scaled_bessel(z, 30), cy.scaled_bessel(z, 30)):
        np.testing.assert_allclose(v, u, rtol=1e-11)
    x = np.cos(rng.uniform(0, np.pi, 300))
    s = np.sqrt(1 - x * x)
    for m in (0, 1, 7):
        np.testing.assert_allclose(cy.legendre_column(x, s, m, 40), py.legendre_column(x, s, m, 40),
                                   rtol=1e-12, atol=1e-14)


def test_zero_argument():
    for mod in (py, cy):
        j = mod.jhat(np.array([0j]), 5)[0]
        h = mod.hhat(np.array([0j]), 5)[0]
        np.testing.assert_array_equal(j, np.ones(6))
        np.testing.assert_array_equal(h, np.ones(6))


def test_pure_python_switch():
    env = dict(os.environ, DFIE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import dfie.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
