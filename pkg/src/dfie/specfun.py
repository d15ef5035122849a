"""Spherical Bessel/Hankel functions of complex argument.

Internally everything is carried in *scaled* form, which stays finite and
O(1)-ish from z = 0 up to |z| ~ 100:

    jhat_l(z) = j_l(z) (2l+1)!! / z^l          (jhat_l(0) = 1)
    hhat_l(z) = z^{l+1} h_l(z) / (-i (2l-1)!!)  (hhat_l(0) = 1)

The layer-potential radial functions used by the symbol and field code are
built from these, so the static limit k -> 0 needs no special casing.
"""
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dfie import kernels


class SpecfunError(ValueError):
    pass


class SingularArgumentError(SpecfunError):
    """h_n(z) requested at z = 0."""


class DomainError(SpecfunError):
    """Non-finite argument or argument in the lower half plane."""


def double_factorials(nmax):
    """(2l+1)!! for l = 0..nmax and (2l-1)!! for l = 0..nmax (with (-1)!! = 1)."""
    odd = np.cumprod(np.arange(1, 2 * nmax + 2, 2, dtype=float))
    lower = np.concatenate(([1.0], odd[:-1]))
    return odd, lower


def _check_arg(z):
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"non-finite argument z={z!r}")
    if z.imag < 0:
        raise DomainError(f"Im z must be >= 0, got z={z!r}")
    return z


@dataclass(frozen=True)
class BesselTable:
    n_max: int
    z: complex
    j: np.ndarray
    h1: np.ndarray
    dj: np.ndarray
    dh1: np.ndarray

    def wronskian(self):
        return self.j * self.dh1 - self.dj * self.h1


def bessel_table(n_max: int, z: complex, with_h1: bool = True) -> BesselTable:
    """j_n, h1_n and derivatives for n = 0..n_max at a single complex z."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    z = _check_arg(z)
    if z == 0 and with_h1:
        raise SingularArgumentError("h1_n is singular at z = 0")
    # Derivatives use the scaled-form equivalent of f_n' = f_{n-1} - (n+1) f_n / z,
    # which avoids the cancellation between the two terms for |z| << n.
    L = n_max + 1
    l = np.arange(L)
    odd, lower = double_factorials(n_max)
    jh = kernels.jhat(np.array([z]), L)[0]
    djh = l * jh[:L] - z * z * jh[1:] / (2 * l + 3)
    if z == 0:
        j = np.where(l == 0, 1.0, 0.0).astype(complex)
        dj = np.where(l == 1, 1.0 / 3.0, 0.0).astype(complex)
    else:
        j = jh[:L] * z ** l / odd
        dj = djh * z ** (l - 1.0) / odd
    if with_h1:
        hh = kernels.hhat(np.array([z]), L)[0]
        h = -1j * lower * hh[:L] / z ** (l + 1.0)
        dh = -1j * lower * (l * hh[:L] - (2 * l + 1) * hh[1:]) / z ** (l + 2.0)
    else:
        h = dh = np.full(L, np.nan + 0j)
    return BesselTable(n_max=n_max, z=z, j=j, h1=h, dj=dj, dh1=dh)


def small_z_static_limit(n: int):
    """k -> 0 limits of the two scalar symbol products at degree n.

    Returns (lim i k j_n(k) h1_n(k), lim of the principal-value S' eigenvalue),
    i.e. 1/(2n+1) and -1/(2(2n+1)) for the Laplace kernel 1/(4 pi r).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return 1.0 / (2 * n + 1), -1.0 / (2.0 * (2 * n + 1))


def single_layer_eigenvalue(n: int, k: complex) -> complex:
    """i k j_n(k) h1_n(k) = jhat_n(k) hhat_n(k) / (2n+1)."""
    k = _check_arg(k)
    if k == 0:
        return complex(small_z_static_limit(n)[0])
    jh, hh = kernels.scaled_bessel(np.array([k]), n)
    return complex(jh[0, n] * hh[0, n] / (2 * n + 1))


def layer_radial(lmax: int, k: complex, r, side: str):
    """Radial profile of the single layer of Y_l on the unit sphere.

    S_k[Y_lm](r x^) = f_l(r) Y_lm(x^). ``side`` is 'int' (r <= 1) or 'ext'
    (r >= 1); at r = 1 the two give the one-sided limits. Returns f, f', f''
    each with shape (len(r), lmax + 1).
    """
    k = _check_arg(k)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 1e-8):
        raise ValueError("radial evaluation needs r >= 1e-8")
    l = np.arange(lmax + 1)
    L = lmax + 1
    kk = np.array([k])
    jk, hk = kernels.scaled_bessel(kk, L)
    jk, hk = jk[0], hk[0]
    rr = r[:, None]
    if side == "int":
        jr = kernels.jhat(k * r, L)
        f = rr ** l * jr[:, :L] * hk[:L] / (2 * l + 1)
        fp = hk[:L] * rr ** (l - 1.0) * (l * jr[:, :L] - (k * rr) ** 2 * jr[:, 1:] / (2 * l + 3)) / (2 * l + 1)
    elif side == "ext":
        hr = kernels.hhat(k * r, L)
        f = rr ** (-l - 1.0) * hr[:, :L] * jk[:L] / (2 * l + 1)
        fp = jk[:L] * rr ** (-l - 2.0) * (l * hr[:, :L] - (2 * l + 1) * hr[:, 1:]) / (2 * l + 1)
    else:
        raise ValueError(f"side must be 'int' or 'ext', got {side!r}")
    fpp = -2.0 / rr * fp - (k * k - l * (l + 1) / rr ** 2) * f
    return f, fp, fpp


def log_derivatives(lmax: int, z: complex):
    """z j_l'(z)/j_l(z) and z h_l'(z)/h_l(z) for l = 0..lmax, from scaled forms."""
    z = _check_arg(z)
    l = np.arange(lmax + 1)
    jh, hh = kernels.scaled_bessel(np.array([z]), lmax + 1)
    jh, hh = jh[0], hh[0]
    dj = (l * jh[:-1] - z * z * jh[1:] / (2 * l + 3)) / jh[:-1]
    dh = (l * hh[:-1] - (2 * l + 1) * hh[1:]) / hh[:-1]
    return dj, dh


@functools.lru_cache(maxsize=None)
def _product_series(n, terms):
    """Taylor coefficients c_p of jhat_n(k) hhat_n(k) / (2n+1) in powers of k."""
    # jhat_n: even series
    jh = np.zeros(terms, dtype=complex)
    t = Fraction(1)
    for s in range(0, (terms + 1) // 2):
        if 2 * s < terms:
            jh[2 * s] = float(t)
        t = t * Fraction(-1, 2) / ((s + 1) * (2 * n + 2 * s + 3))
    # exp(-ik) hhat_n(k) is a polynomial of degree n (finite Hankel sum)
    poly = np.zeros(terms, dtype=complex)
    dfac = math.prod(range(2 * n - 1, 0, -2)) if n > 0 else 1
    for s in range(n + 1):
        a = Fraction(math.factorial(n + s), math.factorial(s) * math.factorial(n - s))
        p = n - s
        if p < terms:
            poly[p] = float(a / (2 ** s * dfac)) * (-1j) ** n * 1j ** s
    ex = np.array([1j ** p / math.factorial(p) for p in range(terms)])
    c = np.convolve(np.convolve(jh, ex)[:terms], poly)[:terms]
    return c / (2 * n + 1)


def single_layer_eigenvalue_difference(n: int, k0: complex, k: complex, terms: int = 40) -> complex:
    """s_n(k0) - s_n(k) without cancellation for small |k0|, |k|.

    Uses the Taylor series of jhat_n hhat_n and k0^p - k^p = (k0 - k) sum k0^(p-1-j) k^j.
    """
    k0, k = _check_arg(k0), _check_arg(k)
    if max(abs(k0), abs(k)) > 0.5:
        return single_layer_eigenvalue(n, k0) - single_layer_eigenvalue(n, k)
    c = _product_series(n, terms)
    total = 0j
    # q_p = sum_{j<p} k0^(p-1-j) k^j via q_{p+1} = k0 q_p + k^p
    q = 0j
    kp = 1.0 + 0j
    for p in range(1, terms):
        q = k0 * q + kp
        kp = kp * k
        total += c[p] * q
    return complex((k0 - k) * total)
