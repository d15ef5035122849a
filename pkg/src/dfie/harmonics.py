"""Scalar and vector spherical harmonics on the unit sphere.

Y_nm is orthonormal with the Condon-Shortley phase (same as
``scipy.special.sph_harm_y``). The vector basis at degree n >= 1 is

    X = r^ Y,   V = grad_S Y / sqrt(n(n+1)),   W = r^ x V,

all orthonormal under the surface inner product. Everything is evaluated
pole-safely (m Y / sin(theta) is computed from the regular factor).
"""
from dataclasses import dataclass

import numpy as np

from dfie import kernels


def _legendre_parts(n, m, theta):
    """P(n, m), dP/dtheta and m P / sin(theta) for m >= 0, orthonormal with CS phase."""
    x = np.cos(theta)
    s = np.sin(theta)
    cols = {}
    for mm in (m - 1, m, m + 1):
        a = abs(mm)
        if a > n:
            cols[mm] = np.zeros_like(x)
            continue
        p = kernels.legendre_column(x, s, a, n)[:, n]
        cols[mm] = p if mm >= 0 else (-1.0) ** a * p
    P = cols[m]
    dP = 0.5 * np.sqrt((n - m) * (n + m + 1.0)) * cols[m + 1] - 0.5 * np.sqrt((n + m) * (n - m + 1.0)) * cols[m - 1]
    if m == 0:
        mP = np.zeros_like(x)
    else:
        q = kernels.legendre_column(x, np.ones_like(x), m, n)[:, n]
        mP = m * s ** (m - 1) * q
    return P, dP, mP


def frames(theta, phi):
    """Cartesian unit vectors r^, theta^, phi^ as (P, 3) arrays."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = np.stack([st * cp, st * sp, ct], axis=-1)
    that = np.stack([ct * cp, ct * sp, -st], axis=-1)
    phat = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return rhat, that, phat


@dataclass
class HarmonicBasis:
    n: int
    m: int
    Y: np.ndarray
    X: np.ndarray
    V: np.ndarray
    W: np.ndarray

    def surface_div_V(self):
        """Closed form of div_S V_nm = -sqrt(n(n+1)) Y_nm."""
        return -np.sqrt(self.n * (self.n + 1.0)) * self.Y


def harmonic_basis(n: int, m: int, theta, phi) -> HarmonicBasis:
    """Y_nm and the Cartesian components of X, V, W at the given angles.

    For n = 0 the tangential fields V, W are identically zero.
    """
    if n < 0 or abs(m) > n:
        raise ValueError(f"invalid harmonic index (n={n}, m={m})")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float)) * np.ones_like(theta)
    a = abs(m)
    P, dP, mP = _legendre_parts(n, a, theta)
    e = np.exp(1j * a * phi)
    Y = P * e
    dY = dP * e
    imY_s = 1j * mP * e
    rhat, that, phat = frames(theta, phi)
    X = rhat * Y[:, None]
    if n == 0:
        V = np.zeros_like(X)
        W = np.zeros_like(X)
    else:
        L = np.sqrt(n * (n + 1.0))
        V = (dY[:, None] * that + imY_s[:, None] * phat) / L
        W = (-imY_s[:, None] * that + dY[:, None] * phat) / L
    if m < 0:
        sgn = (-1.0) ** a
        Y, X, V, W = (sgn * np.conj(t) for t in (Y, X, V, W))
    return HarmonicBasis(n=n, m=m, Y=Y, X=X, V=V, W=W)


def sph_harm(n, m, theta, phi):
    return harmonic_basis(n, m, theta, phi).Y


@dataclass
class SphereGrid:
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    @property
    def points(self):
        return frames(self.theta, self.phi)[0]


def sphere_grid(n_theta: int, n_phi: int) -> SphereGrid:
    """Gauss-Legendre in cos(theta) x trapezoid in phi; exact for degree < min(2 n_theta, n_phi)."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(np.arccos(x), phi, indexing="ij")
    W = np.repeat(w[:, None], n_phi, axis=1) * (2.0 * np.pi / n_phi)
    return SphereGrid(theta=T.ravel(), phi=P.ravel(), weights=W.ravel())


def grid_for_degree(nmax: int) -> SphereGrid:
    return sphere_grid(nmax + 2, 2 * nmax + 4)


def project_vector(F, grid: SphereGrid, n: int, m: int):
    """(x, v, w) coefficients of a Cartesian vector field sampled on grid."""
    B = harmonic_basis(n, m, grid.theta, grid.phi)
    wt = grid.weights[:, None]
    return tuple(np.sum(wt * F * np.conj(comp)) for comp in (B.X, B.V, B.W))


def project_scalar(f, grid: SphereGrid, n: int, m: int):
    Y = sph_harm(n, m, grid.theta, grid.phi)
    return np.sum(grid.weights * f * np.conj(Y))
