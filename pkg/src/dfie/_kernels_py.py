"""Pure numpy implementations of the hot kernels.

Mirrors ``dfie._kernels`` (Cython) function for function; ``dfie.kernels``
picks whichever is importable.
"""
import numpy as np

SERIES_RADIUS = 1e-2
_SERIES_TERMS = 12


def jhat_series(z, lmax):
    """Power series for the scaled regular function j_l(z) (2l+1)!! / z^l."""
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty((z.size, lmax + 1), dtype=complex)
    w = -0.5 * z * z
    for l in range(lmax + 1):
        term = np.ones_like(z)
        acc = np.ones_like(z)
        for s in range(1, _SERIES_TERMS + 1):
            term = term * w / (s * (2 * l + 2 * s + 1))
            acc = acc + term
        out[:, l] = acc
    return out


def miller_start(zabs, lmax):
    return int(lmax + 25 + 1.5 * zabs + 12.0 * zabs ** (1.0 / 3.0))


def jhat_miller(z, lmax):
    """Downward (Miller) recurrence for the scaled regular function.

    Normalised against j_0 = sin z / z, or j_1 when sin z is close to zero
    (only possible for |z| >= pi).
    """
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty((z.size, lmax + 1), dtype=complex)
    if z.size == 0:
        return out
    top = miller_start(float(np.max(np.abs(z))), lmax)
    z2 = z * z
    nxt = np.zeros_like(z)
    cur = np.ones_like(z)
    # scaled values stay within ~1e+-50 for |z| <= 1e2, no rescaling needed
    for l in range(top, 0, -1):
        prev = cur - z2 * nxt / ((2 * l + 1) * (2 * l + 3))
        nxt, cur = cur, prev
        if l - 1 <= lmax:
            out[:, l - 1] = cur
    t0 = np.sin(z) / z
    t1 = 3.0 * (np.sin(z) - z * np.cos(z)) / (z * z2)
    if lmax >= 1:
        r0, r1 = out[:, 0], out[:, 1]
    else:
        # need the l=1 value even when lmax == 0
        r0 = out[:, 0]
        r1 = r0 * 0.0
    # the j_1 closed form cancels for small |z|; sin z has no zeros for |z| < pi
    use0 = (np.abs(r0) >= np.abs(r1)) | (np.abs(z) < 2.0)
    scale = np.where(use0, t0 / np.where(use0, r0, 1.0), t1 / np.where(use0, 1.0, r1))
    return out * scale[:, None]


def jhat(z, lmax):
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty((z.size, lmax + 1), dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    if np.any(small):
        out[small] = jhat_series(z[small], lmax)
    if np.any(~small):
        out[~small] = jhat_miller(z[~small], max(lmax, 1))[:, : lmax + 1]
    return out


def hhat(z, lmax):
    """Upward recurrence for the scaled outgoing function z^{l+1} h_l(z) / (-i (2l-1)!!).

    Stable in the closed upper half plane: j_l / h_l decreases with l, so the
    parasitic regular component never grows relative to h_l.
    """
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty((z.size, lmax + 1), dtype=complex)
    e = np.exp(1j * z)
    out[:, 0] = e
    if lmax >= 1:
        out[:, 1] = e * (1.0 - 1j * z)
    z2 = z * z
    for l in range(1, lmax):
        out[:, l + 1] = out[:, l] - z2 * out[:, l - 1] / ((2 * l + 1) * (2 * l - 1))
    return out


def scaled_bessel(z, lmax):
    """Return (jhat, hhat), each of shape (len(z), lmax + 1)."""
    return jhat(z, lmax), hhat(z, lmax)


def legendre_column(x, s, m, lmax):
    """Orthonormal associated Legendre values for fixed order m >= 0.

    Returns P[:, l] = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(x) including the
    Condon-Shortley phase, with sin(theta)^m replaced by s^m (pass s = 1 to get
    the regular factor P / sin^m). Columns l < m are zero.
    """
    x = np.asarray(x, dtype=float).ravel()
    s = np.asarray(s, dtype=float).ravel() * np.ones_like(x)
    out = np.zeros((x.size, lmax + 1))
    if m > lmax:
        return out
    p = np.full_like(x, 1.0 / np.sqrt(4.0 * np.pi))
    for j in range(1, m + 1):
        p = -np.sqrt((2.0 * j + 1.0) / (2.0 * j)) * s * p
    out[:, m] = p
    if m + 1 <= lmax:
        out[:, m + 1] = np.sqrt(2.0 * m + 3.0) * x * p
    for l in range(m + 2, lmax + 1):
        a = np.sqrt((2.0 * l + 1) * (2.0 * l - 1) / ((l - m) * (l + m)))
        b = np.sqrt((2.0 * l + 1) * (l + m - 1) * (l - m - 1) / ((l - m) * (l + m) * (2.0 * l - 3)))
        out[:, l] = a * x * out[:, l - 1] - b * out[:, l - 2]
    return out
