"""Per-degree dense blocks of each integral-equation formulation.

Every block is assembled from principal-value trace symbols (``dfie.symbols``)
plus explicit identity terms coming from the jump relations. Blocks never
depend on the harmonic order m.

Formulations and layouts (n >= 1; the n = 0 reductions drop V/W entries):

    dfie-e    unknowns (a_V, a_W, sigma, b_V, b_W, rho),  rows (f_V, f_W, q, g_V, g_W, p)
    dfie-h    same layout with (eps, mu) <-> (mu, eps) in both media
    dfie-scaled   D_row (B + K) D_col with D_row = diag(1, 1, 1/w, 1/w, 1/w, 1),
                  D_col = diag(1, 1, w, w, w, 1)
    muller    unknowns (K_V, K_W, J_V, J_W) of K^s, J^s; rows (n x (E - E0), n x (H0 - H))
    cc        unknowns (J_V, J_W, K_V, K_W, rho, rho_M); rows
              (n x (H0 - H), n x (E - E0), n.(eps0 E0 - eps E) [+ eta term], n.(mu0 H0 - mu H))
    decoupled-cc scalar systems: see ``assemble_decoupled_cc_scalars``.

Current convention for Muller/cc: J0 = eps0 J^s, J = eps J^s, K0 = mu0 K^s,
K = mu K^s, which makes the scalar densities rho, rho_M shared by both sides.
"""
from dataclasses import dataclass, field

import numpy as np

from dfie.media import ProblemSetup
from dfie.symbols import pv as _pv

FORMULATIONS = ("dfie", "dfie-h", "dfie-scaled", "muller", "cc", "decoupled-cc")


class FormulationError(ValueError):
    pass


@dataclass
class ModeBlock:
    formulation: str
    n: int
    matrix: np.ndarray
    unknowns: tuple
    rows: tuple
    notes: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.matrix.shape[0]

    def singular_values(self):
        if self.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.matrix, compute_uv=False)


def _sym(symbols):
    return _pv if symbols is None else symbols


def _eye2():
    return np.eye(2, dtype=complex)


def _dfie_parts(n, k0, k, mu0, mu, eps0, eps, omega, S):
    """The four block rows of the E-type DFIE as {(row, col): block}."""
    w2 = omega * omega
    P = {}
    if n >= 1:
        P["f", "a"] = 0.5 * (mu0 + mu) * _eye2() + mu0 * S("M", n, k0) - mu * S("M", n, k)
        P["f", "s"] = -(mu0 * S("nxS_n", n, k0) - mu * S("nxS_n", n, k))
        P["f", "b"] = mu0 * eps0 * S("nxS_t", n, k0) - mu * eps * S("nxS_t", n, k)
        P["f", "r"] = S("nxgradS", n, k0) - S("nxgradS", n, k)
        P["q", "b"] = mu0 * eps0 * S("divS_t", n, k0) - mu * eps * S("divS_t", n, k)
        P["g", "a"] = S("nxcurlcurlS_t", n, k0) - S("nxcurlcurlS_t", n, k)
        P["g", "s"] = -(S("nxcurlS_n", n, k0) - S("nxcurlS_n", n, k))
        P["g", "b"] = 0.5 * (eps0 + eps) * _eye2() + eps0 * S("M", n, k0) - eps * S("M", n, k)
        P["p", "a"] = eps0 * mu0 * S("ndotcurlS_t", n, k0) - eps * mu * S("ndotcurlS_t", n, k)
        P["p", "b"] = mu0 * eps0 ** 2 * S("ndotS_t", n, k0) - mu * eps ** 2 * S("ndotS_t", n, k)
    P["q", "s"] = 0.5 * (mu0 + mu) + mu0 * S("D", n, k0) - mu * S("D", n, k)
    P["q", "r"] = -w2 * (mu0 * eps0 * S("S", n, k0) - mu * eps * S("S", n, k))
    P["p", "s"] = -(eps0 * mu0 * S("ndotS_n", n, k0) - eps * mu * S("ndotS_n", n, k))
    P["p", "r"] = -0.5 * (eps0 + eps) + eps0 * S("Sp", n, k0) - eps * S("Sp", n, k)
    return P


def _place(P, row_slices, col_slices, size):
    A = np.zeros((size, size), dtype=complex)
    for (r, c), blk in P.items():
        if r in row_slices and c in col_slices:
            A[row_slices[r], col_slices[c]] = np.asarray(blk).reshape(
                row_slices[r].stop - row_slices[r].start, col_slices[c].stop - col_slices[c].start)
    return A


DFIE_UNKNOWNS = ("a_V", "a_W", "sigma", "b_V", "b_W", "rho")
DFIE_ROWS = ("f_V", "f_W", "q", "g_V", "g_W", "p")


def dfie_layout(n):
    if n >= 1:
        rows = dict(f=slice(0, 2), q=slice(2, 3), g=slice(3, 5), p=slice(5, 6))
        cols = dict(a=slice(0, 2), s=slice(2, 3), b=slice(3, 5), r=slice(5, 6))
        return rows, cols, DFIE_UNKNOWNS, DFIE_ROWS
    rows = dict(q=slice(0, 1), p=slice(1, 2))
    cols = dict(s=slice(0, 1), r=slice(1, 2))
    return rows, cols, ("sigma", "rho"), ("q", "p")


def _dfie_matrix(n, setup, S):
    rows, cols, unk, rws = dfie_layout(n)
    P = _dfie_parts(n, setup.k0, setup.k, setup.mu0, setup.mu, setup.eps0, setup.eps, setup.omega, S)
    return _place(P, rows, cols, len(unk)), unk, rws


def assemble_dfie_E(n: int, setup: ProblemSetup, symbols=None) -> ModeBlock:
    A, unk, rws = _dfie_matrix(n, setup, _sym(symbols))
    return ModeBlock("dfie", n, A, unk, rws)


def assemble_dfie_H(n: int, setup: ProblemSetup, symbols=None) -> ModeBlock:
    A, unk, rws = _dfie_matrix(n, setup.swapped(), _sym(symbols))
    return ModeBlock("dfie-h", n, A, unk, rws)


def dfie_scaling(n, omega):
    """(D_row, D_col) diagonals relating the scaled to the unscaled DFIE."""
    w = float(omega)
    if n >= 1:
        return np.array([1, 1, 1 / w, 1 / w, 1 / w, 1.0]), np.array([1, 1, w, w, w, 1.0])
    return np.array([1 / w, 1.0]), np.array([w, 1.0])


def assemble_dfie_scaled(n: int, setup: ProblemSetup, symbols=None, field: str = "E") -> ModeBlock:
    """High-frequency rescaled DFIE: rows (f, q/w, g/w, p), unknowns (a, w sigma_s, w b_s, rho)."""
    if setup.omega == 0:
        raise FormulationError("scaled DFIE is undefined at omega = 0")
    base = assemble_dfie_E(n, setup, symbols) if field == "E" else assemble_dfie_H(n, setup, symbols)
    dr, dc = dfie_scaling(n, setup.omega)
    A = dr[:, None] * base.matrix * dc[None, :]
    return ModeBlock("dfie-scaled", n, A, base.unknowns, base.rows, notes=dict(D_row=dr, D_col=dc, field=field))


def _require_omega(setup, name):
    if setup.omega == 0:
        raise FormulationError(f"{name} is not supported at omega = 0 (its representation divides by omega)")


def assemble_muller(n: int, setup: ProblemSetup, symbols=None) -> ModeBlock:
    """Muller equation for (K^s, J^s); rows n x (E - E0) = n x E^in and n x (H0 - H) = -n x H^in."""
    _require_omega(setup, "Muller")
    unk = ("K_V", "K_W", "J_V", "J_W")
    rws = ("e_V", "e_W", "h_V", "h_W")
    if n == 0:
        return ModeBlock("muller", 0, np.zeros((0, 0), dtype=complex), (), ())
    S = _sym(symbols)
    k0, k, w = setup.k0, setup.k, setup.omega
    e0, e, m0, m = setup.eps0, setup.eps, setup.mu0, setup.mu
    iw = 1j * w

    def cross(a0, a):
        return iw * (a0 * S("nxS_t", n, k0) - a * S("nxS_t", n, k)) - (S("nxgraddivS_t", n, k0) - S("nxgraddivS_t", n, k)) / iw

    A = np.zeros((4, 4), dtype=complex)
    A[0:2, 0:2] = 0.5 * (m0 + m) * _eye2() + m0 * S("M", n, k0) - m * S("M", n, k)
    A[0:2, 2:4] = -cross(e0 * m0, e * m)
    A[2:4, 2:4] = 0.5 * (e0 + e) * _eye2() + e0 * S("M", n, k0) - e * S("M", n, k)
    A[2:4, 0:2] = cross(e0 * m0, e * m)
    return ModeBlock("muller", n, A, unk, rws)


def cc_layout(n):
    if n >= 1:
        return ("J_V", "J_W", "K_V", "K_W", "rho", "rho_M"), ("h_V", "h_W", "e_V", "e_W", "dE", "dH")
    return ("rho", "rho_M"), ("dE", "dH")


def assemble_charge_current(n: int, setup: ProblemSetup, eta: complex = 0.0, symbols=None) -> ModeBlock:
    """Charge-current system with the eta-weighted continuity term in the normal-E row."""
    _require_omega(setup, "charge-current")
    S = _sym(symbols)
    k0, k, w = setup.k0, setup.k, setup.omega
    e0, e, m0, m = setup.eps0, setup.eps, setup.mu0, setup.mu
    iw = 1j * w
    eta = complex(eta)
    unk, rws = cc_layout(n)
    N = len(unk)
    A = np.zeros((N, N), dtype=complex)
    r_, rm = N - 2, N - 1
    A[r_, r_] = 0.5 * (e0 + e) - e0 * S("Sp", n, k0)[0, 0] + e * S("Sp", n, k)[0, 0] - iw * eta * e0 * S("S", n, k0)[0, 0]
    A[rm, rm] = 0.5 * (m0 + m) - m0 * S("Sp", n, k0)[0, 0] + m * S("Sp", n, k)[0, 0]
    if n >= 1:
        J, K = slice(0, 2), slice(2, 4)
        hr, er = slice(0, 2), slice(2, 4)
        A[hr, J] = 0.5 * (e0 + e) * _eye2() + e0 * S("M", n, k0) - e * S("M", n, k)
        A[hr, K] = iw * (e0 * m0 * S("nxS_t", n, k0) - e * m * S("nxS_t", n, k))
        A[hr, rm] = -(S("nxgradS", n, k0) - S("nxgradS", n, k))[:, 0]
        A[er, K] = 0.5 * (m0 + m) * _eye2() + m0 * S("M", n, k0) - m * S("M", n, k)
        A[er, J] = -iw * (m0 * e0 * S("nxS_t", n, k0) - m * e * S("nxS_t", n, k))
        A[er, r_] = (S("nxgradS", n, k0) - S("nxgradS", n, k))[:, 0]
        A[r_, J] = (iw * (e0 ** 2 * m0 * S("ndotS_t", n, k0) - e ** 2 * m * S("ndotS_t", n, k))
                    + eta * e0 * S("divS_t", n, k0))[0]
        A[r_, K] = -(e0 * m0 * S("ndotcurlS_t", n, k0) - e * m * S("ndotcurlS_t", n, k))[0]
        A[rm, J] = (m0 * e0 * S("ndotcurlS_t", n, k0) - m * e * S("ndotcurlS_t", n, k))[0]
        A[rm, K] = iw * (m0 ** 2 * e0 * S("ndotS_t", n, k0) - m ** 2 * e * S("ndotS_t", n, k))[0]
    return ModeBlock("cc", n, A, unk, rws, notes=dict(eta=eta))


SCALAR_REPRESENTATIONS = ("second-kind", "single-layer")


def _scalar_block(n, k0, k, w0, w, S, representation):
    """Transmission block for (phi0 - phi = d, w0 dphi0/dn - w dphi/dn = g).

    second-kind:  phi0 = D_k0[u]/w0 + S_k0[v],  phi = D_k[u]/w + S_k[v]
    single-layer: phi0 = S_k0[t0],             phi = S_k[t]
    """
    s = lambda op, kk: S(op, n, kk)[0, 0]  # noqa: E731
    if representation == "second-kind":
        return np.array([
            [0.5 * (1 / w0 + 1 / w) + s("D", k0) / w0 - s("D", k) / w, s("S", k0) - s("S", k)],
            [s("T", k0) - s("T", k), -0.5 * (w0 + w) + w0 * s("Sp", k0) - w * s("Sp", k)],
        ], dtype=complex)
    if representation == "single-layer":
        return np.array([
            [s("S", k0), -s("S", k)],
            [w0 * (s("Sp", k0) - 0.5), -w * (s("Sp", k) + 0.5)],
        ], dtype=complex)
    raise FormulationError(f"unknown scalar representation {representation!r}")


def assemble_decoupled_cc_scalars(n: int, setup: ProblemSetup, symbols=None, representation="second-kind"):
    """(phi-system, psi-system) 2x2 blocks; rows (Dirichlet difference, weighted Neumann difference).

    phi uses eps weights, psi uses mu weights. Right-hand sides come from a
    Muller solution (see ``dfie.scatter``).
    """
    S = _sym(symbols)
    unk = ("u", "v") if representation == "second-kind" else ("tau0", "tau")
    phi = _scalar_block(n, setup.k0, setup.k, setup.eps0, setup.eps, S, representation)
    psi = _scalar_block(n, setup.k0, setup.k, setup.mu0, setup.mu, S, representation)
    notes = dict(representation=representation)
    return (ModeBlock("decoupled-cc:phi", n, phi, unk, ("dirichlet", "neumann"), notes),
            ModeBlock("decoupled-cc:psi", n, psi, unk, ("dirichlet", "neumann"), notes))


def dfie_limit_block(n: int, setup: ProblemSetup) -> np.ndarray:
    """Large-n limit of the DFIE block in the component norm.

    The identity terms plus the two entries that stay O(1) as n grows:
    div(mu0 eps0 S_k0 - mu eps S_k) on V and n.curl(eps0 mu0 S_k0 - eps mu S_k) on W,
    whose symbols both tend to -1/2 times their material prefactor.
    """
    e0, e, m0, m = setup.eps0, setup.eps, setup.mu0, setup.mu
    if n == 0:
        return np.diag([0.5 * (m0 + m), -0.5 * (e0 + e)]).astype(complex)
    B = np.diag([0.5 * (m0 + m)] * 3 + [0.5 * (e0 + e)] * 2 + [-0.5 * (e0 + e)]).astype(complex)
    B[2, 3] = -0.5 * (m0 * e0 - m * e)
    B[5, 1] = -0.5 * (e0 * m0 - e * m)
    return B


def assemble(formulation: str, n: int, setup: ProblemSetup, eta: complex = 0.0, symbols=None):
    """List of ModeBlocks making up ``formulation`` at degree n."""
    if formulation == "dfie":
        return [assemble_dfie_E(n, setup, symbols)]
    if formulation == "dfie-h":
        return [assemble_dfie_H(n, setup, symbols)]
    if formulation == "dfie-scaled":
        return [assemble_dfie_scaled(n, setup, symbols)]
    if formulation == "muller":
        return [assemble_muller(n, setup, symbols)]
    if formulation == "cc":
        return [assemble_charge_current(n, setup, eta, symbols)]
    if formulation == "decoupled-cc":
        return [assemble_muller(n, setup, symbols), *assemble_decoupled_cc_scalars(n, setup, symbols)]
    raise FormulationError(f"unknown formulation {formulation!r}; expected one of {', '.join(FORMULATIONS)}")
