"""Plane-wave scattering by the unit sphere: data, solves, fields, Mie reference.

Coefficient conventions: every per-degree quantity is an array whose last
axis runs over m = -n..n. Vector fields are written a X + b V + c W (see
``dfie.harmonics``). Incident fields use the regular multipole expansion

    E^in = sum_nm alpha_nm M_nm + beta_nm N_nm,   M = curl(x j_n(k0 r) Y_nm),
    N = curl M / k0,

so M = -L j W and N = n(n+1) j/(kr) X + L (j/(kr) + j') V with L = sqrt(n(n+1)).

Field samples report the *scattered* field outside the sphere and the
*total* field inside, which is what every representation produces directly.
"""
from dataclasses import dataclass, field

import numpy as np

from dfie import kernels
from dfie.formulations import (FORMULATIONS, FormulationError, assemble_charge_current,
                               assemble_decoupled_cc_scalars, assemble_dfie_E, assemble_dfie_H,
                               assemble_dfie_scaled, assemble_muller, dfie_scaling)
from dfie.harmonics import harmonic_basis
from dfie.media import ProblemSetup, validate_setup
from dfie.specfun import double_factorials, single_layer_eigenvalue_difference
from dfie.symbols import RadialLayer, pv

EXCLUSION_BAND = 1e-3
SINGULAR_RTOL = 1e-13
MULLER_MIN_OMEGA = 1e-3


class NearSingularError(RuntimeError):
    """A block whose smallest singular value is below SINGULAR_RTOL times its norm."""

    def __init__(self, formulation, n, omega, smin, smax):
        self.formulation, self.n, self.omega = formulation, n, omega
        self.smin, self.smax = smin, smax
        super().__init__(f"{formulation}: near-singular block at n={n}, omega={omega!r} "
                         f"(sigma_min={smin:.3e}, sigma_max={smax:.3e})")


class FieldEvaluationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# plane wave

@dataclass(frozen=True)
class PlaneWave:
    direction: tuple = (0.0, 0.0, 1.0)
    polarization: tuple = (1.0, 0.0, 0.0)
    amplitude: complex = 1.0

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        p = np.asarray(self.polarization, dtype=complex)
        if d.shape != (3,) or p.shape != (3,):
            raise ValueError("direction and polarization must be 3-vectors")
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise ValueError(f"direction must be a unit vector, |d| = {np.linalg.norm(d)}")
        if abs(np.linalg.norm(p) - 1.0) > 1e-12:
            raise ValueError(f"polarization must be a unit vector, |p| = {np.linalg.norm(p)}")
        if abs(np.dot(d, p)) > 1e-12:
            raise ValueError("polarization must be orthogonal to the direction")
        object.__setattr__(self, "direction", tuple(d))
        object.__setattr__(self, "polarization", tuple(p))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def d(self):
        return np.array(self.direction)

    @property
    def p(self):
        return np.array(self.polarization)

    def fields(self, points, setup: ProblemSetup):
        """(E^in, H^in) at Cartesian points (P, 3); H^in = sqrt(eps0/mu0) d x E^in."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        ph = np.exp(1j * setup.k0 * (x @ self.d))
        E = self.amplitude * ph[:, None] * self.p[None, :]
        H = np.sqrt(setup.eps0 / setup.mu0) * np.cross(self.d[None, :], E)
        return E, H

    def multipole_coefficients(self, n: int):
        """(alpha, beta) for m = -n..n (n >= 1)."""
        th = np.arccos(np.clip(self.d[2], -1.0, 1.0))
        ph = np.arctan2(self.d[1], self.d[0])
        L = np.sqrt(n * (n + 1.0))
        dxp = np.cross(self.d, self.p)
        alpha = np.empty(2 * n + 1, dtype=complex)
        beta = np.empty(2 * n + 1, dtype=complex)
        for i, m in enumerate(range(-n, n + 1)):
            V = harmonic_basis(n, m, th, ph).V[0]
            alpha[i] = 4 * np.pi * 1j ** n * np.dot(dxp, np.conj(V)) / L
            beta[i] = 4 * np.pi * 1j ** (n - 1) * np.dot(self.p, np.conj(V)) / L
        return self.amplitude * alpha, self.amplitude * beta


def _regular_parts(n, k):
    """j_n(k), j_n(k)/k and j_n'(k) from the scaled function (finite at k = 0)."""
    jh = kernels.jhat(np.array([complex(k)]), n + 1)[0]
    df = double_factorials(n + 1)[0][n]
    kn1 = k ** (n - 1) if n >= 1 else 0.0
    j = jh[n] * k ** n / df
    j_over_k = jh[n] * kn1 / df
    jp = (n * jh[n] - k * k * jh[n + 1] / (2 * n + 3)) * kn1 / df
    if n == 0:
        jp = -k * jh[1] / 3.0
    return j, j_over_k, jp


def incident_traces(pw: PlaneWave, setup: ProblemSetup, n: int):
    """Traces of the incident field at r = 1 for degree n.

    Returns dict with 'tE', 'tH' of shape (2, 2n+1) holding the (V, W)
    coefficients of n x E^in, n x H^in, and 'nE', 'nH' (2n+1,) for n . E^in, n . H^in.
    """
    M = 2 * n + 1
    out = {key: np.zeros((2, M), dtype=complex) for key in ("tE", "tH")}
    out.update({key: np.zeros(M, dtype=complex) for key in ("nE", "nH")})
    if n == 0:
        return out
    L = np.sqrt(n * (n + 1.0))
    alpha, beta = pw.multipole_coefficients(n)
    j, jk, jp = _regular_parts(n, setup.k0)
    Y0 = np.sqrt(setup.eps0 / setup.mu0)
    aH, bH = -1j * Y0 * beta, -1j * Y0 * alpha
    for (a, b), t, nn in (((alpha, beta), "tE", "nE"), ((aH, bH), "tH", "nH")):
        out[t][0] = L * j * a
        out[t][1] = L * (jk + jp) * b
        out[nn] = n * (n + 1) * jk * b
    return out


def _divS_t_difference(n, setup):
    """Symbol of (div S_k0 - div S_k) on the V component, cancellation-free."""
    L = np.sqrt(n * (n + 1.0))
    return -L * single_layer_eigenvalue_difference(n, setup.k0, setup.k)


# ---------------------------------------------------------------------------
# blocks and right-hand sides

def _blocks(formulation, n, setup, eta, representation):
    if formulation == "dfie":
        return [assemble_dfie_E(n, setup)]
    if formulation == "dfie-h":
        return [assemble_dfie_H(n, setup)]
    if formulation == "dfie-scaled":
        return [assemble_dfie_scaled(n, setup)]
    if formulation == "muller":
        return [assemble_muller(n, setup)]
    if formulation == "cc":
        return [assemble_charge_current(n, setup, eta)]
    if formulation == "decoupled-cc":
        return [assemble_muller(n, setup), *assemble_decoupled_cc_scalars(n, setup, representation=representation)]
    raise FormulationError(f"unknown formulation {formulation!r}; expected one of {', '.join(FORMULATIONS)}")


def dfie_rhs(pw: PlaneWave, setup: ProblemSetup, n: int, field: str = "E"):
    """(f, q, g, p) data of the E-problem (or the primed data of the H-problem).

    E: f = -n x E^in, q = 0, g = -i w n x H^in, p = -eps0 n . E^in
    H: f' = -n x H^in, q' = 0, g' = +i w n x E^in, p' = -mu0 n . H^in
    """
    tr = incident_traces(pw, setup, n)
    iw = 1j * setup.omega
    if field == "E":
        f, g, p = -tr["tE"], -iw * tr["tH"], -setup.eps0 * tr["nE"]
    elif field == "H":
        f, g, p = -tr["tH"], iw * tr["tE"], -setup.mu0 * tr["nH"]
    else:
        raise ValueError("field must be 'E' or 'H'")
    q = np.zeros_like(p)
    if n == 0:
        return np.vstack([q, p])
    return np.vstack([f, q, g, p])


def muller_rhs(pw, setup, n):
    if n == 0:
        return np.zeros((0, 1), dtype=complex)
    tr = incident_traces(pw, setup, n)
    return np.vstack([tr["tE"], -tr["tH"]])


def cc_rhs(pw, setup, n):
    tr = incident_traces(pw, setup, n)
    scal = np.vstack([-setup.eps0 * tr["nE"], -setup.mu0 * tr["nH"]])
    if n == 0:
        return scal
    return np.vstack([-tr["tH"], tr["tE"], scal])


def decoupled_scalar_rhs(pw, setup, n, JK):
    """Right-hand sides of the phi and psi systems from the Muller densities.

    JK is the (4, M) Muller solution (K_V, K_W, J_V, J_W), empty at n = 0.
    Rows: (Dirichlet difference, weighted Neumann difference).
    """
    tr = incident_traces(pw, setup, n)
    k0, k, iw = setup.k0, setup.k, 1j * setup.omega
    e0, e, m0, m = setup.eps0, setup.eps, setup.mu0, setup.mu
    M = 2 * n + 1
    dphi = np.zeros(M, dtype=complex)
    dpsi = np.zeros(M, dtype=complex)
    gphi = e0 * tr["nE"]
    gpsi = m0 * tr["nH"]
    if n >= 1:
        K, J = JK[0:2], JK[2:4]
        dd = _divS_t_difference(n, setup)
        dphi = dd * J[0] / iw
        dpsi = dd * K[0] / iw
        nS0, nS = pv("ndotS_t", n, k0), pv("ndotS_t", n, k)
        nC0, nC = pv("ndotcurlS_t", n, k0), pv("ndotcurlS_t", n, k)
        gphi = gphi + (iw * (e0 ** 2 * m0 * nS0 - e ** 2 * m * nS) @ J)[0] - ((e0 * m0 * nC0 - e * m * nC) @ K)[0]
        gpsi = gpsi + ((e0 * m0 * nC0 - e * m * nC) @ J)[0] + (iw * (m0 ** 2 * e0 * nS0 - m ** 2 * e * nS) @ K)[0]
    return np.vstack([dphi, gphi]), np.vstack([dpsi, gpsi])


# ---------------------------------------------------------------------------
# solves

@dataclass
class SolveResult:
    setup: ProblemSetup
    formulation: str
    pw: PlaneWave
    densities: dict  # n -> (unknowns, 2n+1)
    residuals: dict  # n -> max relative residual over the blocks of that degree
    condition: float
    smin: float
    smax: float
    worst_n: int
    eta: complex = 0.0
    representation: str = "second-kind"
    notes: dict = field(default_factory=dict)

    @property
    def nmax(self):
        return max(self.densities)


def _check_block(blk, formulation, setup, check_singular):
    s = blk.singular_values()
    if s.size == 0:
        return s
    if check_singular and s[-1] < SINGULAR_RTOL * s[0]:
        raise NearSingularError(formulation, blk.n, setup.omega, s[-1], s[0])
    return s


def _dense_solve(A, b):
    if A.shape[0] == 0:
        return np.zeros((0, b.shape[1]), dtype=complex), 0.0
    x = np.linalg.solve(A, b)
    scale = np.linalg.norm(A, 2) * np.linalg.norm(x) + np.linalg.norm(b)
    res = np.linalg.norm(A @ x - b) / scale if scale > 0 else 0.0
    return x, float(res)


def solve(formulation: str, pw: PlaneWave, setup: ProblemSetup, eta: complex = 0.0,
          representation: str = "second-kind", check_singular: bool = True) -> SolveResult:
    """Per-degree dense solves for all orders m at once."""
    setup = validate_setup(setup)
    if formulation in ("muller", "cc", "decoupled-cc") and setup.omega == 0:
        raise FormulationError(f"{formulation} is not supported at omega = 0")
    dens, resid = {}, {}
    smax_all, smin_all, worst = 0.0, np.inf, 0
    conds = {}
    for n in range(setup.nmax + 1):
        blocks = _blocks(formulation, n, setup, eta, representation)
        for blk in blocks:
            s = _check_block(blk, formulation, setup, check_singular)
            if s.size:
                key = blk.formulation
                cmax, cmin, wn = conds.get(key, (0.0, np.inf, 0))
                conds[key] = (max(cmax, s[0]), min(cmin, s[-1]), n if s[-1] < cmin else wn)
        if formulation in ("dfie", "dfie-h"):
            b = dfie_rhs(pw, setup, n, "H" if formulation == "dfie-h" else "E")
            x, r = _dense_solve(blocks[0].matrix, b)
        elif formulation == "dfie-scaled":
            dr, dc = dfie_scaling(n, setup.omega)
            b = dr[:, None] * dfie_rhs(pw, setup, n, "E")
            y, r = _dense_solve(blocks[0].matrix, b)
            x = dc[:, None] * y
        elif formulation == "muller":
            x, r = _dense_solve(blocks[0].matrix, muller_rhs(pw, setup, n))
        elif formulation == "cc":
            x, r = _dense_solve(blocks[0].matrix, cc_rhs(pw, setup, n))
        else:
            JK, r0 = _dense_solve(blocks[0].matrix, muller_rhs(pw, setup, n))
            bphi, bpsi = decoupled_scalar_rhs(pw, setup, n, JK)
            xphi, r1 = _dense_solve(blocks[1].matrix, bphi)
            xpsi, r2 = _dense_solve(blocks[2].matrix, bpsi)
            x = np.vstack([JK, xphi, xpsi])
            r = max(r0, r1, r2)
        dens[n] = x
        resid[n] = r
    cond, smin, smax, worst = _combine_conditions(conds)
    return SolveResult(setup, formulation, pw, dens, resid, cond, smin, smax, worst, complex(eta), representation)


def _combine_conditions(conds):
    """Worst condition over the independent systems (one entry per block family)."""
    best = (0.0, np.inf, 0.0, 0)
    for cmax, cmin, wn in conds.values():
        c = cmax / cmin if cmin > 0 else np.inf
        if c > best[0]:
            best = (c, cmin, cmax, wn)
    return best


def condition_number(formulation, setup: ProblemSetup, eta: complex = 0.0, representation="second-kind"):
    """(condition, sigma_min, sigma_max, worst n) over n = 0..n_max without solving."""
    setup = validate_setup(setup)
    conds = {}
    for n in range(setup.nmax + 1):
        for blk in _blocks(formulation, n, setup, eta, representation):
            s = blk.singular_values()
            if s.size == 0:
                continue
            cmax, cmin, wn = conds.get(blk.formulation, (0.0, np.inf, 0))
            conds[blk.formulation] = (max(cmax, s[0]), min(cmin, s[-1]), n if s[-1] < cmin else wn)
    return _combine_conditions(conds)


# ---------------------------------------------------------------------------
# representations: (field, weight, method, input kind, unknown indices)

def _dfie_terms(n, side, setup, field):
    s = setup if field == "E" else setup.swapped()
    p1, p2 = (s.mu0, s.eps0) if side == "ext" else (s.mu, s.eps)
    F, G = ("E", "H") if field == "E" else ("H", "E")
    sg = 1.0 if field == "E" else -1.0
    if n >= 1:
        a, sig, b, rho = (0, 1), (2,), (3, 4), (5,)
    else:
        a, sig, b, rho = None, (0,), None, (1,)
    T = [(F, -p1, "single", "n", sig), (F, 1.0, "grad", "s", rho)]
    if a is not None:
        T += [(F, p1, "curl", "t", a), (F, p1 * p2, "single", "t", b)]
    if setup.omega > 0:
        iw = 1j * setup.omega
        T += [(G, -sg / iw, "curl", "n", sig)]
        if a is not None:
            T += [(G, sg / iw, "curlcurl", "t", a), (G, sg * p2 / iw, "curl", "t", b)]
    return T


def _current_terms(n, side, setup, J, K, rho=None, rhoM=None):
    e, m = (setup.eps0, setup.mu0) if side == "ext" else (setup.eps, setup.mu)
    iw = 1j * setup.omega
    T = []
    if n >= 1:
        T += [("E", iw * m * e, "single", "t", J), ("E", -m, "curl", "t", K),
              ("H", e, "curl", "t", J), ("H", iw * e * m, "single", "t", K)]
        if rho is None:
            T += [("E", -1.0 / iw, "graddiv", "t", J), ("H", -1.0 / iw, "graddiv", "t", K)]
    if rho is not None:
        T += [("E", -1.0, "grad", "s", rho), ("H", -1.0, "grad", "s", rhoM)]
    return T


def _scalar_potential_terms(name, side, weight, idx, representation):
    """Terms of -grad(potential) for the decoupled scalar densities at idx = (first, second)."""
    if representation == "second-kind":
        u, v = idx
        return [(name, 1.0 / weight, "graddiv", "n", (u,)), (name, -1.0, "grad", "s", (v,))]
    return [(name, -1.0, "grad", "s", (idx[0] if side == "ext" else idx[1],))]


def representation_terms(result: SolveResult, n: int, side: str):
    st, f = result.setup, result.formulation
    if f in ("dfie", "dfie-scaled"):
        return _dfie_terms(n, side, st, "E")
    if f == "dfie-h":
        return _dfie_terms(n, side, st, "H")
    if f == "muller":
        return _current_terms(n, side, st, J=(2, 3), K=(0, 1))
    if f == "cc":
        if n >= 1:
            return _current_terms(n, side, st, J=(0, 1), K=(2, 3), rho=(4,), rhoM=(5,))
        return _current_terms(n, side, st, J=None, K=None, rho=(0,), rhoM=(1,))
    if f == "decoupled-cc":
        e, m = (st.eps0, st.mu0) if side == "ext" else (st.eps, st.mu)
        off = 4 if n >= 1 else 0
        T = []
        if n >= 1:
            T = [t for t in _current_terms(n, side, st, J=(2, 3), K=(0, 1)) if t[2] != "graddiv"]
        T += _scalar_potential_terms("E", side, e, (off, off + 1), result.representation)
        T += _scalar_potential_terms("H", side, m, (off + 2, off + 3), result.representation)
        return T
    raise FormulationError(f"unknown formulation {f!r}")


_UNITS = {"t": [(0.0, 1.0, 0.0), (0.0, 0.0, 1.0)], "n": [(1.0, 0.0, 0.0)], "s": [1.0]}


def _radial_response(R, method, kind, unit):
    if kind == "s":
        return R.grad(unit) if method == "grad" else None
    return getattr(R, method)(*unit)


@dataclass
class FieldSamples:
    points: np.ndarray
    region: np.ndarray  # 'int' or 'ext' per point
    E: np.ndarray
    H: np.ndarray | None

    def with_incident(self, pw: PlaneWave, setup: ProblemSetup):
        """Total fields (adds the incident wave at exterior points)."""
        Ei, Hi = pw.fields(self.points, setup)
        ext = (self.region == "ext")[:, None]
        E = self.E + np.where(ext, Ei, 0)
        H = None if self.H is None else self.H + np.where(ext, Hi, 0)
        return FieldSamples(self.points, self.region, E, H)


def classify_points(points, band=EXCLUSION_BAND):
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if x.shape[1] != 3:
        raise FieldEvaluationError("points must have shape (P, 3)")
    r = np.linalg.norm(x, axis=1)
    bad = np.abs(r - 1.0) < band
    if np.any(bad):
        i = int(np.argmax(bad))
        raise FieldEvaluationError(f"point {i} at r={r[i]:.6g} lies in the exclusion band |r - 1| < {band}")
    if np.any(r < 1e-6):
        raise FieldEvaluationError("evaluation at the origin is not supported (r < 1e-6)")
    return x, r, np.where(r > 1.0, "ext", "int")


def _synthesize(points, coeffs_by_n, nmax):
    """Cartesian field from per-n (a, b, c) coefficient arrays of shape (P, 2n+1)."""
    x = points
    r = np.linalg.norm(x, axis=1)
    th = np.arccos(np.clip(x[:, 2] / r, -1.0, 1.0))
    ph = np.arctan2(x[:, 1], x[:, 0])
    out = np.zeros((x.shape[0], 3), dtype=complex)
    for n, (A, B, C) in coeffs_by_n.items():
        for i, m in enumerate(range(-n, n + 1)):
            hb = harmonic_basis(n, m, th, ph)
            out += A[:, i, None] * hb.X + B[:, i, None] * hb.V + C[:, i, None] * hb.W
    return out


def evaluate_field(result: SolveResult, points) -> FieldSamples:
    """Scattered field outside, total field inside, from the solved densities."""
    x, r, region = classify_points(points)
    st = result.setup
    if result.formulation in ("muller", "cc", "decoupled-cc") and st.omega < MULLER_MIN_OMEGA:
        # the current representations divide by omega; the fields lose all digits to cancellation
        raise FieldEvaluationError(f"{result.formulation} field evaluation is unsupported below "
                                   f"omega = {MULLER_MIN_OMEGA} (low-frequency breakdown); use dfie")
    E = np.zeros((x.shape[0], 3), dtype=complex)
    H = np.zeros((x.shape[0], 3), dtype=complex)
    have_H = st.omega > 0
    for side in ("ext", "int"):
        sel = region == side
        if not np.any(sel):
            continue
        rs = r[sel]
        k = st.k0 if side == "ext" else st.k
        acc = {"E": {}, "H": {}}
        for n, dens in result.densities.items():
            R = RadialLayer(n, k, rs, side)
            P, M = rs.size, 2 * n + 1
            tot = {fn: [np.zeros((P, M), dtype=complex) for _ in range(3)] for fn in ("E", "H")}
            for fname, w, method, kind, idx in representation_terms(result, n, side):
                for unit, row in zip(_UNITS[kind], idx):
                    resp = _radial_response(R, method, kind, unit)
                    c = w * dens[row]
                    for comp in range(3):
                        tot[fname][comp] += np.outer(resp[comp], c)
            acc["E"][n] = tot["E"]
            acc["H"][n] = tot["H"]
        E[sel] = _synthesize(x[sel], acc["E"], result.nmax)
        H[sel] = _synthesize(x[sel], acc["H"], result.nmax)
    return FieldSamples(x, region, E, H if have_H else None)


# ---------------------------------------------------------------------------
# Mie series

def _scaled_regular(nmax, k, r):
    """rho_n(r) = r^n jhat_n(k r) (= j_n(kr) (2n+1)!!/k^n) and its r-derivative."""
    rr = np.atleast_1d(r)[:, None]
    n = np.arange(nmax + 1)
    jr = kernels.jhat(k * np.atleast_1d(r), nmax + 1)
    rho = rr ** n * jr[:, :-1]
    drho = rr ** (n - 1.0) * (n * jr[:, :-1] - (k * rr) ** 2 * jr[:, 1:] / (2 * n + 3))
    return rho, drho


def _scaled_outgoing(nmax, k0, r):
    """eta_n(r) = h_n(k0 r)/h_n(k0) and its r-derivative."""
    rr = np.atleast_1d(r)[:, None]
    n = np.arange(nmax + 1)
    h1 = kernels.hhat(np.array([complex(k0)]), nmax + 1)[0]
    hr = kernels.hhat(k0 * np.atleast_1d(r), nmax + 1)
    eta = rr ** (-n - 1.0) * hr[:, :-1] / h1[:-1]
    deta = rr ** (-n - 2.0) * (n * hr[:, :-1] - (2 * n + 1) * hr[:, 1:]) / h1[:-1]
    return eta, deta


@dataclass
class MieCoefficients:
    """Scaled Mie coefficients per degree (arrays over m).

    Exterior scattered: a M^h + b N^h with a = A / h_n(k0), b = B / h_n(k0).
    Interior total: c M^j + d N^j with c j_n(kr) = C r^n jhat_n(kr) (same for d).
    """
    A: dict
    B: dict
    C: dict
    D: dict
    nmax: int


def mie_coefficients(pw: PlaneWave, setup: ProblemSetup, nmax=None) -> MieCoefficients:
    setup = validate_setup(setup)
    if setup.omega <= 0:
        raise ValueError("the Mie reference needs omega > 0")
    nmax = setup.nmax + 8 if nmax is None else int(nmax)
    k0, k, w = setup.k0, setup.k, setup.omega
    e0, e, m0, m = setup.eps0, setup.eps, setup.mu0, setup.mu
    N0, N = k0 / w, k / w
    Y0, Y = N0 / m0, N / m
    jh0 = kernels.jhat(np.array([k0]), nmax + 1)[0]
    jh = kernels.jhat(np.array([k]), nmax + 1)[0]
    hh0 = kernels.hhat(np.array([k0]), nmax + 1)[0]
    df = double_factorials(nmax + 1)[0]
    out = MieCoefficients({}, {}, {}, {}, nmax)
    for n in range(1, nmax + 1):
        alpha, beta = pw.multipole_coefficients(n)
        s0 = k0 ** n / df[n]
        gj0 = (n + 1) * jh0[n] - k0 * k0 * jh0[n + 1] / (2 * n + 3)
        gj = (n + 1) * jh[n] - k * k * jh[n + 1] / (2 * n + 3)
        gh = ((n + 1) * hh0[n] - (2 * n + 1) * hh0[n + 1]) / hh0[n]
        # TE: tangential E (V) and H (W); TM: tangential E (W) and H (V)
        Mte = np.array([[1.0, -jh[n]], [gh / m0, -gj / m]])
        rte = np.vstack([-alpha * s0 * jh0[n], -alpha * s0 * gj0 / m0])
        Mtm = np.array([[gh / N0, -gj / N], [Y0, -Y * jh[n]]])
        rtm = np.vstack([-beta * s0 * gj0 / N0, -Y0 * beta * s0 * jh0[n]])
        if abs(k0) < 1.0:
            # Subtract the incident-field combination from one row so that the
            # O(k^2) magnetic/electric responses are not formed by cancellation.
            rho0 = jh0[n + 1] / jh0[n]
            lj0 = (n + 1) - k0 * k0 * rho0 / (2 * n + 3)  # gj0 / jhat_n(k0)
            c = 1.0 / m0
            Mte[1] = [gh / m0 - lj0 / m0,
                      -((n + 1) * jh[n] * (1 / m - c) - (k * k * jh[n + 1] / m - c * jh[n] * k0 * k0 * rho0) / (2 * n + 3))]
            rte[1] = 0.0
            c = N * m0 / (N0 * N0 * m)
            Mtm[0] = [(gh - lj0) / N0,
                      -((n + 1) * jh[n] * (1 / N - c) - (k * k * jh[n + 1] / N - c * jh[n] * k0 * k0 * rho0) / (2 * n + 3))]
            rtm[0] = 0.0
        A, C = np.linalg.solve(Mte, rte)
        B, D = np.linalg.solve(Mtm, rtm)
        out.A[n], out.B[n], out.C[n], out.D[n] = A, B, C, D
    return out


def _mn(n, k, rho, drho, r):
    """Radial triples (a, b, c) of M and N built on radial function rho(r)."""
    L = np.sqrt(n * (n + 1.0))
    z = np.zeros_like(rho)
    Mv = (z, z, -L * rho)
    Nv = (n * (n + 1) * rho / (k * r), L * (rho / (k * r) + drho / k), z)
    return Mv, Nv


def mie_reference(pw: PlaneWave, setup: ProblemSetup, points, nmax=None) -> FieldSamples:
    """Classical Mie fields: scattered outside, total inside."""
    setup = validate_setup(setup)
    x, r, region = classify_points(points)
    co = mie_coefficients(pw, setup, nmax)
    k0, k, w = setup.k0, setup.k, setup.omega
    Y0, Y = k0 / (w * setup.mu0), k / (w * setup.mu)
    E = np.zeros((x.shape[0], 3), dtype=complex)
    H = np.zeros_like(E)
    for side in ("ext", "int"):
        sel = region == side
        if not np.any(sel):
            continue
        rs = r[sel]
        if side == "ext":
            R, dR = _scaled_outgoing(co.nmax, k0, rs)
            kk, YY, c1, c2 = k0, Y0, co.A, co.B
        else:
            R, dR = _scaled_regular(co.nmax, k, rs)
            kk, YY, c1, c2 = k, Y, co.C, co.D
        accE, accH = {}, {}
        for n in range(1, co.nmax + 1):
            Mv, Nv = _mn(n, kk, R[:, n], dR[:, n], rs)
            accE[n] = [np.outer(Mv[i], c1[n]) + np.outer(Nv[i], c2[n]) for i in range(3)]
            accH[n] = [-1j * YY * (np.outer(Nv[i], c1[n]) + np.outer(Mv[i], c2[n])) for i in range(3)]
        E[sel] = _synthesize(x[sel], accE, co.nmax)
        H[sel] = _synthesize(x[sel], accH, co.nmax)
    return FieldSamples(x, region, E, H)


def mie_cross_sections(pw: PlaneWave, setup: ProblemSetup, nmax=None):
    """(extinction, scattering) cross sections from the Mie coefficients.

    Extinction via the optical theorem, scattering via the outgoing power.
    """
    setup = validate_setup(setup)
    co = mie_coefficients(pw, setup, nmax)
    k0 = setup.k0
    hh0 = kernels.hhat(np.array([k0]), co.nmax + 1)[0]
    lower = double_factorials(co.nmax + 1)[1]
    sca = 0.0
    ext = 0.0
    amp2 = abs(pw.amplitude) ** 2
    for n in range(1, co.nmax + 1):
        alpha, beta = pw.multipole_coefficients(n)
        hn = -1j * lower[n] * hh0[n] / k0 ** (n + 1)
        a, b = co.A[n] / hn, co.B[n] / hn
        L2 = n * (n + 1.0)
        # |M|^2 ~ L^2/(k0 r)^2 on a sphere of radius r -> power flux per unit amplitude
        sca += L2 * float(np.sum(np.abs(a) ** 2 + np.abs(b) ** 2))
        ext += -L2 * float(np.sum(np.real(np.conj(alpha) * a + np.conj(beta) * b)))
    scale = 1.0 / (abs(k0) ** 2 * amp2)
    return float(ext * scale), float(sca * scale)


# ---------------------------------------------------------------------------
# physics checks

def _fd_derivatives(fn, x, h):
    """Fourth-order central differences: J[p, i, j] = d F_i / d x_j."""
    J = np.zeros((x.shape[0], 3, 3), dtype=complex)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        f = [fn(x + s * e) for s in (-2, -1, 1, 2)]
        J[:, :, j] = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
    return J


def _curl(J):
    return np.stack([J[:, 2, 1] - J[:, 1, 2], J[:, 0, 2] - J[:, 2, 0], J[:, 1, 0] - J[:, 0, 1]], axis=-1)


def maxwell_consistency(resultE: SolveResult, resultH: SolveResult, points, h=1e-3):
    """Finite-difference Maxwell checks at off-surface points.

    curl: |curl E - i w mu H| / |w mu H| with E from resultE and H from resultH
    (region-wise material), and the divergence of both fields relative to their size.
    """
    x, r, region = classify_points(points, band=EXCLUSION_BAND + 3 * h)
    st = resultE.setup
    if st.omega <= 0:
        raise ValueError("curl check needs omega > 0")
    mu = np.where(region == "ext", st.mu0, st.mu)
    E = lambda y: evaluate_field(resultE, y).E  # noqa: E731
    JE = _fd_derivatives(E, x, h)
    HH = evaluate_field(resultH, x).H
    rhs = 1j * st.omega * mu[:, None] * HH
    curl_def = np.linalg.norm(_curl(JE) - rhs, axis=1) / np.linalg.norm(st.omega * mu[:, None] * HH, axis=1)
    Hf = lambda y: evaluate_field(resultH, y).H  # noqa: E731
    JH = _fd_derivatives(Hf, x, h)
    E0 = evaluate_field(resultE, x).E
    divE = np.abs(np.einsum("pii->p", JE)) / np.linalg.norm(E0, axis=1)
    divH = np.abs(np.einsum("pii->p", JH)) / np.linalg.norm(HH, axis=1)
    # the H-problem's own E (from its curl) against the E-problem
    EH = evaluate_field(resultH, x).E
    cross = np.linalg.norm(EH - E0, axis=1) / np.linalg.norm(E0, axis=1)
    return dict(curl_defect=float(np.max(curl_def)), div_E=float(np.max(divE)), div_H=float(np.max(divH)),
                cross_field=float(np.max(cross)), per_point_curl=curl_def)


def silver_muller_residual(result: SolveResult, radius, n_dirs=16, seed=0):
    """max |sqrt(mu0/eps0) H0 x r^ - E0| over random directions at the given radius."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_dirs, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    fs = evaluate_field(result, radius * v)
    if fs.H is None:
        raise ValueError("needs omega > 0")
    st = result.setup
    Z0 = np.sqrt(st.mu0 / st.eps0)
    return float(np.max(np.linalg.norm(Z0 * np.cross(fs.H, v) - fs.E, axis=1)))


def relative_error(a, b):
    """max-norm of the difference over the point set relative to the largest reference value."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.linalg.norm(a - b, axis=-1)) / np.max(np.linalg.norm(b, axis=-1)))
