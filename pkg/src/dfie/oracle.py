"""Independent quadrature oracle for the trace symbols.

Evaluates layer potentials of a single harmonic density by direct surface
quadrature at targets r = 1 +- h (never on the surface), projects the result
back onto the harmonic basis and extrapolates h -> 0 from each side.

Nothing here uses Bessel functions: the only inputs are the Green's function
exp(ik d)/(4 pi d), its derivatives, and the harmonic basis. For a target
direction t the surface is parametrised in a frame whose pole is t, so the
near-singular part of the kernel sits at theta' ~ 0 and is resolved by
geometrically graded Gauss-Legendre panels. Because the kernel then depends
only on the reference-frame source point, one set of kernel weights serves
every target direction.
"""
import functools
from dataclasses import dataclass

import numpy as np

from dfie.harmonics import frames, grid_for_degree, harmonic_basis, sph_harm
from dfie.symbols import OP_IDS, input_units, op_kinds

DEFAULT_H = (4e-3, 2e-3, 1e-3, 5e-4)
PANEL_NODES = 16


class OracleDivergenceError(RuntimeError):
    pass


def graded_theta_rule(hmin, nodes=PANEL_NODES):
    """Gauss-Legendre panels on [0, pi]: [0, hmin/4] then doubling widths."""
    edges = [0.0, hmin / 4.0]
    while edges[-1] < np.pi:
        edges.append(min(2.0 * edges[-1], np.pi))
    x, w = np.polynomial.legendre.leggauss(nodes)
    th, wt = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        th.append(0.5 * (b - a) * x + 0.5 * (b + a))
        wt.append(0.5 * (b - a) * w)
    return np.concatenate(th), np.concatenate(wt)


@functools.lru_cache(maxsize=8)
def _reference_sources(hmin, n_phi):
    th, wt = graded_theta_rule(hmin)
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(th, ph, indexing="ij")
    w = (wt * np.sin(th))[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]
    pts = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)
    return pts, w.ravel()


def _target_frames(grid):
    """Rotation matrices R (T, 3, 3) with columns (theta^, phi^, r^) at the targets."""
    rhat, that, phat = frames(grid.theta, grid.phi)
    return np.stack([that, phat, rhat], axis=-1)


def _kernel_weights(k, r, src, w):
    """Reference-frame kernel data for target (0, 0, r)."""
    diff = np.array([0.0, 0.0, r])[None, :] - src
    d = np.sqrt(np.einsum("qi,qi->q", diff, diff))
    u = diff / d[:, None]
    g = np.exp(1j * k * d) / (4.0 * np.pi * d)
    t = 1j * k - 1.0 / d
    gp = g * t
    gpp = g * (t * t + 1.0 / d ** 2)
    return dict(g=w * g, gpu=(w * gp)[:, None] * u, alpha_u=(w * (gpp - gp / d))[:, None] * u, u=u, beta=w * gp / d)


@dataclass
class _Densities:
    vec: dict  # 'X' | 'V' | 'W' -> (T, Q, 3) reference-frame components
    scal: np.ndarray  # (T, Q)


def _densities(n, m, grid, Rt, src):
    """Harmonic densities at the rotated source points of every target."""
    T = Rt.shape[0]
    y = np.einsum("tij,qj->tqi", Rt, src)  # global coordinates
    yz = np.clip(y[..., 2], -1.0, 1.0)
    theta = np.arccos(yz).ravel()
    phi = np.arctan2(y[..., 1], y[..., 0]).ravel()
    B = harmonic_basis(n, m, theta, phi)
    Q = src.shape[0]
    vec = {}
    for name in ("X", "V", "W"):
        G = getattr(B, name).reshape(T, Q, 3)
        vec[name] = np.einsum("tji,tqj->tqi", Rt, G)  # to reference frame
    return _Densities(vec=vec, scal=B.Y.reshape(T, Q))


def _potentials(K, dens, k):
    """Raw fields in the reference frame for every target.

    Scalar: S, grad S. Vector (per density): S, curl S, div S, grad div S.
    """
    out = {}
    rho = dens.scal
    out["s_S"] = rho @ K["g"]
    out["s_grad"] = np.einsum("tq,qa->ta", rho, K["gpu"])
    for name, J in dens.vec.items():
        S = np.einsum("q,tqa->ta", K["g"], J)
        C = np.einsum("qa,tqb->tab", K["gpu"], J)
        curl = np.stack([C[:, 1, 2] - C[:, 2, 1], C[:, 2, 0] - C[:, 0, 2], C[:, 0, 1] - C[:, 1, 0]], axis=-1)
        div = np.einsum("taa->t", C)
        uJ = np.einsum("qb,tqb->tq", K["u"], J)
        gd = np.einsum("tq,qa->ta", uJ, K["alpha_u"]) + np.einsum("q,tqa->ta", K["beta"], J)
        out[name] = dict(S=S, curl=curl, div=div, graddiv=gd, cc=gd + k * k * S)
    return out


def _to_global(Rt, v):
    return np.einsum("tij,tj->ti", Rt, v)


def _project_vec(F, Bt, wts):
    """(a, b, c) of a global Cartesian field on the target grid."""
    return np.array([np.sum(wts[:, None] * F * np.conj(C)) for C in (Bt.X, Bt.V, Bt.W)])


def _traces(raw, Rt, Bt, Yt, wts, n):
    """Every op's block (out x in) from raw off-surface fields at one radius."""
    def nx(F):
        a, b, c = _project_vec(_to_global(Rt, F), Bt, wts)
        return np.array([-c, b])

    def ndot(F):
        return np.array([_project_vec(_to_global(Rt, F), Bt, wts)[0]])

    def sproj(f):
        return np.array([np.sum(wts * f * np.conj(Yt))])

    res = {}
    tang = ("V", "W") if n >= 1 else ()
    field_of = {
        "nxS_t": lambda d: nx(d["S"]), "nxS_n": lambda d: nx(d["S"]),
        "M": lambda d: nx(d["curl"]), "nxcurlS_n": lambda d: nx(d["curl"]),
        "nxcurlcurlS_t": lambda d: nx(d["cc"]), "nxgraddivS_t": lambda d: nx(d["graddiv"]),
        "divS_t": lambda d: sproj(d["div"]), "divS_n": lambda d: sproj(d["div"]),
        "ndotS_t": lambda d: ndot(d["S"]), "ndotS_n": lambda d: ndot(d["S"]),
        "ndotcurlS_t": lambda d: ndot(d["curl"]), "D": lambda d: -sproj(d["div"]),
        "T": lambda d: -ndot(d["graddiv"]),
    }
    for op in OP_IDS:
        kin, kout = op_kinds(op)
        if kin == "t" and n == 0:
            continue
        dout = (2 if n >= 1 else 0) if kout == "t" else 1
        if kin == "s":
            if op == "S":
                col = sproj(raw["s_S"])
            elif op == "Sp":
                col = ndot(raw["s_grad"])
            else:  # nxgradS
                col = nx(raw["s_grad"])
            res[op] = col[:dout].reshape(dout, 1)
            continue
        names = tang if kin == "t" else ("X",)
        cols = [field_of[op](raw[nm])[:dout] for nm in names]
        res[op] = np.stack(cols, axis=1) if cols else np.zeros((dout, 0))
    return res


def richardson(hs, vals):
    """Polynomial extrapolation to h = 0 through all points (vals stacked on axis 0)."""
    hs = np.asarray(hs, dtype=float)
    V = np.vander(hs, len(hs), increasing=True)
    coef = np.linalg.solve(V, np.asarray(vals).reshape(len(hs), -1))
    return coef[0].reshape(np.asarray(vals).shape[1:])


@dataclass
class OracleResult:
    op_id: str
    n: int
    m: int
    k: complex
    exterior: np.ndarray
    interior: np.ndarray

    @property
    def average(self):
        return 0.5 * (self.exterior + self.interior)

    @property
    def jump(self):
        return self.exterior - self.interior


def oracle_all(n: int, m: int, k: complex, h_sequence=DEFAULT_H, divergence_tol=1e-5):
    """One-sided limits of every trace op at degree n, order m, by quadrature."""
    hs = tuple(float(h) for h in h_sequence)
    if len(hs) < 3 or any(h <= 0 for h in hs) or any(a <= b for a, b in zip(hs, hs[1:])):
        raise ValueError("h_sequence must hold >= 3 strictly decreasing positive offsets")
    if abs(m) > n:
        raise ValueError(f"|m| must be <= n (n={n}, m={m})")
    k = complex(k)
    grid = grid_for_degree(n + 1)
    Rt = _target_frames(grid)
    n_phi = 2 * n + 10
    src, w = _reference_sources(min(hs), n_phi)
    dens = _densities(n, m, grid, Rt, src)
    Bt = harmonic_basis(n, m, grid.theta, grid.phi)
    Yt = sph_harm(n, m, grid.theta, grid.phi)
    wts = grid.weights
    limits = {}
    for side, sgn in (("ext", 1.0), ("int", -1.0)):
        per_h = []
        for h in hs:
            K = _kernel_weights(k, 1.0 + sgn * h, src, w)
            raw = _potentials(K, dens, k)
            per_h.append(_traces(raw, Rt, Bt, Yt, wts, n))
        for op in per_h[0]:
            vals = np.array([p[op] for p in per_h])
            full = richardson(hs, vals)
            short = richardson(hs[1:], vals[1:])
            scale = max(1.0, float(np.max(np.abs(full))) if full.size else 1.0)
            if full.size and np.max(np.abs(full - short)) > divergence_tol * scale:
                raise OracleDivergenceError(
                    f"{op} n={n} k={k} side={side}: extrapolants differ by {np.max(np.abs(full - short)):.3e}")
            limits.setdefault(op, {})[side] = full
    return {op: OracleResult(op, n, m, k, d["ext"], d["int"]) for op, d in limits.items()}


def oracle_symbol(op_id, n: int, m: int, k: complex, h_sequence=DEFAULT_H) -> OracleResult:
    kin, _ = op_kinds(op_id)
    if kin == "t" and n == 0:
        raise ValueError(f"{op_id}: no tangential harmonics at n = 0")
    return oracle_all(n, m, k, h_sequence)[op_id]
