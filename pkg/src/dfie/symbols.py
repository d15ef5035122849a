"""Per-degree symbols of layer-potential traces on the unit sphere.

Green's function G(x) = exp(ik|x|) / (4 pi |x|). A density expanded in
X_nm, V_nm, W_nm (or Y_nm for scalar densities) produces a field whose
coefficients at radius r only depend on n, so every trace operator acts on
the (V, W, X-or-scalar) components of a single degree by a small matrix.

Fields are carried as coefficient triples (a, b, c) of a X + b V + c W.
One-sided traces come straight from the interior/exterior radial profiles
at r = 1; the principal value is their average and the jump is
exterior - interior.
"""
import functools
from dataclasses import dataclass

import numpy as np

from dfie.specfun import layer_radial


class TraceSymbolError(ValueError):
    pass


class RadialLayer:
    """Single-layer fields of degree-n densities at radii r on one side of the sphere."""

    def __init__(self, n: int, k: complex, r, side: str):
        self.n = n
        self.k = complex(k)
        self.r = np.atleast_1d(np.asarray(r, dtype=float))
        self.L = np.sqrt(n * (n + 1.0))
        f, fp, fpp = layer_radial(n + 1, k, self.r, side)
        self.f, self.fp, self.fpp = f, fp, fpp

    def _vec(self, x, v, w):
        """(a, a', a'', b, b', b'', c, c', c'') of S[x X + v V + w W]."""
        n = self.n
        F = (self.f, self.fp, self.fpp)
        if n == 0:
            a = [x * Fi[:, 1] for Fi in F]
            z = [np.zeros_like(ai) for ai in a]
            return a, z, [zi.copy() for zi in z]
        s = np.sqrt(2 * n + 1.0)
        cm = (np.sqrt(n) * x + np.sqrt(n + 1.0) * v) / s
        cp = (-np.sqrt(n + 1.0) * x + np.sqrt(n) * v) / s
        a = [(np.sqrt(n) * cm * Fi[:, n - 1] - np.sqrt(n + 1.0) * cp * Fi[:, n + 1]) / s for Fi in F]
        b = [(np.sqrt(n + 1.0) * cm * Fi[:, n - 1] + np.sqrt(n) * cp * Fi[:, n + 1]) / s for Fi in F]
        c = [w * Fi[:, n] for Fi in F]
        return a, b, c

    def single(self, x, v, w):
        a, b, c = self._vec(x, v, w)
        return a[0], b[0], c[0]

    def curl(self, x, v, w):
        a, b, c = self._vec(x, v, w)
        r, L = self.r, self.L
        return -L * c[0] / r, -(c[1] + c[0] / r), -L * a[0] / r + b[1] + b[0] / r

    def div(self, x, v, w):
        a, b, _ = self._vec(x, v, w)
        r, L = self.r, self.L
        return a[1] + 2 * a[0] / r - L * b[0] / r

    def graddiv(self, x, v, w):
        a, b, _ = self._vec(x, v, w)
        r, L = self.r, self.L
        d = a[1] + 2 * a[0] / r - L * b[0] / r
        dd = a[2] + 2 * a[1] / r - 2 * a[0] / r ** 2 - L * b[1] / r + L * b[0] / r ** 2
        return dd, L * d / r, np.zeros_like(d)

    def curlcurl(self, x, v, w):
        # curl curl = grad div - Laplacian and the Laplacian of S is -k^2 S
        g = self.graddiv(x, v, w)
        s = self.single(x, v, w)
        k2 = self.k * self.k
        return tuple(gi + k2 * si for gi, si in zip(g, s))

    def scalar(self, u):
        return u * self.f[:, self.n]

    def grad(self, u):
        n = self.n
        return u * self.fp[:, n], self.L * u * self.f[:, n] / self.r, np.zeros_like(self.r, dtype=complex)

    def dr_scalar(self, u):
        return u * self.fp[:, self.n]


def _nx(F):
    a, b, c = F
    return np.array([-c[0], b[0]])


def _ndot(F):
    return np.array([F[0][0]])


# op_id -> (input kind, output kind, evaluator(layer, x, v, w_or_scalar) -> output vector)
# input kinds: 't' tangential (V, W), 'n' normal density n*sigma, 's' scalar density
# output kinds: 't' tangential (V, W), 's' scalar
_OPS = {
    "nxS_t": ("t", "t", lambda R, d: _nx(R.single(*d))),
    "nxS_n": ("n", "t", lambda R, d: _nx(R.single(*d))),
    "nxgradS": ("s", "t", lambda R, u: _nx(R.grad(u))),
    "M": ("t", "t", lambda R, d: _nx(R.curl(*d))),
    "nxcurlS_n": ("n", "t", lambda R, d: _nx(R.curl(*d))),
    "nxcurlcurlS_t": ("t", "t", lambda R, d: _nx(R.curlcurl(*d))),
    "nxgraddivS_t": ("t", "t", lambda R, d: _nx(R.graddiv(*d))),
    "divS_t": ("t", "s", lambda R, d: np.array([R.div(*d)[0]])),
    "divS_n": ("n", "s", lambda R, d: np.array([R.div(*d)[0]])),
    "ndotS_t": ("t", "s", lambda R, d: _ndot(R.single(*d))),
    "ndotS_n": ("n", "s", lambda R, d: _ndot(R.single(*d))),
    "ndotcurlS_t": ("t", "s", lambda R, d: _ndot(R.curl(*d))),
    "D": ("n", "s", lambda R, d: -np.array([R.div(*d)[0]])),
    "T": ("n", "s", lambda R, d: -np.array([R.graddiv(*d)[0][0]])),
    "Sp": ("s", "s", lambda R, u: np.array([R.dr_scalar(u)[0]])),
    "S": ("s", "s", lambda R, u: np.array([R.scalar(u)[0]])),
}

OP_IDS = tuple(_OPS)

OP_DESCRIPTIONS = {
    "nxS_t": "n x S_k[a], a tangential",
    "nxS_n": "n x S_k[n sigma]",
    "nxgradS": "n x grad S_k[rho]",
    "M": "n x curl S_k[a] (M_k)",
    "nxcurlS_n": "n x curl S_k[n sigma]",
    "nxcurlcurlS_t": "n x curl curl S_k[a]",
    "nxgraddivS_t": "n x grad div S_k[a]",
    "divS_t": "div S_k[a]",
    "divS_n": "div S_k[n sigma]",
    "ndotS_t": "n . S_k[a]",
    "ndotS_n": "n . S_k[n sigma]",
    "ndotcurlS_t": "n . curl S_k[a]",
    "D": "double layer D_k[sigma] (normal derivative in the source point)",
    "T": "n . grad D_k[sigma] (hypersingular, continuous across the surface)",
    "Sp": "S'_k[rho] (normal derivative of the scalar single layer)",
    "S": "S_k[rho]",
}

# exterior limit - interior limit, as a multiple of the identity on the density
JUMP_CONSTANTS = {op: 0.0 for op in _OPS}
JUMP_CONSTANTS.update({"M": 1.0, "divS_n": -1.0, "D": 1.0, "Sp": -1.0})


def op_kinds(op_id):
    if op_id not in _OPS:
        raise TraceSymbolError(f"unknown op_id {op_id!r}; expected one of {', '.join(OP_IDS)}")
    return _OPS[op_id][:2]


def input_units(kind, n):
    """Unit densities spanning the input space, as (x, v, w) triples or scalars."""
    if kind == "t":
        return [(0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
    if kind == "n":
        return [(1.0, 0.0, 0.0)]
    return [1.0]


def _dims(kind_in, kind_out, n):
    din = 2 if kind_in == "t" else 1
    dout = (2 if n >= 1 else 0) if kind_out == "t" else 1
    return dout, din


@functools.lru_cache(maxsize=4096)
def _surface_layer(n, k, side):
    return RadialLayer(n, k, [1.0], side)


@functools.lru_cache(maxsize=65536)
def _one_sided_cached(op_id, n, k, side):
    kin, kout, fn = _OPS[op_id]
    dout, din = _dims(kin, kout, n)
    R = _surface_layer(n, k, side)
    out = np.zeros((dout, din), dtype=complex)
    for j, d in enumerate(input_units(kin, n)):
        val = fn(R, d)
        out[:, j] = val[:dout]
    out.setflags(write=False)
    return out


def one_sided(op_id, n: int, k: complex, side: str) -> np.ndarray:
    """Limit of the trace from the 'ext' or 'int' side (jump included)."""
    kin, _ = op_kinds(op_id)
    if n < 0:
        raise TraceSymbolError("degree must be >= 0")
    if kin == "t" and n == 0:
        raise TraceSymbolError(f"{op_id}: tangential harmonics V, W do not exist at n = 0")
    k = complex(k)
    if k.imag < 0:
        raise TraceSymbolError(f"Im k must be >= 0, got {k}")
    return _one_sided_cached(op_id, int(n), k, side)


@dataclass(frozen=True)
class OperatorSymbol:
    op_id: str
    n: int
    k: complex
    block: np.ndarray
    input_kind: str
    output_kind: str

    @property
    def jump(self):
        return JUMP_CONSTANTS[self.op_id]


def trace_symbol(op_id, n: int, k: complex) -> OperatorSymbol:
    """Principal-value symbol: average of the two one-sided limits."""
    ext = one_sided(op_id, n, k, "ext")
    inn = one_sided(op_id, n, k, "int")
    kin, kout = op_kinds(op_id)
    return OperatorSymbol(op_id, int(n), complex(k), 0.5 * (ext + inn), kin, kout)


def pv(op_id, n, k):
    return trace_symbol(op_id, n, k).block


def jump_block(op_id, n, k):
    """Identity contribution exterior - interior in the op's block shape."""
    kin, kout = op_kinds(op_id)
    dout, din = _dims(kin, kout, n)
    J = np.zeros((dout, din), dtype=complex)
    c = JUMP_CONSTANTS[op_id]
    if c:
        J[...] = c * np.eye(dout, din)
    return J


def scalar_single_layer_symbol(n: int, k: complex) -> complex:
    """Eigenvalue of S_k on Y_nm: i k j_n(k) h1_n(k) (1/(2n+1) at k = 0)."""
    return complex(pv("S", n, k)[0, 0])
