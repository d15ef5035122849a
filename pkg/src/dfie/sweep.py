"""Frequency sweeps, resonance-map scans, config files and CSV output."""
import dataclasses
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

import dfie
from dfie.formulations import FORMULATIONS, FormulationError
from dfie.media import Medium, ProblemSetup, validate_setup
from dfie.scatter import condition_number

ZERO_OMEGA_OK = ("dfie", "dfie-h")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formatting

def fmt(x):
    """17 significant digits, fixed so output is byte-reproducible."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_csv(header, rows, meta=None, path=None):
    """CSV with '#' comment lines for metadata; returns the text."""
    buf = io.StringIO()
    buf.write(f"# dfie {dfie.__version__}\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k} = {v}\n")
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    text = buf.getvalue()
    if path is not None and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_config(path):
    """Flat 'key = value' file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def _coerce(value, typ):
    if value is None:
        return None
    if typ is float:
        return float(value)
    if typ is int:
        return int(value)
    if typ is complex:
        return complex(value)
    if typ is tuple:
        if isinstance(value, str):
            return tuple(s.strip() for s in value.split(",") if s.strip())
        return tuple(value)
    return value


def spec_from_mapping(cls, mapping):
    """Build a spec dataclass from string values; unknown keys are an error."""
    names = {f.name: f for f in dataclasses.fields(cls)}
    kw = {}
    for k, v in mapping.items():
        if k not in names:
            raise ConfigError(f"unknown key {k!r} for {cls.__name__}; expected one of {', '.join(names)}")
        kw[k] = _coerce(v, cls._types[k])
    return cls(**kw)


def spec_echo(spec):
    """Parameters that determine the results (not how or where they were computed)."""
    return {f.name: getattr(spec, f.name) for f in dataclasses.fields(spec) if f.name not in ("jobs", "out")}


# ---------------------------------------------------------------------------
# sweeps

@dataclass
class SweepSpec:
    formulation: tuple = ("dfie",)
    omega_min: float = 0.0
    omega_max: float = 10.0
    omega_count: int = 101
    eps_re: float = 1.3
    eps_im: float = 0.0
    mu_re: float = 1.0
    mu_im: float = 0.0
    eps0: float = 1.0
    mu0: float = 1.0
    eta_re: float = 0.0
    eta_im: float = 0.0
    nmax: int | None = None
    jobs: int = 1
    out: str | None = None

    _types = dict(formulation=tuple, omega_min=float, omega_max=float, omega_count=int, eps_re=float,
                  eps_im=float, mu_re=float, mu_im=float, eps0=float, mu0=float, eta_re=float,
                  eta_im=float, nmax=int, jobs=int, out=str)

    def __post_init__(self):
        if isinstance(self.formulation, str):
            self.formulation = tuple(s.strip() for s in self.formulation.split(",") if s.strip())
        for f in self.formulation:
            if f not in FORMULATIONS:
                raise ConfigError(f"unknown formulation {f!r}; expected one of {', '.join(FORMULATIONS)}")
        if self.omega_min < 0 or self.omega_max < self.omega_min:
            raise ConfigError("need 0 <= omega_min <= omega_max")
        if self.omega_count < 2:
            raise ConfigError("omega_count must be >= 2")
        if (self.eta_re or self.eta_im) and "cc" not in self.formulation:
            raise ConfigError("eta is only meaningful with the cc formulation")

    @property
    def eta(self):
        return complex(self.eta_re, self.eta_im)

    @property
    def omegas(self):
        return np.linspace(self.omega_min, self.omega_max, self.omega_count)

    def setup(self, omega):
        return validate_setup(ProblemSetup(float(omega), Medium(complex(self.eps_re, self.eps_im),
                                                                complex(self.mu_re, self.mu_im)),
                                           Medium(self.eps0, self.mu0), self.nmax))


SWEEP_HEADER = ("formulation", "eta_re", "eta_im", "omega", "status", "condition", "sigma_min", "sigma_max",
                "worst_n", "nmax")


def _sweep_row(args):
    spec, f, omega = args
    eta = spec.eta if f == "cc" else 0j
    st = spec.setup(omega)
    if omega == 0 and f not in ZERO_OMEGA_OK:
        return (f, eta.real, eta.imag, omega, "unsupported", "", "", "", "", st.nmax)
    try:
        c, smin, smax, wn = condition_number(f, st, eta)
    except FormulationError:
        return (f, eta.real, eta.imag, omega, "unsupported", "", "", "", "", st.nmax)
    return (f, eta.real, eta.imag, omega, "ok", c, smin, smax, wn, st.nmax)


def _map(fn, tasks, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks, chunksize=4))
    return [fn(t) for t in tasks]


def run_sweep(spec: SweepSpec):
    """Rows (see SWEEP_HEADER) in (formulation, omega) order, plus CSV text."""
    tasks = [(spec, f, float(w)) for f in spec.formulation for w in spec.omegas]
    rows = _map(_sweep_row, tasks, spec.jobs)
    text = write_csv(SWEEP_HEADER, rows, spec_echo(spec), spec.out)
    return rows, text


# ---------------------------------------------------------------------------
# resonance map

@dataclass
class ResonanceMapSpec:
    formulation: str = "decoupled-cc"
    eps_re_min: float = -2.0
    eps_re_max: float = 2.0
    eps_re_count: int = 21
    mu_re_min: float = -2.0
    mu_re_max: float = 2.0
    mu_re_count: int = 21
    im_max: float = 1.0
    im_count: int = 4
    omega_min: float = 0.25
    omega_max: float = 10.0
    omega_count: int = 16
    refine_rounds: int = 2
    polish: int = 1
    threshold: float = 1e6
    eta_re: float = 0.0
    eta_im: float = 0.0
    nmax: int = 8
    jobs: int = 1
    out: str | None = None

    _types = dict(formulation=str, eps_re_min=float, eps_re_max=float, eps_re_count=int, mu_re_min=float,
                  mu_re_max=float, mu_re_count=int, im_max=float, im_count=int, omega_min=float,
                  omega_max=float, omega_count=int, refine_rounds=int, polish=int, threshold=float, eta_re=float,
                  eta_im=float, nmax=int, jobs=int, out=str)

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise ConfigError(f"unknown formulation {self.formulation!r}")
        if self.im_max <= 0 or self.im_count < 1:
            raise ConfigError("imaginary search range must be (0, im_max] with im_max > 0")
        if self.omega_min <= 0 and self.formulation not in ZERO_OMEGA_OK:
            raise ConfigError(f"{self.formulation} needs omega_min > 0")
        if self.eps_re_count < 1 or self.mu_re_count < 1 or self.omega_count < 1:
            raise ConfigError("grid counts must be >= 1")

    @property
    def eta(self):
        return complex(self.eta_re, self.eta_im)


RESMAP_HEADER = ("eps_re", "mu_re", "max_condition", "eps_im", "mu_im", "omega", "blow_up")


def _cond_at(spec, er, mr, ei, mi, w):
    st = validate_setup(ProblemSetup(float(w), Medium(complex(er, ei), complex(mr, mi)), n_max=spec.nmax))
    return condition_number(spec.formulation, st, spec.eta)[0]


def _refine_axis(center, step, lo, hi):
    return np.clip(center + step * np.array([-1.0, -0.5, 0.0, 0.5, 1.0]), lo, hi)


def _cell(args):
    spec, er, mr = args
    ims = spec.im_max * np.arange(1, spec.im_count + 1) / spec.im_count
    oms = np.linspace(spec.omega_min, spec.omega_max, spec.omega_count)
    best = (-1.0, None)
    grids = (ims, ims, oms)
    steps = [spec.im_max / spec.im_count, spec.im_max / spec.im_count,
             (spec.omega_max - spec.omega_min) / max(spec.omega_count - 1, 1)]
    for rnd in range(spec.refine_rounds + 1):
        for ei, mi, w in itertools.product(*grids):
            c = _cond_at(spec, er, mr, ei, mi, w)
            if c > best[0]:
                best = (c, (ei, mi, w))
        ei, mi, w = best[1]
        steps = [s / 2 for s in steps]
        # imaginary parts stay strictly positive so the material remains lossy
        grids = (_refine_axis(ei, steps[0], spec.im_max * 1e-3, spec.im_max),
                 _refine_axis(mi, steps[1], spec.im_max * 1e-3, spec.im_max),
                 _refine_axis(w, steps[2], spec.omega_min, spec.omega_max))
    if spec.polish:
        best = _polish(spec, er, mr, best)
    c, (ei, mi, w) = best
    return (er, mr, c, ei, mi, w, bool(c > spec.threshold))


def _polish(spec, er, mr, best):
    """Bounded Nelder-Mead on -log(condition) from the best grid point.

    Exact singularities form curves in (Im eps, Im mu, omega), so a grid alone
    rarely gets within reach of a large threshold.
    """
    from scipy.optimize import minimize

    lo = [spec.im_max * 1e-3, spec.im_max * 1e-3, spec.omega_min]
    hi = [spec.im_max, spec.im_max, spec.omega_max]

    def obj(p):
        p = np.clip(p, lo, hi)
        return -np.log(_cond_at(spec, er, mr, *p))

    res = minimize(obj, np.array(best[1]), method="Nelder-Mead", bounds=list(zip(lo, hi)),
                   options=dict(xatol=1e-9, fatol=1e-6, maxfev=400, initial_simplex=None))
    p = np.clip(res.x, lo, hi)
    c = float(np.exp(-res.fun))
    if c > best[0]:
        return (c, tuple(float(v) for v in p))
    return best


def run_resonance_map(spec: ResonanceMapSpec):
    ers = np.linspace(spec.eps_re_min, spec.eps_re_max, spec.eps_re_count)
    mrs = np.linspace(spec.mu_re_min, spec.mu_re_max, spec.mu_re_count)
    tasks = [(spec, float(er), float(mr)) for er in ers for mr in mrs]
    rows = _map(_cell, tasks, spec.jobs)
    meta = spec_echo(spec)
    meta["search"] = (f"coarse grid Im eps, Im mu in (0, im_max] x omega grid, then {spec.refine_rounds} rounds "
                      "of 5x5x5 local refinement around the max-condition point (step halved each round)"
                      + ("; then a bounded Nelder-Mead polish of log(condition)" if spec.polish else ""))
    text = write_csv(RESMAP_HEADER, rows, meta, spec.out)
    return rows, text


# ---------------------------------------------------------------------------
# point files

def read_points(path):
    """Whitespace-separated 'x y z' per line; blank lines and '#' comments skipped."""
    pts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 3 numbers 'x y z', got {len(parts)} fields")
            try:
                pts.append([float(p) for p in parts])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if not pts:
        raise ConfigError(f"{path}: no points")
    return np.array(pts)


__all__ = ["SweepSpec", "ResonanceMapSpec", "run_sweep", "run_resonance_map", "read_config", "read_points",
           "write_csv", "spec_from_mapping", "ConfigError"]
