"""Material parameters, passivity, wavenumber branch and problem setup."""
import math
from dataclasses import dataclass, field, replace

import numpy as np


class InvalidMaterialError(ValueError):
    def __init__(self, param, value, reason):
        self.param = param
        self.value = value
        super().__init__(f"{param}={value!r}: {reason}")


def _passive(z: complex) -> bool:
    # strictly lossy, or lossless with a positive real part
    return z.imag > 0 or (z.imag == 0 and z.real > 0)


@dataclass(frozen=True)
class Medium:
    epsilon: complex = 1.0
    mu: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", complex(self.epsilon))
        object.__setattr__(self, "mu", complex(self.mu))

    @property
    def is_passive(self) -> bool:
        return _passive(self.epsilon) and _passive(self.mu)

    def check(self, prefix=""):
        for name in ("epsilon", "mu"):
            v = getattr(self, name)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidMaterialError(prefix + name, v, "not finite")
            if not _passive(v):
                raise InvalidMaterialError(prefix + name, v, "violates passivity (need Im > 0, or real and > 0)")
        return self


VACUUM = Medium(1.0, 1.0)


def wavenumber(omega: float, m: Medium) -> complex:
    """omega * sqrt(eps mu) on the branch Im k >= 0; exactly 0 at omega = 0."""
    m.check()
    omega = float(omega)
    if omega < 0 or not math.isfinite(omega):
        raise ValueError(f"omega must be finite and >= 0, got {omega!r}")
    if omega == 0.0:
        return 0j
    k = omega * np.sqrt(m.epsilon * m.mu)
    if k.imag < 0:
        k = -k
    return complex(k)


def default_nmax(omega: float, interior: Medium, exterior: Medium) -> int:
    size = max(abs(np.sqrt(interior.epsilon * interior.mu)), abs(np.sqrt(exterior.epsilon * exterior.mu)))
    return max(4, int(math.ceil(omega * size)) + 12)


@dataclass(frozen=True)
class ProblemSetup:
    omega: float
    interior: Medium
    exterior: Medium = field(default=VACUUM)
    n_max: int | None = None

    @property
    def eps(self):
        return self.interior.epsilon

    @property
    def mu(self):
        return self.interior.mu

    @property
    def eps0(self):
        return self.exterior.epsilon

    @property
    def mu0(self):
        return self.exterior.mu

    @property
    def k(self):
        return wavenumber(self.omega, self.interior)

    @property
    def k0(self):
        return wavenumber(self.omega, self.exterior)

    @property
    def nmax(self) -> int:
        if self.n_max is not None:
            return int(self.n_max)
        return default_nmax(self.omega, self.interior, self.exterior)

    def swapped(self) -> "ProblemSetup":
        """Dual problem: (eps, mu) <-> (mu, eps) in both media."""
        return replace(self, interior=Medium(self.mu, self.eps), exterior=Medium(self.mu0, self.eps0))


def validate_setup(p: ProblemSetup) -> ProblemSetup:
    """Check passivity and omega, and fill in the default truncation."""
    om = p.omega
    if not isinstance(om, (int, float, np.floating, np.integer)) or not math.isfinite(float(om)):
        raise ValueError(f"omega must be a finite real, got {om!r}")
    if om < 0:
        raise ValueError(f"omega must be >= 0, got {om!r}")
    p.exterior.check("exterior.")
    p.interior.check("interior.")
    if p.n_max is not None and p.n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {p.n_max}")
    return replace(p, omega=float(om), n_max=p.nmax)


def make_setup(omega, eps, mu, eps0=1.0, mu0=1.0, n_max=None) -> ProblemSetup:
    return validate_setup(ProblemSetup(omega=omega, interior=Medium(eps, mu), exterior=Medium(eps0, mu0), n_max=n_max))
