"""Parameter space of the Boussinesq family and its algebraic classification.

The family is

    eta_t + [u + A(eta, u) + a u_xx - b eta_xt]_x = 0
    u_t   + [eta + B(eta, u) + c eta_xx - d u_xt]_x = 0

with A = a11 eta^2 + a12 eta u + a22 u^2 and B = b11 eta^2 + b12 eta u + b22 u^2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

from .errors import DomainError

DEFAULT_TOL = 1e-12

DISPERSION_KEYS = ("a", "b", "c", "d")
NONLINEAR_KEYS = ("alpha11", "alpha12", "alpha22", "beta11", "beta12", "beta22")
THETA_KEYS = ("theta", "nu", "mu")


def _check_finite(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class ThetaNuMu:
    theta: float
    nu: float
    mu_disp: float

    def __post_init__(self):
        _check_finite(self, ("theta", "nu", "mu_disp"))
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"theta must lie in [0, 1], got {self.theta!r}")


@dataclass(frozen=True)
class DispersionCoefficients:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        _check_finite(self, DISPERSION_KEYS)


@dataclass(frozen=True)
class NonlinearCoefficients:
    alpha11: float = 0.0
    alpha12: float = 0.0
    alpha22: float = 0.0
    beta11: float = 0.0
    beta12: float = 0.0
    beta22: float = 0.0

    def __post_init__(self):
        _check_finite(self, NONLINEAR_KEYS)

    @property
    def sigma(self) -> float:
        """Sum of all six quadratic coefficients."""
        return (self.alpha11 + self.alpha12 + self.alpha22
                + self.beta11 + self.beta12 + self.beta22)

    def A(self, eta, u):
        return self.alpha11 * eta**2 + self.alpha12 * eta * u + self.alpha22 * u**2

    def B(self, eta, u):
        return self.beta11 * eta**2 + self.beta12 * eta * u + self.beta22 * u**2

    def A_eta(self, eta, u):
        return 2 * self.alpha11 * eta + self.alpha12 * u

    def A_u(self, eta, u):
        return self.alpha12 * eta + 2 * self.alpha22 * u

    def B_eta(self, eta, u):
        return 2 * self.beta11 * eta + self.beta12 * u

    def B_u(self, eta, u):
        return self.beta12 * eta + 2 * self.beta22 * u

    def G(self, eta, u):
        """Cubic potential entering the Hamiltonian of b = d systems."""
        return (self.beta11 / 3 * eta**3 + self.beta12 / 2 * eta**2 * u
                + self.beta22 * eta * u**2 + self.alpha22 / 3 * u**3)


@dataclass(frozen=True)
class SystemCoefficients:
    disp: DispersionCoefficients
    nl: NonlinearCoefficients = field(default_factory=NonlinearCoefficients)

    # flat accessors, used everywhere in the numerics
    a = property(lambda self: self.disp.a)
    b = property(lambda self: self.disp.b)
    c = property(lambda self: self.disp.c)
    d = property(lambda self: self.disp.d)

    @classmethod
    def from_values(cls, a, b, c, d, **nl) -> "SystemCoefficients":
        return cls(DispersionCoefficients(a, b, c, d), NonlinearCoefficients(**nl))

    def to_dict(self) -> dict:
        return {**asdict(self.disp), **asdict(self.nl)}

    def replace(self, **changes) -> "SystemCoefficients":
        values = self.to_dict()
        unknown = set(changes) - set(values)
        if unknown:
            raise KeyError(f"unknown coefficient(s): {sorted(unknown)}")
        values.update(changes)
        return coefficients_from_mapping(values)


def abcd_from_theta(p: ThetaNuMu) -> DispersionCoefficients:
    """Map (theta, nu, mu) onto (a, b, c, d); a + b + c + d = 1/3 always."""
    if not 0.0 <= p.theta <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {p.theta!r}")
    s = p.theta**2 - 1.0 / 3.0
    r = 1.0 - p.theta**2
    return DispersionCoefficients(
        a=0.5 * s * p.nu,
        b=0.5 * s * (1.0 - p.nu),
        c=0.5 * r * p.mu_disp,
        d=0.5 * r * (1.0 - p.mu_disp),
    )


# classical (a,b,c,d) nonlinearity: A = eta u, B = u^2 / 2
CLASSICAL_NONLINEARITY = NonlinearCoefficients(alpha12=1.0, beta22=0.5)


def coefficients_from_mapping(doc: Mapping) -> SystemCoefficients:
    """Build coefficients from a JSON-like mapping.

    Accepts either the explicit keys ``a, b, c, d`` or ``theta, nu, mu``;
    the six nonlinear keys are optional when ``theta, nu, mu`` is used (the
    classical nonlinearity is assumed) and required otherwise.
    """
    has_abcd = any(k in doc for k in DISPERSION_KEYS)
    has_theta = any(k in doc for k in THETA_KEYS)
    if has_abcd == has_theta:
        raise DomainError("provide exactly one of {a,b,c,d} or {theta,nu,mu}")
    try:
        if has_abcd:
            disp = DispersionCoefficients(*(float(doc[k]) for k in DISPERSION_KEYS))
        else:
            disp = abcd_from_theta(ThetaNuMu(float(doc["theta"]), float(doc["nu"]), float(doc["mu"])))
    except KeyError as exc:
        raise DomainError(f"missing coefficient {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad coefficient value: {exc}") from None

    present = [k for k in NONLINEAR_KEYS if k in doc]
    if has_abcd and len(present) != len(NONLINEAR_KEYS):
        missing = [k for k in NONLINEAR_KEYS if k not in doc]
        raise DomainError(f"missing coefficient(s) {missing}")
    if present:
        try:
            nl = NonlinearCoefficients(**{k: float(doc.get(k, 0.0)) for k in NONLINEAR_KEYS})
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"bad coefficient value: {exc}") from None
    else:
        nl = CLASSICAL_NONLINEARITY
    return SystemCoefficients(disp, nl)


# --- named systems --------------------------------------------------------

_BBM_DISP = DispersionCoefficients(0.0, 1 / 6, 0.0, 1 / 6)
_KDV_DISP = DispersionCoefficients(1 / 6, 0.0, 1 / 6, 0.0)
_FIG2_NL = NonlinearCoefficients(alpha12=0.46, beta11=0.23, beta22=0.73)

PRESETS = {
    "abcd-classic": SystemCoefficients(_BBM_DISP, CLASSICAL_NONLINEARITY),
    # KdV-KdV dispersion: the only a=c, b=d=0 member, where the L2 norm is invariant
    "symmetric": SystemCoefficients(_KDV_DISP, NonlinearCoefficients(alpha12=0.5, beta11=0.25, beta22=0.75)),
    "ms-modified": SystemCoefficients(_BBM_DISP, NonlinearCoefficients(alpha12=1.0, beta11=0.5, beta22=0.5)),
    "figure2": SystemCoefficients(_BBM_DISP, _FIG2_NL),
    "kdvkdv": SystemCoefficients(_KDV_DISP, _FIG2_NL),
}


def preset(name: str) -> SystemCoefficients:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# --- structure ------------------------------------------------------------

MS_CONDITIONS = ("a=c", "alpha12=2*beta11", "beta12=2*alpha22")
SYMPLECTIC_CONDITIONS = ("b=d", "beta12=2*alpha11", "alpha12=2*beta22")


@dataclass(frozen=True)
class StructureReport:
    is_multisymplectic: bool
    is_symplectic: bool
    is_both: bool
    violated_conditions: list
    tolerance_used: float

    def to_dict(self) -> dict:
        return asdict(self)


def _condition_gaps(s: SystemCoefficients) -> dict:
    n = s.nl
    return {
        "a=c": s.a - s.c,
        "alpha12=2*beta11": n.alpha12 - 2 * n.beta11,
        "beta12=2*alpha22": n.beta12 - 2 * n.alpha22,
        "b=d": s.b - s.d,
        "beta12=2*alpha11": n.beta12 - 2 * n.alpha11,
        "alpha12=2*beta22": n.alpha12 - 2 * n.beta22,
    }


def classify_structure(s: SystemCoefficients, tol: float = DEFAULT_TOL) -> StructureReport:
    """Check the multi-symplectic and symplectic coefficient identities."""
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    gaps = _condition_gaps(s)
    violated = [name for name, gap in gaps.items() if not abs(gap) <= tol]
    ms = not any(name in violated for name in MS_CONDITIONS)
    sy = not any(name in violated for name in SYMPLECTIC_CONDITIONS)
    return StructureReport(ms, sy, ms and sy, violated, tol)


# --- well-posedness -------------------------------------------------------

@dataclass(frozen=True)
class WellPosednessReport:
    linear_case: str | None
    symbol_order_ell: int | None
    sobolev_shifts: tuple | None
    nonlinear_case: str

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.sobolev_shifts is not None:
            d["sobolev_shifts"] = list(self.sobolev_shifts)
        return d


def symbol_g(s: SystemCoefficients, k):
    """sqrt(omega1/omega2); with a = c the common factor (1 - a k^2) cancels."""
    return ((1 + s.d * k**2) / (1 + s.b * k**2)) ** 0.5


def omega1(s: SystemCoefficients, k):
    return (1 - s.a * k**2) / (1 + s.b * k**2)


def omega2(s: SystemCoefficients, k):
    return (1 - s.c * k**2) / (1 + s.d * k**2)


def classify_wellposedness(s: SystemCoefficients, tol: float = DEFAULT_TOL) -> WellPosednessReport:
    a, b, d = s.a, s.b, s.d
    if abs(a - s.c) > tol:
        return WellPosednessReport(None, None, None, "Unknown")

    def zero(v):
        return abs(v) <= tol

    def pos(v):
        return v > tol

    def neg(v):
        return v < -tol

    if (pos(b) or zero(b)) and (pos(d) or zero(d)):
        linear = "L1"
    elif zero(b - d) and neg(b) and pos(a):
        linear = "L2"
    else:
        linear = None

    if linear is None:
        ell = shifts = None
    else:
        ell = (0 if zero(d) else 1) - (0 if zero(b) else 1)
        shifts = (max(0, -ell), max(0, ell))

    if pos(a) and zero(b) and zero(d):
        nonlinear = "N2"
    elif pos(b) and pos(d):
        nonlinear = "N1"
    elif zero(b) and pos(d):
        nonlinear = "N3"
    elif (pos(a) or zero(a)) and pos(b) and zero(d):
        nonlinear = "N4"
    else:
        nonlinear = "Unknown"
    return WellPosednessReport(linear, ell, shifts, nonlinear)
