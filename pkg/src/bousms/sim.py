"""Pseudo-spectral RK4 integrator for the Boussinesq family on a periodic domain."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import spectralkit as sk
from .coeffs import DEFAULT_TOL, SystemCoefficients
from .errors import BlowUpError, DomainError, UnsupportedRegimeError


@dataclass(frozen=True)
class FieldState:
    grid: sk.PeriodicGrid
    eta: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float)
        u = np.array(self.u, dtype=float)
        if eta.shape != (self.grid.n,) or u.shape != (self.grid.n,):
            raise DomainError(f"fields must have shape ({self.grid.n},)")
        if not (np.all(np.isfinite(eta)) and np.all(np.isfinite(u))):
            raise DomainError("fields must be finite")
        eta.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class ConservedDiagnostics:
    t: float
    mass_eta: float
    mass_u: float
    l2: float
    hamiltonian: float | None
    impulse: float | None
    # int(eta^2 + b eta_x^2 + u^2 + d u_x^2), invariant for every a = c system
    l2_weighted: float

    FIELDS = ("t", "mass_eta", "mass_u", "l2", "hamiltonian", "impulse", "l2_weighted")

    def as_row(self):
        return [getattr(self, f) for f in self.FIELDS]


def _check_regime(s: SystemCoefficients):
    if s.b < 0 or s.d < 0:
        raise UnsupportedRegimeError(
            f"simulator needs b, d >= 0 (got b={s.b}, d={s.d}); 1 + b k^2 would vanish")


class _Operator:
    """Fourier symbols of the evolution, cached per (coefficients, grid)."""

    def __init__(self, s: SystemCoefficients, grid: sk.PeriodicGrid):
        _check_regime(s)
        self.s, self.grid = s, grid
        k = grid.k
        ik = 1j * k
        ik[-1] = 0.0
        self.Pe = -ik / (1.0 + s.b * k**2)
        self.Pu = -ik / (1.0 + s.d * k**2)
        self.k2 = k**2
        self.keep = np.arange(k.size) < grid.n / 3.0

    def __call__(self, eta, u):
        s, n = self.s, self.grid.n
        eh, uh = np.fft.rfft(eta), np.fft.rfft(u)
        et = np.fft.irfft(eh * self.keep, n)
        ut = np.fft.irfft(uh * self.keep, n)
        Ah = np.fft.rfft(s.nl.A(et, ut)) * self.keep
        Bh = np.fft.rfft(s.nl.B(et, ut)) * self.keep
        eta_t = np.fft.irfft(self.Pe * (uh + Ah - s.a * self.k2 * uh), n)
        u_t = np.fft.irfft(self.Pu * (eh + Bh - s.c * self.k2 * eh), n)
        return eta_t, u_t


def rhs(s: SystemCoefficients, state: FieldState):
    """Time derivatives (eta_t, u_t) of the semi-discrete system."""
    return _Operator(s, state.grid)(state.eta, state.u)


def time_derivatives(s: SystemCoefficients, state: FieldState):
    """(eta_t, u_t, eta_tt, u_tt); the second derivatives come from the exact
    directional derivative of the quadratic right-hand side."""
    op = _Operator(s, state.grid)
    et, ut = op(state.eta, state.u)
    p = op(state.eta + et, state.u + ut)
    m = op(state.eta - et, state.u - ut)
    return et, ut, 0.5 * (p[0] - m[0]), 0.5 * (p[1] - m[1])


def linear_frequency(s: SystemCoefficients, k):
    """Omega(k) >= 0 with Omega^2 = k^2 omega1(k) omega2(k)."""
    k = np.asarray(k, dtype=float)
    w2 = k**2 * (1 - s.a * k**2) * (1 - s.c * k**2) / ((1 + s.b * k**2) * (1 + s.d * k**2))
    return np.sqrt(w2.astype(complex))


def diagnostics(s: SystemCoefficients, state: FieldState, tol: float = DEFAULT_TOL) -> ConservedDiagnostics:
    g, eta, u = state.grid, state.eta, state.u
    ex, ux = sk.diff(g, eta), sk.diff(g, u)
    ham = imp = None
    if abs(s.b - s.d) <= tol:
        dens = eta**2 + u**2 - s.c * ex**2 - s.a * ux**2 + 2.0 * s.nl.G(eta, u)
        ham = 0.5 * sk.integrate(g, dens)
        imp = sk.integrate(g, eta * u + s.b * ex * ux)
    return ConservedDiagnostics(
        t=state.t,
        mass_eta=sk.integrate(g, eta),
        mass_u=sk.integrate(g, u),
        l2=sk.integrate(g, eta**2 + u**2),
        hamiltonian=ham,
        impulse=imp,
        l2_weighted=sk.integrate(g, eta**2 + s.b * ex**2 + u**2 + s.d * ux**2),
    )


def _rk4(op, eta, u, h):
    k1 = op(eta, u)
    k2 = op(eta + 0.5 * h * k1[0], u + 0.5 * h * k1[1])
    k3 = op(eta + 0.5 * h * k2[0], u + 0.5 * h * k2[1])
    k4 = op(eta + h * k3[0], u + h * k3[1])
    return (eta + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            u + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def integrate(s: SystemCoefficients, state: FieldState, T: float, dt: float,
              observer=None, observe_every: int = 1) -> FieldState:
    """Advance ``state`` by ``T`` with classical RK4 steps of size ``dt``.

    ``observer(diag)`` receives ConservedDiagnostics at the initial time,
    after every ``observe_every`` steps and at the final time.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise DomainError(f"dt must be positive, got {dt!r}")
    if not (T >= 0 and math.isfinite(T)):
        raise DomainError(f"T must be non-negative, got {T!r}")
    if observe_every < 1:
        raise DomainError("observe_every must be >= 1")
    op = _Operator(s, state.grid)
    n_full = int(math.floor(T / dt * (1 + 1e-12)))
    rest = T - n_full * dt
    steps = [dt] * n_full
    if rest > 1e-12 * max(1.0, T):
        steps.append(rest)

    eta, u, t0 = state.eta, state.u, state.t
    last = state
    if observer is not None:
        observer(diagnostics(s, state))
    for i, h in enumerate(steps, start=1):
        with np.errstate(over="ignore", invalid="ignore"):  # blow-up is reported below
            eta, u = _rk4(op, eta, u, h)
        t = t0 + (i * dt if i <= n_full else T)
        if not (np.all(np.isfinite(eta)) and np.all(np.isfinite(u))):
            raise BlowUpError(f"non-finite values at t = {t:.6g}", last_state=last)
        last = FieldState(state.grid, eta, u, t)
        if observer is not None and (i % observe_every == 0 or i == len(steps)):
            observer(diagnostics(s, last))
    return last if steps else replace(state)
