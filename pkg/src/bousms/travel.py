"""Traveling waves of the multi-symplectic family (a = c).

Profiles (zeta, u)(x - c_s t) satisfy, after one integration,

    -c_s zeta + u + A(zeta, u) + a u''    + b c_s zeta'' = 0
    -c_s u + zeta + B(zeta, u) + a zeta'' + d c_s u''    = 0

which is also written as the reversible first-order system U' = L U + R(U)
for U = (zeta, zeta', u, u').
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectralkit as sk
from .coeffs import DEFAULT_TOL, SystemCoefficients
from .errors import (ConvergenceError, DegenerateError, DomainError, NoBifurcationError,
                     StructureError, WrongSolverError)

REVERSER = np.diag([1.0, -1.0, 1.0, -1.0])
EIG_REL_TOL = 1e-9


@dataclass(frozen=True)
class TravelingWaveSetup:
    coeffs: SystemCoefficients
    c_s: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (math.isfinite(self.c_s) and self.c_s > 0):
            raise DomainError(f"speed must be positive, got {self.c_s!r}")
        if abs(self.coeffs.a - self.coeffs.c) > self.tol:
            raise StructureError("traveling-wave reduction needs a = c", ["a=c"])

    @property
    def mu_speed(self) -> float:
        return self.c_s - 1.0

    @property
    def Dfrak(self) -> float:
        s = self.coeffs
        return s.b * s.d * self.c_s**2 - s.a**2

    def with_speed(self, c_s: float) -> "TravelingWaveSetup":
        return TravelingWaveSetup(self.coeffs, c_s, self.tol)

    def _check_nondegenerate(self):
        s = self.coeffs
        scale = max(1.0, s.a**2, abs(s.b * s.d) * self.c_s**2)
        if abs(self.Dfrak) <= self.tol * scale:
            raise DegenerateError(f"b d c_s^2 - a^2 = {self.Dfrak:.3e} vanishes")


def build_linearization(setup: TravelingWaveSetup) -> np.ndarray:
    setup._check_nondegenerate()
    s, c, D = setup.coeffs, setup.c_s, setup.Dfrak
    a, b, d = s.a, s.b, s.d
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [(d * c**2 + a) / D, 0.0, -c * (a + d) / D, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-c * (a + b) / D, 0.0, (b * c**2 + a) / D, 0.0],
    ])


def nonlinear_term(setup: TravelingWaveSetup, U) -> np.ndarray:
    setup._check_nondegenerate()
    s, c, D = setup.coeffs, setup.c_s, setup.Dfrak
    U = np.asarray(U, dtype=float)
    A = s.nl.A(U[0], U[2])
    B = s.nl.B(U[0], U[2])
    zero = np.zeros_like(A)
    return np.array([zero, (-s.d * c * A + s.a * B) / D, zero, (-s.b * c * B + s.a * A) / D])


def vector_field(setup: TravelingWaveSetup, U) -> np.ndarray:
    """Full right-hand side L U + R(U)."""
    return build_linearization(setup) @ np.asarray(U, dtype=float) + nonlinear_term(setup, U)


# --- spectrum -------------------------------------------------------------

@dataclass(frozen=True)
class EigenReport:
    eigenvalues: tuple
    classification: str
    table1_prediction: str

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "classification": self.classification,
            "table1_prediction": self.table1_prediction,
        }


def table1_prediction(a: float, b: float, d: float, tol: float = DEFAULT_TOL) -> str:
    """Solitary-wave type for small c_s - 1 from the sign pattern of (a, b, d, bd - a^2)."""
    def sgn(v):
        return 0 if abs(v) <= tol else (1 if v > 0 else -1)

    sa, sb, sd, sq = sgn(a), sgn(b), sgn(d), sgn(b * d - a * a)
    rows = [
        (sa > 0 and sb == 0 and sd == 0, "Gen"),
        (sa < 0 and sb == 0 and sd > 0, "Gen"),
        (sa > 0 and sd == 0 and sb > 0, "Gen"),
        (sa < 0 and sb > 0 and sd > 0 and sq > 0, "Class"),
        (sa < 0 and sb > 0 and sd > 0 and sq < 0, "Gen"),
        (sa > 0 and sb > 0 and sd > 0 and sq > 0, "Class"),
        (sa > 0 and sb > 0 and sd > 0 and sq < 0, "Gen"),
        (sa > 0 and sgn(b - d) == 0 and sb < 0, "Gen"),
        (sa == 0 and sb > 0 and sd > 0, "Class"),
    ]
    for matched, label in rows:
        if matched:
            return label
    return "Unlisted"


def _classify_spectrum(lam) -> str:
    thr = EIG_REL_TOL * (1.0 + np.abs(lam))
    real = (np.abs(lam.imag) <= thr) & (np.abs(lam) > thr)
    imag = (np.abs(lam.real) <= thr) & (np.abs(lam) > thr)
    if real.all():
        r = np.sort(lam.real)
        if np.all(np.diff(r) > EIG_REL_TOL * (1.0 + np.abs(r[1:]))):
            return "Class"
        return "Degenerate"
    if real.sum() == 2 and imag.sum() == 2:
        return "Gen"
    return "Degenerate"


def eigenvalues(setup: TravelingWaveSetup) -> np.ndarray:
    lam = np.linalg.eigvals(build_linearization(setup))
    return lam[np.lexsort((lam.imag, lam.real))]


def eigen_classify(setup: TravelingWaveSetup) -> EigenReport:
    """Spectrum of the linearization at U = 0 and its solitary-wave class.

    Speeds c_s <= 1 are reported as NoWave: the bifurcation analysis only
    covers c_s slightly above one.
    """
    lam = eigenvalues(setup)
    label = "NoWave" if setup.c_s <= 1.0 else _classify_spectrum(lam)
    s = setup.coeffs
    return EigenReport(tuple(complex(z) for z in lam), label,
                       table1_prediction(s.a, s.b, s.d, setup.tol))


def spectrum_pairing_defect(lam) -> float:
    """max over eigenvalues of the distance from -lambda to the spectrum."""
    lam = np.asarray(lam)
    return float(max(np.min(np.abs(lam + z)) for z in lam))


# --- normal form ----------------------------------------------------------

@dataclass(frozen=True)
class NormalFormConstants:
    sigma: float
    a: float

    @property
    def c10(self) -> float:
        if not self.a > 0:
            raise DomainError("c10 needs a > 0")
        return 1.0 / self.a

    @property
    def c20(self) -> float:
        if not self.a > 0:
            raise DomainError("c20 needs a > 0")
        return -self.sigma / (2.0 * self.a)

    def leading_amplitude(self, c_s: float) -> float:
        """Crest height of the small-amplitude homoclinic orbit, 3 (c_s - 1) / sigma.

        With c_s = 1 + mu the profiles reduce to zeta = u = v where
        Lambda v'' = 2 mu v - sigma v^2, whose homoclinic orbit peaks at
        3 mu / sigma whatever the dispersion weight Lambda.
        """
        if not self.sigma > 0:
            raise DomainError(f"amplitude needs sigma > 0, got {self.sigma}")
        return 3.0 * (c_s - 1.0) / self.sigma

    def to_dict(self) -> dict:
        out = {"sigma": self.sigma, "a": self.a}
        out["c10"] = self.c10 if self.a > 0 else None
        out["c20"] = self.c20 if self.a > 0 else None
        return out


def normal_form_constants(s: SystemCoefficients, a: float | None = None) -> NormalFormConstants:
    return NormalFormConstants(s.nl.sigma, s.a if a is None else a)


def dispersion_weight(setup: TravelingWaveSetup) -> float:
    """Lambda = 2a + c_s (b + d), the second-derivative weight of the reduced equation."""
    s = setup.coeffs
    return 2.0 * s.a + setup.c_s * (s.b + s.d)


def sech2_guess(setup: TravelingWaveSetup, x) -> np.ndarray:
    """Small-amplitude sech^2 profile from the reduced scalar equation."""
    mu = setup.mu_speed
    lam = dispersion_weight(setup)
    if not (mu > 0 and lam > 0):
        raise DomainError("sech^2 guess needs c_s > 1 and 2a + c_s(b+d) > 0")
    amp = normal_form_constants(setup.coeffs).leading_amplitude(setup.c_s)
    kappa = 0.5 * math.sqrt(2.0 * mu / lam)
    return amp / np.cosh(kappa * np.asarray(x)) ** 2


# --- collocation solver ---------------------------------------------------

@dataclass
class ProfilePair:
    grid: sk.PeriodicGrid
    zeta: np.ndarray
    u: np.ndarray
    c_s: float
    residual_norm: float
    tail_amplitude: float | None = None
    iterations: int = 0
    history: list = field(default_factory=list)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def amplitude(self) -> tuple:
        return float(np.max(self.zeta)), float(np.max(self.u))

    def evenness_defect(self) -> float:
        mirror = (-np.arange(self.grid.n)) % self.grid.n
        return float(max(np.max(np.abs(self.zeta - self.zeta[mirror])),
                         np.max(np.abs(self.u - self.u[mirror]))))

    def end_values(self) -> float:
        return float(max(abs(self.zeta[0]), abs(self.u[0])))


def default_grid(setup: TravelingWaveSetup, n_max: int = 4096) -> sk.PeriodicGrid:
    """Half-length 50/sqrt(c_s - 1); enough nodes to resolve the pulse width."""
    mu = setup.mu_speed
    if not mu > 0:
        raise NoBifurcationError(f"c_s = {setup.c_s} <= 1")
    L = 50.0 / math.sqrt(mu)
    lam = dispersion_weight(setup)
    kappa = 0.5 * math.sqrt(2.0 * mu / lam) if lam > 0 else 1.0
    # highest resolved wavenumber must exceed ~16 kappa and any tail ripple
    k_need = 16.0 * kappa
    lin = eigenvalues(setup)
    k_need = max(k_need, 4.0 * float(np.max(np.abs(lin.imag))))
    n = 512
    while n < n_max and math.pi * n / (2 * L) < k_need:
        n *= 2
    return sk.PeriodicGrid(L, n)


def _profile_equations(setup, grid, zeta, u):
    s, c = setup.coeffs, setup.c_s
    zxx, uxx = sk.diff(grid, zeta, 2), sk.diff(grid, u, 2)
    F1 = -c * zeta + u + s.nl.A(zeta, u) + s.a * uxx + s.b * c * zxx
    F2 = -c * u + zeta + s.nl.B(zeta, u) + s.a * zxx + s.d * c * uxx
    return F1, F2


class _EvenCollocation:
    """Collocation of the profile equations on even functions.

    Unknowns are the values on x = 0, dx, ..., L for zeta then u.
    """

    def __init__(self, setup: TravelingWaveSetup, grid: sk.PeriodicGrid):
        self.setup, self.grid = setup, grid
        n, h = grid.n, grid.n // 2
        self.half = h
        # full node j <-> half index |j - n/2|
        self.ext = np.abs(np.arange(n) - h)
        self.rows = np.concatenate([np.arange(h, n), [0]])
        col = np.fft.irfft(-(grid.k ** 2), n)  # first column of circulant D2
        r = self.rows[:, None]
        i = np.arange(h + 1)[None, :]
        D2h = col[(r - (h + i)) % n] + col[(r - (h - i)) % n]
        D2h[:, 0] *= 0.5
        D2h[:, h] = col[(self.rows - 0) % n]
        self.D2h = D2h

    def extend(self, v):
        return v[self.ext]

    def split(self, y):
        m = self.half + 1
        return y[:m], y[m:]

    def full_residual(self, zeta, u):
        return _profile_equations(self.setup, self.grid, zeta, u)

    def residual(self, y):
        zh, uh = self.split(y)
        F1, F2 = self.full_residual(self.extend(zh), self.extend(uh))
        return np.concatenate([F1[self.rows], F2[self.rows]])

    def jacobian(self, y):
        s, c = self.setup.coeffs, self.setup.c_s
        zh, uh = self.split(y)
        D2 = self.D2h
        nl = s.nl
        J11 = np.diag(-c + nl.A_eta(zh, uh)) + s.b * c * D2
        J12 = np.diag(1.0 + nl.A_u(zh, uh)) + s.a * D2
        J21 = np.diag(1.0 + nl.B_eta(zh, uh)) + s.a * D2
        J22 = np.diag(-c + nl.B_u(zh, uh)) + s.d * c * D2
        return np.block([[J11, J12], [J21, J22]])

    def pack(self, zeta, u):
        return np.concatenate([zeta[self.rows], u[self.rows]])

    def unpack(self, y):
        zh, uh = self.split(y)
        return self.extend(zh), self.extend(uh)


def _newton_profile(setup, grid, zeta0, u0, tol, max_iter):
    col = _EvenCollocation(setup, grid)
    res = sk.newton(col.residual, col.jacobian, col.pack(zeta0, u0),
                    tol=tol, max_iter=max_iter, step_tol=tol)
    zeta, u = col.unpack(res.x)
    F1, F2 = col.full_residual(zeta, u)
    rnorm = float(max(np.max(np.abs(F1)), np.max(np.abs(F2))))
    return zeta, u, rnorm, res


def profile_residual(setup: TravelingWaveSetup, grid: sk.PeriodicGrid, zeta, u) -> float:
    """Max-norm of the discrete profile equations."""
    F1, F2 = _profile_equations(setup, grid, np.asarray(zeta, float), np.asarray(u, float))
    return float(max(np.max(np.abs(F1)), np.max(np.abs(F2))))


RESIDUAL_CONTRACT = 1e-10
DECAY_CONTRACT = 1e-8


def _require(setup: TravelingWaveSetup, wanted: str):
    if setup.c_s <= 1.0:
        raise NoBifurcationError(f"no solitary-wave bifurcation for c_s = {setup.c_s} <= 1")
    label = eigen_classify(setup).classification
    if label != wanted:
        other = "solve_generalized" if label == "Gen" else "nothing"
        raise WrongSolverError(f"spectrum is {label!r}, this solver needs {wanted!r} (use {other})")


def solve_classical(setup: TravelingWaveSetup, grid: sk.PeriodicGrid | None = None,
                    init: ProfilePair | None = None, tol: float = 1e-12,
                    max_iter: int = 50) -> ProfilePair:
    """Classical solitary wave by Newton iteration on the even collocation system.

    The default initial guess is the small-amplitude sech^2 profile; if Newton
    fails from it, the solution is continued in c_s from c_s = 1.01.
    """
    _require(setup, "Class")
    if not setup.coeffs.nl.sigma > 0:
        raise DomainError("classical waves need sigma = sum(alpha_ij + beta_ij) > 0")
    grid = grid or default_grid(setup)

    def attempt(s, zeta0, u0):
        zeta, u, rnorm, res = _newton_profile(s, grid, zeta0, u0, tol, max_iter)
        if rnorm > RESIDUAL_CONTRACT:
            raise ConvergenceError(f"residual {rnorm:.3e} above contract", last=(zeta, u),
                                   history=res.history)
        if np.max(np.abs(zeta)) < 1e-3 * sech2_guess(s, 0.0):
            raise ConvergenceError("Newton collapsed onto the trivial state", last=(zeta, u),
                                   history=res.history)
        return zeta, u, rnorm, res

    if init is not None:
        zeta0, u0 = (init.zeta, init.u) if init.grid == grid else _regrid(init, grid)
    else:
        zeta0 = u0 = sech2_guess(setup, grid.x)
    try:
        zeta, u, rnorm, res = attempt(setup, zeta0, u0)
    except ConvergenceError:
        mu_start = 0.01
        if setup.mu_speed <= mu_start or init is not None:
            raise

        def step(y, c_s):
            z0, u0_ = y if y is not None else (sech2_guess(setup.with_speed(c_s), grid.x),) * 2
            return attempt(setup.with_speed(c_s), z0, u0_)[:2]

        zeta, u = sk.continuation(step, None, 1.0 + mu_start, setup.c_s, step=0.02, min_step=1e-4)
        zeta, u, rnorm, res = attempt(setup, zeta, u)
    pair = ProfilePair(grid, zeta, u, setup.c_s, rnorm, None, res.iterations, res.history)
    if pair.end_values() > DECAY_CONTRACT:
        raise ConvergenceError(
            f"profile does not decay at the domain ends ({pair.end_values():.2e}); enlarge L",
            last=pair, history=res.history)
    return pair


def _regrid(pair: ProfilePair, grid: sk.PeriodicGrid):
    """Carry a profile onto another grid by evaluating its Fourier interpolant."""
    out = []
    for f in (pair.zeta, pair.u):
        fh = np.fft.rfft(f) / pair.grid.n
        k = pair.grid.k
        w = np.full(k.size, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        phase = np.exp(1j * np.outer(grid.x + pair.grid.L, k))
        vals = (phase * (w * fh)).real.sum(axis=1)
        # outside the old domain the profile is taken as zero
        vals[np.abs(grid.x) > pair.grid.L] = 0.0
        out.append(vals)
    return out[0], out[1]


def tail_wavenumber(pair: ProfilePair, fraction: float = 0.1) -> float:
    """Ripple wavenumber in the outer ``fraction`` of the domain, from zero crossings."""
    x, f = pair.grid.x, pair.zeta
    mask = x >= (1.0 - 2.0 * fraction) * pair.grid.L
    xs, g = x[mask], f[mask] - np.mean(f[mask])
    sign = np.signbit(g)
    idx = np.nonzero(sign[1:] != sign[:-1])[0]
    if idx.size < 3:
        return float("nan")
    roots = xs[idx] - g[idx] * (xs[idx + 1] - xs[idx]) / (g[idx + 1] - g[idx])
    return float(math.pi * (roots.size - 1) / (roots[-1] - roots[0]))


def solve_generalized(setup: TravelingWaveSetup, grid: sk.PeriodicGrid | None = None,
                      init: ProfilePair | None = None, tol: float = 1e-12,
                      max_iter: int = 50) -> ProfilePair:
    """Best-effort generalized solitary wave (pulse on a periodic ripple).

    Convergence is not guaranteed; on failure the ConvergenceError carries the
    last iterate as (zeta, u).
    """
    _require(setup, "Gen")
    grid = grid or default_grid(setup)
    if init is not None:
        zeta0, u0 = (init.zeta, init.u) if init.grid == grid else _regrid(init, grid)
    else:
        zeta0 = u0 = sech2_guess(setup, grid.x)
    zeta, u, rnorm, res = _newton_profile(setup, grid, zeta0, u0, tol, max_iter)
    if rnorm > 1e-8:
        raise ConvergenceError(f"residual {rnorm:.3e} above 1e-8", last=(zeta, u),
                               history=res.history)
    outer = np.abs(grid.x) >= 0.9 * grid.L
    tail = float(np.max(np.abs(zeta[outer])))
    return ProfilePair(grid, zeta, u, setup.c_s, rnorm, tail, res.iterations, res.history)


# --- speed-amplitude curve -----------------------------------------------

@dataclass
class CurveRow:
    c_s: float
    amp_zeta: float
    amp_u: float
    residual: float
    status: str

    def as_tuple(self):
        return (self.c_s, self.amp_zeta, self.amp_u, self.residual, self.status)


def speed_amplitude_curve(s: SystemCoefficients, speeds, grid: sk.PeriodicGrid | None = None):
    """One classical solve per speed, each seeded by the previous converged profile.

    Without ``grid`` every speed gets its default grid and the previous
    profile is interpolated onto it. Failed speeds produce a row with status
    'failed: <reason>' instead of aborting the sweep.
    """
    rows, prev = [], None
    for c_s in (float(c) for c in speeds):
        pair = None
        try:
            setup = TravelingWaveSetup(s, c_s)
            if prev is not None:
                try:
                    pair = solve_classical(setup, grid, init=prev)
                except ConvergenceError:
                    pair = None
            if pair is None:
                pair = solve_classical(setup, grid)
        except Exception as exc:  # noqa: BLE001 - every failure becomes a marked row
            rows.append(CurveRow(c_s, float("nan"), float("nan"), float("nan"), f"failed: {exc}"))
            continue
        amp_z, amp_u = pair.amplitude
        rows.append(CurveRow(c_s, amp_z, amp_u, pair.residual_norm, "ok"))
        prev = pair
    return rows
