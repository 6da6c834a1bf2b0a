"""Multi-symplectic form K z_t + M z_x = grad S(z).

Phase-vector layouts (fixed; every matrix product relies on them):

* Boussinesq family, dim 10: (eta, phi1, v1, w1, p1, u, phi2, v2, w2, p2)
* KdV-BBM equation, dim 5:  (u, phi, v, w, p)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectralkit as sk
from .coeffs import DEFAULT_TOL, MS_CONDITIONS, SystemCoefficients, classify_structure
from .errors import DomainError, StructureError

BOUSSINESQ_NAMES = ("eta", "phi1", "v1", "w1", "p1", "u", "phi2", "v2", "w2", "p2")
KDVBBM_NAMES = ("u", "phi", "v", "w", "p")


@dataclass(frozen=True)
class KdVBBM:
    """u_t + u u_x + alpha u_xxx - beta u_xxt = 0."""

    alpha: float
    beta: float


@dataclass(frozen=True, eq=False)
class MSSystem:
    dim: int
    K: np.ndarray
    M: np.ndarray
    potential: Callable
    gradient: Callable
    source: object
    names: tuple

    def __post_init__(self):
        self.K.setflags(write=False)
        self.M.setflags(write=False)


def _skew(dim, upper):
    """Assemble a skew matrix from 1-based upper entries {(i, j): value}."""
    A = np.zeros((dim, dim))
    for (i, j), v in upper.items():
        A[i - 1, j - 1] = v
        A[j - 1, i - 1] = -v
    return A


def build_boussinesq_ms(s: SystemCoefficients, tol: float = DEFAULT_TOL) -> MSSystem:
    """Explicit 10-dimensional MS formulation; requires a = c and the MS identities."""
    report = classify_structure(s, tol)
    if not report.is_multisymplectic:
        bad = [c for c in report.violated_conditions if c in MS_CONDITIONS]
        raise StructureError(f"coefficients are not multi-symplectic: violated {bad}", bad)
    a, b, d = s.a, s.b, s.d
    n = s.nl
    K = _skew(10, {(1, 2): 0.5, (1, 3): -b / 2, (6, 7): 0.5, (6, 8): -d / 2})
    M = _skew(10, {(1, 4): -b / 2, (1, 8): a, (2, 5): -1.0, (3, 6): -a,
                   (6, 9): -d / 2, (7, 10): -1.0})

    def potential(z):
        eta, _, v1, w1, p1, u, _, v2, w2, p2 = z
        return (p1 * eta - eta * u - n.alpha11 / 3 * eta**3 - n.beta11 * eta**2 * u
                - n.beta12 / 2 * eta * u**2 + b / 2 * v1 * w1 - n.beta22 / 3 * u**3
                + d / 2 * v2 * w2 - a * v1 * v2 + p2 * u)

    def gradient(z):
        eta, _, v1, w1, p1, u, _, v2, w2, p2 = z
        zero = np.zeros_like(eta)
        return np.array([
            p1 - u - n.alpha11 * eta**2 - 2 * n.beta11 * eta * u - n.beta12 / 2 * u**2,
            zero,
            b / 2 * w1 - a * v2,
            b / 2 * v1,
            eta,
            p2 - eta - n.beta11 * eta**2 - n.beta12 * eta * u - n.beta22 * u**2,
            zero,
            d / 2 * w2 - a * v1,
            d / 2 * v2,
            u,
        ])

    return MSSystem(10, K, M, potential, gradient, s, BOUSSINESQ_NAMES)


def build_kdvbbm_ms(alpha: float, beta: float) -> MSSystem:
    """Five-dimensional MS formulation of the KdV-BBM equation."""
    K = _skew(5, {(1, 2): 0.5, (1, 3): -beta / 2})
    M = _skew(5, {(1, 3): alpha, (1, 4): -beta / 2, (2, 5): -1.0})

    def potential(z):
        u, _, v, w, p = z
        return p * u - u**3 / 6 - alpha / 2 * v**2 + beta / 2 * v * w

    def gradient(z):
        u, _, v, w, p = z
        return np.array([p - u**2 / 2, np.zeros_like(u), -alpha * v + beta / 2 * w, beta / 2 * v, u])

    return MSSystem(5, K, M, potential, gradient, KdVBBM(alpha, beta), KDVBBM_NAMES)


def rhs_vector_field(s: SystemCoefficients, z):
    """Right-hand side of the first-order system, for any coefficients.

    Its Jacobian is symmetric for every z exactly when the coefficients are
    multi-symplectic, in which case it equals grad S.
    """
    eta, _, v1, w1, p1, u, _, v2, w2, p2 = z
    zero = np.zeros_like(eta)
    return np.array([
        p1 - u - s.nl.A(eta, u), zero, s.b / 2 * w1 - s.a * v2, s.b / 2 * v1, eta,
        p2 - eta - s.nl.B(eta, u), zero, s.d / 2 * w2 - s.c * v1, s.d / 2 * v2, u,
    ])


def jacobian_asymmetry(field: Callable, z, h: float = 1e-5) -> float:
    """max |J - J^T| of a vector field at z, J by central differences."""
    z = np.asarray(z, dtype=float)
    n = z.size
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (np.asarray(field(z + e)) - np.asarray(field(z - e))) / (2 * h)
    return float(np.max(np.abs(J - J.T)))


# --- sampled fields -------------------------------------------------------

@dataclass
class PhaseField:
    grid: sk.PeriodicGrid
    z: np.ndarray
    z_t: np.ndarray
    z_x: np.ndarray
    names: tuple
    has_second_order: bool = True

    def __post_init__(self):
        shape = (len(self.names), self.grid.n)
        for name in ("z", "z_t", "z_x"):
            if getattr(self, name).shape != shape:
                raise DomainError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def dim(self) -> int:
        return len(self.names)


def _potential_ops(grid, allow_mean, mean_tol):
    if allow_mean:
        return lambda f: sk.cumulative(grid, f)
    return lambda f: sk.antideriv(grid, f, tol=mean_tol)


def lift_state(s: SystemCoefficients, grid: sk.PeriodicGrid, eta, u, eta_t, u_t,
               eta_tt=None, u_tt=None, allow_mean: bool = False,
               mean_tol: float | None = None) -> PhaseField:
    """Reconstruct the 10-component phase field from (eta, u) and time derivatives.

    The potentials phi_i use the zero-mean periodic antiderivative, so eta
    and u must have zero mean. With ``allow_mean=True`` the antiderivative is
    anchored at x = -L instead; this is meant for localized data (solitary
    waves) where the resulting ramp only multiplies decayed quantities.

    Without second time derivatives the w_t and p_t components of z_t are
    left at zero (they do not enter K z_t) and fluxes cannot be formed.
    """
    D = lambda f, k=1: sk.diff(grid, f, k)  # noqa: E731
    P = _potential_ops(grid, allow_mean, mean_tol)
    eta, u, eta_t, u_t = (np.asarray(f, dtype=float) for f in (eta, u, eta_t, u_t))
    nl = s.nl

    phi1, phi2 = P(eta), P(u)
    phi1_t, phi2_t = P(eta_t), P(u_t)
    v1, v2 = D(eta), D(u)
    p1 = u + nl.A(eta, u) + 0.5 * phi1_t + s.a * D(u, 2) - s.b * D(eta_t)
    p2 = eta + nl.B(eta, u) + 0.5 * phi2_t + s.c * D(eta, 2) - s.d * D(u_t)
    z = np.array([eta, phi1, v1, eta_t, p1, u, phi2, v2, u_t, p2])

    z_x = np.array([D(f) for f in z])
    z_x[1], z_x[6] = eta, u

    second = eta_tt is not None and u_tt is not None
    zero = np.zeros(grid.n)
    if second:
        eta_tt, u_tt = np.asarray(eta_tt, dtype=float), np.asarray(u_tt, dtype=float)
        phi1_tt, phi2_tt = P(eta_tt), P(u_tt)
        p1_t = (u_t + nl.A_eta(eta, u) * eta_t + nl.A_u(eta, u) * u_t + 0.5 * phi1_tt
                + s.a * D(u_t, 2) - s.b * D(eta_tt))
        p2_t = (eta_t + nl.B_eta(eta, u) * eta_t + nl.B_u(eta, u) * u_t + 0.5 * phi2_tt
                + s.c * D(eta_t, 2) - s.d * D(u_tt))
        w1_t, w2_t = eta_tt, u_tt
    else:
        p1_t = p2_t = w1_t = w2_t = zero
    z_t = np.array([eta_t, phi1_t, D(eta_t), w1_t, p1_t, u_t, phi2_t, D(u_t), w2_t, p2_t])
    return PhaseField(grid, z, z_t, z_x, BOUSSINESQ_NAMES, second)


def lift_kdvbbm(eq: KdVBBM, grid: sk.PeriodicGrid, u, u_t, u_tt=None,
                allow_mean: bool = False, mean_tol: float | None = None) -> PhaseField:
    """Five-component phase field (u, phi, v, w, p) for the KdV-BBM equation."""
    D = lambda f, k=1: sk.diff(grid, f, k)  # noqa: E731
    P = _potential_ops(grid, allow_mean, mean_tol)
    u, u_t = np.asarray(u, dtype=float), np.asarray(u_t, dtype=float)
    phi, phi_t = P(u), P(u_t)
    v = D(u)
    p = 0.5 * u**2 + 0.5 * phi_t + eq.alpha * D(u, 2) - eq.beta * D(u_t)
    z = np.array([u, phi, v, u_t, p])
    z_x = np.array([D(f) for f in z])
    z_x[1] = u
    second = u_tt is not None
    if second:
        u_tt = np.asarray(u_tt, dtype=float)
        p_t = u * u_t + 0.5 * P(u_tt) + eq.alpha * D(u_t, 2) - eq.beta * D(u_tt)
        w_t = u_tt
    else:
        p_t = w_t = np.zeros(grid.n)
    z_t = np.array([u_t, phi_t, D(u_t), w_t, p_t])
    return PhaseField(grid, z, z_t, z_x, KDVBBM_NAMES, second)


def _check_dims(ms: MSSystem, pf: PhaseField):
    if pf.dim != ms.dim:
        raise DomainError(f"phase field has dimension {pf.dim}, MS system has {ms.dim}")


@dataclass
class MSResidual:
    field: np.ndarray

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self.field)))

    @property
    def per_component(self) -> np.ndarray:
        return np.max(np.abs(self.field), axis=1)


def ms_residual(ms: MSSystem, pf: PhaseField) -> MSResidual:
    """K z_t + M z_x - grad S(z) at every node."""
    _check_dims(ms, pf)
    return MSResidual(ms.K @ pf.z_t + ms.M @ pf.z_x - ms.gradient(pf.z))


def _inner(a, b):
    return np.einsum("in,in->n", a, b)


def conservation_densities(ms: MSSystem, pf: PhaseField):
    """Energy density E, energy flux F, momentum density I, momentum flux M."""
    _check_dims(ms, pf)
    if not pf.has_second_order:
        raise DomainError("fluxes need second time derivatives (eta_tt, u_tt) in the lift")
    S = ms.potential(pf.z)
    E = S - 0.5 * _inner(pf.z, ms.M @ pf.z_x)
    I = 0.5 * _inner(pf.z, ms.K @ pf.z_x)  # noqa: E741
    F = 0.5 * _inner(pf.z, ms.M @ pf.z_t)
    Mflux = S - 0.5 * _inner(pf.z, ms.K @ pf.z_t)
    return E, F, I, Mflux


def conservation_residuals(ms: MSSystem, pf: PhaseField):
    """Pointwise E_t + F_x and I_t + M_x.

    Time derivatives of the densities follow from z and z_t by the chain
    rule; x-derivatives of the fluxes are spectral, so the phase field must
    be periodic (zero-mean lift).
    """
    E, F, I, Mflux = conservation_densities(ms, pf)
    grid = pf.grid
    z_xt = np.array([sk.diff(grid, f) for f in pf.z_t])
    E_t = (_inner(ms.gradient(pf.z), pf.z_t) - 0.5 * _inner(pf.z_t, ms.M @ pf.z_x)
           - 0.5 * _inner(pf.z, ms.M @ z_xt))
    I_t = 0.5 * _inner(pf.z_t, ms.K @ pf.z_x) + 0.5 * _inner(pf.z, ms.K @ z_xt)
    return E_t + sk.diff(grid, F), I_t + sk.diff(grid, Mflux)


def phase_field_table(pf: PhaseField):
    """(header, rows) for CSV export: x, the z components, then z_t and z_x blocks."""
    header = ["x", *pf.names, *(f"{n}_t" for n in pf.names), *(f"{n}_x" for n in pf.names)]
    cols = np.vstack([pf.grid.x[None, :], pf.z, pf.z_t, pf.z_x])
    return header, cols.T.tolist()
