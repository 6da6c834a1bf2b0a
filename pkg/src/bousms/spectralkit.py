"""Periodic Fourier grid, spectral calculus and a dense Newton driver.

Every function here takes and returns physical-space samples; the FFT
layout and normalisation never leak to callers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on [-L, L) with ``n`` nodes (``n`` a power of two)."""

    L: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise DomainError(f"half-length must be positive, got {self.L!r}")
        n = int(self.n)
        if n < 4 or n & (n - 1):
            raise DomainError(f"node count must be a power of two >= 4, got {self.n!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        """Wavenumbers of the real transform (multiples of pi/L)."""
        return (np.pi / self.L) * np.arange(self.n // 2 + 1)

    @property
    def k_max(self) -> float:
        return np.pi * (self.n // 2) / self.L

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)


def _rfft(f):
    return np.fft.rfft(np.asarray(f, dtype=float))


def _irfft(fh, n):
    return np.fft.irfft(fh, n)


def diff(grid: PeriodicGrid, f, order: int = 1) -> np.ndarray:
    """Spectral derivative of ``f`` of the given order."""
    if order < 1:
        raise DomainError("derivative order must be >= 1")
    fh = _rfft(f) * (1j * grid.k) ** order
    if order % 2 == 1:
        fh[-1] = 0.0
    return _irfft(fh, grid.n)


def apply_symbol(grid: PeriodicGrid, f, symbol) -> np.ndarray:
    """Multiply the transform of ``f`` by ``symbol(k)`` (or an array over ``grid.k``)."""
    sym = symbol(grid.k) if callable(symbol) else np.asarray(symbol)
    return _irfft(_rfft(f) * sym, grid.n)


def mean(grid: PeriodicGrid, f) -> float:
    return float(np.mean(f))


def integrate(grid: PeriodicGrid, f) -> float:
    """Rectangle rule over one period (spectrally exact for band-limited data)."""
    return float(np.sum(f) * grid.dx)


def _default_mean_tol(f):
    return 1e-10 * max(1.0, float(np.max(np.abs(f))))


def antideriv(grid: PeriodicGrid, f, tol: float | None = None) -> np.ndarray:
    """Zero-mean periodic antiderivative.

    Raises DomainError when ``f`` carries a mean larger than ``tol``: no
    periodic antiderivative exists in that case.
    """
    f = np.asarray(f, dtype=float)
    tol = _default_mean_tol(f) if tol is None else tol
    m = mean(grid, f)
    if abs(m) > tol:
        raise DomainError(f"field has mean {m:.3e} > {tol:.1e}; no periodic antiderivative")
    fh = _rfft(f)
    k = grid.k.copy()
    k[0] = 1.0
    gh = fh / (1j * k)
    gh[0] = 0.0
    gh[-1] = 0.0
    return _irfft(gh, grid.n)


def cumulative(grid: PeriodicGrid, f) -> np.ndarray:
    """Antiderivative anchored at the left end, g(-L) = 0.

    The mean of ``f`` contributes a linear ramp, so ``g`` is not periodic
    unless ``f`` has zero mean. Intended for localized data.
    """
    f = np.asarray(f, dtype=float)
    m = mean(grid, f)
    g = antideriv(grid, f - m, tol=np.inf) + m * (grid.x + grid.L)
    return g - g[0]


def dealias(grid: PeriodicGrid, f) -> np.ndarray:
    """Keep only modes with |m| < n/3 (2/3 rule)."""
    fh = _rfft(f)
    fh[np.arange(fh.size) >= grid.n / 3.0] = 0.0
    return _irfft(fh, grid.n)


def dealiased_product(grid: PeriodicGrid, f, g) -> np.ndarray:
    """Alias-free product of two fields: truncate, multiply, truncate."""
    return dealias(grid, dealias(grid, f) * dealias(grid, g))


def resample(grid: PeriodicGrid, f, n_new: int) -> tuple[PeriodicGrid, np.ndarray]:
    """Trigonometric interpolation of ``f`` onto ``n_new`` nodes on the same domain."""
    new = PeriodicGrid(grid.L, n_new)
    fh = _rfft(f)
    m = min(grid.n, new.n) // 2
    gh = np.zeros(new.n // 2 + 1, dtype=complex)
    gh[:m] = fh[:m]
    # the shared Nyquist coefficient is split evenly between +/- modes
    if new.n > grid.n:
        gh[m] = 0.5 * fh[m]
    else:
        gh[m] = fh[m].real if new.n == grid.n else 2.0 * fh[m].real
    return new, _irfft(gh * (new.n / grid.n), new.n)


def shift(grid: PeriodicGrid, f, distance: float) -> np.ndarray:
    """Translate ``f`` by ``distance`` (f(x - distance)) exactly in Fourier space."""
    fh = _rfft(f) * np.exp(-1j * grid.k * distance)
    fh[-1] = fh[-1].real * np.cos(grid.k[-1] * distance)
    return _irfft(fh, grid.n)


def diff_matrix(grid: PeriodicGrid, order: int = 1) -> np.ndarray:
    """Dense matrix D with D @ f == diff(grid, f, order)."""
    cols = np.fft.rfft(np.eye(grid.n), axis=0) * ((1j * grid.k) ** order)[:, None]
    if order % 2 == 1:
        cols[-1] = 0.0
    return np.fft.irfft(cols, grid.n, axis=0)


# --- Newton ---------------------------------------------------------------

@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    history: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.history[-1]


def _maxnorm(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def newton(
    residual: Callable,
    jacobian: Callable,
    init,
    tol: float = 1e-12,
    max_iter: int = 50,
    step_tol: float | None = None,
) -> NewtonResult:
    """Dense Newton iteration.

    Stops when the residual max-norm is <= ``tol`` or, if ``step_tol`` is
    given, when the update max-norm drops to ``step_tol``. ``jacobian`` returns
    a dense matrix (a scalar is accepted for one-dimensional problems).
    Raises ConvergenceError after ``max_iter`` updates.
    """
    scalar = np.ndim(init) == 0
    x = np.atleast_1d(np.array(init, dtype=float))

    def res(v):
        return np.atleast_1d(np.asarray(residual(v[0] if scalar else v), dtype=float))

    r = res(x)
    history = [_maxnorm(r)]
    steps = []
    for it in range(max_iter + 1):
        if not np.isfinite(history[-1]):
            raise ConvergenceError("non-finite residual", last=x, history=history)
        if history[-1] <= tol or (step_tol is not None and steps and steps[-1] <= step_tol):
            return NewtonResult(x[0] if scalar else x, it, history, steps)
        if it == max_iter:
            break
        J = np.atleast_2d(np.asarray(jacobian(x[0] if scalar else x), dtype=float))
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}", last=x, history=history) from exc
        x = x + dx
        steps.append(_maxnorm(dx))
        r = res(x)
        history.append(_maxnorm(r))
    raise ConvergenceError(
        f"Newton did not converge in {max_iter} iterations (residual {history[-1]:.3e})",
        last=x[0] if scalar else x,
        history=history,
    )


def continuation(solve: Callable, x0, p_start: float, p_target: float, step: float,
                 min_step: float = 1e-6, grow: float = 1.5):
    """Follow ``solve(guess, p)`` from ``p_start`` to ``p_target``.

    ``solve`` must raise ConvergenceError on failure; the step is halved on
    each failure and grown by ``grow`` after each success.
    """
    x = solve(x0, p_start)
    p = p_start
    direction = np.sign(p_target - p_start)
    step = abs(step)
    while p != p_target:
        p_next = p + direction * step
        if direction * (p_next - p_target) > 0:
            p_next = p_target
        try:
            x = solve(x, p_next)
        except ConvergenceError:
            step *= 0.5
            if step < min_step:
                raise
            continue
        p = p_next
        step *= grow
    return x
