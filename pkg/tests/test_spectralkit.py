import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bousms import spectralkit as sk
from bousms.errors import ConvergenceError, DomainError


def random_bandlimited(grid, rng, m_max=None, zero_mean=False):
    """Random trigonometric polynomial without the Nyquist mode."""
    m_max = m_max or grid.n // 2 - 1
    m = np.arange(1, m_max + 1)
    a, b = rng.standard_normal((2, m.size)) / m
    x = grid.x
    f = (a[:, None] * np.cos(np.pi * m[:, None] * x / grid.L)
         + b[:, None] * np.sin(np.pi * m[:, None] * x / grid.L)).sum(0)
    return f if zero_mean else f + rng.standard_normal()


def test_grid_layout():
    g = sk.PeriodicGrid(3.0, 16)
    assert g.dx == pytest.approx(6.0 / 16)
    assert g.x[0] == -3.0
    assert g.x[-1] == pytest.approx(3.0 - g.dx)
    assert np.allclose(np.diff(g.k), np.pi / 3.0)


@pytest.mark.parametrize("L,n", [(0.0, 16), (-1.0, 16), (1.0, 12), (1.0, 2)])
def test_grid_rejects_bad_input(L, n):
    with pytest.raises(DomainError):
        sk.PeriodicGrid(L, n)


def test_diff_single_mode_and_constant():
    g = sk.PeriodicGrid(5.0, 64)
    f = np.sin(np.pi * g.x / g.L)
    assert np.max(np.abs(sk.diff(g, f) - np.pi / g.L * np.cos(np.pi * g.x / g.L))) < 1e-12
    assert np.max(np.abs(sk.diff(g, np.full(g.n, 3.7), 3))) < 1e-12


def test_diff_exact_on_every_resolvable_mode():
    g = sk.PeriodicGrid(np.pi, 32)
    for m in range(1, g.n // 2):
        f = np.cos(m * g.x + 0.3)
        err = np.max(np.abs(sk.diff(g, f) + m * np.sin(m * g.x + 0.3)))
        assert err < 1e-12 * m
        err2 = np.max(np.abs(sk.diff(g, f, 2) + m**2 * f))
        assert err2 < 1e-12 * m**2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_diff_composition(seed):
    rng = np.random.default_rng(seed)
    g = sk.PeriodicGrid(4.0, 64)
    f = random_bandlimited(g, rng)
    lhs = sk.diff(g, sk.diff(g, f))
    assert np.max(np.abs(lhs - sk.diff(g, f, 2))) < 1e-12 * max(1.0, np.max(np.abs(lhs)))


def test_antideriv_examples():
    g = sk.PeriodicGrid(2.0, 32)
    got = sk.antideriv(g, np.cos(np.pi * g.x / g.L))
    assert np.max(np.abs(got - g.L / np.pi * np.sin(np.pi * g.x / g.L))) < 1e-12
    assert np.all(sk.antideriv(g, g.zeros()) == 0)
    with pytest.raises(DomainError):
        sk.antideriv(g, 1.0 + np.cos(g.x))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_antideriv_inverts_diff(seed):
    rng = np.random.default_rng(seed)
    g = sk.PeriodicGrid(3.0, 64)
    f = random_bandlimited(g, rng)
    back = sk.antideriv(g, sk.diff(g, f))
    assert np.max(np.abs(back - (f - f.mean()))) < 1e-12
    h = random_bandlimited(g, rng, zero_mean=True)
    assert np.max(np.abs(sk.diff(g, sk.antideriv(g, h)) - h)) < 1e-11


def test_cumulative_matches_error_function():
    g = sk.PeriodicGrid(20.0, 256)
    got = sk.cumulative(g, np.exp(-g.x**2))
    want = 0.5 * math.sqrt(math.pi) * (1 + np.vectorize(math.erf)(g.x))
    assert got[0] == 0.0
    assert np.max(np.abs(got - want)) < 1e-12


def test_integrate_and_parseval():
    g = sk.PeriodicGrid(np.pi, 64)
    assert sk.integrate(g, np.sin(g.x) ** 2) == pytest.approx(np.pi, abs=1e-13)
    rng = np.random.default_rng(1)
    f = rng.standard_normal(g.n)
    fh = np.fft.fft(f)
    assert sk.integrate(g, f**2) == pytest.approx(g.dx * np.sum(np.abs(fh) ** 2) / g.n, rel=1e-10)


def test_dealiased_product_removes_aliasing():
    g = sk.PeriodicGrid(np.pi, 64)  # keeps |m| <= 21
    x = g.x
    low = sk.dealiased_product(g, np.cos(3 * x), np.cos(5 * x))
    assert np.max(np.abs(low - 0.5 * (np.cos(2 * x) + np.cos(8 * x)))) < 1e-12
    # the m = 30 part of cos^2(15x) is dropped instead of aliasing onto m = 34
    high = sk.dealiased_product(g, np.cos(15 * x), np.cos(15 * x))
    assert np.max(np.abs(high - 0.5)) < 1e-12
    cut = sk.dealias(g, np.cos(22 * x))
    assert np.max(np.abs(cut)) < 1e-12


def test_resample_is_exact_for_bandlimited_data():
    rng = np.random.default_rng(3)
    g = sk.PeriodicGrid(2.5, 32)
    f = random_bandlimited(g, rng, m_max=10)
    fine, ff = sk.resample(g, f, 128)
    assert ff.shape == (128,)
    _, back = sk.resample(fine, ff, 32)
    assert np.max(np.abs(back - f)) < 1e-12
    # fine samples agree with direct evaluation of the same polynomial
    rng = np.random.default_rng(3)
    fine_direct = random_bandlimited(fine, rng, m_max=10)
    assert np.max(np.abs(ff - fine_direct)) < 1e-12


def test_shift_translates_exactly():
    g = sk.PeriodicGrid(np.pi, 32)
    got = sk.shift(g, np.sin(3 * g.x), 0.4)
    assert np.max(np.abs(got - np.sin(3 * (g.x - 0.4)))) < 1e-12


def test_diff_matrix_matches_diff():
    rng = np.random.default_rng(5)
    g = sk.PeriodicGrid(1.5, 32)
    f = rng.standard_normal(g.n)
    for order in (1, 2, 3):
        assert np.max(np.abs(sk.diff_matrix(g, order) @ f - sk.diff(g, f, order))) < 1e-9


def test_newton_scalar_examples():
    res = sk.newton(lambda v: v * v - 4.0, lambda v: 2.0 * v, 3.0)
    assert abs(res.x - 2.0) < 1e-12
    assert res.iterations <= 5
    exact = sk.newton(lambda v: v * v - 4.0, lambda v: 2.0 * v, 2.0)
    assert exact.iterations == 0


def test_newton_converges_quadratically():
    res = sk.newton(lambda v: v * v - 4.0, lambda v: 2.0 * v, 3.0, tol=0.0, max_iter=6,
                    step_tol=1e-15)
    errors = [abs(h) / 4.0 for h in res.history]  # |v^2 - 4| ~ 4 |v - 2|
    ratios = [e1 / e0**2 for e0, e1 in zip(errors, errors[1:]) if e1 > 1e-14]
    assert ratios and max(ratios) < 1.0


def test_newton_vector_and_failure():
    def F(v):
        return np.array([v[0] ** 2 + v[1] ** 2 - 1.0, v[0] - v[1]])

    def J(v):
        return np.array([[2 * v[0], 2 * v[1]], [1.0, -1.0]])

    res = sk.newton(F, J, np.array([1.0, 0.2]))
    assert np.allclose(res.x, [math.sqrt(0.5)] * 2, atol=1e-12)
    with pytest.raises(ConvergenceError) as info:
        sk.newton(lambda v: v * v + 1.0, lambda v: 2.0 * v, 0.5, max_iter=20)
    assert len(info.value.history) == 21
    assert info.value.last is not None


def test_continuation_follows_branch():
    def solve(guess, p):
        return sk.newton(lambda v: v**3 - p, lambda v: 3 * v**2, guess).x

    assert sk.continuation(solve, 1.0, 1.0, 27.0, step=2.0) == pytest.approx(3.0, abs=1e-12)
