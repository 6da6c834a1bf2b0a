import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bousms import sim, travel
from bousms import spectralkit as sk
from bousms.coeffs import SystemCoefficients, preset
from bousms.errors import (ConvergenceError, DegenerateError, DomainError, NoBifurcationError,
                           StructureError, WrongSolverError)

FIG2 = preset("figure2")
SIGMA = 1.42

# one representative per printed row, all evaluated at c_s = 1.01
TABLE1 = [
    ((1 / 6, 0.0, 0.0), "Gen"),
    ((-0.1, 0.0, 0.3), "Gen"),
    ((0.1, 0.3, 0.0), "Gen"),
    ((-0.1, 0.3, 0.3), "Class"),
    ((-0.5, 0.3, 0.3), "Gen"),
    ((0.1, 0.3, 0.3), "Class"),
    ((0.5, 0.3, 0.3), "Gen"),
    ((1.0, -0.5, -0.5), "Gen"),
    ((0.0, 1 / 6, 1 / 6), "Class"),
]


def setup_for(a, b, d, c_s, nl=FIG2.nl):
    return travel.TravelingWaveSetup(SystemCoefficients(SystemCoefficients.from_values(a, b, a, d).disp, nl), c_s)


def test_setup_fields_and_validation():
    st_ = setup_for(0.1, 0.2, 0.3, 1.2)
    assert st_.mu_speed == 1.2 - 1.0
    assert st_.Dfrak == pytest.approx(0.2 * 0.3 * 1.44 - 0.01)
    with pytest.raises(DomainError):
        travel.TravelingWaveSetup(FIG2, -1.0)
    with pytest.raises(StructureError):
        travel.TravelingWaveSetup(SystemCoefficients.from_values(0.1, 0.2, 0.3, 0.2), 1.1)


@pytest.mark.parametrize("c_s", [1.05, 1.2, 2.0])
def test_linearization_entries(c_s):
    L = travel.build_linearization(setup_for(0, 1 / 6, 1 / 6, c_s))
    assert L[1, 0] == pytest.approx(6) and L[3, 2] == pytest.approx(6)
    assert L[1, 2] == pytest.approx(-6 / c_s) and L[3, 0] == pytest.approx(-6 / c_s)
    assert L[0, 1] == L[2, 3] == 1.0


def test_degenerate_setup():
    st_ = setup_for(1 / 6, 1 / 6, 1 / 6, 1.0)
    for fn in (travel.build_linearization, travel.eigen_classify):
        with pytest.raises(DegenerateError):
            fn(st_)
    with pytest.raises(DegenerateError):
        travel.nonlinear_term(st_, np.ones(4))


def test_reversibility():
    rng = np.random.default_rng(2)
    S = travel.REVERSER
    for _ in range(50):
        a, b, d = rng.uniform(-1, 1, 3)
        st_ = setup_for(a, b, d, rng.uniform(0.5, 2.0))
        U = rng.standard_normal(4)
        assert np.allclose(S @ travel.vector_field(st_, U), -travel.vector_field(st_, S @ U),
                           atol=1e-10)


def test_nonlinear_term_examples():
    st_ = setup_for(0.0, 0.2, 0.3, 1.1)
    assert not travel.nonlinear_term(st_, np.zeros(4)).any()
    U = np.array([0.3, 9.0, -0.2, 7.0])
    R = travel.nonlinear_term(st_, U)
    nl, D = FIG2.nl, st_.Dfrak
    assert R[0] == R[2] == 0
    assert R[1] == pytest.approx(-0.3 * 1.1 / D * nl.A(0.3, -0.2))
    assert R[3] == pytest.approx(-0.2 * 1.1 / D * nl.B(0.3, -0.2))
    assert np.allclose(travel.nonlinear_term(st_, 2 * U), 4 * R)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 5), st.floats(1.001, 5))
def test_closed_form_eigenvalues(b, c_s):
    lam = np.sort(travel.eigenvalues(setup_for(0.0, b, b, c_s)).real)
    lm, lp = math.sqrt((c_s - 1) / (c_s * b)), math.sqrt((c_s + 1) / (c_s * b))
    assert np.allclose(lam, [-lp, -lm, lm, lp], rtol=1e-12, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.3, 3))
def test_eigenvalue_squares_match_block_reduction(a, b, d, c_s):
    st_ = setup_for(a, b, d, c_s)
    D = st_.Dfrak
    if abs(D) < 1e-3:
        return
    # lambda^2 are roots of x^2 - T x + P with the trace/determinant of the 2x2 block
    T = ((b + d) * c_s**2 + 2 * a) / D
    P = (c_s**2 - 1) / D
    want = np.sort_complex(np.roots([1, -T, P]).astype(complex))
    lam = travel.eigenvalues(st_)
    got = np.sort_complex(np.unique(np.round(lam**2, 8)))
    if got.size == 2:
        assert np.allclose(got, want, atol=1e-6 * (1 + np.max(np.abs(want))))
    assert travel.spectrum_pairing_defect(lam) < 1e-8 * (1 + np.max(np.abs(lam)))


def test_kdv_dispersion_spectrum():
    lam = travel.eigenvalues(setup_for(1 / 6, 0, 0, 1.0))
    imag = sorted(z.imag for z in lam if abs(z.imag) > 1)
    assert imag == pytest.approx([-math.sqrt(12), math.sqrt(12)], abs=1e-12)
    lam = travel.eigenvalues(setup_for(1 / 6, 0, 0, 1.01))
    sq = np.sort((lam**2).real)
    assert sq[[0, 3]] == pytest.approx([-6 * 2.01, 6 * 0.01], rel=1e-12)
    assert travel.eigen_classify(setup_for(1 / 6, 0, 0, 1.01)).classification == "Gen"


@pytest.mark.parametrize("abd,label", TABLE1)
def test_table1_rows(abd, label):
    rep = travel.eigen_classify(setup_for(*abd, 1.01))
    assert rep.classification == label
    assert rep.table1_prediction == label


def test_table1_other_cases():
    assert travel.eigen_classify(setup_for(1.0, 0.5, 0.5, 1.05)).classification == "Gen"
    assert travel.table1_prediction(0.0, -0.2, 0.3) == "Unlisted"
    assert travel.eigen_classify(setup_for(0, 1 / 6, 1 / 6, 0.95)).classification == "NoWave"
    rep = travel.eigen_classify(setup_for(0, 1 / 6, 1 / 6, 1.2))
    doc = rep.to_dict()
    assert len(doc["eigenvalues"]) == 4 and doc["classification"] == "Class"


def test_normal_form_constants():
    nf = travel.normal_form_constants(FIG2, 1 / 6)
    assert nf.sigma == pytest.approx(SIGMA)
    assert nf.c10 == pytest.approx(6.0, rel=1e-15)
    assert nf.c20 == pytest.approx(-4.26, rel=1e-15)
    assert nf.leading_amplitude(1.01) == pytest.approx(3 * 0.01 / SIGMA)
    zero_a = travel.normal_form_constants(FIG2)
    assert zero_a.to_dict()["c10"] is None
    with pytest.raises(DomainError):
        zero_a.c10
    with pytest.raises(DomainError):
        travel.normal_form_constants(FIG2.replace(beta22=-2.0), 1.0).leading_amplitude(1.1)


def reduced_homoclinic_max(lam, mu, sigma, h=1e-3):
    """Integrate lam v'' = 2 mu v - sigma v^2 along the unstable manifold; return max v."""
    k = math.sqrt(2 * mu / lam)
    y = np.array([1e-8, 1e-8 * k])

    def f(y):
        return np.array([y[1], (2 * mu * y[0] - sigma * y[0] ** 2) / lam])

    while y[1] > 0:
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        prev = y
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    # from the last point with v' > 0, v rises by v'^2 / (2 |v''|) before turning
    return prev[0] + prev[1] ** 2 / (-2 * f(prev)[1])


def test_leading_amplitude_matches_reduced_equation():
    for lam, mu in [(1 / 3, 0.05), (2.0, 0.01)]:
        vmax = reduced_homoclinic_max(lam, mu, SIGMA, h=1e-2 / math.sqrt(mu / lam))
        assert vmax == pytest.approx(travel.normal_form_constants(FIG2).leading_amplitude(1 + mu),
                                     rel=1e-6)


def test_classical_profile_contract():
    st_ = travel.TravelingWaveSetup(FIG2, 1.05)
    p = travel.solve_classical(st_, sk.PeriodicGrid(100.0, 1024))
    assert p.residual_norm <= 1e-10
    assert p.evenness_defect() <= 1e-10
    assert p.end_values() < 1e-8
    assert np.all(p.zeta > -1e-14) and np.all(p.u > -1e-14)
    assert np.argmax(p.zeta) == p.grid.n // 2
    assert p.amplitude[0] == pytest.approx(3 * 0.05 / SIGMA, rel=0.15)
    assert p.residual_norm == pytest.approx(travel.profile_residual(st_, p.grid, p.zeta, p.u))


def test_classical_amplitude_limit():
    ratios = []
    for mu in (0.04, 0.02, 0.01):
        p = travel.solve_classical(travel.TravelingWaveSetup(FIG2, 1 + mu), sk.PeriodicGrid(50 / math.sqrt(mu), 1024))
        ratios.append(p.amplitude[0] / mu)
    assert ratios[0] < ratios[1] < ratios[2] < 3 / SIGMA
    # first-order Richardson extrapolation lands on 3 / sigma
    assert 2 * ratios[2] - ratios[1] == pytest.approx(3 / SIGMA, rel=1e-3)


def test_profile_residual_decays_under_refinement():
    st_ = travel.TravelingWaveSetup(FIG2, 1.1)
    fine = sk.PeriodicGrid(100.0, 4096)
    res = []
    for n in (512, 1024):
        p = travel.solve_classical(st_, sk.PeriodicGrid(100.0, n))
        _, z = sk.resample(p.grid, p.zeta, fine.n)
        _, u = sk.resample(p.grid, p.u, fine.n)
        res.append(travel.profile_residual(st_, fine, z, u))
    assert res[1] < 1e-12 and res[0] / res[1] > 10


def test_profile_travels_under_the_pde():
    st_ = travel.TravelingWaveSetup(FIG2, 1.1)
    p = travel.solve_classical(st_, sk.PeriodicGrid(80.0, 512))
    eta_t, u_t = sim.rhs(FIG2, sim.FieldState(p.grid, p.zeta, p.u))
    assert np.max(np.abs(eta_t + 1.1 * sk.diff(p.grid, p.zeta))) < 1e-10
    assert np.max(np.abs(u_t + 1.1 * sk.diff(p.grid, p.u))) < 1e-10


def test_solver_preconditions():
    with pytest.raises(NoBifurcationError):
        travel.solve_classical(travel.TravelingWaveSetup(FIG2, 0.9))
    with pytest.raises(WrongSolverError):
        travel.solve_classical(travel.TravelingWaveSetup(preset("kdvkdv"), 1.5))
    with pytest.raises(WrongSolverError):
        travel.solve_generalized(travel.TravelingWaveSetup(FIG2, 1.1))
    with pytest.raises(DomainError):
        travel.solve_classical(travel.TravelingWaveSetup(FIG2.replace(beta22=-2.0), 1.1))


def test_short_domain_fails_decay_contract():
    st_ = travel.TravelingWaveSetup(FIG2, 1.01)
    with pytest.raises(ConvergenceError) as info:
        travel.solve_classical(st_, sk.PeriodicGrid(20.0, 256))
    assert info.value.history


def test_init_from_other_grid():
    a = travel.solve_classical(travel.TravelingWaveSetup(FIG2, 1.1), sk.PeriodicGrid(120.0, 1024))
    b = travel.solve_classical(travel.TravelingWaveSetup(FIG2, 1.12), sk.PeriodicGrid(100.0, 1024), init=a)
    assert b.iterations <= 5
    assert b.amplitude[0] > a.amplitude[0]


def test_continuation_fallback(monkeypatch):
    calls = []
    real = travel._newton_profile

    def flaky(setup, *args):
        calls.append(setup.c_s)
        if len(calls) == 1:
            raise ConvergenceError("forced failure", history=[1.0])
        return real(setup, *args)

    monkeypatch.setattr(travel, "_newton_profile", flaky)
    p = travel.solve_classical(travel.TravelingWaveSetup(FIG2, 1.08), sk.PeriodicGrid(180.0, 1024))
    assert calls[1] == pytest.approx(1.01) and calls[-1] == pytest.approx(1.08)
    assert p.residual_norm <= 1e-10


def test_generalized_wave():
    st_ = travel.TravelingWaveSetup(preset("kdvkdv"), 1.5)
    p = travel.solve_generalized(st_)
    assert p.residual_norm <= 1e-8
    assert p.tail_amplitude > 1e-3
    k_imag = max(abs(z.imag) for z in travel.eigenvalues(st_))
    assert travel.tail_wavenumber(p) == pytest.approx(k_imag, rel=0.05)


def test_speed_amplitude_curve():
    speeds = np.linspace(1.02, 1.2, 6)
    rows = travel.speed_amplitude_curve(FIG2, speeds)
    amps = [r.amp_zeta for r in rows]
    assert all(r.status == "ok" for r in rows)
    assert np.all(np.diff(amps) > 0)
    single = travel.speed_amplitude_curve(FIG2, [1.1])[0]
    direct = travel.solve_classical(travel.TravelingWaveSetup(FIG2, 1.1))
    assert single.amp_zeta == pytest.approx(direct.amplitude[0], rel=1e-12)
    rows = travel.speed_amplitude_curve(FIG2, [1.1, 0.9, 1.12])
    assert [r.status == "ok" for r in rows] == [True, False, True]
    assert rows[1].status.startswith("failed") and math.isnan(rows[1].amp_zeta)
