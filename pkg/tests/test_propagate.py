import math

import numpy as np
import pytest

from dressedspin.effective import larmor_frequency, rectified_field
from dressedspin.special import bessel_j
from dressedspin.errors import NoConvergence, UnitarityLost
from dressedspin.propagate import (
    DEFAULT_INTEGRATOR,
    IntegratorControl,
    analytic_coherences,
    monodromy_quasienergy,
    propagate_bloch_spin1,
    propagate_spin_half,
    propagator_at,
    quasienergy_candidates,
)

from conftest import KHZ, make_config

J0_ROOT = 2.404825557695773
TWO_PI = 2 * math.pi


def test_integrator_control_validation():
    with pytest.raises(ValueError):
        IntegratorControl(steps_per_period=32)
    with pytest.raises(ValueError):
        IntegratorControl(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorControl(max_refinements=0)
    with pytest.raises(ValueError):
        IntegratorControl(unitarity_drift_limit=0.0)


def test_zero_drive_freezes_state():
    cfg = make_config(10.0)
    series = propagate_spin_half(cfg, 1e-3, 64)
    assert np.allclose(series.sx, 1.0, atol=1e-12)
    assert np.allclose(series.sy, 0.0, atol=1e-12)
    assert np.allclose(series.sz, 0.0, atol=1e-12)


def test_bare_larmor_precession():
    cfg = make_config(10.0, w0_khz=(0, 0, 2.0))
    t_end = 3.0 / 2000.0  # six precession periods
    series = propagate_spin_half(cfg, t_end, 300)
    expected = np.cos(2.0 * KHZ * series.times)
    assert np.max(np.abs(series.sx - expected)) < 1e-8


def test_pure_state_norm_invariant():
    cfg = make_config(9.0, xi=2.0, w0_khz=(0.3, 0, 2.040), tuning=(("y", 1.0, 1, 0.4),))
    series = propagate_spin_half(cfg, 2e-3, 200)
    r2 = series.sx**2 + series.sy**2 + series.sz**2
    assert np.max(np.abs(r2 - 1.0)) < DEFAULT_INTEGRATOR.unitarity_drift_limit


def test_monodromy_zero_drive():
    qe = monodromy_quasienergy(make_config(10.0))
    assert qe.omega_L_numeric == pytest.approx(0.0, abs=1e-12)
    assert qe.alias_ambiguous  # eigenphase sits exactly on the branch edge


def test_monodromy_static_field_exact():
    cfg = make_config(10.0, w0_khz=(0, 0, 0.2))  # omega0z/omega = 0.02
    qe = monodromy_quasienergy(cfg)
    assert qe.omega_L_numeric == pytest.approx(0.2 * KHZ, rel=1e-9)
    assert not qe.alias_ambiguous
    assert qe.monodromy_unitarity_error < 1e-9


def test_monodromy_matches_first_order_in_perturbative_regime():
    cfg = make_config(10.0, xi=1.8, w0_khz=(0, 0, 0.1), tuning=(("y", 0.1, 1, math.pi / 2),))
    qe = monodromy_quasienergy(cfg)
    assert qe.omega_L_numeric == pytest.approx(larmor_frequency(cfg), rel=2e-4)


def test_monodromy_deviates_below_validity():
    # strong tuning at small xi: the first-order formula is off by percent
    cfg = make_config(9.0, xi=0.3, w0_khz=(0, 0, 2.040), tuning=(("y", 4.97, 1, math.pi / 2),))
    qe = monodromy_quasienergy(cfg)
    pert = larmor_frequency(cfg)
    rel_dev = abs(qe.omega_L_numeric - pert) / pert
    assert rel_dev > 0.02


def test_even_harmonic_quasienergy_residual_small():
    # xi = 3.83 even-harmonic working point: monodromy vs the closed form;
    # the gap is the higher-order residual, recorded here at ~0.4%
    cfg = make_config(10.0, xi=3.83, w0_khz=(0, 0, 2.040), tuning=(("y", 2.23, 2, 0.0),))
    qe = monodromy_quasienergy(cfg)
    closed = math.hypot(2.23 * bessel_j(2, 3.83), 2.040 * bessel_j(0, 3.83)) * KHZ
    rel = abs(qe.omega_L_numeric - closed) / closed
    assert rel < 0.01
    assert rel == pytest.approx(4.15e-3, abs=1.5e-3)


def test_period_consistency():
    cfg = make_config(9.0, xi=1.8, w0_khz=(0.2, 0.1, 2.040), tuning=(("y", 1.0, 2, 0.9),))
    u_one, u_two = propagator_at(cfg, [TWO_PI, 2 * TWO_PI], steps_per_period=4096)
    assert np.linalg.norm(u_two - u_one @ u_one, 2) < 1e-9


def test_collapse_quasienergy_tiny():
    cfg = make_config(9.0, xi=J0_ROOT, w0_khz=(0, 0, 0.09))
    qe = monodromy_quasienergy(cfg)
    assert qe.omega_L_numeric <= 2e-4 * 9.0 * KHZ
    assert qe.alias_ambiguous


def test_quasienergy_candidates():
    qe = monodromy_quasienergy(make_config(10.0, w0_khz=(0, 0, 0.2)))
    cands = quasienergy_candidates(qe, 10.0 * KHZ, "half", k_max=1)
    assert any(abs(c - 0.2 * KHZ) < 1.0 for c in cands)
    assert any(abs(c - (20.0 - 0.2) * KHZ) < 1.0 for c in cands)


def test_unitarity_lost_raised():
    cfg = make_config(9.0, xi=2.0, w0_khz=(0, 0, 2.040))
    ctl = IntegratorControl(unitarity_drift_limit=1e-16)
    with pytest.raises(UnitarityLost):
        propagate_spin_half(cfg, 2e-3, 100, ctl=ctl)


def test_no_convergence_raised():
    cfg = make_config(9.0, xi=3.0, w0_khz=(0, 0, 2.040))
    # generous drift allowance so only the (unreachable) series tolerance fails
    ctl = IntegratorControl(
        steps_per_period=64, rel_tol=1e-15, max_refinements=1, unitarity_drift_limit=1e-2
    )
    with pytest.raises(NoConvergence):
        propagate_spin_half(cfg, 2e-3, 100, ctl=ctl)


def test_propagate_argument_validation():
    cfg = make_config(10.0)
    with pytest.raises(ValueError):
        propagate_spin_half(cfg, -1.0, 100)
    with pytest.raises(ValueError):
        propagate_spin_half(cfg, 1e-3, 1)
    with pytest.raises(ValueError):
        propagate_spin_half(cfg, 1e-3, 100, initial=[1.0, 1.0])  # not normalised


def test_bloch_requires_spin_one():
    with pytest.raises(ValueError):
        propagate_bloch_spin1(make_config(10.0), 1e-3, 10)


def test_bloch_zero_drive():
    cfg = make_config(10.0, spin="one")
    series = propagate_bloch_spin1(cfg, 1e-3, 50)
    assert np.allclose(series.sx, 1.0, atol=1e-12)


def test_bloch_bare_larmor():
    cfg = make_config(10.0, w0_khz=(0, 0, 2.0), spin="one")
    series = propagate_bloch_spin1(cfg, 2e-3, 400)
    expected_x = np.cos(2.0 * KHZ * series.times)
    assert np.max(np.abs(series.sx - expected_x)) < 1e-8
    assert np.max(np.abs(series.sz)) < 1e-10  # Mz stays put
    norm = np.sqrt(series.sx**2 + series.sy**2 + series.sz**2)
    assert np.max(np.abs(norm - 1.0)) < 1e-9


def test_spin_one_matches_spin_half_quasienergy():
    # odd-harmonic phase-law configuration
    kw = dict(xi=1.54, w0_khz=(0, 0, 2.040), tuning=(("y", 1.23, 3, math.pi / 2),))
    qe_half = monodromy_quasienergy(make_config(9.0, **kw))
    qe_one = monodromy_quasienergy(make_config(9.0, spin="one", **kw))
    assert qe_one.omega_L_numeric == pytest.approx(qe_half.omega_L_numeric, rel=1e-8)


def test_analytic_pure_cosine_when_hx_zero():
    cfg = make_config(10.0, xi=1.5, w0_khz=(0, 0, 1.0), tuning=(("y", 1.0, 1, 0.7),))
    omega_l = larmor_frequency(cfg)
    series = analytic_coherences(cfg, 3.0 * TWO_PI / omega_l, 256)
    assert np.allclose(series.sx, np.cos(omega_l * series.times), atol=1e-12)
    assert not series.degenerate_field


def test_analytic_field_along_x_freezes_sx():
    cfg = make_config(10.0, xi=1.5, w0_khz=(1.0, 0, 0))
    series = analytic_coherences(cfg, 1e-3, 128)
    assert np.allclose(series.sx, 1.0, atol=1e-12)


def test_analytic_degenerate_field_flag():
    series = analytic_coherences(make_config(10.0), 1e-3, 64)
    assert series.degenerate_field
    assert np.all(series.sx == 1.0)
    assert np.all(series.sy == 0.0)


def test_analytic_offset_and_contrast_follow_field_components():
    cfg = make_config(
        30.0, xi=1.833, w0_khz=(3.0 / 16, 0, 5.979 / 16), tuning=(("y", 0.354 / 16, 1, math.pi / 2),)
    )
    f = rectified_field(cfg)
    offset = (f.hx / f.omega_L) ** 2
    series = analytic_coherences(cfg, 10 * TWO_PI / f.omega_L, 4096)
    # offset + contrast*cos form: extrema are offset +- contrast
    assert np.max(series.sx) == pytest.approx(1.0, abs=1e-6)
    assert np.min(series.sx) == pytest.approx(2.0 * offset - 1.0, abs=1e-3)


def test_analytic_vs_numeric_small_parameters():
    cfg = make_config(10.0, xi=1.8, w0_khz=(0, 0, 0.1), tuning=(("y", 0.1, 1, math.pi / 2),))
    omega_l = larmor_frequency(cfg)
    t_end = 10 * TWO_PI / omega_l
    samples = 4096
    num = propagate_spin_half(cfg, t_end, samples)
    ana = analytic_coherences(cfg, t_end, samples)
    for a, b in ((ana.sx, num.sx), (ana.sy, num.sy), (ana.sz, num.sz)):
        assert float(np.sqrt(np.mean((a - b) ** 2))) <= 0.02


def test_scaled_anisotropy_config_agrees_with_numerics():
    # tilted static field scaled into the perturbative regime (eta ~ 0.0125)
    s = 1.0 / 16.0
    cfg = make_config(
        30.0, xi=1.833, w0_khz=(3.0 * s, 0, 5.979 * s), tuning=(("y", 0.354 * s, 1, math.pi / 2),)
    )
    omega_l = larmor_frequency(cfg)
    qe = monodromy_quasienergy(cfg)
    assert abs(qe.omega_L_numeric - omega_l) <= 1e-3 * 30.0 * KHZ
    t_end = 10 * TWO_PI / omega_l
    num = propagate_spin_half(cfg, t_end, 4096)
    ana = analytic_coherences(cfg, t_end, 4096)
    assert float(np.sqrt(np.mean((ana.sx - num.sx) ** 2))) <= 0.02
