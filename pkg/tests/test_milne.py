import math

import pytest

from semirel.core import TwoBodySystem, UnitSystem
from semirel.milne import (
    CONVERGED,
    RANGE_LIMIT,
    AmplitudeState,
    IntegrationConfig,
    IntegrationFault,
    Mode,
    amplitude_rhs,
    integrate_half_axis,
)
from semirel.potentials import harmonic
from semirel.spectrum import initial_amplitude_nr, initial_amplitude_wp

MU5 = TwoBodySystem(10.0, 10.0)  # mu = 5
MU1 = TwoBodySystem(2.0, 2.0)  # mu = 1
WELL = harmonic(1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegrationConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegrationConfig(termination_ratio=1e-3)
    with pytest.raises(ValueError):
        IntegrationConfig(x_max=math.inf)


def test_nr_rhs_constant_solution():
    # A = k^(-1/2) with k^2 = 2 mu (eps - V)/hbar^2 = 1 makes A'' vanish
    assert amplitude_rhs(Mode.NR, MU1, lambda x: 0.0, 0.5, 0.3, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_wp_rhs_vanishes_at_initial_amplitude():
    eps = 0.2226
    a0 = initial_amplitude_wp(MU5, eps, 0.0)
    assert amplitude_rhs(Mode.WP, MU5, WELL, eps, 0.0, a0) == pytest.approx(0.0, abs=1e-10)


def test_rhs_rejects_collapsed_amplitude():
    with pytest.raises(IntegrationFault, match="amplitude collapsed"):
        amplitude_rhs(Mode.NR, MU1, WELL, 0.5, 0.0, 0.0)
    with pytest.raises(IntegrationFault, match="amplitude collapsed"):
        amplitude_rhs(Mode.WP, MU5, WELL, 0.5, 0.0, -1.0)


@pytest.mark.parametrize("x,a", [(0.3, 1.1), (1.0, 0.9), (2.0, 2.5)])
def test_wp_rhs_reduces_to_nr_at_large_c(x, a):
    units = UnitSystem(1.0, 1e6)
    system = TwoBodySystem(2.0, 2.0, units)
    wp = amplitude_rhs(Mode.WP, system, WELL, 0.5, x, a)
    nr = amplitude_rhs(Mode.NR, system, WELL, 0.5, x, a)
    assert wp == pytest.approx(nr, rel=1e-9)


def test_constant_wavenumber_harness():
    # V fixed at eps - hbar^2/(2 mu) gives k = 1: the constant solution A = 1
    # accumulates phase x, and the hard range limit is the only stop.
    eps = 0.7
    v_const = eps - 0.5
    config = IntegrationConfig(x_max=3.0)
    init = AmplitudeState(0.0, 1.0, 0.0, 0.0)
    res = integrate_half_axis(Mode.NR, MU1, lambda x: v_const, eps, init, config, +1)
    assert res.reason == RANGE_LIMIT
    assert res.state.Phi == pytest.approx(3.0, abs=1e-9)
    assert res.state.A == pytest.approx(1.0, abs=1e-10)
    assert res.state.x == pytest.approx(3.0, abs=1e-12)


def test_half_axis_phase_nr_ground_state():
    eps = 0.5
    init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
    res = integrate_half_axis(Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), +1)
    assert res.reason == CONVERGED
    assert res.state.Phi == pytest.approx(math.pi / 2.0, abs=1e-8)


def test_half_axis_phase_approaches_quarter_period_as_termination_tightens():
    eps = 0.5
    gaps = []
    for ratio in (1e-6, 1e-8, 1e-10):
        config = IntegrationConfig(termination_ratio=ratio)
        init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
        res = integrate_half_axis(Mode.NR, MU1, WELL, eps, init, config, +1)
        gaps.append(abs(res.state.Phi - math.pi / 2.0))
    assert gaps[0] > gaps[1] > gaps[2] or gaps[2] < 1e-10
    assert gaps[2] < 1e-8


def test_half_axis_phase_wp_benchmark_level():
    eps = 0.2226
    init = AmplitudeState(0.0, initial_amplitude_wp(MU5, eps, 0.0), 0.0, 0.0)
    res = integrate_half_axis(Mode.WP, MU5, WELL, eps, init, IntegrationConfig(), +1)
    assert res.state.Phi == pytest.approx(math.pi / 2.0, abs=1e-3)


def test_directions_agree_for_symmetric_well():
    eps = 2.5
    init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
    plus = integrate_half_axis(Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), +1)
    minus = integrate_half_axis(Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), -1)
    assert plus.state.Phi == pytest.approx(minus.state.Phi, rel=1e-10)
    assert plus.state.x == pytest.approx(-minus.state.x, rel=1e-10)


def test_phase_monotone_along_trajectory():
    eps = 5.5
    init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
    res = integrate_half_axis(
        Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), +1, record_steps=True
    )
    phis = [s.Phi for s in res.samples]
    assert all(later > earlier for earlier, later in zip(phis, phis[1:]))


def test_tolerance_halving_consistency():
    eps = 0.5
    phis = []
    for rel_tol in (1e-9, 5e-10):
        config = IntegrationConfig(rel_tol=rel_tol, abs_tol=1e-13)
        init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
        phis.append(integrate_half_axis(Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), +1).state.Phi)
    assert abs(phis[0] - phis[1]) < 50 * 1e-9 * phis[0]


def test_checkpoints_land_exactly():
    eps = 0.5
    cps = [0.25, 0.5, 1.0]
    init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
    res = integrate_half_axis(Mode.NR, MU1, WELL, eps, init, IntegrationConfig(), +1, checkpoints=cps)
    assert [s.x for s in res.samples] == pytest.approx(cps, abs=1e-14)
    phis = [s.Phi for s in res.samples]
    assert all(later > earlier for earlier, later in zip(phis, phis[1:]))


def test_initial_collapse_faults():
    init = AmplitudeState(0.0, -0.5, 0.0, 0.0)
    with pytest.raises(IntegrationFault, match="amplitude collapsed"):
        integrate_half_axis(Mode.NR, MU1, WELL, 0.5, init, IntegrationConfig(), +1)


def test_length_scale_rescaling_is_neutral():
    eps = 1.5
    phis = []
    for scale in (1.0, 2.0):
        config = IntegrationConfig(length_scale=scale)
        init = AmplitudeState(0.0, initial_amplitude_nr(MU1, eps, 0.0), 0.0, 0.0)
        phis.append(integrate_half_axis(Mode.NR, MU1, WELL, eps, init, config, +1).state.Phi)
    assert phis[0] == pytest.approx(phis[1], rel=1e-9)


def test_bad_direction_rejected():
    init = AmplitudeState(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        integrate_half_axis(Mode.NR, MU1, WELL, 0.5, init, IntegrationConfig(), 0)
