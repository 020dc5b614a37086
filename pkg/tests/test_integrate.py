"""Adaptive integration: accuracy against closed forms, physical blow-up
of the complex-stiffness family, and stick-slip handling of the
sign-damping family."""

import math

import numpy as np
import pytest

from hystlab.fourier import quadratic_coefficients
from hystlab.integrate import (
    IntegratorConfig,
    ModalState,
    integrate,
    integrate_reid,
    measure_blowup_time,
    reid_dissipation,
    reid_energy,
    resolve_initial,
)
from hystlab.linear import FreeSolution, TwoBranchSolution, free_constants
from hystlab.models import Forcing, InvalidModelError, ModelSpec


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=10.0, dt_out=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=1.0, dt_out=2.0)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=1.0, rtol=1.5)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=1.0, atol=0.0)
    cfg = IntegratorConfig(t_end=10.0, dt_out=0.5)
    assert cfg.n_samples == 21
    assert cfg.to_dict()["max_step"] is None  # inf serializes as null


def test_resolve_initial_forms():
    free = ModelSpec("bishop-linear", k=1.0, h=0.04)
    x0, v0 = resolve_initial(free, ModalState(0.5, 0.3))
    ref = FreeSolution(free, 0.5, 0.3).initial_state()
    assert x0 == pytest.approx(ref[0]) and v0 == pytest.approx(ref[1])
    x0, v0 = resolve_initial(free, (1.0, -2.0))
    assert x0 == 1.0 + 0j and v0 == -2.0 + 0j
    reid = ModelSpec("reid-linear", k=1.0, c=0.1)
    with pytest.raises(InvalidModelError):
        resolve_initial(reid, ModalState(1.0, 0.0))
    with pytest.raises(InvalidModelError):
        resolve_initial(reid, (1.0 + 0.5j, 0.0))


def test_free_linear_matches_closed_form():
    spec = ModelSpec("bishop-linear", k=1.0, h=0.02)
    cfg = IntegratorConfig(t_end=200.0, dt_out=0.5, rtol=1e-10, atol=1e-13)
    traj = integrate(spec, ModalState(0.5, 0.3), cfg)
    assert traj.status == "completed"
    ref = FreeSolution(spec, 0.5, 0.3).x(traj.t)
    assert np.max(np.abs(traj.x - ref)) < 1e-7
    assert traj.t[0] == 0.0 and traj.t[-1] == pytest.approx(200.0)
    assert np.all(np.diff(traj.t) > 0)


def test_general_start_tracks_two_branch_solution():
    # a raw state occupies both branches; the growing part is genuine, and
    # the integrator must follow it until the blow-up guard trips
    spec = ModelSpec("bishop-linear", k=1.0, h=0.1,
                     forcing=Forcing(omega=0.5, f=0.5, g=0.5))
    cfg = IntegratorConfig(t_end=300.0, dt_out=1.0, rtol=1e-10, atol=1e-13)
    traj = integrate(spec, (1.0, 0.0), cfg)
    ref = TwoBranchSolution.from_state(spec, 1.0 + 0j, 0j)
    err = np.abs(traj.x - ref.x(traj.t)) / (1.0 + np.abs(ref.x(traj.t)))
    assert np.max(err) < 1e-7


def test_blowup_status_and_off_grid_sample():
    spec = ModelSpec("bishop-linear", k=1.0, h=0.1,
                     forcing=Forcing(omega=0.5, f=0.5, g=0.5))
    cfg = IntegratorConfig(t_end=500.0, dt_out=1.0, rtol=1e-8, atol=1e-11, x_max=50.0)
    traj = integrate(spec, (1.0, 0.0), cfg)
    assert traj.status == "blew-up"
    assert traj.blow_time == traj.t_stop <= 500.0
    assert np.all(np.abs(traj.x[:-1]) < 50.0)
    assert abs(traj.x[-1]) >= 50.0


def test_stop_re_below():
    spec = ModelSpec("bishop-quadratic", k=1.0, h=0.1, epsilon=0.2,
                     forcing=Forcing(omega=0.8, f=12.0))
    cfg = IntegratorConfig(t_end=200.0, dt_out=0.1, rtol=1e-9, atol=1e-12)
    traj = integrate(spec, (0.0, 0.0), cfg, stop_re_below=-1.0 / 0.2)
    assert traj.status == "stopped"
    assert traj.x[-1].real <= -1.0 / 0.2 + 1e-6


def test_tolerance_ladder_stretches_blowup_time():
    spec = ModelSpec("bishop-linear", k=1.0, h=0.05,
                     forcing=Forcing(omega=0.5, f=0.5, g=0.5))
    times = []
    for rtol in (1e-6, 1e-10):
        cfg = IntegratorConfig(t_end=2500.0, dt_out=1.0, rtol=rtol, atol=rtol * 1e-3)
        times.append(measure_blowup_time(spec, ModalState(10.5, 0.3), cfg))
    assert times[0] is not None and times[1] is not None
    assert times[0] < times[1]


def test_blowup_time_none_when_agreeing():
    spec = ModelSpec("bishop-linear", k=1.0, h=0.05,
                     forcing=Forcing(omega=0.5, f=0.5, g=0.5))
    cfg = IntegratorConfig(t_end=50.0, dt_out=1.0, rtol=1e-10, atol=1e-13)
    assert measure_blowup_time(spec, ModalState(10.5, 0.3), cfg) is None


def test_mu_zero_never_blows_up():
    spec = ModelSpec("bishop-linear", k=1.0, h=0.0,
                     forcing=Forcing(omega=0.5, f=0.5, g=0.5))
    cfg = IntegratorConfig(t_end=2000.0, dt_out=1.0, rtol=1e-8, atol=1e-11)
    traj = integrate(spec, ModalState(10.5, 0.3), cfg)
    assert traj.status == "completed"
    assert measure_blowup_time(spec, ModalState(10.5, 0.3), cfg) is None


def test_quadratic_series_start_stays_on_attractor():
    spec = ModelSpec("bishop-quadratic", k=1.0, h=0.05, epsilon=0.01,
                     forcing=Forcing(omega=0.75, f=1.0))
    att = quadratic_coefficients(spec, 150)
    period = att.period
    cfg = IntegratorConfig(t_end=period, dt_out=period / 64,
                           rtol=1e-12, atol=1e-14)
    traj = integrate(spec, att.state(0.0), cfg)
    ref, _, _ = att.evaluate(traj.t)
    assert np.max(np.abs(traj.x - ref)) < 1e-9


# ---- sign-damping family ---------------------------------------------


def test_reid_free_decay_amplitude_law():
    # quarter-cycle energy balance with alternating stiffness k +- c gives
    # successive maxima the exact ratio (k - c)/(k + c)
    spec = ModelSpec("reid-linear", k=1.0, c=0.1)
    cfg = IntegratorConfig(t_end=30.0, dt_out=0.01, rtol=1e-10, atol=1e-13)
    traj = integrate_reid(spec, (1.0, 0.0), cfg)
    x = traj.x
    peaks = [
        float(x[i])
        for i in range(1, x.size - 1)
        if x[i] > x[i - 1] and x[i] >= x[i + 1] and x[i] > 0.05
    ]
    assert len(peaks) >= 4
    ratios = np.diff(np.log(peaks[:5]))
    assert np.allclose(np.exp(ratios), (1.0 - 0.1) / (1.0 + 0.1), rtol=2e-4)


def test_reid_energy_never_increases_freely():
    spec = ModelSpec("reid-cubic", k=0.7, c=0.15, epsilon=0.3)
    cfg = IntegratorConfig(t_end=40.0, dt_out=0.02, rtol=1e-10, atol=1e-13)
    traj = integrate(spec, (1.3, -0.4), cfg)
    energy = reid_energy(spec, traj.x, traj.v)
    assert np.all(np.diff(energy) < 1e-10)


def test_reid_energy_balance_with_dissipation():
    spec = ModelSpec("reid-linear", k=1.0, c=0.12)
    cfg = IntegratorConfig(t_end=25.0, dt_out=0.005, rtol=1e-10, atol=1e-13)
    traj = integrate(spec, (0.9, 0.0), cfg, record_events=True)
    e0 = float(reid_energy(spec, traj.x[0], traj.v[0]))
    e1 = float(reid_energy(spec, traj.x[-1], traj.v[-1]))
    lost = reid_dissipation(traj)
    assert lost == pytest.approx(e0 - e1, rel=1e-5)


def test_reid_event_records():
    spec = ModelSpec("reid-linear", k=1.0, c=0.1)
    cfg = IntegratorConfig(t_end=15.0, dt_out=0.01, rtol=1e-9, atol=1e-12)
    traj = integrate(spec, (1.0, 0.0), cfg, record_events=True)
    ev = traj.events
    assert ev is not None and ev.shape[0] > 4
    assert np.all(np.diff(ev["t"]) > 0)
    assert set(np.unique(ev["kind"])) <= {0, 1}
    x_events = ev[ev["kind"] == 0]
    v_events = ev[ev["kind"] == 1]
    assert np.max(np.abs(x_events["x"])) < 1e-9
    assert np.max(np.abs(v_events["v"])) < 1e-9
    # an undriven oscillator alternates turning points and centre crossings
    assert abs(len(x_events) - len(v_events)) <= 1


def test_reid_completely_stuck_state_stays_put():
    # c > k: the spring alone cannot beat static friction anywhere
    spec = ModelSpec("reid-linear", k=1.0, c=2.0)
    cfg = IntegratorConfig(t_end=10.0, dt_out=0.1, rtol=1e-9, atol=1e-12)
    traj = integrate(spec, (1.0, 0.0), cfg)
    assert traj.status == "completed"
    assert np.max(np.abs(traj.x - 1.0)) < 1e-12
    assert np.max(np.abs(traj.v)) < 1e-12


def test_reid_stick_release_cycle():
    # strong damping and slow drive: the mass parks at each reversal until
    # the drive grows enough to break the force balance
    spec = ModelSpec("reid-linear", k=1.0, c=0.8,
                     forcing=Forcing(omega=0.3, f=1.0))
    period = spec.forcing.period
    cfg = IntegratorConfig(t_end=6 * period, dt_out=period / 512,
                           rtol=1e-9, atol=1e-12)
    traj = integrate(spec, (0.0, 0.0), cfg)
    assert traj.status == "completed"
    # sticking shows up as exact plateaus: repeated samples with v = 0
    flat = np.abs(traj.v) < 1e-10
    assert np.count_nonzero(flat) > 20
    runs = np.diff(np.flatnonzero(np.diff(flat.astype(int)) != 0))
    assert runs.size > 0


def test_reid_resonant_drive_completes():
    # regression: turning points used to stall the step-size control when
    # the drive sits right on the natural frequency
    spec = ModelSpec("reid-linear", k=1.0, c=0.2,
                     forcing=Forcing(omega=1.0, f=1.0))
    cfg = IntegratorConfig(t_end=120 * 2 * math.pi, dt_out=math.pi / 16,
                           rtol=1e-10, atol=1e-13)
    traj = integrate(spec, (0.0, 0.0), cfg)
    assert traj.status == "completed"
    steady = traj.x[traj.t > 100 * 2 * math.pi]
    amp = 0.5 * (steady.max() - steady.min())
    # resonant balance: drive work pi f A equals sign-damping loss 2 c A^2
    assert amp == pytest.approx(math.pi * 1.0 / (2 * 0.2), rel=0.02)


def test_reid_quasistatic_entry_into_stick():
    # the approach to the balance zone can be tangential, with no velocity
    # sign change; the integrator must still detect the sliding state
    spec = ModelSpec("reid-linear", k=1.0, c=0.9,
                     forcing=Forcing(omega=0.05, f=0.4))
    period = spec.forcing.period
    cfg = IntegratorConfig(t_end=2 * period, dt_out=period / 1024,
                           rtol=1e-9, atol=1e-12)
    traj = integrate(spec, (0.0, 0.0), cfg)
    assert traj.status == "completed"


def test_trajectory_csv_and_sidecar(tmp_path):
    spec = ModelSpec("reid-linear", k=1.0, c=0.1)
    cfg = IntegratorConfig(t_end=2.0, dt_out=0.5)
    traj = integrate(spec, (1.0, 0.0), cfg)
    csv = tmp_path / "t.csv"
    traj.to_csv(csv)
    lines = csv.read_text().splitlines()
    assert lines[0] == "t,x,v"
    assert len(lines) == traj.t.size + 1
    traj.to_sidecar_json(tmp_path / "t.json")
    side = traj.sidecar()
    assert side["status"] == "completed"
    assert side["model"]["variant"] == "reid-linear"

    bspec = ModelSpec("bishop-linear", k=1.0, h=0.1)
    btraj = integrate(bspec, ModalState(1.0, 0.0), cfg)
    bcsv = tmp_path / "b.csv"
    btraj.to_csv(bcsv)
    assert bcsv.read_text().splitlines()[0] == "t,re_x,im_x,re_v,im_v"
