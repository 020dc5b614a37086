"""Attractor coefficient recursions, their oracles and diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hystlab.fourier import (
    FourierAttractor,
    ResonantDenominatorError,
    compute_attractor,
    convergence_report,
    cubic_coefficients,
    oracle_convolution,
    quadratic_coefficients,
)
from hystlab.models import Forcing, InvalidModelError, ModelSpec

# Reference configuration used across the residual and decay checks.
REF_MU, REF_OMEGA, REF_F = 0.05, 0.75, 1.0


def _quad_spec(mu, omega, f, g=0.0, eps=0.1):
    return ModelSpec("bishop-quadratic", k=1.0, h=mu, epsilon=eps,
                     forcing=Forcing(omega=omega, f=f, g=g))


def _cubic_spec(mu, omega, f, g=0.0, eps=0.1):
    return ModelSpec("bishop-cubic", k=1.0, h=mu, epsilon=eps,
                     forcing=Forcing(omega=omega, f=f, g=g))


def _draw(rng):
    mu = rng.uniform(0.01, 0.5)
    omega = rng.uniform(0.1, 2.0)
    mag = rng.uniform(0.1, 2.0)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return mu, omega, mag * np.cos(phase), mag * np.sin(phase)


def _closed_quadratic(mu, omega, F):
    """First four quadratic coefficients, expanded by hand.

    Unrolls the recursion: each order divides the pair products of lower
    coefficients by its own harmonic denominator.
    """
    Om2 = complex(1.0, mu)
    D = [Om2 - (m * omega) ** 2 for m in range(1, 5)]
    B0 = F / D[0]
    B1 = -(F**2) / (D[0] ** 2 * D[1])
    B2 = 2.0 * F**3 / (D[0] ** 3 * D[1] * D[2])
    B3 = -(F**4) * (4.0 * D[1] + D[2]) / (D[0] ** 4 * D[1] ** 2 * D[2] * D[3])
    return B0, B1, B2, B3


def _closed_cubic(mu, omega, F):
    Om2 = complex(1.0, mu)
    B0 = F / (Om2 - omega**2)
    B1 = -(B0**3) / (Om2 - 9.0 * omega**2)
    B2 = -3.0 * B0**2 * B1 / (Om2 - 25.0 * omega**2)
    B3 = -3.0 * (B0**2 * B2 + B1**2 * B0) / (Om2 - 49.0 * omega**2)
    return B0, B1, B2, B3


def test_quadratic_closed_forms(rng):
    worst = 0.0
    for _ in range(20):
        mu, omega, f, g = _draw(rng)
        B = quadratic_coefficients(_quad_spec(mu, omega, f, g), 4).coefficients
        ref = _closed_quadratic(mu, omega, complex(f, g))
        for got, want in zip(B, ref):
            worst = max(worst, abs(got - want) / abs(want))
    assert worst < 1e-12


def test_cubic_closed_forms(rng):
    worst = 0.0
    for _ in range(20):
        mu, omega, f, g = _draw(rng)
        B = cubic_coefficients(_cubic_spec(mu, omega, f, g), 4).coefficients
        ref = _closed_cubic(mu, omega, complex(f, g))
        for got, want in zip(B, ref):
            worst = max(worst, abs(got - want) / abs(want))
    assert worst < 1e-12


@pytest.mark.parametrize("rule", ["quadratic", "cubic"])
def test_recursion_matches_convolution_oracle(rule, rng):
    """The defining identity: denominator times B_k plus the convolution
    of the nonlinear term at the same harmonic must vanish."""
    power = 2 if rule == "quadratic" else 3
    make = quadratic_coefficients if rule == "quadratic" else cubic_coefficients
    build = _quad_spec if rule == "quadratic" else _cubic_spec
    for _ in range(5):
        mu, omega, f, g = _draw(rng)
        spec = build(mu, omega, f, g)
        att = make(spec, 10)
        B = att.coefficients
        Om2 = spec.complex_stiffness_sq
        for k in range(1, 9):
            harmonic = k + 1 if rule == "quadratic" else 2 * k + 1
            denom = Om2 - (harmonic * omega) ** 2
            lhs = denom * B[k] + oracle_convolution(B, power, harmonic)
            assert abs(lhs) <= 1e-11 * abs(denom * B[k])


def test_oracle_rejects_bad_power():
    with pytest.raises(ValueError):
        oracle_convolution(np.ones(3, dtype=complex), 4, 3)


def test_coefficients_do_not_depend_on_epsilon():
    a = quadratic_coefficients(_quad_spec(0.1, 0.7, 1.0, eps=0.05), 20)
    b = quadratic_coefficients(_quad_spec(0.1, 0.7, 1.0, eps=0.4), 20)
    assert np.array_equal(a.coefficients, b.coefficients)
    # epsilon still changes the evaluated series through the weights
    assert a.weighted()[1] != b.weighted()[1]


def test_zero_forcing_gives_zero_series():
    for att in (
        quadratic_coefficients(_quad_spec(0.1, 0.7, 0.0), 8),
        cubic_coefficients(_cubic_spec(0.1, 0.7, 0.0), 8),
    ):
        assert np.all(att.coefficients == 0)


def test_resonant_denominator_reporting():
    # mu = 0 puts Omega1^2 on the real axis where harmonics can hit it:
    # the second quadratic harmonic lands at omega = 1/2
    with pytest.raises(ResonantDenominatorError) as info:
        quadratic_coefficients(_quad_spec(0.0, 0.5, 1.0), 4)
    assert info.value.index == 1
    assert info.value.harmonic == 2
    with pytest.raises(ResonantDenominatorError) as info:
        cubic_coefficients(_cubic_spec(0.0, 1.0 / 3.0, 1.0), 4)
    assert info.value.harmonic == 3
    assert issubclass(ResonantDenominatorError, ZeroDivisionError)
    # the fundamental itself can resonate too
    with pytest.raises(ResonantDenominatorError):
        quadratic_coefficients(_quad_spec(0.0, 1.0, 1.0), 4)


def test_variant_dispatch_and_guards():
    quad = _quad_spec(0.1, 0.7, 1.0)
    assert compute_attractor(quad, 5).rule == "quadratic"
    assert compute_attractor(_cubic_spec(0.1, 0.7, 1.0), 5).rule == "cubic"
    with pytest.raises(InvalidModelError):
        quadratic_coefficients(_cubic_spec(0.1, 0.7, 1.0), 5)
    with pytest.raises(InvalidModelError):
        compute_attractor(ModelSpec("bishop-linear", k=1.0, h=0.1,
                                    forcing=Forcing(omega=1.0, f=1.0)), 5)
    with pytest.raises(ValueError):
        quadratic_coefficients(quad, 0)


def test_series_evaluation_is_the_weighted_sum():
    spec = _quad_spec(0.08, 0.9, 1.3, 0.4, eps=0.07)
    att = quadratic_coefficients(spec, 12)
    t = np.linspace(0.0, 9.0, 41)
    direct = np.zeros_like(t, dtype=complex)
    for k, bk in enumerate(att.coefficients):
        direct += 0.07**k * bk * np.exp(1j * (k + 1) * 0.9 * t)
    x, v, a = att.evaluate(t)
    assert np.max(np.abs(x - direct)) < 1e-14
    # velocity and acceleration come from the same sum termwise
    dh = 1e-5
    xp, _, _ = att.evaluate(t + dh)
    xm, _, _ = att.evaluate(t - dh)
    assert np.max(np.abs(v - (xp - xm) / (2 * dh))) < 1e-7
    assert np.max(np.abs(a - (xp - 2 * x + xm) / dh**2)) < 1e-3


def test_harmonics_and_period():
    quad = quadratic_coefficients(_quad_spec(0.1, 0.5, 1.0), 6)
    assert list(quad.harmonics()) == [1, 2, 3, 4, 5, 6]
    cub = cubic_coefficients(_cubic_spec(0.1, 0.5, 1.0), 6)
    assert list(cub.harmonics()) == [1, 3, 5, 7, 9, 11]
    assert quad.period == pytest.approx(4.0 * np.pi)


def test_state_starts_on_the_attractor():
    att = quadratic_coefficients(_quad_spec(REF_MU, REF_OMEGA, REF_F, eps=0.01), 50)
    x, v = att.state(0.0)
    xs, vs, _ = att.evaluate(0.0)
    assert x == complex(xs) and v == complex(vs)


def test_residual_small_at_reference_config():
    spec = _quad_spec(REF_MU, REF_OMEGA, REF_F, eps=0.01)
    att = quadratic_coefficients(spec, 150)
    assert att.max_residual() < 1e-12
    cub = cubic_coefficients(_cubic_spec(REF_MU, REF_OMEGA, REF_F, eps=0.01), 150)
    assert cub.max_residual() < 1e-12


def test_residual_shrinks_with_more_terms():
    spec = _quad_spec(0.05, 0.75, 1.0, eps=0.05)
    coarse = quadratic_coefficients(spec, 5).max_residual(samples=512)
    fine = quadratic_coefficients(spec, 60).max_residual(samples=512)
    assert fine < coarse * 1e-6


def test_convergence_report_accepts_reference():
    att = quadratic_coefficients(_quad_spec(REF_MU, REF_OMEGA, REF_F, eps=0.01), 150)
    rep = convergence_report(att)
    assert rep.accepted
    assert rep.tail_sum < rep.tail_threshold * rep.head_sum
    d = rep.to_dict()
    assert d["n_terms"] == 150
    assert set(d) >= {"accepted", "slope", "head_sum", "tail_sum", "fit_window"}


def test_convergence_slope_is_reproducible():
    # frozen decay slope of the reference coefficients at eps = 0.1; the fit
    # is a pure function of the recursion output
    att = quadratic_coefficients(_quad_spec(REF_MU, REF_OMEGA, REF_F, eps=0.1), 150)
    rep = convergence_report(att)
    assert rep.slope == pytest.approx(-27.4346253179504, rel=1e-9)


def test_attractor_json_roundtrip():
    att = cubic_coefficients(_cubic_spec(0.12, 0.8, 0.9, 0.1, eps=0.03), 9)
    back = FourierAttractor.from_json(att.to_json())
    assert back.rule == att.rule
    assert np.allclose(back.coefficients, att.coefficients, rtol=0, atol=0)
    assert back.spec == att.spec
    with pytest.raises(ValueError):
        FourierAttractor.from_dict({"rule": "quadratic", "B": [[1.0, 0.0]]})


@settings(max_examples=25, deadline=None)
@given(
    mu=st.floats(min_value=0.01, max_value=0.5),
    omega=st.floats(min_value=0.1, max_value=2.0),
    f=st.floats(min_value=0.1, max_value=2.0),
    k=st.integers(min_value=1, max_value=7),
)
def test_recursion_identity_property(mu, omega, f, k):
    """Any coefficient balances its harmonic of the squared series."""
    spec = _quad_spec(mu, omega, f)
    B = quadratic_coefficients(spec, k + 1).coefficients
    denom = spec.complex_stiffness_sq - ((k + 1) * omega) ** 2
    lhs = denom * B[k] + oracle_convolution(B, 2, k + 1)
    assert abs(lhs) <= 1e-11 * max(abs(denom * B[k]), 1e-300)
