"""Amplitude/phase response curves and escape thresholds.

Response curves report the magnification factor n (oscillation amplitude
over normalized forcing amplitude F/k) and phase lag eta against the
frequency ratio r = omega/omega1. For the linear model both come from the
closed form; for the nonlinear complex-stiffness models they are read off
the Fourier attractor, whose real part is what the amplitude convention
applies to; for the sign-damping family they are measured from converged
time integrations. Nonlinear orbits are asymmetric, so amplitude means half
the peak-to-peak excursion, which degenerates to the linear n at eps = 0;
the fundamental-harmonic magnitude is emitted alongside as a second
amplitude convention.

The escape search targets the quadratic model: its potential has a saddle
at x = -1/eps, and a large enough drive pushes the response over it, after
which x runs to -infinity. critical_amplitude bisects on the real forcing
amplitude between a bounded and an escaped probe. Probes integrate at
rtol = 1e-12 and only trust a window short enough that the tolerance-seeded
growing branch stays below 1% of the saddle scale: the window still spans
about 12.7 transient e-folds for every mu, and without this cap the
spurious growth would eventually push any bounded probe over the saddle and
the measured threshold would be an artifact of the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .fourier import (
    DEFAULT_TERMS,
    FourierAttractor,
    compute_attractor,
    convergence_report,
)
from .integrate import IntegratorConfig, ModalState, integrate, resolve_initial
from .linear import free_constants, linear_response
from .models import Forcing, InvalidModelError, ModelSpec

__all__ = [
    "ResponsePoint",
    "ResponseCurve",
    "response_sweep",
    "EscapeSearchConfig",
    "EscapeResult",
    "BracketNotFoundError",
    "MonotonicityError",
    "critical_amplitude",
    "escape_window",
    "probe_escape",
]

_SOURCES = ("closed-form", "fourier-series", "time-integration")


@dataclass(frozen=True)
class ResponsePoint:
    """One sweep point: frequency, the two amplitude conventions, phase."""

    omega: float
    r: float
    n: float
    eta: float
    n_fundamental: float
    source: str

    def __post_init__(self) -> None:
        if self.source not in _SOURCES:
            raise ValueError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class ResponseCurve:
    spec: ModelSpec
    points: tuple[ResponsePoint, ...]

    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.points])

    def magnifications(self) -> np.ndarray:
        return np.array([p.n for p in self.points])

    def phases(self) -> np.ndarray:
        return np.array([p.eta for p in self.points])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("omega,r,n,eta,n_fundamental,source\n")
            for p in self.points:
                fh.write(
                    f"{p.omega!r},{p.r!r},{p.n!r},{p.eta!r},{p.n_fundamental!r},{p.source}\n"
                )


def default_omega_grid(spec: ModelSpec, samples: int = 400) -> np.ndarray:
    """Logarithmic grid in r = omega/omega1 over [0.05, 3].

    Dense enough at the low end to resolve the subharmonic peaks near
    omega1/2 and omega1/3 that the nonlinearities produce.
    """
    r = np.geomspace(0.05, 3.0, samples)
    return r * spec.omega1


def _with_omega(spec: ModelSpec, omega: float) -> ModelSpec:
    forcing = spec.require_forcing()
    return spec.replace_forcing(Forcing(omega=float(omega), f=forcing.f, g=forcing.g,
                                        waveform=forcing.waveform))


def _stationary_value(attractor: FourierAttractor, t0: float, dt: float) -> float:
    """Re x at the stationary point near t0, located by Newton on Re v = 0."""
    t = float(t0)
    for _ in range(12):
        _, v, a = attractor.evaluate(t)
        slope = float(a.real)
        if slope == 0.0:
            break
        step = -float(v.real) / slope
        if abs(step) > dt:  # keep Newton inside the sampling cell
            step = math.copysign(dt, step)
        t += step
        if abs(step) <= 1e-15 * max(1.0, abs(t)):
            break
    return float(attractor.evaluate(t)[0].real)


def _half_ptp(attractor: FourierAttractor) -> float:
    """Half the peak-to-peak excursion of Re x over one period.

    A sampled extremum is only quadratically close to the true one, which
    caps its accuracy near 1e-6 of amplitude at this grid; Newton-refining
    both extrema recovers them to machine precision, so the eps = 0 sweep
    reproduces the closed-form magnification exactly.
    """
    t = np.linspace(0.0, attractor.period, 2048, endpoint=False)
    x = attractor.evaluate(t)[0].real
    dt = attractor.period / 2048.0
    i_hi = int(np.argmax(x))
    i_lo = int(np.argmin(x))
    x_hi = max(float(x[i_hi]), _stationary_value(attractor, float(t[i_hi]), dt))
    x_lo = min(float(x[i_lo]), _stationary_value(attractor, float(t[i_lo]), dt))
    return 0.5 * (x_hi - x_lo)


def _series_point(spec: ModelSpec, omega: float, n_terms: int) -> ResponsePoint | None:
    """Fourier-series response at one frequency; None if not converged."""
    spec_w = _with_omega(spec, omega)
    attractor = compute_attractor(spec_w, n_terms)
    if not convergence_report(attractor).accepted:
        return None
    forcing = spec_w.require_forcing()
    half_ptp = _half_ptp(attractor)
    scale = spec.k / abs(forcing.amplitude)
    b0 = complex(attractor.coefficients[0])  # fundamental, forcing scale included
    eta = -math.atan2((b0 / forcing.amplitude).imag, (b0 / forcing.amplitude).real)
    return ResponsePoint(
        omega=float(omega),
        r=float(omega / spec.omega1),
        n=half_ptp * scale,
        eta=eta,
        n_fundamental=abs(b0) * scale,
        source="fourier-series",
    )


def _bishop_start(spec_w: ModelSpec, n_terms: int) -> tuple[complex, complex]:
    """Best available on-manifold state for a complex-stiffness integration.

    The periodic orbit of these models is a saddle of the flow: the free
    motion carries one decaying and one growing branch, so an off-manifold
    start diverges physically, never settles. Linear models start exactly on
    the particular solution. Nonlinear ones use the Fourier series truncated
    at its smallest epsilon-weighted term, the standard optimal truncation
    when the full series is not trusted.
    """
    if spec_w.power == 0:
        return resolve_initial(spec_w, ModalState(0.0, 0.0), n_terms)
    attractor = compute_attractor(spec_w, n_terms)
    weighted = np.abs(attractor.weighted())
    k_best = int(np.argmin(weighted[1:]) + 1) if weighted.size > 1 else 1
    truncated = FourierAttractor(
        spec=attractor.spec, rule=attractor.rule,
        coefficients=attractor.coefficients[:k_best],
    )
    x0, v0 = truncated.state(0.0)
    if not (np.isfinite([x0.real, x0.imag, v0.real, v0.imag]).all()):
        # Overflowed recursion: fall back to the linearized particular state.
        b0 = complex(attractor.coefficients[0])
        return b0, 1j * spec_w.require_forcing().omega * b0
    return x0, v0


def _integration_point(
    spec: ModelSpec,
    omega: float,
    transient_periods: int,
    measure_periods: int,
    rtol: float,
    n_terms: int = DEFAULT_TERMS,
) -> ResponsePoint:
    """Measured response from a time integration at one frequency.

    Sign-damping models are genuinely dissipative: integrate from rest,
    discard ``transient_periods`` periods, measure over ``measure_periods``.
    Complex-stiffness models have no attracting orbit to settle onto
    (see _bishop_start), so they start on the manifold and are measured
    over exactly one period immediately, before off-manifold error seeded
    by the start and the tolerance has time to grow.
    """
    spec_w = _with_omega(spec, omega)
    forcing = spec_w.require_forcing()
    period = forcing.period
    scale = spec.k / abs(forcing.amplitude)
    if spec_w.is_bishop:
        samples = 2048
        cfg = IntegratorConfig(
            t_end=period, dt_out=period / samples, rtol=rtol, atol=1e-14
        )
        traj = integrate(spec_w, _bishop_start(spec_w, n_terms), cfg)
        if traj.status != "completed":
            raise RuntimeError(
                f"response probe at omega = {omega} terminated early ({traj.status}); "
                "no bounded periodic response is reachable at this drive"
            )
        t_h = traj.t[:-1]
        x_h = traj.x[:-1].real
        half_ptp = 0.5 * (float(np.max(x_h)) - float(np.min(x_h)))
        # Uniform samples over a whole period make the rectangle-rule
        # projection onto the fundamental spectrally accurate.
        c1 = 2.0 * np.mean(x_h * np.exp(-1j * omega * t_h))
        eta = -math.atan2((c1 / forcing.amplitude).imag, (c1 / forcing.amplitude).real)
        n_fund = abs(c1) * scale
    else:
        n_total = transient_periods + measure_periods
        dt = period / 512.0
        # Sign damping dissipates for real, so the orbit is genuinely
        # attracting and the sampled-extremum resolution (about 2e-5
        # relative at 512 points) dominates the tolerance anyway.
        cfg = IntegratorConfig(
            t_end=n_total * period, dt_out=dt, rtol=max(rtol, 1e-9), atol=1e-12
        )
        traj = integrate(spec_w, (0.0, 0.0), cfg)
        if traj.status != "completed":
            raise RuntimeError(
                f"response probe at omega = {omega} terminated early ({traj.status}); "
                "no bounded periodic response is reachable at this drive"
            )
        mask = traj.t >= transient_periods * period - 0.5 * dt
        t_h = traj.t[mask][:-1]
        x_h = traj.x[mask][:-1]
        half_ptp = 0.5 * (float(np.max(x_h)) - float(np.min(x_h)))
        a_s = 2.0 * float(np.mean(x_h * np.sin(omega * t_h)))
        a_c = 2.0 * float(np.mean(x_h * np.cos(omega * t_h)))
        eta = -math.atan2(a_c, a_s)
        n_fund = math.hypot(a_s, a_c) * scale
    return ResponsePoint(
        omega=float(omega),
        r=float(omega / spec.omega1),
        n=half_ptp * scale,
        eta=eta,
        n_fundamental=n_fund,
        source="time-integration",
    )


def response_sweep(
    spec: ModelSpec,
    omegas=None,
    samples: int = 400,
    method: str = "auto",
    n_terms: int = DEFAULT_TERMS,
    transient_periods: int = 120,
    measure_periods: int = 4,
    integration_rtol: float = 1e-12,
) -> ResponseCurve:
    """Sweep the drive frequency and collect response points.

    method "auto" picks the closed form for the linear model, the Fourier
    series (with per-point time-integration fallback when the series is not
    accepted) for the nonlinear complex-stiffness models, and time
    integration for the sign-damping family. Points come back in frequency
    order regardless of how they were computed.
    """
    spec.require_forcing()
    if omegas is None:
        omegas = default_omega_grid(spec, samples)
    omegas = np.asarray(omegas, dtype=float)
    if method == "auto":
        if spec.variant == "bishop-linear":
            method = "closed-form"
        elif spec.is_bishop:
            method = "fourier-series"
        else:
            method = "time-integration"
    if method not in _SOURCES:
        raise ValueError(f"unknown method {method!r}")
    if method == "closed-form" and spec.variant != "bishop-linear":
        raise InvalidModelError("closed-form response exists only for the linear model")
    if method == "fourier-series" and not (spec.is_bishop and spec.epsilon >= 0.0):
        raise InvalidModelError("series response needs a complex-stiffness variant")
    if method == "fourier-series" and spec.variant == "bishop-linear":
        raise InvalidModelError("use closed-form for the linear model")

    points: list[ResponsePoint] = []
    for omega in omegas:
        if method == "closed-form":
            n, eta = linear_response(spec.mu, float(omega) / spec.omega1)
            points.append(
                ResponsePoint(
                    omega=float(omega),
                    r=float(omega / spec.omega1),
                    n=n,
                    eta=eta,
                    n_fundamental=n,
                    source="closed-form",
                )
            )
        elif method == "fourier-series":
            point = _series_point(spec, float(omega), n_terms)
            if point is None:
                point = _integration_point(
                    spec, float(omega), transient_periods, measure_periods,
                    integration_rtol, n_terms,
                )
            points.append(point)
        else:
            points.append(
                _integration_point(
                    spec, float(omega), transient_periods, measure_periods,
                    integration_rtol, n_terms,
                )
            )
    return ResponseCurve(spec=spec, points=tuple(points))


class BracketNotFoundError(RuntimeError):
    """No escape up to the search ceiling; raise f_hi if escape is expected."""


class MonotonicityError(RuntimeError):
    """Escape verdicts were not monotone in the forcing amplitude.

    Carries the full probe log; non-monotone verdicts flag a fractal
    bounded/escaped boundary, where a single threshold is not meaningful.
    """

    def __init__(self, message: str, probes):
        super().__init__(message)
        self.probes = tuple(probes)


@dataclass(frozen=True)
class EscapeSearchConfig:
    """Bisection and probe settings for the escape threshold search."""

    f_lo: float = 0.0
    f_hi: float = 20.0
    tol: float = 1e-3
    horizon_periods: int = 500
    rtol: float = 1e-12
    atol: float = 1e-12
    x_max: float = 1e6
    monotone_check: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.f_lo < self.f_hi:
            raise ValueError("need 0 <= f_lo < f_hi")
        if not self.tol > 0.0:
            raise ValueError("tol must be > 0")
        if self.horizon_periods < 1:
            raise ValueError("horizon_periods must be >= 1")


@dataclass(frozen=True)
class EscapeResult:
    """Escape threshold for one (epsilon, omega, mu) combination.

    ``f_critical`` is the bracket midpoint; the probe at
    f_critical - bracket stayed bounded and the one at f_critical + bracket
    escaped. ``probes`` logs every probe as (amplitude, verdict);
    ``initial_condition`` records the probe start convention and
    ``decision_window`` the verdict horizon actually used.
    """

    epsilon: float
    omega: float
    mu: float
    f_critical: float
    bracket: float
    probes: tuple[tuple[float, str], ...] = field(repr=False)
    decision_window: float = 0.0
    initial_condition: str = "series-truncation"

    def csv_row(self) -> str:
        return f"{self.epsilon!r},{self.omega!r},{self.mu!r},{self.f_critical!r},{self.bracket!r}"


def _probe_spec(eps: float, omega: float, mu: float, amplitude: float) -> ModelSpec:
    return ModelSpec(
        "bishop-quadratic",
        k=1.0,
        h=mu,
        epsilon=eps,
        forcing=Forcing(omega=omega, f=amplitude, g=0.0),
    )


def escape_window(eps: float, mu: float, omega: float, search: EscapeSearchConfig) -> float:
    """Verdict horizon for one escape probe.

    The shorter of the period horizon and half the time at which
    tolerance-seeded growth of the unstable free branch could reach 1% of
    the saddle scale 1/eps. Divergence developing slower than that is not
    distinguishable from the numerical artifact at this tolerance, so it
    counts as bounded; this follows the rule of trusting an integration
    only up to its tolerance-dependent blow-up.
    """
    period = 2.0 * math.pi / omega
    horizon = search.horizon_periods * period
    b, _ = free_constants(mu)
    rate = b  # probe units have k = M = 1, so omega1 = 1
    if rate > 0.0:
        horizon = min(horizon, 0.5 * math.log((1.0 / eps) / (100.0 * search.rtol)) / rate)
    return horizon


def probe_escape(eps: float, omega: float, mu: float, amplitude: float,
                 search: EscapeSearchConfig) -> bool:
    """True if a probe at this drive amplitude escapes over the saddle.

    The probe starts on the periodic attractor (optimally truncated series
    state). Starting from rest would be meaningless here: rest is off the
    attractor manifold, and the off-manifold component of the free motion
    grows exponentially for every forcing amplitude, so a rest-start probe
    escapes no matter how weak the drive. With an on-manifold start, a
    genuine escape is the attractor itself being driven over the saddle at
    x = -1/eps, which shows up quickly; anything developing slower than the
    escape_window is indistinguishable from tolerance-seeded growth and
    counts as bounded.
    """
    if amplitude == 0.0:
        return False
    spec = _probe_spec(eps, omega, mu, amplitude)
    period = 2.0 * math.pi / omega
    cfg = IntegratorConfig(
        t_end=escape_window(eps, mu, omega, search),
        dt_out=period / 64.0,
        rtol=search.rtol,
        atol=search.atol,
        x_max=search.x_max,
    )
    traj = integrate(spec, _bishop_start(spec, DEFAULT_TERMS), cfg,
                     stop_re_below=-1.0 / eps)
    return traj.status in ("stopped", "blew-up")


def critical_amplitude(
    eps: float, omega: float, mu: float, search: EscapeSearchConfig | None = None
) -> EscapeResult:
    """Bisect for the smallest forcing amplitude that escapes the saddle."""
    if not eps > 0.0:
        raise InvalidModelError(
            "escape needs the quadratic term: the linear model has no saddle"
        )
    if search is None:
        search = EscapeSearchConfig()
    probes: list[tuple[float, str]] = []

    def run(amplitude: float) -> bool:
        escaped = probe_escape(eps, omega, mu, amplitude, search)
        probes.append((amplitude, "escaped" if escaped else "bounded"))
        return escaped

    lo = search.f_lo
    if lo > 0.0 and run(lo):
        raise BracketNotFoundError(f"already escaped at f_lo = {lo}; lower f_lo")
    if lo == 0.0:
        probes.append((0.0, "bounded"))  # zero drive from rest stays at rest
    hi = search.f_hi
    if not run(hi):
        raise BracketNotFoundError(
            f"no escape up to f_hi = {hi} for eps={eps}, omega={omega}, mu={mu}; "
            "raise f_hi (or none exists in this window)"
        )
    while hi - lo > search.tol:
        mid = 0.5 * (lo + hi)
        if run(mid):
            hi = mid
        else:
            lo = mid

    if search.monotone_check:
        below = max(search.f_lo, lo * 0.9)
        above = hi * 1.1
        if below < lo and run(below):
            raise MonotonicityError(
                f"probe at {below} escaped below the bounded bracket edge {lo}", probes
            )
        if run(above) is False:
            raise MonotonicityError(
                f"probe at {above} stayed bounded above the escaped bracket edge {hi}", probes
            )

    return EscapeResult(
        epsilon=eps,
        omega=omega,
        mu=mu,
        f_critical=0.5 * (lo + hi),
        bracket=0.5 * (hi - lo),
        probes=tuple(probes),
        decision_window=escape_window(eps, mu, omega, search),
    )
