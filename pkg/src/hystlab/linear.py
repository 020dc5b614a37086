"""Closed-form solutions of the linear complex-stiffness oscillator.

The homogeneous equation ``x'' + Omega1^2 x = 0`` with
``Omega1^2 = omega1^2 (1 + i mu)`` has the two exponents
``+/- i omega1 sqrt(1 + i mu) = +/- (i omega1 c - omega1 b)`` where

    b = sqrt((sqrt(1 + mu^2) - 1) / 2),
    c = sqrt((sqrt(1 + mu^2) + 1) / 2),

so one branch decays like ``exp(-omega1 b t)`` and the mirror branch grows at
exactly the same rate. The physical free solution keeps the decaying branch
only and is parameterized by an amplitude ``alpha`` and phase ``theta``:

    x(t) = alpha exp(-omega1 b t) exp(i (omega1 c t + theta)).

Under a drive ``F exp(i omega t)`` the particular solution is
``B exp(i omega t)`` with ``B = (F/M) / (Omega1^2 - omega^2)``, and the full
forced solution is the sum of the two.

These formulas are the exact oracle used to measure when numerical
integration departs from the true solution (the spurious growth diagnostic in
:mod:`hystlab.integrate`), and they provide the linear amplitude/phase
response curves

    n = ((1 - r^2)^2 + mu^2)^(-1/2),     eta = atan2(mu, 1 - r^2),

with r = omega / omega1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .models import InvalidModelError, ModelSpec

__all__ = [
    "ResonanceError",
    "free_constants",
    "FreeSolution",
    "ForcedSolution",
    "TwoBranchSolution",
    "general_solution",
    "particular_amplitude",
    "linear_response",
]


class ResonanceError(ZeroDivisionError):
    """Undamped resonance: mu = 0 with drive frequency at omega1."""


def free_constants(mu: float) -> tuple[float, float]:
    """Decay and frequency constants (b, c) of the free solution.

    Evaluates c from its closed form and b from the identity 2 b c = mu, which
    avoids the cancellation in sqrt(sqrt(1+mu^2) - 1) for small mu.

    Parameters
    ----------
    mu : float
        Loss factor h / k, >= 0.

    Returns
    -------
    (b, c) : tuple of float
        Satisfy c^2 - b^2 = 1 and 2 b c = mu.
    """
    if mu < 0.0 or not math.isfinite(mu):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")
    c = math.sqrt((math.hypot(1.0, mu) + 1.0) / 2.0)
    b = mu / (2.0 * c)
    return b, c


def _require_linear_bishop(spec: ModelSpec, allow_forcing: bool) -> None:
    if not spec.is_bishop:
        raise InvalidModelError("closed forms exist for the complex-stiffness family only")
    if spec.power != 0:
        raise InvalidModelError("closed forms exist for the linear variant only")
    if not allow_forcing and spec.forcing is not None:
        raise InvalidModelError("free solution requires a spec without forcing")


def particular_amplitude(spec: ModelSpec) -> complex:
    """Coefficient B of the particular solution B exp(i omega t).

    B (Omega1^2 - omega^2) = F / M. Raises ResonanceError when mu = 0 and
    omega = omega1, where the denominator vanishes.
    """
    _require_linear_bishop(spec, allow_forcing=True)
    forcing = spec.require_forcing()
    denom = spec.complex_stiffness_sq - forcing.omega**2
    if denom == 0:
        raise ResonanceError(
            f"undamped resonance: mu=0 and omega={forcing.omega} equals omega1"
        )
    return forcing.amplitude / spec.M / denom


@dataclass(frozen=True)
class FreeSolution:
    """Decaying-branch free solution alpha exp(g(t)), g = lam t + i theta.

    alpha >= 0 is the initial amplitude and theta the initial phase; the
    complex exponent is lam = omega1 (-b + i c). Initial data follow as
    x(0) = alpha exp(i theta) and v(0) = lam x(0); a raw velocity cannot be
    chosen independently because the growing branch is excluded.
    """

    spec: ModelSpec
    alpha: float
    theta: float

    def __post_init__(self) -> None:
        _require_linear_bishop(self.spec, allow_forcing=False)
        if self.alpha < 0.0:
            raise ValueError("alpha is an amplitude; it must be >= 0")

    @classmethod
    def from_initial_displacement(cls, spec: ModelSpec, x0: complex) -> "FreeSolution":
        """Constructor from x(0); the velocity is implied by the decaying branch."""
        return cls(spec, abs(x0), math.atan2(x0.imag, x0.real))

    @cached_property
    def constants(self) -> tuple[float, float]:
        return free_constants(self.spec.mu)

    @cached_property
    def exponent(self) -> complex:
        """lam = omega1 (-b + i c); satisfies lam^2 = -Omega1^2."""
        b, c = self.constants
        return self.spec.omega1 * complex(-b, c)

    def x(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha * np.exp(self.exponent * t + 1j * self.theta)

    def v(self, t):
        return self.exponent * self.x(t)

    def state(self, t) -> tuple[complex, complex]:
        x = complex(self.x(t))
        return x, self.exponent * x

    def initial_state(self) -> tuple[complex, complex]:
        return self.state(0.0)


@dataclass(frozen=True)
class ForcedSolution:
    """Forced linear solution alpha exp(g(t)) + B exp(i omega t).

    The (alpha, theta) pair parameterizes the decaying transient exactly as in
    :class:`FreeSolution`; B is fixed by the drive. Initial data follow as
    x(0) = alpha exp(i theta) + B and v(0) = lam alpha exp(i theta) + i omega B.
    """

    spec: ModelSpec
    alpha: float
    theta: float

    def __post_init__(self) -> None:
        _require_linear_bishop(self.spec, allow_forcing=True)
        self.spec.require_forcing()
        if self.alpha < 0.0:
            raise ValueError("alpha is an amplitude; it must be >= 0")

    @classmethod
    def from_initial_displacement(cls, spec: ModelSpec, x0: complex) -> "ForcedSolution":
        """Constructor from x(0); the transient part is x(0) - B on the decaying branch."""
        resid = x0 - particular_amplitude(spec)
        return cls(spec, abs(resid), math.atan2(resid.imag, resid.real))

    @cached_property
    def B(self) -> complex:
        return particular_amplitude(self.spec)

    @cached_property
    def exponent(self) -> complex:
        b, c = free_constants(self.spec.mu)
        return self.spec.omega1 * complex(-b, c)

    def _transient(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha * np.exp(self.exponent * t + 1j * self.theta)

    def x(self, t):
        omega = self.spec.require_forcing().omega
        t = np.asarray(t, dtype=float)
        return self._transient(t) + self.B * np.exp(1j * omega * t)

    def v(self, t):
        omega = self.spec.require_forcing().omega
        t = np.asarray(t, dtype=float)
        return self.exponent * self._transient(t) + 1j * omega * self.B * np.exp(1j * omega * t)

    def state(self, t) -> tuple[complex, complex]:
        return complex(self.x(t)), complex(self.v(t))

    def initial_state(self) -> tuple[complex, complex]:
        return self.state(0.0)


def linear_response(mu: float, r: float) -> tuple[float, float]:
    """Magnification factor and phase lag of the linear model.

    Parameters
    ----------
    mu : float
        Loss factor, >= 0.
    r : float
        Frequency ratio omega / omega1, >= 0.

    Returns
    -------
    (n, eta) : tuple of float
        n = ((1-r^2)^2 + mu^2)^(-1/2); eta = atan2(mu, 1-r^2). For mu > 0 the
        phase lies in (0, pi); the undamped limit gives eta = 0 below the
        resonance and pi above it.

    Raises
    ------
    ResonanceError
        If mu = 0 and r = 1 (infinite undamped response). Sweeps must treat
        this point as singular rather than as a large finite value.
    """
    if mu < 0.0 or not math.isfinite(mu):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"r must be finite and >= 0, got {r}")
    detune = 1.0 - r * r
    if mu == 0.0 and detune == 0.0:
        raise ResonanceError("undamped resonance at r = 1")
    n = 1.0 / math.hypot(detune, mu)
    eta = math.atan2(mu, detune)
    return n, eta


@dataclass(frozen=True)
class TwoBranchSolution:
    """Exact linear solution with both homogeneous branches present.

    A raw initial state (x0, v0) generally excites the growing branch as
    well as the decaying one, because the complex equation is second order
    and its two exponents are +lam and -lam with lam = omega1 (-b + i c).
    This solution is the honest analytic reference for such states: any
    growth it contains is genuine mathematics of the model, whereas growth
    on top of a pure decaying-branch start is a numerical artifact.

    x(t) = a_plus exp(lam t) + a_minus exp(-lam t) [+ B exp(i omega t)].
    """

    spec: ModelSpec
    a_plus: complex
    a_minus: complex

    def __post_init__(self) -> None:
        _require_linear_bishop(self.spec, allow_forcing=True)

    @classmethod
    def from_state(cls, spec: ModelSpec, x0: complex, v0: complex) -> "TwoBranchSolution":
        """Solve the 2x2 system for the branch amplitudes at t = 0."""
        _require_linear_bishop(spec, allow_forcing=True)
        b, c = free_constants(spec.mu)
        lam = spec.omega1 * complex(-b, c)
        if spec.forcing is not None:
            bpart = particular_amplitude(spec)
            omega = spec.forcing.omega
            rem_x = complex(x0) - bpart
            rem_v = complex(v0) - 1j * omega * bpart
        else:
            rem_x = complex(x0)
            rem_v = complex(v0)
        a_plus = 0.5 * (rem_x + rem_v / lam)
        return cls(spec=spec, a_plus=a_plus, a_minus=rem_x - a_plus)

    @cached_property
    def exponent(self) -> complex:
        b, c = free_constants(self.spec.mu)
        return self.spec.omega1 * complex(-b, c)

    @cached_property
    def B(self) -> complex:
        if self.spec.forcing is None:
            return 0j
        return particular_amplitude(self.spec)

    def x(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.exponent
        out = self.a_plus * np.exp(lam * t) + self.a_minus * np.exp(-lam * t)
        if self.spec.forcing is not None:
            out = out + self.B * np.exp(1j * self.spec.forcing.omega * t)
        return out

    def v(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.exponent
        out = lam * self.a_plus * np.exp(lam * t) - lam * self.a_minus * np.exp(-lam * t)
        if self.spec.forcing is not None:
            omega = self.spec.forcing.omega
            out = out + 1j * omega * self.B * np.exp(1j * omega * t)
        return out

    def state(self, t) -> tuple[complex, complex]:
        return complex(self.x(t)), complex(self.v(t))


def general_solution(spec: ModelSpec, x0: complex, v0: complex) -> TwoBranchSolution:
    """Exact linear solution through an arbitrary initial state."""
    return TwoBranchSolution.from_state(spec, x0, v0)
