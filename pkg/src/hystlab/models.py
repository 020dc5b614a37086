"""Model definitions for periodically forced oscillators with hysteretic damping.

Two families are covered, five variants in total.

The complex-stiffness family folds the loss into the stiffness, so the
displacement is complex and the equation of motion reads

    M x'' + (k + i h) x + eps x^n = F exp(i omega t),     n in {2, 3},

with ``F = f + i g``. The linear variant drops the eps term. Writing
``mu = h / k`` and ``omega1^2 = k / M``, the homogeneous dynamics is governed
by the complex square frequency ``Omega1^2 = omega1^2 (1 + i mu)``. Physical
solutions live on the decaying branch of this equation; the other branch grows
like ``exp(+omega1 b t)``, which is what makes long numerical integrations of
this family eventually diverge (see :mod:`hystlab.integrate`).

The sign-function family keeps the displacement real and switches the damping
force with the sign of ``x * x'``:

    M x'' + k x (1 + (c/k) sgn(x x')) + eps x^3 = f sin(omega t).

Here the loss per cycle is amplitude-proportional and frequency-independent,
and the right-hand side is discontinuous on the lines x=0 and v=0 in phase
space, which the integrator handles by event localization.

All quantities are dimensionless; M defaults to 1.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, replace
from typing import Any

__all__ = [
    "BISHOP_VARIANTS",
    "REID_VARIANTS",
    "VARIANTS",
    "InvalidModelError",
    "Forcing",
    "ModelSpec",
    "rhs_bishop",
    "rhs_reid",
    "sign",
]

BISHOP_VARIANTS = ("bishop-linear", "bishop-quadratic", "bishop-cubic")
REID_VARIANTS = ("reid-linear", "reid-cubic")
VARIANTS = BISHOP_VARIANTS + REID_VARIANTS

# Nonlinearity exponent by variant; 0 marks a linear model.
_POWER = {
    "bishop-linear": 0,
    "bishop-quadratic": 2,
    "bishop-cubic": 3,
    "reid-linear": 0,
    "reid-cubic": 3,
}


class InvalidModelError(ValueError):
    """Raised when parameters do not describe a valid model."""


def sign(value: float) -> float:
    """Sign of ``value`` with sign(0) = 0.

    The stress-strain reversal points of the sign-function family have
    x * v = 0, where the |x/v|*v form of the damping force is undefined;
    defining sgn(0) = 0 makes the right-hand side total.
    """
    if value > 0.0:
        return 1.0
    if value < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class Forcing:
    """Periodic drive of a single angular frequency.

    Parameters
    ----------
    omega : float
        Angular frequency, > 0.
    f : float
        Real part of the drive amplitude.
    g : float, optional
        Imaginary part of the drive amplitude (complex-stiffness family only).
    waveform : {"auto", "complex-exponential", "sine"}, optional
        Drive waveform. "auto" resolves to complex-exponential for the
        complex-stiffness family and sine for the sign-function family.
    """

    omega: float
    f: float
    g: float = 0.0
    waveform: str = "auto"

    def __post_init__(self) -> None:
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise InvalidModelError(f"forcing omega must be finite and > 0, got {self.omega}")
        if not (math.isfinite(self.f) and math.isfinite(self.g)):
            raise InvalidModelError("forcing amplitude must be finite")
        if self.waveform not in ("auto", "complex-exponential", "sine"):
            raise InvalidModelError(f"unknown waveform {self.waveform!r}")

    @property
    def amplitude(self) -> complex:
        """Complex drive amplitude F = f + i g."""
        return complex(self.f, self.g)

    @property
    def period(self) -> float:
        """Forcing period 2 pi / omega."""
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one oscillator.

    Parameters
    ----------
    variant : str
        One of ``bishop-linear``, ``bishop-quadratic``, ``bishop-cubic``,
        ``reid-linear``, ``reid-cubic``.
    k : float
        Stiffness, > 0.
    h : float, optional
        Loss modulus of the complex-stiffness family, >= 0.
    c : float, optional
        Sign-switched damping coefficient of the sign-function family, >= 0.
    epsilon : float, optional
        Strength of the nonlinear term, >= 0; must be 0 for linear variants.
    M : float, optional
        Inertia, > 0, default 1.
    forcing : Forcing or None, optional
        Periodic drive; None means free motion.
    """

    variant: str
    k: float
    h: float = 0.0
    c: float = 0.0
    epsilon: float = 0.0
    M: float = 1.0
    forcing: Forcing | None = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise InvalidModelError(
                f"unknown variant {self.variant!r}; expected one of {', '.join(VARIANTS)}"
            )
        for name in ("k", "h", "c", "epsilon", "M"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidModelError(f"{name} must be finite, got {value}")
        if self.k <= 0.0:
            raise InvalidModelError(f"k must be > 0, got {self.k}")
        if self.M <= 0.0:
            raise InvalidModelError(f"M must be > 0, got {self.M}")
        if self.h < 0.0 or self.c < 0.0 or self.epsilon < 0.0:
            raise InvalidModelError("h, c and epsilon must be >= 0")
        if self.is_bishop and self.c != 0.0:
            raise InvalidModelError("c belongs to the sign-function family; use h here")
        if self.is_reid and self.h != 0.0:
            raise InvalidModelError("h belongs to the complex-stiffness family; use c here")
        if _POWER[self.variant] == 0 and self.epsilon != 0.0:
            raise InvalidModelError("linear variants require epsilon = 0")
        if self.forcing is not None:
            waveform = self.forcing.waveform
            if waveform == "auto":
                waveform = "sine" if self.is_reid else "complex-exponential"
                object.__setattr__(self, "forcing", replace(self.forcing, waveform=waveform))
            if self.is_reid:
                if waveform != "sine":
                    raise InvalidModelError("sign-function models take a sine drive")
                if self.forcing.g != 0.0:
                    raise InvalidModelError("sign-function models take a real drive amplitude")
            elif waveform != "complex-exponential":
                raise InvalidModelError("complex-stiffness models take a complex-exponential drive")

    # -- derived quantities -------------------------------------------------

    @property
    def is_bishop(self) -> bool:
        return self.variant in BISHOP_VARIANTS

    @property
    def is_reid(self) -> bool:
        return self.variant in REID_VARIANTS

    @property
    def power(self) -> int:
        """Exponent of the nonlinear term; 0 for linear variants."""
        return _POWER[self.variant]

    @property
    def mu(self) -> float:
        """Loss factor h / k."""
        return self.h / self.k

    @property
    def omega1(self) -> float:
        """Natural frequency sqrt(k / M)."""
        return math.sqrt(self.k / self.M)

    @property
    def complex_stiffness_sq(self) -> complex:
        """Omega1^2 = omega1^2 (1 + i mu)."""
        w1sq = self.k / self.M
        return complex(w1sq, w1sq * self.mu)

    def require_forcing(self) -> Forcing:
        if self.forcing is None:
            raise InvalidModelError(f"{self.variant} operation requires a forcing term")
        return self.forcing

    def replace_forcing(self, forcing: Forcing | None) -> "ModelSpec":
        """Copy of this model with a different drive (or none)."""
        return replace(self, forcing=forcing)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "variant": self.variant,
            "M": self.M,
            "k": self.k,
            "h": self.h,
            "c": self.c,
            "epsilon": self.epsilon,
        }
        if self.forcing is not None:
            out["forcing"] = {
                "f": self.forcing.f,
                "g": self.forcing.g,
                "omega": self.forcing.omega,
                "waveform": self.forcing.waveform,
            }
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelSpec":
        """Build a spec from a JSON-style dict; missing epsilon or g mean 0."""
        try:
            variant = data["variant"]
            k = float(data["k"])
        except KeyError as exc:
            raise InvalidModelError(f"model spec is missing required key {exc}") from None
        forcing = None
        if data.get("forcing") is not None:
            fdata = data["forcing"]
            try:
                forcing = Forcing(
                    omega=float(fdata["omega"]),
                    f=float(fdata["f"]),
                    g=float(fdata.get("g", 0.0)),
                    waveform=fdata.get("waveform", "auto"),
                )
            except KeyError as exc:
                raise InvalidModelError(f"forcing spec is missing required key {exc}") from None
        return cls(
            variant=variant,
            k=k,
            h=float(data.get("h", 0.0)),
            c=float(data.get("c", 0.0)),
            epsilon=float(data.get("epsilon", 0.0)),
            M=float(data.get("M", 1.0)),
            forcing=forcing,
        )

    def to_json(self, **dump_kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **dump_kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def rhs_bishop(spec: ModelSpec, t: float, x: complex, v: complex) -> complex:
    """Acceleration of a complex-stiffness oscillator.

    Returns ``(F exp(i omega t) - (k + i h) x - eps x^n) / M``. The velocity
    argument is unused (the model has no velocity-proportional force) but kept
    so all right-hand sides share one state signature.
    """
    if not spec.is_bishop:
        raise InvalidModelError(f"rhs_bishop needs a complex-stiffness variant, got {spec.variant}")
    force = -complex(spec.k, spec.h) * x
    if spec.power == 2:
        force -= spec.epsilon * x * x
    elif spec.power == 3:
        force -= spec.epsilon * x * x * x
    if spec.forcing is not None:
        force += spec.forcing.amplitude * cmath.exp(1j * spec.forcing.omega * t)
    return force / spec.M


def rhs_reid(spec: ModelSpec, t: float, x: float, v: float) -> float:
    """Acceleration of a sign-function oscillator.

    Returns ``(f sin(omega t) - k x (1 + (c/k) sgn(x v)) - eps x^3) / M``
    with sgn(0) = 0.
    """
    if not spec.is_reid:
        raise InvalidModelError(f"rhs_reid needs a sign-function variant, got {spec.variant}")
    force = -spec.k * x - spec.c * x * sign(x * v)
    if spec.power == 3:
        force -= spec.epsilon * x * x * x
    if spec.forcing is not None:
        force += spec.forcing.f * math.sin(spec.forcing.omega * t)
    return force / spec.M
