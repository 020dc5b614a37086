"""Fourier-series representation of the periodic attractor.

For the forced complex-stiffness oscillator with a quadratic or cubic term,
the long-time periodic solution admits a power-series-in-epsilon Fourier
expansion whose coefficients obey an algebraic recursion. Writing
``Omega1^2 = omega1^2 (1 + i mu)`` and normalizing by the inertia
(``F -> F/M``, ``eps -> eps/M``), the two expansions are

    quadratic:  x(t) = sum_k eps^k B_k exp(i (k+1) omega t),
    cubic:      x(t) = sum_k eps^k B_k exp(i (2k+1) omega t),

with ``B_0 = F / (Omega1^2 - omega^2)`` and, for k >= 1,

    quadratic:  B_k = - [ sum_{i+j=k-1} B_i B_j ] / (Omega1^2 - ((k+1) omega)^2)
    cubic:      B_k = - [ sum_{i+j+l=k-1} B_i B_j B_l ] / (Omega1^2 - ((2k+1) omega)^2)

where the sums run over all ordered index tuples. Expanding the square gives
"twice the i>j products plus a diagonal B_{(k-1)/2}^2 present iff k is odd";
expanding the cube gives the ordered-triple sum with multiplicities 1 (all
equal), 3 (two equal) and 6 (all distinct). Both convolutions are accumulated
with compensated (Kahan) summation: at the default truncation of 150 terms
the recursion chains O(N^2) roundings.

The module also evaluates the truncated series and its residual

    Q(t) = x'' + Omega1^2 x + eps x^p - F exp(i omega t),

which in exact arithmetic cancels harmonic by harmonic up to the truncation
tail; in double precision it sits at the 1e-15 level for converged series, so
max|Q| is a sharp end-to-end check of the recursion. A brute-force
convolution oracle (direct loops over all index tuples, independent of the
recursion) backs the unit tests, and :func:`convergence_report` summarizes
coefficient decay and truncation quality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .models import InvalidModelError, ModelSpec

__all__ = [
    "DEFAULT_TERMS",
    "ResonantDenominatorError",
    "FourierAttractor",
    "ConvergenceReport",
    "quadratic_coefficients",
    "cubic_coefficients",
    "compute_attractor",
    "oracle_convolution",
    "convergence_report",
]

DEFAULT_TERMS = 150

# Harmonic index of coefficient k under each expansion rule.
_HARMONIC = {
    "quadratic": lambda k: k + 1,
    "cubic": lambda k: 2 * k + 1,
}


class ResonantDenominatorError(ZeroDivisionError):
    """A recursion denominator Omega1^2 - (m omega)^2 vanished.

    Only possible for mu = 0; the offending coefficient index is stored in
    ``index`` and the harmonic in ``harmonic``.
    """

    def __init__(self, index: int, harmonic: int):
        self.index = index
        self.harmonic = harmonic
        super().__init__(
            f"resonant denominator at coefficient {index} (harmonic {harmonic}); "
            "mu > 0 removes the singularity"
        )


class _Kahan:
    """Compensated accumulator; complex +/- are componentwise so the classic
    scheme applies unchanged."""

    __slots__ = ("total", "comp")

    def __init__(self) -> None:
        self.total = 0j
        self.comp = 0j

    def add(self, term: complex) -> None:
        y = term - self.comp
        t = self.total + y
        self.comp = (t - self.total) - y
        self.total = t


def _series_inputs(spec: ModelSpec, rule: str) -> tuple[complex, complex, float, float]:
    """Normalized (Omega1^2, F/M, eps/M, omega) for the recursion."""
    expected = "bishop-quadratic" if rule == "quadratic" else "bishop-cubic"
    if spec.variant != expected:
        raise InvalidModelError(f"{rule} series requires variant {expected}, got {spec.variant}")
    forcing = spec.require_forcing()
    return (
        spec.complex_stiffness_sq,
        forcing.amplitude / spec.M,
        spec.epsilon / spec.M,
        forcing.omega,
    )


@dataclass(frozen=True)
class FourierAttractor:
    """Truncated Fourier series of the periodic attractor.

    Coefficients are stored bare; the expansion parameter (epsilon normalized
    by inertia) is applied at evaluation time, so one attractor serves an
    epsilon sweep. ``rule`` is "quadratic" (harmonics (k+1) omega) or "cubic"
    (harmonics (2k+1) omega, odd only).
    """

    spec: ModelSpec
    rule: str
    coefficients: np.ndarray  # complex, shape (N,)

    def __post_init__(self) -> None:
        if self.rule not in _HARMONIC:
            raise ValueError(f"unknown expansion rule {self.rule!r}")
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_terms(self) -> int:
        return int(self.coefficients.size)

    @property
    def omega(self) -> float:
        return self.spec.require_forcing().omega

    @property
    def epsilon(self) -> float:
        """Expansion parameter eps / M actually used in evaluation."""
        return self.spec.epsilon / self.spec.M

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def harmonics(self) -> np.ndarray:
        """Harmonic multiplier of each stored coefficient."""
        k = np.arange(self.n_terms)
        return k + 1 if self.rule == "quadratic" else 2 * k + 1

    def weighted(self) -> np.ndarray:
        """Coefficients with epsilon powers applied: eps^k B_k."""
        return np.power(self.epsilon, np.arange(self.n_terms)) * self.coefficients

    def evaluate(self, t):
        """Series value, velocity and acceleration at times t.

        Returns (x, v, a) with the shape of t; each is the termwise sum of
        eps^k B_k exp(i h_k omega t) and its time derivatives.
        """
        t = np.asarray(t, dtype=float)
        w = self.weighted()
        freqs = self.harmonics() * self.omega
        phases = np.exp(1j * np.multiply.outer(t, freqs))
        x = phases @ w
        v = phases @ (1j * freqs * w)
        a = phases @ (-(freqs**2) * w)
        return x, v, a

    def state(self, t: float) -> tuple[complex, complex]:
        """(x, v) at one time, e.g. to start an integration on the attractor."""
        x, v, _ = self.evaluate(float(t))
        return complex(x), complex(v)

    def residual(self, t):
        """Q(t) = x'' + Omega1^2 x + eps x^p - (F/M) exp(i omega t).

        The nonlinear power is the evaluated series multiplied out pointwise.
        """
        t = np.asarray(t, dtype=float)
        x, _, a = self.evaluate(t)
        power = 2 if self.rule == "quadratic" else 3
        forcing = self.spec.require_forcing()
        drive = (forcing.amplitude / self.spec.M) * np.exp(1j * forcing.omega * t)
        return a + self.spec.complex_stiffness_sq * x + self.epsilon * x**power - drive

    def max_residual(self, t_end: float | None = None, samples: int = 4096) -> float:
        """max |Q| over [0, t_end] (default one period) at evenly spaced times."""
        horizon = self.period if t_end is None else float(t_end)
        t = np.linspace(0.0, horizon, samples)
        return float(np.max(np.abs(self.residual(t))))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "rule": self.rule,
            "omega": self.omega,
            "epsilon": self.epsilon,
            "B": [[z.real, z.imag] for z in self.coefficients.tolist()],
            "model": self.spec.to_dict(),
        }

    def to_json(self, **dump_kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **dump_kwargs)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FourierAttractor":
        if "model" not in data:
            raise ValueError("attractor JSON needs the 'model' object to rebuild the ModelSpec")
        spec = ModelSpec.from_dict(data["model"])
        coeffs = np.array([complex(re, im) for re, im in data["B"]], dtype=complex)
        return cls(spec=spec, rule=data["rule"], coefficients=coeffs)

    @classmethod
    def from_json(cls, text: str) -> "FourierAttractor":
        return cls.from_dict(json.loads(text))


def quadratic_coefficients(spec: ModelSpec, n_terms: int = DEFAULT_TERMS) -> FourierAttractor:
    """Coefficients of the quadratic-model attractor series.

    B_0 = F / (Omega1^2 - omega^2); each later coefficient divides the pair
    convolution of lower ones by its harmonic denominator:

        B_k = -(2 sum_{i>j, i+j=k-1} B_i B_j + [k odd] B_{(k-1)/2}^2)
              / (Omega1^2 - ((k+1) omega)^2).

    Coefficients do not depend on epsilon; epsilon enters at evaluation.

    Raises
    ------
    ResonantDenominatorError
        If some denominator vanishes (possible only for mu = 0).
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    om_sq, f_eff, _, omega = _series_inputs(spec, "quadratic")
    B = np.zeros(n_terms, dtype=complex)
    denom0 = om_sq - omega**2
    if denom0 == 0:
        raise ResonantDenominatorError(0, 1)
    B[0] = f_eff / denom0
    for k in range(1, n_terms):
        harmonic = k + 1
        denom = om_sq - (harmonic * omega) ** 2
        if denom == 0:
            raise ResonantDenominatorError(k, harmonic)
        acc = _Kahan()
        for j in range(k // 2):
            acc.add(2.0 * (B[j] * B[k - 1 - j]))
        if k % 2 == 1:
            mid = B[(k - 1) // 2]
            acc.add(mid * mid)
        B[k] = -acc.total / denom
    return FourierAttractor(spec=spec, rule="quadratic", coefficients=B)


def cubic_coefficients(spec: ModelSpec, n_terms: int = DEFAULT_TERMS) -> FourierAttractor:
    """Coefficients of the cubic-model attractor series.

    B_0 = F / (Omega1^2 - omega^2); each later coefficient divides the full
    ordered triple convolution sum_{i+j+l=k-1} B_i B_j B_l (multiplicities
    1 / 3 / 6 for all-equal / two-equal / all-distinct tuples) by
    Omega1^2 - ((2k+1) omega)^2. The triple sum is built from running pair
    convolutions, so the whole recursion costs O(N^2).
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    om_sq, f_eff, _, omega = _series_inputs(spec, "cubic")
    B = np.zeros(n_terms, dtype=complex)
    denom0 = om_sq - omega**2
    if denom0 == 0:
        raise ResonantDenominatorError(0, 1)
    B[0] = f_eff / denom0
    # pair[s] = sum_{i+j=s} B_i B_j; final once B_s is known since higher
    # indices cannot reach a fixed s.
    pair = np.zeros(n_terms, dtype=complex)
    pair[0] = B[0] * B[0]
    for k in range(1, n_terms):
        s = k - 1
        if s >= 1:
            acc = _Kahan()
            for i in range(s + 1):
                acc.add(B[i] * B[s - i])
            pair[s] = acc.total
        harmonic = 2 * k + 1
        denom = om_sq - (harmonic * omega) ** 2
        if denom == 0:
            raise ResonantDenominatorError(k, harmonic)
        triple = _Kahan()
        for l in range(k):
            triple.add(B[l] * pair[k - 1 - l])
        B[k] = -triple.total / denom
    return FourierAttractor(spec=spec, rule="cubic", coefficients=B)


def compute_attractor(spec: ModelSpec, n_terms: int = DEFAULT_TERMS) -> FourierAttractor:
    """Dispatch to the quadratic or cubic recursion based on the variant."""
    if spec.variant == "bishop-quadratic":
        return quadratic_coefficients(spec, n_terms)
    if spec.variant == "bishop-cubic":
        return cubic_coefficients(spec, n_terms)
    raise InvalidModelError(f"no attractor series for variant {spec.variant}")


def oracle_convolution(
    coefficients: np.ndarray, power: int, target_harmonic: int
) -> complex:
    """Brute-force coefficient of exp(i m omega t) in x^power.

    Test oracle, deliberately independent of the recursion: loops over every
    ordered index tuple, keeps those whose harmonics sum to ``target_harmonic``
    and checks that all kept tuples carry one and the same epsilon order
    (which the harmonic rule forces). Quadratic terms live on harmonics
    i+j+2, cubic on 2(i+j+l)+3.
    """
    if power not in (2, 3):
        raise ValueError("power must be 2 or 3")
    B = np.asarray(coefficients, dtype=complex)
    n = B.size
    harmonic = (lambda k: k + 1) if power == 2 else (lambda k: 2 * k + 1)
    total = 0j
    orders: set[int] = set()
    if power == 2:
        for i in range(n):
            for j in range(n):
                if harmonic(i) + harmonic(j) == target_harmonic:
                    total += B[i] * B[j]
                    orders.add(i + j)
    else:
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    if harmonic(i) + harmonic(j) + harmonic(l) == target_harmonic:
                        total += B[i] * B[j] * B[l]
                        orders.add(i + j + l)
    if len(orders) > 1:
        raise AssertionError(f"mixed epsilon orders {orders} at harmonic {target_harmonic}")
    return total


@dataclass(frozen=True)
class ConvergenceReport:
    """Coefficient-decay and truncation diagnostics for one attractor.

    ``slope`` is the least-squares slope of log|B_k| against log k over the
    upper half of the indices k >= 1 with nonzero B_k (None when fewer than
    two such points exist). It describes the bare coefficients and is purely
    diagnostic: bare magnitudes can grow below the harmonic resonance index
    while the evaluated series still converges hard. Acceptance therefore
    gates on the epsilon-weighted magnitudes eps^k |B_k| alone: ``tail_sum``
    and ``head_sum`` split them at N/2 and the attractor is accepted when
    tail < threshold * head (an all-zero series is accepted trivially).
    """

    magnitudes: np.ndarray
    slope: float | None
    head_sum: float
    tail_sum: float
    tail_threshold: float
    accepted: bool
    fit_window: tuple[int, int] | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "head_sum": self.head_sum,
            "tail_sum": self.tail_sum,
            "tail_threshold": self.tail_threshold,
            "accepted": self.accepted,
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "n_terms": int(self.magnitudes.size),
        }


def convergence_report(
    attractor: FourierAttractor, tail_threshold: float = 1e-10
) -> ConvergenceReport:
    """Decay slope, tail bound and acceptance verdict for one attractor."""
    mags = np.abs(attractor.coefficients)
    n = mags.size
    weighted = np.abs(attractor.weighted())
    half = n // 2
    head = float(np.sum(weighted[:half])) if half else float(np.sum(weighted))
    tail = float(np.sum(weighted[half:])) if half else 0.0

    nonzero = [k for k in range(1, n) if mags[k] > 0.0]
    upper = nonzero[len(nonzero) // 2 :]
    slope: float | None = None
    window: tuple[int, int] | None = None
    if len(upper) >= 2:
        ks = np.array(upper, dtype=float)
        slope = float(np.polyfit(np.log(ks), np.log(mags[upper]), 1)[0])
        window = (upper[0], upper[-1])

    if head == 0.0 and tail == 0.0:
        accepted = True  # unforced attractor: the origin
    else:
        accepted = tail < tail_threshold * head
    return ConvergenceReport(
        magnitudes=mags,
        slope=slope,
        head_sum=head,
        tail_sum=tail,
        tail_threshold=tail_threshold,
        accepted=accepted,
        fit_window=window,
    )
