"""Stroboscopic attractor classification and basins of attraction.

Long-run sign-damping trajectories settle onto periodic orbits whose
periods are small integer multiples of the forcing period. Sampling the
flow once per forcing period, at drive phase zero, turns each orbit into
a short repeating cycle of section states, so classification reduces to
finding the smallest shift that maps the strobe sequence onto itself
within a match radius. A basin grid runs that classification over a
rectangle of initial conditions and colors each cell by the attractor it
reaches; distinct attractors with the same period get distinct labels,
which is why catalog matching compares whole cycles and not single
points.

The complex-stiffness family is deliberately excluded. Its bounded
periodic solutions have an unstable transverse direction, so any long
integration leaves them at a tolerance-dependent time and basin
membership would measure the integrator, not the model.

Match radius default 1e-4: attractor separations at the parameter values
of interest are O(0.1), integration errors over the confirmation window
are below 1e-6, and the radius must sit between the two scales.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _rk
from .integrate import IntegratorConfig, StepSizeError, integrate
from .models import InvalidModelError, ModelSpec

__all__ = [
    "LABEL_UNRESOLVED",
    "LABEL_ESCAPED",
    "ClassifyConfig",
    "ClassifyResult",
    "StroboscopicOrbit",
    "AttractorClass",
    "GridConfig",
    "BasinGrid",
    "strobe_orbit",
    "classify_period",
    "confirm_stability",
    "build_basin",
]

LABEL_UNRESOLVED = 0
LABEL_ESCAPED = -1


@dataclass(frozen=True)
class ClassifyConfig:
    """Knobs for strobing and period detection.

    The transient allowance scales like 1/c, so the default of 300
    strobes is sized for damping as weak as c = 0.01; stronger damping
    just wastes a little time. A period p is accepted when
    |s_{m+p} - s_m| < rho holds for confirm_strobes consecutive m, and
    candidate p never exceeds p_max: cells that repeat more slowly than
    that are reported unresolved rather than forced into a class.
    """

    transient_strobes: int = 300
    confirm_strobes: int = 20
    p_max: int = 12
    rho: float = 1e-4
    rtol: float = 1e-9
    atol: float = 1e-12
    x_max: float = 1e6

    def __post_init__(self) -> None:
        if self.transient_strobes < 0:
            raise ValueError("transient_strobes must be >= 0")
        if self.confirm_strobes < 1:
            raise ValueError("confirm_strobes must be >= 1")
        if self.p_max < 1:
            raise ValueError("p_max must be >= 1")
        if not self.rho > 0.0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not 0.0 < self.rtol < 1.0:
            raise ValueError(f"rtol must lie in (0, 1), got {self.rtol}")
        if not self.atol > 0.0:
            raise ValueError(f"atol must be > 0, got {self.atol}")
        if not self.x_max > 0.0:
            raise ValueError(f"x_max must be > 0, got {self.x_max}")

    @property
    def n_strobes(self) -> int:
        """Section states needed: transient, then a window long enough to
        test every period up to p_max over the full confirmation run."""
        return self.transient_strobes + self.confirm_strobes + self.p_max


@dataclass(frozen=True, eq=False)
class StroboscopicOrbit:
    """Section states of one trajectory, sampled every forcing period.

    states[m] is (x, v) at t = m * period, starting from the initial
    condition itself at m = 0; the sampling phase is drive phase zero.
    transient_cutoff is the index of the first state the classifier
    trusts. status is "completed" or "escaped"; escaped orbits keep the
    states gathered before |x| crossed the blow-up threshold.
    """

    period: float
    states: np.ndarray
    transient_cutoff: int
    status: str

    @property
    def post_transient(self) -> np.ndarray:
        return self.states[self.transient_cutoff:]


@dataclass(frozen=True, eq=False)
class ClassifyResult:
    """Verdict of classify_period.

    status "periodic" carries the period multiple and the representative
    cycle, one (x, v) row per strobe of the cycle, phase-aligned to the
    sampling grid. "escaped" means the trajectory crossed the blow-up
    threshold; "unresolved" means no period up to p_max confirmed.
    """

    status: str
    period: int | None = None
    cycle: np.ndarray | None = None

    @property
    def is_periodic(self) -> bool:
        return self.status == "periodic"


@dataclass(frozen=True, eq=False)
class AttractorClass:
    """A catalogued attractor: id, period multiple, representative cycle."""

    id: int
    period: int
    cycle: np.ndarray
    rho: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "period_multiple": self.period,
            "cycle": [[float(x), float(v)] for x, v in self.cycle],
        }


@dataclass(frozen=True)
class GridConfig:
    """Rectangle of initial conditions, sampled inclusively.

    nx points span x_range and ny points span v_range, endpoints
    included, so a grid of 2n-1 points per axis refines a grid of n
    points on the same window cell-for-cell.
    """

    x_range: tuple[float, float] = (-3.0, 3.0)
    v_range: tuple[float, float] = (-3.0, 1.0)
    nx: int = 100
    ny: int = 100

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("x_range", self.x_range), ("v_range", self.v_range)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a finite (lo, hi) with lo < hi")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("resolution must be at least 2 x 2")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    def vs(self) -> np.ndarray:
        return np.linspace(self.v_range[0], self.v_range[1], self.ny)


def _require_reid(spec: ModelSpec) -> None:
    if not spec.is_reid:
        raise InvalidModelError(
            "stroboscopic classification is limited to the sign-damping family; "
            "complex-stiffness orbits have no attracting set to classify"
        )
    spec.require_forcing()


def strobe_orbit(spec, initial, n_strobes: int, cfg: ClassifyConfig | None = None):
    """Strobe one trajectory for n_strobes section states.

    Runs through the full stick-aware integrator, so trajectories that
    spend time in the sticking regime strobe correctly. Blow-up yields
    status "escaped" with the states collected so far.
    """
    cfg = cfg or ClassifyConfig()
    _require_reid(spec)
    if n_strobes < 2:
        raise ValueError("need at least 2 strobes")
    period = spec.forcing.period
    icfg = IntegratorConfig(
        t_end=(n_strobes - 1) * period,
        dt_out=period,
        rtol=cfg.rtol,
        atol=cfg.atol,
        x_max=cfg.x_max,
    )
    traj = integrate(spec, initial, icfg)
    # A blown-up trajectory ends with an off-grid sample; keep grid rows.
    m = np.round(traj.t / period)
    on_grid = np.abs(traj.t - m * period) <= 1e-9 * period
    states = np.column_stack((traj.x[on_grid].real, traj.v[on_grid].real))
    status = "escaped" if traj.status == "blew-up" else "completed"
    cutoff = min(cfg.transient_strobes, states.shape[0])
    return StroboscopicOrbit(
        period=period, states=states, transient_cutoff=cutoff, status=status
    )


def _find_period(post: np.ndarray, cfg: ClassifyConfig) -> int | None:
    n = cfg.confirm_strobes
    for p in range(1, cfg.p_max + 1):
        if post.shape[0] < n + p:
            return None
        d = post[p:p + n] - post[:n]
        if float(np.max(np.hypot(d[:, 0], d[:, 1]))) < cfg.rho:
            return p
    return None


def _cycle_from(post: np.ndarray, p: int) -> np.ndarray:
    # Last p states are the most converged. Their phase within the cycle
    # depends on the initial condition; catalog matching absorbs that by
    # trying every cyclic shift.
    return np.ascontiguousarray(post[post.shape[0] - p:])


def _mutually_distinct(cycle: np.ndarray, rho: float) -> bool:
    p = cycle.shape[0]
    for i in range(p):
        d = cycle[i + 1:] - cycle[i]
        if d.size and float(np.min(np.hypot(d[:, 0], d[:, 1]))) <= 2.0 * rho:
            return False
    return True


def _classify_states(post: np.ndarray, cfg: ClassifyConfig) -> ClassifyResult:
    p = _find_period(post, cfg)
    if p is None:
        return ClassifyResult(status="unresolved")
    cycle = _cycle_from(post, p)
    if not _mutually_distinct(cycle, cfg.rho):
        # Two cycle states closer than 2 rho make the period call
        # ambiguous at this radius; refuse rather than guess.
        return ClassifyResult(status="unresolved")
    return ClassifyResult(status="periodic", period=p, cycle=cycle)


def classify_period(spec, initial, cfg: ClassifyConfig | None = None) -> ClassifyResult:
    """Classify the long-run behaviour of one initial condition.

    Integrates past the transient allowance, then reports the smallest
    period multiple p <= p_max whose strobe-to-strobe recurrence holds
    for confirm_strobes consecutive sections.
    """
    cfg = cfg or ClassifyConfig()
    try:
        orbit = strobe_orbit(spec, initial, cfg.n_strobes, cfg)
    except StepSizeError:
        return ClassifyResult(status="unresolved")
    if orbit.status == "escaped":
        return ClassifyResult(status="escaped")
    return _classify_states(orbit.post_transient, cfg)


def confirm_stability(
    spec, attractor: AttractorClass, cfg: ClassifyConfig | None = None,
    extra_strobes: int = 50,
) -> float:
    """Re-integrate a catalogued cycle and report its worst drift.

    Starts from the representative's first state and strobes
    extra_strobes more sections; returns the largest distance from the
    state the cycle predicts. Stable attractors stay within rho.
    """
    cfg = cfg or ClassifyConfig()
    orbit = strobe_orbit(
        spec, (attractor.cycle[0, 0], attractor.cycle[0, 1]),
        extra_strobes + 1, cfg,
    )
    if orbit.status != "completed":
        return math.inf
    p = attractor.period
    worst = 0.0
    for m in range(orbit.states.shape[0]):
        ref = attractor.cycle[m % p]
        worst = max(worst, float(np.hypot(*(orbit.states[m] - ref))))
    return worst


def _cycles_match(a: np.ndarray, b: np.ndarray, rho: float) -> bool:
    p = a.shape[0]
    if b.shape[0] != p:
        return False
    for shift in range(p):
        d = a - np.roll(b, -shift, axis=0)
        if float(np.max(np.hypot(d[:, 0], d[:, 1]))) < rho:
            return True
    return False


@dataclass(frozen=True, eq=False)
class BasinGrid:
    """Labelled grid of initial conditions plus the attractor catalog.

    labels has shape (ny, nx), row j at v = vs()[j], column i at
    x = xs()[i]. Entries are a catalog id (1-based), LABEL_UNRESOLVED,
    or LABEL_ESCAPED. Every positive label references a catalog entry.
    """

    spec: ModelSpec
    grid: GridConfig
    classify: ClassifyConfig
    labels: np.ndarray
    catalog: tuple[AttractorClass, ...]

    def counts(self) -> dict[int, int]:
        vals, cnt = np.unique(self.labels, return_counts=True)
        return {int(k): int(n) for k, n in zip(vals, cnt)}

    def class_by_id(self, label: int) -> AttractorClass:
        for entry in self.catalog:
            if entry.id == label:
                return entry
        raise KeyError(f"no catalogued attractor with id {label}")

    def period_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(entry.period for entry in self.catalog))

    def to_csv(self, path) -> None:
        """One row per cell, x fastest, v ascending: x0,v0,label."""
        xs = self.grid.xs()
        vs = self.grid.vs()
        with open(path, "w", newline="") as fh:
            fh.write("x0,v0,label\n")
            for j in range(self.grid.ny):
                for i in range(self.grid.nx):
                    lab = int(self.labels[j, i])
                    if lab == LABEL_UNRESOLVED:
                        word = "unresolved"
                    elif lab == LABEL_ESCAPED:
                        word = "escaped"
                    else:
                        word = str(lab)
                    fh.write(f"{float(xs[i])!r},{float(vs[j])!r},{word}\n")

    def catalog_dict(self) -> dict[str, Any]:
        return {
            "strobe_phase": 0.0,
            "strobe_period": self.spec.require_forcing().period,
            "rho": self.classify.rho,
            "classes": [entry.to_dict() for entry in self.catalog],
        }

    def to_catalog_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.catalog_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_pgm(self, path) -> None:
        """Plain PGM image of the labels, one grey level per label.

        Pixel values are the label ids themselves: 0 for unresolved,
        maxval for escaped, so viewers that stretch by maxval show the
        catalog as evenly spaced grey steps. Row order is top = highest
        v to match image conventions.
        """
        maxval = max(len(self.catalog) + 1, 1)
        img = np.where(self.labels == LABEL_ESCAPED, maxval, self.labels)
        lines = ["P2", f"# basin labels, {len(self.catalog)} classes",
                 f"{self.grid.nx} {self.grid.ny}", str(maxval)]
        for j in range(self.grid.ny - 1, -1, -1):
            lines.append(" ".join(str(int(v)) for v in img[j]))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _strobe_batch(spec: ModelSpec, x0s, v0s, cfg: ClassifyConfig):
    """Post-transient states for a batch of cells via the compiled kernel.

    Returns (states, status) with states[i] of shape (confirm + p_max, 2)
    valid only where status[i] == completed.
    """
    forcing = spec.require_forcing()
    n_strobes = cfg.n_strobes
    keep = n_strobes - cfg.transient_strobes
    n = x0s.size
    out_x = np.empty((n, keep))
    out_v = np.empty((n, keep))
    out_status = np.empty(n, dtype=np.int64)
    _rk.reid_strobe_batch(
        spec.k, spec.c, spec.epsilon, 1.0 / spec.M,
        forcing.amplitude.real, forcing.omega,
        np.ascontiguousarray(x0s, dtype=np.float64),
        np.ascontiguousarray(v0s, dtype=np.float64),
        forcing.period, n_strobes, cfg.transient_strobes,
        cfg.rtol, cfg.atol, np.inf, cfg.x_max,
        out_x, out_v, out_status,
    )
    return np.stack((out_x, out_v), axis=-1), out_status


def build_basin(
    spec: ModelSpec,
    grid: GridConfig | None = None,
    cfg: ClassifyConfig | None = None,
    chunk: int = 2048,
) -> BasinGrid:
    """Classify every cell of a grid of initial conditions.

    Cells are strobed in chunks through the batch kernel; the few that
    stall in the sticking regime fall back to the stick-aware scalar
    path. The catalog is grown in scan order (v ascending, then x), so
    ids depend only on the grid and the model, never on thread count.
    """
    grid = grid or GridConfig()
    cfg = cfg or ClassifyConfig()
    _require_reid(spec)
    xs = grid.xs()
    vs = grid.vs()
    x0s = np.tile(xs, grid.ny)
    v0s = np.repeat(vs, grid.nx)
    n_cells = x0s.size

    labels = np.zeros(n_cells, dtype=np.int64)
    catalog: list[AttractorClass] = []

    for start in range(0, n_cells, chunk):
        stop = min(start + chunk, n_cells)
        states, status = _strobe_batch(spec, x0s[start:stop], v0s[start:stop], cfg)
        for i in range(stop - start):
            if status[i] == _rk.STATUS_COMPLETED:
                result = _classify_states(states[i], cfg)
            elif status[i] == _rk.STATUS_BLEWUP:
                result = ClassifyResult(status="escaped")
            else:
                # Stuck cells need the sliding-mode handling only the
                # scalar driver has.
                result = classify_period(
                    spec, (float(x0s[start + i]), float(v0s[start + i])), cfg
                )
            cell = start + i
            if result.status == "escaped":
                labels[cell] = LABEL_ESCAPED
            elif result.status == "periodic":
                matched = None
                for entry in catalog:
                    if entry.period == result.period and _cycles_match(
                        entry.cycle, result.cycle, cfg.rho
                    ):
                        matched = entry.id
                        break
                if matched is None:
                    matched = len(catalog) + 1
                    catalog.append(
                        AttractorClass(
                            id=matched, period=result.period,
                            cycle=result.cycle, rho=cfg.rho,
                        )
                    )
                labels[cell] = matched
            # unresolved keeps the zero label

    return BasinGrid(
        spec=spec, grid=grid, classify=cfg,
        labels=labels.reshape(grid.ny, grid.nx), catalog=tuple(catalog),
    )
