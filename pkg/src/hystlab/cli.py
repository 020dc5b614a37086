"""Command line front end: every experiment as a reproducible subcommand.

Each subcommand resolves its settings from three layers (built-in
defaults, then a JSON config file, then explicit flags), runs the
corresponding library routine, writes CSV/JSON/PGM outputs into the
output directory, and finishes with a manifest listing every file
written together with its sha256. Reruns with the same resolved config
produce byte-identical data files; only the manifest's timing field
moves.

Heavy imports (the compiled kernels) happen inside the subcommand
handlers, after --threads has been applied to the environment, because
the thread pool is sized when the compiled module first loads.

Exit codes: 0 all outputs written, 1 a computation failed, 2 the
configuration was invalid.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

_EXIT_OK = 0
_EXIT_RUNTIME = 1
_EXIT_CONFIG = 2


class ConfigError(Exception):
    """Bad config file or flag combination; maps to exit code 2."""


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _resolve(defaults: dict, file_cfg: dict, args: argparse.Namespace) -> dict:
    """Layer file values then flags over the defaults.

    Flags parse with default=None so only user-supplied ones override.
    Unknown keys in the file are an error: silently ignoring them would
    turn typos into silently different runs.
    """
    resolved = dict(defaults)
    unknown = [k for k in file_cfg if k not in defaults]
    if unknown:
        raise ConfigError(
            f"unknown config keys: {', '.join(sorted(unknown))}; "
            f"valid keys: {', '.join(sorted(defaults))}"
        )
    resolved.update(file_cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    return resolved


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated number list, got {text!r}") from exc


def _tag(value: float) -> str:
    return f"{value:g}"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    out_dir: Path, subcommand: str, resolved: dict, outputs: list[Path], t0: float
) -> Path:
    from . import __version__

    manifest = {
        "subcommand": subcommand,
        "config": {k: resolved[k] for k in sorted(resolved)},
        "version": __version__,
        "duration_seconds": round(time.time() - t0, 3),
        "outputs": [
            {"path": p.name, "sha256": _sha256(p)} for p in outputs
        ],
    }
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_spec(model, M, k, h, c, epsilon, f, g, omega):
    from .models import Forcing, ModelSpec

    forcing = None
    if omega is not None:
        forcing = Forcing(omega=omega, f=f, g=g)
    kwargs = dict(M=M, k=k, epsilon=epsilon, forcing=forcing)
    if model.startswith("bishop"):
        kwargs["h"] = h
    else:
        kwargs["c"] = c
    return ModelSpec(model, **kwargs)


# ---------------------------------------------------------------- simulate

_SIMULATE_DEFAULTS = {
    "model": "bishop-linear",
    "mass": 1.0,
    "k": 1.0,
    "h": 0.02,
    "c": 0.2,
    "epsilon": 0.0,
    "f": 0.0,
    "g": 0.0,
    "omega": None,
    "alpha": None,
    "theta": None,
    "x0": None,
    "v0": None,
    "t_end": 1000.0,
    "dt_out": 0.25,
    "rtol": 1e-9,
    "atol": 1e-12,
    "x_max": 1e6,
    "events": False,
}


def cmd_simulate(args, file_cfg) -> list[Path]:
    cfg = _resolve(_SIMULATE_DEFAULTS, file_cfg, args)
    from .integrate import IntegratorConfig, ModalState, integrate
    from .linear import ForcedSolution, FreeSolution, general_solution

    spec = _build_spec(cfg["model"], cfg["mass"], cfg["k"], cfg["h"], cfg["c"],
                       cfg["epsilon"], cfg["f"], cfg["g"], cfg["omega"])
    modal = cfg["alpha"] is not None or cfg["theta"] is not None
    state = cfg["x0"] is not None or cfg["v0"] is not None
    if modal and state:
        raise ConfigError("give either --alpha/--theta or --x0/--v0, not both")
    if modal:
        initial = ModalState(cfg["alpha"] or 0.0, cfg["theta"] or 0.0)
    else:
        initial = (cfg["x0"] or 0.0, cfg["v0"] or 0.0)

    icfg = IntegratorConfig(t_end=cfg["t_end"], dt_out=cfg["dt_out"],
                            rtol=cfg["rtol"], atol=cfg["atol"], x_max=cfg["x_max"])
    traj = integrate(spec, initial, icfg, record_events=cfg["events"])

    x_ref = None
    if spec.variant == "bishop-linear":
        if modal:
            sol = (FreeSolution(spec, initial.alpha, initial.theta)
                   if spec.forcing is None else
                   ForcedSolution(spec, initial.alpha, initial.theta))
            x_ref = sol.x
        else:
            from .integrate import resolve_initial

            x0c, v0c = resolve_initial(spec, initial)
            x_ref = general_solution(spec, x0c, v0c).x

    out = _out_dir(args)
    csv_path = out / "trajectory.csv"
    if x_ref is None:
        traj.to_csv(csv_path)
    else:
        ref = x_ref(traj.t)
        with open(csv_path, "w", newline="") as fh:
            fh.write("t,re_x,im_x,re_v,im_v,abs_err\n")
            for i in range(traj.t.size):
                fh.write(
                    f"{float(traj.t[i])!r},"
                    f"{float(traj.x[i].real)!r},{float(traj.x[i].imag)!r},"
                    f"{float(traj.v[i].real)!r},{float(traj.v[i].imag)!r},"
                    f"{float(abs(traj.x[i] - ref[i]))!r}\n"
                )
    sidecar = out / "trajectory.json"
    traj.to_sidecar_json(sidecar)
    return [csv_path, sidecar]


# ---------------------------------------------------------------- attractor

_ATTRACTOR_DEFAULTS = {
    "model": "bishop-quadratic",
    "mu": 0.05,
    "f": 1.0,
    "g": 0.0,
    "omega": 0.75,
    "epsilon": 0.1,
    "terms": 150,
}


def cmd_attractor(args, file_cfg) -> list[Path]:
    cfg = _resolve(_ATTRACTOR_DEFAULTS, file_cfg, args)
    if cfg["model"] not in ("bishop-quadratic", "bishop-cubic"):
        raise ConfigError("attractor needs bishop-quadratic or bishop-cubic")
    from .fourier import compute_attractor, convergence_report
    from .models import Forcing, ModelSpec

    spec = ModelSpec(cfg["model"], k=1.0, h=cfg["mu"], epsilon=cfg["epsilon"],
                     forcing=Forcing(omega=cfg["omega"], f=cfg["f"], g=cfg["g"]))
    attractor = compute_attractor(spec, cfg["terms"])
    report = convergence_report(attractor)

    out = _out_dir(args)
    csv_path = out / "coefficients.csv"
    harmonics = attractor.harmonics()
    with open(csv_path, "w", newline="") as fh:
        fh.write("k,harmonic,re_B,im_B,abs_B\n")
        for idx, b in enumerate(attractor.coefficients):
            fh.write(
                f"{idx},{int(harmonics[idx])},"
                f"{float(b.real)!r},{float(b.imag)!r},{float(abs(b))!r}\n"
            )
    report_path = out / "convergence.json"
    payload = report.to_dict()
    payload["max_abs_residual_one_period"] = attractor.max_residual(attractor.period)
    with open(report_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, report_path]


# ---------------------------------------------------------------- response

_RESPONSE_DEFAULTS = {
    "model": "bishop-quadratic",
    "mu_list": "0.2,0.5",
    "epsilon_list": "0,0.05",
    "k_list": "0.5,1",
    "c": 0.2,
    "f": 1.0,
    "g": 0.0,
    "r_min": 0.05,
    "r_max": 3.0,
    "samples": 400,
    "method": "auto",
    "terms": 150,
    "transient_periods": 120,
}


def cmd_response(args, file_cfg) -> list[Path]:
    cfg = _resolve(_RESPONSE_DEFAULTS, file_cfg, args)
    import numpy as np

    from .models import Forcing, ModelSpec
    from .response import response_sweep

    eps_values = _float_list(cfg["epsilon_list"])
    out = _out_dir(args)
    outputs: list[Path] = []
    combos = []
    if cfg["model"].startswith("bishop"):
        for mu in _float_list(cfg["mu_list"]):
            for eps in eps_values:
                spec = ModelSpec(cfg["model"], k=1.0, h=mu, epsilon=eps,
                                 forcing=Forcing(omega=1.0, f=cfg["f"], g=cfg["g"]))
                combos.append((("mu", mu), ("epsilon", eps), spec))
    else:
        for k in _float_list(cfg["k_list"]):
            for eps in eps_values:
                spec = ModelSpec(cfg["model"], k=k, c=cfg["c"], epsilon=eps,
                                 forcing=Forcing(omega=1.0, f=cfg["f"], g=cfg["g"]))
                combos.append((("k", k), ("epsilon", eps), spec))

    long_rows: list[str] = []
    tag_names = [combos[0][0][0], "epsilon"]
    for (name1, val1), (name2, val2), spec in combos:
        omegas = np.geomspace(cfg["r_min"], cfg["r_max"], int(cfg["samples"])) * spec.omega1
        curve = response_sweep(
            spec, omegas=omegas, method=cfg["method"], n_terms=int(cfg["terms"]),
            transient_periods=int(cfg["transient_periods"]),
        )
        path = out / f"response_{name1}{_tag(val1)}_eps{_tag(val2)}.csv"
        curve.to_csv(path)
        outputs.append(path)
        for p in curve.points:
            long_rows.append(
                f"{val1!r},{val2!r},{p.omega!r},{p.r!r},{p.n!r},{p.eta!r},"
                f"{p.n_fundamental!r},{p.source}"
            )
    combined = out / "response_all.csv"
    with open(combined, "w", newline="") as fh:
        fh.write(f"{tag_names[0]},epsilon,omega,r,n,eta,n_fundamental,source\n")
        fh.write("\n".join(long_rows) + "\n")
    outputs.append(combined)
    return outputs


# ---------------------------------------------------------------- escape

_ESCAPE_DEFAULTS = {
    "epsilon_list": "0.05,0.1,0.2,0.3",
    "omega_list": "0.8,1.2",
    "mu_list": "0.1,0.4",
    "f_hi": 20.0,
    "tol": 1e-3,
    "horizon_periods": 500,
}


def cmd_escape(args, file_cfg) -> list[Path]:
    cfg = _resolve(_ESCAPE_DEFAULTS, file_cfg, args)
    from .response import EscapeSearchConfig, critical_amplitude

    search = EscapeSearchConfig(f_hi=cfg["f_hi"], tol=cfg["tol"],
                                horizon_periods=int(cfg["horizon_periods"]))
    out = _out_dir(args)
    path = out / "escape.csv"
    with open(path, "w", newline="") as fh:
        fh.write("epsilon,omega,mu,F_c,bracket\n")
        for omega in _float_list(cfg["omega_list"]):
            for mu in _float_list(cfg["mu_list"]):
                for eps in _float_list(cfg["epsilon_list"]):
                    result = critical_amplitude(eps, omega, mu, search)
                    fh.write(result.csv_row() + "\n")
    return [path]


# ---------------------------------------------------------------- basin

_BASIN_DEFAULTS = {
    "model": "reid-cubic",
    "c": 0.01,
    "k": 0.3,
    "f": 1.1,
    "omega": 1.3,
    "epsilon": 0.1,
    "x_min": -3.0,
    "x_max": 3.0,
    "v_min": -3.0,
    "v_max": 1.0,
    "nx": 200,
    "ny": 200,
    "paper_scale": False,
    "transient": 1500,
    "confirm": 20,
    "p_max": 12,
    "rho": 1e-4,
    "rtol": 1e-9,
    "atol": 1e-12,
}


def cmd_basin(args, file_cfg) -> list[Path]:
    cfg = _resolve(_BASIN_DEFAULTS, file_cfg, args)
    from .basins import ClassifyConfig, GridConfig, build_basin
    from .models import Forcing, ModelSpec

    nx, ny = int(cfg["nx"]), int(cfg["ny"])
    if cfg["paper_scale"]:
        nx = ny = 500
    spec = ModelSpec(cfg["model"], k=cfg["k"], c=cfg["c"], epsilon=cfg["epsilon"],
                     forcing=Forcing(omega=cfg["omega"], f=cfg["f"]))
    grid = GridConfig(x_range=(cfg["x_min"], cfg["x_max"]),
                      v_range=(cfg["v_min"], cfg["v_max"]), nx=nx, ny=ny)
    ccfg = ClassifyConfig(transient_strobes=int(cfg["transient"]),
                          confirm_strobes=int(cfg["confirm"]),
                          p_max=int(cfg["p_max"]), rho=cfg["rho"],
                          rtol=cfg["rtol"], atol=cfg["atol"])
    basin = build_basin(spec, grid, ccfg)

    out = _out_dir(args)
    csv_path = out / "basin.csv"
    basin.to_csv(csv_path)
    catalog_path = out / "catalog.json"
    basin.to_catalog_json(catalog_path)
    pgm_path = out / "basin.pgm"
    basin.to_pgm(pgm_path)
    return [csv_path, catalog_path, pgm_path]


# ---------------------------------------------------------------- blowup

_BLOWUP_DEFAULTS = {
    "mu_list": "0.02,0.05,0.1,0.2,0.5",
    "rtol_list": "1e-6,1e-8,1e-10,1e-12",
    "f": 0.5,
    "g": 0.5,
    "omega": 0.5,
    "alpha": 10.5,
    "theta": 0.3,
    "t_end": 6000.0,
    "threshold": 1.0,
}


def cmd_blowup(args, file_cfg) -> list[Path]:
    cfg = _resolve(_BLOWUP_DEFAULTS, file_cfg, args)
    import numpy as np

    from .integrate import IntegratorConfig, ModalState, measure_blowup_time
    from .models import Forcing, ModelSpec

    mus = _float_list(cfg["mu_list"])
    rtols = _float_list(cfg["rtol_list"])
    initial = ModalState(cfg["alpha"], cfg["theta"])
    out = _out_dir(args)
    csv_path = out / "blowup.csv"
    table: dict[float, dict[float, float | None]] = {}
    with open(csv_path, "w", newline="") as fh:
        fh.write("mu,rtol,t_d\n")
        for mu in mus:
            spec = ModelSpec("bishop-linear", k=1.0, h=mu,
                             forcing=Forcing(omega=cfg["omega"], f=cfg["f"], g=cfg["g"]))
            for rtol in rtols:
                icfg = IntegratorConfig(t_end=cfg["t_end"], dt_out=1.0,
                                        rtol=rtol, atol=rtol * 1e-3)
                t_d = measure_blowup_time(spec, initial, icfg,
                                          threshold=cfg["threshold"])
                table.setdefault(rtol, {})[mu] = t_d
                fh.write(f"{mu!r},{rtol!r},{'' if t_d is None else repr(t_d)}\n")

    fits = {}
    for rtol, per_mu in table.items():
        pts = [(mu, td) for mu, td in per_mu.items() if td is not None and mu > 0]
        if len(pts) >= 2:
            lx = np.log([p[0] for p in pts])
            ly = np.log([p[1] for p in pts])
            slope, intercept = np.polyfit(lx, ly, 1)
            pred = slope * lx + intercept
            ss_res = float(np.sum((ly - pred) ** 2))
            ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
            fits[repr(rtol)] = {
                "exponent": float(slope),
                "r_squared": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0,
                "n_points": len(pts),
            }
    fit_path = out / "blowup_fit.json"
    with open(fit_path, "w") as fh:
        json.dump(fits, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, fit_path]


# ---------------------------------------------------------------- parser

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with config keys (flags override)")
    sub.add_argument("--out-dir", help="output directory (default current)")
    sub.add_argument("--threads", type=int,
                     help="cap compiled-kernel worker threads")
    sub.add_argument("--seed", type=int,
                     help="reserved; all computations are deterministic")


def _num(sub, *names, **kw):
    for name in names:
        sub.add_argument(name, type=float, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hystlab",
        description="Forced oscillators with hysteretic damping: "
                    "simulations, attractors, response curves, escape "
                    "thresholds, basins, and blow-up diagnostics.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sim = subs.add_parser("simulate", help="integrate one trajectory")
    _add_common(sim)
    sim.add_argument("--model", choices=(
        "bishop-linear", "bishop-quadratic", "bishop-cubic",
        "reid-linear", "reid-cubic"))
    _num(sim, "--mass", "--k", "--h", "--c", "--epsilon", "--f", "--g",
         "--omega", "--alpha", "--theta", "--x0", "--v0",
         "--t-end", "--dt-out", "--rtol", "--atol", "--x-max")
    sim.add_argument("--events", action="store_true", default=None,
                     help="record zero-crossing events (sign-damping only)")

    att = subs.add_parser("attractor", help="periodic-response Fourier table")
    _add_common(att)
    att.add_argument("--model", choices=("bishop-quadratic", "bishop-cubic"))
    _num(att, "--mu", "--f", "--g", "--omega", "--epsilon")
    att.add_argument("--terms", type=int)

    rsp = subs.add_parser("response", help="amplitude/phase response sweep")
    _add_common(rsp)
    rsp.add_argument("--model", choices=(
        "bishop-linear", "bishop-quadratic", "bishop-cubic",
        "reid-linear", "reid-cubic"))
    rsp.add_argument("--mu-list")
    rsp.add_argument("--epsilon-list")
    rsp.add_argument("--k-list")
    _num(rsp, "--c", "--f", "--g", "--r-min", "--r-max")
    rsp.add_argument("--samples", type=int)
    rsp.add_argument("--method", choices=(
        "auto", "closed-form", "fourier-series", "time-integration"))
    rsp.add_argument("--terms", type=int)
    rsp.add_argument("--transient-periods", type=int)

    esc = subs.add_parser("escape", help="critical forcing amplitude scan")
    _add_common(esc)
    esc.add_argument("--epsilon-list")
    esc.add_argument("--omega-list")
    esc.add_argument("--mu-list")
    _num(esc, "--f-hi", "--tol")
    esc.add_argument("--horizon-periods", type=int)

    bas = subs.add_parser("basin", help="basin-of-attraction grid")
    _add_common(bas)
    bas.add_argument("--model", choices=("reid-linear", "reid-cubic"))
    _num(bas, "--c", "--k", "--f", "--omega", "--epsilon",
         "--x-min", "--x-max", "--v-min", "--v-max", "--rho",
         "--rtol", "--atol")
    bas.add_argument("--nx", type=int)
    bas.add_argument("--ny", type=int)
    bas.add_argument("--paper-scale", action="store_true", default=None,
                     help="500x500 grid; a long run")
    bas.add_argument("--transient", type=int)
    bas.add_argument("--confirm", type=int)
    bas.add_argument("--p-max", type=int)

    blw = subs.add_parser("blowup", help="t_d tolerance ladder and mu sweep")
    _add_common(blw)
    blw.add_argument("--mu-list")
    blw.add_argument("--rtol-list")
    _num(blw, "--f", "--g", "--omega", "--alpha", "--theta",
         "--t-end", "--threshold")

    return parser


_HANDLERS = {
    "simulate": cmd_simulate,
    "attractor": cmd_attractor,
    "response": cmd_response,
    "escape": cmd_escape,
    "basin": cmd_basin,
    "blowup": cmd_blowup,
}

_DEFAULTS = {
    "simulate": _SIMULATE_DEFAULTS,
    "attractor": _ATTRACTOR_DEFAULTS,
    "response": _RESPONSE_DEFAULTS,
    "escape": _ESCAPE_DEFAULTS,
    "basin": _BASIN_DEFAULTS,
    "blowup": _BLOWUP_DEFAULTS,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return _EXIT_CONFIG
        # Must land before the compiled module is first imported.
        os.environ["NUMBA_NUM_THREADS"] = str(args.threads)
    t0 = time.time()
    try:
        file_cfg = _load_config_file(args.config) if args.config else {}
        handler = _HANDLERS[args.subcommand]
        outputs = handler(args, file_cfg)
        resolved = _resolve(_DEFAULTS[args.subcommand], file_cfg, args)
        if args.seed is not None:
            resolved["seed"] = args.seed
        manifest = _write_manifest(_out_dir(args), args.subcommand, resolved,
                                   outputs, t0)
        for path in outputs + [manifest]:
            print(path)
        return _EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - map library failures to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
