"""Batch orchestration: build initial data, evolve, persist artifacts.

A run directory contains:

  diagnostics.csv   one row per snapshot, columns
                    t,M,E,P,I,H,H_alt,moment_inertia,morawetz,
                    entropy_residual_norm,boundary_rho
  fields_XXXX.csv   optional field snapshots (x, sqrt_rho, Lambda, rho,
                    J, e, lambda), full double precision
  summary.json      conservation drifts, decay fits, GCP report,
                    lambda-measure atoms, report sections, config echo
  config.txt        canonical form of the configuration that produced
                    the run

Everything is deterministic: re-running a config reproduces the
artifacts byte for byte.
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qhdlab.config import ConfigError, RunConfig, parse_config_file
from qhdlab.decay import dispersive_suite
from qhdlab.functionals import (BOUNDARY_RHO_REL, DiagnosticsFrame,
                                conservation_report, diagnostics_frame,
                                entropy_residual, frame_from_state,
                                i_growth_check, morawetz_residual,
                                pseudo_conformal_check)
from qhdlab.grid import Grid
from qhdlab.lifting import gcp_check, lift_h2
from qhdlab.polar import HydroState, vacuum_mask
from qhdlab.solver import BlowupError, NlsParams, Trajectory, evolve
from qhdlab.vacuum import decompose_vacuum, lambda_measure

log = logging.getLogger(__name__)

SCHEMA_VERSION = "qhdlab-v1"
FIELD_COLUMNS = ("x", "sqrt_rho", "Lambda", "rho", "J", "e", "lambda")


def build_initial_psi(cfg: RunConfig, grid: Grid) -> np.ndarray:
    """Initial wave function; hydrodynamic data are lifted first."""
    ini = cfg.initial
    x = grid.x
    if ini.kind == "wavefunction":
        if ini.family == "gaussian":
            env = ini.amplitude * np.exp(-(((x - ini.center) / ini.width) ** 2))
            return env * np.exp(1j * ini.velocity * x)
        if ini.family == "plane_wave":
            k = ini.mode * np.pi / grid.half_length
            return ini.amplitude * np.exp(1j * k * x)
        if ini.family == "abs_x_bump":
            xc = x - ini.center
            return (ini.amplitude * np.abs(xc)
                    * np.exp(-0.5 * (xc / ini.width) ** 2)).astype(complex)
        return _read_psi_csv(ini.path, grid)
    h = build_initial_hydro(cfg, grid)
    return lift_h2(grid, h, cfg.params.gamma,
                   tau_rel=cfg.lifting.tau_rel, delta=cfg.lifting.delta,
                   conditioning_floor=cfg.lifting.conditioning_floor)


def build_initial_hydro(cfg: RunConfig, grid: Grid) -> HydroState:
    ini = cfg.initial
    x = grid.x
    if ini.family == "gaussian":
        xc = (x - ini.center) / ini.width
        sr = ini.amplitude * np.exp(-(xc**2))
        dsr = -2.0 * xc / ini.width * sr
        return HydroState(grid, sr, ini.velocity * sr, dsr)
    if ini.family == "plane_wave":
        k = ini.mode * np.pi / grid.half_length
        sr = np.full(grid.n_points, ini.amplitude)
        return HydroState(grid, sr, k * sr, np.zeros(grid.n_points))
    if ini.family == "abs_x_bump":
        xc = x - ini.center
        g = np.exp(-0.5 * (xc / ini.width) ** 2)
        sr = ini.amplitude * np.abs(xc) * g
        dsr = ini.amplitude * np.sign(xc) * (1.0 - (xc / ini.width) ** 2) * g
        return HydroState(grid, sr, np.zeros(grid.n_points), dsr)
    return _read_hydro_csv(ini.path, grid)


def _read_csv_columns(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def _grid_from_x(x: np.ndarray) -> Grid:
    dx = np.diff(x)
    if not np.allclose(dx, dx[0], rtol=1e-12, atol=1e-12):
        raise ConfigError(["initial.path: x samples are not equispaced"])
    L = -x[0]
    grid = Grid(float(L), len(x))
    if not np.allclose(grid.x, x, atol=1e-9 * max(1.0, L)):
        raise ConfigError(["initial.path: x samples do not form a [-L, L) grid"])
    return grid


def _read_psi_csv(path: str | Path, grid: Grid) -> np.ndarray:
    cols = _read_csv_columns(path)
    for need in ("x", "re_psi", "im_psi"):
        if need not in cols:
            raise ConfigError([f"initial.path: column {need!r} missing in {path}"])
    file_grid = _grid_from_x(cols["x"])
    if file_grid.n_points != grid.n_points or file_grid.half_length != grid.half_length:
        raise ConfigError([f"initial.path: grid in {path} does not match grid.L/grid.N"])
    return cols["re_psi"] + 1j * cols["im_psi"]


def _read_hydro_csv(path: str | Path, grid: Grid) -> HydroState:
    cols = _read_csv_columns(path)
    for need in ("x", "sqrt_rho", "Lambda"):
        if need not in cols:
            raise ConfigError([f"initial.path: column {need!r} missing in {path}"])
    file_grid = _grid_from_x(cols["x"])
    if file_grid.n_points != grid.n_points or file_grid.half_length != grid.half_length:
        raise ConfigError([f"initial.path: grid in {path} does not match grid.L/grid.N"])
    dsr = cols.get("dx_sqrt_rho")
    return HydroState.from_fields(grid, cols["sqrt_rho"], cols["Lambda"], dsr)


@dataclass
class RunArtifacts:
    out_dir: Path
    summary: dict
    frames: list[DiagnosticsFrame]
    trajectory: Trajectory | None


def _write_diagnostics_csv(path: Path, frames: list[DiagnosticsFrame]):
    with open(path, "w", newline="") as fh:
        fh.write(f"# {SCHEMA_VERSION} diagnostics\n")
        writer = csv.writer(fh)
        writer.writerow(DiagnosticsFrame.CSV_COLUMNS)
        for frame in frames:
            writer.writerow([f"{v:.17g}" for v in frame.row()])


def _write_fields_csv(path: Path, grid: Grid, h: HydroState, e: np.ndarray,
                      lam: np.ndarray, t: float):
    with open(path, "w", newline="") as fh:
        fh.write(f"# {SCHEMA_VERSION} fields\n")
        fh.write(f"# t = {t:.17g}\n")
        writer = csv.writer(fh)
        writer.writerow(FIELD_COLUMNS)
        for row in zip(grid.x, h.sqrt_rho, h.Lambda, h.rho, h.J, e, lam):
            writer.writerow([f"{v:.17g}" for v in row])


def run(cfg: RunConfig) -> RunArtifacts:
    """Execute one configuration and persist its artifacts.

    A mid-run blowup still produces partial artifacts, with an error
    record in summary.json (summary["status"] == "aborted").
    """
    out_dir = cfg.resolved_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.txt").write_text(cfg.canonical_text())

    grid = Grid(cfg.grid.L, cfg.grid.N)
    params = NlsParams(cfg.params.gamma, cfg.params.dt, cfg.params.t_end,
                       cfg.params.dealias)
    gamma = cfg.params.gamma
    tau = cfg.diagnostics.tau_rel
    psi0 = build_initial_psi(cfg, grid)

    summary: dict = {"schema": SCHEMA_VERSION, "status": "ok",
                     "config": cfg.as_dict()}
    error_record = None
    try:
        traj = evolve(grid, psi0, params, cfg.params.save_every)
    except BlowupError as err:
        traj = err.partial
        error_record = {"type": "blowup", "message": str(err),
                        "step": err.step, "t": err.time}
        summary["status"] = "aborted"

    frames: list[DiagnosticsFrame] = []
    snapshots = []
    frames_ok = True
    for t, psi in zip(traj.times, traj.states):
        try:
            frame, h, chem = diagnostics_frame(grid, psi, float(t), gamma, tau)
        except (ValueError, FloatingPointError):
            # overflowed snapshot (e.g. just before a blowup): keep the row
            frame = DiagnosticsFrame(float(t), *([float("nan")] * 10))
            h = chem = None
            frames_ok = False
        frames.append(frame)
        snapshots.append((h, chem))
    if not frames_ok and summary["status"] == "ok":
        summary["status"] = "aborted"
        error_record = error_record or {
            "type": "overflow", "message": "diagnostics overflowed"}

    if frames_ok and cfg.diagnostics.entropy and len(snapshots) >= 3:
        ent = entropy_residual(grid, snapshots, traj.times, gamma)
        for i, l2 in enumerate(ent.l2_norms):
            frames[i + 1].entropy_residual_norm = float(l2)
        summary["entropy"] = {"max_l1": float(np.max(ent.l1_norms)),
                              "max_l2": float(np.max(ent.l2_norms))}

    _write_diagnostics_csv(out_dir / "diagnostics.csv", frames)

    field_refs = {}
    if cfg.output.fields_every > 0 and frames_ok:
        for i, ((h, chem), t) in enumerate(zip(snapshots, traj.times)):
            if i % cfg.output.fields_every == 0 or i == len(snapshots) - 1:
                name = f"fields_{i:04d}.csv"
                from qhdlab.polar import energy_density
                _write_fields_csv(out_dir / name, grid, h,
                                  energy_density(h, gamma), chem.lam, float(t))
                field_refs[i] = name
    summary["field_snapshots"] = field_refs

    if frames_ok:
        summary["conservation"] = conservation_report(frames).as_dict()
        max_rho = max(float(np.max(h.rho)) for h, _ in snapshots)
        boundary_breach = None
        for frame in frames:
            if frame.boundary_rho > BOUNDARY_RHO_REL * max_rho:
                boundary_breach = frame.t
                break
        if boundary_breach is not None:
            warnings.warn(
                f"boundary density exceeded {BOUNDARY_RHO_REL:g} * max(rho) at "
                f"t = {boundary_breach:g}; x-weighted diagnostics are unreliable "
                "beyond that time (enlarge grid.L)", stacklevel=2)
        summary["boundary"] = {"breach_time": boundary_breach,
                               "max_boundary_rho": max(f.boundary_rho for f in frames)}

        diag = cfg.diagnostics
        if diag.gcp:
            summary["gcp"] = gcp_check(grid, snapshots[0][0], gamma, tau).as_dict()
        if diag.pseudo_conformal and len(traj) >= 2:
            summary["pseudo_conformal"] = pseudo_conformal_check(traj, gamma).as_dict()
        if diag.morawetz and len(traj) >= 3:
            summary["morawetz"] = morawetz_residual(traj, gamma).as_dict()
        if diag.i_growth and len(frames) >= 3 and frames[0].I > 0:
            summary["i_growth"] = i_growth_check(frames, gamma).as_dict()
        if diag.decay and len(traj) >= 3:
            summary["decay"] = dispersive_suite(traj, gamma, tau).as_dict()
        if diag.lambda_measure:
            summary["lambda_measure"] = {
                "t0": _measure_dict(grid, snapshots[0], gamma, tau, field_refs.get(0)),
                "final": _measure_dict(grid, snapshots[-1], gamma, tau,
                                       field_refs.get(len(snapshots) - 1)),
            }
    if error_record:
        summary["error"] = error_record

    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return RunArtifacts(out_dir, summary, frames, traj)


def _measure_dict(grid, snapshot, gamma, tau, csv_ref):
    h, chem = snapshot
    mask = vacuum_mask(h.sqrt_rho, tau)
    dec = decompose_vacuum(grid, h, mask, gamma)
    measure = lambda_measure(grid, h, chem, dec)
    return {"density_csv_ref": csv_ref,
            "atoms": [a.as_dict() for a in measure.atoms]}


def run_config_file(path: str | Path) -> RunArtifacts:
    return run(parse_config_file(path))


def _sweep_worker(path: str) -> dict:
    try:
        artifacts = run_config_file(path)
        return {"config": str(path), "dir": str(artifacts.out_dir),
                "status": artifacts.summary["status"]}
    except Exception as err:  # isolate per-run failures
        return {"config": str(path), "dir": None, "status": "failed",
                "error": f"{type(err).__name__}: {err}"}


def sweep(config_paths: list[str | Path], workers: int = 1) -> list[dict]:
    """Run many configs concurrently; failures are isolated per run.

    All configs are validated (and output collisions rejected) before
    any run starts.
    """
    configs = [parse_config_file(p) for p in config_paths]
    dirs = [str(c.resolved_output_dir()) for c in configs]
    dupes = {d for d in dirs if dirs.count(d) > 1}
    if dupes:
        raise ConfigError([f"output.dir: duplicated across sweep: {d}" for d in sorted(dupes)])
    if not configs:
        return []
    paths = [str(p) for p in config_paths]
    if workers <= 1:
        return [_sweep_worker(p) for p in paths]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_worker, paths))


def analyze(run_dir: str | Path) -> Path:
    """Recompute diagnostics from stored field snapshots.

    Reads every fields_XXXX.csv, rebuilds each frame from (sqrt_rho,
    Lambda) alone (the amplitude derivative is re-derived spectrally)
    and writes diagnostics_recomputed.csv alongside the original.
    """
    run_dir = Path(run_dir)
    field_files = sorted(run_dir.glob("fields_*.csv"))
    if not field_files:
        raise FileNotFoundError(f"no fields_*.csv in {run_dir} "
                                "(enable output.fields_every)")
    summary = json.loads((run_dir / "summary.json").read_text())
    gamma = summary["config"]["params"]["gamma"]
    tau = summary["config"]["diagnostics"]["tau_rel"]

    frames = []
    for path in field_files:
        t = None
        with open(path) as fh:
            for line in fh:
                if line.startswith("# t ="):
                    t = float(line.split("=", 1)[1])
                    break
        cols = _read_csv_columns(path)
        grid = _grid_from_x(cols["x"])
        h = HydroState.from_fields(grid, cols["sqrt_rho"], cols["Lambda"])
        frame, _, _ = frame_from_state(grid, h, vacuum_mask(h.sqrt_rho, tau),
                                       t, gamma)
        frames.append(frame)
    out = run_dir / "diagnostics_recomputed.csv"
    _write_diagnostics_csv(out, frames)
    return out
