"""Run orchestration: configuration -> initial data -> evolution loop with
diagnostic and snapshot cadences, CSV time series and termination record.

A run writes into its output directory:

  config.json   the fully materialized configuration actually used
  series.csv    one row per diagnostic time (see COLUMN layout below)
  shells.csv    shell-wise sup-norms, several rows per diagnostic time
  snap_*.emw    binary state snapshots at the snapshot cadence

Identical configurations (including the seed) produce byte-identical
CSV files.  A run can be restarted from any snapshot; the resumed
evolution matches an uninterrupted one to roundoff because snapshots
store the full first-order state bit-exactly.
"""

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics, families, snapshot, timeseries
from .config import RunConfig, echo_config
from .errors import BlowupError, ConfigError, DegenerateMetricError
from .evolution import (A_SLICE, H_SLICE, Grid, PhysicsOptions, SchemeParams,
                        StepController, new_state, step)
from .initialdata import build_cauchy

_FAMILY_DEFAULT_POWER = {"conformal": 8, "maxwell_packet": 8, "tt_pulse": 12}


def build_grid(cfg):
    g = cfg.grid
    return Grid(g["L"], g["n"], g["ghost"])


def build_scheme(cfg):
    s = cfg.scheme
    return SchemeParams(cfl=s["cfl"], sigma=s["sigma"], order=s["order"],
                        boundary=s["boundary"])


def build_physics(cfg):
    p = cfg.physics
    return PhysicsOptions(linearize=bool(p["linearize"]),
                          freeze_h=bool(p["freeze_h"]))


def family_params(cfg):
    """Keyword arguments for the configured initial-data family."""
    p = cfg.physics
    fam = p["family"]
    if fam == "flat":
        return {}
    kw = {"eps": p["eps"], "radius": p["radius"]}
    kw["power"] = (p["power"] if p["power"] is not None
                   else _FAMILY_DEFAULT_POWER.get(fam, 8))
    if fam == "tt_pulse":
        kw["moving"] = bool(p["moving"])
    return kw


def build_initial_state(cfg, grid, order=None):
    """Family data -> constraint-compatible Cauchy state on the grid."""
    fam = cfg.physics["family"]
    if fam == "flat":
        return new_state(grid)
    data = families.make_data(fam, grid, **family_params(cfg))
    order = cfg.scheme["order"] if order is None else order
    return build_cauchy(data, grid, order=order).to_state()


def series_columns(n_max):
    cols = ["t"]
    cols += [f"energy_{k}" for k in range(n_max + 1)]
    cols += ["flux", "gauge_wave_sup", "gauge_lorenz_sup",
             "gauge_wave_l2", "gauge_lorenz_l2",
             "frame_dH_TU", "frame_H_LT", "frame_ZH_LL",
             "frame_H_LT_ratio", "frame_ZH_LL_ratio",
             "sup_h", "sup_A", "terminated"]
    return cols


SHELL_COLUMNS = ["t", "q_center", "sup_h", "sup_A"]


@dataclass
class RunResult:
    grid: Grid
    state: object
    rows: list
    shells: list
    termination: str
    ok: bool
    output: str
    steps: int
    warnings: list = field(default_factory=list)


def _diagnostic_row(state, grid, params, physics, cfg, terminated):
    p = cfg.physics
    n_max = int(p["n_max"])
    erec = diagnostics.energy(state, grid, params, physics, N=n_max,
                              gamma=p["gamma"], mu=p["mu"], n_max=n_max)
    gres = diagnostics.gauge_monitors(state, grid, params.order,
                                      p["gamma"], p["mu"])
    fmon = diagnostics.frame_monitors(state, grid, params.order)
    hmag = np.abs(grid.physical(state.u[H_SLICE]))
    amag = np.abs(grid.physical(state.u[A_SLICE]))
    row = {"t": state.t, "flux": erec.flux,
           "gauge_wave_sup": gres.wave_sup,
           "gauge_lorenz_sup": gres.lorenz_sup,
           "gauge_wave_l2": gres.wave_l2,
           "gauge_lorenz_l2": gres.lorenz_l2,
           "frame_dH_TU": fmon.dH_TU, "frame_H_LT": fmon.H_LT,
           "frame_ZH_LL": fmon.ZH_LL,
           "frame_H_LT_ratio": fmon.H_LT_ratio,
           "frame_ZH_LL_ratio": fmon.ZH_LL_ratio,
           "sup_h": float(hmag.max()), "sup_A": float(amag.max()),
           "terminated": 1 if terminated else 0}
    for k in range(n_max + 1):
        row[f"energy_{k}"] = float(erec.levels[k])
    qc_h, sup_h = diagnostics.shell_sup(state.u[H_SLICE], grid, state.t)
    qc_a, sup_a = diagnostics.shell_sup(state.u[A_SLICE], grid, state.t)
    shell_rows = []
    by_q = {}
    for q, s in zip(qc_h, sup_h):
        by_q[float(q)] = [float(s), 0.0]
    for q, s in zip(qc_a, sup_a):
        by_q.setdefault(float(q), [0.0, 0.0])[1] = float(s)
    for q in sorted(by_q):
        shell_rows.append({"t": state.t, "q_center": q,
                           "sup_h": by_q[q][0], "sup_A": by_q[q][1]})
    return row, shell_rows


def run(cfg, output_dir=None, restart=None, progress=None):
    """Execute a configured run; returns a RunResult.

    output_dir overrides cfg.output; restart is the path of a snapshot to
    resume from; progress, if given, is called with (step, state) after
    every step.
    """
    if not isinstance(cfg, RunConfig):
        raise ConfigError("run() expects a parsed RunConfig")
    outdir = output_dir or cfg.output
    os.makedirs(outdir, exist_ok=True)
    echo_config(cfg, os.path.join(outdir, "config.json"))
    np.random.default_rng(cfg.seed)     # reserved for randomized families

    grid = build_grid(cfg)
    params = build_scheme(cfg)
    physics = build_physics(cfg)
    warns = []
    horizon = cfg.schedule["t_end"] + cfg.physics["radius"]
    if cfg.physics["family"] != "flat" and grid.L < horizon:
        msg = (f"box half-width L = {grid.L:g} is smaller than "
               f"t_end + pulse radius = {horizon:g}; outgoing signals will "
               f"reach the boundary before the run ends")
        warns.append(msg)
        warnings.warn(msg, stacklevel=2)

    if restart is not None:
        state, grid = snapshot.load_state(restart, grid)
    else:
        state = build_initial_state(cfg, grid)

    n_max = int(cfg.physics["n_max"])
    writer = timeseries.TimeseriesWriter(
        os.path.join(outdir, "series.csv"), series_columns(n_max))
    shell_writer = timeseries.TimeseriesWriter(
        os.path.join(outdir, "shells.csv"), SHELL_COLUMNS)

    diag_every = int(cfg.schedule["diag_every"])
    snap_every = int(cfg.schedule["snap_every"])
    t_end = float(cfg.schedule["t_end"])
    controller = StepController(grid, params, physics)

    rows = []
    shells = []

    def record(terminated):
        row, shell_rows = _diagnostic_row(state, grid, params, physics,
                                          cfg, terminated)
        rows.append(row)
        writer.write_row(row)
        for sr in shell_rows:
            shells.append(sr)
            shell_writer.write_row(sr)

    nstep = 0
    termination = "reached t_end"
    ok = True
    try:
        if restart is None or diag_every:
            record(False)
        if snap_every:
            snapshot.save_state(
                os.path.join(outdir, f"snap_{nstep:06d}.emw"), state, grid)
        while state.t < t_end - 1e-12:
            dt = controller.dt(state)
            if state.t + dt > t_end:
                dt = t_end - state.t
            step(state, grid, params, physics, dt=dt, controller=controller)
            nstep += 1
            if progress is not None:
                progress(nstep, state)
            done = state.t >= t_end - 1e-12
            if diag_every and nstep % diag_every == 0 and not done:
                record(False)
            if snap_every and (nstep % snap_every == 0 or done):
                snapshot.save_state(
                    os.path.join(outdir, f"snap_{nstep:06d}.emw"),
                    state, grid)
        record(True)
    except (BlowupError, DegenerateMetricError) as exc:
        termination = f"numerical failure: {exc}"
        ok = False
    finally:
        writer.finish(termination)
        shell_writer.finish(termination)
    return RunResult(grid=grid, state=state, rows=rows, shells=shells,
                     termination=termination, ok=ok, output=outdir,
                     steps=nstep, warnings=warns)
