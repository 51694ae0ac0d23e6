"""Command-line interface.

Subcommands:
  run         execute a configured evolution, writing CSV/snapshots/SVG
              inputs into the output directory
  check-data  build the configured initial-data family and report its
              constraint and gauge residuals without evolving
  verify      run fast built-in self-checks of the core kernels
  plot        render columns of a diagnostic CSV to an SVG file

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.  The environment variable EMWAVE_OUTPUT overrides the
configured output directory.
"""

import argparse
import os
import sys

import numpy as np

from . import diagnostics, families, plotting, runner
from .config import load_config
from .errors import (BlowupError, ConfigError, DataError,
                     DegenerateMetricError, EmwaveError, FitError,
                     SnapshotError)
from .evolution import (Grid, PhysicsOptions, SchemeParams, new_state, step)
from .initialdata import (build_cauchy, divE_residual, gauge_residual_initial,
                          hamiltonian_residual, momentum_residual)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _output_dir(cfg, override):
    env = os.environ.get("EMWAVE_OUTPUT")
    return override or env or cfg.output


def cmd_run(args):
    cfg = load_config(args.config)
    res = runner.run(cfg, output_dir=_output_dir(cfg, args.output),
                     restart=args.restart)
    print(f"steps: {res.steps}")
    print(f"final time: {res.state.t:.6g}")
    print(f"termination: {res.termination}")
    print(f"output: {res.output}")
    return EXIT_OK if res.ok else EXIT_NUMERICAL


def cmd_check_data(args):
    cfg = load_config(args.config)
    grid = runner.build_grid(cfg)
    fam = cfg.physics["family"]
    data = families.make_data(fam, grid, **runner.family_params(cfg))
    data.validate()
    order = cfg.scheme["order"]
    ham = hamiltonian_residual(data, grid, order)
    mom = momentum_residual(data, grid, order)
    dive = divE_residual(data, grid, order)
    cauchy = build_cauchy(data, grid, order)
    gres = gauge_residual_initial(cauchy, grid, order,
                                  cfg.physics["gamma"], cfg.physics["mu"])
    phys = grid.physical
    print(f"family: {fam}   grid: n = {grid.n}, L = {grid.L:g}, "
          f"dx = {grid.dx:.4g}")
    print(f"hamiltonian residual sup : {np.abs(phys(ham)).max():.6e}")
    print(f"momentum residual sup    : {np.abs(phys(mom)).max():.6e}")
    print(f"div E residual sup       : {np.abs(phys(dive)).max():.6e}")
    print(f"wave-gauge residual sup  : {gres.wave_sup:.6e}")
    print(f"lorenz residual sup      : {gres.lorenz_sup:.6e}")
    return EXIT_OK


def _check_inverse_metric():
    from .tensors import invert_metric, sym_to_full, MINK
    rng = np.random.default_rng(7)
    h = 0.05 * rng.standard_normal((10, 40))
    inv = invert_metric(h)
    g = MINK[:, :, None] + sym_to_full(h)
    err = np.abs(np.einsum('ab...,bc...->ac...', inv.g, g)
                 - np.eye(4)[:, :, None]).max()
    return err, 1e-12


def _check_frame_norms():
    from .nullframe import FramePoint, frame_norm
    from .tensors import MINK
    pt = FramePoint(1.0, np.array([[3.0], [4.0], [0.0]]))
    m = MINK[:, :, None]
    lu = frame_norm(m, ("L", "U"), pt)
    ll = frame_norm(m, ("L", "L"), pt)
    err = max(abs(float(lu[0]) - np.sqrt(2.0)), float(ll[0]))
    return err, 1e-12


def _check_weight():
    w0, _ = diagnostics.decay_weight(np.array([0.0]), 0.25, 0.25)
    w1, _ = diagnostics.decay_weight(np.array([1.0]), 0.25, 0.25)
    wn, _ = diagnostics.decay_weight(np.array([-1.0]), 0.25, 0.25)
    err = max(abs(float(w0[0]) - 2.0),
              abs(float(w1[0]) - (1.0 + 2.0 ** 1.5)),
              abs(float(wn[0]) - (1.0 + 2.0 ** -0.5)))
    return err, 1e-13


def _check_flat_step():
    grid = Grid(4.0, 24)
    state = new_state(grid)
    params = SchemeParams()
    for _ in range(5):
        step(state, grid, params)
    return float(np.abs(state.u).max()), 1e-14


def _check_quadratic_null():
    """Parallel null plane waves in gauge must not source the potential."""
    from . import rhs
    from .tensors import SYM_PAIRS
    rng = np.random.default_rng(11)
    npts = 32
    om = np.where(rng.standard_normal(npts) > 0, 1.0, -1.0)
    kvec = np.zeros((4, npts))
    kvec[0] = 1.0
    kvec[1] = -om
    # potential amplitude obeying the divergence condition k^mu abar_mu = 0
    a = rng.standard_normal((3, npts))
    avec = np.zeros((4, npts))
    avec[0] = -om * a[0]
    avec[1:] = a
    # metric amplitude: traceless and transverse to the propagation vector
    p = np.zeros((4, npts))
    q = np.zeros((4, npts))
    p[2] = 1.0
    q[3] = 1.0
    c = rng.standard_normal((3, npts))
    hbar = (c[0] * (p[:, None] * q[None] + q[:, None] * p[None])
            + c[1] * (p[:, None] * p[None] - q[:, None] * q[None])
            + c[2] * kvec[:, None] * kvec[None])
    fp = rng.standard_normal(npts)
    h = np.zeros((10, npts))
    dh = np.stack([kvec[m] * np.stack([hbar[i, j] for i, j in SYM_PAIRS])
                   * fp for m in range(4)])
    dA = np.einsum('m...,n...->mn...', kvec, avec) * fp
    _, j = rhs.assemble_both(h, dh, dA)
    return float(np.abs(j).max()), 1e-13


_CHECKS = (
    ("inverse metric identity", _check_inverse_metric),
    ("null-frame component norms", _check_frame_norms),
    ("decay weight values", _check_weight),
    ("flat space stays flat", _check_flat_step),
    ("null structure of the potential source", _check_quadratic_null),
)


def cmd_verify(args):
    failed = 0
    for name, fn in _CHECKS:
        try:
            err, tol = fn()
            ok = err <= tol
        except EmwaveError as exc:
            err, tol, ok = float("nan"), 0.0, False
            print(f"FAIL  {name}: {exc}")
            failed += 1
            continue
        tag = "PASS" if ok else "FAIL"
        if not ok:
            failed += 1
        print(f"{tag}  {name}: error {err:.3e} (tolerance {tol:.1e})")
    if failed:
        print(f"{failed} of {len(_CHECKS)} checks failed")
        return EXIT_NUMERICAL
    print(f"all {len(_CHECKS)} checks passed")
    return EXIT_OK


def cmd_plot(args):
    guides = ()
    if args.guides:
        guides = plotting.decay_guides(args.gamma)
    logx = args.loglog or args.logx
    logy = args.loglog or args.logy
    plotting.plot_timeseries(
        args.csv, [c.strip() for c in args.columns.split(",") if c.strip()],
        args.out, x_column=args.x, logx=logx, logy=logy, guides=guides,
        title=args.title)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="emwave",
        description="Wave-gauge evolution of coupled metric and "
                    "electromagnetic perturbations")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a configured evolution")
    p.add_argument("config", help="JSON configuration file")
    p.add_argument("--output", help="output directory (overrides config)")
    p.add_argument("--restart", help="snapshot file to resume from")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check-data",
                       help="report initial-data residuals without evolving")
    p.add_argument("config", help="JSON configuration file")
    p.set_defaults(func=cmd_check_data)

    p = sub.add_parser("verify", help="run fast built-in self-checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render CSV columns to SVG")
    p.add_argument("csv", help="diagnostic CSV file")
    p.add_argument("--columns", required=True,
                   help="comma-separated column names to plot")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--x", default="t", help="column for the x axis")
    p.add_argument("--loglog", action="store_true")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--guides", action="store_true",
                   help="overlay decay-rate guide lines (log-log only)")
    p.add_argument("--gamma", type=float, default=0.25,
                   help="exterior weight exponent used for the guide slopes")
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowupError, DegenerateMetricError, DataError, FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SnapshotError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
