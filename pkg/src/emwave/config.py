"""Run configuration: a single JSON document with four sections.

Sections and defaults::

    grid:     {"L": 12.0, "n": 32, "ghost": 3}
    scheme:   {"cfl": 0.25, "sigma": 0.1, "order": 4,
               "boundary": "sommerfeld"}
    physics:  {"family": "flat", "eps": 1e-3, "radius": 2.0,
               "power": null, "moving": false, "gamma": 0.25, "mu": 0.25,
               "n_max": 2, "linearize": false, "freeze_h": false}
    schedule: {"t_end": 1.0, "diag_every": 10, "snap_every": 0}
    output:   "out"
    seed:     0

Keys may also be given flat at the top level (`{"family": "flat",
"n": 32, "t_end": 1}`); they are routed into their section.  Unknown
keys raise a configuration error listing every offender.  The fully
materialized configuration is echoed to the output directory at run
start so that every value any module read is on disk.
"""

import json
from dataclasses import asdict, dataclass, field

from .errors import ConfigError

_GRID_KEYS = {"L", "n", "ghost"}
_SCHEME_KEYS = {"cfl", "sigma", "order", "boundary"}
_PHYSICS_KEYS = {"family", "eps", "radius", "power", "moving",
                 "gamma", "mu", "n_max", "linearize", "freeze_h"}
_SCHEDULE_KEYS = {"t_end", "diag_every", "snap_every"}
_SECTIONS = {"grid": _GRID_KEYS, "scheme": _SCHEME_KEYS,
             "physics": _PHYSICS_KEYS, "schedule": _SCHEDULE_KEYS}
_TOP_KEYS = set(_SECTIONS) | {"output", "seed"}


@dataclass
class RunConfig:
    grid: dict = field(default_factory=dict)
    scheme: dict = field(default_factory=dict)
    physics: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    output: str = "out"
    seed: int = 0

    def to_dict(self):
        return asdict(self)


_DEFAULTS = {
    "grid": {"L": 12.0, "n": 32, "ghost": 3},
    "scheme": {"cfl": 0.25, "sigma": 0.1, "order": 4,
               "boundary": "sommerfeld"},
    "physics": {"family": "flat", "eps": 1e-3, "radius": 2.0, "power": None,
                "moving": False, "gamma": 0.25, "mu": 0.25, "n_max": 2,
                "linearize": False, "freeze_h": False},
    "schedule": {"t_end": 1.0, "diag_every": 10, "snap_every": 0},
}


def parse_config(doc):
    """Validate a configuration dictionary and materialize defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    sections = {name: dict(vals) for name, vals in _DEFAULTS.items()}
    unknown = []
    output = "out"
    seed = 0
    for key, value in doc.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be an object")
            for k, v in value.items():
                if k not in _SECTIONS[key]:
                    unknown.append(f"{key}.{k}")
                else:
                    sections[key][k] = v
        elif key == "output":
            output = value
        elif key == "seed":
            seed = value
        else:
            routed = False
            for name, keys in _SECTIONS.items():
                if key in keys:
                    sections[name][key] = value
                    routed = True
                    break
            if not routed:
                unknown.append(key)
    if unknown:
        raise ConfigError("unknown configuration keys: "
                          + ", ".join(sorted(unknown)))
    cfg = RunConfig(grid=sections["grid"], scheme=sections["scheme"],
                    physics=sections["physics"],
                    schedule=sections["schedule"],
                    output=str(output), seed=int(seed))
    _validate(cfg)
    return cfg


def _validate(cfg):
    g = cfg.grid
    if not (g["n"] >= 2 * g["ghost"] + 5):
        raise ConfigError(f"grid.n = {g['n']} too small for ghost width "
                          f"{g['ghost']}")
    if g["L"] <= 0:
        raise ConfigError("grid.L must be positive")
    s = cfg.scheme
    if not (0.0 < s["cfl"] < 1.0):
        raise ConfigError(f"scheme.cfl = {s['cfl']} outside (0, 1)")
    if not (0.0 <= s["sigma"] <= 1.0):
        raise ConfigError(f"scheme.sigma = {s['sigma']} outside [0, 1]")
    if s["order"] not in (2, 4):
        raise ConfigError(f"scheme.order = {s['order']} not in (2, 4)")
    if g["ghost"] < s["order"] // 2 + 1:
        raise ConfigError(
            f"grid.ghost = {g['ghost']} below dissipation radius "
            f"{s['order'] // 2 + 1}")
    if s["boundary"] not in ("sommerfeld", "periodic"):
        raise ConfigError(f"scheme.boundary {s['boundary']!r} unknown")
    p = cfg.physics
    for name in ("gamma", "mu"):
        if not (0.0 < p[name] < 0.5):
            raise ConfigError(
                f"physics.{name} = {p[name]} outside the open (0, 1/2)")
    if p["n_max"] not in (0, 1, 2):
        raise ConfigError(f"physics.n_max = {p['n_max']} not in 0..2")
    sc = cfg.schedule
    if sc["t_end"] <= 0:
        raise ConfigError("schedule.t_end must be positive")
    if sc["diag_every"] < 0 or sc["snap_every"] < 0:
        raise ConfigError("cadences must be nonnegative step counts")


def load_config(path):
    """Load and validate a JSON configuration file."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}")
    return parse_config(doc)


def echo_config(cfg, path):
    """Write the fully materialized configuration next to the outputs."""
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
