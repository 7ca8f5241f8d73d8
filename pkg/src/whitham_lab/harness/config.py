"""Run configuration: typed fields, per-experiment defaults, validation, hashing.

Configs are flat JSON objects. Unknown keys are rejected, and every
violated field is reported at once.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace

EXPERIMENTS = ("symbol-bounds", "decay", "strichartz", "evolve", "picard",
               "global-smalldata", "convergence")

# fields that do not influence numeric output
_UNHASHED = ("out",)


class ConfigError(ValueError):
    """Invalid configuration; `fields` names every offending key."""

    def __init__(self, problems):
        self.problems = dict(problems)
        self.fields = sorted(self.problems)
        lines = "; ".join(f"{k}: {v}" for k, v in sorted(self.problems.items()))
        super().__init__(f"invalid config ({lines})")


@dataclass(frozen=True)
class RunConfig:
    kind: str
    dim: int = 1
    # grid
    n: int = 512
    half_length: float = None
    # time stepping
    T: float = 10.0
    dt: float = None
    sample_every: int = 1
    levels: int = 3
    nonlinear: bool = True
    reproject: bool = False
    # initial data
    amplitude: float = 0.01
    profile: str = "gaussian"
    k_max: int = 8
    # sweeps
    lams: tuple = None
    ts: tuple = None
    s_values: tuple = (0.0, 1.0)
    # symbol scan
    r_min: float = 1e-3
    r_max: float = 1e3
    r_points: int = 400
    # dispersion
    tol: float = 1e-9
    density: float = 1.0
    q: float = 4.0
    r: float = None
    n_times: int = 129
    # picard
    iterations: int = 6
    # bookkeeping
    seed: int = 0
    out: str = "results"

    def __post_init__(self):
        problems = _validate(self)
        if problems:
            raise ConfigError(problems)

    @property
    def grid_half_length(self):
        if self.half_length is not None:
            return float(self.half_length)
        return 64 * math.pi if self.dim == 1 else 16 * math.pi


_DEFAULT_SWEEPS = {
    # absolute times all satisfy t >= 10 lam^{-1/2}; t lam^{1/2} >= 56 in 1d
    # and >= 80 in 2d keeps every sample in the asymptotic stationary regime
    ("decay", 1): dict(lams=(8, 16, 32, 64, 128), ts=(20.0, 30.0, 50.0, 80.0)),
    ("decay", 2): dict(lams=(4, 8, 16, 32), ts=(40.0, 60.0, 90.0, 135.0)),
    ("strichartz", 1): dict(lams=(8, 32, 128), ts=(354.0,), r=math.inf),
    ("strichartz", 2): dict(lams=(4, 8, 16, 32), ts=(10.0,), r=4.0),
}

_KIND_DEFAULTS = {
    "global-smalldata": dict(T=100.0, profile="random"),
    "picard": dict(n=256, half_length=32 * math.pi),
    "convergence": dict(dt=0.2, T=4.0, amplitude=0.1),
}


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _positive(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0 and x == x


def _validate(c):
    p = {}
    if c.kind not in EXPERIMENTS:
        p["kind"] = f"unknown experiment {c.kind!r}; expected one of {', '.join(EXPERIMENTS)}"
    if c.dim not in (1, 2) or isinstance(c.dim, bool):
        p["dim"] = "must be 1 or 2"
    if not (_is_int(c.n) and c.n >= 8 and c.n & (c.n - 1) == 0):
        p["n"] = "must be a power of two >= 8"
    if c.half_length is not None and not _positive(c.half_length):
        p["half_length"] = "must be positive"
    if not (_positive(c.T) or c.T == 0):
        p["T"] = "must be nonnegative"
    if c.dt is not None and not _positive(c.dt):
        p["dt"] = "must be positive"
    for name in ("sample_every", "iterations", "r_points", "k_max"):
        if not (_is_int(getattr(c, name)) and getattr(c, name) >= 1):
            p[name] = "must be a positive integer"
    if not (_is_int(c.levels) and c.levels >= 3):
        p["levels"] = "must be an integer >= 3"
    if not (_is_int(c.n_times) and c.n_times >= 3):
        p["n_times"] = "must be an integer >= 3"
    for name in ("amplitude", "tol", "density", "r_min", "r_max", "q"):
        if not _positive(getattr(c, name)):
            p[name] = "must be positive"
    if "r_min" not in p and "r_max" not in p and c.r_min >= c.r_max:
        p["r_max"] = "must exceed r_min"
    if c.r is not None and not (_positive(c.r)):
        p["r"] = "must be positive (inf allowed)"
    if c.profile not in ("gaussian", "random"):
        p["profile"] = "must be 'gaussian' or 'random'"
    for name in ("lams", "ts", "s_values"):
        val = getattr(c, name)
        if val is not None and (not isinstance(val, tuple) or len(val) == 0):
            p[name] = "must be a non-empty list"
    if c.lams is not None and "lams" not in p and any(not _positive(x) for x in c.lams):
        p["lams"] = "entries must be positive"
    if c.ts is not None and "ts" not in p and any(not _positive(x) for x in c.ts):
        p["ts"] = "entries must be positive"
    if not (_is_int(c.seed) and 0 <= c.seed < 2**64):
        p["seed"] = "must be an unsigned 64-bit integer"
    if not isinstance(c.out, str) or not c.out:
        p["out"] = "must be a non-empty path"
    return p


def _normalise(data):
    out = {}
    for k, v in data.items():
        if isinstance(v, list):
            v = tuple(v)
        if k == "r" and v == "inf":
            v = math.inf
        out[k] = v
    return out


def make_config(kind, **overrides):
    """Config for `kind` with per-experiment defaults, then `overrides`."""
    dim = overrides.get("dim", 1)
    base = dict(_KIND_DEFAULTS.get(kind, {}))
    base.update(_DEFAULT_SWEEPS.get((kind, dim), {}))
    base.update(_normalise(overrides))
    return RunConfig(kind=kind, **base)


def config_from_mapping(data, kind=None):
    data = dict(data)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError({k: "unknown field" for k in unknown})
    if kind is not None:
        data.setdefault("kind", kind)
    if "kind" not in data:
        raise ConfigError({"kind": "missing"})
    kind = data.pop("kind")
    return make_config(kind, **data)


def load_config(path, kind=None):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError({"<root>": "config must be a JSON object"})
    return config_from_mapping(data, kind)


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def config_dict(config):
    return {k: _jsonable(v) for k, v in asdict(config).items()}


def config_hash(config):
    """First 12 hex digits of the sha256 of the canonical JSON form."""
    d = {k: v for k, v in config_dict(config).items() if k not in _UNHASHED}
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def with_updates(config, **changes):
    return replace(config, **_normalise(changes))
