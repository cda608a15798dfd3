"""Line-oriented experiment configuration: `key = value` under `[section]`.

Unknown keys and duplicate keys are hard errors (duplicates name both lines);
all values are validated against module preconditions before anything runs.
"""

from dataclasses import dataclass, field

from .errors import ConfigError
from .params import ModelParams

COMMANDS = (
    "eig",
    "groundstate",
    "minimize",
    "classify",
    "evolve",
    "critical-sweep",
    "uniqueness-check",
    "stability",
)

# key -> (section, type, default or None when required)
_MODEL_KEYS = {
    "d": ("model", int, None),
    "sigma": ("model", float, None),
    "alpha": ("model", float, 1.0),
    "coupling": ("model", float, 1.0),
}
_GRID_KEYS = {
    "n": ("grid", int, 16384),
    "r_max": ("grid", float, 40.0),
}
_RUN_KEYS = {
    "eig": {},
    "groundstate": {
        "omega": ("run", float, None),
        "method": ("run", str, "both"),  # shooting | descent | both
    },
    "minimize": {"a": ("run", float, None)},
    "classify": {"omega": ("run", float, None)},
    "evolve": {
        "omega": ("run", float, None),
        "scale": ("run", float, 1.2),
        "amplitude": ("run", float, 1.0),
        "dt": ("run", float, 0.0),  # 0 -> h^2/2
        "T": ("run", float, 10.0),
        "records": ("run", int, 200),
    },
    "critical-sweep": {
        "fractions": ("run", str, "0.8,0.9,0.95,0.975,0.99,0.995,0.9975,0.999"),
    },
    "uniqueness-check": {
        "omega": ("run", float, 1.0),
        "c": ("run", float, 1.0),
    },
    "stability": {
        "a": ("run", float, None),
        "delta": ("run", float, 0.01),
        "T": ("run", float, 20.0),
        "trials": ("run", int, 5),
    },
}


@dataclass
class ExperimentConfig:
    command: str
    params: ModelParams
    n: int
    r_max: float
    knobs: dict
    out_dir: str = "."
    seed: int = 0
    threads: int = 1
    defaults_used: dict = field(default_factory=dict)

    def manifest_dict(self) -> dict:
        rec = {
            "command": self.command,
            "d": self.params.d,
            "sigma": self.params.sigma,
            "alpha": self.params.alpha,
            "coupling": self.params.coupling,
            "n": self.n,
            "r_max": self.r_max,
            "seed": self.seed,
        }
        rec.update({k: v for k, v in sorted(self.knobs.items())})
        return rec


def _allowed_keys(command: str) -> dict:
    allowed = {}
    allowed.update(_MODEL_KEYS)
    allowed.update(_GRID_KEYS)
    allowed.update(_RUN_KEYS[command])
    return allowed


def parse_config(text: str, command: str) -> ExperimentConfig:
    """Parse and fully validate; raises ConfigError naming the offending key."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    allowed = _allowed_keys(command)
    seen = {}  # key -> line number
    values = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("model", "grid", "run"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for command {command!r}")
        want_section = allowed[key][0]
        if section is not None and section != want_section:
            raise ConfigError(
                f"line {lineno}: key {key!r} belongs to section [{want_section}]"
            )
        if key in seen:
            raise ConfigError(
                f"duplicate key {key!r} on lines {seen[key]} and {lineno}"
            )
        seen[key] = lineno
        values[key] = val

    resolved = {}
    defaults_used = {}
    for key, (_, typ, default) in allowed.items():
        if key in values:
            try:
                resolved[key] = typ(values[key])
            except ValueError as exc:
                raise ConfigError(f"key {key!r}: cannot parse {values[key]!r} as {typ.__name__}") from exc
        elif default is not None:
            resolved[key] = default
            defaults_used[key] = default
        else:
            raise ConfigError(f"missing required key {key!r} for command {command!r}")

    try:
        params = ModelParams(
            d=resolved["d"],
            sigma=resolved["sigma"],
            alpha=resolved["alpha"],
            coupling=resolved["coupling"],
        )
    except Exception as exc:
        # name the offending key from the validation message
        msg = str(exc)
        for key in ("sigma", "alpha", "coupling", "d"):
            if key in msg:
                raise ConfigError(f"key {key!r}: {msg}") from exc
        raise ConfigError(msg) from exc

    n, r_max = resolved["n"], resolved["r_max"]
    if n < 16:
        raise ConfigError(f"key 'n': must be >= 16, got {n}")
    if r_max <= 0:
        raise ConfigError(f"key 'r_max': must be positive, got {r_max}")
    knobs = {
        k: v for k, v in resolved.items() if k not in ("d", "sigma", "alpha", "coupling", "n", "r_max")
    }
    _validate_knobs(command, knobs)
    return ExperimentConfig(
        command=command,
        params=params,
        n=n,
        r_max=r_max,
        knobs=knobs,
        defaults_used=defaults_used,
    )


def _validate_knobs(command: str, knobs: dict):
    def positive(key):
        if knobs[key] <= 0:
            raise ConfigError(f"key {key!r}: must be positive, got {knobs[key]}")

    if command in ("minimize", "stability"):
        positive("a")
    if command == "evolve":
        positive("T")
        positive("scale")
        if knobs["dt"] < 0:
            raise ConfigError(f"key 'dt': must be >= 0, got {knobs['dt']}")
    if command == "stability":
        positive("T")
        if knobs["trials"] < 1:
            raise ConfigError(f"key 'trials': must be >= 1, got {knobs['trials']}")
        if knobs["delta"] < 0:
            raise ConfigError(f"key 'delta': must be >= 0, got {knobs['delta']}")
    if command == "critical-sweep":
        try:
            fr = [float(x) for x in knobs["fractions"].split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"key 'fractions': {knobs['fractions']!r} is not a comma list") from exc
        if not fr or not all(0 < f < 1 for f in fr) or sorted(fr) != fr:
            raise ConfigError("key 'fractions': need an increasing list inside (0, 1)")
        knobs["fractions"] = fr
    if command == "uniqueness-check":
        positive("omega")
