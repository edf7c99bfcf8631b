"""Flat ``key = value`` configuration files.

One setting per line, keys are dotted (``lte.tail_energy``), ``#`` starts a
comment. The shipped ``defaults.cfg`` holds every model constant; user files
and overrides are layered on top of it.
"""

from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .energy_model.profiles import INTERFACES, PROFILE_FIELDS, RadioProfile
from .errors import ConfigError


def parse_kv(text, source="<string>"):
    """Parse flat key-value text into an ordered ``dict`` of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key] = value
    return out


def format_kv(mapping):
    return "".join(f"{k} = {v}\n" for k, v in mapping.items())


def read_kv(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_kv(text, source=str(path))


def _defaults_text():
    return resources.files("emptcp").joinpath("defaults.cfg").read_text()


@dataclass(frozen=True)
class Config:
    profiles: dict
    gamma_down: float
    gamma_up: float
    controller: object
    sim: object
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def gamma(self, direction):
        return self.gamma_down if direction == "down" else self.gamma_up


def _coerce_dataclass(cls, prefix, raw):
    instance = cls()
    updates = {}
    for f in fields(cls):
        key = f"{prefix}.{f.name}"
        if key not in raw:
            continue
        current = getattr(instance, f.name)
        value = raw[key]
        try:
            if isinstance(current, bool):
                updates[f.name] = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(current, int):
                updates[f.name] = int(float(value))
            elif isinstance(current, float):
                updates[f.name] = float(value)
            else:
                updates[f.name] = value
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
    return replace(instance, **updates)


def config_from_mapping(raw):
    from .controller import ControllerParams
    from .netsim.paths import SimParams

    profiles = {}
    for name in INTERFACES:
        values = {f: raw[f"{name}.{f}"] for f in PROFILE_FIELDS if f"{name}.{f}" in raw}
        if values:
            profiles[name] = RadioProfile.from_mapping(name, values)
    for required in ("wifi", "lte"):
        if required not in profiles:
            raise ConfigError(f"no profile for {required!r}")

    known_prefixes = set(INTERFACES) | {"gamma", "controller", "sim"}
    for key in raw:
        if key.split(".", 1)[0] not in known_prefixes:
            raise ConfigError(f"unknown configuration key {key!r}")

    try:
        gamma_down = float(raw["gamma.down"])
        gamma_up = float(raw["gamma.up"])
    except KeyError as exc:
        raise ConfigError(f"missing {exc.args[0]}") from None
    for g in (gamma_down, gamma_up):
        if not 0 < g <= 1:
            raise ConfigError(f"gamma must lie in (0, 1], got {g}")

    controller = _coerce_dataclass(ControllerParams, "controller", raw)
    sim = _coerce_dataclass(SimParams, "sim", raw)
    return Config(profiles=profiles, gamma_down=gamma_down, gamma_up=gamma_up,
                  controller=controller, sim=sim, raw=dict(raw))


def load_config(path=None, overrides=None):
    """Load the shipped defaults, then ``path`` (if given), then ``overrides``."""
    raw = parse_kv(_defaults_text(), source="defaults.cfg")
    if path is not None:
        raw.update(read_kv(path))
    if overrides:
        raw.update({k: str(v) for k, v in overrides.items()})
    return config_from_mapping(raw)


@lru_cache(maxsize=1)
def default_config():
    """The shipped defaults, parsed once."""
    return load_config()
