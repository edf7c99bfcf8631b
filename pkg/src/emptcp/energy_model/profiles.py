"""Radio power profiles: promotion/tail overheads and per-byte cost coefficients."""

from dataclasses import dataclass

from ..errors import ConfigError

INTERFACES = ("wifi", "lte", "hsdpa")
DIRECTIONS = ("down", "up")

PROFILE_FIELDS = (
    "promotion_duration",
    "promotion_energy",
    "tail_duration",
    "tail_energy",
    "alpha_down",
    "beta_down",
    "alpha_up",
    "beta_up",
)


@dataclass(frozen=True)
class RadioProfile:
    """Fixed-overhead and transfer-cost parameters of one interface.

    Durations are in seconds and energies in joules. ``alpha_*`` is the
    per-byte cost in uJ/byte at 1 Mbps and ``beta_*`` the power-law exponent.
    """

    name: str
    promotion_duration: float
    promotion_energy: float
    tail_duration: float
    tail_energy: float
    alpha_down: float
    beta_down: float
    alpha_up: float
    beta_up: float

    def __post_init__(self):
        for field in ("promotion_duration", "promotion_energy", "tail_duration",
                      "tail_energy", "alpha_down", "alpha_up"):
            value = getattr(self, field)
            if not value > 0:
                raise ConfigError(f"{self.name}.{field} must be > 0, got {value}")
        for field in ("beta_down", "beta_up"):
            value = getattr(self, field)
            if not value < 0:
                raise ConfigError(f"{self.name}.{field} must be < 0, got {value}")

    @property
    def fixed_overhead(self):
        return self.promotion_energy + self.tail_energy

    def coefficients(self, direction):
        if direction == "down":
            return self.alpha_down, self.beta_down
        if direction == "up":
            return self.alpha_up, self.beta_up
        raise ValueError(f"unknown direction {direction!r}")

    @classmethod
    def from_mapping(cls, name, values):
        missing = [f for f in PROFILE_FIELDS if f not in values]
        if missing:
            raise ConfigError(f"profile {name!r} missing fields: {', '.join(missing)}")
        try:
            kwargs = {f: float(values[f]) for f in PROFILE_FIELDS}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"profile {name!r}: {exc}") from None
        return cls(name=name, **kwargs)


def default_profiles():
    """Profiles shipped with the package (see ``defaults.cfg``)."""
    from ..config import default_config

    return dict(default_config().profiles)
