"""Transfer-cost power law and the composite two-interface energy model."""

import math
from dataclasses import dataclass

from ..errors import DomainError
from ..units import uj_to_j


def per_byte_cost(profile, direction, throughput):
    """Energy per transferred byte (uJ/byte) at ``throughput`` Mbps."""
    if not throughput > 0:
        raise DomainError(f"throughput must be > 0 Mbps, got {throughput}")
    alpha, beta = profile.coefficients(direction)
    return alpha * throughput ** beta


def single_path_energy(profile, direction, size, throughput, include_fixed=True):
    """Joules to move ``size`` bytes over one interface at ``throughput`` Mbps."""
    if size < 0:
        raise DomainError(f"size must be >= 0, got {size}")
    energy = uj_to_j(per_byte_cost(profile, direction, throughput) * size)
    if include_fixed:
        energy += profile.fixed_overhead
    return energy


def overlap_ratio(s_wifi, s_lte, b_wifi, b_lte):
    """Fraction of the transfer during which both interfaces are busy.

    Approximated from the per-path transfer durations as shorter/longer.
    Zero when exactly one path carries no bytes.
    """
    if not (b_wifi > 0 and b_lte > 0):
        raise DomainError("throughputs must be > 0")
    if s_wifi < 0 or s_lte < 0:
        raise DomainError("sizes must be >= 0")
    if s_wifi == 0 and s_lte == 0:
        raise DomainError("overlap ratio is undefined when both sizes are zero")
    t_wifi = s_wifi / b_wifi
    t_lte = s_lte / b_lte
    return min(t_wifi, t_lte) / max(t_wifi, t_lte)


@dataclass(frozen=True)
class TransferEstimate:
    s_wifi: float
    s_lte: float
    b_wifi: float
    b_lte: float
    gamma: float
    theta: float
    e_transfer: float
    e_total: float
    fixed_wifi: float = 0.0
    fixed_lte: float = 0.0

    def as_dict(self):
        return {
            "s_wifi": self.s_wifi,
            "s_lte": self.s_lte,
            "b_wifi": self.b_wifi,
            "b_lte": self.b_lte,
            "gamma": self.gamma,
            "theta": self.theta,
            "e_transfer": self.e_transfer,
            "e_total": self.e_total,
        }


def mptcp_energy(s_wifi, s_lte, b_wifi, b_lte, gamma, direction="down",
                 profiles=None, established=None):
    """Estimate MPTCP energy for a WiFi/LTE byte split.

    ``established`` names the interfaces whose subflow was opened; each pays
    its promotion+tail overhead once. By default an interface counts as
    established iff it carries at least one byte.
    """
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if profiles is None:
        from .profiles import default_profiles
        profiles = default_profiles()
    wifi, lte = profiles["wifi"], profiles["lte"]

    theta = overlap_ratio(s_wifi, s_lte, b_wifi, b_lte)
    raw_uj = (per_byte_cost(wifi, direction, b_wifi) * s_wifi
              + per_byte_cost(lte, direction, b_lte) * s_lte)
    e_transfer = uj_to_j(raw_uj) * (1 - theta + gamma * theta)

    if established is None:
        established = {name for name, s in (("wifi", s_wifi), ("lte", s_lte)) if s > 0}
    fixed_wifi = wifi.fixed_overhead if "wifi" in established else 0.0
    fixed_lte = lte.fixed_overhead if "lte" in established else 0.0
    return TransferEstimate(
        s_wifi=s_wifi, s_lte=s_lte, b_wifi=b_wifi, b_lte=b_lte, gamma=gamma,
        theta=theta, e_transfer=e_transfer,
        e_total=e_transfer + fixed_wifi + fixed_lte,
        fixed_wifi=fixed_wifi, fixed_lte=fixed_lte,
    )


def proportional_split(size, b_wifi, b_lte):
    """Split ``size`` bytes in proportion to throughput (equal durations)."""
    s_wifi = size * b_wifi / (b_wifi + b_lte)
    return s_wifi, size - s_wifi


def normalized_rmse(estimates, measurements):
    """Root-mean-square error divided by the mean measured value."""
    estimates = list(estimates)
    measurements = list(measurements)
    if len(estimates) != len(measurements):
        raise DomainError(f"length mismatch: {len(estimates)} estimates, "
                          f"{len(measurements)} measurements")
    if not measurements:
        raise DomainError("no data")
    mean = sum(measurements) / len(measurements)
    if not mean > 0:
        raise DomainError("mean of measurements must be > 0")
    mse = sum((e - m) ** 2 for e, m in zip(estimates, measurements)) / len(measurements)
    return math.sqrt(mse) / mean
