"""Throughput regions where using both interfaces saves energy.

Two maps are computed over (WiFi, LTE) throughput pairs:

* total mode: modeled energy of a whole download of a given size with both
  interfaces, normalised by the cheaper single-interface download (fixed
  promotion/tail overheads included on every term);
* per-byte mode: steady-state energy per byte with both interfaces,
  normalised by the cheaper single interface, without fixed overheads.

Both use a byte split proportional to throughput, so the two subflows finish
together (overlap ratio 1).
"""

import io
from dataclasses import dataclass

import numpy as np

from .energy_model.model import (
    mptcp_energy,
    per_byte_cost,
    proportional_split,
    single_path_energy,
)
from .errors import DomainError

WIFI_ONLY = "wifi_only"
LTE_ONLY = "lte_only"
BOTH = "both"
_TIE_ORDER = (WIFI_ONLY, LTE_ONLY, BOTH)

GRID_HEADER = "b_wifi_mbps,b_lte_mbps,ratio,label"


def _defaults(gamma, profiles, direction="down"):
    from .config import default_config

    cfg = default_config()
    if gamma is None:
        gamma = cfg.gamma(direction)
    if profiles is None:
        profiles = cfg.profiles
    return gamma, profiles


@dataclass(frozen=True)
class RegionQuery:
    b_wifi: float
    b_lte: float
    file_size: float = None
    gamma: float = None
    direction: str = "down"

    def __post_init__(self):
        if not (self.b_wifi > 0 and self.b_lte > 0):
            raise DomainError("throughputs must be > 0")


def _pick(costs):
    # ties resolve in _TIE_ORDER: WiFi first, then LTE, then both
    return min(_TIE_ORDER, key=lambda k: (costs[k], _TIE_ORDER.index(k)))


def total_energies(q, profiles=None):
    """Modeled joules of the three options for the download in ``q``."""
    gamma, profiles = _defaults(q.gamma, profiles, q.direction)
    if q.file_size is None or not q.file_size > 0:
        raise DomainError("total mode needs a file size > 0")
    s_w, s_l = proportional_split(q.file_size, q.b_wifi, q.b_lte)
    both = mptcp_energy(s_w, s_l, q.b_wifi, q.b_lte, gamma, q.direction,
                        profiles=profiles, established={"wifi", "lte"}).e_total
    return {
        WIFI_ONLY: single_path_energy(profiles["wifi"], q.direction, q.file_size, q.b_wifi, True),
        LTE_ONLY: single_path_energy(profiles["lte"], q.direction, q.file_size, q.b_lte, True),
        BOTH: both,
    }


def total_energy_ratio(q, profiles=None):
    e = total_energies(q, profiles)
    return e[BOTH] / min(e[WIFI_ONLY], e[LTE_ONLY])


def per_byte_costs(b_wifi, b_lte, gamma=None, direction="down", profiles=None):
    """Per-byte cost (uJ/byte) of WiFi only, LTE only and both interfaces."""
    gamma, profiles = _defaults(gamma, profiles, direction)
    if not (b_wifi > 0 and b_lte > 0):
        raise DomainError("throughputs must be > 0")
    p_w = per_byte_cost(profiles["wifi"], direction, b_wifi)
    p_l = per_byte_cost(profiles["lte"], direction, b_lte)
    both = gamma * (p_w * b_wifi + p_l * b_lte) / (b_wifi + b_lte)
    return {WIFI_ONLY: p_w, LTE_ONLY: p_l, BOTH: both}


def per_byte_ratio(b_wifi, b_lte, gamma=None, direction="down", profiles=None):
    c = per_byte_costs(b_wifi, b_lte, gamma, direction, profiles)
    return c[BOTH] / min(c[WIFI_ONLY], c[LTE_ONLY])


def wifi_only_region(b_wifi, b_lte, gamma=None, direction="down", profiles=None):
    """True when WiFi alone is at least as cheap per byte as both interfaces.

    This is the switch the controller uses between WiFi-only and both; LTE
    alone is never selected. Ties go to WiFi-only.
    """
    c = per_byte_costs(b_wifi, b_lte, gamma, direction, profiles)
    return c[WIFI_ONLY] <= c[BOTH]


@dataclass
class RegionGrid:
    """Dense map over WiFi (rows) x LTE (columns) throughputs."""

    b_wifi: np.ndarray
    b_lte: np.ndarray
    ratio: np.ndarray
    labels: np.ndarray
    mode: str = "per_byte"

    def region(self, label):
        return self.labels == label

    def to_csv(self):
        out = io.StringIO()
        out.write(GRID_HEADER + "\n")
        for i, bw in enumerate(self.b_wifi):
            for j, bl in enumerate(self.b_lte):
                out.write(f"{float(bw)!r},{float(bl)!r},{float(self.ratio[i, j])!r},{self.labels[i, j]}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text, mode="per_byte"):
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != GRID_HEADER:
            raise DomainError("not a region grid CSV")
        rows = [line.split(",") for line in lines[1:]]
        b_wifi = sorted({float(r[0]) for r in rows})
        b_lte = sorted({float(r[1]) for r in rows})
        wi = {v: i for i, v in enumerate(b_wifi)}
        li = {v: j for j, v in enumerate(b_lte)}
        ratio = np.full((len(b_wifi), len(b_lte)), np.nan)
        labels = np.empty((len(b_wifi), len(b_lte)), dtype=object)
        for r in rows:
            i, j = wi[float(r[0])], li[float(r[1])]
            ratio[i, j] = float(r[2])
            labels[i, j] = r[3].strip()
        return cls(np.array(b_wifi), np.array(b_lte), ratio, labels, mode)


def _axis(lo, hi, step):
    if not step > 0:
        raise DomainError(f"step must be > 0, got {step}")
    if not (lo > 0 and hi >= lo):
        raise DomainError(f"empty or non-positive range ({lo}, {hi})")
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def export_grid(wifi_range=(0.25, 20.0), lte_range=(0.25, 20.0), step=0.25,
                mode="per_byte", file_size=None, gamma=None, direction="down",
                profiles=None):
    """Evaluate the ratio and best option at every grid cell."""
    if mode not in ("per_byte", "total"):
        raise DomainError(f"unknown mode {mode!r}")
    gamma, profiles = _defaults(gamma, profiles, direction)
    b_wifi = _axis(*wifi_range, step)
    b_lte = _axis(*lte_range, step)
    ratio = np.empty((len(b_wifi), len(b_lte)))
    labels = np.empty((len(b_wifi), len(b_lte)), dtype=object)
    for i, bw in enumerate(b_wifi):
        for j, bl in enumerate(b_lte):
            if mode == "total":
                costs = total_energies(RegionQuery(bw, bl, file_size, gamma, direction), profiles)
            else:
                costs = per_byte_costs(bw, bl, gamma, direction, profiles)
            ratio[i, j] = costs[BOTH] / min(costs[WIFI_ONLY], costs[LTE_ONLY])
            labels[i, j] = _pick(costs)
    return RegionGrid(b_wifi, b_lte, ratio, labels, mode)
