"""Fitting the per-byte power law and the sharing factor from measurements."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import FitError
from .model import mptcp_energy


@dataclass(frozen=True)
class MeasurementSample:
    """Per-byte energy measured at one achieved throughput."""

    direction: str
    interface: str
    throughput: float  # Mbps
    energy_per_byte: float  # uJ/byte

    def __post_init__(self):
        if not self.throughput > 0:
            raise FitError(f"throughput must be > 0, got {self.throughput}")
        if not self.energy_per_byte > 0:
            raise FitError(f"energy_per_byte must be > 0, got {self.energy_per_byte}")


@dataclass(frozen=True)
class GammaRun:
    """One measured MPTCP transfer: byte split, throughputs and total joules."""

    s_wifi: float
    s_lte: float
    b_wifi: float
    b_lte: float
    total_j: float

    def __post_init__(self):
        if not (self.b_wifi > 0 and self.b_lte > 0):
            raise FitError("throughputs must be > 0")
        if not self.total_j > 0:
            raise FitError("total energy must be > 0")


def fit_power_law(samples):
    """Least-squares fit of log P = log alpha + beta log B. Returns (alpha, beta)."""
    b = np.array([s.throughput for s in samples], dtype=float)
    p = np.array([s.energy_per_byte for s in samples], dtype=float)
    if len(np.unique(b)) < 2:
        raise FitError("need at least 2 samples with distinct throughputs")
    beta, log_alpha = np.polyfit(np.log(b), np.log(p), 1)
    return float(np.exp(log_alpha)), float(beta)


def power_law_diagnostics(samples, alpha, beta):
    """R^2 and residual RMS of a power-law fit, both in log space."""
    lb = np.log([s.throughput for s in samples])
    lp = np.log([s.energy_per_byte for s in samples])
    resid = lp - (np.log(alpha) + beta * lb)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((lp - lp.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return r2, float(np.sqrt(np.mean(resid ** 2)))


def _gamma_terms(runs, direction, profiles):
    # E_M is affine in gamma: E = fixed + raw * (1 - theta) + raw * theta * gamma
    const, slope = [], []
    for r in runs:
        at_one = mptcp_energy(r.s_wifi, r.s_lte, r.b_wifi, r.b_lte, 1.0, direction,
                              profiles=profiles, established={"wifi", "lte"})
        raw = at_one.e_transfer
        fixed = at_one.e_total - raw
        const.append(fixed + raw * (1 - at_one.theta))
        slope.append(raw * at_one.theta)
    return np.array(const), np.array(slope)


def gamma_mse_curve(runs, direction="down", profiles=None, grid=None):
    """Mean square error between model and measurement over a gamma grid."""
    runs = list(runs)
    if not runs:
        raise FitError("no runs to fit")
    if grid is None:
        grid = np.arange(1, 10001) * 1e-4
    const, slope = _gamma_terms(runs, direction, profiles)
    measured = np.array([r.total_j for r in runs])
    est = const[None, :] + slope[None, :] * np.asarray(grid)[:, None]
    return np.asarray(grid), np.mean((est - measured[None, :]) ** 2, axis=1)


def fit_gamma(runs, direction="down", profiles=None):
    """Sharing factor in (0, 1] minimising the MSE against measured totals.

    A 1e-4 grid locates the minimum, then a bounded scalar search refines it
    inside the neighbouring grid cells.
    """
    runs = list(runs)
    if not runs:
        raise FitError("no runs to fit")
    grid, mse = gamma_mse_curve(runs, direction, profiles)
    i = int(np.argmin(mse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    if hi <= lo:
        return float(grid[i])
    const, slope = _gamma_terms(runs, direction, profiles)
    measured = np.array([r.total_j for r in runs])

    def objective(g):
        return float(np.mean((const + slope * g - measured) ** 2))

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-8})
    best = float(res.x) if objective(res.x) <= mse[i] else float(grid[i])
    return min(max(best, 1e-4), 1.0)


POWER_LAW_HEADER = ["direction", "interface", "throughput_mbps", "energy_per_byte_uj"]
GAMMA_HEADER = ["direction", "s_wifi", "s_lte", "b_wifi", "b_lte", "total_j"]


def read_measurements(path):
    """Read a measurement CSV in either supported layout.

    Returns ``("power_law", [MeasurementSample])`` or
    ``("gamma", [(direction, GammaRun)])``. Errors carry the file row number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FitError(f"{path}: empty file") from None
        if header == POWER_LAW_HEADER:
            kind = "power_law"
        elif header == GAMMA_HEADER:
            kind = "gamma"
        else:
            raise FitError(f"{path}:1: unrecognised header {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FitError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                direction = row[0].strip()
                if direction not in ("up", "down"):
                    raise ValueError(f"direction must be up or down, got {direction!r}")
                if kind == "power_law":
                    rows.append(MeasurementSample(direction, row[1].strip(),
                                                  float(row[2]), float(row[3])))
                else:
                    vals = [float(c) for c in row[1:]]
                    rows.append((direction, GammaRun(*vals)))
            except (ValueError, FitError) as exc:
                raise FitError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FitError(f"{path}: no data rows")
    return kind, rows
