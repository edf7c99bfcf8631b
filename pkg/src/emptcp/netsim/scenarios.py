"""Scenario definitions and their seeded bandwidth processes."""

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..config import format_kv, read_kv
from ..errors import ConfigError
from .processes import (
    PiecewiseConstant,
    exponential_epochs,
    jittered_constant,
    onoff_process,
    sum_processes,
)

STATIC = "static"
RANDOM_BW = "random_bw"
BACKGROUND_ONOFF = "background_onoff"
MOBILITY_TRACE = "mobility_trace"
KINDS = (STATIC, RANDOM_BW, BACKGROUND_ONOFF, MOBILITY_TRACE)

DEFAULT_DURATION_LIMIT = 3600.0
LTE_MEAN_MBPS = 12.0
LTE_JITTER = 0.2
LOW_WIFI_MBPS = 0.8
HIGH_WIFI_MBPS = 11.0

TRACE_HEADER = ["time_s", "wifi_bw_mbps", "lte_bw_mbps"]


@dataclass(frozen=True)
class Scenario:
    """What the network does during one run.

    ``file_size`` is None for fixed-duration runs, which then last
    ``duration_limit`` seconds. For fixed-size runs ``duration_limit`` is a
    timeout. ``seed`` determines every random draw.
    """

    kind: str
    file_size: int = None
    duration_limit: float = DEFAULT_DURATION_LIMIT
    seed: int = 0
    params: dict = field(default_factory=dict)
    name: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.file_size is not None and self.file_size < 0:
            raise ConfigError("file_size must be >= 0")
        if not self.duration_limit > 0:
            raise ConfigError("duration_limit must be > 0")

    @property
    def label(self):
        return self.name or self.kind

    def with_seed(self, seed):
        return Scenario(self.kind, self.file_size, self.duration_limit, seed,
                        dict(self.params), self.name)


@dataclass
class Environment:
    wifi: PiecewiseConstant
    lte: PiecewiseConstant
    interferers: PiecewiseConstant = None


def rng_streams(seed):
    """Independent generators for each stochastic component of a run."""
    names = ("wifi", "lte", "interferers", "loss")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(c) for n, c in zip(names, children)}


def make_static_scenario(wifi_mbps, lte_mbps=LTE_MEAN_MBPS, file_size=256 * 2**20,
                         seed=0, lte_jitter=LTE_JITTER, duration_limit=DEFAULT_DURATION_LIMIT):
    return Scenario(STATIC, file_size, duration_limit, seed,
                    {"wifi_mbps": wifi_mbps, "lte_mbps": lte_mbps, "lte_jitter": lte_jitter})


def make_random_bw_scenario(mean_interval_s=40.0, low_mbps=LOW_WIFI_MBPS,
                            high_mbps=HIGH_WIFI_MBPS, seed=0, file_size=256 * 2**20,
                            lte_mbps=LTE_MEAN_MBPS, lte_jitter=LTE_JITTER,
                            initial_level="random", duration_limit=DEFAULT_DURATION_LIMIT):
    """WiFi toggles between two achieved-TCP levels at exponential epochs."""
    if initial_level not in ("low", "high", "random"):
        raise ConfigError("initial_level must be low, high or random")
    return Scenario(RANDOM_BW, file_size, duration_limit, seed, {
        "mean_interval_s": mean_interval_s, "low_mbps": low_mbps, "high_mbps": high_mbps,
        "lte_mbps": lte_mbps, "lte_jitter": lte_jitter, "initial_level": initial_level,
    })


def make_background_onoff_scenario(n_interferers, lambda_on=0.05, lambda_off=0.025, seed=0,
                                   file_size=256 * 2**20, clean_mbps=HIGH_WIFI_MBPS,
                                   lte_mbps=LTE_MEAN_MBPS, lte_jitter=LTE_JITTER,
                                   duration_limit=DEFAULT_DURATION_LIMIT):
    """WiFi shared with ``n_interferers`` on/off background senders."""
    if n_interferers < 0:
        raise ConfigError("n_interferers must be >= 0")
    if not (lambda_on > 0 and lambda_off > 0):
        raise ConfigError("on/off rates must be > 0")
    return Scenario(BACKGROUND_ONOFF, file_size, duration_limit, seed, {
        "n_interferers": n_interferers, "lambda_on": lambda_on, "lambda_off": lambda_off,
        "clean_mbps": clean_mbps, "lte_mbps": lte_mbps, "lte_jitter": lte_jitter,
    })


def build_environment(scenario):
    """Materialise the bandwidth processes of ``scenario``."""
    p = scenario.params
    rngs = rng_streams(scenario.seed)
    horizon = scenario.duration_limit
    if scenario.kind == MOBILITY_TRACE:
        rows = p["trace"]
        times = [r[0] for r in rows]
        return Environment(PiecewiseConstant(times, [r[1] for r in rows]),
                           PiecewiseConstant(times, [r[2] for r in rows]))

    lte = jittered_constant(p.get("lte_mbps", LTE_MEAN_MBPS), p.get("lte_jitter", LTE_JITTER),
                            horizon, rngs["lte"])
    if scenario.kind == STATIC:
        return Environment(PiecewiseConstant.constant(p["wifi_mbps"]), lte)

    if scenario.kind == RANDOM_BW:
        rng = rngs["wifi"]
        level = p.get("initial_level", "random")
        high = bool(rng.random() < 0.5) if level == "random" else level == "high"
        times = exponential_epochs(p["mean_interval_s"], horizon, rng)
        values = []
        for _ in times:
            values.append(p["high_mbps"] if high else p["low_mbps"])
            high = not high
        return Environment(PiecewiseConstant(times, values), lte)

    n = int(p["n_interferers"])
    if n == 0:
        return Environment(PiecewiseConstant.constant(p["clean_mbps"]), lte,
                           PiecewiseConstant.constant(0))
    procs = [onoff_process(p["lambda_on"], p["lambda_off"], horizon, rngs["interferers"])
             for _ in range(n)]
    active = sum_processes(procs)
    clean = p["clean_mbps"]
    return Environment(active.map(lambda k: clean / (1 + k)), lte, active)


# -- traces ---------------------------------------------------------------

def parse_trace(text, source="<trace>"):
    """Rows ``(time_s, wifi_mbps, lte_mbps)`` from trace CSV text."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ConfigError(f"{source}: empty trace") from None
    if header != TRACE_HEADER:
        raise ConfigError(f"{source}:1: expected header {','.join(TRACE_HEADER)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ConfigError(f"{source}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            t, w, lte = (float(c) for c in row)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: non-numeric field in {row}") from None
        if w < 0 or lte < 0:
            raise ConfigError(f"{source}:{lineno}: negative bandwidth")
        if rows and t < rows[-1][0]:
            raise ConfigError(f"{source}:{lineno}: time decreases ({t} < {rows[-1][0]})")
        rows.append((t, w, lte))
    if not rows:
        raise ConfigError(f"{source}: empty trace")
    return rows


def format_trace(rows):
    out = io.StringIO()
    out.write(",".join(TRACE_HEADER) + "\n")
    for t, w, lte in rows:
        out.write(f"{t:g},{w:.6g},{lte:.6g}\n")
    return out.getvalue()


def load_mobility_trace(source, file_size=None, seed=0, name=None):
    """Scenario driven by a ``time_s,wifi_bw_mbps,lte_bw_mbps`` trace.

    ``source`` is a path, CSV text, or a list of row tuples. The run lasts
    until the last row's timestamp.
    """
    if isinstance(source, (list, tuple)):
        rows = parse_trace(format_trace(source))
    else:
        text = str(source)
        if "\n" not in text and Path(text).exists():
            rows = parse_trace(Path(text).read_text(), source=text)
        else:
            rows = parse_trace(text)
    duration = rows[-1][0]
    if not duration > 0:
        raise ConfigError("trace must span a positive duration")
    return Scenario(MOBILITY_TRACE, file_size, duration, seed, {"trace": rows}, name)


def make_mobility_trace(seed, duration=250.0, in_range_mbps=(12.0, 18.0),
                        degraded_mbps=(0.05, 0.5), lte_mbps=LTE_MEAN_MBPS,
                        lte_jitter=LTE_JITTER, first_window=(25.0, 40.0), ramp_s=3.0,
                        gap_s=(30.0, 60.0), window_s=(8.0, 18.0)):
    """Synthetic walk in and out of an access point's range.

    WiFi is strong inside range and collapses (still associated) in a few
    windows away from the AP, the first one at ``first_window``. One later
    window contains a short disassociation (bandwidth exactly 0).
    Rows are one per second.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    windows = [first_window]
    t = first_window[1]
    while True:
        start = t + rng.uniform(*gap_s)
        length = rng.uniform(*window_s)
        if start + length > duration - 5:
            break
        windows.append((start, start + length))
        t = start + length
    outage = None
    if len(windows) > 1:
        s, e = windows[1]
        mid = (s + e) / 2
        outage = (mid - 1.5, mid + 1.5)

    segment = 20.0
    levels = rng.uniform(*in_range_mbps, size=int(duration // segment) + 2)
    deep = rng.uniform(*degraded_mbps, size=len(windows))
    rows = []
    for sec in range(int(duration) + 1):
        ts = float(sec)
        good = levels[int(ts // segment)] * (1 + rng.uniform(-0.1, 0.1))
        wifi = good
        for k, (s, e) in enumerate(windows):
            if s - ramp_s <= ts < e + ramp_s:
                if s <= ts < e:
                    wifi = deep[k]
                else:
                    # geometric ramp between good and degraded levels
                    frac = (s - ts) / ramp_s if ts < s else (ts - e + 1) / ramp_s
                    frac = min(max(frac, 0.0), 1.0)
                    wifi = deep[k] ** (1 - frac) * good ** frac
        if outage and outage[0] <= ts < outage[1]:
            wifi = 0.0
        lte = lte_mbps * (1 + rng.uniform(-lte_jitter, lte_jitter))
        rows.append((ts, round(wifi, 6), round(lte, 6)))
    return rows


def make_mobility_scenario(seed, duration=250.0, **kwargs):
    return load_mobility_trace(make_mobility_trace(seed, duration, **kwargs), seed=seed,
                               name="mobility")


def make_degraded_trace(duration=150.0, good_mbps=12.0, degraded_mbps=0.2,
                        degraded=(30.0, 120.0), lte_mbps=LTE_MEAN_MBPS):
    """WiFi that drops to a poor but associated level for one long window."""
    rows = []
    for sec in range(int(duration) + 1):
        wifi = degraded_mbps if degraded[0] <= sec < degraded[1] else good_mbps
        rows.append((float(sec), wifi, lte_mbps))
    return rows


# -- scenario files -------------------------------------------------------

_COMMON = ("kind", "file_size_bytes", "duration_s", "seed", "name")


def scenario_from_mapping(raw, base_dir=None):
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"scenario kind must be one of {', '.join(KINDS)}")
    size = raw.get("file_size_bytes")
    file_size = None if size in (None, "", "none") else int(float(size))
    seed = int(raw.get("seed", 0))
    name = raw.get("name")
    duration = float(raw.get("duration_s", DEFAULT_DURATION_LIMIT))
    extra = {k: v for k, v in raw.items() if k not in _COMMON}

    def num(key, default=None):
        if key in extra:
            try:
                return float(extra[key])
            except ValueError:
                raise ConfigError(f"{key}: not a number: {extra[key]!r}") from None
        if default is None:
            raise ConfigError(f"{kind} scenario needs {key!r}")
        return default

    if kind == MOBILITY_TRACE:
        trace = extra.get("trace")
        if trace in ("synthetic", None) and extra.get("synthetic", "").lower() in ("1", "true", "yes"):
            trace = "synthetic"
        if trace == "synthetic":
            rows = make_mobility_trace(seed, duration=float(raw.get("duration_s", 250.0)))
            return load_mobility_trace(rows, file_size=file_size, seed=seed,
                                       name=name or "mobility")
        if not trace:
            raise ConfigError("mobility_trace scenario needs 'trace' (a CSV path or 'synthetic')")
        path = Path(trace)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        sc = load_mobility_trace(str(path), file_size=file_size, seed=seed, name=name)
        return sc
    if kind == STATIC:
        sc = make_static_scenario(num("wifi_mbps"), num("lte_mbps", LTE_MEAN_MBPS), file_size,
                                  seed, num("lte_jitter", LTE_JITTER), duration)
    elif kind == RANDOM_BW:
        sc = make_random_bw_scenario(num("mean_interval_s", 40.0), num("low_mbps", LOW_WIFI_MBPS),
                                     num("high_mbps", HIGH_WIFI_MBPS), seed, file_size,
                                     num("lte_mbps", LTE_MEAN_MBPS), num("lte_jitter", LTE_JITTER),
                                     extra.get("initial_level", "random"), duration)
    else:
        sc = make_background_onoff_scenario(int(num("n_interferers")), num("lambda_on", 0.05),
                                            num("lambda_off", 0.025), seed, file_size,
                                            num("clean_mbps", HIGH_WIFI_MBPS),
                                            num("lte_mbps", LTE_MEAN_MBPS),
                                            num("lte_jitter", LTE_JITTER), duration)
    return Scenario(sc.kind, sc.file_size, sc.duration_limit, sc.seed, sc.params, name)


def load_scenario(path):
    return scenario_from_mapping(read_kv(path), base_dir=Path(path).parent)


def scenario_to_kv(scenario, trace_path=None):
    out = {"kind": scenario.kind,
           "file_size_bytes": "none" if scenario.file_size is None else scenario.file_size,
           "duration_s": scenario.duration_limit, "seed": scenario.seed}
    if scenario.name:
        out["name"] = scenario.name
    for k, v in scenario.params.items():
        if k == "trace":
            if trace_path is None:
                raise ConfigError("trace scenarios need a trace_path to be saved")
            out["trace"] = trace_path
        else:
            out[k] = v
    return format_kv(out)
