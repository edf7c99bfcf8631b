"""Piecewise-constant time processes (bandwidth, interferer counts)."""

from bisect import bisect_right

import numpy as np


class PiecewiseConstant:
    """Value ``values[i]`` holds on ``[times[i], times[i+1])``.

    Before ``times[0]`` the first value applies; after the last change point
    the last value holds forever.
    """

    def __init__(self, times, values):
        times = [float(t) for t in times]
        values = [float(v) for v in values]
        if not times or len(times) != len(values):
            raise ValueError("need matching, non-empty times and values")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("times must be nondecreasing")
        if any(v < 0 for v in values):
            raise ValueError("values must be >= 0")
        self.times = times
        self.values = values

    @classmethod
    def constant(cls, value):
        return cls([0.0], [value])

    def __call__(self, t):
        i = bisect_right(self.times, t) - 1
        return self.values[max(i, 0)]

    def __eq__(self, other):
        return isinstance(other, PiecewiseConstant) and self.samples() == other.samples()

    def samples(self):
        """Change points with consecutive duplicates removed."""
        out = []
        for t, v in zip(self.times, self.values):
            if out and out[-1][1] == v:
                continue
            out.append((t, v))
        return out

    def mean(self, horizon):
        """Time average over ``[0, horizon)``."""
        total = 0.0
        pts = self.samples()
        for k, (t, v) in enumerate(pts):
            t0 = max(t, 0.0) if k else 0.0
            t1 = pts[k + 1][0] if k + 1 < len(pts) else horizon
            t1 = min(t1, horizon)
            if t1 > t0:
                total += v * (t1 - t0)
        return total / horizon

    def map(self, fn):
        return PiecewiseConstant(self.times, [fn(v) for v in self.values])


def jittered_constant(mean, jitter, horizon, rng, period=1.0):
    """``mean * (1 + U(-jitter, jitter))`` redrawn every ``period`` seconds."""
    if jitter <= 0:
        return PiecewiseConstant.constant(mean)
    n = int(np.ceil(horizon / period)) + 1
    factors = 1.0 + rng.uniform(-jitter, jitter, size=n)
    return PiecewiseConstant(period * np.arange(n), mean * factors)


def exponential_epochs(mean_interval, horizon, rng):
    """Change times with i.i.d. exponential gaps, starting at 0."""
    times = [0.0]
    while times[-1] < horizon:
        times.append(times[-1] + rng.exponential(mean_interval))
    return times


def onoff_process(lambda_on, lambda_off, horizon, rng, start_on=None):
    """Alternating on/off indicator with exponential sojourns.

    On periods last Exp(rate ``lambda_on``), off periods Exp(rate
    ``lambda_off``). The initial phase is drawn from the stationary
    distribution unless ``start_on`` is given.
    """
    if start_on is None:
        p_on = (1 / lambda_on) / (1 / lambda_on + 1 / lambda_off)
        start_on = bool(rng.random() < p_on)
    times, values = [0.0], [1.0 if start_on else 0.0]
    on = start_on
    t = 0.0
    while t < horizon:
        t += rng.exponential(1 / lambda_on if on else 1 / lambda_off)
        on = not on
        times.append(t)
        values.append(1.0 if on else 0.0)
    return PiecewiseConstant(times, values)


def sum_processes(procs):
    times = sorted({t for p in procs for t in p.times})
    return PiecewiseConstant(times, [sum(p(t) for p in procs) for t in times])
