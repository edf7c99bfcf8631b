"""Holt-Winters double exponential smoothing of per-subflow throughput."""

from dataclasses import dataclass

from .errors import DomainError, NotReadyError

SLOPE_INIT = "slope_init"
LEVEL_INIT = "level_init"


@dataclass
class HoltWinters:
    """Level/trend smoother with an h-step-ahead forecast.

    Two initialisation modes are supported. ``slope_init`` seeds the trend
    with the first difference ``Y2 - Y1``. ``level_init`` seeds it with the
    previous *sample* ``Y_{i-1}`` (with ``Y_0 = 0``); it is kept for
    comparison runs only since it makes a constant series forecast
    ``c * (1 + h)``.
    """

    rho: float = 0.125
    mode: str = SLOPE_INIT
    a: float = 0.0
    b: float = 0.0
    sample_count: int = 0
    _prev: float = 0.0

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if self.mode not in (SLOPE_INIT, LEVEL_INIT):
            raise DomainError(f"unknown predictor mode {self.mode!r}")

    @property
    def ready(self):
        return self.sample_count >= 2

    def update(self, y):
        if y < 0:
            raise DomainError(f"throughput sample must be >= 0, got {y}")
        self.sample_count += 1
        if self.sample_count <= 2:
            if self.mode == LEVEL_INIT:
                self.a, self.b = y, self._prev
            elif self.sample_count == 1:
                self.a, self.b = y, 0.0
            else:
                self.a, self.b = y, y - self._prev
        else:
            # error-correction form of a' = rho*y + (1-rho)(a+b) and
            # b' = rho(a'-a) + (1-rho)b; keeps constant input an exact fixed point
            temp = self.a
            pred = self.a + self.b
            self.a = pred + self.rho * (y - pred)
            self.b = self.b + self.rho * ((self.a - temp) - self.b)
        self._prev = y
        return self

    def forecast(self, h=1):
        """Predicted throughput ``h`` steps ahead, floored at zero."""
        if not self.ready:
            raise NotReadyError(f"forecast needs 2 samples, have {self.sample_count}")
        return max(0.0, self.a + self.b * h)

    def raw_forecast(self, h=1):
        if not self.ready:
            raise NotReadyError(f"forecast needs 2 samples, have {self.sample_count}")
        return self.a + self.b * h
