"""eMPTCP path manager: delayed LTE establishment and LTE suspend/resume.

The controller is a small state machine driven by three events (connection
start, received bytes, periodic tick). It returns at most one
:class:`PathCommand` per event; the simulator applies the command to the LTE
subflow.
"""

import io
from dataclasses import dataclass, field

from .efficiency_map import wifi_only_region
from .errors import DomainError
from .predictor import SLOPE_INIT, HoltWinters
from .units import MIB, bytes_over_interval_to_mbps, ms_to_s

DELAYING_LTE = "delaying_lte"
BOTH_ACTIVE = "both_active"
WIFI_ONLY = "wifi_only"

ESTABLISH_LTE = "establish_lte"
SUSPEND_LTE = "suspend_lte"
RESUME_LTE = "resume_lte"

MPTCP_OPTION_KIND = 30
MP_PRIO_SUBTYPE = 0x5


def mp_prio_option(backup, addr_id=None):
    """Encode an MP_PRIO TCP option (kind 30, subtype 5)."""
    flags = (MP_PRIO_SUBTYPE << 4) | (1 if backup else 0)
    if addr_id is None:
        return bytes([MPTCP_OPTION_KIND, 3, flags])
    if not 0 <= addr_id <= 255:
        raise ValueError("addr_id must fit in one byte")
    return bytes([MPTCP_OPTION_KIND, 4, flags, addr_id])


def parse_mp_prio(data):
    """Decode an MP_PRIO option into ``(backup, addr_id)``."""
    if len(data) < 3 or data[0] != MPTCP_OPTION_KIND or data[1] not in (3, 4):
        raise ValueError("not an MP_PRIO option")
    if len(data) != data[1]:
        raise ValueError(f"length field {data[1]} does not match {len(data)} bytes")
    if data[2] >> 4 != MP_PRIO_SUBTYPE:
        raise ValueError(f"subtype {data[2] >> 4} is not MP_PRIO")
    addr_id = data[3] if data[1] == 4 else None
    return bool(data[2] & 0x1), addr_id


@dataclass(frozen=True)
class ControllerParams:
    kappa: int = MIB  # bytes received over WiFi before LTE is opened
    tau_ms: float = 3000.0
    delta_ms: float = 200.0
    rho: float = 0.125
    h: int = 1
    predictor_mode: str = SLOPE_INIT
    lte_prior_mbps: float = 10.0
    lte_decay: float = 0.05  # per tick, toward the prior, while LTE is unobserved
    forecast_floor_mbps: float = 0.01
    warmup_samples: int = 1  # samples discarded after a path (re)appears
    gamma: float = None  # None: shipped download sharing factor

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError("kappa must be >= 0")
        for name in ("tau_ms", "delta_ms", "rho", "h", "lte_prior_mbps", "forecast_floor_mbps"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        if not self.rho < 1:
            raise DomainError("rho must lie in (0, 1)")
        if not 0 <= self.lte_decay <= 1:
            raise DomainError("lte_decay must lie in [0, 1]")
        if self.warmup_samples < 0:
            raise DomainError("warmup_samples must be >= 0")


@dataclass(frozen=True)
class PathCommand:
    kind: str
    time_ms: float
    zero_rtt: bool = False
    disable_cwnd_reset: bool = False
    mp_prio: bytes = None


def _command(kind, now_ms):
    if kind == SUSPEND_LTE:
        return PathCommand(kind, now_ms, mp_prio=mp_prio_option(backup=True))
    if kind == RESUME_LTE:
        return PathCommand(kind, now_ms, zero_rtt=True, disable_cwnd_reset=True,
                           mp_prio=mp_prio_option(backup=False))
    return PathCommand(kind, now_ms)


@dataclass
class _PathView:
    predictor: HoltWinters
    observable: bool = False
    warmup_left: int = 0


@dataclass
class ControllerState:
    phase: str = None
    wifi_bytes_since_start: int = 0
    delay_timer_deadline: float = None
    start_time: float = 0.0
    last_decision_time: float = None
    lte_established: bool = False
    lte_estimate: float = 0.0
    wifi_forecast: float = None
    lte_forecast: float = None
    paths: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Decision:
    time_ms: float
    phase_from: str
    phase_to: str
    command: str
    b_wifi_forecast: float
    b_lte_forecast: float


DECISION_HEADER = "time_ms,phase_from,phase_to,command,b_wifi_forecast,b_lte_forecast"


def decision_log_csv(decisions):
    out = io.StringIO()
    out.write(DECISION_HEADER + "\n")
    for d in decisions:
        bw = "" if d.b_wifi_forecast is None else f"{d.b_wifi_forecast:.6f}"
        bl = "" if d.b_lte_forecast is None else f"{d.b_lte_forecast:.6f}"
        out.write(f"{d.time_ms:.3f},{d.phase_from},{d.phase_to},{d.command},{bw},{bl}\n")
    return out.getvalue()


class Controller:
    """Decision engine for one connection.

    Single-threaded; replaying the same event sequence reproduces the same
    commands and log.
    """

    def __init__(self, params=None, profiles=None):
        self.params = params or ControllerParams()
        self.profiles = profiles
        if self.params.gamma is None:
            from .config import default_config
            self.gamma = default_config().gamma_down
        else:
            self.gamma = self.params.gamma
        self.state = ControllerState()
        self.log = []

    def _new_path(self):
        p = self.params
        return _PathView(HoltWinters(rho=p.rho, mode=p.predictor_mode),
                         warmup_left=p.warmup_samples)

    def _emit(self, kind, now_ms, phase_to):
        s = self.state
        self.log.append(Decision(now_ms, s.phase, phase_to, kind,
                                 s.wifi_forecast, s.lte_forecast))
        s.phase = phase_to
        s.last_decision_time = now_ms
        if kind == ESTABLISH_LTE:
            s.lte_established = True
            s.delay_timer_deadline = None
        return _command(kind, now_ms)

    def on_connection_start(self, now_ms=0.0, primary="wifi"):
        s = self.state
        s.start_time = now_ms
        s.paths = {"wifi": self._new_path(), "lte": self._new_path()}
        s.lte_estimate = self.params.lte_prior_mbps
        if primary == "wifi":
            s.phase = DELAYING_LTE
            s.delay_timer_deadline = now_ms + self.params.tau_ms
            return None
        return self._emit(ESTABLISH_LTE, now_ms, BOTH_ACTIVE)

    def _check_delay(self, now_ms):
        s = self.state
        if s.phase != DELAYING_LTE:
            return None
        if s.wifi_bytes_since_start >= self.params.kappa or now_ms >= s.delay_timer_deadline:
            return self._emit(ESTABLISH_LTE, now_ms, BOTH_ACTIVE)
        return None

    def on_bytes(self, path, nbytes, now_ms):
        """Count received bytes while LTE establishment is being postponed."""
        s = self.state
        if s.phase != DELAYING_LTE:
            return None
        if path == "wifi":
            s.wifi_bytes_since_start += nbytes
        return self._check_delay(now_ms)

    def _observe(self, name, nbytes):
        view = self.state.paths[name]
        if nbytes is None:
            if view.observable and name == "lte" and view.predictor.ready:
                self.state.lte_estimate = view.predictor.forecast(self.params.h)
            if view.observable:
                view.predictor = HoltWinters(rho=self.params.rho, mode=self.params.predictor_mode)
                view.warmup_left = self.params.warmup_samples
            view.observable = False
            return
        view.observable = True
        if view.warmup_left > 0:
            view.warmup_left -= 1
            return
        view.predictor.update(bytes_over_interval_to_mbps(nbytes, ms_to_s(self.params.delta_ms)))

    def _forecasts(self):
        s, p = self.state, self.params
        wifi = s.paths["wifi"].predictor
        lte = s.paths["lte"].predictor
        fw = wifi.forecast(p.h) if wifi.ready else None
        if lte.ready:
            fl = lte.forecast(p.h)
            s.lte_estimate = fl
        else:
            s.lte_estimate += p.lte_decay * (p.lte_prior_mbps - s.lte_estimate)
            fl = s.lte_estimate
        s.wifi_forecast, s.lte_forecast = fw, fl
        return fw, fl

    def on_tick(self, now_ms, sampled_bytes_per_path):
        """Periodic sampling every ``delta_ms``.

        ``sampled_bytes_per_path`` maps ``"wifi"``/``"lte"`` to the bytes the
        subflow received in the closing interval, or ``None`` when the
        subflow could not be observed for the whole interval (not yet
        established, suspended, or still promoting).
        """
        s = self.state
        if s.phase is None:
            raise RuntimeError("on_tick before on_connection_start")
        for name in ("wifi", "lte"):
            self._observe(name, sampled_bytes_per_path.get(name))
        fw, fl = self._forecasts()

        cmd = self._check_delay(now_ms)
        if cmd is not None or s.phase == DELAYING_LTE:
            return cmd
        if fw is None:
            return None
        floor = self.params.forecast_floor_mbps
        stay_wifi = wifi_only_region(max(fw, floor), max(fl, floor), self.gamma,
                                     "down", self.profiles)
        if s.phase == BOTH_ACTIVE and stay_wifi:
            return self._emit(SUSPEND_LTE, now_ms, WIFI_ONLY)
        if s.phase == WIFI_ONLY and not stay_wifi:
            return self._emit(RESUME_LTE, now_ms, BOTH_ACTIVE)
        return None

    def decision_log_csv(self):
        return decision_log_csv(self.log)
