"""One subflow over one radio: a fluid TCP window model at MSS granularity."""

from dataclasses import dataclass

from ..energy_model.radio import RadioStateMachine
from ..errors import DomainError
from ..units import MSS, mbps_to_bytes_per_s, ms_to_s


@dataclass(frozen=True)
class SimParams:
    dt_s: float = 0.01
    wifi_rtt_ms: float = 15.0
    lte_rtt_ms: float = 65.0
    initial_cwnd_mss: int = 10
    rto_s: float = 1.0  # idle period after which cwnd restarts (unless disabled)
    buffer_bdp: float = 1.0  # bottleneck buffer in bandwidth-delay products
    min_buffer_mss: int = 16
    loss_per_interferer: float = 0.01  # loss probability per RTT per active interferer
    contention_delay_ms: float = 10.0  # added WiFi RTT per active interferer
    timeseries_interval_s: float = 1.0

    def __post_init__(self):
        for name in ("dt_s", "wifi_rtt_ms", "lte_rtt_ms", "initial_cwnd_mss", "rto_s",
                     "timeseries_interval_s"):
            if not getattr(self, name) > 0:
                raise DomainError(f"sim.{name} must be > 0")

    def rtt_ms(self, name):
        return self.wifi_rtt_ms if name == "wifi" else self.lte_rtt_ms


class PathModel:
    """Subflow state: establishment, priority, congestion window, radio."""

    def __init__(self, name, profile, base_rtt_ms, params):
        self.name = name
        self.base_rtt = ms_to_s(base_rtt_ms)
        self.params = params
        self.radio = RadioStateMachine(profile)
        self.established = False
        self.suspended = False
        self.handshake_left = 0.0
        self.cwnd = params.initial_cwnd_mss * MSS
        self.ssthresh = float("inf")
        self.srtt = self.base_rtt
        self.rtt_zeroed = False
        self.cwnd_reset_disabled = False
        self.idle_time = 0.0
        self.loss_cooldown = 0.0
        self.credit = 0.0
        # per-step scratch
        self.bw = 0.0
        self.extra_delay = 0.0
        self.rtt_now = self.base_rtt
        self.headroom = 0
        self.data_ready = False
        # totals
        self.bytes = 0
        self.active_time = 0.0
        self.rtt_sum = 0.0
        self.rtt_samples = 0
        self.losses = 0

    def establish(self):
        if self.established:
            return False
        self.established = True
        self.handshake_left = self.base_rtt
        return True

    @property
    def handshaking(self):
        return self.established and self.handshake_left > 0

    @property
    def effective_rtt(self):
        """RTT the scheduler ranks by; zero right after a resume."""
        return 0.0 if self.rtt_zeroed else self.srtt

    def wants_radio(self, has_data):
        if not self.established:
            return False
        if self.handshaking:
            return True
        return not self.suspended and has_data and self.bw > 0

    def prepare(self, now, bw_mbps, extra_delay_s, has_data):
        """Radio bookkeeping and sending capacity for the step starting at ``now``.

        Returns True if the path was blocked waiting on promotion or the
        handshake during this step (its throughput is then unobservable).
        """
        self.bw = bw_mbps
        self.extra_delay = extra_delay_s
        self.headroom = 0
        self.data_ready = False
        dt = self.params.dt_s
        if not self.wants_radio(has_data):
            self.radio.release(now)
            return False
        ready = self.radio.request(now)
        if not ready:
            return True
        if self.handshaking:
            self.handshake_left -= dt
            return True
        cap = mbps_to_bytes_per_s(bw_mbps)
        base = self.base_rtt + extra_delay_s
        bdp = cap * base
        queue = max(0.0, self.cwnd - bdp)
        self.rtt_now = base + queue / cap
        rate = min(cap, self.cwnd / self.rtt_now)
        self.credit += rate * dt
        self.headroom = int(self.credit // MSS) * MSS
        self.data_ready = True
        return False

    def commit(self, sent, rng, interferers):
        """Account ``sent`` bytes for this step and evolve the window."""
        p = self.params
        dt = p.dt_s
        if self.data_ready:
            self.credit = min(self.credit - sent, float(MSS))
            self.bytes += sent
            self.active_time += dt
            self.idle_time = 0.0
            self.rtt_sum += self.rtt_now
            self.rtt_samples += 1
            self.srtt = 0.875 * self.srtt + 0.125 * self.rtt_now
            if sent and self.rtt_zeroed:
                self.rtt_zeroed = False
            if self.cwnd < self.ssthresh:
                self.cwnd += sent
            elif sent:
                self.cwnd += MSS * sent / self.cwnd
            self.loss_cooldown = max(0.0, self.loss_cooldown - dt)
            if self.loss_cooldown == 0.0:
                cap = mbps_to_bytes_per_s(self.bw)
                bdp = cap * (self.base_rtt + self.extra_delay)
                limit = bdp + max(p.buffer_bdp * bdp, p.min_buffer_mss * MSS)
                lost = self.cwnd > limit
                if not lost and interferers and p.loss_per_interferer > 0:
                    prob = p.loss_per_interferer * interferers * dt / self.rtt_now
                    lost = rng.random() < prob
                if lost:
                    self.ssthresh = max(self.cwnd / 2, 2.0 * MSS)
                    self.cwnd = self.ssthresh
                    self.loss_cooldown = self.rtt_now
                    self.losses += 1
        elif self.established and not self.handshaking:
            self.idle_time += dt
            self.credit = 0.0
            if self.idle_time > p.rto_s and not self.cwnd_reset_disabled:
                self.cwnd = min(self.cwnd, p.initial_cwnd_mss * MSS)

    @property
    def mean_rtt_ms(self):
        if not self.rtt_samples:
            return None
        return 1000.0 * self.rtt_sum / self.rtt_samples
