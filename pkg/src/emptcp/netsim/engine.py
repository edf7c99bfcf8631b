"""Time-stepped event loop for one two-path download."""

import io
import math
from dataclasses import dataclass, field

from ..controller import decision_log_csv
from ..energy_model.model import per_byte_cost
from ..errors import SimTimeout
from ..units import bytes_over_interval_to_mbps, uj_to_j
from .paths import PathModel
from .policies import make_policy
from .scenarios import build_environment, rng_streams

PATH_NAMES = ("wifi", "lte")


def schedule_packet(paths, now=None):
    """Lowest-RTT subflow that may send and still has window headroom.

    A subflow whose RTT was zeroed by a resume ranks first until it carries
    a packet. Ties break on path name for determinism.
    """
    best = None
    for p in paths:
        if not (p.established and not p.suspended and p.data_ready and p.headroom > 0):
            continue
        key = (p.effective_rtt, p.name)
        if best is None or key < best[0]:
            best = (key, p)
    return None if best is None else best[1]


@dataclass
class SimReport:
    policy: str
    scenario: str
    kind: str
    seed: int
    completed: bool
    total_joules: float
    joules_per_interface: dict
    transfer_joules_per_interface: dict
    overhead_joules_per_interface: dict
    download_time_s: float
    end_time_s: float
    bytes_downloaded: int
    bytes_per_interface: dict
    active_time_s: dict
    mean_rtt_ms: dict
    promotions: dict
    tail_entries: dict
    tail_expiries: dict
    losses: dict
    command_log: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    energy_timeseries: list = field(default_factory=list)
    throughput_timeseries: list = field(default_factory=list)

    @property
    def energy_per_byte_uj(self):
        if not self.bytes_downloaded:
            return float("nan")
        return self.total_joules * 1e6 / self.bytes_downloaded

    def mean_throughput_mbps(self, path):
        t = self.active_time_s.get(path, 0.0)
        return bytes_over_interval_to_mbps(self.bytes_per_interface.get(path, 0), t)

    def summary(self):
        out = {
            "policy": self.policy,
            "scenario": self.scenario,
            "seed": self.seed,
            "completed": int(self.completed),
            "total_j": f"{self.total_joules:.6f}",
            "download_time_s": "" if self.download_time_s is None else f"{self.download_time_s:.3f}",
            "bytes_downloaded": self.bytes_downloaded,
            "energy_per_byte_uj": f"{self.energy_per_byte_uj:.6f}",
        }
        for name in PATH_NAMES:
            rtt = self.mean_rtt_ms[name]
            out[f"{name}_j"] = f"{self.joules_per_interface[name]:.6f}"
            out[f"{name}_bytes"] = self.bytes_per_interface[name]
            out[f"{name}_mean_rtt_ms"] = "" if rtt is None else f"{rtt:.3f}"
            out[f"{name}_promotions"] = self.promotions[name]
        out["commands"] = len(self.command_log)
        return out

    def summary_kv(self):
        return "".join(f"{k}={v}\n" for k, v in self.summary().items())

    def energy_csv(self):
        out = io.StringIO()
        out.write("time_s,policy,cumulative_j\n")
        for t, e in self.energy_timeseries:
            out.write(f"{t:.3f},{self.policy},{e:.6f}\n")
        return out.getvalue()

    def throughput_csv(self):
        out = io.StringIO()
        out.write("time_s,path,mbps\n")
        for t, path, mbps in self.throughput_timeseries:
            out.write(f"{t:.3f},{path},{mbps:.6f}\n")
        return out.getvalue()

    def decision_csv(self):
        return decision_log_csv(self.decisions)


class _Interval:
    __slots__ = ("bytes", "solo", "overlap", "data_steps", "blocked")

    def __init__(self):
        self.bytes = 0
        self.solo = 0
        self.overlap = 0
        self.data_steps = 0
        self.blocked = False


class Simulation:
    def __init__(self, scenario, policy, config=None, controller_params=None, profiles=None):
        from ..config import default_config

        self.config = config or default_config()
        self.profiles = profiles or self.config.profiles
        self.scenario = scenario
        params = controller_params or self.config.controller
        self.policy = make_policy(policy, params, self.profiles) if isinstance(policy, str) else policy
        self.env = build_environment(scenario)
        sp = self.config.sim
        self.sim_params = sp
        self.paths = {n: PathModel(n, self.profiles[n], sp.rtt_ms(n), sp) for n in PATH_NAMES}
        self.rng = rng_streams(scenario.seed)["loss"]
        self.gamma = self.config.gamma_down
        self.delta_s = params.delta_ms / 1000.0

    def _close_cost_interval(self, acc):
        dt = self.sim_params.dt_s
        for name, p in self.paths.items():
            a = acc[name]
            if a.bytes:
                rate = bytes_over_interval_to_mbps(a.bytes, a.data_steps * dt)
                cost = per_byte_cost(self.profiles[name], "down", rate)
                p.radio.add_transfer_energy(uj_to_j(cost * (a.solo + self.gamma * a.overlap)))

    def _energy_now(self, t):
        for p in self.paths.values():
            p.radio.advance(t)
        return sum(p.radio.accumulated_energy for p in self.paths.values())

    def run(self):
        sc = self.scenario
        sp = self.sim_params
        dt = sp.dt_s
        steps_per_tick = max(1, int(round(self.delta_s / dt)))
        steps_per_sample = max(1, int(round(sp.timeseries_interval_s / dt)))
        fixed_size = sc.file_size is not None
        remaining = sc.file_size if fixed_size else math.inf
        limit_steps = int(math.floor(sc.duration_limit / dt + 1e-9))

        paths = list(self.paths.values())
        delivered = 0
        completion = None
        energy_ts, tput_ts = [(0.0, 0.0)], []
        sample_bytes = dict.fromkeys(PATH_NAMES, 0)
        tick_acc = {n: _Interval() for n in PATH_NAMES}

        if fixed_size and remaining == 0:
            return self._report(True, 0.0, 0.0, 0, energy_ts, tput_ts)

        self.policy.start(self, 0.0)
        k = 0
        while k < limit_steps:
            now = k * dt
            self.policy.before_step(self, now)
            has_data = remaining > 0
            n_int = int(self.env.interferers(now)) if self.env.interferers is not None else 0
            bws = {"wifi": self.env.wifi(now), "lte": self.env.lte(now)}
            for p in paths:
                extra = n_int * sp.contention_delay_ms / 1000.0 if p.name == "wifi" else 0.0
                blocked = p.prepare(now, bws[p.name], extra, has_data)
                if blocked or not p.established or p.suspended:
                    tick_acc[p.name].blocked = True

            sent = dict.fromkeys(PATH_NAMES, 0)
            left = remaining
            while left > 0:
                p = schedule_packet(paths, now)
                if p is None:
                    break
                give = min(p.headroom, left)
                p.headroom -= give
                sent[p.name] += give
                left -= give

            overlap = all(p.data_ready for p in paths)
            for p in paths:
                p.commit(sent[p.name], self.rng, n_int if p.name == "wifi" else 0)
                a = tick_acc[p.name]
                a.bytes += sent[p.name]
                if overlap:
                    a.overlap += sent[p.name]
                else:
                    a.solo += sent[p.name]
                if p.data_ready:
                    a.data_steps += 1
                sample_bytes[p.name] += sent[p.name]

            step_total = sent["wifi"] + sent["lte"]
            delivered += step_total
            if fixed_size:
                remaining -= step_total
            k += 1
            t_end = k * dt
            self.policy.after_step(self, t_end, sent)

            if k % steps_per_tick == 0:
                self._close_cost_interval(tick_acc)
                samples = {n: (None if tick_acc[n].blocked else tick_acc[n].bytes)
                           for n in PATH_NAMES}
                tick_acc = {n: _Interval() for n in PATH_NAMES}
                self.policy.on_tick(self, t_end, samples)
            if k % steps_per_sample == 0:
                span = steps_per_sample * dt
                for n in PATH_NAMES:
                    tput_ts.append((t_end, n, bytes_over_interval_to_mbps(sample_bytes[n], span)))
                    sample_bytes[n] = 0
                energy_ts.append((t_end, self._energy_now(t_end)))
            if fixed_size and remaining <= 0:
                completion = t_end
                break

        end = k * dt
        self._close_cost_interval(tick_acc)
        if fixed_size and completion is None:
            report = self._report(False, None, end, delivered, energy_ts, tput_ts)
            raise SimTimeout(f"{self.policy.name}: {delivered} of {sc.file_size} bytes "
                             f"after {sc.duration_limit} s", report)
        if k % steps_per_sample:
            span = (k % steps_per_sample) * dt
            for n in PATH_NAMES:
                tput_ts.append((end, n, bytes_over_interval_to_mbps(sample_bytes[n], span)))
        return self._report(True, completion, end, delivered, energy_ts, tput_ts)

    def _report(self, completed, download_time, end, delivered, energy_ts, tput_ts):
        last = end
        for p in self.paths.values():
            last = max(last, p.radio.finish(end))
        total = sum(p.radio.accumulated_energy for p in self.paths.values())
        if energy_ts[-1][0] < end or energy_ts[-1][1] != total:
            energy_ts.append((last, total))
        paths = self.paths
        return SimReport(
            policy=self.policy.name,
            scenario=self.scenario.label,
            kind=self.scenario.kind,
            seed=self.scenario.seed,
            completed=completed,
            total_joules=total,
            joules_per_interface={n: p.radio.accumulated_energy for n, p in paths.items()},
            transfer_joules_per_interface={n: p.radio.transfer_energy for n, p in paths.items()},
            overhead_joules_per_interface={n: p.radio.overhead_energy for n, p in paths.items()},
            download_time_s=download_time,
            end_time_s=end,
            bytes_downloaded=delivered,
            bytes_per_interface={n: p.bytes for n, p in paths.items()},
            active_time_s={n: p.active_time for n, p in paths.items()},
            mean_rtt_ms={n: p.mean_rtt_ms for n, p in paths.items()},
            promotions={n: p.radio.promotions for n, p in paths.items()},
            tail_entries={n: p.radio.tail_entries for n, p in paths.items()},
            tail_expiries={n: p.radio.tail_expiries for n, p in paths.items()},
            losses={n: p.losses for n, p in paths.items()},
            command_log=list(getattr(self.policy, "commands", [])),
            decisions=list(self.policy.decisions),
            energy_timeseries=energy_ts,
            throughput_timeseries=tput_ts,
        )


def run(scenario, policy, controller_params=None, profiles=None, config=None):
    """Simulate ``policy`` on ``scenario`` and return a :class:`SimReport`.

    Raises :class:`~emptcp.errors.SimTimeout` when a fixed-size download is
    not finished by ``scenario.duration_limit``.
    """
    return Simulation(scenario, policy, config, controller_params, profiles).run()
