"""Path-usage policies compared by the simulator."""

from ..controller import (
    ESTABLISH_LTE,
    RESUME_LTE,
    SUSPEND_LTE,
    Controller,
)
from ..units import s_to_ms


class Policy:
    name = None

    def start(self, sim, now):
        raise NotImplementedError

    def before_step(self, sim, now):
        pass

    def after_step(self, sim, t_end, sent):
        pass

    def on_tick(self, sim, t_end, samples):
        pass

    @property
    def decisions(self):
        return []


def _join_after_primary(sim, primary, secondary):
    p, s = sim.paths[primary], sim.paths[secondary]
    if not s.established and p.established and not p.handshaking and p.radio.ready:
        s.establish()


class TcpWifi(Policy):
    name = "tcp_wifi"

    def start(self, sim, now):
        sim.paths["wifi"].establish()


class TcpLte(Policy):
    name = "tcp_lte"

    def start(self, sim, now):
        sim.paths["lte"].establish()


class Mptcp(Policy):
    """Full-MPTCP: the LTE subflow joins as soon as the WiFi subflow is up."""

    name = "mptcp"

    def start(self, sim, now):
        sim.paths["wifi"].establish()

    def before_step(self, sim, now):
        _join_after_primary(sim, "wifi", "lte")


class WifiFirst(Mptcp):
    """LTE subflow held in backup; used only while WiFi is disassociated.

    Disassociation is modeled as WiFi bandwidth exactly 0. A degraded but
    associated WiFi keeps LTE in backup.
    """

    name = "wifi_first"

    def start(self, sim, now):
        super().start(sim, now)
        sim.paths["lte"].suspended = True

    def before_step(self, sim, now):
        super().before_step(sim, now)
        lte = sim.paths["lte"]
        if lte.established:
            lte.suspended = sim.env.wifi(now) > 0


class Emptcp(Policy):
    """Energy-aware MPTCP driven by :class:`~emptcp.controller.Controller`."""

    name = "emptcp"

    def __init__(self, params=None, profiles=None):
        self.controller = Controller(params, profiles)
        self.commands = []

    @property
    def decisions(self):
        return self.controller.log

    def start(self, sim, now):
        sim.paths["wifi"].establish()
        sim.paths["lte"].cwnd_reset_disabled = True
        self._apply(sim, self.controller.on_connection_start(s_to_ms(now), primary="wifi"))

    def _apply(self, sim, cmd):
        if cmd is None:
            return
        self.commands.append(cmd)
        lte = sim.paths["lte"]
        if cmd.kind == ESTABLISH_LTE:
            lte.establish()
        elif cmd.kind == SUSPEND_LTE:
            lte.suspended = True
        elif cmd.kind == RESUME_LTE:
            if lte.suspended:
                lte.suspended = False
                lte.rtt_zeroed = cmd.zero_rtt
            lte.cwnd_reset_disabled = lte.cwnd_reset_disabled or cmd.disable_cwnd_reset

    def after_step(self, sim, t_end, sent):
        self._apply(sim, self.controller.on_bytes("wifi", sent["wifi"], s_to_ms(t_end)))

    def on_tick(self, sim, t_end, samples):
        self._apply(sim, self.controller.on_tick(s_to_ms(t_end), samples))


POLICIES = {
    "tcp_wifi": TcpWifi,
    "tcp_lte": TcpLte,
    "mptcp": Mptcp,
    "emptcp": Emptcp,
    "wifi_first": WifiFirst,
}


def policy_wifi_first():
    return WifiFirst()


def make_policy(name, controller_params=None, profiles=None):
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICIES)}") from None
    if cls is Emptcp:
        return Emptcp(controller_params, profiles)
    return cls()
