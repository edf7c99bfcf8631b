"""Runtime power state of one radio interface."""

IDLE = "idle"
PROMOTION = "promotion"
ACTIVE = "active"
TAIL = "tail"

_ALLOWED = {
    IDLE: {PROMOTION},
    PROMOTION: {ACTIVE},
    ACTIVE: {TAIL},
    TAIL: {ACTIVE, IDLE},
}


class IllegalTransition(RuntimeError):
    pass


class RadioStateMachine:
    """Idle/promotion/active/tail machine that integrates radio energy.

    Promotion and tail energies are spread uniformly over their durations, so
    a tail interrupted by new traffic is charged for the elapsed fraction
    only. Transfer energy is added by the caller through
    :meth:`add_transfer_energy`.

    Mutable and single-owner; not thread safe.
    """

    def __init__(self, profile, now=0.0):
        self.profile = profile
        self.state = IDLE
        self.state_entry_time = now
        self.accumulated_energy = 0.0
        self.overhead_energy = 0.0
        self.transfer_energy = 0.0
        self.promotions = 0
        self.tail_entries = 0
        self.tail_expiries = 0
        self.transitions = []
        self._last = now

    @property
    def ready(self):
        return self.state == ACTIVE

    def _go(self, new_state, at):
        if new_state not in _ALLOWED[self.state]:
            raise IllegalTransition(f"{self.profile.name}: {self.state} -> {new_state}")
        self.transitions.append((at, self.state, new_state))
        self.state = new_state
        self.state_entry_time = at
        if new_state == PROMOTION:
            self.promotions += 1
        elif new_state == TAIL:
            self.tail_entries += 1
        elif new_state == IDLE:
            self.tail_expiries += 1

    def _charge(self, joules):
        self.accumulated_energy += joules
        self.overhead_energy += joules

    def advance(self, now):
        """Integrate overhead energy up to ``now`` and apply timer expiries."""
        if now < self._last:
            raise ValueError(f"time went backwards: {now} < {self._last}")
        p = self.profile
        while True:
            if self.state == PROMOTION:
                end = self.state_entry_time + p.promotion_duration
                t1 = min(now, end)
                self._charge(p.promotion_energy / p.promotion_duration * (t1 - self._last))
                self._last = t1
                if now >= end:
                    self._go(ACTIVE, end)
                    continue
            elif self.state == TAIL:
                end = self.state_entry_time + p.tail_duration
                t1 = min(now, end)
                self._charge(p.tail_energy / p.tail_duration * (t1 - self._last))
                self._last = t1
                if now >= end:
                    self._go(IDLE, end)
                    continue
            self._last = now
            return

    def request(self, now):
        """New traffic wants the radio. Returns True if it can carry data now."""
        self.advance(now)
        if self.state == IDLE:
            self._go(PROMOTION, now)
        elif self.state == TAIL:
            self._go(ACTIVE, now)
        return self.ready

    def release(self, now):
        """No traffic: an active radio starts its tail."""
        self.advance(now)
        if self.state == ACTIVE:
            self._go(TAIL, now)

    def add_transfer_energy(self, joules):
        if joules < 0:
            raise ValueError("transfer energy must be >= 0")
        self.accumulated_energy += joules
        self.transfer_energy += joules

    def finish(self, now):
        """Let the radio run down to idle; returns the time it got there."""
        self.release(now)
        if self.state == PROMOTION:
            self.advance(self.state_entry_time + self.profile.promotion_duration)
            self.release(self._last)
        if self.state == TAIL:
            self.advance(self.state_entry_time + self.profile.tail_duration)
        return self._last
