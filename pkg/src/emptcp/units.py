"""Unit conversions.

Throughput is in Mbps (10**6 bit/s), sizes in bytes, per-byte cost in
microjoules per byte and totals in joules. Every conversion between these
goes through this module.
"""

MSS = 1460
MIB = 2**20


def mbps_to_bytes_per_s(mbps):
    return mbps * 1e6 / 8.0


def bytes_per_s_to_mbps(bps):
    return bps * 8.0 / 1e6


def bytes_over_interval_to_mbps(nbytes, seconds):
    if seconds <= 0:
        return 0.0
    return nbytes * 8.0 / seconds / 1e6


def uj_to_j(uj):
    return uj * 1e-6


def ms_to_s(ms):
    return ms / 1000.0


def s_to_ms(s):
    return s * 1000.0
