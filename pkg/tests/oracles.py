"""Independent reference evaluations used as test oracles.

Everything here is written against mpmath at 50 significant digits and
shares no code with the package. Coefficients are typed in by hand
rather than read from ``defaults.cfg``.
"""

import mpmath as mp

mp.mp.dps = 50

TABLE2_DOWN = {
    "wifi": (mp.mpf("4.6750"), mp.mpf("-0.8179")),
    "lte": (mp.mpf("10.0427"), mp.mpf("-0.8910")),
    "hsdpa": (mp.mpf("9.3440"), mp.mpf("-0.9286")),
}
TABLE2_UP = {
    "wifi": (mp.mpf("3.6135"), mp.mpf("-0.6617")),
    "lte": (mp.mpf("13.3438"), mp.mpf("-0.8358")),
    "hsdpa": (mp.mpf("12.5294"), mp.mpf("-0.8524")),
}
FIXED = {
    "wifi": mp.mpf("0.040") + mp.mpf("0.109"),
    "lte": mp.mpf("0.311") + mp.mpf("2.597"),
}


def coeffs(iface, direction):
    return (TABLE2_DOWN if direction == "down" else TABLE2_UP)[iface]


def per_byte_uj(iface, direction, mbps):
    a, b = coeffs(iface, direction)
    return a * mp.power(mp.mpf(mbps), b)


def overlap(s_w, s_l, b_w, b_l):
    t_w = mp.mpf(s_w) / mp.mpf(b_w)
    t_l = mp.mpf(s_l) / mp.mpf(b_l)
    return min(t_w, t_l) / max(t_w, t_l)


def mptcp_total_j(s_w, s_l, b_w, b_l, gamma, direction="down", fixed=("wifi", "lte")):
    theta = overlap(s_w, s_l, b_w, b_l)
    g = mp.mpf(gamma)
    e_t = (per_byte_uj("wifi", direction, b_w) * s_w
           + per_byte_uj("lte", direction, b_l) * s_l) * (1 - theta + g * theta)
    e_t = e_t / mp.mpf(10) ** 6
    return theta, e_t, e_t + sum(FIXED[i] for i in fixed)


def single_path_j(iface, direction, size, mbps, include_fixed):
    e = per_byte_uj(iface, direction, mbps) * size / mp.mpf(10) ** 6
    return e + (FIXED[iface] if include_fixed else 0)


def rel_err(got, want):
    want = mp.mpf(want)
    if want == 0:
        return abs(mp.mpf(got))
    return abs((mp.mpf(got) - want) / want)
