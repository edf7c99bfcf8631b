import json

import numpy as np
import pytest

from emptcp.cli import SUMMARY_HEADER, main
from emptcp.config import parse_kv
from emptcp.energy_model import mptcp_energy, proportional_split, single_path_energy
from emptcp.config import default_config

MIB = 2**20
TABLE2 = [
    ("down", "wifi", 4.6750, -0.8179), ("down", "lte", 10.0427, -0.8910),
    ("down", "hsdpa", 9.3440, -0.9286), ("up", "wifi", 3.6135, -0.6617),
    ("up", "lte", 13.3438, -0.8358), ("up", "hsdpa", 12.5294, -0.8524),
]


def kv_output(capsys):
    return {k: v for k, v in (line.split("=", 1) for line in capsys.readouterr().out.split())}


class TestFit:
    def test_power_law_round_trip(self, tmp_path):
        src = tmp_path / "m.csv"
        lines = ["direction,interface,throughput_mbps,energy_per_byte_uj"]
        for d, i, a, b in TABLE2:
            lines += [f"{d},{i},{x!r},{a * x ** b!r}" for x in np.geomspace(0.3, 25, 12).tolist()]
        src.write_text("\n".join(lines) + "\n")
        out = tmp_path / "coef.cfg"
        assert main(["fit", str(src), "--mode", "power_law", "--out", str(out)]) == 0
        text = out.read_text()
        assert "r2_log=" in text
        got = parse_kv(text)
        for d, i, a, b in TABLE2:
            assert float(got[f"{i}.alpha_{d}"]) == pytest.approx(a, rel=1e-6)
            assert float(got[f"{i}.beta_{d}"]) == pytest.approx(b, rel=1e-6)

    def test_gamma_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        lines = ["direction,s_wifi,s_lte,b_wifi,b_lte,total_j"]
        for _ in range(25):
            size = rng.uniform(2, 64) * MIB
            bw, bl = rng.uniform(0.5, 20, size=2)
            sw, sl = proportional_split(size, bw, bl)
            e = mptcp_energy(sw, sl, bw, bl, 0.8485, established={"wifi", "lte"}).e_total
            lines.append(",".join(["down"] + [repr(float(v)) for v in (sw, sl, bw, bl, e)]))
        src = tmp_path / "g.csv"
        src.write_text("\n".join(lines) + "\n")
        out = tmp_path / "gamma.cfg"
        assert main(["fit", str(src), "--mode", "gamma", "--out", str(out)]) == 0
        assert float(parse_kv(out.read_text())["gamma.down"]) == pytest.approx(0.8485, abs=1e-3)
        curve = (tmp_path / "gamma_mse.csv").read_text().splitlines()
        assert curve[0] == "direction,gamma,mse" and len(curve) == 10001

    def test_empty_file(self, tmp_path, caplog):
        src = tmp_path / "empty.csv"
        src.write_text("")
        assert main(["fit", str(src), "--mode", "power_law"]) != 0
        assert "empty" in caplog.text

    def test_mode_mismatch(self, tmp_path):
        src = tmp_path / "g.csv"
        src.write_text("direction,s_wifi,s_lte,b_wifi,b_lte,total_j\ndown,1,1,1,1,1\n")
        assert main(["fit", str(src), "--mode", "power_law"]) == 2


class TestEstimate:
    def test_proportional_4mib(self, capsys):
        assert main(["estimate", "--size", str(4 * MIB), "--b-wifi", "5", "--b-lte", "10"]) == 0
        out = kv_output(capsys)
        assert float(out["e_total"]) == pytest.approx(7.61, abs=5e-3)
        assert float(out["theta"]) == pytest.approx(1.0)

    def test_wifi_only_split(self, capsys):
        assert main(["estimate", "--s-wifi", str(3 * MIB), "--s-lte", "0",
                     "--b-wifi", "6", "--b-lte", "10"]) == 0
        want = single_path_energy(default_config().profiles["wifi"], "down", 3 * MIB, 6.0)
        assert float(kv_output(capsys)["e_total"]) == pytest.approx(want)

    def test_bad_arguments(self):
        assert main(["estimate", "--b-wifi", "5", "--b-lte", "10"]) == 2
        assert main(["estimate", "--size", "10", "--b-wifi", "0", "--b-lte", "10"]) == 2


class TestRegion:
    def test_one_cell(self, capsys):
        assert main(["region", "--wifi-range", "12", "12", "--lte-range", "5", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "b_wifi_mbps,b_lte_mbps,ratio,label"
        assert len(lines) == 2 and lines[1].endswith(",wifi_only")

    def test_deterministic_file(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert main(["region", "--mode", "total", "--file-size", str(8 * MIB),
                         "--step", "1", "--wifi-range", "1", "10", "--lte-range", "1", "10",
                         "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 101

    def test_total_needs_size(self):
        assert main(["region", "--mode", "total"]) == 2


def _scenario_file(tmp_path, **kv):
    p = tmp_path / "sc.cfg"
    p.write_text("".join(f"{k} = {v}\n" for k, v in kv.items()))
    return p


class TestRun:
    def test_prints_summary(self, tmp_path, capsys):
        sc = _scenario_file(tmp_path, kind="static", wifi_mbps=5, file_size_bytes=2 * MIB)
        assert main(["run", str(sc), "--policy", "emptcp"]) == 0
        out = kv_output(capsys)
        assert out["policy"] == "emptcp" and int(out["bytes_downloaded"]) == 2 * MIB

    def test_writes_directory(self, tmp_path):
        sc = _scenario_file(tmp_path, kind="mobility_trace", trace="synthetic", duration_s=60)
        out = tmp_path / "r"
        assert main(["run", str(sc), "--policy", "mptcp", "--out", str(out)]) == 0
        assert (out / "energy.csv").read_text().startswith("time_s,policy,cumulative_j\n")
        assert (out / "throughput.csv").read_text().startswith("time_s,path,mbps\n")
        assert (out / "summary.kv").exists() and (out / "decisions.csv").exists()

    def test_timeout_exit_code(self, tmp_path):
        trace = tmp_path / "t.csv"
        trace.write_text("time_s,wifi_bw_mbps,lte_bw_mbps\n0,0,0\n10,0,0\n")
        sc = _scenario_file(tmp_path, kind="mobility_trace", trace="t.csv",
                            file_size_bytes=MIB)
        assert main(["run", str(sc), "--policy", "tcp_wifi"]) == 1

    def test_bad_scenario(self, tmp_path):
        sc = _scenario_file(tmp_path, kind="nonsense")
        assert main(["run", str(sc), "--policy", "mptcp"]) == 2


class TestSweep:
    def _matrix(self, tmp_path):
        m = {"runs": [
            {"name": "static_low", "scenario": {"kind": "static", "wifi_mbps": 0.8,
                                                "file_size_bytes": 4 * MIB},
             "policies": ["mptcp", "emptcp", "tcp_wifi"], "seeds": [0, 1]},
            {"name": "mob", "scenario": {"kind": "mobility_trace", "trace": "synthetic",
                                         "duration_s": 60},
             "policies": ["mptcp", "emptcp"], "seeds": [0]},
        ]}
        p = tmp_path / "m.json"
        p.write_text(json.dumps(m))
        return p

    def test_summary_and_parallel_determinism(self, tmp_path):
        m = self._matrix(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["sweep", str(m), "--out", str(a)]) == 0
        assert main(["sweep", str(m), "--out", str(b), "--workers", "2"]) == 0
        sa = (a / "summary.csv").read_text()
        assert sa == (b / "summary.csv").read_text()
        rows = sa.splitlines()
        assert rows[0].split(",") == SUMMARY_HEADER and len(rows) == 1 + 8
        mptcp_row = next(r for r in rows if r.startswith("static_low,mptcp,0,"))
        assert mptcp_row.split(",")[-3:] == ["1.000000"] * 3
        for sub in ("static_low/emptcp/seed1", "mob/mptcp/seed0"):
            assert (a / sub / "energy.csv").read_bytes() == (b / sub / "energy.csv").read_bytes()

    def test_single_run(self, tmp_path):
        p = tmp_path / "one.json"
        p.write_text(json.dumps({"runs": [{"scenario": {"kind": "static", "wifi_mbps": 5,
                                                        "file_size_bytes": MIB},
                                           "policies": ["tcp_wifi"]}]}))
        out = tmp_path / "o"
        assert main(["sweep", str(p), "--out", str(out)]) == 0
        assert (out / "static" / "tcp_wifi" / "seed0" / "summary.kv").exists()
        assert len((out / "summary.csv").read_text().splitlines()) == 2

    def test_failure_recorded(self, tmp_path):
        trace = tmp_path / "dead.csv"
        trace.write_text("time_s,wifi_bw_mbps,lte_bw_mbps\n0,0,0\n5,0,0\n")
        p = tmp_path / "f.json"
        p.write_text(json.dumps({"runs": [
            {"name": "dead", "scenario": {"kind": "mobility_trace", "trace": "dead.csv",
                                          "file_size_bytes": MIB}, "policies": ["mptcp"]},
            {"name": "ok", "scenario": {"kind": "static", "wifi_mbps": 5,
                                        "file_size_bytes": MIB}, "policies": ["mptcp"]}]}))
        out = tmp_path / "o"
        assert main(["sweep", str(p), "--out", str(out)]) == 1
        fails = (out / "failures.csv").read_text().splitlines()
        assert len(fails) == 2 and fails[1].startswith("dead,mptcp,0,")

    @pytest.mark.parametrize("matrix", [{}, {"runs": []},
                                        {"runs": [{"scenario": {"kind": "static", "wifi_mbps": 1},
                                                   "policies": ["bogus"]}]}])
    def test_invalid_matrix(self, tmp_path, matrix):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(matrix))
        assert main(["sweep", str(p), "--out", str(tmp_path / "o")]) == 2
