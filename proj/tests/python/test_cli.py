import json
import subprocess


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def test_compare_and_determinism(cli, configs, tmp_path):
    config = json.loads((configs / "ma1_compare.json").read_text())
    config.update(p_list=[40], replicates=2)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config))
    for name in ("a", "b"):
        res = run(cli, "compare", "--config", str(path), "--out", str(tmp_path / name), "--seed", "5")
        assert res.returncode == 0, res.stderr
    summary_a = (tmp_path / "a" / "summary.json").read_bytes()
    assert summary_a == (tmp_path / "b" / "summary.json").read_bytes()
    summary = json.loads(summary_a)
    assert [c["name"] for c in summary["cells"]] == ["tau0_p40", "tau1_p40", "tau2_p40"]
    assert json.loads((tmp_path / "a" / "config.json").read_text())["seed"] == 5
    for f in ("curve_tau1_p40.csv", "esd_tau2_p40_r1.csv", "timing.json"):
        assert (tmp_path / "a" / f).exists()


def test_config_error_exit_code(cli, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"c": -1}')
    assert run(cli, "esd", "--config", str(bad), "--out", str(tmp_path / "o")).returncode == 1
    bad.write_text("{not json")
    assert run(cli, "esd", "--config", str(bad), "--out", str(tmp_path / "o")).returncode == 1
    assert run(cli, "esd", "--config", str(tmp_path / "missing.json"), "--out", "x").returncode == 1
    assert run(cli).returncode == 1


def test_partial_failure_exit_code(cli, configs, tmp_path):
    config = json.loads((configs / "ma1_compare.json").read_text())
    config.update(p_list=[20, 400000], taus=[0], replicates=1)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config))
    res = run(cli, "compare", "--config", str(path), "--out", str(tmp_path / "o"))
    assert res.returncode == 2
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert [c["status"] for c in summary["cells"]] == ["ok", "failed"]


def test_other_subcommands(cli, configs, tmp_path):
    assert run(cli, "lsd", "--config", str(configs / "mp_lsd.json"), "--out", str(tmp_path / "lsd")).returncode == 0
    assert (tmp_path / "lsd" / "curve_tau0_c1.csv").exists()
    res = run(cli, "validate", "--config", str(configs / "ma1_compare.json"))
    assert res.returncode == 0
    assert json.loads(res.stdout)["passed"]
    sim = run(cli, "simulate", "--config", str(configs / "geometric_taper.json"), "--out", str(tmp_path / "sim"))
    assert sim.returncode == 0
    header = (tmp_path / "sim" / "path_p100_r0.bin").read_bytes().split(b"\n", 1)[0].decode()
    assert header.split()[:6] == ["HDLSD1", "100", "200", "5", "lag", "real"]
