import json
import os
import subprocess
import sys

import numpy as np
import pytest

from eikolab.errors import ConfigurationError
from eikolab.scenario import PROBES, load_config, run_scenario, validate_config

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def tiny_config(**over):
    raw = {
        "name": "tiny",
        "seed": 0,
        "domain": {"origin": [-0.5, -0.5], "extent": [1.0, 1.0], "n": 32, "margin": 0.2},
        "generator": {"kind": "planar", "direction": [0.0, 1.0]},
        "entropies": ["sigma_e1e2", "sigma_eps1eps2"],
        "bump": {"center": [0.0, 0.0], "radius": 0.2},
        "ladder": {"n": [16, 32], "eps_over_h": 4.0},
        "probes": ["production_ladder", "gamma_roundtrip"],
    }
    raw.update(over)
    return raw


def test_validate_config_reports_field_path():
    bad = tiny_config()
    bad["domain"] = {"origin": [0, 0], "extent": [1.0, 1.0], "n": 2}
    with pytest.raises(ConfigurationError) as err:
        validate_config(bad)
    assert "domain.n" in str(err.value)


def test_validate_rejects_unknown_probe():
    with pytest.raises(ConfigurationError):
        validate_config(tiny_config(probes=["nonsense"]))


def test_validate_rejects_non_dyadic_ladder():
    cfg = tiny_config()
    cfg["ladder"]["n"] = [16, 24]
    with pytest.raises(ConfigurationError):
        validate_config(cfg)


def test_validate_rejects_unresolved_smoothing():
    cfg = tiny_config()
    cfg["ladder"]["eps_over_h"] = 2.0
    with pytest.raises(ConfigurationError):
        validate_config(cfg)


def test_entropy_selection_by_name():
    cfg = tiny_config(entropies=["sigma_e1e2", "harmonic:z1*z2", "xi:0.6,0.8:4"])
    validate_config(cfg)
    from eikolab.scenario import ScenarioConfig
    ents = ScenarioConfig(cfg).entropies()
    assert [name for name, _ in ents] == cfg["entropies"]
    with pytest.raises(ConfigurationError):
        validate_config(tiny_config(entropies=["unknown_entropy"]))


def test_empty_probe_list_gives_metadata_only(tmp_path):
    cfg = tiny_config(probes=[])
    rep = run_scenario(cfg, output_dir=str(tmp_path / "out"))
    assert rep.all_passed and not rep.verdicts and not rep.tables
    doc = json.loads((tmp_path / "out" / "report.json").read_text())
    assert doc["metadata"]["package"] == "eikolab"


def _tree_bytes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in sorted(files):
            p = os.path.join(dirpath, f)
            out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


@pytest.mark.parametrize("name", ["planar_smoke", "kcurve_identities"])
def test_scenario_reruns_are_byte_identical(tmp_path, name):
    cfg = load_config(os.path.join(SCENARIO_DIR, f"{name}.json"))
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_scenario(cfg, output_dir=str(a))
    run_scenario(cfg, output_dir=str(b))
    ta, tb = _tree_bytes(a), _tree_bytes(b)
    assert set(ta) == set(tb) and ta, "no outputs written"
    for k in ta:
        assert ta[k] == tb[k], f"output {k} differs between reruns"


def test_shipped_probe_coverage():
    covered = set()
    for fname in os.listdir(SCENARIO_DIR):
        if fname.endswith(".json") and fname != "schema.json":
            with open(os.path.join(SCENARIO_DIR, fname)) as fh:
                covered.update(json.load(fh)["probes"])
    assert covered == set(PROBES), f"missing probes: {set(PROBES) - covered}"


def test_shipped_scenarios_validate():
    for fname in os.listdir(SCENARIO_DIR):
        if fname.endswith(".json"):
            load_config(os.path.join(SCENARIO_DIR, fname))


@pytest.mark.parametrize("name", ["vortex_lab", "roof_lab"])
def test_shipped_labs_pass(tmp_path, name):
    cfg = load_config(os.path.join(SCENARIO_DIR, f"{name}.json"))
    rep = run_scenario(cfg, output_dir=str(tmp_path / name))
    failed = [v for v in rep.verdicts if not v.passed]
    assert not failed, [f"{v.probe}: {v.check} = {v.measured}" for v in failed]
    # plots were emitted and contain the expected SVGs
    svgs = [f for f in os.listdir(tmp_path / name) if f.endswith(".svg")]
    assert "production_density.svg" in svgs
    assert "lipschitz_map.svg" in svgs
    assert "beltrami_residual.svg" in svgs


def test_kcurve_plot_matches_table(tmp_path):
    cfg = load_config(os.path.join(SCENARIO_DIR, "kcurve_identities.json"))
    rep = run_scenario(cfg, output_dir=str(tmp_path / "k"))
    csv_lines = (tmp_path / "k" / "kcurve.csv").read_text().strip().split("\n")
    assert csv_lines[0].startswith("alpha,f,g,ratio")
    assert len(csv_lines) == 1 + len(rep.tables["kcurve"])
    assert (tmp_path / "k" / "kcurve.svg").exists()


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _run_cli(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([sys.executable, "-m", "eikolab.cli", *args],
                          capture_output=True, text=True, env=e)


def test_cli_run_and_report(tmp_path):
    out = tmp_path / "run"
    res = _run_cli("run", os.path.join(SCENARIO_DIR, "planar_smoke.json"),
                   "--output", str(out))
    assert res.returncode == 0, res.stderr
    assert "[PASS]" in res.stdout
    res = _run_cli("report", str(out))
    assert res.returncode == 0
    assert "planar_smoke" in res.stdout


def test_cli_set_override(tmp_path):
    out = tmp_path / "run"
    res = _run_cli("run", os.path.join(SCENARIO_DIR, "planar_smoke.json"),
                   "--output", str(out), "--set", "domain.n=16",
                   "--set", "ladder.n=[16]")
    assert res.returncode == 0, res.stderr
    doc = json.loads((out / "report.json").read_text())
    assert doc["config"]["domain"]["n"] == 16


def test_cli_output_root_env(tmp_path):
    res = _run_cli("run", os.path.join(SCENARIO_DIR, "planar_smoke.json"),
                   env={"EIKOLAB_OUTPUT_ROOT": str(tmp_path)})
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "planar_smoke" / "report.json").exists()


def test_cli_kcurve(tmp_path):
    path = tmp_path / "curve.csv"
    res = _run_cli("kcurve", "--samples", "20000", "--output", str(path))
    assert res.returncode == 0, res.stderr
    assert "certified min f/g^2" in res.stdout
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "alpha,f,g,ratio" and len(lines) == 20001


def test_cli_identities():
    res = _run_cli("identities")
    assert res.returncode == 0, res.stderr
    assert "[PASS]" in res.stdout and "[FAIL]" not in res.stdout


# ---------------------------------------------------------------------------
# plots are deterministic on fixed data
# ---------------------------------------------------------------------------

def test_heatmap_constant_field_degenerate_range():
    from eikolab.plots import heatmap_svg
    svg = heatmap_svg(np.full((20, 20), 3.5), title="flat")
    assert "min=3.5 max=3.5" in svg


def test_svg_emitters_deterministic():
    from eikolab.plots import heatmap_svg, loglog_svg
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((40, 40))
    mask = rng.random((40, 40)) > 0.05
    assert heatmap_svg(vals, mask, "x") == heatmap_svg(vals, mask, "x")
    series = {"a": [(1e-3, 2.0), (1e-2, 4.0)], "b": [(1e-3, 1.0), (1e-2, 8.0)]}
    assert loglog_svg(series, "t") == loglog_svg(series, "t")
