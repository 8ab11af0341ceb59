import csv
import json

import numpy as np
import pytest

from qii.cli import main
from qii.loops import load_loop


def _read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


# --- verify ---

def test_verify_small_run(tmp_path):
    out = tmp_path / "run"
    code = main(["verify", "--m", "2", "--loops", "40", "--n", "512",
                 "--seed", "1", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "margins.csv")
    assert rows[0][:4] == ["index", "d_fs", "gamma_b", "weak_margin"]
    assert len(rows) == 41
    assert min(float(r[3]) for r in rows[1:]) >= -1e-6
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "verify"
    assert manifest["config"]["seed"] == 1
    assert manifest["version"]


def test_verify_strong_columns(tmp_path):
    out = tmp_path / "run"
    code = main(["verify", "--m", "2", "--loops", "10", "--n", "512",
                 "--seed", "2", "--strong", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "margins.csv")
    assert rows[0][-2:] == ["strong_margin", "n_subloops"]


def test_verify_single_band_usage_error(tmp_path):
    assert main(["verify", "--m", "1", "--out", str(tmp_path / "x")]) == 1


def test_verify_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["verify", "--m", "3", "--loops", "12", "--n", "256", "--seed", "5",
          "--out", str(a)])
    main(["verify", "--m", "3", "--loops", "12", "--n", "256", "--seed", "5",
          "--out", str(b)])
    assert (a / "margins.csv").read_text() == (b / "margins.csv").read_text()


def test_verify_workers_match_serial(tmp_path, monkeypatch):
    serial, parallel = tmp_path / "s", tmp_path / "p"
    main(["verify", "--m", "2", "--loops", "16", "--n", "256", "--seed", "3",
          "--out", str(serial)])
    monkeypatch.setenv("QII_THREADS", "2")
    main(["verify", "--m", "2", "--loops", "16", "--n", "256", "--seed", "3",
          "--out", str(parallel)])
    assert (serial / "margins.csv").read_text() == (parallel / "margins.csv").read_text()


# --- figure1 ---

def test_figure1_tables(tmp_path):
    out = tmp_path / "fig"
    code = main(["figure1", "--n-list", "3,4,6,10000", "--n-per-edge", "16",
                 "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "planar.csv")
    quotients = {int(r[0]): float(r[3]) for r in rows[1:]}
    assert quotients[3] == pytest.approx(1.653, abs=1e-3)
    assert quotients[4] == pytest.approx(1.273, abs=1e-3)
    assert quotients[6] == pytest.approx(1.103, abs=1e-3)
    assert quotients[10000] == pytest.approx(1.0, abs=1e-6)
    sph = _read_csv(out / "spherical.csv")
    assert sph[-1][0] == "circle"
    assert float(sph[-1][3]) == pytest.approx(1.0, abs=1e-12)
    assert (out / "figure1.svg").read_text().startswith("<svg")


def test_figure1_spherical_quotient_decreases(tmp_path):
    out = tmp_path / "fig"
    main(["figure1", "--n-list", "3,8,64", "--n-per-edge", "64", "--out", str(out)])
    rows = _read_csv(out / "spherical.csv")
    qs = [float(r[3]) for r in rows[1:-1]]
    assert qs[0] > qs[1] > qs[2] > 1.0
    assert qs[2] == pytest.approx(1.0, abs=1e-2)


# --- models ---

def test_models_ssh_topological(tmp_path):
    out = tmp_path / "m"
    code = main(["models", "--model", "ssh", "--v", "0", "--w", "1",
                 "--nk", "512", "--out", str(out), "--svg"])
    assert code == 0
    rows = _read_csv(out / "models.csv")
    assert float(rows[1][4]) == pytest.approx(np.pi, abs=1e-6)
    assert float(rows[1][5]) == pytest.approx(np.pi, abs=1e-6)
    assert (out / "models.svg").exists()


def test_models_rhombohedral_aggregate(tmp_path):
    out = tmp_path / "m"
    code = main(["models", "--model", "rhombohedral", "--layers", "3",
                 "--ef", "1", "--nk", "768", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "models.csv")
    agg = [r for r in rows[1:] if r[2] == "aggregate"][0]
    assert float(agg[4]) == pytest.approx(3 * np.pi, abs=1e-5)
    assert float(agg[5]) == pytest.approx(3 * np.pi, abs=1e-5)


def test_models_json_config_file(tmp_path):
    cfg = tmp_path / "model.json"
    cfg.write_text('{"kind": "ssh", "parameters": {"v": 2.0, "w": 1.0}}')
    out = tmp_path / "m"
    code = main(["models", "--model-json", str(cfg), "--nk", "256", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "models.csv")
    assert float(rows[1][5]) == pytest.approx(0.0, abs=1e-6)  # trivial phase


# --- apps ---

def test_apps_eph_dirac(tmp_path):
    out = tmp_path / "a"
    code = main(["apps", "--app", "eph", "--model", "dirac", "--vf", "1",
                 "--ef", "1", "--nk", "128", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "chain.csv")
    values = [float(r[1]) for r in rows[1:]]
    np.testing.assert_allclose(values, np.pi / 2, atol=1e-6)
    report = json.loads((out / "report.json").read_text())
    assert report["monotone"] is True


def test_apps_wannier_creutz(tmp_path):
    out = tmp_path / "a"
    code = main(["apps", "--app", "wannier", "--model", "creutz", "--t", "1",
                 "--nk", "64", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "chain.csv")
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]], 0.25, atol=1e-6)


def test_apps_speed_demo(tmp_path):
    out = tmp_path / "a"
    code = main(["apps", "--app", "speed", "--theta-c", "1.0", "--ratio", "40",
                 "--steps", "4000", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "chain.csv")
    tau, bound = float(rows[1][1]), float(rows[2][1])
    assert tau > bound > 0


def test_apps_sfweight_config_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "creutz", "t": 1.0, "nk": 64}))
    out = tmp_path / "a"
    code = main(["apps", "--app", "sfweight", "--config", str(cfg),
                 "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "chain.csv")
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]],
                               1.0 / (16 * np.pi), atol=1e-8)


def test_apps_config_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "ssh", "v": 0.0, "w": 1.0, "nk": 64}))
    out = tmp_path / "a"
    code = main(["apps", "--app", "sfweight", "--config", str(cfg),
                 "--v", "2.0", "--out", str(out)])  # flag overrides config
    assert code == 0
    rows = _read_csv(out / "chain.csv")
    assert float(rows[3][1]) == pytest.approx(0.0, abs=1e-12)  # gamma = 0 branch


def test_apps_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["apps", "--app", "wannier", "--config", str(cfg),
                 "--out", str(tmp_path / "x")]) == 1


# --- search ---

def test_search_cli_run_record(tmp_path):
    out = tmp_path / "s"
    code = main(["search", "--m", "2", "--k", "1", "--n", "128", "--budget",
                 "2000", "--restarts", "2", "--seed", "1", "--out", str(out)])
    assert code == 0
    record = json.loads((out / "run.json").read_text())
    assert record["best_margin"] >= -1e-5
    assert record["config"]["budget"] == 2000
    assert record["evals"] <= 2000 + 2 * 3  # simplex may finish its iteration
    assert not record["violation"]


def test_search_cli_seed_list_merges(tmp_path):
    out = tmp_path / "s"
    code = main(["search", "--m", "2", "--k", "1", "--n", "128", "--budget",
                 "800", "--restarts", "1", "--seeds", "1,2", "--out", str(out)])
    assert code == 0
    record = json.loads((out / "run.json").read_text())
    assert record["seeds"] == [1, 2]
    assert len(record["runs"]) == 2
    margins = [r["best_margin"] for r in record["runs"]]
    assert record["best_margin"] == min(margins)


def test_search_cli_violation_discovery_path(tmp_path, monkeypatch):
    # no real violation is known; force one to exercise the exit-2 contract
    import qii.cli as cli
    from qii.loops import FourierLoopSpec
    from qii.search import SearchResult

    coeffs = np.zeros((1, 3), dtype=complex)
    coeffs[0, 2] = 1.0
    fake = SearchResult(
        best_margin=-1e-3, best_spec=FourierLoopSpec(2, coeffs, 1, 64),
        evals=123, history=((1, -1e-3),), status="completed",
        violation=True, margin_at_n=-1e-3)
    monkeypatch.setattr(cli, "minimize_margin", lambda cfg: fake)
    out = tmp_path / "s"
    code = main(["search", "--m", "2", "--k", "1", "--n", "64", "--budget",
                 "200", "--restarts", "1", "--out", str(out)])
    assert code == 2
    assert (out / "counterexample_loop.csv").exists()
    record = json.loads((out / "run.json").read_text())
    assert record["violation"] is True


def test_models_table_csv(tmp_path):
    table = tmp_path / "table.csv"
    ks = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    with open(table, "w") as fh:
        fh.write("k,nx,ny,nz\n")
        for k in ks:
            fh.write(f"{k},{np.cos(k)},{np.sin(k)},0.0\n")  # winding-1 equator
    out = tmp_path / "m"
    code = main(["models", "--table-csv", str(table), "--nk", "256",
                 "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "models.csv")
    assert float(rows[1][4]) == pytest.approx(np.pi, abs=1e-3)
    assert float(rows[1][5]) == pytest.approx(np.pi, abs=1e-3)


# --- loop-io ---

def test_loop_io_roundtrip(tmp_path, capsys):
    path = tmp_path / "loop.csv"
    assert main(["loop-io", "export", str(path), "--generator", "great-circle",
                 "--axis", "0,0,1", "--n", "256", "--turns", "2",
                 "--out", str(tmp_path / "o1")]) == 0
    loop, meta = load_loop(path)
    assert loop.n == 256 and meta["generator"] == "great-circle"
    capsys.readouterr()
    assert main(["loop-io", "import", str(path), "--split",
                 "--out", str(tmp_path / "o2")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["subloops"]) == 2
    for sub in doc["subloops"]:
        assert sub["d_fs"] == pytest.approx(np.pi, abs=1e-6)
        assert sub["gamma_b"] == pytest.approx(np.pi, abs=1e-6)


def test_loop_io_import_missing_file(tmp_path):
    assert main(["loop-io", "import", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "o")]) == 2


# --- misc ---

def test_help_exits_zero():
    assert main(["--help"]) == 0


def test_unknown_command_usage():
    assert main(["frobnicate"]) == 1
