import csv
import json

import pytest

from phononet.cli import main
from phononet.datasets import DATA_DIR, make_desk_lexicon
from phononet.exceptions import MissingSeries
from phononet.lexicon import write_lexicon
from phononet.serialize import emit_figure_data, read_stats_csv

TOY = str(DATA_DIR / "toy.tsv")


@pytest.fixture(scope="module")
def desk_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("lex") / "desk.tsv"
    write_lexicon(make_desk_lexicon(250, random_state=1), path)
    return str(path)


def read_rows(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_stats_toy(tmp_path):
    assert main(["stats", "--lexicon", TOY, "--out", str(tmp_path)]) == 0
    row = read_rows(tmp_path / "stats.csv")[0]
    assert row["L"] == "4" and row["gc"] == "4" and row["k_max"] == "3"
    assert list(row)[:10] == ["model", "L", "L0", "lr", "gc", "k_max", "CC", "a", "d", "d_max"]
    data = json.loads((tmp_path / "stats.json").read_text())
    assert data["reference"]["L0"] == 4
    assert read_rows(tmp_path / "degree_histogram.csv") == [
        {"k": "1", "count": "1"}, {"k": "2", "count": "2"}, {"k": "3", "count": "1"}]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 0 and len(manifest["lexicon_sha256"]) == 64


def test_missing_lexicon_writes_nothing(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["stats", "--lexicon", str(tmp_path / "nope.tsv"), "--out", str(out)]) == 1
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main(["stats", "--bogus"]) == 2
    assert main(["percolate", "--type", "7", "--lexicon", TOY]) == 2
    assert main(["stats", "--out", str(tmp_path)]) == 2


def test_model_error_exit_1(tmp_path, desk_file):
    # a target above the node count cannot be bracketed
    target = tmp_path / "t.csv"
    target.write_text("model,gc,L0,L\nx,100000,1,2\n")
    code = main(["calibrate", "f", "--lexicon", desk_file, "--target-from", str(target),
                 "--ensemble", "2", "--kmax", "none", "--out", str(tmp_path / "o")])
    assert code == 1 and not (tmp_path / "o").exists()


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("PHONONET_SEED", "42")
    monkeypatch.setenv("PHONONET_LEXICON", TOY)
    assert main(["build", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 42
    assert (tmp_path / "lexicon.tsv").read_text(encoding="utf-8").splitlines()[1] == "cat\tk æ t"
    assert main(["build", "--seed", "3", "--out", str(tmp_path / "b")]) == 0
    assert json.loads((tmp_path / "b" / "manifest.json").read_text())["seed"] == 3


def _outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_percolate_repeatable(tmp_path, desk_file):
    for name in ("a", "b"):
        assert main(["percolate", "--lexicon", desk_file, "--type", "2", "--ensemble", "3",
                     "--seed", "5", "--out", str(tmp_path / name)]) == 0
    assert _outputs(tmp_path / "a") == _outputs(tmp_path / "b")
    rows = read_stats_csv(tmp_path / "a" / "stats.csv")
    assert [r["model"] for r in rows] == ["type2/000", "type2/001", "type2/002",
                                          "type2/mean", "type2/sem"]
    assert (tmp_path / "a" / "degree_histogram_002.csv").exists()
    assert (tmp_path / "a" / "fig2_degree_type2.csv").exists()


def test_grow_outputs(tmp_path, desk_file):
    assert main(["grow", "--lexicon", desk_file, "--mode", "cp-eps", "--f", "0.5",
                 "--mc", "1.5", "--eps", "0.2", "--kmax", "text", "--out", str(tmp_path)]) == 0
    causes = {r["cause"]: int(r["count"]) for r in read_rows(tmp_path / "causes.csv")}
    trace = read_rows(tmp_path / "trace.csv")
    assert list(trace[0]) == ["step", "length", "degree", "cause"]
    rejected = sum(1 for r in trace if r["cause"])
    assert rejected == sum(causes.values()) - causes["stuck"]


def test_mcmc_outputs(tmp_path, desk_file):
    assert main(["mcmc", "--lexicon", desk_file, "--sweeps", "4", "--burn-in", "2",
                 "--out", str(tmp_path)]) == 0
    traj = read_rows(tmp_path / "trajectory.csv")
    assert list(traj[0]) == ["sweep", "k_max", "gc", "CC", "d"]
    assert [r["sweep"] for r in traj] == ["0", "1", "2", "3", "4"]
    rows = {r["model"]: r for r in read_stats_csv(tmp_path / "stats.csv")}
    assert rows["mcmc/final"]["L"] == rows["input"]["L"]


def test_calibrate_core_report(tmp_path, desk_file):
    assert main(["calibrate", "core", "--lexicon", desk_file, "--Wc", "4", "--grid", "0:2:1",
                 "--ensemble", "2", "--kmax", "none", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "calibration.json").read_text())
    assert [p["m_C"] for p in report["scan"]["points"]] == [0.0, 1.0, 2.0]
    assert (tmp_path / "fig5b_L0_Wc4.csv").exists()


def test_figure_data_requires_series(tmp_path):
    with pytest.raises(MissingSeries):
        emit_figure_data({}, "fig3a", tmp_path)
    with pytest.raises(MissingSeries):
        emit_figure_data({"degree": {}}, "fig2", tmp_path)
    paths = emit_figure_data({"f_sweep": [(0.0, 0.5, 0.01), (0.5, 0.9, 0.02)]}, "fig3a",
                             tmp_path)
    assert read_rows(paths[0])[1] == {"f": "0.5", "|G|/|G_target|": "0.9", "sem": "0.02"}
