import json

import pytest

from urllc_evt.cli import main
from urllc_evt.experiment import CSV_HEADER, ExperimentConfig
from urllc_evt.interference import InterferenceTrace
from urllc_evt.mixture import MixturePredictor


@pytest.fixture
def small_config(tmp_path):
    cfg = ExperimentConfig(num_inr_draws=2, runtime_slots=1000, training_samples=300,
                           target_outages=(1e-2, 1e-4))
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg.to_dict()))
    return p


def test_run_writes_outputs(small_config, tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "--config", str(small_config), "--out", str(out),
                 "--methods", "mixture,genie", "--seed", "5"]) == 0
    lines = (out / "trials.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 2 * 2 * 2 * 2
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["master_seed"] == 5
    assert "genie" in capsys.readouterr().out


def test_sweep_index_is_ordered(small_config, tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep-training", "--config", str(small_config), "--out", str(out),
                 "--methods", "genie", "--sizes", "50,300"]) == 0
    index = json.loads((out / "sweep.json").read_text())
    assert [e["training_samples"] for e in index] == [50, 300]
    assert (out / "n50" / "trials.csv").exists()


def test_trace_and_train(tmp_path):
    trace = tmp_path / "t.csv"
    assert main(["trace", "--length", "2000", "--seed", "3", "--out", str(trace)]) == 0
    assert len(InterferenceTrace.from_csv(trace).values) == 2000
    model = tmp_path / "m.json"
    assert main(["train", str(trace), "--out", str(model)]) == 0
    assert MixturePredictor.load(model).num_states == 15


def test_errors_exit_with_code_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err
