import argparse
import hashlib
import json
import subprocess
import sys
import time

import pytest

from amids import cli, dataset
from amids.config import DEFAULT_SEED, RunConfig, load_config
from amids.errors import ConfigError

SMALL_MODEL = ["--hidden-layers", "6", "--folds", "3"]


def run(argv, capsys=None):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr() if capsys is not None else None
    return code, out


def digest(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_preprocess_fixture(tmp_path, fixture_path, capsys):
    t0 = time.perf_counter()
    code, out = run(["preprocess", "--data", fixture_path, "--output-dir", tmp_path], capsys)
    assert time.perf_counter() - t0 < 1.0
    assert code == 0
    assert "records: 1000" in out.out
    X, y = dataset.read_encoded_csv(tmp_path / "encoded.csv")
    assert X.shape == (1000, 41)
    report = json.loads((tmp_path / "encoding.json").read_text())
    assert report["normal"] + report["attack"] == 1000
    assert set(report["feature_stats"]) == set(dataset.FEATURE_NAMES)
    assert report["encoding"]["protocol_map"]["tcp"] == 2


def test_missing_file_exit_2(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    code, out = run(["preprocess", "--data", missing, "--output-dir", tmp_path], capsys)
    assert code == 2
    assert str(missing) in out.err


def test_parse_failure_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2,3\n")
    code, out = run(["preprocess", "--data", bad, "--output-dir", tmp_path], capsys)
    assert code == 1 and "line 1" in out.err


def test_unknown_activation_is_usage_error(fixture_path):
    proc = subprocess.run(
        [sys.executable, "-m", "amids", "train", "--data", fixture_path, "--activation", "swish"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "swish" in proc.stderr


def test_invalid_config_value_exit_2_before_training(tmp_path, fixture_path, capsys):
    code, out = run(["train", "--data", fixture_path, "--epochs", 0, "--output-dir", tmp_path], capsys)
    assert code == 2
    assert not (tmp_path / "model.json").exists()


def test_train_defaults_and_outputs(tmp_path, fixture_path, capsys):
    code, out = run(["train", "--data", fixture_path, "--output-dir", tmp_path], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "model.json").read_text())
    assert doc["model"]["layer_sizes"] == [41, 300, 300, 2]
    assert doc["model"]["activation"] == "sigmoid"
    trace = (tmp_path / "train_trace.csv").read_text().splitlines()
    assert trace[0] == "epoch,loss,accuracy" and len(trace) == 4
    assert "final training accuracy" in out.out


@pytest.mark.parametrize("act", ["sigmoid", "relu", "tanh"])
def test_train_activation_flag(tmp_path, fixture_path, act):
    code, _ = run(["train", "--data", fixture_path, "--output-dir", tmp_path, "--activation", act,
                   "--hidden-layers", "4", "--epochs", 1])
    assert code == 0
    assert json.loads((tmp_path / "model.json").read_text())["model"]["activation"] == act


def test_train_from_encoded_csv_matches_raw(tmp_path, fixture_path):
    run(["preprocess", "--data", fixture_path, "--output-dir", tmp_path])
    raw_dir, enc_dir = tmp_path / "raw", tmp_path / "enc"
    common = ["--hidden-layers", "5", "--epochs", 2]
    assert run(["train", "--data", fixture_path, "--output-dir", raw_dir, *common])[0] == 0
    assert run(["train", "--data", tmp_path / "encoded.csv", "--output-dir", enc_dir, *common])[0] == 0
    assert digest(raw_dir / "model.json") == digest(enc_dir / "model.json")


def test_config_file_and_flag_precedence(tmp_path, fixture_path, monkeypatch):
    # data paths resolve against the config file; output_dir against the cwd
    monkeypatch.chdir(tmp_path)
    ini = tmp_path / "run.ini"
    ini.write_text(f"[data]\ntrain = {fixture_path}\n[model]\nhidden_layers = 3\nepochs = 2\n[run]\noutput_dir = o\n")
    cfg = load_config(str(ini))
    assert cfg.hidden_layers == (3,) and cfg.epochs == 2 and cfg.seed == DEFAULT_SEED
    assert cfg.output_dir == "o"
    code, _ = run(["train", "--config", ini, "--epochs", 1])
    assert code == 0
    trace = (tmp_path / "o" / "train_trace.csv").read_text().splitlines()
    assert len(trace) == 2


def test_config_rejects_unknown_keys(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[model]\nlayers = 3\n")
    with pytest.raises(ConfigError):
        load_config(str(ini))
    with pytest.raises(ConfigError):
        RunConfig(train=(str(tmp_path / "absent.txt"),)).validate()


def test_evaluate_cross_validation(tmp_path, fixture_path, capsys):
    code, out = run(["evaluate", "--data", fixture_path, "--output-dir", tmp_path, *SMALL_MODEL, "--epochs", 2], capsys)
    assert code == 0
    lines = (tmp_path / "evaluation.csv").read_text().splitlines()
    assert len(lines) == 5 and lines[-1].startswith("mean,")


def test_evaluate_saved_model(tmp_path, fixture_path, stream_path, capsys):
    run(["train", "--data", fixture_path, "--output-dir", tmp_path, "--hidden-layers", "8", "--epochs", 2])
    code, out = run(["evaluate", "--model", tmp_path / "model.json", "--data", stream_path,
                     "--output-dir", tmp_path], capsys)
    assert code == 0 and "skipped" in out.err
    assert (tmp_path / "evaluation.csv").exists()


def test_sweep_epochs_grid(tmp_path, fixture_path):
    code, _ = run(["sweep", "--param", "epochs", "--grid", "2,10,50,100", "--data", fixture_path,
                   "--output-dir", tmp_path, "--hidden-layers", "3", "--folds", 2])
    assert code == 0
    lines = (tmp_path / "sweep_epochs_sigmoid.csv").read_text().splitlines()
    assert len(lines) == 5
    assert [l.split(",")[0] for l in lines[1:]] == ["2", "10", "50", "100"]
    assert (tmp_path / "sweep_epochs_sigmoid_timing.csv").exists()


def test_sweep_architecture_and_activations(tmp_path, fixture_path):
    code, _ = run(["sweep", "--param", "architecture", "--grid", "1x3,2x3", "--data", fixture_path,
                   "--output-dir", tmp_path, "--folds", 2, "--epochs", 1])
    assert code == 0
    rows = (tmp_path / "sweep_architecture_sigmoid.csv").read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["1x3", "2x3"]
    code, _ = run(["sweep", "--param", "packets", "--grid", "200,400", "--activations", "relu,tanh",
                   "--data", fixture_path, "--output-dir", tmp_path, *SMALL_MODEL, "--epochs", 1])
    assert code == 0
    assert (tmp_path / "sweep_packets_relu.csv").exists() and (tmp_path / "sweep_packets_tanh.csv").exists()


def test_sweep_bad_grid_exit_2(tmp_path, fixture_path, capsys):
    code, _ = run(["sweep", "--param", "architecture", "--grid", "2by5", "--data", fixture_path,
                   "--output-dir", tmp_path], capsys)
    assert code == 2


COMPARE = ["--folds", 3, "--trees", 5, "--mlp-epochs", 3, "--svm-max-train", 200]


def test_compare_deterministic(tmp_path, fixture_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["compare", "--data", fixture_path, "--output-dir", a, *COMPARE])[0] == 0
    assert run(["compare", "--data", fixture_path, "--output-dir", b, *COMPARE])[0] == 0
    assert digest(a / "compare.csv") == digest(b / "compare.csv")
    rows = (a / "compare.csv").read_text().splitlines()
    assert len(rows) == 5


def _alerts_without_time(path):
    out = []
    for line in open(path).read().splitlines():
        cells = line.split(",")
        out.append(",".join(cells[:1] + cells[2:]))
    return out


def test_monitor_deterministic_and_matches_evaluate(tmp_path, fixture_path, stream_path, capsys):
    run(["train", "--data", fixture_path, "--output-dir", tmp_path, "--hidden-layers", "8", "--epochs", 3])
    model = tmp_path / "model.json"
    logs = []
    for name in ("a.log", "b.log"):
        code, out = run(["monitor", "--model", model, "--input", stream_path, "--alerts-out", tmp_path / name,
                         "--summary-out", tmp_path / (name + ".json")], capsys)
        assert code == 0
        summary = json.loads(out.err)
        assert summary["alerts"] == len(open(tmp_path / name).read().splitlines())
        logs.append(_alerts_without_time(tmp_path / name))
    assert logs[0] == logs[1]


def test_monitor_stdin(tmp_path, fixture_path, stream_path):
    run(["train", "--data", fixture_path, "--output-dir", tmp_path, "--hidden-layers", "4", "--epochs", 1])
    with open(stream_path) as fh:
        proc = subprocess.run([sys.executable, "-m", "amids", "monitor", "--model", str(tmp_path / "model.json"),
                               "--role", "host"], stdin=fh, capture_output=True, text=True)
    assert proc.returncode == 0
    assert all(line.split(",")[2] == "host" for line in proc.stdout.splitlines())
    assert json.loads(proc.stderr)["records_seen"] == 200


def test_monitor_errors(tmp_path, capsys):
    code, out = run(["monitor", "--model", tmp_path / "none.json"], capsys)
    assert code == 2 and "none.json" in out.err
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, out = run(["monitor", "--model", bad], capsys)
    assert code == 2


def _iter_parsers(parser):
    yield parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                yield from _iter_parsers(sub)


def test_every_flag_is_documented():
    parser = cli.build_parser()
    for p in _iter_parsers(parser):
        text = p.format_help()
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                continue
            assert action.help, f"{p.prog}: {action.option_strings or action.dest} lacks help"
            for opt in action.option_strings:
                assert opt in text


def test_help_exits_zero():
    proc = subprocess.run([sys.executable, "-m", "amids", "compare", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--trees" in proc.stdout


def test_compare_on_a_sample(tmp_path, fixture_path):
    code, _ = run(["compare", "--data", fixture_path, "--output-dir", tmp_path, *COMPARE, "--packets", 300])
    assert code == 0
    code, _ = run(["compare", "--data", fixture_path, "--output-dir", tmp_path, *COMPARE, "--packets", 5000])
    assert code == 1
