import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from compactseg.cli import main
from compactseg.codebook import load_codebook
from compactseg.toytrain import bundled_config, save_config
from compactseg.volumes import read_label_volume, read_prob_volume, write_label_volume


@pytest.fixture
def labels(tmp_path):
    rng = np.random.default_rng(0)
    vol = rng.integers(0, 20, (6, 5, 4)).astype(np.uint16)
    write_label_volume(tmp_path / "lab.raw", vol)
    return vol


def _small_config(path, head="binary"):
    cfg = bundled_config("standard").with_head(head)
    cfg.dataset.n_classes = 6
    cfg.dataset.height = cfg.dataset.width = 12
    cfg.dataset.n_train, cfg.dataset.n_val = 3, 2
    cfg.model.hidden1 = cfg.model.hidden2 = 4
    cfg.optimizer.epochs = 2
    cfg.eval_every = 1
    save_config(cfg, path)
    return path


def test_codebook_build_and_inspect(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["codebook", "build", "--classes", "108", "--scheme", "hamming74", "--out", "cb.json"]) == 0
    cb = load_codebook(tmp_path / "cb.json")
    assert (cb.n_data_bits, cb.n_encoded_bits) == (7, 14)
    assert (tmp_path / "cb.json.manifest.json").exists()
    capsys.readouterr()
    assert main(["codebook", "inspect", "--in", "cb.json"]) == 0
    out = capsys.readouterr().out
    assert "n_encoded_bits: 14" in out and "54/7" in out


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main([]) == 1
    assert main(["codebook", "build", "--classes", "1", "--out", str(tmp_path / "x.json")]) == 1
    assert main(["codebook", "build", "--classes", "ten", "--out", "x"]) == 1
    assert main(["decode", "--probs", "missing.raw", "--codebook", "missing.json", "--out", "o.raw"]) == 1
    assert main(["corrupt", "--bits", "b.raw", "--flip-prob", "1.5", "--out", "o.raw"]) == 1
    assert "usage" in capsys.readouterr().err


def test_runtime_failure_exit_2(tmp_path):
    (tmp_path / "file").write_text("")
    assert main(["codebook", "build", "--classes", "8", "--out", str(tmp_path / "file" / "cb.json")]) == 2


def test_encode_decode_round_trip(tmp_path, labels):
    d = str(tmp_path)
    for scheme in ("vanilla", "hamming74"):
        assert main(["codebook", "build", "--classes", "20", "--scheme", scheme, "--seed", "2",
                     "--out", f"{d}/cb.json"]) == 0
        assert main(["encode", "--labels", f"{d}/lab.raw", "--codebook", f"{d}/cb.json", "--out", f"{d}/bits.raw"]) == 0
        bits = read_prob_volume(f"{d}/bits.raw")
        assert bits.shape[0] == (5 if scheme == "vanilla" else 14)
        for mode in ("hard", "soft"):
            assert main(["decode", "--probs", f"{d}/bits.raw", "--codebook", f"{d}/cb.json",
                         "--mode", mode, "--out", f"{d}/dec.raw"]) == 0
            assert np.array_equal(read_label_volume(f"{d}/dec.raw"), labels)


def test_decode_channel_mismatch(tmp_path, labels, capsys):
    d = str(tmp_path)
    main(["codebook", "build", "--classes", "20", "--out", f"{d}/a.json"])
    main(["codebook", "build", "--classes", "20", "--scheme", "hamming74", "--out", f"{d}/b.json"])
    main(["encode", "--labels", f"{d}/lab.raw", "--codebook", f"{d}/a.json", "--out", f"{d}/bits.raw"])
    assert main(["decode", "--probs", f"{d}/bits.raw", "--codebook", f"{d}/b.json", "--out", f"{d}/x.raw"]) == 1
    assert "channel count mismatch" in capsys.readouterr().err


def test_corrupt_records_flip_count(tmp_path, labels):
    d = str(tmp_path)
    main(["codebook", "build", "--classes", "20", "--out", f"{d}/cb.json"])
    main(["encode", "--labels", f"{d}/lab.raw", "--codebook", f"{d}/cb.json", "--out", f"{d}/bits.raw"])
    assert main(["corrupt", "--bits", f"{d}/bits.raw", "--flip-prob", "0.1", "--seed", "4",
                 "--out", f"{d}/noisy.raw"]) == 0
    man = json.loads((tmp_path / "noisy.raw.manifest.json").read_text())
    diff = read_prob_volume(f"{d}/bits.raw") != read_prob_volume(f"{d}/noisy.raw")
    assert man["extra"]["flip_count"] == int(diff.sum()) > 0
    assert man["seeds"] == {"corrupt": 4}


def test_assign_writes_report(tmp_path):
    d = str(tmp_path)
    assert main(["synth", "--classes", "10", "--out-dir", f"{d}/syn"]) == 0
    assert main(["assign", "--labels-dir", f"{d}/syn/train", "--n-seeds", "3", "--out", f"{d}/a/cb.json"]) == 0
    cb = load_codebook(f"{d}/a/cb.json")
    assert cb.n_classes == 10
    rows = list(csv.reader(open(f"{d}/a/cb_cost_report.csv")))
    assert rows[0][:4] == ["seed", "optimized_cost", "greedy_cost", "random_cost"]
    assert len(rows) == 1 + 3 + 1
    assert (tmp_path / "a" / "cb_adjacency.json").exists()


def test_assign_lists_unreadable_files(tmp_path, labels, capsys):
    (tmp_path / "bad.raw").write_bytes(b"\x00\x01")
    assert main(["assign", "--labels-dir", str(tmp_path), "--out", str(tmp_path / "cb.json")]) == 1
    err = capsys.readouterr().err
    assert "bad.raw" in err and "lab.raw" not in err


def test_train_eval_compare(tmp_path):
    d = str(tmp_path)
    for head in ("onehot", "binary"):
        cfg = _small_config(tmp_path / f"{head}.json", head)
        assert main(["train", "--config", str(cfg), "--out-dir", f"{d}/{head}"]) == 0
        assert (tmp_path / head / "model.npz").exists()
        log = list(csv.reader(open(tmp_path / head / "log.csv")))
        assert len(log) == 3
    # a second run into the same directory starts a fresh log
    assert main(["train", "--config", str(tmp_path / "binary.json"), "--out-dir", f"{d}/binary"]) == 0
    assert len(list(csv.reader(open(tmp_path / "binary" / "log.csv")))) == 3
    assert main(["eval", "--model", f"onehot={d}/onehot/model.npz", "--model", f"binary={d}/binary/model.npz",
                 "--compare", "onehot,binary", "--out-dir", f"{d}/ev"]) == 0
    for name in ("onehot_dsc.csv", "binary_summary.csv", "binary_size.csv", "boundary.csv",
                 "dsc_difference_onehot_minus_binary.csv"):
        assert (tmp_path / "ev" / name).exists()
    assert main(["eval", "--model", f"x={d}/binary/model.npz", "--compare", "x,y", "--out-dir", f"{d}/ev"]) == 1


def test_gradcheck_command(tmp_path, capsys):
    assert main(["gradcheck", "--heads", "binary", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5 and "FAIL" not in out
    assert json.loads((tmp_path / "manifest.json").read_text())["command"] == "gradcheck"


def test_rerun_is_bit_exact(tmp_path, labels):
    d = str(tmp_path)
    cfg = _small_config(tmp_path / "cfg.json", "tree")
    steps = [
        ["codebook", "build", "--classes", "20", "--seed", "5", "--out", f"{d}/cb.json"],
        ["encode", "--labels", f"{d}/lab.raw", "--codebook", f"{d}/cb.json", "--out", f"{d}/bits.raw"],
        ["corrupt", "--bits", f"{d}/bits.raw", "--flip-prob", "0.05", "--seed", "1", "--out", f"{d}/noisy.raw"],
        ["decode", "--probs", f"{d}/noisy.raw", "--codebook", f"{d}/cb.json", "--mode", "soft", "--out", f"{d}/dec.raw"],
        ["train", "--config", str(cfg), "--out-dir", f"{d}/run"],
    ]
    manifests = [f"{d}/cb.json.manifest.json", f"{d}/bits.raw.manifest.json", f"{d}/noisy.raw.manifest.json",
                 f"{d}/dec.raw.manifest.json", f"{d}/run/manifest.json"]
    for argv in steps:
        assert main(argv) == 0
    first = {m: json.loads(open(m).read())["outputs"] for m in manifests}
    for path in {p for outs in first.values() for p in outs}:
        os.remove(path)
    for m in manifests:
        saved = tmp_path / "saved.json"
        saved.write_text(open(m).read())
        assert main(["rerun", str(saved)]) == 0
    for m, outs in first.items():
        assert json.loads(open(m).read())["outputs"] == outs
        assert all(h is not None for h in outs.values())


def test_console_script_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "compactseg.cli", "codebook", "build", "--classes", "5",
                        "--out", str(tmp_path / "cb.json")], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    r = subprocess.run([sys.executable, "-m", "compactseg.cli", "nope"], capture_output=True, text=True)
    assert r.returncode == 1


def test_benchmark_command(tmp_path):
    cfg = _small_config(tmp_path / "cfg.json")
    assert main(["benchmark", "--config", str(cfg), "--heads", "onehot,binary,tree",
                 "--out-dir", str(tmp_path / "b"), "-v"]) == 0
    rows = list(csv.reader(open(tmp_path / "b" / "boundary.csv")))
    assert [r[0] for r in rows[1:]] == ["onehot", "binary", "tree"]
    assert (tmp_path / "b" / "dsc_difference_onehot_minus_binary_terciles.csv").exists()
    assert (tmp_path / "b" / "tree_model.npz").exists()
