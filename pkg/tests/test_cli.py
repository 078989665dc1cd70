import json

import numpy as np
import pytest

from cineqc.cli import main
from cineqc.dataio import read_dataset


def run(argv):
    return main([str(a) for a in argv])


def test_gen_writes_labeled_dataset(tmp_path):
    out = tmp_path / "data.cine"
    assert run(["gen", "--n-clean", 4, "--n-artefact", 2, "--size", 32, "--frames", 8,
                "--seed", 1, "--out", out]) == 0
    samples = read_dataset(out)
    assert len(samples) == 6
    assert sum(s.label == 0 for s in samples) == 4
    assert all(s.origin == 0 for s in samples)
    assert samples[0].seq.shape == (8, 32, 32)


def test_gen_then_identity_corrupt_preserves_payloads(tmp_path):
    src = tmp_path / "src.cine"
    dst = tmp_path / "dst.cine"
    run(["gen", "--n-clean", 3, "--n-artefact", 0, "--size", 24, "--frames", 6,
         "--seed", 2, "--out", src])
    assert run(["corrupt", src, "--z", 3, "--offset", 0, "--phase", 0, "--out", dst]) == 0
    a = read_dataset(src)
    b = read_dataset(dst)
    for s1, s2 in zip(a, b):
        np.testing.assert_allclose(s2.seq, s1.seq, atol=1e-9)
        assert s2.label == 1 and s2.origin == 1


def test_corrupt_changes_moving_sequences(tmp_path):
    src = tmp_path / "src.cine"
    dst = tmp_path / "dst.cine"
    run(["gen", "--n-clean", 2, "--n-artefact", 0, "--size", 24, "--frames", 6,
         "--seed", 3, "--out", src])
    run(["corrupt", src, "--z", 3, "--offset", "random", "--phase", "random",
         "--seed", 4, "--out", dst])
    a = read_dataset(src)
    b = read_dataset(dst)
    assert max(np.abs(s2.seq - s1.seq).mean() for s1, s2 in zip(a, b)) > 1e-4


def test_roi_crops_dataset(tmp_path, capsys):
    src = tmp_path / "src.cine"
    dst = tmp_path / "roi.cine"
    pgm = tmp_path / "pgm"
    run(["gen", "--n-clean", 2, "--n-artefact", 1, "--size", 64, "--frames", 8,
         "--seed", 5, "--out", src])
    assert run(["roi", src, "--crop-size", 32, "--pgm-dir", pgm, "--out", dst]) == 0
    cropped = read_dataset(dst)
    assert all(s.seq.shape == (8, 32, 32) for s in cropped)
    assert (pgm / "seq000_harmonic.pgm").exists()
    out = capsys.readouterr().out
    assert "center=" in out


def test_train_predict_cycle(tmp_path, capsys):
    data = tmp_path / "train.cine"
    model = tmp_path / "model.cqcm"
    hist = tmp_path / "history.json"
    run(["gen", "--n-clean", 8, "--n-artefact", 8, "--size", 16, "--frames", 8,
         "--seed", 6, "--out", data])
    tc = {"batch_size": 8, "max_epochs": 4, "patience_epochs": 3, "dropout_p": 0.0,
          "validation_frac": 0.2}
    tc_path = tmp_path / "tc.json"
    tc_path.write_text(json.dumps(tc))
    assert run(["train", data, "--train-config", tc_path, "--max-shift-frac", 0,
                "--no-balance", "--seed", 7, "--out", model, "--history", hist]) == 0
    assert model.exists()
    assert "history" in json.loads(hist.read_text())

    assert run(["predict", model, data]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    pred_lines = [l for l in lines if "\t" in l]
    assert len(pred_lines) == 16
    idx, prob, label = pred_lines[0].split("\t")
    assert idx == "0" and 0.0 <= float(prob) <= 1.0 and label in ("good", "artefact")


def test_eval_classical_method(tmp_path, capsys):
    data = tmp_path / "data.cine"
    report = tmp_path / "report.json"
    run(["gen", "--n-clean", 8, "--n-artefact", 8, "--size", 16, "--frames", 8,
         "--seed", 8, "--out", data])
    assert run(["eval", data, "--method", "knn", "--k", 2, "--seed", 9,
                "--report", report]) == 0
    payload = json.loads(report.read_text())
    assert payload["method"] == "knn"
    assert payload["aggregate"]["tp"] + payload["aggregate"]["fn"] == 8


def test_empty_class_fails_cleanly(tmp_path, capsys):
    data = tmp_path / "empty.cine"
    model = tmp_path / "m.cqcm"
    run(["gen", "--n-clean", 0, "--n-artefact", 0, "--size", 16, "--frames", 4,
         "--seed", 0, "--out", data])
    assert read_dataset(data) == []
    assert run(["train", data, "--out", model]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file_fails_cleanly(tmp_path, capsys):
    assert run(["roi", tmp_path / "nope.cine", "--out", tmp_path / "x.cine"]) == 1
    assert "error:" in capsys.readouterr().err
