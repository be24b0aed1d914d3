import json

import numpy as np
import pytest
from PIL import Image

from imgprov.cli import run
from imgprov.tensorstore import read_tensor, write_tensor


def _write_png(path, value=None, seed=None, side=64):
    if value is not None:
        arr = np.full((side, side, 3), int(value * 255), dtype=np.uint8)
    else:
        rng = np.random.default_rng(seed)
        arr = rng.integers(0, 256, size=(side, side, 3), dtype=np.uint8)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def _write_manifest(path, entries):
    with open(path, "w", encoding="utf-8") as fh:
        for name, label in entries:
            fh.write(json.dumps({"path": name, "label": label, "split": "train"}) + "\n")


def _cluster_embeddings(tmp_path, n_per=8, d=4, labels=("real", "dalle")):
    rng = np.random.default_rng(0)
    rows, vocab = [], []
    vocab_ids = {"real": 0, "sd21": 1, "sdxl": 2, "sd3": 3, "dalle": 4, "midjourney": 5}
    for k, lab in enumerate(labels):
        mean = np.zeros(d)
        mean[k] = 6.0
        rows.append(mean + rng.standard_normal((n_per, d)))
        vocab.extend([vocab_ids[lab]] * n_per)
    emb = tmp_path / "emb.tnsr"
    lab = tmp_path / "lab.tnsr"
    write_tensor(np.vstack(rows).astype(np.float32), emb)
    write_tensor(np.array(vocab, dtype=np.uint8), lab)
    return emb, lab


def _summary(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert run(["frobnicate"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_no_subcommand_is_usage_error(self):
        assert run([]) == 1

    def test_missing_file_is_data_error(self, tmp_path, capsys):
        assert run(["predict", "--model", str(tmp_path / "nope"),
                    "--input", str(tmp_path / "x.tnsr"),
                    "--out", str(tmp_path / "p.tnsr")]) == 2
        assert "data error" in capsys.readouterr().err

    def test_nonconvergence_is_numeric_failure(self, tmp_path, capsys):
        emb, lab = _cluster_embeddings(tmp_path)
        code = run(["train-svm", "--embeddings", str(emb), "--labels", str(lab),
                    "--task", "a", "--c", "10", "--gamma", "0.2",
                    "--max-passes", "1", "--out", str(tmp_path / "m")])
        assert code == 3
        captured = capsys.readouterr()
        assert "numeric failure" in captured.err
        # best-so-far model is still written alongside the summary line
        assert (tmp_path / "m" / "model.json").exists()
        assert '"converged": false' in captured.out

    def test_single_class_train_is_data_error(self, tmp_path, capsys):
        emb = tmp_path / "e.tnsr"
        lab = tmp_path / "l.tnsr"
        write_tensor(np.random.default_rng(0).standard_normal((8, 3)).astype(np.float32), emb)
        write_tensor(np.zeros(8, dtype=np.uint8), lab)
        code = run(["train-svm", "--embeddings", str(emb), "--labels", str(lab),
                    "--task", "a", "--out", str(tmp_path / "m")])
        assert code == 2
        assert "class" in capsys.readouterr().err


class TestEval:
    def test_perfect_predictions(self, tmp_path, capsys):
        t = tmp_path / "t.tnsr"
        p = tmp_path / "p.tnsr"
        out = tmp_path / "m.json"
        write_tensor(np.array([0, 1, 2, 3, 4, 5], dtype=np.uint8), t)
        write_tensor(np.array([0, 1, 2, 3, 4, 5], dtype=np.uint8), p)
        assert run(["eval", "--truth", str(t), "--pred", str(p),
                    "--classes", "6", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["accuracy"] == 1.0
        assert doc["macro_f1"] == 1.0
        assert _summary(capsys)["accuracy"] == 1.0


class TestEvalTaskFlag:
    def test_vocabulary_truth_encoded_for_task_a(self, tmp_path):
        truth = tmp_path / "t.tnsr"
        pred = tmp_path / "p.tnsr"
        out = tmp_path / "m.json"
        # vocabulary ids real/dalle map to class ids 0/1 under task a
        write_tensor(np.array([0, 0, 4, 4], dtype=np.uint8), truth)
        write_tensor(np.array([0, 0, 1, 1], dtype=np.uint8), pred)
        assert run(["eval", "--truth", str(truth), "--pred", str(pred),
                    "--classes", "2", "--task", "a", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["accuracy"] == 1.0


class TestSvmFlow:
    def test_train_predict_eval_round_trip(self, tmp_path, capsys):
        emb, lab = _cluster_embeddings(tmp_path)
        model_dir = tmp_path / "model"
        assert run(["train-svm", "--embeddings", str(emb), "--labels", str(lab),
                    "--task", "a", "--c", "5", "--gamma", "0.2",
                    "--out", str(model_dir)]) == 0
        summary = _summary(capsys)
        assert summary["converged"] is True

        pred = tmp_path / "pred.tnsr"
        probs = tmp_path / "probs.tnsr"
        assert run(["predict", "--model", str(model_dir), "--input", str(emb),
                    "--out", str(pred), "--probs-out", str(probs)]) == 0
        ids = read_tensor(pred)
        assert ids.tolist() == [0] * 8 + [1] * 8
        pr = read_tensor(probs)
        assert pr.shape == (16, 2)

        report = tmp_path / "rep.json"
        truth = tmp_path / "truth.tnsr"
        write_tensor(np.array([0] * 8 + [1] * 8, dtype=np.uint8), truth)
        assert run(["eval", "--truth", str(truth), "--pred", str(pred),
                    "--classes", "2", "--out", str(report)]) == 0
        assert json.loads(report.read_text())["accuracy"] == 1.0

    def test_grid_search_jobs_invariance(self, tmp_path):
        emb, lab = _cluster_embeddings(tmp_path, n_per=9)
        out1 = tmp_path / "g1.csv"
        out8 = tmp_path / "g8.csv"
        base = ["grid-search", "--embeddings", str(emb), "--labels", str(lab),
                "--task", "a", "--folds", "3",
                "--c-grid", "1,10", "--gamma-grid", "0.1,1"]
        assert run(base + ["--out", str(out1), "--jobs", "1"]) == 0
        assert run(base + ["--out", str(out8), "--jobs", "8"]) == 0
        assert out1.read_bytes() == out8.read_bytes()

    def test_identical_invocations_identical_outputs(self, tmp_path):
        emb, lab = _cluster_embeddings(tmp_path)
        m1, m2 = tmp_path / "m1", tmp_path / "m2"
        argv = ["train-svm", "--embeddings", str(emb), "--labels", str(lab),
                "--task", "a", "--c", "5", "--gamma", "0.2"]
        assert run(argv + ["--out", str(m1)]) == 0
        assert run(argv + ["--out", str(m2)]) == 0
        for name in ("model.json", "class0_sv.tnsr", "class1_coef.tnsr"):
            assert (m1 / name).read_bytes() == (m2 / name).read_bytes()


class TestExtract:
    def test_pooled_features_and_labels(self, tmp_path, capsys):
        _write_png(tmp_path / "a.png", seed=1)
        _write_png(tmp_path / "b.png", seed=2)
        manifest = tmp_path / "m.jsonl"
        _write_manifest(manifest, [("a.png", "real"), ("b.png", "sdxl")])
        out = tmp_path / "f.tnsr"
        labels_out = tmp_path / "l.tnsr"
        assert run(["extract", "--manifest", str(manifest), "--out", str(out),
                    "--pool", "8", "--labels-out", str(labels_out)]) == 0
        feats = read_tensor(out)
        assert feats.shape == (2, 8 * 8 * 5)
        assert read_tensor(labels_out).tolist() == [0, 2]
        assert _summary(capsys)["records"] == 2

    def test_identity_recon_zeroes_error_channel(self, tmp_path):
        _write_png(tmp_path / "a.png", seed=3, side=512)
        manifest = tmp_path / "m.jsonl"
        _write_manifest(manifest, [("a.png", "sd3")])
        # reconstruction == decoded image, written as [1,512,512,3]
        from imgprov.imaging import load_image

        img = load_image(tmp_path / "a.png")
        recon = tmp_path / "r.tnsr"
        write_tensor(img[None, ...], recon)
        out = tmp_path / "f.tnsr"
        scores = tmp_path / "s.tnsr"
        assert run(["extract", "--manifest", str(manifest), "--recon", str(recon),
                    "--out", str(out), "--recon-scores", str(scores)]) == 0
        stack = read_tensor(out)
        assert stack.shape == (1, 512, 512, 5)
        assert np.array_equal(stack[0, :, :, 3], np.zeros((512, 512), np.float32))
        assert read_tensor(scores).tolist() == [0.0]

    def test_augment_appends_rows_per_record(self, tmp_path, capsys):
        _write_png(tmp_path / "a.png", seed=21)
        _write_png(tmp_path / "b.png", seed=22)
        manifest = tmp_path / "m.jsonl"
        _write_manifest(manifest, [("a.png", "real"), ("b.png", "sd21")])
        out = tmp_path / "f.tnsr"
        labels_out = tmp_path / "l.tnsr"
        assert run(["extract", "--manifest", str(manifest), "--out", str(out),
                    "--pool", "8", "--labels-out", str(labels_out),
                    "--augment", "all"]) == 0
        feats = read_tensor(out)
        # clean row + jpeg/blur/noise/brightness rows, per record
        assert feats.shape == (2 * 5, 8 * 8 * 5)
        assert read_tensor(labels_out).tolist() == [0] * 5 + [1] * 5
        summary = _summary(capsys)
        assert summary["augment"] == ["noise", "jpeg", "brightness", "blur"]

    def test_augment_rows_are_deterministic(self, tmp_path):
        _write_png(tmp_path / "a.png", seed=23)
        manifest = tmp_path / "m.jsonl"
        _write_manifest(manifest, [("a.png", "dalle")])
        o1, o2 = tmp_path / "f1.tnsr", tmp_path / "f2.tnsr"
        base = ["extract", "--manifest", str(manifest), "--pool", "8",
                "--augment", "noise,brightness", "--seed", "7"]
        assert run(base + ["--out", str(o1)]) == 0
        assert run(base + ["--out", str(o2)]) == 0
        assert o1.read_bytes() == o2.read_bytes()

    def test_jobs_do_not_change_bytes(self, tmp_path):
        for i in range(4):
            _write_png(tmp_path / f"im{i}.png", seed=10 + i)
        manifest = tmp_path / "m.jsonl"
        _write_manifest(
            manifest,
            [(f"im{i}.png", lab) for i, lab in
             enumerate(["real", "sd21", "dalle", "midjourney"])],
        )
        o1, o8 = tmp_path / "f1.tnsr", tmp_path / "f8.tnsr"
        base = ["extract", "--manifest", str(manifest), "--pool", "8"]
        assert run(base + ["--out", str(o1), "--jobs", "1"]) == 0
        assert run(base + ["--out", str(o8), "--jobs", "8"]) == 0
        assert o1.read_bytes() == o8.read_bytes()


class TestFuseAndThreshold:
    def test_fuse_cli(self, tmp_path, capsys):
        probs = tmp_path / "p5.tnsr"
        write_tensor(
            np.array(
                [[0.3, 0.2, 0.4, 0.1, 0.45],
                 [0.1, 0.1, 0.9, 0.1, 0.1],
                 [0.6, 0.6, 0.1, 0.1, 0.1]],
                dtype=np.float32,
            ),
            probs,
        )
        out = tmp_path / "fused.tnsr"
        assert run(["fuse", "--probs", str(probs), "--out", str(out)]) == 0
        assert read_tensor(out).tolist() == [0, 3, 1]
        assert _summary(capsys)["real_fraction"] == pytest.approx(1 / 3)

    def test_threshold_fit_then_classify(self, tmp_path, capsys):
        real = tmp_path / "real.tnsr"
        fake = tmp_path / "fake.tnsr"
        write_tensor(np.array([1.0, 2.0], dtype=np.float32), real)
        write_tensor(np.array([-2.0, -1.0], dtype=np.float32), fake)
        det = tmp_path / "det.json"
        assert run(["threshold", "fit", "--real", str(real), "--fake", str(fake),
                    "--out", str(det)]) == 0
        doc = json.loads(det.read_text())
        assert doc["threshold"] == pytest.approx(0.0)
        assert doc["direction"] == "fake_if_below"
        assert "bandwidth" in doc

        scores = tmp_path / "s.tnsr"
        write_tensor(np.array([-1.5, 0.5, -0.1], dtype=np.float32), scores)
        out = tmp_path / "cls.tnsr"
        assert run(["threshold", "classify", "--scores", str(scores),
                    "--detector", str(det), "--out", str(out)]) == 0
        assert read_tensor(out).tolist() == [1, 0, 1]

    def test_threshold_classify_with_fixed_flags(self, tmp_path):
        scores = tmp_path / "s.tnsr"
        write_tensor(np.array([-0.10, 0.0, -0.035], dtype=np.float32), scores)
        out = tmp_path / "cls.tnsr"
        assert run(["threshold", "classify", "--scores", str(scores),
                    "--threshold", "-0.035", "--direction", "below",
                    "--out", str(out)]) == 0
        assert read_tensor(out).tolist() == [1, 0, 1]

    def test_threshold_classify_bare_uses_reference_operating_point(self, tmp_path, capsys):
        scores = tmp_path / "s.tnsr"
        write_tensor(np.array([-0.10, 0.0, -0.035], dtype=np.float32), scores)
        out = tmp_path / "o.tnsr"
        assert run(["threshold", "classify", "--scores", str(scores),
                    "--out", str(out)]) == 0
        summary = _summary(capsys)
        assert summary["threshold"] == -0.035
        assert summary["direction"] == "fake_if_below"
        assert read_tensor(out).tolist() == [1, 0, 1]


class TestSweep:
    @pytest.fixture()
    def linear_pipeline(self, tmp_path):
        entries = []
        for i in range(3):
            _write_png(tmp_path / f"real{i}.png", value=0.8)
            entries.append((f"real{i}.png", "real"))
        for i in range(3):
            _write_png(tmp_path / f"fake{i}.png", value=0.3)
            entries.append((f"fake{i}.png", "dalle"))
        manifest = tmp_path / "m.jsonl"
        _write_manifest(manifest, entries)
        feats = tmp_path / "f.tnsr"
        labels = tmp_path / "l.tnsr"
        assert run(["extract", "--manifest", str(manifest), "--out", str(feats),
                    "--pool", "8", "--labels-out", str(labels)]) == 0
        model_dir = tmp_path / "model"
        assert run(["train-linear", "--features", str(feats), "--labels", str(labels),
                    "--task", "a", "--lr", "0.01", "--epochs", "200",
                    "--out", str(model_dir)]) == 0
        return manifest, model_dir, tmp_path

    def test_sweep_identity_level_matches_baseline(self, linear_pipeline, capsys):
        manifest, model_dir, tmp_path = linear_pipeline
        out = tmp_path / "sweep.csv"
        assert run(["sweep", "--manifest", str(manifest), "--model", str(model_dir),
                    "--kind", "noise", "--levels", "0", "--pool", "8",
                    "--out", str(out)]) == 0
        summary = _summary(capsys)
        assert summary["accuracy"] == [1.0]

    def test_sweep_jobs_byte_identical(self, linear_pipeline):
        manifest, model_dir, tmp_path = linear_pipeline
        o1, o8 = tmp_path / "s1.csv", tmp_path / "s8.csv"
        base = ["sweep", "--manifest", str(manifest), "--model", str(model_dir),
                "--kind", "brightness", "--levels", "1,0.75,0.5", "--pool", "8"]
        assert run(base + ["--out", str(o1), "--jobs", "1"]) == 0
        assert run(base + ["--out", str(o8), "--jobs", "8"]) == 0
        assert o1.read_bytes() == o8.read_bytes()
        assert (tmp_path / "s1.json").read_bytes() == (tmp_path / "s8.json").read_bytes()
