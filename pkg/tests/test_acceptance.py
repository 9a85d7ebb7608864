"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the pytest terminal summary (and to stdout when
run with ``-s``). Tolerances are the contract values; nothing here is
loosened to make a criterion pass.
"""

import json
import time

import numpy as np
import pytest

from coughdet.balance import SMOTE
from coughdet.classifiers import ElasticNetLogistic, dual_objective, logistic_loss_grad, mlp_loss_grad, rbf_kernel, smo
from coughdet.classifiers.mlp import init_params
from coughdet.cli import main
from coughdet.evaluation import FeatureStore, auc, make_folds, nested_cv
from coughdet.evaluation.search import FULL_FEATURE_GRID
from coughdet.features import (
    AccelFeatureConfig,
    AudioFeatureConfig,
    deltas,
    extract_accel_features,
    extract_audio_features,
    frame_skip,
    mfcc_frame,
    power_spectrum,
)
from coughdet.segmentation import detect_events, recovery_rate
from coughdet.signals import AccelSignal, AudioSignal
from coughdet.synth import synth_recording

from .conftest import ACCEPTANCE_LINES
from .oracles import (
    central_difference,
    delta_formula,
    mann_whitney_auc,
    naive_power_spectrum,
    svm_dual_bruteforce,
    textbook_mfcc,
)
from .test_cv import toy_table


def report(number, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {name} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def rel_err(a, b):
    a, b = np.ravel(a), np.ravel(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12))


def test_criterion_1_feature_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_ps = 0.0
    for i in range(1000):
        n = (16, 32, 64)[i % 3]
        x = rng.normal(size=n)
        worst_ps = max(worst_ps, rel_err(power_spectrum(x), naive_power_spectrum(x)))
    worst_mfcc = 0.0
    for n_mfcc in (13, 26, 39, 52, 65):
        for flen in (256, 512, 1024, 2048, 4096):
            cfg = AudioFeatureConfig(n_mfcc=n_mfcc, frame_len=flen, n_segments=50)
            frame = rng.uniform(-0.5, 0.5, size=flen)
            ref = textbook_mfcc(frame, n_mfcc, cfg.n_mels, cfg.n_fft)
            worst_mfcc = max(worst_mfcc, float(np.max(np.abs(mfcc_frame(frame, cfg) - ref))))
    delta_exact = True
    for _ in range(20):
        seq = rng.normal(size=(int(rng.integers(1, 60)), 13))
        delta_exact &= np.array_equal(deltas(seq), delta_formula(seq))
    elapsed = time.perf_counter() - t0
    ok = worst_ps < 1e-9 and worst_mfcc < 1e-6 and delta_exact and elapsed < 30
    report(1, "feature oracles", ok, f"power rel err {worst_ps:.1e}, mfcc abs err {worst_mfcc:.1e}, "
           f"deltas exact={delta_exact}, {elapsed:.1f}s")


def test_criterion_2_shape_contracts():
    rng = np.random.default_rng(2)
    bad = []
    accel = rng.normal(size=190)
    for flen in FULL_FEATURE_GRID["accel"]["frame_len"]:
        for segs in FULL_FEATURE_GRID["accel"]["n_segments"]:
            shape = extract_accel_features(accel, AccelFeatureConfig(frame_len=flen, n_segments=segs)).shape
            if shape != (segs, flen // 2 + 5):
                bad.append(("accel", flen, segs, shape))
    audio = rng.uniform(-0.5, 0.5, size=round(1.9 * 22050))
    grid = FULL_FEATURE_GRID["audio"]
    count = 0
    for n_mfcc in grid["n_mfcc"]:
        for flen in grid["frame_len"]:
            for segs in grid["n_segments"]:
                cfg = AudioFeatureConfig(n_mfcc=n_mfcc, frame_len=flen, n_segments=segs)
                shape = extract_audio_features(audio, cfg).shape
                count += 1
                if shape != (segs, 3 * n_mfcc + 2):
                    bad.append(("audio", n_mfcc, flen, segs, shape))
    skip = frame_skip(round(1.2 * 22050), 100)
    report(2, "shape contracts", not bad and skip == 265,
           f"{6 + count} grid points, {len(bad)} mismatches, skip for 1.2 s / 100 frames = {skip}")


def test_criterion_3_gradient_checks():
    worst_lr = worst_mlp = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(3, 15)), int(rng.integers(1, 6))
        Z, y = rng.normal(size=(n, d)), rng.integers(0, 2, size=n).astype(float)
        w, b = rng.normal(size=d), float(rng.normal())
        _, gw, gb = logistic_loss_grad(w, b, Z, y)
        fd = central_difference(lambda v: logistic_loss_grad(v[:-1], v[-1], Z, y)[0], np.r_[w, b])
        worst_lr = max(worst_lr, rel_err(np.r_[gw, gb], fd))
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        n, d, h = int(rng.integers(3, 12)), int(rng.integers(1, 5)), int(rng.integers(1, 6))
        Z, y = rng.normal(size=(n, d)), rng.integers(0, 2, size=n).astype(float)
        params = init_params(d, h, rng)
        params["b1"] = rng.normal(size=h) * 0.1
        params["b2"] = float(rng.normal())
        l2 = float(rng.uniform(0, 1))
        _, grads = mlp_loss_grad(params, Z, y, l2)
        for key in ("W1", "b1", "w2", "b2"):
            def f(v, key=key):
                p = dict(params)
                p[key] = v if key != "b2" else float(v)
                return mlp_loss_grad(p, Z, y, l2)[0]
            worst_mlp = max(worst_mlp, rel_err(grads[key], central_difference(f, np.asarray(params[key], float))))
    report(3, "gradient checks", worst_lr < 1e-4 and worst_mlp < 1e-4,
           f"worst rel err LR {worst_lr:.1e}, MLP {worst_mlp:.1e} over 20+20 instances")


def test_criterion_4_svm_dual():
    worst_gap = worst_kkt = 0.0
    count = 0
    for seed in range(60):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        X = rng.normal(size=(n, 2))
        y = rng.choice([-1.0, 1.0], size=n)
        y[0] = -y[1]
        C = float(10 ** rng.uniform(-2, 2))
        K = rbf_kernel(X, X, float(10 ** rng.uniform(-1, 1)))
        alpha, _, _ = smo(K, y, C)
        best, _ = svm_dual_bruteforce(K, y, C)
        worst_gap = max(worst_gap, abs(dual_objective(alpha, K, y) - best))
        worst_kkt = max(worst_kkt, abs(float(alpha @ y)), float(-alpha.min()), float(alpha.max() - C))
        count += 1
    report(4, "SVM dual", worst_gap < 1e-4 and worst_kkt < 1e-6,
           f"{count} instances with <=8 points, worst objective gap {worst_gap:.1e}, worst KKT violation {worst_kkt:.1e}")


def test_criterion_5_auc():
    rng = np.random.default_rng(5)
    mismatches = 0
    not_invariant = 0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        labels = rng.integers(0, 2, size=n)
        labels[0], labels[1] = 0, 1
        scores = rng.integers(0, max(2, n // 4), size=n).astype(float) / 7.0  # many ties
        a = auc(scores, labels)
        if a != mann_whitney_auc(scores, labels):
            mismatches += 1
        for g in (np.exp, lambda s: 3.0 * s - 2.0, lambda s: s ** 3 + s, np.arctan):
            if auc(g(scores), labels) != a:
                not_invariant += 1
    report(5, "AUC correctness", mismatches == 0 and not_invariant == 0,
           f"100 sets, {mismatches} Mann-Whitney mismatches, {not_invariant} transform changes")


def test_criterion_6_cv_hygiene(monkeypatch):
    table = toy_table(n_patients=14, per_class=4)
    store = FeatureStore(table)
    X_all = store.matrix("accel", {"frame_len": 16, "n_segments": 5})
    owner = {X_all[i].tobytes(): table.patient_ids[i] for i in range(len(table))}
    seen = []
    orig_smote, orig_stats = SMOTE.fit_resample, ElasticNetLogistic._standardize_fit

    def spy_smote(self, X, y):
        seen.append(("smote", {owner.get(r.tobytes(), "synthetic") for r in X}))
        return orig_smote(self, X, y)

    def spy_stats(self, X):
        seen.append(("stats", {owner.get(r.tobytes(), "synthetic") for r in X}))
        return orig_stats(self, X)

    monkeypatch.setattr(SMOTE, "fit_resample", spy_smote)
    monkeypatch.setattr(ElasticNetLogistic, "_standardize_fit", spy_stats)
    grid = {"lr": {"reg_strength": (1000.0,), "l1_ratio": (0.5,), "l2_ratio": (0.5,)}}
    result, runs = nested_cv(table, store, "accel", {"frame_len": (16,), "n_segments": (5,)}, grid, smote_k=3)
    folds = make_folds(table.patient_ids)
    patients = sorted(set(table.patient_ids))
    leaks = 0
    smote_in = [s for k, s in seen if k == "smote"]
    stats_in = [s for k, s in seen if k == "stats"]
    for fold, s, st in zip(folds, smote_in, stats_in):
        leaks += fold.test_patient in s or fold.test_patient in st
    for fold, run in zip(folds, runs):
        trace = dict(run.trace)
        test_ids = set(table.event_ids[table.patient_ids == fold.test_patient])
        leaks += bool(test_ids & set(trace["fit"])) + bool(test_ids & set(trace["smote"]))
    tests = sorted(f.test_patient for f in result.folds)
    ok = (leaks == 0 and len(result.folds) == len(patients) == 14 and tests == patients
          and len(smote_in) == len(stats_in) == 14)
    report(6, "CV hygiene", ok, f"{len(result.folds)} folds for {len(patients)} patients, "
           f"each tested once={tests == patients}, {leaks} leaks")


def test_criterion_7_smote():
    problems = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n_maj, n_min, d = int(rng.integers(20, 80)), int(rng.integers(6, 19)), int(rng.integers(1, 8))
        X = np.vstack([rng.normal(size=(n_maj, d)), rng.normal(1.5, 1.0, size=(n_min, d))])
        y = np.r_[np.zeros(n_maj, int), np.ones(n_min, int)]
        s = SMOTE(k_neighbors=5, random_state=seed)
        Xr, yr = s.fit_resample(X, y)
        if not np.sum(yr == 0) == np.sum(yr == 1) == n_maj:
            problems.append((seed, "counts"))
        for row, (a, b) in zip(Xr[len(X):], s.sample_indices_):
            lo, hi = np.minimum(X[a], X[b]), np.maximum(X[a], X[b])
            if y[a] != 1 or y[b] != 1 or np.any(row < lo) or np.any(row > hi):
                problems.append((seed, "segment"))
                break
            t = (row - X[a]) / np.where(X[b] != X[a], X[b] - X[a], 1.0)
            moving = X[b] != X[a]
            if moving.any() and np.ptp(t[moving]) > 1e-9:
                problems.append((seed, "not on segment"))
                break
        again = SMOTE(k_neighbors=5, random_state=seed).fit_resample(X, y)
        if again[0].tobytes() != Xr.tobytes() or again[1].tobytes() != yr.tobytes():
            problems.append((seed, "determinism"))
    report(7, "SMOTE properties", not problems, f"20 random problems, issues: {problems or 'none'}")


@pytest.mark.slow
def test_criterion_8_end_to_end(tmp_path):
    t0 = time.perf_counter()
    data, out = tmp_path / "data", tmp_path / "out"
    assert main(["synth", "--patients", "14", "--coughs", "30", "--noncoughs", "120", "--seed", "7",
                 "--out", str(data)]) == 0
    # defaults are the desk grid: accel frame_len {16,32} x segments {5,10};
    # audio mfcc {13,26} x frame_len {512,1024} x 50 segments; LR and MLP
    code = main(["evaluate", "--manifest", str(data / "manifest.jsonl"), "--out", str(out)])
    elapsed = time.perf_counter() - t0
    res = json.loads((out / "report.json").read_text())
    acc_auc = res["modalities"]["accel"]["mean_auc"]
    aud_auc = res["modalities"]["audio"]["mean_auc"]
    ok = code == 0 and acc_auc >= 0.95 and aud_auc >= 0.95 and aud_auc >= acc_auc - 0.02 and elapsed < 600
    report(8, "end-to-end desk run", ok,
           f"accel AUC {acc_auc:.4f}, audio AUC {aud_auc:.4f}, {elapsed:.0f}s wall")


def test_criterion_9_segmentation():
    hits = total = 0
    for seed in range(5):
        accel, audio, planted = synth_recording(n_events=20, seed=seed)
        detected = detect_events(accel, audio)
        hits += round(recovery_rate([(s, e) for s, e, _ in planted], detected) * len(planted))
        total += len(planted)
    rng = np.random.default_rng(9)
    silent = detect_events(AccelSignal(np.abs(rng.normal(0, 0.002, size=3000))),
                           AudioSignal(rng.normal(0, 0.001, size=30 * 22050)))
    silent += detect_events(AccelSignal(np.zeros(3000)), AudioSignal(np.zeros(30 * 22050)))
    rate = hits / total
    report(9, "segmentation recovery", rate >= 0.95 and not silent,
           f"{hits}/{total} planted events at IoU>=0.5 ({rate:.1%}), {len(silent)} detections on silence")
