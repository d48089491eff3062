"""Splits, confusion accounting, LOSO folding, and stream evaluation."""

import numpy as np
import numpy.testing as npt
import pytest

from tacgest.core import NUM_CLASSES
from tacgest.errors import DomainError
from tacgest.evaluate import (
    ConfusionMatrix,
    SplitSpec,
    build_stream,
    loso_cv,
    stream_evaluate,
    stratified_split,
)
from tacgest.segment import SegmenterConfig
from tacgest.synth import SynthSpec, synth_dataset

from conftest import make_recording


def test_split_spec_validates_fraction():
    with pytest.raises(DomainError):
        SplitSpec(train_fraction=0.0)
    with pytest.raises(DomainError):
        SplitSpec(train_fraction=1.0)


def test_split_sizes_on_full_corpus_shape():
    # full corpus arithmetic: 306 per class at 0.85 -> 2601 train / 459 test;
    # floors are 260.1 -> 260, the single leftover seat goes to class 0
    from tacgest.evaluate import _train_quota
    quotas = _train_quota([306] * 10, 0.85)
    assert sum(quotas) == 2601
    assert quotas == [261] + [260] * 9


def test_split_is_stratified_and_seeded(small_corpus):
    train, test = stratified_split(small_corpus, SplitSpec(seed=0))
    assert len(train) + len(test) == len(small_corpus)
    # 27 per class at 0.85 -> 22.95: floors 22, ten leftover seats -> all 23
    from collections import Counter
    per_class = Counter(r.label.id for r in train)
    assert sorted(per_class.values()) == [23] * 10
    assert len(train) == 230
    train2, test2 = stratified_split(small_corpus, SplitSpec(seed=0))
    assert [r.rec_id for r in train2] == [r.rec_id for r in train]
    train3, _ = stratified_split(small_corpus, SplitSpec(seed=1))
    assert [r.rec_id for r in train3] != [r.rec_id for r in train]


def test_split_partitions_are_disjoint(small_corpus):
    train, test = stratified_split(small_corpus)
    train_ids = {r.rec_id for r in train}
    test_ids = {r.rec_id for r in test}
    assert not train_ids & test_ids
    assert len(train_ids | test_ids) == len(small_corpus)


def test_split_rejects_unlabeled():
    recs = [make_recording(np.zeros((2, 81))) for _ in range(4)]
    with pytest.raises(DomainError):
        stratified_split(recs)


def test_split_rejects_tiny_class():
    recs = [make_recording(np.zeros((2, 81)), label_id=0, rec_id=f"a{i}") for i in range(4)]
    recs.append(make_recording(np.zeros((2, 81)), label_id=1, rec_id="lone"))
    with pytest.raises(DomainError):
        stratified_split(recs)


def test_confusion_from_predictions_counts():
    cm = ConfusionMatrix.from_predictions([0, 0, 1, 2], [0, 1, 1, 2], n_classes=3)
    want = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    npt.assert_array_equal(cm.counts, want)
    npt.assert_allclose(cm.accuracy, 3 / 4)
    assert cm.total == 4


def test_confusion_per_class_precision_recall():
    cm = ConfusionMatrix.from_predictions([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], n_classes=2)
    rows = {cid: (p, r) for cid, p, r in cm.per_class()}
    npt.assert_allclose(rows[0], (1 / 2, 1 / 2))
    npt.assert_allclose(rows[1], (2 / 3, 2 / 3))


def test_confusion_most_confused_pairs_ranking():
    y_true = [0] * 5 + [1] * 5 + [2] * 5
    y_pred = [1, 1, 1, 0, 0] + [0, 1, 1, 1, 2] + [2, 2, 2, 2, 0]
    cm = ConfusionMatrix.from_predictions(y_true, y_pred, n_classes=3)
    pairs = cm.most_confused_pairs(top=2)
    assert pairs[0] == ((0, 1), 4)  # 3 + 1 off-diagonal
    assert pairs[1] == ((0, 2), 1)  # tie with (1,2) broken to the lower pair


def test_confusion_addition():
    a = ConfusionMatrix.from_predictions([0], [1], n_classes=2)
    b = ConfusionMatrix.from_predictions([1], [1], n_classes=2)
    c = a + b
    npt.assert_array_equal(c.counts, [[0, 1], [0, 1]])


def test_confusion_counts_are_immutable():
    cm = ConfusionMatrix.from_predictions([0], [0], n_classes=2)
    with pytest.raises(ValueError):
        cm.counts[0, 0] = 5


def labeled_corpus(n_participants=6, per=4):
    recs = []
    rng = np.random.default_rng(0)
    for p in range(n_participants):
        for i in range(per):
            g = np.zeros((3, 81))
            g[:, rng.integers(0, 81)] = 1.0
            recs.append(make_recording(
                g, label_id=i % 2, rec_id=f"p{p}-r{i}", participant=f"p{p}"))
    return recs


def test_loso_holds_out_whole_participants():
    recs = labeled_corpus()
    seen = []

    def trainer(params, fit, holdout):
        fit_parts = {r.participant_id for r in fit}
        hold_parts = {r.participant_id for r in holdout}
        assert len(hold_parts) == 1
        assert not fit_parts & hold_parts
        seen.append(next(iter(hold_parts)))
        return 1.0

    result = loso_cv(recs, trainer, [{"k": 1}], seed=0, folds=5)
    assert result.best_mean_accuracy == 1.0
    assert len(set(result.fold_participants)) == 5
    assert seen == result.fold_participants


def test_loso_scores_infeasible_point_zero():
    recs = labeled_corpus()

    def trainer(params, fit, holdout):
        if params["k"] == 99:
            raise DomainError("infeasible")
        return 0.5

    result = loso_cv(recs, trainer, [{"k": 99}, {"k": 1}], seed=0, folds=5)
    assert result.scores[0] == [0.0] * 5
    assert result.best_params == {"k": 1}


def test_loso_tie_goes_to_earlier_grid_point():
    recs = labeled_corpus()
    result = loso_cv(recs, lambda p, f, h: 0.7, [{"k": 3}, {"k": 1}], seed=0, folds=5)
    assert result.best_params == {"k": 3}


def test_loso_requires_enough_participants():
    recs = labeled_corpus(n_participants=3)
    with pytest.raises(DomainError):
        loso_cv(recs, lambda p, f, h: 1.0, [{}], folds=5)


def test_loso_rejects_blank_participant_ids():
    recs = [make_recording(np.zeros((2, 81)), label_id=0, participant="")] * 6
    with pytest.raises(DomainError):
        loso_cv(recs, lambda p, f, h: 1.0, [{}], folds=5)


def test_loso_rejects_empty_grid():
    with pytest.raises(DomainError):
        loso_cv(labeled_corpus(), lambda p, f, h: 1.0, [], folds=5)


def pulse_recording(label_id, rec_id, taxel=40, frames=6):
    p = np.zeros((frames, 81))
    p[:, taxel] = 0.9
    return make_recording(p, label_id=label_id, rec_id=rec_id)


def test_build_stream_layout():
    recs = [pulse_recording(0, "a"), pulse_recording(1, "b", frames=4)]
    frames, spans = build_stream(recs, gap_frames=20)
    # leading gap, 6 frames, gap, 4 frames, trailing gap
    assert spans == [(20, 26), (46, 50)]
    assert frames.shape == (70, 81)
    npt.assert_array_equal(frames[:20], 0.0)


def test_build_stream_rejects_short_gap():
    cfg = SegmenterConfig(k_gap=8)
    with pytest.raises(DomainError):
        build_stream([pulse_recording(0, "a")], gap_frames=15, config=cfg)


def test_stream_evaluate_with_perfect_predictor():
    recs = [pulse_recording(i % 2, f"r{i}", taxel=20 + i) for i in range(10)]
    labels = {f"segment@{20 + sum(6 + 20 for _ in range(i))}": i % 2 for i in range(10)}

    def predict_one(rec):
        # peak taxel encodes the identity of the source recording
        taxel = int(np.argmax(rec.pressures.sum(axis=0)))
        return (taxel - 20) % 2

    report = stream_evaluate(recs, predict_one, gap_frames=20)
    assert report.expected_segments == 10
    assert report.detected_segments == 10
    assert report.matched_segments == 10
    assert report.segment_match_rate == 1.0
    assert report.online_accuracy == 1.0
    assert report.offline_accuracy == 1.0
    assert report.mean_latency_ms >= 0.0
    assert len(report.latencies_ms) == 10


def test_stream_evaluate_online_flags_misdetections():
    recs = [pulse_recording(0, "a"), pulse_recording(1, "b")]
    report = stream_evaluate(recs, lambda rec: 0, gap_frames=20)
    assert report.online_accuracy == 0.5
    assert report.offline_accuracy == 0.5
