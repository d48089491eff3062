"""Recognition methods wired end to end: featurize, fit, evaluate, persist.

A method name picks a feature family and a classifier: `st-*` methods use
wavelet spatio-temporal features, `tp-*` methods the compact touch-pattern
vector, and `cnn`/`lstm`/`cnnlstm` train the micro networks directly on
motion-history images or padded frame sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import nn
from .augment import augment_dataset
from .classical import (KnnClassifier, RandomForestClassifier,
                        RbfSvmClassifier, Standardizer)
from .core import NUM_CLASSES, Recording
from .datafiles import load_model, save_model
from .errors import DomainError
from .evaluate import (ConfusionMatrix, LosoResult, SplitSpec, loso_cv,
                       stratified_split)
from .features import (SPATIO_TEMPORAL_SCHEMA, TOUCH_PATTERN_SCHEMA,
                       motion_history_image, spatio_temporal_matrix,
                       touch_pattern_matrix)
from .preprocess import pad_to_length, preprocess

MHI_SCHEMA = "mhi_9x9_v1"
SEQUENCE_SCHEMA = "padded_sequence_v1"


@dataclass(frozen=True)
class MethodSpec:
    name: str
    family: str   # "st" | "tp" | "nn"
    kind: str     # "knn" | "rf" | "svm" | "cnn" | "lstm" | "cnnlstm"
    defaults: dict
    grid: tuple   # of hyperparameter dicts, searched in order


METHODS = {
    "st-knn": MethodSpec("st-knn", "st", "knn", {"k": 7},
                         ({"k": 1}, {"k": 3}, {"k": 5}, {"k": 7})),
    "st-rf": MethodSpec("st-rf", "st", "rf", {"n_trees": 200, "max_depth": 9},
                        ({"n_trees": 200, "max_depth": 9},
                         {"n_trees": 200, "max_depth": 7})),
    "st-svm": MethodSpec("st-svm", "st", "svm", {"C": 2.0 ** 9, "gamma": 2.0 ** -13},
                         ({"C": 2.0 ** 9, "gamma": 2.0 ** -13},
                          {"C": 2.0 ** 9, "gamma": 2.0 ** -11},
                          {"C": 2.0 ** 7, "gamma": 2.0 ** -13})),
    "tp-knn": MethodSpec("tp-knn", "tp", "knn", {"k": 1},
                         ({"k": 1}, {"k": 3}, {"k": 5}, {"k": 7})),
    "tp-rf": MethodSpec("tp-rf", "tp", "rf", {"n_trees": 200, "max_depth": 9},
                        ({"n_trees": 200, "max_depth": 9},
                         {"n_trees": 200, "max_depth": 7})),
    "tp-svm": MethodSpec("tp-svm", "tp", "svm", {"C": 2.0 ** 9, "gamma": 2.0 ** -7},
                         ({"C": 2.0 ** 9, "gamma": 2.0 ** -7},
                          {"C": 2.0 ** 9, "gamma": 2.0 ** -5},
                          {"C": 2.0 ** 7, "gamma": 2.0 ** -7})),
    "cnn": MethodSpec("cnn", "nn", "cnn", {"learning_rate": 1e-3, "max_epochs": 60},
                      ({"learning_rate": 1e-3, "max_epochs": 60},)),
    "lstm": MethodSpec("lstm", "nn", "lstm", {"learning_rate": 1e-3, "max_epochs": 60},
                       ({"learning_rate": 1e-3, "max_epochs": 60},)),
    "cnnlstm": MethodSpec("cnnlstm", "nn", "cnnlstm",
                          {"learning_rate": 1e-3, "max_epochs": 60},
                          ({"learning_rate": 1e-3, "max_epochs": 60},)),
}

METHOD_NAMES = tuple(METHODS)


def method_spec(name: str) -> MethodSpec:
    try:
        return METHODS[name]
    except KeyError:
        raise DomainError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")


# ------------------------------------------------------------- featurizing

def classical_features(family: str, recs: Sequence[Recording]) -> np.ndarray:
    if family == "st":
        return spatio_temporal_matrix([pad_to_length(preprocess(r)) for r in recs])
    if family == "tp":
        return touch_pattern_matrix([preprocess(r) for r in recs])
    raise DomainError(f"unknown feature family {family!r}")


def mhi_stack(recs: Sequence[Recording]) -> np.ndarray:
    return np.stack([motion_history_image(preprocess(r)) for r in recs])


def padded_sequences(recs: Sequence[Recording]) -> tuple:
    """(B, 64, 81) padded pressure sequences plus their live lengths."""
    padded = [pad_to_length(preprocess(r)) for r in recs]
    seqs = np.stack([p.pressures for p in padded])
    lengths = np.array([p.true_length for p in padded], dtype=np.int64)
    return seqs, lengths


def labels_of(recs: Sequence[Recording]) -> np.ndarray:
    out = np.empty(len(recs), dtype=np.int64)
    for i, rec in enumerate(recs):
        if rec.label is None:
            raise DomainError(f"recording {rec.rec_id!r} is unlabeled")
        out[i] = rec.label.id
    return out


# ------------------------------------------------------------------ models

class ClassicalModel:
    """A fitted classical classifier plus its feature path."""

    def __init__(self, method: str, clf, standardizer: Optional[Standardizer] = None):
        self.method = method
        self.spec = method_spec(method)
        self.clf = clf
        self.standardizer = standardizer

    def _features(self, recs: Sequence[Recording]) -> np.ndarray:
        X = classical_features(self.spec.family, recs)
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return X

    def predict_ids(self, recs: Sequence[Recording]) -> np.ndarray:
        return self.clf.predict(self._features(recs))

    def predict_scores(self, rec: Recording) -> np.ndarray:
        counts = self.clf.vote_counts(self._features([rec]))[0]
        return counts.astype(np.float64) / counts.sum()

    def save(self, path, metadata: dict) -> None:
        params = dict(self.clf.to_params())
        if self.standardizer is not None:
            params.update(self.standardizer.to_params())
        schema = SPATIO_TEMPORAL_SCHEMA if self.spec.family == "st" else TOUCH_PATTERN_SCHEMA
        save_model(path, kind=self.method, schema=schema, params=params,
                   metadata=metadata)


class NeuralModel:
    """A trained network plus its input encoding."""

    def __init__(self, method: str, net):
        self.method = method
        self.spec = method_spec(method)
        self.net = net

    def _inputs(self, recs: Sequence[Recording]) -> tuple:
        if self.spec.kind == "cnn":
            return mhi_stack(recs), None
        return padded_sequences(recs)

    def predict_ids(self, recs: Sequence[Recording]) -> np.ndarray:
        seqs, lengths = self._inputs(recs)
        return nn.predict(self.net, seqs, lengths)

    def predict_scores(self, rec: Recording) -> np.ndarray:
        seqs, lengths = self._inputs([rec])
        if lengths is None:
            logits = self.net.forward(seqs)[0]
        else:
            t = int(lengths[0])
            logits = self.net.forward(seqs[:, :t], lengths)[0]
        shifted = logits - logits.max()
        exp = np.exp(shifted)
        return exp / exp.sum()

    def save(self, path, metadata: dict) -> None:
        schema = MHI_SCHEMA if self.spec.kind == "cnn" else SEQUENCE_SCHEMA
        save_model(path, kind=self.method, schema=schema,
                   params=self.net.params, metadata=metadata)


# ----------------------------------------------------------------- fitting

_CLASSIFIERS = {
    "knn": lambda p, seed: KnnClassifier(k=int(p["k"])),
    "rf": lambda p, seed: RandomForestClassifier(
        n_trees=int(p["n_trees"]), max_depth=int(p["max_depth"]), seed=seed),
    "svm": lambda p, seed: RbfSvmClassifier(
        C=float(p["C"]), gamma=float(p["gamma"]), seed=seed),
}

# standardization helps distance- and kernel-based models; trees are scale-free
_STANDARDIZED_KINDS = ("knn", "svm")


def _fit_classical(spec: MethodSpec, params: dict, recs: Sequence[Recording],
                   seed: int) -> ClassicalModel:
    X = classical_features(spec.family, recs)
    y = labels_of(recs)
    standardizer = None
    if spec.kind in _STANDARDIZED_KINDS:
        standardizer = Standardizer()
        X = standardizer.fit_transform(X)
    clf = _CLASSIFIERS[spec.kind](params, seed)
    clf.fit(X, y)
    return ClassicalModel(spec.name, clf, standardizer)


def _train_config(params: dict, seed: int) -> nn.TrainConfig:
    known = {"learning_rate", "batch_size", "max_epochs", "patience"}
    extra = set(params) - known
    if extra:
        raise DomainError(f"unknown training parameters: {sorted(extra)}")
    return nn.TrainConfig(seed=seed, **{k: params[k] for k in known & set(params)})


def _fit_neural(spec: MethodSpec, params: dict, recs: Sequence[Recording],
                seed: int) -> tuple:
    net = nn.NET_KINDS[spec.kind](seed=seed)
    model = NeuralModel(spec.name, net)
    if spec.kind == "cnn":
        seqs, lengths = mhi_stack(recs), None
    else:
        seqs, lengths = padded_sequences(recs)
    result = nn.train_net(net, seqs, labels_of(recs), lengths,
                          config=_train_config(params, seed))
    return model, result


def fit_method(method: str, recs: Sequence[Recording], seed: int = 0,
               params: Optional[dict] = None):
    """Fit one method on the given recordings; returns the model."""
    spec = method_spec(method)
    if not recs:
        raise DomainError("cannot train on an empty dataset")
    params = dict(spec.defaults if params is None else params)
    if spec.family == "nn":
        model, _ = _fit_neural(spec, params, recs, seed)
        return model
    return _fit_classical(spec, params, recs, seed)


# ----------------------------------------------------------------- training

@dataclass
class TrainOutcome:
    method: str
    model: object
    accuracy: float
    confusion: ConfusionMatrix
    hyperparams: dict
    n_train: int
    n_test: int
    augmented: bool
    skipped_silent: int = 0
    cv: Optional[LosoResult] = None
    history: list = field(default_factory=list)


def train_method(method: str, recs: Sequence[Recording], seed: int = 0,
                 augment: bool = False, cv: bool = False) -> TrainOutcome:
    """Split, optionally augment and grid-search, then fit and score a method.

    The 85/15 split is stratified and seeded; augmentation touches only the
    training partition.  With `cv`, hyperparameters are chosen by
    leave-one-subject-out search over the method's grid before the final fit.
    """
    spec = method_spec(method)
    if not recs:
        raise DomainError("cannot train on an empty dataset")
    train, test = stratified_split(recs, SplitSpec(seed=seed))
    skipped = 0
    if augment:
        train, skipped = augment_dataset(train)
    cv_result = None
    params = dict(spec.defaults)
    if cv:
        def trainer(point: dict, fit_recs, holdout) -> float:
            model = fit_method(method, fit_recs, seed=seed, params=point)
            predicted = model.predict_ids(holdout)
            return float((predicted == labels_of(holdout)).mean())

        cv_result = loso_cv(train, trainer, spec.grid, seed=seed)
        params = cv_result.best_params

    history = []
    if spec.family == "nn":
        model, result = _fit_neural(spec, params, train, seed)
        history = result.history
    else:
        model = _fit_classical(spec, params, train, seed)

    predicted = model.predict_ids(test)
    confusion = ConfusionMatrix.from_predictions(labels_of(test), predicted,
                                                 NUM_CLASSES)
    return TrainOutcome(method=method, model=model, accuracy=confusion.accuracy,
                        confusion=confusion, hyperparams=params,
                        n_train=len(train), n_test=len(test), augmented=augment,
                        skipped_silent=skipped, cv=cv_result, history=history)


# -------------------------------------------------------------- persistence

def save_trained(outcome: TrainOutcome, path, seed: int, extra: Optional[dict] = None) -> None:
    metadata = {
        "method": outcome.method,
        "seed": seed,
        "augment": outcome.augmented,
        "hyperparams": outcome.hyperparams,
        "accuracy": outcome.accuracy,
        "n_train": outcome.n_train,
        "n_test": outcome.n_test,
    }
    if extra:
        metadata.update(extra)
    outcome.model.save(path, metadata)


def load_trained(path):
    """Reconstruct a saved model; returns (model, metadata)."""
    envelope = load_model(path)
    method = envelope["kind"]
    spec = method_spec(method)
    params = envelope["params"]
    if spec.family == "nn":
        net = nn.NET_KINDS[spec.kind](seed=0)
        for name in net.params:
            if name not in params:
                raise DomainError(f"model file is missing parameter {name!r}")
            if net.params[name].shape != params[name].shape:
                raise DomainError(f"parameter {name!r} has wrong shape")
            net.params[name] = params[name].copy()
        return NeuralModel(method, net), envelope["metadata"]
    standardizer = None
    if "scaler_mean" in params:
        standardizer = Standardizer.from_params(params)
    if spec.kind == "knn":
        clf = KnnClassifier.from_params(params)
    elif spec.kind == "rf":
        clf = RandomForestClassifier.from_params(params)
    else:
        clf = RbfSvmClassifier.from_params(params)
    return ClassicalModel(method, clf, standardizer), envelope["metadata"]
