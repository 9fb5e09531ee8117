"""Baseline k-NN facies classifier and a leave-one-well-out evaluation harness."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .copula import DataMatrix
from .dataio import restrict
from .errors import DegenerateError, InputError

UNIFORM = "uniform"
INVERSE_DISTANCE = "distance"


@dataclass(frozen=True)
class ClassifierConfig:
    k_neighbors: int = 5
    weighting: str = INVERSE_DISTANCE

    def __post_init__(self):
        if int(self.k_neighbors) < 1:
            raise InputError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.weighting not in (UNIFORM, INVERSE_DISTANCE):
            raise InputError(f"weighting must be {UNIFORM!r} or {INVERSE_DISTANCE!r}")

    def to_dict(self):
        return {"k_neighbors": int(self.k_neighbors), "weighting": self.weighting}


class KnnClassifier:
    """k-nearest-neighbour vote in per-feature standardized Euclidean space.

    Features with zero training variance are zeroed out, so they never
    influence distances. Vote ties go to the smallest class code. With
    inverse-distance weighting, a query that coincides with one or more
    training rows is decided by those rows alone.
    """

    def __init__(self, k_neighbors=5, weighting=INVERSE_DISTANCE):
        self.config = ClassifierConfig(k_neighbors, weighting)
        self._tree = None

    @property
    def k_neighbors(self):
        return self.config.k_neighbors

    @property
    def weighting(self):
        return self.config.weighting

    def fit(self, features, labels):
        X = np.asarray(features.values, dtype=float)
        y = np.asarray(labels, dtype=np.int64)
        if X.shape[0] == 0:
            raise DegenerateError("empty training set")
        if y.shape[0] != X.shape[0]:
            raise InputError(f"{y.shape[0]} labels for {X.shape[0]} training rows")
        if np.unique(y).size < 2:
            raise DegenerateError("training set contains a single class")
        self.column_names_ = tuple(features.column_names)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.active_ = std > 0
        self.scale_ = np.where(self.active_, std, 1.0)
        self.classes_ = np.unique(y)
        self._y_idx = np.searchsorted(self.classes_, y)
        self._tree = cKDTree(self._standardize(X))
        return self

    def _standardize(self, X):
        return (X - self.mean_) / self.scale_ * self.active_

    def predict(self, features, column_names=None):
        """Class codes for each row of ``features``.

        ``features`` is a DataMatrix, or a 2-D array with ``column_names``
        given separately (useful for single-row queries).
        """
        if self._tree is None:
            raise RuntimeError("fit must be called before predict")
        if isinstance(features, DataMatrix):
            X, names = features.values, features.column_names
        else:
            X = np.atleast_2d(np.asarray(features, dtype=float))
            names = self.column_names_ if column_names is None else tuple(column_names)
        if tuple(names) != self.column_names_:
            fitted, given = set(self.column_names_), set(names)
            raise InputError(
                "feature columns differ from those seen at fit: "
                f"missing {sorted(fitted - given)}, unexpected {sorted(given - fitted)}, "
                f"fit order {list(self.column_names_)}, given {list(names)}"
            )
        k = min(self.k_neighbors, self._tree.n)
        dist, idx = self._tree.query(self._standardize(X), k=k)
        dist = dist.reshape(len(X), k)
        idx = idx.reshape(len(X), k)

        if self.weighting == UNIFORM:
            w = np.ones_like(dist)
        else:
            with np.errstate(divide="ignore"):
                w = 1.0 / dist
            exact = np.isinf(w)
            hit = exact.any(axis=1)
            w[hit] = exact[hit].astype(float)
        votes = np.zeros((len(X), len(self.classes_)))
        np.add.at(votes, (np.repeat(np.arange(len(X)), k), self._y_idx[idx].ravel()), w.ravel())
        # argmax takes the first maximum, i.e. the smallest class code
        return self.classes_[np.argmax(votes, axis=1)]


def fit(train, config=None):
    """Fit a ``KnnClassifier`` on a ``FaciesDataset``."""
    config = config or ClassifierConfig()
    return KnnClassifier(config.k_neighbors, config.weighting).fit(train.features, train.labels)


def predict(model, features):
    return model.predict(features)


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class_f1: dict
    confusion: list
    classes: list
    n: int
    adjacent_accuracy: float = None
    fold_breakdown: list = field(default_factory=list)
    group: str = None

    def to_dict(self):
        out = {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class_f1": {str(c): f for c, f in self.per_class_f1.items()},
            "confusion": self.confusion,
            "classes": self.classes,
            "n": self.n,
            "adjacent_accuracy": self.adjacent_accuracy,
            "fold_breakdown": [f.to_dict() for f in self.fold_breakdown],
        }
        if self.group is not None:
            out["group"] = self.group
        return out


def evaluate(pred, truth, adjacency=None, classes=None):
    """Accuracy, per-class and macro F1, confusion matrix.

    Confusion rows are true classes and columns predicted classes, both in
    ``classes`` order (default: sorted union of codes seen). A class with no
    true and no predicted samples gets F1 = 0. When ``adjacency`` maps codes
    to neighbouring codes, ``adjacent_accuracy`` also counts predictions that
    land in a class adjacent to the truth.
    """
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape:
        raise InputError(f"pred has {pred.size} entries, truth has {truth.size}")
    if pred.size == 0:
        raise DegenerateError("nothing to evaluate")
    if classes is None:
        classes = np.union1d(pred, truth)
    classes = [int(c) for c in classes]
    unknown = set(np.union1d(pred, truth).tolist()) - set(classes)
    if unknown:
        raise InputError(f"codes {sorted(unknown)} not in class set {classes}")

    pos = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    np.add.at(cm, ([pos[t] for t in truth.tolist()], [pos[p] for p in pred.tolist()]), 1)

    tp = np.diag(cm)
    denom = cm.sum(axis=0) + cm.sum(axis=1)
    f1 = np.divide(2 * tp, denom, out=np.zeros(len(classes)), where=denom > 0)
    per_class = {c: float(f1[i]) for i, c in enumerate(classes)}

    adjacent = None
    if adjacency is not None:
        ok = [p == t or p in adjacency.get(t, ()) for p, t in zip(pred.tolist(), truth.tolist())]
        adjacent = float(np.mean(ok))

    return EvalReport(
        accuracy=float(np.trace(cm) / cm.sum()),
        macro_f1=float(np.mean(f1)),
        per_class_f1=per_class,
        confusion=cm.tolist(),
        classes=classes,
        n=int(cm.sum()),
        adjacent_accuracy=adjacent,
    )


def leave_one_group_out(groups):
    """Yield ``(group, train_idx, test_idx)`` for each distinct group, sorted."""
    groups = np.asarray(groups)
    for g in sorted(set(groups.tolist())):
        test = groups == g
        yield g, np.flatnonzero(~test), np.flatnonzero(test)


def grouped_cv(data, config=None, selected=None, group_key="well", n_jobs=1):
    """Leave-one-well-out cross-validation of a ``KnnClassifier``.

    Each well is held out in turn and predicted by a model fit on all other
    wells. The headline metrics pool every held-out prediction (micro
    average); per-well reports go in ``fold_breakdown``.

    Parameters
    ----------
    data : FaciesDataset
    config : ClassifierConfig
    selected : list of str, optional
        Restrict features to these names before fitting.
    group_key : str
        Only ``"well"`` is supported.
    n_jobs : int
        Folds evaluated concurrently; the report does not depend on it.
    """
    if group_key != "well":
        raise InputError(f"unsupported group key {group_key!r}")
    config = config or ClassifierConfig()
    if selected is not None:
        data = restrict(data, selected)
    if len(set(data.wells.tolist())) < 2:
        raise DegenerateError("grouped CV needs at least two wells")

    X = data.features.values
    names = data.features.column_names
    classes = data.classes

    def run_fold(split):
        g, train, test = split
        model = KnnClassifier(config.k_neighbors, config.weighting)
        model.fit(DataMatrix(X[train], names), data.labels[train])
        return g, test, model.predict(X[test], names)

    splits = list(leave_one_group_out(data.wells))
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run_fold, splits))
    else:
        results = [run_fold(s) for s in splits]

    pred = np.empty(data.n, dtype=np.int64)
    folds = []
    for g, test, p in results:
        pred[test] = p
        rep = evaluate(p, data.labels[test], data.adjacency, classes)
        rep.group = g
        folds.append(rep)
    report = evaluate(pred, data.labels, data.adjacency, classes)
    report.fold_breakdown = folds
    return report
