"""Nonparametric copula-entropy estimation.

Copula entropy (CE) is the differential entropy of the copula density of a
random vector. It equals minus the mutual information between the
components, so independent variables have CE = 0 and dependence drives CE
negative. Estimation is done in two steps:

1. ``rank_transform`` maps each column to pseudo-observations
   ``rank / n`` (average ranks for ties), an estimate of a sample from the
   copula.
2. ``knn_entropy`` applies the Kozachenko-Leonenko k-nearest-neighbour
   differential-entropy estimator under the max norm to those points.

All entropies are in nats.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import rankdata

from .errors import DegenerateError, InputError
from .special import digamma

# replaces zero k-NN distances (duplicate points) before taking logs
EPS_FLOOR = 1e-10
# half-width of the optional label jitter
JITTER_SCALE = 1e-6
# mixed into the jitter seed so its stream differs from default_rng(seed)
_JITTER_STREAM = 0x6A6974


def _readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x d`` table of finite observations with named columns.

    Rows are samples (depth steps), columns are variables.
    """

    values: np.ndarray
    column_names: tuple

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise InputError(f"expected a 2-D array, got shape {values.shape}")
        n, d = values.shape
        if n < 2 or d < 1:
            raise InputError(f"need n >= 2 rows and d >= 1 columns, got {n}x{d}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InputError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != d:
            raise InputError(f"{len(names)} column names for {d} columns")
        if len(set(names)) != d:
            dupes = sorted({c for c in names if names.count(c) > 1})
            raise InputError(f"duplicate column names: {dupes}")
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "column_names", names)

    @classmethod
    def from_columns(cls, **columns):
        names = list(columns)
        return cls(np.column_stack([np.asarray(columns[c], dtype=float) for c in names]), names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def column(self, name):
        return self.values[:, self.column_names.index(name)]

    def select(self, names):
        idx = [self.column_names.index(c) for c in names]
        return DataMatrix(self.values[:, idx], [self.column_names[i] for i in idx])


@dataclass(frozen=True)
class EmpiricalCopula:
    """Pseudo-observations ``u`` in (0, 1], one column per input variable."""

    u: np.ndarray
    tie_policy: str = "average"

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))


@dataclass(frozen=True)
class CEEstimate:
    """A copula-entropy value in nats, with the parameters that produced it.

    ``n_floored`` counts points whose k-th neighbour distance was zero and
    was replaced by ``EPS_FLOOR``; a large count means the estimate is
    dominated by ties.
    """

    value: float
    k: int
    n: int
    d: int
    n_floored: int = field(default=0)

    def __float__(self):
        return self.value


def rank_transform(x):
    """Map each column of ``x`` to its pseudo-observations.

    Entry ``(i, j)`` becomes ``avg_rank(x[i, j]) / n`` where tied entries
    share the mean of the rank positions they occupy. The result depends
    only on the within-column ordering, so any strictly increasing
    per-column transform of ``x`` yields a bit-identical copula.

    Parameters
    ----------
    x : DataMatrix or array_like, shape (n, d)

    Returns
    -------
    EmpiricalCopula
    """
    values = x.values if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if not np.all(np.isfinite(values)):
        raise InputError("rank_transform received non-finite values")
    n = values.shape[0]
    u = rankdata(values, method="average", axis=0) / n
    return EmpiricalCopula(u)


def kth_neighbor_distances(points, k):
    """Max-norm distance from each point to its k-th nearest other point.

    The search is exact (kd-tree). Duplicated points yield zero distances.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    tree = cKDTree(points)
    # the query point itself comes back at distance 0, so ask for k + 1
    dist, _ = tree.query(points, k=k + 1, p=np.inf)
    return dist[:, k]


def _knn_entropy(points, k):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n, d = points.shape
    k = int(k)
    if k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    if k >= n:
        raise DegenerateError(f"k={k} requires at least k + 1 = {k + 1} points, got n={n}")
    if np.all(points == points[0]):
        raise DegenerateError("all points are identical; entropy is undefined")

    eps = kth_neighbor_distances(points, k)
    zero = eps <= 0.0
    n_floored = int(np.count_nonzero(zero))
    eps = np.where(zero, EPS_FLOOR, eps)
    # fsum is exactly rounded, which keeps the result independent of row order
    log_sum = math.fsum(np.log(eps).tolist())
    value = -digamma(k) + digamma(n) + d * math.log(2.0) + d * log_sum / n
    return value, n_floored


def knn_entropy(points, k=3):
    """Kozachenko-Leonenko differential entropy estimate under the max norm.

    Computes ``-psi(k) + psi(n) + d ln 2 + (d / n) sum_i ln eps_i`` where
    ``eps_i`` is the max-norm distance from point ``i`` to its k-th nearest
    neighbour (itself excluded). Zero distances are floored at
    ``EPS_FLOOR``.

    Parameters
    ----------
    points : array_like, shape (n, d)
    k : int
        Neighbour order, ``1 <= k <= n - 1``.

    Returns
    -------
    float
        Entropy estimate in nats.
    """
    return _knn_entropy(points, k)[0]


def copula_entropy(x, k=3):
    """Estimate the copula entropy of the columns of ``x``.

    Parameters
    ----------
    x : DataMatrix
        Needs at least two columns; the CE of a single variable is
        identically zero.
    k : int
        Neighbour order of the entropy estimator.

    Returns
    -------
    CEEstimate
    """
    if not isinstance(x, DataMatrix):
        x = DataMatrix(x, [f"x{j}" for j in range(np.shape(x)[1])])
    if x.d < 2:
        raise InputError("copula entropy needs at least two variables")
    copula = rank_transform(x)
    value, n_floored = _knn_entropy(copula.u, k)
    return CEEstimate(value=value, k=int(k), n=x.n, d=x.d, n_floored=n_floored)


def jitter_labels(label, seed):
    """Add seeded uniform noise in (-JITTER_SCALE, JITTER_SCALE) to integer codes.

    The noise breaks ties at random inside each class while leaving the
    class order intact.
    """
    label = np.asarray(label, dtype=float)
    rng = np.random.default_rng([_JITTER_STREAM, int(seed)])
    return label + rng.uniform(-JITTER_SCALE, JITTER_SCALE, size=label.shape)


def ce_with_label(features, label, variable_index, k=3, jitter=False, seed=0):
    """Copula entropy between one feature column and a discrete class label.

    The label is embedded as its integer code and rank-transformed with
    average ranks, so all samples of a class share one pseudo-observation.
    With ``jitter=True`` the codes are first perturbed by seeded uniform
    noise of half-width ``JITTER_SCALE``, which amounts to random
    tie-breaking within each class.

    Parameters
    ----------
    features : DataMatrix
    label : array_like of int, shape (n,)
    variable_index : int or str
        Column position or name in ``features``.
    k : int
    jitter : bool
    seed : int
        Seed for the jitter; ignored when ``jitter`` is False.

    Returns
    -------
    CEEstimate
    """
    label = np.asarray(label)
    if label.ndim != 1 or label.shape[0] != features.n:
        raise InputError(f"label length {label.shape} does not match n={features.n}")
    if np.unique(label).size < 2:
        raise DegenerateError("label column is constant; dependence is undefined")
    if isinstance(variable_index, str):
        variable_index = features.column_names.index(variable_index)
    code = jitter_labels(label, seed) if jitter else label.astype(float)
    name = features.column_names[variable_index]
    pair = DataMatrix(
        np.column_stack([features.values[:, variable_index], code]),
        [name, "__label__" if name != "__label__" else "__label_1__"],
    )
    return copula_entropy(pair, k)
