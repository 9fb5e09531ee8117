"""Rank variables by copula entropy against a class label and select a subset."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import json

from .copula import ce_with_label
from .errors import DegenerateError, InputError


@dataclass(frozen=True)
class RankEntry:
    name: str
    ce: float
    k: int
    n_floored: int = 0


@dataclass(frozen=True)
class VariableRanking:
    """Variables ordered by CE ascending (most dependent first), ties by name."""

    entries: tuple

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda e: (e.ce, e.name)))
        object.__setattr__(self, "entries", ordered)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def names(self):
        return [e.name for e in self.entries]

    def to_records(self):
        return [{"name": e.name, "ce": e.ce, "k": e.k} for e in self.entries]

    def to_json(self, **kwargs):
        return json.dumps(self.to_records(), **kwargs)

    @classmethod
    def from_records(cls, records):
        return cls(tuple(RankEntry(r["name"], float(r["ce"]), int(r["k"])) for r in records))


@dataclass(frozen=True)
class TopK:
    m: int

    def __post_init__(self):
        if int(self.m) < 1:
            raise InputError(f"TopK needs m >= 1, got {self.m}")

    def to_dict(self):
        return {"mode": "top_k", "m": int(self.m)}


@dataclass(frozen=True)
class Threshold:
    t: float

    def to_dict(self):
        return {"mode": "threshold", "t": float(self.t)}


def rank_variables(data, k=3, jitter_label=False, seed=0, n_jobs=1):
    """CE of every feature column of ``data`` against its facies label.

    Parameters
    ----------
    data : FaciesDataset
    k : int
        Neighbour order of the entropy estimator.
    jitter_label : bool
        Break label ties with seeded noise before ranking. The same jitter
        is used for every column.
    seed : int
    n_jobs : int
        Worker threads for the per-column estimates. Does not affect the
        result.

    Returns
    -------
    VariableRanking
    """
    features = data.features
    names = features.column_names

    def one(j):
        try:
            est = ce_with_label(features, data.labels, j, k=k, jitter=jitter_label, seed=seed)
        except ValueError as exc:
            raise type(exc)(f"variable {names[j]!r}: {exc}") from exc
        return RankEntry(names[j], est.value, est.k, est.n_floored)

    if n_jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            entries = list(pool.map(one, range(len(names))))
    else:
        entries = [one(j) for j in range(len(names))]
    return VariableRanking(tuple(entries))


def select(ranking, rule):
    """Names chosen by ``rule``, in ranking order.

    ``TopK(m)`` keeps the first ``m`` names. ``Threshold(t)`` keeps every
    name with ``ce <= t``; the result may be empty.
    """
    if isinstance(rule, TopK):
        if rule.m > len(ranking):
            raise DegenerateError(f"TopK({rule.m}) exceeds the {len(ranking)} ranked variables")
        return ranking.names[: rule.m]
    if isinstance(rule, Threshold):
        return [e.name for e in ranking.entries if e.ce <= rule.t]
    raise TypeError(f"unknown selection rule {rule!r}")
