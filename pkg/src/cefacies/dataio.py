"""Well-log CSV ingestion into labelled facies datasets."""

import csv
from dataclasses import dataclass, field, replace
import json
import logging
import math

import numpy as np

from .copula import DataMatrix
from .errors import DegenerateError, InputError

log = logging.getLogger(__name__)

DROP_ROW = "drop"
MEDIAN_IMPUTE_PER_WELL = "median"
MISSING_POLICIES = (DROP_ROW, MEDIAN_IMPUTE_PER_WELL)


@dataclass(frozen=True)
class FaciesDataset:
    """Labelled well-log samples.

    Attributes
    ----------
    wells : ndarray of str, shape (n,)
    depth : ndarray of float, shape (n,)
        Metadata only; never used as a feature unless listed explicitly.
    features : DataMatrix
    labels : ndarray of int, shape (n,)
    class_names : dict
        Code -> display name, covering every code in ``labels``.
    adjacency : dict or None
        Code -> frozenset of adjacent codes, symmetric.
    """

    wells: np.ndarray
    depth: np.ndarray
    features: DataMatrix
    labels: np.ndarray
    class_names: dict = field(default_factory=dict)
    adjacency: dict = None

    def __post_init__(self):
        wells = np.array([str(w) for w in self.wells], dtype=object)
        depth = np.array(self.depth, dtype=float)
        labels = np.asarray(self.labels)
        if labels.size and not np.all(np.equal(np.mod(labels, 1), 0)):
            raise InputError("labels must be integer class codes")
        labels = labels.astype(np.int64)
        n = self.features.n
        if not (len(wells) == len(depth) == len(labels) == n):
            raise InputError(
                f"length mismatch: wells={len(wells)} depth={len(depth)} "
                f"labels={len(labels)} features={n}"
            )
        names = {int(c): str(v) for c, v in self.class_names.items()}
        for c in np.unique(labels):
            names.setdefault(int(c), str(int(c)))
        for a in (wells, depth, labels):
            a.setflags(write=False)
        object.__setattr__(self, "wells", wells)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", dict(sorted(names.items())))
        if self.adjacency is not None:
            object.__setattr__(self, "adjacency", symmetrize_adjacency(self.adjacency))

    @property
    def n(self):
        return self.features.n

    @property
    def feature_names(self):
        return list(self.features.column_names)

    @property
    def classes(self):
        return sorted(self.class_names)

    def take(self, rows):
        """Row subset; the result must still have at least two rows."""
        rows = np.asarray(rows)
        return replace(
            self,
            wells=self.wells[rows],
            depth=self.depth[rows],
            features=DataMatrix(self.features.values[rows], self.features.column_names),
            labels=self.labels[rows],
        )


@dataclass(frozen=True)
class CsvSchema:
    """Column roles for ``load_csv``.

    ``feature_cols=None`` takes every column not used as well, depth or label.
    """

    well_col: str = "Well Name"
    depth_col: str = "Depth"
    label_col: str = "Facies"
    feature_cols: tuple = None
    missing_policy: str = DROP_ROW
    missing_token: str = ""

    def to_dict(self):
        return {
            "well_col": self.well_col,
            "depth_col": self.depth_col,
            "label_col": self.label_col,
            "feature_cols": None if self.feature_cols is None else list(self.feature_cols),
            "missing_policy": self.missing_policy,
            "missing_token": self.missing_token,
        }


@dataclass(frozen=True)
class LoadReport:
    n_read: int
    n_rows: int
    dropped_rows: int
    imputed_cells: int

    def to_dict(self):
        return dict(self.__dict__)


def symmetrize_adjacency(adjacency):
    """Close ``adjacency`` under symmetry: b adjacent to a whenever a is to b."""
    out = {}
    for a, bs in adjacency.items():
        for b in bs:
            out.setdefault(int(a), set()).add(int(b))
            out.setdefault(int(b), set()).add(int(a))
    added = sum(len(v) for v in out.values()) - sum(len(set(bs)) for bs in adjacency.values())
    if added:
        log.warning("adjacency was not symmetric; added %d reverse links", added)
    return {a: frozenset(sorted(bs)) for a, bs in sorted(out.items())}


def load_sidecar(path):
    """Read ``{"class_names": {code: name}, "adjacency": {code: [codes]}}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read sidecar {path}: {exc}") from exc
    try:
        names = {int(k): str(v) for k, v in raw.get("class_names", {}).items()}
        adjacency = raw.get("adjacency")
        if adjacency is not None:
            adjacency = {int(k): [int(c) for c in v] for k, v in adjacency.items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed sidecar {path}: {exc}") from exc
    return names, adjacency


def _parse_float(text, row, col):
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"row {row}, column {col!r}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise InputError(f"row {row}, column {col!r}: non-finite value {text!r}")
    return value


def _parse_label(text, row, col):
    value = _parse_float(text, row, col)
    if value != int(value):
        raise InputError(f"row {row}, column {col!r}: class code {text!r} is not an integer")
    return int(value)


def load_csv(path, schema=None, sidecar=None, return_report=False):
    """Load a well-log CSV into a ``FaciesDataset``.

    Rows with a missing well id, depth or label are always dropped. Missing
    feature cells are handled by ``schema.missing_policy``: ``"drop"``
    removes the row, ``"median"`` fills the cell with the median of that
    column over the same well's observed rows (rows of a well with no
    observed values in the column are dropped).

    Parameters
    ----------
    path : str or Path
    schema : CsvSchema
    sidecar : str or Path, optional
        JSON with class names and adjacency.
    return_report : bool
        Also return a ``LoadReport`` with drop and imputation counts.
    """
    schema = schema or CsvSchema()
    if schema.missing_policy not in MISSING_POLICIES:
        raise InputError(f"missing_policy must be one of {MISSING_POLICIES}, got {schema.missing_policy!r}")
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path} is empty; a header row is required") from None
        rows = list(reader)

    roles = [schema.well_col, schema.depth_col, schema.label_col]
    if schema.feature_cols is None:
        feature_cols = [h for h in header if h not in roles]
    else:
        feature_cols = list(schema.feature_cols)
    missing = [c for c in roles + feature_cols if c not in header]
    if missing:
        raise InputError(f"columns not found in header: {', '.join(missing)}")
    if not feature_cols:
        raise InputError("no feature columns")
    idx = {h: i for i, h in enumerate(header)}

    def is_missing(text):
        text = text.strip()
        return text == "" or text == schema.missing_token

    wells, depth, labels, feats = [], [], [], []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InputError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        meta = [row[idx[c]] for c in roles]
        if any(is_missing(m) for m in meta):
            wells.append(None)
            depth.append(math.nan)
            labels.append(0)
            feats.append([math.nan] * len(feature_cols))
            continue
        wells.append(meta[0].strip())
        depth.append(_parse_float(meta[1], lineno, schema.depth_col))
        labels.append(_parse_label(meta[2], lineno, schema.label_col))
        feats.append(
            [
                math.nan if is_missing(row[idx[c]]) else _parse_float(row[idx[c]], lineno, c)
                for c in feature_cols
            ]
        )

    n_read = len(wells)
    X = np.array(feats, dtype=float).reshape(n_read, len(feature_cols))
    meta_ok = np.array([w is not None for w in wells], dtype=bool)
    imputed = 0
    if schema.missing_policy == MEDIAN_IMPUTE_PER_WELL:
        well_arr = np.array(wells, dtype=object)
        for w in dict.fromkeys(w for w in wells if w is not None):
            in_well = (well_arr == w) & meta_ok
            block = X[in_well]
            holes = np.isnan(block)
            if not holes.any():
                continue
            # columns that are entirely missing in this well stay NaN and get dropped
            for j in np.flatnonzero(holes.any(axis=0) & ~holes.all(axis=0)):
                block[holes[:, j], j] = np.median(block[~holes[:, j], j])
                imputed += int(holes[:, j].sum())
            X[in_well] = block

    keep = meta_ok & ~np.isnan(X).any(axis=1)
    report = LoadReport(
        n_read=n_read, n_rows=int(keep.sum()), dropped_rows=int((~keep).sum()), imputed_cells=imputed
    )
    if report.n_rows == 0:
        raise DegenerateError(f"no rows left in {path} after applying missing policy {schema.missing_policy!r}")
    if report.n_rows < 2:
        raise DegenerateError(f"only {report.n_rows} row left in {path} after missing-value handling")

    class_names, adjacency = ({}, None) if sidecar is None else load_sidecar(sidecar)
    data = FaciesDataset(
        wells=[w for w, k in zip(wells, keep) if k],
        depth=np.array(depth)[keep],
        features=DataMatrix(X[keep], feature_cols),
        labels=np.array(labels)[keep],
        class_names=class_names,
        adjacency=adjacency,
    )
    log.info("loaded %s: %d rows kept, %d dropped, %d cells imputed",
             path, report.n_rows, report.dropped_rows, report.imputed_cells)
    return (data, report) if return_report else data


def write_csv(data, path, schema=None):
    """Write ``data`` in the layout ``load_csv`` reads with the same schema.

    Floats are written with ``repr`` so a reload is value-identical.
    """
    schema = schema or CsvSchema()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([schema.well_col, schema.depth_col, schema.label_col] + data.feature_names)
        for i in range(data.n):
            writer.writerow(
                [data.wells[i], repr(float(data.depth[i])), int(data.labels[i])]
                + [repr(float(v)) for v in data.features.values[i]]
            )


def restrict(data, names):
    """Dataset with features limited to ``names``, in that order."""
    names = list(names)
    if not names:
        raise DegenerateError("cannot restrict to an empty variable list")
    if len(set(names)) != len(names):
        raise InputError(f"duplicate names in restriction: {names}")
    unknown = [c for c in names if c not in data.features.column_names]
    if unknown:
        raise InputError(f"unknown variables: {', '.join(unknown)}")
    return replace(data, features=data.features.select(names))
