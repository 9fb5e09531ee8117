"""Copula-entropy estimation and CE-based variable selection for facies classification."""

from .classify import ClassifierConfig, EvalReport, KnnClassifier, evaluate, grouped_cv
from .copula import (
    CEEstimate,
    DataMatrix,
    EmpiricalCopula,
    ce_with_label,
    copula_entropy,
    knn_entropy,
    rank_transform,
)
from .dataio import CsvSchema, FaciesDataset, load_csv, restrict, write_csv
from .errors import DegenerateError, InputError
from .selection import Threshold, TopK, VariableRanking, rank_variables, select
from .special import digamma

__version__ = "0.1.0"
