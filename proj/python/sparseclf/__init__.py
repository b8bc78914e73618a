"""Sparse linear classification with l0-l1-l2 penalties (C++ core)."""

from ._sparseclf import (
    DataError,
    Dataset,
    MipResult,
    Path,
    PathEntry,
    Solution,
    auc,
    fit,
    fit_path,
    gen_synthetic,
    iga_solve,
    iht_fit,
    lambda0_max,
    load_csv,
    load_svmlight,
    recovery_report,
    threshold,
    tune,
)

__all__ = [
    "DataError",
    "Dataset",
    "MipResult",
    "Path",
    "PathEntry",
    "Solution",
    "auc",
    "fit",
    "fit_path",
    "gen_synthetic",
    "iga_solve",
    "iht_fit",
    "lambda0_max",
    "load_csv",
    "load_svmlight",
    "recovery_report",
    "threshold",
    "tune",
]
