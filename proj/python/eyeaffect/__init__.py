"""Eye-feature continuous affect prediction (C++ core with Python bindings)."""

from ._core import (
    Config,
    DataError,
    Model,
    NumericError,
    __version__,
    baseline_humans,
    ccc,
    compute_features,
    dwt_db10,
    evaluate,
    feature_names,
    features,
    fuse,
    gold_standard,
    human_baseline,
    idwt_db10,
    ingest,
    load_model,
    mi_filter,
    mutual_information,
    pcc,
    report,
    select,
    shift_labels,
    sse,
    synth,
    train,
    train_blstm,
    wilcoxon_rank_sum,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
