from pinnbench.eval.metrics import (
    BANDS,
    MetricReport,
    TemporalReport,
    default_bands,
    evaluate,
    fmse,
    grid_layout,
    l1re,
    l2re,
    max_err,
    mse,
    predict,
    radial_wavenumbers,
    report,
    temporal_l2re,
)

__all__ = [
    "BANDS",
    "MetricReport",
    "TemporalReport",
    "default_bands",
    "evaluate",
    "fmse",
    "grid_layout",
    "l1re",
    "l2re",
    "max_err",
    "mse",
    "predict",
    "radial_wavenumbers",
    "report",
    "temporal_l2re",
]
