"""Fake satellite image detection with Saab filter banks and boosted stumps."""

from ._core import (
    BoostParams,
    DetectorConfig,
    Error,
    FilterBank,
    Model,
    StumpEnsemble,
    Tile,
    apply_perturbation,
    decode_image,
    f1_score,
    fit_saab,
    fit_stumps,
    load_dataset,
    load_model,
    load_tile,
    pixelhop,
    synth_tiles,
    train,
)

__all__ = [
    "BoostParams",
    "DetectorConfig",
    "Error",
    "FilterBank",
    "Model",
    "StumpEnsemble",
    "Tile",
    "apply_perturbation",
    "decode_image",
    "f1_score",
    "fit_saab",
    "fit_stumps",
    "load_dataset",
    "load_model",
    "load_tile",
    "pixelhop",
    "synth_tiles",
    "train",
]
