"""Low-light image enhancement by dual-exposure fusion.

Images are float64 numpy arrays of shape (H, W, 3) with values in [0, 1];
single-channel maps are (H, W).
"""

from ._bimef import (
    Error,
    btf_params,
    apply_btf,
    crf,
    enhance,
    estimate_illumination,
    geometric_brightness,
    lightness,
    load_image,
    loe,
    optimal_k,
    save_image,
)

__all__ = [
    "Error",
    "apply_btf",
    "btf_params",
    "crf",
    "enhance",
    "estimate_illumination",
    "geometric_brightness",
    "lightness",
    "load_image",
    "loe",
    "optimal_k",
    "save_image",
]
