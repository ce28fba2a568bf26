"""Edge-guided adaptive sampling (MAR/TRPS), TV recovery and image metrics."""

from ._core import (
    DataError,
    NumericalError,
    UsageError,
    ball_image,
    bicubic_upsample,
    build_masks,
    load_image,
    morph,
    psnr,
    recover,
    run,
    save_image,
    shepp_logan,
    sobel_magnitude,
    ssim,
    standard_cs,
    threshold_top_k,
)

__all__ = [
    "DataError",
    "NumericalError",
    "UsageError",
    "ball_image",
    "bicubic_upsample",
    "build_masks",
    "load_image",
    "morph",
    "psnr",
    "recover",
    "run",
    "save_image",
    "shepp_logan",
    "sobel_magnitude",
    "ssim",
    "standard_cs",
    "threshold_top_k",
]
