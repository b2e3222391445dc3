"""Python bindings for the lensless reconstruction core."""

from ._lensless import (
    ALGORITHMS,
    ConvolutionOperator,
    Psf,
    Reconstruction,
    autocorr2d,
    calibrate_psf,
    compare,
    demosaic,
    downsample,
    evaluate_dataset,
    load_image,
    mse,
    psf_report,
    psnr,
    rgb_to_gray,
    save_image,
    simulate_measurement,
    ssim,
    synthetic_psf,
    synthetic_scene,
    write_synthetic_dataset,
)


def reconstruct(psf, measurement, algo="admm", n_iter=100, **kwargs):
    """Runs `algo` for `n_iter` iterations and returns the clipped estimate."""
    rec = Reconstruction(psf, algo=algo, n_iter=n_iter, **kwargs)
    rec.set_data(measurement)
    return rec.apply()


__all__ = [
    "ALGORITHMS",
    "ConvolutionOperator",
    "Psf",
    "Reconstruction",
    "autocorr2d",
    "calibrate_psf",
    "compare",
    "demosaic",
    "downsample",
    "evaluate_dataset",
    "load_image",
    "mse",
    "psf_report",
    "psnr",
    "reconstruct",
    "rgb_to_gray",
    "save_image",
    "simulate_measurement",
    "ssim",
    "synthetic_psf",
    "synthetic_scene",
    "write_synthetic_dataset",
]
