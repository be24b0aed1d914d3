"""Construction of the 5-channel input: RGB + reconstruction error + spectrum.

Channel order is [R, G, B, E, F] where E is the per-pixel reconstruction
error against an externally supplied reconstruction and F is the
center-shifted log-magnitude spectrum of the grayscale image.  E and F are
min-max normalized per image so all five channels share the [0, 1] range.
"""

from __future__ import annotations

import numpy as np

from .imaging import SIDE, to_grayscale

STACK_CHANNELS = 5


def _minmax(raw: np.ndarray) -> np.ndarray:
    lo = raw.min()
    hi = raw.max()
    if hi == lo:
        return np.zeros_like(raw, dtype=np.float32)
    return ((raw - lo) / (hi - lo)).astype(np.float32)


def frequency_feature_raw(img: np.ndarray) -> np.ndarray:
    """Unnormalized spectrum: ln(1 + |shifted 2D DFT of grayscale|).

    Accepts any square image so small inputs stay tractable for
    brute-force verification; production images are 512x512.
    """
    gray = to_grayscale(img).astype(np.float64)
    spectrum = np.fft.fftshift(np.fft.fft2(gray))
    return np.log1p(np.abs(spectrum))


def frequency_feature(img: np.ndarray) -> np.ndarray:
    """Min-max normalized log-magnitude spectrum, all-zero if constant."""
    return _minmax(frequency_feature_raw(img))


def reconstruction_error_raw(original: np.ndarray, reconstruction: np.ndarray) -> np.ndarray:
    """Per-pixel mean over RGB of |reconstruction - original|."""
    original = np.asarray(original)
    reconstruction = np.asarray(reconstruction)
    if original.shape != reconstruction.shape:
        raise ValueError(
            f"shape mismatch: original {original.shape} vs "
            f"reconstruction {reconstruction.shape}"
        )
    diff = np.abs(reconstruction.astype(np.float64) - original.astype(np.float64))
    return diff.mean(axis=2)


def reconstruction_error(original: np.ndarray, reconstruction: np.ndarray) -> np.ndarray:
    """Min-max normalized reconstruction-error channel (zero when flat)."""
    return _minmax(reconstruction_error_raw(original, reconstruction))


def reconstruction_l1_score(original: np.ndarray, reconstruction: np.ndarray) -> float:
    """Mean of the raw error channel; pixel-space fallback for detectors
    that normally consume perceptual distances."""
    return float(reconstruction_error_raw(original, reconstruction).mean())


def stack_channels(img: np.ndarray, e: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Concatenate [R, G, B, E, F] channels-last into one float32 stack."""
    img = np.asarray(img, dtype=np.float32)
    e = np.asarray(e, dtype=np.float32)
    f = np.asarray(f, dtype=np.float32)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be (h, w, 3), got {img.shape}")
    if e.shape != img.shape[:2] or f.shape != img.shape[:2]:
        raise ValueError(
            f"channel shapes {e.shape}/{f.shape} do not match image {img.shape[:2]}"
        )
    return np.concatenate([img, e[..., None], f[..., None]], axis=2)


def build_stack(img: np.ndarray, reconstruction: np.ndarray | None = None) -> np.ndarray:
    """Full pipeline for one image: E (zero if no reconstruction), F, concat."""
    if reconstruction is None:
        e = np.zeros(img.shape[:2], dtype=np.float32)
    else:
        e = reconstruction_error(img, reconstruction)
    f = frequency_feature(img)
    return stack_channels(img, e, f)


def pool_features(stack: np.ndarray, out_side: int) -> np.ndarray:
    """Average-pool each channel to out_side x out_side, then flatten.

    Pooling windows are non-overlapping; out_side must divide the side
    length.  The flat layout is row-major with channels last, giving a
    vector of length out_side**2 * channels.
    """
    stack = np.asarray(stack)
    if stack.ndim != 3:
        raise ValueError(f"expected (h, w, c) stack, got {stack.shape}")
    side = stack.shape[0]
    if stack.shape[1] != side:
        raise ValueError(f"stack must be square, got {stack.shape}")
    if out_side < 1 or side % out_side != 0:
        raise ValueError(f"out_side {out_side} must divide side {side}")
    block = side // out_side
    pooled = (
        stack.reshape(out_side, block, out_side, block, stack.shape[2])
        .mean(axis=(1, 3), dtype=np.float64)
        .astype(np.float32)
    )
    return pooled.reshape(-1)
