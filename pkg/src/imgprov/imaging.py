"""Image decoding, standardization, and the four deterministic perturbations.

Images live as float32 arrays of shape (512, 512, 3), channels-last RGB,
values in [0, 1].  The same perturbations serve as training augmentation
and as evaluation attack:

    jpeg        round-trip through a baseline JPEG codec (default quality 50)
    blur        Gaussian blur (default sigma 5, kernel 5x5)
    noise       additive Gaussian noise on the [0,1] scale (default std 0.3)
    brightness  multiplicative darkening (default factor 0.5)
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataError

SIDE = 512

#: BT.601 luma weights.
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)

PERTURBATION_KINDS = ("noise", "jpeg", "brightness", "blur")

#: Default parameter per kind when used as training augmentation.
AUGMENTATION_DEFAULTS = {
    "jpeg": {"quality": 50},
    "blur": {"sigma": 5.0, "kernel": 5},
    "noise": {"std": 0.3},
    "brightness": {"factor": 0.5},
}


@dataclass(frozen=True)
class PerturbationSpec:
    """One perturbation with its parameter; ``seed`` is used by noise only."""

    kind: str
    std: float = 0.0
    quality: int = 100
    factor: float = 1.0
    sigma: float = 0.0
    kernel: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "noise" and self.std < 0:
            raise ValueError("noise std must be >= 0")
        if self.kind == "jpeg" and not 1 <= self.quality <= 100:
            raise ValueError("jpeg quality must be in 1..100")
        if self.kind == "brightness" and not 0 < self.factor <= 1:
            raise ValueError("brightness factor must be in (0, 1]")
        if self.kind == "blur":
            if self.sigma < 0:
                raise ValueError("blur sigma must be >= 0")
            if self.kernel < 1 or self.kernel % 2 == 0:
                raise ValueError("blur kernel must be an odd int >= 1")

    def level(self) -> float:
        """The scalar knob of this spec (used for sweep grids)."""
        return {
            "noise": self.std,
            "jpeg": float(self.quality),
            "brightness": self.factor,
            "blur": self.sigma,
        }[self.kind]


def decode_and_resize(data: bytes) -> np.ndarray:
    """Decode PNG/baseline-JPEG bytes to a 512x512x3 float32 image in [0,1].

    Bilinear resampling; values are scaled by 1/255.
    """
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise DataError(f"cannot decode image bytes: {exc}")
    if img.width == 0 or img.height == 0:
        raise DataError("image has a zero dimension")
    img = img.convert("RGB")
    if img.size != (SIDE, SIDE):
        img = img.resize((SIDE, SIDE), Image.BILINEAR)
    arr = np.asarray(img, dtype=np.float32) / np.float32(255.0)
    return arr


def load_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_and_resize(fh.read())


def _check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) image, got {img.shape}")
    return img


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B, per pixel."""
    img = _check_image(img)
    return (img.astype(np.float64) @ _LUMA).astype(np.float32)


def jpeg_roundtrip(img: np.ndarray, quality: int) -> np.ndarray:
    """Encode as baseline JPEG (4:2:0 subsampling) and decode back.

    Quality follows the conventional quantization-table scaling
    (5000/q below 50, 200-2q at or above), so q=50 applies the
    unscaled reference tables.
    """
    img = _check_image(img)
    if not 1 <= int(quality) <= 100:
        raise ValueError(f"jpeg quality must be in 1..100, got {quality}")
    u8 = np.clip(np.rint(img.astype(np.float64) * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    # subsampling=2 pins 4:2:0 chroma for every quality level
    Image.fromarray(u8, mode="RGB").save(
        buf, format="JPEG", quality=int(quality), subsampling=2
    )
    decoded = Image.open(buf)
    decoded.load()
    return np.asarray(decoded.convert("RGB"), dtype=np.float32) / np.float32(255.0)


def _gaussian_taps(sigma: float, kernel: int) -> np.ndarray:
    r = (kernel - 1) // 2
    offsets = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return w / w.sum()


def gaussian_blur(img: np.ndarray, sigma: float, kernel: int) -> np.ndarray:
    """Separable Gaussian blur with reflect padding; sigma=0 is identity.

    The kernel holds the discrete Gaussian sampled at integer offsets,
    normalized to sum 1.
    """
    img = _check_image(img)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if kernel < 1 or kernel % 2 == 0:
        raise ValueError(f"kernel size must be an odd int >= 1, got {kernel}")
    if sigma == 0 or kernel == 1:
        return img.copy()

    taps = _gaussian_taps(sigma, kernel)
    r = (kernel - 1) // 2
    work = img.astype(np.float64)
    padded = np.pad(work, ((r, r), (0, 0), (0, 0)), mode="reflect")
    rows = sum(taps[k] * padded[k : k + work.shape[0]] for k in range(kernel))
    padded = np.pad(rows, ((0, 0), (r, r), (0, 0)), mode="reflect")
    cols = sum(taps[k] * padded[:, k : k + work.shape[1]] for k in range(kernel))
    return np.clip(cols, 0.0, 1.0).astype(np.float32)


def add_noise(img: np.ndarray, std: float, seed: int) -> np.ndarray:
    """clamp(img + eps, 0, 1) with eps ~ N(0, std^2) drawn from PCG64(seed)."""
    img = _check_image(img)
    if std < 0:
        raise ValueError("std must be >= 0")
    if std == 0:
        return img.copy()
    rng = np.random.Generator(np.random.PCG64(seed))
    eps = rng.normal(0.0, std, size=img.shape)
    return np.clip(img.astype(np.float64) + eps, 0.0, 1.0).astype(np.float32)


def adjust_brightness(img: np.ndarray, factor: float) -> np.ndarray:
    """clamp(factor * img, 0, 1); factor must lie in (0, 1]."""
    img = _check_image(img)
    if not 0 < factor <= 1:
        raise ValueError(f"brightness factor must be in (0, 1], got {factor}")
    return np.clip(img * np.float32(factor), 0.0, 1.0).astype(np.float32)


def apply_perturbation(img: np.ndarray, spec: PerturbationSpec) -> np.ndarray:
    """Dispatch to the four perturbations.

    noise std=0, brightness factor=1, and blur sigma=0 are identities;
    jpeg quality=100 is NOT an identity, it still round-trips the codec.
    """
    if spec.kind == "noise":
        return add_noise(img, spec.std, spec.seed)
    if spec.kind == "jpeg":
        return jpeg_roundtrip(img, spec.quality)
    if spec.kind == "brightness":
        return adjust_brightness(img, spec.factor)
    return gaussian_blur(img, spec.sigma, spec.kernel)


def spec_for_level(kind: str, level: float, seed: int = 0, kernel: int = 5) -> PerturbationSpec:
    """Build a PerturbationSpec from a sweep level (see evalkit grids)."""
    if kind == "noise":
        return PerturbationSpec(kind="noise", std=float(level), seed=seed)
    if kind == "jpeg":
        return PerturbationSpec(kind="jpeg", quality=int(round(level)))
    if kind == "brightness":
        return PerturbationSpec(kind="brightness", factor=float(level))
    if kind == "blur":
        return PerturbationSpec(kind="blur", sigma=float(level), kernel=kernel)
    raise ValueError(f"unknown perturbation kind {kind!r}")
