"""Task-level decision rules.

Covers the binary real/fake threshold on a probability, the one-class
fusion rule over five per-generator probabilities, the Gaussian-KDE view
of reconstruction-distance scores, and a scanned threshold detector over
such scores.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

NUM_GENERATORS = 5

FAKE_IF_BELOW = "fake_if_below"
FAKE_IF_ABOVE = "fake_if_above"
#: Fixed operating point used by the reference reconstruction-distance detector.
REFERENCE_DISTANCE_THRESHOLD = -0.035


def fuse_occ(probs, tau: float = 0.5) -> int:
    """Fuse five one-class probabilities into a class id.

    Returns 1 + argmax when the maximum exceeds tau (ties to the lowest
    index), else 0 (real).  The comparison is strict, so max == tau is
    classified real.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.shape != (NUM_GENERATORS,):
        raise ValueError(f"expected {NUM_GENERATORS} probabilities, got shape {p.shape}")
    if p.min() < 0 or p.max() > 1:
        raise ValueError("probabilities must lie in [0, 1]")
    j = int(np.argmax(p))
    if p[j] > tau:
        return j + 1
    return 0


def binary_decide(p_fake: float, tau: float = 0.5) -> str:
    """'fake' iff p_fake > tau (strict); boundary counts as real."""
    if not 0.0 <= p_fake <= 1.0:
        raise ValueError(f"probability out of range: {p_fake}")
    return "fake" if p_fake > tau else "real"


@dataclass(frozen=True)
class KdeModel:
    samples: np.ndarray
    bandwidth: float


def kde_fit(scores) -> KdeModel:
    """Gaussian KDE with Silverman bandwidth 0.9 min(sigma, IQR/1.34) n^(-1/5)."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    if len(s) < 2:
        raise DataError(f"need >= 2 scores to fit a density, got {len(s)}")
    if not np.all(np.isfinite(s)):
        raise DataError("scores must be finite")
    if np.all(s == s[0]):
        raise DataError("degenerate input: all scores equal")
    sigma = float(np.std(s, ddof=1))
    q75, q25 = np.percentile(s, [75, 25])
    iqr = float(q75 - q25)
    scale = min(sigma, iqr / 1.34) if iqr > 0 else sigma
    bandwidth = 0.9 * scale * len(s) ** (-1.0 / 5.0)
    return KdeModel(samples=s.copy(), bandwidth=bandwidth)


def kde_density(model: KdeModel, x) -> np.ndarray | float:
    """(1/(n h)) sum phi((x - s_i)/h) with phi the standard normal pdf."""
    xs = np.asarray(x, dtype=np.float64)
    scalar = xs.ndim == 0
    u = (np.atleast_1d(xs)[:, None] - model.samples[None, :]) / model.bandwidth
    phi = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    dens = phi.sum(axis=1) / (len(model.samples) * model.bandwidth)
    return float(dens[0]) if scalar else dens


@dataclass(frozen=True)
class ThresholdDetector:
    threshold: float
    direction: str  # FAKE_IF_BELOW or FAKE_IF_ABOVE

    def __post_init__(self):
        if self.direction not in (FAKE_IF_BELOW, FAKE_IF_ABOVE):
            raise ValueError(f"unknown direction {self.direction!r}")

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "direction": self.direction}

    @staticmethod
    def from_json(obj: dict) -> "ThresholdDetector":
        return ThresholdDetector(threshold=obj["threshold"], direction=obj["direction"])


def threshold_classify(detector: ThresholdDetector, score: float) -> str:
    """'fake' or 'real'; a score exactly at the threshold counts as fake."""
    if detector.direction == FAKE_IF_BELOW:
        return "fake" if score <= detector.threshold else "real"
    return "fake" if score >= detector.threshold else "real"


def _errors_at(threshold: float, direction: str, real: np.ndarray, fake: np.ndarray) -> int:
    if direction == FAKE_IF_BELOW:
        return int(np.sum(real <= threshold) + np.sum(fake > threshold))
    return int(np.sum(real >= threshold) + np.sum(fake < threshold))


def fit_threshold(
    scores_real,
    scores_fake,
    fixed_threshold: float | None = None,
) -> ThresholdDetector:
    """Pick the (threshold, direction) minimizing total misclassifications.

    Candidates are the midpoints of consecutive entries of the merged
    sorted scores; ties prefer the candidate closest to the midpoint of
    the class means.  A fixed threshold bypasses the scan entirely and
    only the direction is chosen.
    """
    real = np.asarray(scores_real, dtype=np.float64).ravel()
    fake = np.asarray(scores_fake, dtype=np.float64).ravel()
    if len(real) == 0 or len(fake) == 0:
        raise DataError("both score lists must be nonempty")

    if fixed_threshold is not None:
        candidates = [float(fixed_threshold)]
    else:
        merged = np.sort(np.concatenate([real, fake]))
        candidates = [float(m) for m in (merged[:-1] + merged[1:]) / 2.0]

    mean_mid = 0.5 * (real.mean() + fake.mean())
    best = None
    for thr in candidates:
        for direction in (FAKE_IF_BELOW, FAKE_IF_ABOVE):
            err = _errors_at(thr, direction, real, fake)
            key = (err, abs(thr - mean_mid), thr, direction)
            if best is None or key < best[0]:
                best = (key, ThresholdDetector(threshold=thr, direction=direction))
    return best[1]


def save_detector(detector: ThresholdDetector, path, bandwidth: float | None = None) -> None:
    doc = detector.to_json()
    if bandwidth is not None:
        doc["bandwidth"] = bandwidth
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_detector(path) -> ThresholdDetector:
    with open(path, "r", encoding="utf-8") as fh:
        return ThresholdDetector.from_json(json.load(fh))
