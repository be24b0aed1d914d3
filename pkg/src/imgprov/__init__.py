"""imgprov: detection and source attribution of AI-generated images.

Library layout:

- ``tensorstore``: TNSR tensor container, JSON-Lines manifests, label spaces
- ``imaging``: decode/resize and the jpeg/blur/noise/brightness perturbations
- ``features``: 5-channel stacks (RGB + reconstruction error + spectrum)
- ``svm``: SMO-trained RBF SVM, Platt calibration, one-vs-rest, grid search
- ``linear``: softmax probe over pooled feature stacks
- ``decision``: fusion rule, KDE, threshold detectors
- ``evalkit``: metrics and perturbation-robustness sweeps
- ``cli``: the ``imgprov`` executable
"""

from . import decision, evalkit, features, imaging, linear, svm, tensorstore
from .errors import DataError, ManifestError, NumericError, TensorFormatError

__version__ = "0.1.0"

__all__ = [
    "decision",
    "evalkit",
    "features",
    "imaging",
    "linear",
    "svm",
    "tensorstore",
    "DataError",
    "ManifestError",
    "NumericError",
    "TensorFormatError",
    "__version__",
]
