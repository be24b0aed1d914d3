"""Robustness sweep of a brightness-sensitive toy classifier.

The classifier keys on mean intensity, so darkening sweeps degrade it on
cue while noise at level 0 reproduces the clean metrics exactly.  Real
sweeps run the same protocol over a manifest via `imgprov sweep`.
"""

import numpy as np

from imgprov.evalkit import robustness_sweep

bright = np.full((64, 64, 3), 0.8, dtype=np.float32)
dark = np.full((64, 64, 3), 0.3, dtype=np.float32)
images = [bright] * 4 + [dark] * 4
truth = np.array([1] * 4 + [0] * 4)


def predict(imgs):
    return [1 if float(np.mean(im)) > 0.55 else 0 for im in imgs]


for kind, levels in (("noise", [0.0, 0.1, 0.2]), ("brightness", [1.0, 0.75, 0.5])):
    grid = robustness_sweep(images, truth, predict, kind=kind, levels=levels,
                            num_classes=2, base_seed=42)
    print(f"{kind} sweep:")
    for level, rep in zip(grid.levels, grid.reports):
        print(f"  level {level:>5}: accuracy={rep.accuracy:.3f} macro_f1={rep.macro_f1:.3f}")
