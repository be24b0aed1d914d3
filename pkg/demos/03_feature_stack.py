"""Building the 5-channel input: RGB + reconstruction error + spectrum.

A synthetic 'reconstruction' that slightly blurs the original stands in for
an autoencoder output; the error channel lights up where the blur changed
texture, and the frequency channel shows the centered log-spectrum.
"""

import numpy as np

from imgprov.features import build_stack, pool_features
from imgprov.imaging import gaussian_blur

rng = np.random.default_rng(3)
img = rng.random((512, 512, 3)).astype(np.float32)
recon = gaussian_blur(img, 1.5, 5)

stack = build_stack(img, recon)
print("stack shape:", stack.shape)
for name, ch in zip("RGBEF", np.moveaxis(stack, 2, 0)):
    print(f"channel {name}: min={ch.min():.4f} max={ch.max():.4f} mean={ch.mean():.4f}")

pooled = pool_features(stack, 32)
print("pooled vector:", pooled.shape, "(32*32*5 =", 32 * 32 * 5, ")")
