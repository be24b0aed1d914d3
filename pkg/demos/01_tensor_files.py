"""TNSR container walkthrough: write a tensor, inspect the bytes, read it back.

The container is deliberately tiny: 4-byte magic, version, dtype, ndim,
u32 dims, then the raw little-endian payload.
"""

import tempfile
from pathlib import Path

import numpy as np

from imgprov.tensorstore import read_tensor, write_tensor

workdir = Path(tempfile.mkdtemp())
path = workdir / "demo.tnsr"

arr = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], dtype=np.float32)
write_tensor(arr, path)

raw = path.read_bytes()
print(f"file size: {len(raw)} bytes")
print(f"magic:     {raw[:4]!r}")
print(f"version:   {raw[4]}, dtype code: {raw[5]}, ndim: {raw[6]}")
print(f"header+dims hex: {raw[:15].hex(' ')}")

back = read_tensor(path)
print("round-trip equal:", np.array_equal(back, arr), back.dtype, back.shape)
