"""Bit-exact I/O for tensors, dataset manifests, and label encodings.

The TNSR container is the single interchange format of the toolkit.  Byte
layout, fixed little-endian so files are identical across platforms:

    offset 0   magic  b"TNSR"          (4 ASCII bytes)
    offset 4   version                 (1 byte, currently 0x01)
    offset 5   dtype                   (1 byte: 1 = f32, 2 = u8)
    offset 6   ndim                    (1 byte, 1..4)
    offset 7   dims                    (ndim x u32 little-endian)
    then       payload                 (row-major scalars, little-endian)
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ManifestError, TensorFormatError

MAGIC = b"TNSR"
VERSION = 1

DTYPE_F32 = 1
DTYPE_U8 = 2

_DTYPE_TO_NUMPY = {DTYPE_F32: np.dtype("<f4"), DTYPE_U8: np.dtype("u1")}
_NUMPY_TO_DTYPE = {"float32": DTYPE_F32, "uint8": DTYPE_U8}

MAX_NDIM = 4
_U32_MAX = 2**32 - 1

#: Fixed label vocabulary; ids are positions in this tuple.
LABELS = ("real", "sd21", "sdxl", "sd3", "dalle", "midjourney")
SPLITS = ("train", "val", "test")


def write_tensor(array: np.ndarray, path) -> None:
    """Write ``array`` (float32 or uint8) to ``path`` in TNSR format."""
    arr = np.ascontiguousarray(array)
    if arr.dtype.name not in _NUMPY_TO_DTYPE:
        raise TensorFormatError(
            f"unsupported dtype {arr.dtype.name}; TNSR holds float32 or uint8"
        )
    if arr.ndim < 1 or arr.ndim > MAX_NDIM:
        raise TensorFormatError(f"shape must have 1..{MAX_NDIM} dims, got {arr.ndim}")
    if any(d < 1 for d in arr.shape):
        raise TensorFormatError(f"all dims must be >= 1, got {arr.shape}")
    if any(d > _U32_MAX for d in arr.shape):
        raise TensorFormatError(f"dimension overflows u32: {arr.shape}")

    dtype_code = _NUMPY_TO_DTYPE[arr.dtype.name]
    header = MAGIC + struct.pack(
        f"<BBB{arr.ndim}I", VERSION, dtype_code, arr.ndim, *arr.shape
    )
    payload = arr.astype(_DTYPE_TO_NUMPY[dtype_code], copy=False).tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_tensor(path) -> np.ndarray:
    """Read a TNSR file back into a numpy array (inverse of write_tensor)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise TensorFormatError(f"bad magic {raw[:4]!r} in {path}; expected {MAGIC!r}")
    if len(raw) < 7:
        raise TensorFormatError(f"truncated header in {path}: {len(raw)} bytes")
    version, dtype_code, ndim = struct.unpack_from("<BBB", raw, 4)
    if version != VERSION:
        raise TensorFormatError(f"unknown version {version} in {path}")
    if dtype_code not in _DTYPE_TO_NUMPY:
        raise TensorFormatError(f"unknown dtype code {dtype_code} in {path}")
    if ndim < 1 or ndim > MAX_NDIM:
        raise TensorFormatError(f"ndim {ndim} outside 1..{MAX_NDIM} in {path}")
    dims_end = 7 + 4 * ndim
    if len(raw) < dims_end:
        raise TensorFormatError(f"truncated dims in {path}: {len(raw)} bytes")
    shape = struct.unpack_from(f"<{ndim}I", raw, 7)
    if any(d < 1 for d in shape):
        raise TensorFormatError(f"zero dimension in {path}: {shape}")

    dtype = _DTYPE_TO_NUMPY[dtype_code]
    expected = int(np.prod(shape)) * dtype.itemsize
    actual = len(raw) - dims_end
    if actual != expected:
        raise TensorFormatError(
            f"payload of {path} is {actual} bytes, expected {expected} "
            f"for shape {shape}"
        )
    arr = np.frombuffer(raw[dims_end:], dtype=dtype).reshape(shape)
    return arr.copy()  # decouple from the read buffer


@dataclass(frozen=True)
class ManifestRecord:
    path: str
    label: str
    split: str

    @property
    def label_id(self) -> int:
        return LABELS.index(self.label)


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered list of (path, label, split) records from a JSON-Lines file."""

    records: tuple[ManifestRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def paths(self) -> list[str]:
        return [r.path for r in self.records]

    def label_ids(self) -> np.ndarray:
        return np.array([r.label_id for r in self.records], dtype=np.int64)

    def subset(self, split: str) -> "DatasetManifest":
        return DatasetManifest(tuple(r for r in self.records if r.split == split))


def read_manifest(path) -> DatasetManifest:
    """Parse a JSON-Lines manifest; errors name the offending line number."""
    records = []
    seen_paths = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: malformed JSON ({exc.msg})")
            if not isinstance(obj, dict):
                raise ManifestError(f"{path}:{lineno}: record must be an object")
            missing = {"path", "label", "split"} - obj.keys()
            if missing:
                raise ManifestError(
                    f"{path}:{lineno}: missing fields {sorted(missing)}"
                )
            if obj["label"] not in LABELS:
                raise ManifestError(
                    f"{path}:{lineno}: unknown label {obj['label']!r}; "
                    f"expected one of {LABELS}"
                )
            if obj["split"] not in SPLITS:
                raise ManifestError(
                    f"{path}:{lineno}: unknown split {obj['split']!r}; "
                    f"expected one of {SPLITS}"
                )
            if obj["path"] in seen_paths:
                raise ManifestError(f"{path}:{lineno}: duplicate path {obj['path']!r}")
            seen_paths.add(obj["path"])
            records.append(
                ManifestRecord(path=obj["path"], label=obj["label"], split=obj["split"])
            )
    return DatasetManifest(tuple(records))


def write_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in manifest.records:
            fh.write(json.dumps({"path": r.path, "label": r.label, "split": r.split}))
            fh.write("\n")


@dataclass(frozen=True)
class LabelSpace:
    """Fixed class-id assignment for the two tasks.

    Task A: real=0, any generator=1.  Task B: real=0, sd21=1, sdxl=2,
    sd3=3, dalle=4, midjourney=5.
    """

    task: str  # "A" or "B"

    def __post_init__(self):
        if self.task not in ("A", "B"):
            raise ValueError(f"task must be 'A' or 'B', got {self.task!r}")

    @property
    def num_classes(self) -> int:
        return 2 if self.task == "A" else len(LABELS)

    @property
    def class_names(self) -> tuple[str, ...]:
        return ("real", "fake") if self.task == "A" else LABELS

    def class_id(self, label: str) -> int:
        idx = LABELS.index(label)
        if self.task == "A":
            return 0 if idx == 0 else 1
        return idx

    def to_json(self) -> dict:
        return {"task": self.task, "classes": list(self.class_names)}

    @staticmethod
    def from_json(obj: dict) -> "LabelSpace":
        return LabelSpace(task=obj["task"])


def encode_labels(manifest: DatasetManifest, label_space: LabelSpace) -> np.ndarray:
    """Map manifest records to integer class ids, preserving record order."""
    return np.array(
        [label_space.class_id(r.label) for r in manifest.records], dtype=np.int64
    )


def write_predictions(class_ids: Sequence[int], path) -> None:
    """Persist predicted class ids as a TNSR u8 vector in record order."""
    ids = np.asarray(class_ids)
    if ids.size == 0:
        raise TensorFormatError("no predictions to write")
    if ids.min() < 0 or ids.max() > 255:
        raise TensorFormatError("class ids must fit u8")
    write_tensor(ids.astype(np.uint8), path)


def read_predictions(path) -> np.ndarray:
    arr = read_tensor(path)
    if arr.dtype != np.uint8 or arr.ndim != 1:
        raise TensorFormatError(f"predictions file {path} must be a u8 vector")
    return arr.astype(np.int64)
