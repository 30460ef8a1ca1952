"""Dataset files, sketch manifests and code files.

Code file layout (all integers little-endian)::

    b"BJLE" | u32 format_version | u32 manifest_len | manifest JSON (UTF-8)
    | 32-byte sha256 of the manifest bytes | u64 count | words

``words`` holds ``count * branches * ceil(m / word_width)`` u64 values; a
gaussian file has one branch per point, a circulant file two (tau, then tau').
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from binjl.bitcode import BinaryCode, DualCode
from binjl.circulant_sketch import CirculantSketcher, sample_circulant_sketcher
from binjl.errors import FormatError
from binjl.gaussian_sketch import GaussianSketcher, sample_gaussian_sketcher
from binjl.kernels import WORD_BITS, n_words
from binjl.rng import RNG_IDENTIFIER

FORMAT_VERSION = 1
CODE_MAGIC = b"BJLE"
DATA_MAGIC = b"BJLD"
DATA_VERSION = 1


@dataclass(frozen=True)
class DatasetMatrix:
    points: np.ndarray
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise FormatError(f"dataset must be 2-D, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise FormatError("dataset contains NaN or Inf")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "norms", np.linalg.norm(pts, axis=1))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def radius(self) -> float:
        return float(self.norms.max()) if self.count else 0.0


def _parse_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not f.strip() for f in record):
                continue
            try:
                values = [float(f) for f in record]
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric field") from None
            if not all(math.isfinite(v) for v in values):
                raise FormatError(f"{path}:{lineno}: NaN or Inf value")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise FormatError(f"{path}:{lineno}: expected {width} fields, got {len(values)}")
            rows.append(values)
    if not rows:
        raise FormatError(f"{path}: empty dataset")
    return np.asarray(rows, dtype=np.float64)


def _parse_packed(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) == 0:
        raise FormatError(f"{path}: empty dataset")
    header = struct.Struct("<4sIIQ")
    if len(raw) < header.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, n, count = header.unpack_from(raw, 0)
    if magic != DATA_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != DATA_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = header.size + 4 * n * count
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    if count == 0:
        raise FormatError(f"{path}: empty dataset")
    data = np.frombuffer(raw, dtype="<f4", offset=header.size).reshape(count, n)
    if not np.all(np.isfinite(data)):
        bad = int(np.nonzero(~np.all(np.isfinite(data), axis=1))[0][0])
        raise FormatError(f"{path}: record {bad} contains NaN or Inf")
    return data.astype(np.float64)


def load_dataset(path: str | Path, fmt: str = "csv") -> DatasetMatrix:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"{path}: no such file")
    if fmt == "csv":
        return DatasetMatrix(_parse_csv(path))
    if fmt == "packed_f32":
        return DatasetMatrix(_parse_packed(path))
    raise ValueError(f"unknown dataset format {fmt!r} (expected csv or packed_f32)")


def save_dataset(points: np.ndarray | DatasetMatrix, path: str | Path, fmt: str = "csv") -> None:
    pts = points.points if isinstance(points, DatasetMatrix) else np.asarray(points, dtype=np.float64)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in pts:
                w.writerow([repr(float(v)) for v in row])
    elif fmt == "packed_f32":
        count, n = pts.shape
        with open(path, "wb") as fh:
            fh.write(struct.pack("<4sIIQ", DATA_MAGIC, DATA_VERSION, n, count))
            fh.write(np.ascontiguousarray(pts, dtype="<f4").tobytes())
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")


@dataclass(frozen=True)
class SketchManifest:
    kind: str
    seed: int
    m: int
    n: int
    lam: float
    sign_zero: int = 1
    n_pad: int | None = None
    xi_distribution: str | None = None
    row_policy: str | None = None
    word_width: int = WORD_BITS
    format_version: int = FORMAT_VERSION
    rng_identifier: str = RNG_IDENTIFIER

    @property
    def branches(self) -> int:
        return 2 if self.kind == "circulant" else 1

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json_bytes()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> SketchManifest:
        try:
            return cls(**d)
        except TypeError as exc:
            raise FormatError(f"bad manifest: {exc}") from None

    @classmethod
    def for_sketcher(cls, sk: GaussianSketcher | CirculantSketcher) -> SketchManifest:
        common = dict(seed=int(sk.seed), m=sk.m, n=sk.n, lam=float(sk.lam), sign_zero=sk.quantizer.sign_zero)
        if isinstance(sk, CirculantSketcher):
            return cls("circulant", n_pad=sk.n_pad, xi_distribution=sk.xi_distribution, row_policy=sk.row_policy, **common)
        return cls("gaussian", **common)

    def build_sketcher(self) -> GaussianSketcher | CirculantSketcher:
        if self.kind == "gaussian":
            return sample_gaussian_sketcher(self.seed, self.m, self.n, self.lam, sign_zero=self.sign_zero)
        if self.kind == "circulant":
            return sample_circulant_sketcher(
                self.seed, self.m, self.n, self.lam, self.xi_distribution, self.row_policy, sign_zero=self.sign_zero
            )
        raise FormatError(f"unknown sketch kind {self.kind!r}")


def _codes_to_words(codes, manifest: SketchManifest) -> np.ndarray:
    nw = n_words(manifest.m)
    if isinstance(codes, np.ndarray):
        arr = np.asarray(codes, dtype=np.uint64)
        if arr.ndim == 2:
            arr = arr[:, None, :]
    else:
        rows = []
        for c in codes:
            parts = (c.first, c.second) if isinstance(c, DualCode) else (c,)
            for p in parts:
                if p.length != manifest.m:
                    raise ValueError(f"code length {p.length} does not match manifest m={manifest.m}")
            rows.append([p.words for p in parts])
        arr = np.asarray(rows, dtype=np.uint64).reshape(len(rows), -1, nw) if rows else np.zeros((0, manifest.branches, nw), np.uint64)
    if arr.shape[1:] != (manifest.branches, nw):
        raise ValueError(f"codes have shape {arr.shape[1:]}, manifest implies {(manifest.branches, nw)}")
    return arr


def save_codes(codes: Sequence[BinaryCode] | Sequence[DualCode] | np.ndarray, manifest: SketchManifest, path: str | Path) -> None:
    if manifest.word_width != WORD_BITS:
        raise ValueError(f"only word_width={WORD_BITS} is supported")
    words = _codes_to_words(codes, manifest)
    mbytes = manifest.to_json_bytes()
    with open(path, "wb") as fh:
        fh.write(CODE_MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(mbytes)))
        fh.write(mbytes)
        fh.write(hashlib.sha256(mbytes).digest())
        fh.write(struct.pack("<Q", words.shape[0]))
        fh.write(np.ascontiguousarray(words, dtype="<u8").tobytes())


def load_code_words(path: str | Path) -> tuple[np.ndarray, SketchManifest]:
    """Like :func:`load_codes` but returns the raw ``(count, branches, words)`` array."""
    raw = Path(path).read_bytes()
    pos = 0

    def take(k: int) -> bytes:
        nonlocal pos
        if pos + k > len(raw):
            raise FormatError(f"{path}: truncated file")
        chunk = raw[pos : pos + k]
        pos += k
        return chunk

    if take(4) != CODE_MAGIC:
        raise FormatError(f"{path}: bad magic")
    version, mlen = struct.unpack("<II", take(8))
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    mbytes = take(mlen)
    if hashlib.sha256(mbytes).digest() != take(32):
        raise FormatError(f"{path}: manifest hash mismatch")
    try:
        manifest = SketchManifest.from_dict(json.loads(mbytes.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable manifest ({exc})") from None
    if manifest.word_width != WORD_BITS:
        raise FormatError(f"{path}: unsupported word width {manifest.word_width}")
    (count,) = struct.unpack("<Q", take(8))
    nw = n_words(manifest.m)
    payload = take(count * manifest.branches * nw * 8)
    if pos != len(raw):
        raise FormatError(f"{path}: {len(raw) - pos} trailing bytes")
    words = np.frombuffer(payload, dtype="<u8").astype(np.uint64).reshape(count, manifest.branches, nw)
    return words, manifest


def load_codes(path: str | Path) -> tuple[list[BinaryCode] | list[DualCode], SketchManifest]:
    words, manifest = load_code_words(path)
    try:
        if manifest.branches == 1:
            codes = [BinaryCode(manifest.m, w[0]) for w in words]
        else:
            codes = [DualCode(BinaryCode(manifest.m, w[0]), BinaryCode(manifest.m, w[1])) for w in words]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return codes, manifest
