"""Grayscale image loading/saving and the patch grid.

Supported inputs: portable graymaps (P2 ASCII / P5 binary, any maxval up to
65535) and non-interlaced 8-bit grayscale PNG. PGM is the interchange format
for outputs; the PNG path is a small stdlib-only decoder so the verification
pipeline carries no codec dependency.
"""

from __future__ import annotations

import enum
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import GrayImage, IntensityConvention, PatchGrid, normalize_image
from .errors import CoverageError, DimensionError, FormatError, ImageIOError, InputDomainError

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True)
class PatchRef:
    """One square patch plus its position in the patch grid."""

    grid_row: int
    grid_col: int
    patch_size: int
    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        arr.flags.writeable = False
        if arr.shape != (self.patch_size, self.patch_size):
            raise InputDomainError(
                f"patch pixels must be {self.patch_size}x{self.patch_size}, got {arr.shape}"
            )
        object.__setattr__(self, "pixels", arr)

    def with_pixels(self, pixels: np.ndarray) -> "PatchRef":
        return PatchRef(self.grid_row, self.grid_col, self.patch_size, pixels)


class PadPolicy(enum.Enum):
    REJECT = "reject"
    REFLECT_PAD = "reflect"


def _read_pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    """Read whitespace-separated integer tokens, honoring # comments."""
    tokens: list[int] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageIOError("PGM header ended before all fields were read")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError:
            raise FormatError(f"PGM header field {data[start:pos]!r} is not an integer")
    return tokens, pos


def _load_pgm(data: bytes, path: Path) -> GrayImage:
    magic = data[:2]
    (width, height, maxval), pos = _read_pgm_tokens(data, 3, 2)
    if width < 1 or height < 1:
        raise FormatError(f"{path}: PGM dimensions {width}x{height} invalid")
    if not 1 <= maxval <= 65535:
        raise FormatError(f"{path}: PGM maxval {maxval} out of range")

    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        wide = maxval > 255
        need = width * height * (2 if wide else 1)
        payload = data[pos : pos + need]
        if len(payload) < need:
            raise ImageIOError(
                f"{path}: truncated P5 payload ({len(payload)} of {need} bytes)"
            )
        dtype = ">u2" if wide else np.uint8
        raw = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.int64)
    else:
        values, _ = _read_pgm_tokens(data, width * height, pos)
        raw = np.array(values, dtype=np.int64).reshape(height, width)

    if raw.max(initial=0) > maxval:
        raise FormatError(f"{path}: sample exceeds declared maxval {maxval}")
    return normalize_image(raw, maxval + 1)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _load_png(data: bytes, path: Path) -> GrayImage:
    pos = len(_PNG_SIGNATURE)
    idat = bytearray()
    header = None
    while pos + 8 <= len(data):
        length, ctype = struct.unpack(">I4s", data[pos : pos + 8])
        chunk = data[pos + 8 : pos + 8 + length]
        if len(chunk) < length:
            raise ImageIOError(f"{path}: truncated PNG chunk {ctype!r}")
        crc = struct.unpack(">I", data[pos + 8 + length : pos + 12 + length])[0]
        if crc != zlib.crc32(ctype + chunk):
            raise ImageIOError(f"{path}: CRC mismatch in PNG chunk {ctype!r}")
        if ctype == b"IHDR":
            header = struct.unpack(">IIBBBBB", chunk)
        elif ctype == b"IDAT":
            idat.extend(chunk)
        elif ctype == b"IEND":
            break
        pos += 12 + length

    if header is None:
        raise FormatError(f"{path}: PNG has no IHDR chunk")
    width, height, depth, color, comp, filt, interlace = header
    if color != 0:
        raise FormatError(f"{path}: only grayscale PNG supported (color type {color})")
    if depth != 8:
        raise FormatError(f"{path}: only 8-bit PNG supported (bit depth {depth})")
    if comp != 0 or filt != 0:
        raise FormatError(f"{path}: unsupported PNG compression/filter method")
    if interlace != 0:
        raise FormatError(f"{path}: interlaced PNG not supported")

    try:
        stream = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise ImageIOError(f"{path}: corrupt PNG pixel stream ({exc})")
    stride = width + 1
    if len(stream) != height * stride:
        raise ImageIOError(
            f"{path}: PNG pixel stream has {len(stream)} bytes, expected {height * stride}"
        )

    raw = np.zeros((height, width), dtype=np.int64)
    prev = np.zeros(width, dtype=np.int64)
    for r in range(height):
        ftype = stream[r * stride]
        line = bytearray(stream[r * stride + 1 : (r + 1) * stride])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(1, width):
                line[i] = (line[i] + line[i - 1]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(width):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(width):
                left = line[i - 1] if i else 0
                line[i] = (line[i] + (left + prev[i]) // 2) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(width):
                left = line[i - 1] if i else 0
                upleft = prev[i - 1] if i else 0
                line[i] = (line[i] + _paeth(left, int(prev[i]), int(upleft))) & 0xFF
        else:
            raise FormatError(f"{path}: unknown PNG filter type {ftype}")
        prev = np.frombuffer(bytes(line), dtype=np.uint8).astype(np.int64)
        raw[r] = prev
    return normalize_image(raw, 256)


def load_gray(path) -> GrayImage:
    """Load a PGM (P2/P5) or 8-bit grayscale PNG as a normalized GrayImage."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return _load_pgm(data, path)
    if data[: len(_PNG_SIGNATURE)] == _PNG_SIGNATURE:
        return _load_png(data, path)
    raise FormatError(f"{path}: unsupported format (magic bytes {data[:8]!r})")


def save_pgm(img: GrayImage, path, depth: int = 256) -> None:
    """Write a binary P5 graymap at the given raw depth (256 or 65536)."""
    raw = IntensityConvention(depth).to_raw(img.pixels)
    maxval = depth - 1
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        payload = raw.astype(">u2").tobytes()
    else:
        payload = raw.astype(np.uint8).tobytes()
    Path(path).write_bytes(header + payload)


def extract_patches(
    img: GrayImage, patch_size: int, pad_policy: PadPolicy = PadPolicy.REJECT
) -> tuple[list[PatchRef], PatchGrid]:
    """Split an image into non-overlapping square patches, row-major.

    With REJECT the image dimensions must be exact multiples of patch_size;
    with REFLECT_PAD the image is mirror-padded up to the next multiple first.
    """
    if patch_size < 2:
        raise DimensionError(f"patch size must be >= 2, got {patch_size}")
    arr = img.pixels
    pad_r = (-arr.shape[0]) % patch_size
    pad_c = (-arr.shape[1]) % patch_size
    if pad_r or pad_c:
        if pad_policy is PadPolicy.REJECT:
            raise DimensionError(
                f"image {arr.shape[0]}x{arr.shape[1]} is not a multiple of "
                f"patch size {patch_size}; would need {pad_r} row(s) and "
                f"{pad_c} column(s) of padding"
            )
        arr = np.pad(arr, ((0, pad_r), (0, pad_c)), mode="symmetric")
    grid = PatchGrid(patch_size, arr.shape[0] // patch_size, arr.shape[1] // patch_size)
    patches = [
        PatchRef(
            r,
            c,
            patch_size,
            arr[
                r * patch_size : (r + 1) * patch_size,
                c * patch_size : (c + 1) * patch_size,
            ],
        )
        for r in range(grid.rows)
        for c in range(grid.cols)
    ]
    return patches, grid


def assemble_patches(patches, grid: PatchGrid) -> GrayImage:
    """Reassemble patches into an image; every grid cell must appear once."""
    seen = {}
    for p in patches:
        if p.patch_size != grid.patch_size:
            raise CoverageError(
                f"patch size {p.patch_size} does not match grid size {grid.patch_size}"
            )
        if not (0 <= p.grid_row < grid.rows and 0 <= p.grid_col < grid.cols):
            raise CoverageError(f"patch cell ({p.grid_row}, {p.grid_col}) outside grid")
        key = (p.grid_row, p.grid_col)
        if key in seen:
            raise CoverageError(f"duplicate patch for cell {key}")
        seen[key] = p
    missing = [
        (r, c) for r in range(grid.rows) for c in range(grid.cols) if (r, c) not in seen
    ]
    if missing:
        raise CoverageError(f"missing patches for cells {missing}")

    out = np.zeros(grid.image_shape)
    p = grid.patch_size
    for (r, c), patch in seen.items():
        out[r * p : (r + 1) * p, c * p : (c + 1) * p] = patch.pixels
    return GrayImage(out)
