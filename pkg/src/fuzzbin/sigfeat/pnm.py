"""Decoders for the netpbm formats scanners commonly emit.

Supported: P2/P5 grayscale (maxval up to 255) and P1/P4 bitmaps. PBM ink
bits (1 = black) become gray level 0 on a white background so binary scans
flow through the same pipeline as grayscale ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class GrayImage:
    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.size == 0:
            raise DataError(f"gray image must be a nonempty 2-D grid, got shape {p.shape}")
        p = p.astype(np.uint8, copy=True)
        p.flags.writeable = False
        object.__setattr__(self, "pixels", p)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class BinaryImage:
    pixels: np.ndarray  # (height, width) bool, True = ink

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.size == 0:
            raise DataError(f"binary image must be a nonempty 2-D grid, got shape {p.shape}")
        p = p.astype(bool, copy=True)
        p.flags.writeable = False
        object.__setattr__(self, "pixels", p)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def to_gray(self) -> GrayImage:
        return GrayImage(np.where(self.pixels, 0, 255).astype(np.uint8))


class _Tokens:
    """Whitespace-separated header tokens with # comments stripped."""

    def __init__(self, data: bytes, source: str):
        self.data = data
        self.pos = 0
        self.source = source

    def _skip_separators(self):
        while self.pos < len(self.data):
            b = self.data[self.pos]
            if b in b" \t\r\n":
                self.pos += 1
            elif b == ord("#"):
                while self.pos < len(self.data) and self.data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def next(self) -> bytes:
        self._skip_separators()
        if self.pos >= len(self.data):
            raise DataError(f"{self.source}: truncated header")
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in b" \t\r\n#":
            self.pos += 1
        return self.data[start:self.pos]

    def next_int(self, what: str) -> int:
        tok = self.next()
        try:
            return int(tok)
        except ValueError:
            raise DataError(f"{self.source}: non-numeric {what}: {tok[:16]!r}") from None

    def skip_single_separator(self):
        """Binary rasters begin after exactly one whitespace byte."""
        if self.pos >= len(self.data) or self.data[self.pos] not in b" \t\r\n":
            raise DataError(f"{self.source}: missing separator before raster")
        self.pos += 1


def read_image(path) -> GrayImage | BinaryImage:
    """Decode a PGM (P2/P5) or PBM (P1/P4) file.

    Malformed input raises DataError naming the file.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    return decode_image(data, source=str(path))


def decode_image(data: bytes, source: str = "<bytes>") -> GrayImage | BinaryImage:
    toks = _Tokens(data, source)
    try:
        magic = toks.next().decode("ascii")
    except UnicodeDecodeError:
        raise DataError(f"{source}: unreadable magic number") from None
    if magic not in ("P1", "P2", "P4", "P5"):
        raise DataError(f"{source}: unsupported magic number {magic!r} (need P1/P2/P4/P5)")

    width = toks.next_int("width")
    height = toks.next_int("height")
    if width < 1 or height < 1:
        raise DataError(f"{source}: invalid dimensions {width}x{height}")

    if magic in ("P2", "P5"):
        maxval = toks.next_int("maxval")
        if not (1 <= maxval <= 255):
            raise DataError(f"{source}: maxval {maxval} out of supported range 1..255")

    if magic == "P2":
        flat = np.empty(width * height, dtype=np.uint8)
        for i in range(width * height):
            v = toks.next_int("pixel")
            if not (0 <= v <= maxval):
                raise DataError(f"{source}: pixel value {v} exceeds maxval {maxval}")
            flat[i] = v
        return GrayImage(flat.reshape(height, width))

    if magic == "P5":
        toks.skip_single_separator()
        raster = data[toks.pos:toks.pos + width * height]
        if len(raster) < width * height:
            raise DataError(f"{source}: truncated raster")
        arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
        if arr.max(initial=0) > maxval:
            raise DataError(f"{source}: pixel value exceeds maxval {maxval}")
        return GrayImage(arr)

    if magic == "P1":
        bits = np.empty(width * height, dtype=bool)
        count = 0
        # P1 rasters may pack digits without separators; read char by char.
        while count < width * height:
            toks._skip_separators()
            if toks.pos >= len(data):
                raise DataError(f"{source}: truncated raster")
            ch = data[toks.pos]
            toks.pos += 1
            if ch == ord("1"):
                bits[count] = True
            elif ch == ord("0"):
                bits[count] = False
            else:
                raise DataError(f"{source}: invalid bitmap character {chr(ch)!r}")
            count += 1
        return BinaryImage(bits.reshape(height, width))

    # P4: rows padded to whole bytes, most significant bit first
    toks.skip_single_separator()
    row_bytes = (width + 7) // 8
    raster = data[toks.pos:toks.pos + row_bytes * height]
    if len(raster) < row_bytes * height:
        raise DataError(f"{source}: truncated raster")
    packed = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes)
    bits = np.unpackbits(packed, axis=1)[:, :width].astype(bool)
    return BinaryImage(bits)


def write_pgm(path, gray: GrayImage) -> None:
    """Emit a binary (P5) PGM with maxval 255."""
    header = f"P5\n{gray.width} {gray.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(gray.pixels.tobytes())


def write_pbm(path, binary: BinaryImage) -> None:
    """Emit a binary (P4) PBM, 1 = ink."""
    header = f"P4\n{binary.width} {binary.height}\n".encode("ascii")
    packed = np.packbits(binary.pixels.astype(np.uint8), axis=1)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed.tobytes())
