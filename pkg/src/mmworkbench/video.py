"""Frame-sequence model, Y4M / frame-directory I/O, and the visual noise ops.

Analysis runs on the 8-bit luma plane; chroma, when present, is carried
through untouched except by blanking. A frame that is almost entirely black
(> 99% zero pixels) is treated as missing, which is how blanked frames are
recognized again after a round trip through files.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import MediaFormatError

MISSING_ZERO_FRACTION = 0.99


@dataclass(eq=False)
class Frame:
    """One video frame: luma plane (h, w) uint8, optional 4:2:0 chroma pair."""

    luma: np.ndarray
    chroma: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        self.luma = np.asarray(self.luma, dtype=np.uint8)
        if self.luma.ndim != 2:
            raise ValueError("luma plane must be 2-D")

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    def copy(self) -> "Frame":
        chroma = None
        if self.chroma is not None:
            chroma = (self.chroma[0].copy(), self.chroma[1].copy())
        return Frame(self.luma.copy(), chroma)

    def is_blank(self) -> bool:
        return float(np.mean(self.luma == 0)) > MISSING_ZERO_FRACTION


@dataclass(eq=False)
class VideoTrack:
    frames: list[Frame]
    width: int
    height: int
    fps_num: int
    fps_den: int = 1
    missing: set[int] = field(default_factory=set)

    def __post_init__(self):
        if self.fps_num <= 0 or self.fps_den <= 0:
            raise ValueError("fps must be positive")
        for i, f in enumerate(self.frames):
            if f.luma.shape != (self.height, self.width):
                raise MediaFormatError(
                    f"frame {i} is {f.luma.shape[1]}x{f.luma.shape[0]}, "
                    f"expected {self.width}x{self.height}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def fps(self) -> float:
        return self.fps_num / self.fps_den

    @property
    def frame_period_ms(self) -> float:
        return 1000.0 * self.fps_den / self.fps_num

    @property
    def duration_ms(self) -> float:
        return len(self.frames) * self.frame_period_ms

    def shallow_copy(self) -> "VideoTrack":
        return VideoTrack(list(self.frames), self.width, self.height,
                          self.fps_num, self.fps_den, set(self.missing))


def detect_missing(track: VideoTrack) -> VideoTrack:
    """Flag nearly-all-black frames as missing (in place); returns the track."""
    for i, f in enumerate(track.frames):
        if f.is_blank():
            track.missing.add(i)
    return track


def _fps_to_fraction(fps: float) -> Fraction:
    return Fraction(fps).limit_denominator(65535)


# ---------------------------------------------------------------------------
# Y4M (YUV4MPEG2), C420* and Cmono
# ---------------------------------------------------------------------------

_Y4M_MAGIC = b"YUV4MPEG2"


def read_y4m(path: str | Path) -> VideoTrack:
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0 or not data.startswith(_Y4M_MAGIC):
        raise MediaFormatError(f"{path} is not a YUV4MPEG2 stream")
    width = height = None
    fps_num, fps_den = 25, 1
    colorspace = "C420jpeg"
    for token in data[len(_Y4M_MAGIC):nl].split():
        tag, value = chr(token[0]), token[1:].decode("ascii", "replace")
        if tag == "W":
            width = int(value)
        elif tag == "H":
            height = int(value)
        elif tag == "F":
            num, den = value.split(":")
            fps_num, fps_den = int(num), int(den)
        elif tag == "C":
            colorspace = "C" + value
    if width is None or height is None:
        raise MediaFormatError(f"{path}: Y4M header missing W/H")
    if colorspace.startswith("C420"):
        has_chroma = True
    elif colorspace == "Cmono":
        has_chroma = False
    else:
        raise MediaFormatError(f"{path}: unsupported Y4M colorspace {colorspace}")
    y_size = width * height
    c_size = (width // 2) * (height // 2) if has_chroma else 0
    frames: list[Frame] = []
    pos = nl + 1
    while pos < len(data):
        line_end = data.find(b"\n", pos)
        if line_end < 0 or not data[pos:line_end].startswith(b"FRAME"):
            raise MediaFormatError(f"{path}: malformed FRAME header at byte {pos}")
        pos = line_end + 1
        end = pos + y_size + 2 * c_size
        if end > len(data):
            raise MediaFormatError(f"{path}: truncated frame payload")
        luma = np.frombuffer(data[pos:pos + y_size], dtype=np.uint8).reshape(height, width)
        chroma = None
        if has_chroma:
            cb = np.frombuffer(data[pos + y_size:pos + y_size + c_size],
                               dtype=np.uint8).reshape(height // 2, width // 2)
            cr = np.frombuffer(data[pos + y_size + c_size:end],
                               dtype=np.uint8).reshape(height // 2, width // 2)
            chroma = (cb.copy(), cr.copy())
        frames.append(Frame(luma.copy(), chroma))
        pos = end
    if not frames:
        raise MediaFormatError(f"{path}: no frames")
    track = VideoTrack(frames, width, height, fps_num, fps_den)
    return detect_missing(track)


def write_y4m(track: VideoTrack, path: str | Path) -> None:
    has_chroma = any(f.chroma is not None for f in track.frames)
    colorspace = b"C420jpeg" if has_chroma else b"Cmono"
    header = b"YUV4MPEG2 W%d H%d F%d:%d Ip A1:1 %b\n" % (
        track.width, track.height, track.fps_num, track.fps_den, colorspace)
    parts = [header]
    neutral = None
    for f in track.frames:
        parts.append(b"FRAME\n")
        parts.append(f.luma.tobytes())
        if has_chroma:
            if f.chroma is not None:
                parts.append(f.chroma[0].tobytes())
                parts.append(f.chroma[1].tobytes())
            else:
                if neutral is None:
                    neutral = np.full((track.height // 2, track.width // 2),
                                      128, dtype=np.uint8).tobytes()
                parts.append(neutral)
                parts.append(neutral)
    Path(path).write_bytes(b"".join(parts))


# ---------------------------------------------------------------------------
# frame directories: numbered PGM/PNG grayscale files + manifest.json
# ---------------------------------------------------------------------------

def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    m = re.match(rb"P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise MediaFormatError(f"{path} is not a binary PGM")
    width, height, maxval = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if maxval != 255:
        raise MediaFormatError(f"{path}: only 8-bit PGM supported")
    pixels = np.frombuffer(data[m.end():m.end() + width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise MediaFormatError(f"{path}: truncated PGM payload")
    return pixels.reshape(height, width).copy()


def _write_pgm(luma: np.ndarray, path: Path) -> None:
    h, w = luma.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + luma.tobytes())


def read_frame_dir(directory: str | Path) -> VideoTrack:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise MediaFormatError(f"{directory}: missing manifest.json")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if "fps" not in manifest:
        raise MediaFormatError(f"{directory}: manifest has no fps")
    fps = _fps_to_fraction(float(manifest["fps"]))
    paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in (".pgm", ".png"))
    if not paths:
        raise MediaFormatError(f"{directory}: no frames")
    frames = []
    for p in paths:
        if p.suffix.lower() == ".pgm":
            luma = _read_pgm(p)
        else:
            from PIL import Image
            luma = np.asarray(Image.open(p).convert("L"), dtype=np.uint8)
        frames.append(Frame(luma))
    height, width = frames[0].luma.shape
    if "width" in manifest and int(manifest["width"]) != width:
        raise MediaFormatError(f"{directory}: manifest width {manifest['width']} "
                               f"!= frame width {width}")
    if "height" in manifest and int(manifest["height"]) != height:
        raise MediaFormatError(f"{directory}: manifest height {manifest['height']} "
                               f"!= frame height {height}")
    track = VideoTrack(frames, width, height, fps.numerator, fps.denominator)
    return detect_missing(track)


def write_frame_dir(track: VideoTrack, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    digits = max(4, len(str(len(track.frames))))
    for i, f in enumerate(track.frames):
        _write_pgm(f.luma, directory / f"frame_{i:0{digits}d}.pgm")
    manifest = {"fps": track.fps, "width": track.width, "height": track.height}
    (directory / "manifest.json").write_text(json.dumps(manifest) + "\n", encoding="utf-8")


def read_video(path: str | Path) -> VideoTrack:
    path = Path(path)
    if path.is_dir():
        return read_frame_dir(path)
    if path.suffix.lower() == ".y4m":
        return read_y4m(path)
    raise MediaFormatError(f"unsupported video input {path}; expected .y4m or a frame directory")


def write_video(track: VideoTrack, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".y4m":
        write_y4m(track, path)
    else:
        write_frame_dir(track, path)


# ---------------------------------------------------------------------------
# visual noise ops
# ---------------------------------------------------------------------------

def _clamp_frame_range(span: tuple[int, int], n: int) -> tuple[int, int]:
    lo, hi = span
    return max(0, min(lo, n)), max(0, min(hi, n))


def blank(track: VideoTrack, span: tuple[int, int]) -> VideoTrack:
    """Zero all planes in [lo, hi) and flag those frames missing."""
    lo, hi = _clamp_frame_range(span, len(track))
    out = track.shallow_copy()
    for i in range(lo, hi):
        f = track.frames[i]
        chroma = None
        if f.chroma is not None:
            chroma = (np.zeros_like(f.chroma[0]), np.zeros_like(f.chroma[1]))
        out.frames[i] = Frame(np.zeros_like(f.luma), chroma)
        out.missing.add(i)
    return out


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def _convolve_axis(plane: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = (len(kernel) - 1) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(plane, pad, mode="edge")
    out = np.zeros_like(plane, dtype=np.float64)
    for j, w in enumerate(kernel):
        if axis == 1:
            out += w * padded[:, j:j + plane.shape[1]]
        else:
            out += w * padded[j:j + plane.shape[0], :]
    return out


def blur_frame(frame: Frame, sigma: float) -> Frame:
    """Separable Gaussian blur of the luma plane, clamp-to-edge borders.

    Both passes accumulate in float; a single round-to-nearest happens at
    the end. Chroma is untouched.
    """
    kernel = gaussian_kernel(sigma)
    acc = _convolve_axis(frame.luma.astype(np.float64), kernel, axis=1)
    acc = _convolve_axis(acc, kernel, axis=0)
    luma = np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8)
    return Frame(luma, frame.chroma)


def gaussian_blur(track: VideoTrack, span: tuple[int, int], sigma: float) -> VideoTrack:
    lo, hi = _clamp_frame_range(span, len(track))
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    out = track.shallow_copy()
    for i in range(lo, hi):
        out.frames[i] = blur_frame(track.frames[i], sigma)
    return out
