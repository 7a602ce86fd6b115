"""Block-matching motion estimation and motion-compensated frame interpolation.

The estimator is a predictive zonal search: for each 16x16 block, in raster
order, it tries the zero vector, the left / top / top-right neighbour vectors,
and their component-wise median, keeps the lowest-SAD candidate, stops early
when that SAD is already small, and otherwise refines with a small diamond
walk of +-1 steps. Everything is integer-pel and deterministic: ties are
broken by smaller |dx|+|dy|, then smaller dy, then smaller dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .video import Frame, VideoTrack

BLOCK_SIZE = 16
SEARCH_RANGE = 16
#: early-termination SAD threshold (2 per pixel of a 16x16 block)
EARLY_STOP_SAD = 512

_DIAMOND = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass
class MotionField:
    """Per-block integer motion vectors (dx, dy) and their SAD costs."""

    block_size: int
    search_range: int
    vectors: np.ndarray  # (grid_h, grid_w, 2) int, [..., 0]=dx, [..., 1]=dy
    sad: np.ndarray      # (grid_h, grid_w) int64

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.sad.shape


def _as_luma(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.luma
    return np.asarray(frame, dtype=np.uint8)


def _pad_to_blocks(plane: np.ndarray, block_size: int) -> np.ndarray:
    h, w = plane.shape
    ph = (block_size - h % block_size) % block_size
    pw = (block_size - w % block_size) % block_size
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def _tie_key(v: tuple[int, int]) -> tuple[int, int, int]:
    dx, dy = v
    return (abs(dx) + abs(dy), dy, dx)


def estimate_motion(ref, cur, search_range: int = SEARCH_RANGE,
                    block_size: int = BLOCK_SIZE) -> MotionField:
    """Motion field mapping blocks of `cur` back into `ref`.

    For each block, the chosen vector v satisfies cur[block] ~= ref[block + v]
    with clamp-to-edge sampling of the reference. Raster-order processing
    guarantees the neighbour predictors are already decided; missing
    neighbours fall back to the zero vector.
    """
    ref_l, cur_l = _as_luma(ref), _as_luma(cur)
    if ref_l.shape != cur_l.shape:
        raise ValueError(f"frame dimensions differ: {ref_l.shape} vs {cur_l.shape}")
    ref_p = _pad_to_blocks(ref_l, block_size).astype(np.int32)
    cur_p = _pad_to_blocks(cur_l, block_size).astype(np.int32)
    grid_h = cur_p.shape[0] // block_size
    grid_w = cur_p.shape[1] // block_size
    # edge padding lets any candidate within +-search_range sample the reference
    ref_pad = np.pad(ref_p, search_range, mode="edge")

    vectors = np.zeros((grid_h, grid_w, 2), dtype=np.int64)
    sads = np.zeros((grid_h, grid_w), dtype=np.int64)

    for by in range(grid_h):
        for bx in range(grid_w):
            y0, x0 = by * block_size, bx * block_size
            block = cur_p[y0:y0 + block_size, x0:x0 + block_size]

            def sad_at(dx: int, dy: int) -> int:
                ry = y0 + dy + search_range
                rx = x0 + dx + search_range
                ref_blk = ref_pad[ry:ry + block_size, rx:rx + block_size]
                return int(np.abs(block - ref_blk).sum())

            left = tuple(vectors[by, bx - 1]) if bx > 0 else (0, 0)
            top = tuple(vectors[by - 1, bx]) if by > 0 else (0, 0)
            top_right = tuple(vectors[by - 1, bx + 1]) if by > 0 and bx + 1 < grid_w else (0, 0)
            median = (int(np.median([left[0], top[0], top_right[0]])),
                      int(np.median([left[1], top[1], top_right[1]])))
            candidates = [(0, 0), left, top, top_right, median]

            best_v: tuple[int, int] | None = None
            best_sad = 0
            for cand in candidates:
                cand = (int(cand[0]), int(cand[1]))
                if abs(cand[0]) > search_range or abs(cand[1]) > search_range:
                    continue
                s = sad_at(*cand)
                if best_v is None or (s, _tie_key(cand)) < (best_sad, _tie_key(best_v)):
                    best_v, best_sad = cand, s

            if best_sad > EARLY_STOP_SAD:
                while True:
                    moved = False
                    for step in _DIAMOND:
                        cand = (best_v[0] + step[0], best_v[1] + step[1])
                        if abs(cand[0]) > search_range or abs(cand[1]) > search_range:
                            continue
                        s = sad_at(*cand)
                        if (s, _tie_key(cand)) < (best_sad, _tie_key(best_v)):
                            best_v, best_sad = cand, s
                            moved = True
                    if not moved:
                        break

            vectors[by, bx] = best_v
            sads[by, bx] = best_sad

    return MotionField(block_size, search_range, vectors, sads)


def _round_offset(value: float) -> int:
    return int(math.floor(value + 0.5))


def mci_interpolate(prev: Frame, next_frame: Frame, t: float,
                    search_range: int = SEARCH_RANGE,
                    block_size: int = BLOCK_SIZE) -> Frame:
    """Synthesize the frame at fraction t in (0, 1) between prev and next.

    Forward motion (prev -> next) and backward motion (next -> prev) are
    estimated independently; each output block blends a motion-shifted sample
    from both sides with weights (1-t) and t. Offsets are rounded to integer
    pixels and sampled clamp-to-edge.
    """
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie strictly between 0 and 1, got {t}")
    prev_l, next_l = prev.luma, next_frame.luma
    if prev_l.shape != next_l.shape:
        raise ValueError("frame dimensions differ")
    h, w = prev_l.shape
    forward = estimate_motion(prev_l, next_l, search_range, block_size)
    backward = estimate_motion(next_l, prev_l, search_range, block_size)

    pad = search_range + 1
    prev_pad = np.pad(prev_l.astype(np.float64), pad, mode="edge")
    next_pad = np.pad(next_l.astype(np.float64), pad, mode="edge")

    out = np.zeros((h, w), dtype=np.float64)
    grid_h, grid_w = forward.grid_shape
    for by in range(grid_h):
        for bx in range(grid_w):
            y0, x0 = by * block_size, bx * block_size
            y1, x1 = min(y0 + block_size, h), min(x0 + block_size, w)
            if y0 >= h or x0 >= w:
                continue
            fdx, fdy = forward.vectors[by, bx]
            bdx, bdy = backward.vectors[by, bx]
            ofy, ofx = _round_offset(t * fdy), _round_offset(t * fdx)
            oby, obx = _round_offset((1 - t) * bdy), _round_offset((1 - t) * bdx)
            from_prev = prev_pad[y0 + ofy + pad:y1 + ofy + pad,
                                 x0 + ofx + pad:x1 + ofx + pad]
            from_next = next_pad[y0 + oby + pad:y1 + oby + pad,
                                 x0 + obx + pad:x1 + obx + pad]
            out[y0:y1, x0:x1] = (1.0 - t) * from_prev + t * from_next

    luma = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    chroma_src = prev if t <= 0.5 else next_frame
    chroma = None
    if chroma_src.chroma is not None:
        chroma = (chroma_src.chroma[0].copy(), chroma_src.chroma[1].copy())
    return Frame(luma, chroma)


def _missing_runs(missing: set[int], n: int) -> list[tuple[int, int]]:
    runs = []
    i = 0
    while i < n:
        if i in missing:
            j = i
            while j + 1 < n and j + 1 in missing:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def repair_missing(track: VideoTrack, search_range: int = SEARCH_RANGE,
                   block_size: int = BLOCK_SIZE) -> tuple[VideoTrack, list[str]]:
    """Refill missing frames; returns the repaired track and any warnings.

    Interior runs are interpolated at evenly spaced fractions between the
    bounding present frames; runs touching either end copy the nearest present
    frame. A track with no present frame at all cannot be repaired and is
    returned unchanged with a warning.
    """
    n = len(track)
    if not track.missing:
        return track.shallow_copy(), []
    if len(track.missing & set(range(n))) >= n:
        return track.shallow_copy(), ["video unrepairable: all frames missing"]
    out = track.shallow_copy()
    for lo, hi in _missing_runs(track.missing, n):
        left = lo - 1
        right = hi + 1
        if left < 0:
            for i in range(lo, hi + 1):
                out.frames[i] = track.frames[right].copy()
        elif right >= n:
            for i in range(lo, hi + 1):
                out.frames[i] = track.frames[left].copy()
        else:
            run_len = hi - lo + 1
            for k, i in enumerate(range(lo, hi + 1), start=1):
                t = k / (run_len + 1)
                out.frames[i] = mci_interpolate(track.frames[left], track.frames[right],
                                                t, search_range, block_size)
        for i in range(lo, hi + 1):
            out.missing.discard(i)
    return out, []
