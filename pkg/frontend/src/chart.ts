/** Geometry for the per-word feature chart: one line per variant over the
 * word axis, broken wherever a word's features are missing, plus a per-word
 * intensity band from the diff distances. Everything here is plain data so
 * the SVG layer stays trivial. */

import type { ModalityEntry, Variant } from './types.js';

export interface SeriesPoint {
  word: number;
  value: number;
}

export interface VariantSeries {
  variant: Variant;
  /** Runs of consecutive present words; a gap starts a new segment. */
  segments: SeriesPoint[][];
}

export function buildSeries(
  entry: ModalityEntry,
  variants: Variant[],
  dim: number,
): VariantSeries[] {
  const out: VariantSeries[] = [];
  for (const variant of variants) {
    const rows = entry.word_views[variant];
    if (!rows) continue;
    const segments: SeriesPoint[][] = [];
    let run: SeriesPoint[] = [];
    rows.forEach((row, word) => {
      if (row === null || dim >= row.length) {
        if (run.length) segments.push(run);
        run = [];
      } else {
        run.push({ word, value: row[dim] });
      }
    });
    if (run.length) segments.push(run);
    out.push({ variant, segments });
  }
  return out;
}

export interface ValueRange {
  lo: number;
  hi: number;
}

export function valueRange(series: VariantSeries[]): ValueRange {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const seg of s.segments) {
      for (const p of seg) {
        lo = Math.min(lo, p.value);
        hi = Math.max(hi, p.value);
      }
    }
  }
  if (lo > hi) return { lo: 0, hi: 1 };
  if (lo === hi) return { lo: lo - 0.5, hi: hi + 0.5 };
  return { lo, hi };
}

export interface ChartLayout {
  width: number;
  height: number;
  padX: number;
  padY: number;
  words: number;
}

export function xAt(layout: ChartLayout, word: number): number {
  const span = Math.max(1, layout.words - 1);
  const inner = layout.width - 2 * layout.padX;
  return layout.padX + (word / span) * inner;
}

export function yAt(layout: ChartLayout, range: ValueRange, value: number): number {
  const inner = layout.height - 2 * layout.padY;
  const t = (value - range.lo) / (range.hi - range.lo);
  return layout.height - layout.padY - t * inner;
}

/** SVG path strings, one per multi-point segment. Single-point runs can't be
 * stroked, so they come back separately for rendering as dots. */
export function seriesPaths(
  series: VariantSeries,
  layout: ChartLayout,
  range: ValueRange,
): { paths: string[]; dots: { x: number; y: number }[] } {
  const paths: string[] = [];
  const dots: { x: number; y: number }[] = [];
  for (const seg of series.segments) {
    if (seg.length === 1) {
      dots.push({
        x: xAt(layout, seg[0].word),
        y: yAt(layout, range, seg[0].value),
      });
      continue;
    }
    const cmds = seg.map((p, i) => {
      const x = xAt(layout, p.word).toFixed(2);
      const y = yAt(layout, range, p.value).toFixed(2);
      return `${i === 0 ? 'M' : 'L'}${x} ${y}`;
    });
    paths.push(cmds.join(' '));
  }
  return { paths, dots };
}

/** Per-word band opacity in [0, 1]: distances scaled by the largest one.
 * Words whose missing state differs between the variants are flagged so the
 * band can be hatched instead of shaded. */
export function diffBand(
  distance: number[],
  missingDiff: boolean[],
): { intensity: number[]; missing: boolean[] } {
  const max = Math.max(0, ...distance);
  const intensity = distance.map((d) => (max > 0 ? d / max : 0));
  return { intensity, missing: [...missingDiff] };
}
