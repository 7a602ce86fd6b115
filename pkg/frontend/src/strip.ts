/** View-model for the annotated word strip. */

import type { NoiseOp, OpModality, WordSpan } from './types.js';
import { normalizeOp } from './recipe.js';

/** The three modality tints used across the strip, the palette, and the
 * chart legend: video violet, audio amber, text teal. */
export const MODALITY_COLORS: Record<OpModality, string> = {
  video: '#7c4dff',
  audio: '#ff8f00',
  text: '#00897b',
};

export interface WordChip {
  index: number;
  token: string;
  /** Tints in fixed video/audio/text order, one per modality with an op. */
  tints: OpModality[];
  ops: Required<NoiseOp>[];
  struck: boolean;
  replacement: string | null;
}

const TINT_ORDER: OpModality[] = ['video', 'audio', 'text'];

export function buildStrip(words: WordSpan[], ops: NoiseOp[]): WordChip[] {
  const normalized = ops.map(normalizeOp);
  return words.map((w) => {
    const mine = normalized.filter((o) => o.word_index === w.index);
    const modalities = new Set(mine.map((o) => o.modality));
    const replace = mine.find((o) => o.method === 'Replace');
    return {
      index: w.index,
      token: w.token,
      tints: TINT_ORDER.filter((m) => modalities.has(m)),
      ops: mine,
      struck: mine.some((o) => o.method === 'Remove'),
      replacement: replace ? String(replace.params['new_token'] ?? '') : null,
    };
  });
}

/** CSS background for a chip: neutral, a single tint, or a hard-stop split
 * between the tints when ops span several modalities. */
export function chipBackground(chip: WordChip): string {
  if (chip.tints.length === 0) return 'transparent';
  if (chip.tints.length === 1) return MODALITY_COLORS[chip.tints[0]];
  const n = chip.tints.length;
  const stops = chip.tints.map((m, i) => {
    const from = ((100 * i) / n).toFixed(1);
    const to = ((100 * (i + 1)) / n).toFixed(1);
    return `${MODALITY_COLORS[m]} ${from}% ${to}%`;
  });
  return `linear-gradient(90deg, ${stops.join(', ')})`;
}
