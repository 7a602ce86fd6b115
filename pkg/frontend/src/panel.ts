/** View-model for the per-variant prediction cards. */

import type { Comparison, FeatureModality, Variant } from './types.js';

export interface ScoreRow {
  modality: FeatureModality;
  score: number;
  available: boolean;
}

export interface VerdictCard {
  variant: Variant;
  label: string;
  fused: string;
  scores: ScoreRow[];
  /** True when the external scorer was configured but unreachable. */
  fallback: boolean;
  external: boolean;
}

const VARIANT_ORDER: Variant[] = ['original', 'noised', 'defended'];
const MODALITY_ORDER: FeatureModality[] = ['text', 'audio', 'visual'];

export function formatScore(value: number): string {
  return (value >= 0 ? '+' : '') + value.toFixed(4);
}

export function buildPanel(doc: Comparison): VerdictCard[] {
  const cards: VerdictCard[] = [];
  for (const variant of VARIANT_ORDER) {
    const pred = doc.predictions[variant];
    if (!pred) continue;
    cards.push({
      variant,
      label: pred.label,
      fused: formatScore(pred.fused),
      scores: MODALITY_ORDER.map((m) => ({
        modality: m,
        score: pred.scores[m].score,
        available: pred.scores[m].available,
      })),
      fallback: pred.source === 'fallback',
      external: pred.source === 'external',
    });
  }
  return cards;
}
