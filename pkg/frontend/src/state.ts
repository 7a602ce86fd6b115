/** Session UI state and the pure derivation of everything rendered from it.
 *
 * The whole page is a function of (comparison document, pending edits,
 * playhead): re-deriving with the same inputs yields an identical view, which
 * is what makes reload-and-resume work.
 */

import { buildSeries, type VariantSeries } from './chart.js';
import { buildPanel, type VerdictCard } from './panel.js';
import { buildStrip, type WordChip } from './strip.js';
import { wordAtTime } from './seek.js';
import type { Comparison, FeatureModality, NoiseOp, Variant } from './types.js';

export interface UiSessionState {
  sessionId: string | null;
  comparison: Comparison | null;
  /** Ops as the user has arranged them; reset to the server's effective
   * recipe whenever a comparison lands. */
  pendingOps: NoiseOp[];
  selectedWord: number;
  activeVariant: Variant;
  chartModality: FeatureModality;
  chartDim: number;
  playheadMs: number;
  /** At most one mutating request in flight; drops are disabled meanwhile. */
  inFlight: boolean;
  toast: string | null;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    comparison: null,
    pendingOps: [],
    selectedWord: -1,
    activeVariant: 'original',
    chartModality: 'visual',
    chartDim: 0,
    playheadMs: 0,
    inFlight: false,
    toast: null,
  };
}

/** A comparison arrived: adopt it and drop any local edits in favor of the
 * effective recipe the server persisted. */
export function withComparison(state: UiSessionState, doc: Comparison): UiSessionState {
  return {
    ...state,
    sessionId: doc.id,
    comparison: doc,
    pendingOps: doc.recipe ? doc.recipe.ops.map((o) => ({ ...o })) : [],
    inFlight: false,
    toast: null,
  };
}

export interface DerivedView {
  strip: WordChip[];
  series: VariantSeries[];
  dimNames: string[];
  panel: VerdictCard[];
  highlightedWord: number;
  warnings: string[];
}

export function deriveView(state: UiSessionState): DerivedView | null {
  const doc = state.comparison;
  if (!doc) return null;
  const entry = doc.modalities[state.chartModality];
  return {
    strip: buildStrip(doc.words, state.pendingOps),
    series: buildSeries(entry, doc.variants, state.chartDim),
    dimNames: entry.names,
    panel: buildPanel(doc),
    highlightedWord: wordAtTime(doc.words, state.playheadMs),
    warnings: doc.warnings,
  };
}
