/** Shared builders for tests: canned comparison documents and a fake
 * session service that echoes recipes the way the real one does (modality
 * derived from the method, defaulted params filled in, and one op per
 * (word, modality) slot with the later drop winning). */

import type {
  Comparison,
  ModalityEntry,
  NoiseOp,
  Prediction,
  Recipe,
  WordSpan,
} from '../src/types.js';
import { normalizeOp } from '../src/recipe.js';

export function makeWords(tokens: string[], wordMs = 500): WordSpan[] {
  return tokens.map((token, index) => ({
    index,
    token,
    start_ms: index * wordMs,
    end_ms: (index + 1) * wordMs,
    removed: false,
    replaced_from: null,
  }));
}

export function makePrediction(fused: number, label: Prediction['label']): Prediction {
  return {
    fused,
    label,
    neutral_band: 0.1,
    source: 'builtin',
    scores: {
      text: { modality: 'text', score: fused, available: true },
      audio: { modality: 'audio', score: fused, available: true },
      visual: { modality: 'visual', score: fused, available: true },
    },
  };
}

export function makeEntry(
  names: string[],
  views: ModalityEntry['word_views'],
): ModalityEntry {
  return { names, word_views: views };
}

export function makeComparison(partial: Partial<Comparison> = {}): Comparison {
  const words = partial.words ?? makeWords(['alpha', 'beta', 'gamma']);
  const flat = words.map(() => [0.5, 0.1]);
  return {
    id: 'testsessionid',
    created_at: '2026-01-01T00:00:00Z',
    words,
    variants: ['original'],
    annotations: [],
    recipe: null,
    defense: null,
    modalities: {
      audio: makeEntry(['log_energy', 'zcr'], { original: flat }),
      visual: makeEntry(['mean_luma', 'std_luma'], { original: flat }),
      text: makeEntry(['valence', 'negation'], { original: flat }),
    },
    predictions: { original: makePrediction(0.23, 'Positive') },
    transcripts: { original: words },
    warnings: [],
    ...partial,
  };
}

/** The server-side echo, reduced to its documented contract. */
export class FakeService {
  lastPut: Recipe | null = null;
  private doc: Comparison;

  constructor(doc: Comparison = makeComparison()) {
    this.doc = doc;
  }

  putRecipe(recipe: Recipe): Comparison {
    this.lastPut = recipe;
    // keep-last per slot, ordered by where the slot first appeared
    const order: string[] = [];
    const bySlot = new Map<string, Required<NoiseOp>>();
    for (const raw of recipe.ops) {
      const op = normalizeOp(raw);
      const slot = `${op.word_index}:${op.modality}`;
      if (!bySlot.has(slot)) order.push(slot);
      bySlot.set(slot, op);
    }
    const effective = order.map((slot) => bySlot.get(slot)!);
    this.doc = {
      ...this.doc,
      variants: ['original', 'noised'],
      annotations: effective,
      recipe: { ops: effective },
    };
    return this.doc;
  }
}
