import { describe, expect, it } from 'vitest';

import { makeOp } from '../src/recipe.js';
import { deriveView, initialState, withComparison } from '../src/state.js';
import { makeComparison, makePrediction, makeEntry } from './fixtures.js';

describe('state transitions', () => {
  it('starts with no session and nothing derivable', () => {
    const state = initialState();
    expect(state.sessionId).toBeNull();
    expect(deriveView(state)).toBeNull();
  });

  it('adopting a comparison resets pending ops to the effective recipe', () => {
    const op = makeOp('Mute', 1);
    const doc = makeComparison({
      variants: ['original', 'noised'],
      recipe: { ops: [op] },
      annotations: [op],
    });
    const state = withComparison(
      { ...initialState(), pendingOps: [makeOp('Remove', 0)], inFlight: true },
      doc,
    );
    expect(state.sessionId).toBe(doc.id);
    expect(state.pendingOps).toEqual([op]);
    expect(state.inFlight).toBe(false);
    // the reset is a copy, not a reference into the document
    expect(state.pendingOps[0]).not.toBe(op);
  });
});

describe('view derivation is pure', () => {
  it('same inputs give an identical view', () => {
    const doc = makeComparison({
      variants: ['original', 'noised'],
      recipe: { ops: [makeOp('BlankScreen', 1)] },
      annotations: [makeOp('BlankScreen', 1)],
      predictions: {
        original: makePrediction(0.23, 'Positive'),
        noised: makePrediction(0.02, 'Neutral'),
      },
    });
    const state = { ...withComparison(initialState(), doc), playheadMs: 700 };
    const a = deriveView(state);
    const b = deriveView({ ...state });
    expect(a).not.toBeNull();
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  it('reflects the playhead in the highlighted word', () => {
    const doc = makeComparison();
    const base = withComparison(initialState(), doc);
    expect(deriveView({ ...base, playheadMs: 0 })!.highlightedWord).toBe(0);
    expect(deriveView({ ...base, playheadMs: 1200 })!.highlightedWord).toBe(2);
    expect(deriveView({ ...base, playheadMs: 99999 })!.highlightedWord).toBe(-1);
  });

  it('follows the chart modality and dimension selection', () => {
    const doc = makeComparison({
      modalities: {
        audio: makeEntry(['log_energy', 'zcr'],
          { original: [[1, 2], [3, 4], [5, 6]] }),
        visual: makeEntry(['mean_luma'], { original: [[7], [8], [9]] }),
        text: makeEntry(['valence'], { original: [[0], [0], [0]] }),
      },
    });
    const base = withComparison(initialState(), doc);
    const audioDim1 = deriveView({ ...base, chartModality: 'audio', chartDim: 1 })!;
    expect(audioDim1.dimNames).toEqual(['log_energy', 'zcr']);
    expect(audioDim1.series[0].segments[0].map((p) => p.value)).toEqual([2, 4, 6]);

    const visual = deriveView({ ...base, chartModality: 'visual', chartDim: 0 })!;
    expect(visual.series[0].segments[0].map((p) => p.value)).toEqual([7, 8, 9]);
  });

  it('the strip follows pending edits, not the last server state', () => {
    const doc = makeComparison();
    const base = withComparison(initialState(), doc);
    const edited = { ...base, pendingOps: [makeOp('Mute', 0)] };
    expect(deriveView(base)!.strip[0].tints).toEqual([]);
    expect(deriveView(edited)!.strip[0].tints).toEqual(['audio']);
  });
});
