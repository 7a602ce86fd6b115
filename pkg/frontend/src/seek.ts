/** Word-level navigation over the playhead. All times in the document are
 * milliseconds; media elements speak seconds, so conversions live here. */

import type { WordSpan } from './types.js';

export function clampIndex(words: WordSpan[], index: number): number {
  if (words.length === 0) return -1;
  return Math.max(0, Math.min(words.length - 1, index));
}

/** Playhead position (in seconds) for a click on word `index`. */
export function seekTargetS(words: WordSpan[], index: number): number {
  const i = clampIndex(words, index);
  return i < 0 ? 0 : words[i].start_ms / 1000;
}

/** Prev/next buttons: step by one word, clamped at both ends. */
export function stepWord(words: WordSpan[], current: number, delta: -1 | 1): number {
  if (words.length === 0) return -1;
  if (current < 0) return delta > 0 ? 0 : words.length - 1;
  return clampIndex(words, current + delta);
}

/** The word under the playhead; spans are half-open [start_ms, end_ms). */
export function wordAtTime(words: WordSpan[], playheadMs: number): number {
  for (const w of words) {
    if (playheadMs >= w.start_ms && playheadMs < w.end_ms) return w.index;
  }
  return -1;
}
