/** Client-side recipe editing: the drop palette, the one-op-per-slot rule,
 * and enough validation to refuse a request the server would 400 anyway. */

import type { Method, NoiseOp, OpModality } from './types.js';

export const METHOD_MODALITY: Record<Method, OpModality> = {
  BlankScreen: 'video',
  GaussianBlur: 'video',
  Mute: 'audio',
  AddNoise: 'audio',
  Replace: 'text',
  Remove: 'text',
};

export const METHODS = Object.keys(METHOD_MODALITY) as Method[];

export const DEFAULT_SIGMA = 3.0;
export const DEFAULT_SNR_DB = 0.0;

/** Params a freshly dropped chip starts with; Replace/AddNoise need the user
 * (or caller) to fill in the blanks before submission. */
export function defaultParams(method: Method): Record<string, unknown> {
  switch (method) {
    case 'GaussianBlur':
      return { sigma: DEFAULT_SIGMA };
    case 'AddNoise':
      return { profile_id: '', snr_db: DEFAULT_SNR_DB };
    case 'Replace':
      return { new_token: '' };
    default:
      return {};
  }
}

export function makeOp(
  method: Method,
  wordIndex: number,
  params?: Record<string, unknown>,
): NoiseOp {
  return {
    word_index: wordIndex,
    modality: METHOD_MODALITY[method],
    method,
    params: { ...defaultParams(method), ...(params ?? {}) },
  };
}

/** Fill in the modality and any defaulted params, the way the server will. */
export function normalizeOp(op: NoiseOp): Required<NoiseOp> {
  return {
    word_index: op.word_index,
    modality: op.modality ?? METHOD_MODALITY[op.method],
    method: op.method,
    params: { ...defaultParams(op.method), ...op.params },
  };
}

/** Add an op, replacing any existing op on the same (word, modality) slot.
 * Mirrors the server's keep-last rule so the strip never shows a stale chip. */
export function upsertOp(ops: NoiseOp[], op: NoiseOp): NoiseOp[] {
  const next = normalizeOp(op);
  const kept = ops.filter((o) => {
    const n = normalizeOp(o);
    return n.word_index !== next.word_index || n.modality !== next.modality;
  });
  return [...kept, next];
}

export function removeOp(
  ops: NoiseOp[],
  wordIndex: number,
  modality: OpModality,
): NoiseOp[] {
  return ops.filter((o) => {
    const n = normalizeOp(o);
    return n.word_index !== wordIndex || n.modality !== modality;
  });
}

export function opsAt(ops: NoiseOp[], wordIndex: number): Required<NoiseOp>[] {
  return ops.map(normalizeOp).filter((o) => o.word_index === wordIndex);
}

/** Problems that should block submission. Empty array means "safe to send". */
export function validateOp(
  op: NoiseOp,
  wordCount: number,
  profileIds?: string[],
): string[] {
  const problems: string[] = [];
  if (!Number.isInteger(op.word_index) || op.word_index < 0) {
    problems.push('word index must be a non-negative integer');
  } else if (op.word_index >= wordCount) {
    problems.push(`word index ${op.word_index} is past the last word`);
  }
  if (!(op.method in METHOD_MODALITY)) {
    problems.push(`unknown method ${op.method}`);
    return problems;
  }
  if (op.modality && op.modality !== METHOD_MODALITY[op.method]) {
    problems.push(`${op.method} acts on ${METHOD_MODALITY[op.method]}, not ${op.modality}`);
  }
  const params = op.params ?? {};
  if (op.method === 'GaussianBlur') {
    const sigma = params['sigma'];
    if (typeof sigma !== 'number' || !Number.isFinite(sigma) || sigma <= 0) {
      problems.push('sigma must be a positive number');
    }
  }
  if (op.method === 'AddNoise') {
    const profile = params['profile_id'];
    if (typeof profile !== 'string' || profile === '') {
      problems.push('pick a noise profile');
    } else if (profileIds && !profileIds.includes(profile)) {
      problems.push(`unknown noise profile ${profile}`);
    }
    const snr = params['snr_db'];
    if (typeof snr !== 'number' || !Number.isFinite(snr)) {
      problems.push('snr_db must be a finite number');
    }
  }
  if (op.method === 'Replace') {
    const token = params['new_token'];
    if (typeof token !== 'string' || token.trim() === '') {
      problems.push('replacement token must be non-empty');
    }
  }
  return problems;
}

function paramsEqual(a: Record<string, unknown>, b: Record<string, unknown>): boolean {
  const keys = new Set([...Object.keys(a), ...Object.keys(b)]);
  for (const k of keys) {
    if (a[k] !== b[k]) return false;
  }
  return true;
}

/** Order-insensitive equality over normalized ops. This is what "the server
 * echoed my recipe back" means: same (word, modality) slots, same methods,
 * same effective params. */
export function opsEquivalent(a: NoiseOp[], b: NoiseOp[]): boolean {
  const key = (o: Required<NoiseOp>) => `${o.word_index}:${o.modality}`;
  const sort = (ops: NoiseOp[]) =>
    ops.map(normalizeOp).sort((x, y) => key(x).localeCompare(key(y)));
  const na = sort(a);
  const nb = sort(b);
  if (na.length !== nb.length) return false;
  return na.every(
    (o, i) =>
      o.word_index === nb[i].word_index &&
      o.modality === nb[i].modality &&
      o.method === nb[i].method &&
      paramsEqual(o.params, nb[i].params),
  );
}
