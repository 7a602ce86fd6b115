/** Wire types for the session service. Field names mirror the JSON exactly. */

export type Variant = 'original' | 'noised' | 'defended';

/** Modalities as recipe ops name them (media-level). */
export type OpModality = 'video' | 'audio' | 'text';

/** Modalities as features and scores name them. */
export type FeatureModality = 'audio' | 'visual' | 'text';

export type Method =
  | 'BlankScreen'
  | 'GaussianBlur'
  | 'Mute'
  | 'AddNoise'
  | 'Replace'
  | 'Remove';

export type Label = 'Positive' | 'Neutral' | 'Negative';

export interface WordSpan {
  index: number;
  token: string;
  start_ms: number;
  end_ms: number;
  removed: boolean;
  replaced_from: string | null;
}

export interface NoiseOp {
  word_index: number;
  modality?: OpModality;
  method: Method;
  params: Record<string, unknown>;
}

export interface Recipe {
  ops: NoiseOp[];
}

export interface DefenseConfig {
  audio_denoise: { enabled: boolean; gate_factor: number };
  video_mci: { enabled: boolean; block_size: number; search_range: number };
  feature_interp: { enabled: boolean };
}

export interface ModalityScore {
  modality: FeatureModality;
  score: number;
  available: boolean;
}

export interface Prediction {
  fused: number;
  label: Label;
  neutral_band: number;
  source: 'builtin' | 'external' | 'fallback';
  scores: Record<FeatureModality, ModalityScore>;
}

export interface WordDiff {
  distance: number[];
  deltas: number[][];
  missing_diff: boolean[];
}

export interface ModalityEntry {
  names: string[];
  /** One row of per-word values per variant; null rows are missing words. */
  word_views: Partial<Record<Variant, (number[] | null)[]>>;
  diffs?: Partial<Record<'noised' | 'defended', WordDiff>>;
}

export interface Comparison {
  id: string;
  created_at: string;
  words: WordSpan[];
  variants: Variant[];
  annotations: NoiseOp[];
  recipe: Recipe | null;
  defense: DefenseConfig | null;
  modalities: Record<FeatureModality, ModalityEntry>;
  predictions: Partial<Record<Variant, Prediction>>;
  transcripts: Partial<Record<Variant, WordSpan[]>>;
  warnings: string[];
}

export interface SessionListing {
  id: string;
  created_at: string;
  has_noised: boolean;
  has_defended: boolean;
}

export interface NoiseProfileInfo {
  id: string;
  description: string;
}

export interface Violation {
  rule: string;
  message: string;
  span_index: number | null;
}
