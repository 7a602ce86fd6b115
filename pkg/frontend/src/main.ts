/** Page controller: owns the state, talks to the service, re-renders on
 * every change. The rendering itself is delegated to dom.ts and the logic
 * to the pure modules, so this file is mostly wiring. */

import { ApiClient, ApiError } from './api.js';
import { makeOp, validateOp } from './recipe.js';
import { upsertOp, removeOp } from './recipe.js';
import { seekTargetS, stepWord } from './seek.js';
import {
  initialState,
  deriveView,
  withComparison,
  type UiSessionState,
} from './state.js';
import {
  renderChart,
  renderPanel,
  renderPaletteColors,
  renderStrip,
  renderWarnings,
} from './dom.js';
import { frameIndexAt, parseY4m, type Y4mVideo } from './y4m.js';
import type { FeatureModality, Method, NoiseProfileInfo, Variant } from './types.js';

const api = new ApiClient('');

let state: UiSessionState = initialState();
let profiles: NoiseProfileInfo[] = [];
let video: Y4mVideo | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

const audioEl = () => $('player-audio') as HTMLAudioElement;
const canvasEl = () => $('player-canvas') as HTMLCanvasElement;

function setState(next: UiSessionState): void {
  state = next;
  render();
}

function toast(message: string): void {
  const el = $('toast');
  el.textContent = message;
  el.classList.add('visible');
  window.setTimeout(() => el.classList.remove('visible'), 4000);
}

// -- recipe edits -----------------------------------------------------------

function paramsForDrop(method: Method): Record<string, unknown> {
  if (method === 'GaussianBlur') {
    return { sigma: Number(($('param-sigma') as HTMLInputElement).value) };
  }
  if (method === 'AddNoise') {
    return {
      profile_id: ($('param-profile') as HTMLSelectElement).value,
      snr_db: Number(($('param-snr') as HTMLInputElement).value),
    };
  }
  if (method === 'Replace') {
    return { new_token: ($('param-token') as HTMLInputElement).value };
  }
  return {};
}

async function submitOps(ops: typeof state.pendingOps): Promise<void> {
  if (!state.sessionId) return;
  const before = state.pendingOps;
  setState({ ...state, pendingOps: ops, inFlight: true });
  try {
    const doc = await api.putRecipe(state.sessionId, { ops });
    setState(withComparison(state, doc));
    await loadMedia();
  } catch (err) {
    setState({ ...state, pendingOps: before, inFlight: false });
    toast(err instanceof ApiError ? err.message : String(err));
  }
}

function handleDrop(method: Method, wordIndex: number): void {
  if (!state.comparison || state.inFlight) return;
  const op = makeOp(method, wordIndex, paramsForDrop(method));
  const problems = validateOp(op, state.comparison.words.length,
    profiles.map((p) => p.id));
  if (problems.length) {
    toast(problems.join('; '));
    return;
  }
  void submitOps(upsertOp(state.pendingOps, op));
}

function handleClearWord(wordIndex: number): void {
  if (state.inFlight) return;
  let ops = state.pendingOps;
  for (const modality of ['video', 'audio', 'text'] as const) {
    ops = removeOp(ops, wordIndex, modality);
  }
  if (ops.length !== state.pendingOps.length) void submitOps(ops);
}

// -- defense ----------------------------------------------------------------

function defenseFromForm() {
  const checked = (id: string) => ($(id) as HTMLInputElement).checked;
  const num = (id: string) => Number(($(id) as HTMLInputElement).value);
  return {
    audio_denoise: { enabled: checked('def-denoise'), gate_factor: num('def-gate') },
    video_mci: {
      enabled: checked('def-mci'),
      block_size: num('def-block'),
      search_range: num('def-search'),
    },
    feature_interp: { enabled: checked('def-interp') },
  };
}

async function applyDefense(): Promise<void> {
  if (!state.sessionId || state.inFlight) return;
  setState({ ...state, inFlight: true });
  try {
    const doc = await api.putDefense(state.sessionId, defenseFromForm());
    setState(withComparison(state, doc));
    await loadMedia();
  } catch (err) {
    setState({ ...state, inFlight: false });
    toast(err instanceof ApiError ? err.message : String(err));
  }
}

// -- playback ---------------------------------------------------------------

async function loadMedia(): Promise<void> {
  if (!state.sessionId || !state.comparison) return;
  const variant = state.comparison.variants.includes(state.activeVariant)
    ? state.activeVariant
    : 'original';
  audioEl().src = api.mediaUrl(state.sessionId, variant, 'audio');
  try {
    const res = await fetch(api.mediaUrl(state.sessionId, variant, 'video'));
    video = parseY4m(await res.arrayBuffer());
  } catch {
    video = null;
  }
  drawFrame();
}

function drawFrame(): void {
  const canvas = canvasEl();
  const ctx = canvas.getContext('2d');
  if (!ctx || !video) return;
  canvas.width = video.width;
  canvas.height = video.height;
  const luma = video.frames[frameIndexAt(video, state.playheadMs)];
  if (!luma) return;
  const img = ctx.createImageData(video.width, video.height);
  for (let i = 0; i < luma.length; i++) {
    img.data[4 * i] = luma[i];
    img.data[4 * i + 1] = luma[i];
    img.data[4 * i + 2] = luma[i];
    img.data[4 * i + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
}

function seekToWord(index: number): void {
  if (!state.comparison) return;
  const t = seekTargetS(state.comparison.words, index);
  audioEl().currentTime = t;
  setState({ ...state, selectedWord: index, playheadMs: t * 1000 });
  drawFrame();
}

// -- session lifecycle ------------------------------------------------------

async function openSession(id: string): Promise<void> {
  const doc = await api.getComparison(id);
  setState({ ...withComparison(state, doc), selectedWord: -1, playheadMs: 0 });
  await loadMedia();
  ($('export-link') as HTMLAnchorElement).href = api.exportUrl(id);
}

async function refreshSessionList(): Promise<void> {
  const select = $('session-select') as HTMLSelectElement;
  const rows = await api.listSessions();
  select.replaceChildren();
  select.append(new Option('— pick a session —', ''));
  for (const row of rows) {
    const marks = `${row.has_noised ? ' +noise' : ''}${row.has_defended ? ' +defense' : ''}`;
    select.append(new Option(`${row.id}${marks}`, row.id));
  }
  if (state.sessionId) select.value = state.sessionId;
}

async function handleUpload(ev: Event): Promise<void> {
  ev.preventDefault();
  const file = (id: string) => ($(id) as HTMLInputElement).files?.[0];
  const audio = file('upload-audio');
  const videoFile = file('upload-video');
  const transcript = file('upload-transcript');
  if (!audio || !videoFile || !transcript) {
    toast('pick all three files first');
    return;
  }
  try {
    const { id } = await api.createSession(audio, videoFile, transcript);
    await refreshSessionList();
    await openSession(id);
  } catch (err) {
    toast(err instanceof ApiError ? err.message : String(err));
  }
}

// -- rendering --------------------------------------------------------------

function render(): void {
  const view = deriveView(state);
  $('app').classList.toggle('no-session', !view);
  document.body.classList.toggle('busy', state.inFlight);
  if (!view || !state.comparison) return;

  renderStrip($('word-strip'), view.strip, state.selectedWord,
    view.highlightedWord, {
      onWordClick: seekToWord,
      onDropMethod: handleDrop,
      onClearWord: handleClearWord,
    });
  renderPanel($('prediction-panel'), view.panel);
  renderChart($('chart-host'), view, state.comparison, state.chartModality,
    state.chartDim);
  renderWarnings($('warnings'), view.warnings);

  const dimSelect = $('chart-dim') as HTMLSelectElement;
  if (dimSelect.options.length !== view.dimNames.length) {
    dimSelect.replaceChildren();
    view.dimNames.forEach((name, i) => {
      dimSelect.append(new Option(name, String(i)));
    });
  }
  dimSelect.value = String(state.chartDim);

  const variantSelect = $('variant-select') as HTMLSelectElement;
  for (const opt of Array.from(variantSelect.options)) {
    opt.disabled = !state.comparison.variants.includes(opt.value as Variant);
  }
}

function wire(): void {
  renderPaletteColors($('palette'));
  for (const chip of document.querySelectorAll<HTMLElement>('.palette-chip')) {
    chip.addEventListener('dragstart', (ev) => {
      ev.dataTransfer?.setData('text/plain', chip.dataset['method'] ?? '');
    });
  }

  $('upload-form').addEventListener('submit', (ev) => void handleUpload(ev));
  $('session-select').addEventListener('change', (ev) => {
    const id = (ev.target as HTMLSelectElement).value;
    if (id) void openSession(id);
  });
  $('refresh-sessions').addEventListener('click', () => void refreshSessionList());

  $('word-prev').addEventListener('click', () => {
    if (state.comparison) {
      seekToWord(stepWord(state.comparison.words, state.selectedWord, -1));
    }
  });
  $('word-next').addEventListener('click', () => {
    if (state.comparison) {
      seekToWord(stepWord(state.comparison.words, state.selectedWord, 1));
    }
  });

  audioEl().addEventListener('timeupdate', () => {
    setState({ ...state, playheadMs: audioEl().currentTime * 1000 });
    drawFrame();
  });

  $('variant-select').addEventListener('change', (ev) => {
    const variant = (ev.target as HTMLSelectElement).value as Variant;
    setState({ ...state, activeVariant: variant });
    void loadMedia();
  });

  $('chart-modality').addEventListener('change', (ev) => {
    const modality = (ev.target as HTMLSelectElement).value as FeatureModality;
    setState({ ...state, chartModality: modality, chartDim: 0 });
  });
  $('chart-dim').addEventListener('change', (ev) => {
    setState({ ...state, chartDim: Number((ev.target as HTMLSelectElement).value) });
  });

  $('apply-defense').addEventListener('click', () => void applyDefense());

  void api.noiseProfiles().then((rows) => {
    profiles = rows;
    const select = $('param-profile') as HTMLSelectElement;
    select.replaceChildren();
    for (const p of rows) select.append(new Option(p.id, p.id));
  });
  void refreshSessionList();
}

document.addEventListener('DOMContentLoaded', wire);
