/** DOM renderers. Each takes a container, clears it, and rebuilds from the
 * view-model; state never lives in the DOM. */

import { diffBand, seriesPaths, valueRange, type ChartLayout } from './chart.js';
import { MODALITY_COLORS, chipBackground, type WordChip } from './strip.js';
import type { VerdictCard } from './panel.js';
import type { DerivedView } from './state.js';
import type { Comparison, Method, Variant } from './types.js';

export function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === 'class') el.className = v;
    else el.setAttribute(k, v);
  }
  el.append(...children);
  return el;
}

const SVG_NS = 'http://www.w3.org/2000/svg';

function svg(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

export interface StripHandlers {
  onWordClick(index: number): void;
  onDropMethod(method: Method, index: number): void;
  onClearWord(index: number): void;
}

export function renderStrip(
  root: HTMLElement,
  chips: WordChip[],
  selected: number,
  highlighted: number,
  handlers: StripHandlers,
): void {
  root.replaceChildren();
  for (const chip of chips) {
    const el = h('button', { class: 'word-chip', type: 'button' });
    const token = h('span', { class: 'token' }, chip.token);
    if (chip.struck) token.classList.add('struck');
    el.append(token);
    if (chip.replacement) {
      el.append(h('span', { class: 'replacement' }, `→${chip.replacement}`));
    }
    if (chip.tints.length) {
      el.style.background = chipBackground(chip);
      el.classList.add('tinted');
      el.title = chip.ops
        .map((o) => `${o.method} (${o.modality})`)
        .join(', ') + ' — double-click to clear';
    }
    if (chip.index === selected) el.classList.add('selected');
    if (chip.index === highlighted) el.classList.add('playing');
    el.addEventListener('click', () => handlers.onWordClick(chip.index));
    el.addEventListener('dblclick', () => handlers.onClearWord(chip.index));
    el.addEventListener('dragover', (ev) => {
      ev.preventDefault();
      el.classList.add('drop-target');
    });
    el.addEventListener('dragleave', () => el.classList.remove('drop-target'));
    el.addEventListener('drop', (ev) => {
      ev.preventDefault();
      el.classList.remove('drop-target');
      const method = ev.dataTransfer?.getData('text/plain');
      if (method) handlers.onDropMethod(method as Method, chip.index);
    });
    root.append(el);
  }
}

export function renderPanel(root: HTMLElement, cards: VerdictCard[]): void {
  root.replaceChildren();
  for (const card of cards) {
    const el = h('div', { class: `verdict-card ${card.variant}` });
    el.append(h('div', { class: 'variant-name' }, card.variant));
    el.append(h('div', { class: `label ${card.label.toLowerCase()}` }, card.label));
    el.append(h('div', { class: 'fused' }, `fused ${card.fused}`));
    const rows = h('div', { class: 'modality-scores' });
    for (const row of card.scores) {
      const r = h('div', { class: 'score-row' });
      r.append(h('span', { class: 'modality' }, row.modality));
      if (row.available) {
        r.append(h('span', { class: 'score' }, row.score.toFixed(3)));
      } else {
        r.classList.add('unavailable');
        r.append(h('span', { class: 'score' }, '—'));
        r.append(h('span', { class: 'badge' }, 'missing'));
      }
      rows.append(r);
    }
    el.append(rows);
    if (card.fallback) {
      el.append(h('div', { class: 'badge warn' }, 'external scorer unreachable'));
    } else if (card.external) {
      el.append(h('div', { class: 'badge' }, 'external scorer'));
    }
    root.append(el);
  }
}

const LINE_COLORS: Record<Variant, string> = {
  original: '#455a64',
  noised: '#e53935',
  defended: '#1e88e5',
};

export function renderChart(
  root: HTMLElement,
  view: DerivedView,
  doc: Comparison,
  modality: 'audio' | 'visual' | 'text',
  dim: number,
): void {
  root.replaceChildren();
  const layout: ChartLayout = {
    width: 720,
    height: 260,
    padX: 40,
    padY: 24,
    words: doc.words.length,
  };
  const el = svg('svg', {
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    class: 'feature-chart',
  });

  // per-word diff intensity band behind everything else
  const entry = doc.modalities[modality];
  const diff = entry.diffs?.defended ?? entry.diffs?.noised;
  if (diff) {
    const band = diffBand(diff.distance, diff.missing_diff);
    const slot = (layout.width - 2 * layout.padX) / Math.max(1, layout.words - 1);
    band.intensity.forEach((t, word) => {
      if (t <= 0 && !band.missing[word]) return;
      const rect = svg('rect', {
        x: String(layout.padX + (word - 0.5) * slot),
        y: String(layout.padY),
        width: String(slot),
        height: String(layout.height - 2 * layout.padY),
        fill: band.missing[word] ? 'url(#missing-hatch)' : '#ffb300',
        opacity: band.missing[word] ? '0.5' : (0.12 + 0.3 * t).toFixed(3),
      });
      el.append(rect);
    });
  }

  const defs = svg('defs');
  const pattern = svg('pattern', {
    id: 'missing-hatch',
    width: '6',
    height: '6',
    patternUnits: 'userSpaceOnUse',
    patternTransform: 'rotate(45)',
  });
  pattern.append(svg('rect', { width: '2', height: '6', fill: '#b0bec5' }));
  defs.append(pattern);
  el.append(defs);

  const range = valueRange(view.series);
  for (const s of view.series) {
    const { paths, dots } = seriesPaths(s, layout, range);
    for (const d of paths) {
      el.append(svg('path', {
        d,
        fill: 'none',
        stroke: LINE_COLORS[s.variant],
        'stroke-width': '2',
        class: `line-${s.variant}`,
      }));
    }
    for (const dot of dots) {
      el.append(svg('circle', {
        cx: String(dot.x),
        cy: String(dot.y),
        r: '3',
        fill: LINE_COLORS[s.variant],
        class: `dot-${s.variant}`,
      }));
    }
  }

  doc.words.forEach((w, i) => {
    const text = svg('text', {
      x: ((layout.padX + (i * (layout.width - 2 * layout.padX))
        / Math.max(1, layout.words - 1))).toFixed(1),
      y: String(layout.height - 6),
      'text-anchor': 'middle',
      class: 'word-label',
    });
    text.textContent = w.token;
    el.append(text);
  });

  root.append(el);

  const legend = h('div', { class: 'chart-legend' });
  for (const s of view.series) {
    const item = h('span', { class: 'legend-item' });
    const swatch = h('span', { class: 'swatch' });
    swatch.style.background = LINE_COLORS[s.variant];
    item.append(swatch, ` ${s.variant}`);
    legend.append(item);
  }
  legend.append(h('span', { class: 'legend-item' },
    ` │ ${modality}[${dim}] = ${view.dimNames[dim] ?? '?'}`));
  root.append(legend);
}

export function renderWarnings(root: HTMLElement, warnings: string[]): void {
  root.replaceChildren();
  for (const w of warnings) {
    root.append(h('div', { class: 'warning-line' }, `⚠ ${w}`));
  }
}

export function renderPaletteColors(root: HTMLElement): void {
  for (const el of root.querySelectorAll<HTMLElement>('.palette-chip')) {
    const modality = el.dataset['modality'] as keyof typeof MODALITY_COLORS;
    if (modality in MODALITY_COLORS) {
      el.style.borderColor = MODALITY_COLORS[modality];
    }
  }
}
