/** Thin typed client over the session service. The fetch implementation is
 * injectable so tests can run against a stub. */

import type {
  Comparison,
  DefenseConfig,
  NoiseProfileInfo,
  Recipe,
  SessionListing,
  Variant,
  Violation,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly violations: Violation[];

  constructor(status: number, message: string, violations: Violation[] = []) {
    super(message);
    this.status = status;
    this.violations = violations;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = '', fetchFn: FetchLike = (...a) => fetch(...a)) {
    this.base = base.replace(/\/$/, '');
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.base + path, { ...init, method });
    if (res.status === 204) return undefined as T;
    if (!res.ok) {
      let detail = `HTTP ${res.status}`;
      let violations: Violation[] = [];
      try {
        const body = await res.json();
        if (Array.isArray(body.violations)) {
          violations = body.violations;
          detail = violations.map((v) => `${v.rule}: ${v.message}`).join('; ');
        } else if (typeof body.detail === 'string') {
          detail = body.detail;
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(res.status, detail, violations);
    }
    return (await res.json()) as T;
  }

  private put<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>('PUT', path, {
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  createSession(audio: File, video: File, transcript: File): Promise<{ id: string }> {
    const form = new FormData();
    form.append('audio', audio);
    form.append('video', video);
    form.append('transcript', transcript);
    return this.request('POST', '/api/sessions', { body: form });
  }

  listSessions(): Promise<SessionListing[]> {
    return this.request('GET', '/api/sessions');
  }

  getComparison(id: string): Promise<Comparison> {
    return this.request('GET', `/api/sessions/${id}/comparison`);
  }

  putRecipe(id: string, recipe: Recipe): Promise<Comparison> {
    return this.put(`/api/sessions/${id}/recipe`, recipe);
  }

  putDefense(id: string, defense: Partial<DefenseConfig>): Promise<Comparison> {
    return this.put(`/api/sessions/${id}/defense`, defense);
  }

  deleteSession(id: string): Promise<void> {
    return this.request('DELETE', `/api/sessions/${id}`);
  }

  noiseProfiles(): Promise<NoiseProfileInfo[]> {
    return this.request('GET', '/api/noise-profiles');
  }

  mediaUrl(id: string, variant: Variant, modality: 'audio' | 'video'): string {
    return `${this.base}/api/sessions/${id}/media/${variant}/${modality}`;
  }

  exportUrl(id: string): string {
    return `${this.base}/api/sessions/${id}/export`;
  }
}
