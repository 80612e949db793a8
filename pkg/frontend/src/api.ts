import type {
  ApiErrorBody,
  Placement,
  SceneDetail,
  SceneListItem,
  SessionDoc,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly locus?: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

/** Typed client for the session service. All responses are server documents. */
export class ApiClient {
  constructor(
    private readonly base = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      throw await this.toError(response);
    }
    return (await response.json()) as T;
  }

  private async toError(response: Response): Promise<ApiError> {
    let body: ApiErrorBody | null = null;
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      // non-JSON error body; fall through to the generic message
    }
    return new ApiError(
      response.status,
      body?.code ?? 'http_error',
      body?.message ?? `request failed with status ${response.status}`,
      body?.locus,
    );
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  listScenes(): Promise<SceneListItem[]> {
    return this.request('/scenes');
  }

  getScene(sceneId: string): Promise<SceneDetail> {
    return this.request(`/scenes/${encodeURIComponent(sceneId)}`);
  }

  sceneImageUrl(sceneId: string): string {
    return `${this.base}/scenes/${encodeURIComponent(sceneId)}/image`;
  }

  createSession(sceneId: string): Promise<SessionDoc> {
    return this.post('/sessions', { scene_id: sceneId });
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  setAnchor(sessionId: string, anchor: string): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/anchor`, { anchor });
  }

  choosePair(sessionId: string, coObject: string, override = false): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/pair`, {
      co_object: coObject,
      override,
    });
  }

  fetchCandidates(sessionId: string): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/candidates`);
  }

  decide(sessionId: string, rank: number, decision: 'accept' | 'reject'): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/decisions`, {
      rank,
      decision,
    });
  }

  placeAsset(sessionId: string, placement: Placement): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/placements`, placement);
  }

  complete(sessionId: string): Promise<SessionDoc> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/complete`);
  }

  /** Raw export bytes; kept as bytes so the download is byte-identical. */
  async exportSession(sessionId: string): Promise<Uint8Array> {
    const response = await this.fetchFn(
      `${this.base}/sessions/${encodeURIComponent(sessionId)}/export`,
    );
    if (!response.ok) {
      throw await this.toError(response);
    }
    return new Uint8Array(await response.arrayBuffer());
  }

  assetUrl(assetId: string, lod: 'full' | 'low'): string {
    return `${this.base}/assets/${encodeURIComponent(assetId)}/${lod}.obj`;
  }

  async fetchAssetObj(assetId: string, lod: 'full' | 'low'): Promise<string> {
    const response = await this.fetchFn(this.assetUrl(assetId, lod));
    if (!response.ok) {
      throw await this.toError(response);
    }
    return response.text();
  }
}
