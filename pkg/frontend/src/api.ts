/** Thin client for the session HTTP + SSE API. */

import { SessionView, WireGestureEvent } from './types.js';

export interface EngineEvent {
  type: 'op_completed' | 'op_failed' | 'fern_grown';
  data: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

async function expectJson(resp: Response): Promise<any> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      detail = body.detail ?? body.error ?? detail;
    } catch {
      // non-JSON error body
    }
    throw new ApiError(detail, resp.status);
  }
  return resp.json();
}

export class TexterialClient {
  constructor(
    private baseUrl = '',
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  async createSession(writingContext?: string): Promise<SessionView> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ writing_context: writingContext ?? null }),
    });
    return expectJson(resp);
  }

  async getSession(id: string): Promise<SessionView> {
    return expectJson(await this.fetchFn(`${this.baseUrl}/sessions/${id}`));
  }

  async postGesture(id: string, event: WireGestureEvent): Promise<{ operation_id: string | null; status: string }> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions/${id}/gestures`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(event),
    });
    return expectJson(resp);
  }

  async undo(id: string): Promise<{ sequence: number; hash: string }> {
    return expectJson(await this.fetchFn(`${this.baseUrl}/sessions/${id}/undo`, { method: 'POST' }));
  }

  async redo(id: string): Promise<{ sequence: number; hash: string }> {
    return expectJson(await this.fetchFn(`${this.baseUrl}/sessions/${id}/redo`, { method: 'POST' }));
  }

  /** Subscribe to the session event stream; returns an unsubscribe. */
  events(id: string, onEvent: (e: EngineEvent) => void): () => void {
    const source = new EventSource(`${this.baseUrl}/sessions/${id}/events`);
    const types: EngineEvent['type'][] = ['op_completed', 'op_failed', 'fern_grown'];
    for (const type of types) {
      source.addEventListener(type, (raw) => {
        onEvent({ type, data: JSON.parse((raw as MessageEvent).data) });
      });
    }
    return () => source.close();
  }
}
