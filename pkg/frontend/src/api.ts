import { MoveApplied, MovesPayload, SessionCreated, StateSummary } from './types';

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = 'http-error';
    let message = resp.statusText;
    try {
      const body = await resp.json();
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // body was not JSON; keep the status text
    }
    throw new ApiError(resp.status, code, message);
  }
  return resp.json() as Promise<T>;
}

/** Thin typed client; one instance per browser tab / session. */
export class ExplorerApi {
  constructor(private base: string = '') {}

  createSession(source: string, flags: Record<string, unknown> = {}): Promise<SessionCreated> {
    return fetch(`${this.base}/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ source, ...flags }),
    }).then(r => unwrap<SessionCreated>(r));
  }

  getState(id: string): Promise<{ id: string; state: StateSummary }> {
    return fetch(`${this.base}/sessions/${id}`).then(r => unwrap(r));
  }

  listMoves(id: string): Promise<MovesPayload> {
    return fetch(`${this.base}/sessions/${id}/moves`).then(r => unwrap(r));
  }

  applyMove(id: string, index: number, fingerprint: string): Promise<MoveApplied> {
    const q = new URLSearchParams({ fingerprint });
    return fetch(`${this.base}/sessions/${id}/moves/${index}?${q}`, { method: 'POST' })
      .then(r => unwrap(r));
  }

  getOrigin(id: string): Promise<{ id: string; origin: StateSummary }> {
    return fetch(`${this.base}/sessions/${id}/origin`).then(r => unwrap(r));
  }

  getTrace(id: string): Promise<string> {
    return fetch(`${this.base}/sessions/${id}/trace`).then(r => r.text());
  }
}
