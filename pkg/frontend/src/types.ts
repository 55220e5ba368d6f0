// Payload shapes of the session service.  The client renders these
// verbatim and computes nothing on its own.

export interface StateSummary {
  seed: string;
  memory: string;
  process: string;
  display: string;
  initial: boolean;
  fingerprint: string;
}

export interface MoveSummary {
  index: number;
  direction: 'fwd' | 'bwd';
  ident: string;
  label: string;
  target: StateSummary;
}

export interface MovesPayload {
  fingerprint: string;
  moves: MoveSummary[];
  concurrency: (boolean | null)[][];
}

export interface SessionCreated {
  id: string;
  state: StateSummary;
}

export interface MoveApplied {
  id: string;
  applied: MoveSummary;
  state: StateSummary;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
