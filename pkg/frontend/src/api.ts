/**
 * Typed client for the repository's JSON API.
 *
 * The client is the only way the UI talks to the backend; no classification
 * logic lives in the browser. Every method maps onto one documented
 * endpoint and raises ApiError with the server's error code on failure.
 */

export interface LegalBasis {
  instrument: string;
  provision: string;
  note: string;
}

export interface Consequences {
  identification_and_authentication: string;
  read_and_download_permissions: string;
  storage_and_transmission: string;
  key_storage: string;
}

export interface SessionQuestion {
  id: string;
  prompt: string;
  help: string;
}

export interface TrailEntry {
  question_id: string;
  prompt: string;
  answer: 'yes' | 'no';
}

export interface TerminalResult {
  tag: string;
  label: string;
  strictness: number | null;
  requires_depositor_review: boolean;
  description: string;
  legal_bases: LegalBasis[];
  note: string;
  consequences: Consequences | null;
}

export interface SessionState {
  session_id: string;
  tree_version: string;
  terminal: boolean;
  question: SessionQuestion | null;
  trail: TrailEntry[];
  result: TerminalResult | null;
}

export interface DatasetSummary {
  id: string;
  tag: string;
  metadata: Record<string, unknown>;
}

export interface PendingRequest {
  id: string;
  dataset_id: string;
  requester: string;
  justification: string;
  state: string;
  criterion_hint: string | null;
  dataset: DatasetSummary;
}

export interface DecisionBody {
  decision: 'approve' | 'deny';
  note?: string;
  ip_ranges?: string[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class DataTagsClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init: RequestInit = {}, token?: string): Promise<T> {
    const headers: Record<string, string> = {
      'Content-Type': 'application/json',
      ...((init.headers as Record<string, string>) ?? {}),
    };
    if (token) {
      headers['Authorization'] = `Bearer ${token}`;
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    const text = await response.text();
    const body = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof body.error === 'string' ? body.error : 'error',
        typeof body.detail === 'string' ? body.detail : response.statusText,
      );
    }
    return body as T;
  }

  // -- interview sessions ---------------------------------------------------

  createSession(): Promise<SessionState> {
    return this.request('/sessions', { method: 'POST' });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}`);
  }

  answer(sessionId: string, answer: 'yes' | 'no'): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/answers`, {
      method: 'POST',
      body: JSON.stringify({ answer }),
    });
  }

  undo(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/undo`, { method: 'POST' });
  }

  // -- accounts ---------------------------------------------------------------

  registerUser(
    username: string,
    password: string,
    role = 'reader',
  ): Promise<{ id: string; otp_secret: string }> {
    return this.request('/users', {
      method: 'POST',
      body: JSON.stringify({ username, password, role }),
    });
  }

  login(username: string, password: string): Promise<{ token: string; factors_satisfied: number }> {
    return this.request('/auth', {
      method: 'POST',
      body: JSON.stringify({ username, password }),
    });
  }

  satisfyFactor(token: string, proof: string): Promise<{ token: string; factors_satisfied: number }> {
    return this.request('/auth/factor', {
      method: 'POST',
      body: JSON.stringify({ factor: 'otp', proof }),
    }, token);
  }

  // -- datasets and approvals ---------------------------------------------------

  metadata(datasetId: string): Promise<Record<string, unknown>> {
    return this.request(`/datasets/${datasetId}`);
  }

  deposit(token: string, body: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.request('/datasets', { method: 'POST', body: JSON.stringify(body) }, token);
  }

  requestAccess(token: string, datasetId: string, justification: string): Promise<{ id: string }> {
    return this.request(`/datasets/${datasetId}/requests`, {
      method: 'POST',
      body: JSON.stringify({ justification }),
    }, token);
  }

  pendingRequests(token: string): Promise<{ requests: PendingRequest[] }> {
    return this.request('/requests', {}, token);
  }

  decideRequest(token: string, requestId: string, body: DecisionBody): Promise<{ state: string }> {
    return this.request(`/requests/${requestId}/decision`, {
      method: 'POST',
      body: JSON.stringify(body),
    }, token);
  }
}
