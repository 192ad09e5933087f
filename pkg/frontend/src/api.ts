// Typed client for the guidance service. The UI never evaluates supervisor
// rules itself: every view is rebuilt from what these calls return.

export interface EnabledEvents {
  controllable: string[];
  uncontrollable: string[];
}

export interface SessionView {
  id: string;
  state: string;
  enabled: EnabledEvents;
  history: string[];
  done_tasks: string[];
  completed: boolean;
  created: string;
  updated: string;
}

export interface Outlook {
  remaining_sequence_count: number | null;
  language_infinite: boolean;
  bounded_sequence_count: number;
  bound_used: number;
  sample_completions: string[][];
}

export interface ModelInfo {
  name: string;
  states: number;
  transitions: number;
  events: { name: string; controllable: boolean }[];
  initial: string;
  marked: string[];
  tasks: { name: string; kind: string }[];
  dot: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (typeof body?.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class GuidanceClient {
  constructor(readonly baseUrl: string) {}

  createSession(): Promise<SessionView> {
    return request(`${this.baseUrl}/sessions`, { method: "POST" });
  }

  getSession(id: string): Promise<SessionView> {
    return request(`${this.baseUrl}/sessions/${id}`);
  }

  step(id: string, event: string): Promise<SessionView> {
    return request(`${this.baseUrl}/sessions/${id}/step`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ event }),
    });
  }

  undo(id: string): Promise<SessionView> {
    return request(`${this.baseUrl}/sessions/${id}/undo`, { method: "POST" });
  }

  outlook(id: string, maxLen: number, after?: string): Promise<Outlook> {
    const params = new URLSearchParams({ max_len: String(maxLen) });
    if (after !== undefined) params.set("after", after);
    return request(`${this.baseUrl}/sessions/${id}/outlook?${params}`);
  }

  model(highlight?: string): Promise<ModelInfo> {
    const suffix = highlight ? `?highlight=${encodeURIComponent(highlight)}` : "";
    return request(`${this.baseUrl}/model${suffix}`);
  }
}
