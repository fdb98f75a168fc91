// Typed client for the gateway. Every displayed value comes back through
// here untouched: the console never recomputes paths or metrics.

import type { ApiError, InstructionResponse, StatePayload, StepResponse } from "./types";

export interface TransportResult {
  status: number;
  json: unknown;
}

export type Transport = (
  method: string,
  path: string,
  body?: unknown
) => Promise<TransportResult>;

export class GatewayError extends Error {
  constructor(public readonly status: number, public readonly error: ApiError) {
    super(error.message);
  }
}

export const fetchTransport: Transport = async (method, path, body) => {
  const resp = await fetch(path, {
    method,
    headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
    body: body !== undefined ? JSON.stringify(body) : undefined,
  });
  return { status: resp.status, json: await resp.json() };
};

const unwrap = <T>(result: TransportResult): T => {
  if (result.status >= 400) {
    const doc = result.json as { error?: ApiError };
    throw new GatewayError(result.status, doc.error ?? { code: "http", message: `HTTP ${result.status}` });
  }
  return result.json as T;
};

export class Client {
  private sessionId: string | null = null;
  private inFlight = false;

  constructor(private readonly transport: Transport = fetchTransport) {}

  get session(): string | null {
    return this.sessionId;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  // Mutations are serialized client-side: one in-flight request per session.
  private async mutate<T>(fn: () => Promise<TransportResult>): Promise<T> {
    if (this.inFlight) {
      throw new GatewayError(0, { code: "busy", message: "a request is already in flight" });
    }
    this.inFlight = true;
    try {
      return unwrap<T>(await fn());
    } finally {
      this.inFlight = false;
    }
  }

  async listScenarios(): Promise<string[]> {
    const doc = unwrap<{ scenarios: string[] }>(await this.transport("GET", "/scenarios"));
    return doc.scenarios;
  }

  async corpus(): Promise<string[]> {
    const doc = unwrap<{ instructions: string[] }>(await this.transport("GET", "/corpus"));
    return doc.instructions;
  }

  async createSession(scenario: string, strategy: string): Promise<string> {
    const doc = await this.mutate<{ session_id: string }>(() =>
      this.transport("POST", "/sessions", { scenario_name: scenario, strategy })
    );
    this.sessionId = doc.session_id;
    return doc.session_id;
  }

  private need(): string {
    if (!this.sessionId) throw new GatewayError(0, { code: "no_session", message: "no active session" });
    return this.sessionId;
  }

  async state(): Promise<StatePayload> {
    return unwrap<StatePayload>(await this.transport("GET", `/sessions/${this.need()}/state`));
  }

  async submitInstruction(text: string): Promise<InstructionResponse> {
    const id = this.need();
    return this.mutate<InstructionResponse>(() =>
      this.transport("POST", `/sessions/${id}/instruction`, { text })
    );
  }

  async step(ticks: number): Promise<StepResponse> {
    const id = this.need();
    return this.mutate<StepResponse>(() =>
      this.transport("POST", `/sessions/${id}/step`, { ticks })
    );
  }

  async injectEvent(event: Record<string, unknown>): Promise<StatePayload> {
    const id = this.need();
    const doc = await this.mutate<{ ok: boolean; state: StatePayload }>(() =>
      this.transport("POST", `/sessions/${id}/event`, event)
    );
    return doc.state;
  }

  async switchStrategy(name: string): Promise<StatePayload> {
    const id = this.need();
    const doc = await this.mutate<{ ok: boolean; state: StatePayload }>(() =>
      this.transport("POST", `/sessions/${id}/strategy`, { name })
    );
    return doc.state;
  }

  async deleteSession(): Promise<void> {
    if (!this.sessionId) return;
    const id = this.sessionId;
    this.sessionId = null;
    await this.mutate(() => this.transport("DELETE", `/sessions/${id}`));
  }
}

export const canSubmit = (text: string, busy: boolean): boolean =>
  text.trim().length > 0 && !busy;
