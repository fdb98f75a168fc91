import { describe, expect, it } from "vitest";
import { canSubmit, Client, GatewayError, type Transport, type TransportResult } from "../src/api";
import { buildViewModel } from "../src/view";
import type { StatePayload } from "../src/types";

const emptyState: StatePayload = {
  tick: 0,
  pose: { x: 0, y: 0, theta: "E" },
  width: 2,
  height: 1,
  occupancy: [[0, 2]],
  cost_layer: [[0, 2]],
  goal: null,
  landmarks: [],
  pedestrians: [],
  current_path: null,
  metrics: null,
  instruction: null,
  outcome: null,
};

interface Call {
  method: string;
  path: string;
  body?: unknown;
}

const mockTransport = (
  replies: Record<string, TransportResult | ((body: unknown) => TransportResult)>
): { transport: Transport; calls: Call[] } => {
  const calls: Call[] = [];
  const transport: Transport = async (method, path, body) => {
    calls.push({ method, path, body });
    const reply = replies[`${method} ${path}`];
    if (!reply) throw new Error(`unexpected ${method} ${path}`);
    return typeof reply === "function" ? reply(body) : reply;
  };
  return { transport, calls };
};

describe("zero client authority", () => {
  it("every displayed value traces byte-for-byte to the server response", async () => {
    const serverPath: [number, number][] = [[0, 0], [1, 0]];
    const serverMetrics = {
      nodes_expanded: 42,
      search_time_s: 0.002,
      path_cost: 1,
      path_length: 1,
      turns: 0,
    };
    const instructionReply = {
      actions: [{ action: "SET_GOAL", target: [1, 0] }],
      pedestrian_buffer: false,
      plan: { ...serverMetrics, path: serverPath },
      diagnostics: [],
      state: { ...emptyState, goal: [1, 0] as [number, number], current_path: serverPath, metrics: serverMetrics },
    };
    const { transport } = mockTransport({
      "POST /sessions": { status: 200, json: { session_id: "abc" } },
      "POST /sessions/abc/instruction": { status: 200, json: instructionReply },
    });
    const client = new Client(transport);
    await client.createSession("warehouse.scn", "Balance");
    const doc = await client.submitInstruction("go to the dock");

    // the response object is handed through untouched
    expect(doc).toBe(instructionReply as never);
    const vm = buildViewModel(doc.state);
    expect(JSON.stringify(vm.path)).toBe(JSON.stringify(serverPath));
    expect(vm.metrics).toBe(serverMetrics);
  });
});

describe("mutation serialization", () => {
  it("allows at most one in-flight mutation per session", async () => {
    let release: (value: TransportResult) => void = () => undefined;
    const pending = new Promise<TransportResult>((resolve) => (release = resolve));
    const { transport } = mockTransport({
      "POST /sessions": { status: 200, json: { session_id: "abc" } },
      "POST /sessions/abc/step": () => ({ status: 200, json: { state: emptyState, replans: [] } }),
    });
    const slow: Transport = async (method, path, body) => {
      if (path.endsWith("/step")) return pending;
      return transport(method, path, body);
    };
    const client = new Client(slow);
    await client.createSession("warehouse.scn", "Balance");
    const first = client.step(1);
    await expect(client.step(1)).rejects.toMatchObject({ error: { code: "busy" } });
    release({ status: 200, json: { state: emptyState, replans: [] } });
    await first;
    expect(client.busy).toBe(false);
  });
});

describe("error handling", () => {
  it("surfaces structured 422 diagnostics", async () => {
    const { transport } = mockTransport({
      "POST /sessions": { status: 200, json: { session_id: "abc" } },
      "POST /sessions/abc/instruction": {
        status: 422,
        json: { error: { code: "unknown_landmark", message: "no landmark matches 'nowhere'" } },
      },
    });
    const client = new Client(transport);
    await client.createSession("warehouse.scn", "Balance");
    try {
      await client.submitInstruction("go to nowhere");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(GatewayError);
      expect((err as GatewayError).error.code).toBe("unknown_landmark");
    }
    // the failure releases the lock so the session stays usable
    expect(client.busy).toBe(false);
  });

  it("propagates transport failures without corrupting the lock", async () => {
    const failing: Transport = async () => {
      throw new Error("connection refused");
    };
    const client = new Client(failing);
    await expect(client.createSession("warehouse.scn", "Balance")).rejects.toThrow(
      "connection refused"
    );
    expect(client.busy).toBe(false);
    expect(client.session).toBeNull();
  });
});

describe("canSubmit", () => {
  it("disables empty input", () => {
    expect(canSubmit("", false)).toBe(false);
    expect(canSubmit("   ", false)).toBe(false);
  });
  it("disables while busy", () => {
    expect(canSubmit("go", true)).toBe(false);
  });
  it("enables otherwise", () => {
    expect(canSubmit("go to Shelf 3", false)).toBe(true);
  });
});
