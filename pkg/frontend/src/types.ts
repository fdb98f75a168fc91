// Wire types for the gateway JSON API.

export type Rle = [number | "BLOCKED", number][];

export interface PosePayload {
  x: number;
  y: number;
  theta: string;
}

export interface LandmarkPayload {
  name: string;
  kind: string;
  cells: [number, number][];
  access?: [number, number];
}

export interface MetricsPayload {
  nodes_expanded: number;
  search_time_s: number;
  path_cost: number;
  path_length: number;
  turns: number;
}

export interface StatePayload {
  tick: number;
  pose: PosePayload;
  width: number;
  height: number;
  occupancy: Rle;
  cost_layer: Rle;
  goal: [number, number] | null;
  landmarks: LandmarkPayload[];
  pedestrians: { id: string; pos: [number, number] }[];
  current_path: [number, number][] | null;
  metrics: MetricsPayload | null;
  instruction: string | null;
  outcome: string | null;
}

export interface ActionPayload {
  action: string;
  region?: string | { rect: [number, number, number, number] };
  value?: number | "BLOCKED";
  mode?: string;
  target?: string | [number, number];
}

export interface InstructionResponse {
  actions: ActionPayload[];
  pedestrian_buffer: boolean;
  plan: MetricsPayload & { path: [number, number][] };
  diagnostics: unknown[];
  state: StatePayload;
}

export interface StepResponse {
  state: StatePayload;
  replans: { tick: number; reason: string; actions: ActionPayload[] }[];
}

export interface ApiError {
  code: string;
  message: string;
  detail?: Record<string, unknown>;
}
