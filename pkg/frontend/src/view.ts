// Pure view-model derivation from the last server state. Nothing here
// plans or scores anything; it only reshapes payload data for the canvas.

import type { Rle, StatePayload } from "./types";

export type CellClass = "free" | "occupied" | "avoid" | "prefer";

export interface ViewModel {
  width: number;
  height: number;
  cells: CellClass[]; // row-major base layer
  path: [number, number][];
  robot: { x: number; y: number; theta: string };
  goal: [number, number] | null;
  pedestrians: { id: string; pos: [number, number] }[];
  labels: { name: string; at: [number, number] }[];
  metrics: StatePayload["metrics"];
  tick: number;
  outcome: string | null;
  instruction: string | null;
}

export const decodeRle = (pairs: Rle): (number | "BLOCKED")[] => {
  const out: (number | "BLOCKED")[] = [];
  for (const [value, run] of pairs) {
    for (let i = 0; i < run; i++) out.push(value);
  }
  return out;
};

// Soft avoid costs at or above this render as avoid cells too (the
// quick profile writes 10.0 rather than blocking).
const SOFT_AVOID_THRESHOLD = 5;

export const classifyCell = (occupied: number, cost: number | "BLOCKED"): CellClass => {
  if (occupied === 1) return "occupied";
  if (cost === "BLOCKED" || cost >= SOFT_AVOID_THRESHOLD) return "avoid";
  if (typeof cost === "number" && cost < 0) return "prefer";
  return "free";
};

export const buildViewModel = (state: StatePayload): ViewModel => {
  const occupancy = decodeRle(state.occupancy);
  const costs = decodeRle(state.cost_layer);
  const cells: CellClass[] = new Array(state.width * state.height);
  for (let i = 0; i < cells.length; i++) {
    cells[i] = classifyCell(occupancy[i] as number, costs[i]);
  }
  const labels = state.landmarks.map((lm) => {
    let sx = 0;
    let sy = 0;
    for (const [x, y] of lm.cells) {
      sx += x;
      sy += y;
    }
    const n = Math.max(1, lm.cells.length);
    return { name: lm.name, at: [sx / n, sy / n] as [number, number] };
  });
  return {
    width: state.width,
    height: state.height,
    cells,
    path: state.current_path ?? [],
    robot: { x: state.pose.x, y: state.pose.y, theta: state.pose.theta },
    goal: state.goal,
    pedestrians: state.pedestrians,
    labels,
    metrics: state.metrics,
    tick: state.tick,
    outcome: state.outcome,
    instruction: state.instruction,
  };
};

// Cell size that fits the canvas, clamped so 10x-scale maps stay drawable.
export const fitCellSize = (
  width: number,
  height: number,
  maxW: number,
  maxH: number
): number => Math.max(1, Math.floor(Math.min(maxW / width, maxH / height)));

// Landmark labels elide once cells get too small to carry text.
export const labelsVisible = (cellSize: number): boolean => cellSize >= 6;
