// Canvas drawing. Zone colors follow the operator conventions: avoid
// zones pink, preferred space grey, planned path red.

import type { ViewModel } from "./view";
import { fitCellSize, labelsVisible } from "./view";

export const COLORS: Record<string, string> = {
  free: "#ffffff",
  occupied: "#2d3748",
  avoid: "#f7b6c9",
  prefer: "#d3d3d3",
  path: "#e53e3e",
  robot: "#2b6cb0",
  pedestrian: "#d69e2e",
  goal: "#38a169",
  gridline: "#edf2f7",
  label: "#4a5568",
};

export const drawState = (canvas: HTMLCanvasElement, vm: ViewModel): number => {
  const cell = fitCellSize(vm.width, vm.height, canvas.width, canvas.height);
  const ctx = canvas.getContext("2d");
  if (!ctx) return cell;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  for (let y = 0; y < vm.height; y++) {
    for (let x = 0; x < vm.width; x++) {
      ctx.fillStyle = COLORS[vm.cells[y * vm.width + x]];
      ctx.fillRect(x * cell, y * cell, cell, cell);
    }
  }
  if (cell >= 4) {
    ctx.strokeStyle = COLORS.gridline;
    ctx.lineWidth = 0.5;
    for (let x = 0; x <= vm.width; x++) {
      ctx.beginPath();
      ctx.moveTo(x * cell, 0);
      ctx.lineTo(x * cell, vm.height * cell);
      ctx.stroke();
    }
    for (let y = 0; y <= vm.height; y++) {
      ctx.beginPath();
      ctx.moveTo(0, y * cell);
      ctx.lineTo(vm.width * cell, y * cell);
      ctx.stroke();
    }
  }

  if (vm.path.length > 1) {
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = Math.max(1.5, cell / 3);
    ctx.beginPath();
    ctx.moveTo(vm.path[0][0] * cell + cell / 2, vm.path[0][1] * cell + cell / 2);
    for (const [x, y] of vm.path.slice(1)) {
      ctx.lineTo(x * cell + cell / 2, y * cell + cell / 2);
    }
    ctx.stroke();
  }

  if (vm.goal) {
    ctx.fillStyle = COLORS.goal;
    ctx.fillRect(vm.goal[0] * cell, vm.goal[1] * cell, cell, cell);
  }
  for (const ped of vm.pedestrians) {
    ctx.fillStyle = COLORS.pedestrian;
    ctx.beginPath();
    ctx.arc(ped.pos[0] * cell + cell / 2, ped.pos[1] * cell + cell / 2, cell / 2.4, 0, Math.PI * 2);
    ctx.fill();
  }
  ctx.fillStyle = COLORS.robot;
  ctx.beginPath();
  ctx.arc(vm.robot.x * cell + cell / 2, vm.robot.y * cell + cell / 2, cell / 2.1, 0, Math.PI * 2);
  ctx.fill();

  if (labelsVisible(cell)) {
    ctx.fillStyle = COLORS.label;
    ctx.font = `${Math.max(9, cell)}px sans-serif`;
    for (const label of vm.labels) {
      ctx.fillText(label.name, label.at[0] * cell, label.at[1] * cell);
    }
  }
  return cell;
};
