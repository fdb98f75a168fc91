// Operator console wiring: session lifecycle, instruction submission,
// stepping, strategy switching, and event injection.

import { canSubmit, Client, GatewayError } from "./api";
import { drawState } from "./render";
import { buildViewModel } from "./view";
import type { StatePayload } from "./types";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const client = new Client();
let lastState: StatePayload | null = null;
let lastCellSize = 8;
let selectedCell: [number, number] | null = null;
let runTimer: number | null = null;

const banner = () => $<HTMLDivElement>("banner");

const showError = (err: unknown, retry?: () => void) => {
  const box = banner();
  box.innerHTML = "";
  const text = document.createElement("span");
  if (err instanceof GatewayError) {
    text.textContent = `${err.error.code}: ${err.error.message}`;
  } else {
    text.textContent = `network error: ${String(err)}`;
  }
  box.appendChild(text);
  if (retry && !(err instanceof GatewayError && err.status === 422)) {
    const btn = document.createElement("button");
    btn.textContent = "retry";
    btn.onclick = () => {
      clearError();
      retry();
    };
    box.appendChild(btn);
  }
  box.hidden = false;
};

const clearError = () => {
  const box = banner();
  box.hidden = true;
  box.innerHTML = "";
};

const renderMetrics = (state: StatePayload) => {
  const m = state.metrics;
  $("m-tick").textContent = String(state.tick);
  $("m-outcome").textContent = state.outcome ?? "-";
  $("m-nodes").textContent = m ? String(m.nodes_expanded) : "-";
  $("m-time").textContent = m ? m.search_time_s.toFixed(4) : "-";
  $("m-cost").textContent = m ? String(m.path_cost) : "-";
  $("m-length").textContent = m ? String(m.path_length) : "-";
  $("m-turns").textContent = m ? String(m.turns) : "-";
};

const redraw = (state: StatePayload) => {
  lastState = state;
  const vm = buildViewModel(state);
  lastCellSize = drawState($<HTMLCanvasElement>("grid"), vm);
  renderMetrics(state);
};

const refresh = async () => {
  if (!client.session) return;
  try {
    redraw(await client.state());
  } catch (err) {
    showError(err, refresh);
  }
};

const appendHistory = (text: string, detail: string) => {
  const item = document.createElement("li");
  const head = document.createElement("b");
  head.textContent = text;
  const body = document.createElement("pre");
  body.textContent = detail;
  item.appendChild(head);
  item.appendChild(body);
  $("history").prepend(item);
};

const newSession = async () => {
  clearError();
  const scenario = $<HTMLSelectElement>("scenario").value;
  const strategy = $<HTMLSelectElement>("strategy").value;
  try {
    await client.deleteSession().catch(() => undefined);
    await client.createSession(scenario, strategy);
    $("history").innerHTML = "";
    await refresh();
  } catch (err) {
    showError(err, newSession);
  }
};

const submitInstruction = async () => {
  const input = $<HTMLInputElement>("instruction");
  const text = input.value;
  if (!canSubmit(text, client.busy)) return;
  clearError();
  try {
    const doc = await client.submitInstruction(text);
    appendHistory(text, JSON.stringify(doc.actions, null, 1));
    redraw(doc.state);
    input.value = "";
    updateSubmitState();
  } catch (err) {
    showError(err, () => {
      input.value = text;
      void submitInstruction();
    });
  }
};

const doStep = async (ticks: number) => {
  if (!client.session || client.busy) return;
  clearError();
  try {
    const doc = await client.step(ticks);
    for (const replan of doc.replans) {
      appendHistory(`replan @${replan.tick} (${replan.reason})`, JSON.stringify(replan.actions));
    }
    redraw(doc.state);
  } catch (err) {
    showError(err, () => void doStep(ticks));
  }
};

const toggleRun = () => {
  const btn = $<HTMLButtonElement>("run");
  if (runTimer !== null) {
    window.clearInterval(runTimer);
    runTimer = null;
    btn.textContent = "run";
    return;
  }
  btn.textContent = "pause";
  runTimer = window.setInterval(() => {
    if (!client.busy) void doStep(1);
    if (lastState?.outcome && runTimer !== null) {
      window.clearInterval(runTimer);
      runTimer = null;
      btn.textContent = "run";
    }
  }, 150);
};

const injectObstacle = async () => {
  if (!selectedCell) return;
  const [x, y] = selectedCell;
  try {
    redraw(await client.injectEvent({ kind: "add_obstacle", rect: [x, y, x, y] }));
  } catch (err) {
    showError(err);
  }
};

let potholeCount = 0;
const injectPothole = async () => {
  if (!selectedCell) return;
  const [x, y] = selectedCell;
  potholeCount += 1;
  try {
    redraw(
      await client.injectEvent({
        kind: "add_landmark",
        name: `pothole_${potholeCount}`,
        landmark_kind: "repair",
        rect: [x, y, Math.min(x + 1, (lastState?.width ?? 1) - 1), Math.min(y + 1, (lastState?.height ?? 1) - 1)],
      })
    );
  } catch (err) {
    showError(err);
  }
};

const reroutePedestrian = async () => {
  if (!selectedCell || !lastState || lastState.pedestrians.length === 0) return;
  const ped = lastState.pedestrians[0];
  try {
    redraw(await client.injectEvent({ kind: "move_pedestrian", id: ped.id, waypoint: selectedCell }));
  } catch (err) {
    showError(err);
  }
};

const switchStrategy = async () => {
  if (!client.session) return;
  clearError();
  try {
    redraw(await client.switchStrategy($<HTMLSelectElement>("strategy").value));
  } catch (err) {
    showError(err);
  }
};

const updateSubmitState = () => {
  $<HTMLButtonElement>("submit").disabled = !canSubmit(
    $<HTMLInputElement>("instruction").value,
    client.busy
  );
};

const init = async () => {
  const scenarioSelect = $<HTMLSelectElement>("scenario");
  try {
    for (const name of await client.listScenarios()) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      scenarioSelect.appendChild(opt);
    }
    const datalist = $<HTMLDataListElement>("corpus");
    for (const text of await client.corpus()) {
      const opt = document.createElement("option");
      opt.value = text;
      datalist.appendChild(opt);
    }
  } catch (err) {
    showError(err, init);
  }

  $("new-session").onclick = () => void newSession();
  $("submit").onclick = () => void submitInstruction();
  $<HTMLInputElement>("instruction").oninput = updateSubmitState;
  $<HTMLInputElement>("instruction").onkeydown = (e) => {
    if (e.key === "Enter") void submitInstruction();
  };
  $("step1").onclick = () => void doStep(1);
  $("step10").onclick = () => void doStep(10);
  $("run").onclick = toggleRun;
  $("drop-obstacle").onclick = () => void injectObstacle();
  $("mark-pothole").onclick = () => void injectPothole();
  $("reroute-ped").onclick = () => void reroutePedestrian();
  $<HTMLSelectElement>("strategy").onchange = () => void switchStrategy();

  $<HTMLCanvasElement>("grid").onclick = (e) => {
    if (!lastState) return;
    const rect = (e.target as HTMLCanvasElement).getBoundingClientRect();
    const x = Math.floor((e.clientX - rect.left) / lastCellSize);
    const y = Math.floor((e.clientY - rect.top) / lastCellSize);
    if (x < lastState.width && y < lastState.height) {
      selectedCell = [x, y];
      $("selected").textContent = `(${x}, ${y})`;
    }
  };

  updateSubmitState();
};

void init();
