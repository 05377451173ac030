/**
 * App shell: wires the typed client and pure renderers to the DOM. One run
 * request in flight at a time; sensitivity sweeps are cancellable; every
 * API error is surfaced with the server's code and message.
 */

import { ApiError, ThemisClient } from "./api.js";
import { renderDiff } from "./render/diff.js";
import { renderIndexChart, renderTripwireNote } from "./render/indexChart.js";
import { renderLineage } from "./render/lineage.js";
import { renderModel } from "./render/model.js";
import { renderNetwork, renderSensitivity } from "./render/network.js";
import {
  addRun,
  initialState,
  parentOfSelected,
  selectedRun,
  selectRun,
  validateEdits,
  ViewState,
} from "./state.js";
import { WhatIfEdit } from "./types.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:8742";

let state: ViewState = initialState();
let client = new ThemisClient(DEFAULT_BASE_URL);
let sweepController: AbortController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(err: unknown): void {
  const box = el<HTMLDivElement>("errors");
  if (err instanceof ApiError) {
    box.textContent = `${err.code}: ${err.message} (${err.path})`;
  } else {
    box.textContent = err instanceof Error ? err.message : String(err);
  }
  box.classList.remove("hidden");
}

function clearError(): void {
  el<HTMLDivElement>("errors").classList.add("hidden");
}

async function refreshRunViews(): Promise<void> {
  const run = selectedRun(state);
  el<HTMLDivElement>("lineage-pane").innerHTML = renderLineage(state);
  if (!run) return;
  const tripwire = Number(el<HTMLInputElement>("tripwire").value);
  const report = await client.report(run.run_id, tripwire);
  el<HTMLDivElement>("run-pane").innerHTML =
    renderIndexChart(run, report) + renderTripwireNote(report);
  const network = await client.network(run.run_id);
  el<HTMLDivElement>("network-pane").innerHTML = renderNetwork(network);
  const parent = parentOfSelected(state);
  el<HTMLDivElement>("diff-pane").innerHTML = parent
    ? renderDiff(parent, run)
    : `<p class="diff-empty">select a what-if child to compare</p>`;
}

async function loadModelFile(file: File): Promise<void> {
  const doc: unknown = JSON.parse(await file.text());
  const { model_id } = await client.uploadModel(doc);
  state = { ...state, activeModelId: model_id };
  const payload = await client.getModel(model_id);
  el<HTMLDivElement>("model-pane").innerHTML = renderModel(model_id, payload.model);
  el<HTMLButtonElement>("start-run").disabled = false;
}

async function startRun(): Promise<void> {
  const modelId = state.activeModelId;
  if (state.runPending || modelId === null) return;
  state = { ...state, runPending: true };
  el<HTMLButtonElement>("start-run").disabled = true;
  try {
    const run = await client.startRun(modelId, {
      seed: Number(el<HTMLInputElement>("seed").value),
      samples: Number(el<HTMLInputElement>("samples").value),
      tripwire: Number(el<HTMLInputElement>("tripwire").value),
    });
    state = addRun(state, run);
    await refreshRunViews();
  } finally {
    state = { ...state, runPending: false };
    el<HTMLButtonElement>("start-run").disabled = false;
  }
}

function bufferedEdit(): WhatIfEdit | null {
  const kind = el<HTMLSelectElement>("edit-kind").value;
  const value = el<HTMLInputElement>("edit-value").value;
  const target = el<HTMLInputElement>("edit-target").value;
  switch (kind) {
    case "set_theory":
      return { kind, theory: value };
    case "set_tripwire":
      return { kind, tripwire: Number(value) };
    case "remove_actor":
      return { kind, actor_id: target };
    case "override_trend":
      return { kind, parameter_id: target, intercept: Number(value) };
    case "add_actor":
      return { kind, actor: JSON.parse(value) as Record<string, unknown> };
    default:
      return null;
  }
}

async function submitWhatIf(): Promise<void> {
  const run = selectedRun(state);
  if (!run) return;
  const problems = validateEdits(state.editBuffer);
  if (problems.length > 0) {
    showError(new Error(problems.join("; ")));
    return;
  }
  const child = await client.whatIf(run.run_id, state.editBuffer);
  state = addRun({ ...state, editBuffer: [] }, child);
  el<HTMLUListElement>("edit-buffer").innerHTML = "";
  await refreshRunViews();
}

async function sweepRoot(root: string): Promise<void> {
  const run = selectedRun(state);
  if (!run) return;
  sweepController?.abort();
  sweepController = new AbortController();
  try {
    const payload = await client.sensitivity(run.run_id, root, sweepController.signal);
    el<HTMLDivElement>("sensitivity-pane").innerHTML = renderSensitivity(payload);
  } catch (err) {
    if (!(err instanceof DOMException && err.name === "AbortError")) throw err;
  }
}

function guard<E extends Event>(fn: (ev: E) => Promise<void>): (ev: E) => void {
  return (ev) => {
    clearError();
    fn(ev).catch(showError);
  };
}

export function boot(): void {
  el<HTMLInputElement>("base-url").value = DEFAULT_BASE_URL;
  el<HTMLInputElement>("base-url").addEventListener("change", (ev) => {
    client = new ThemisClient((ev.target as HTMLInputElement).value);
  });
  el<HTMLInputElement>("model-file").addEventListener("change", guard(async () => {
    const input = el<HTMLInputElement>("model-file");
    if (input.files?.[0]) await loadModelFile(input.files[0]);
  }));
  el<HTMLButtonElement>("start-run").addEventListener("click", guard(startRun));
  el<HTMLInputElement>("tripwire").addEventListener("change", guard(refreshRunViews));
  el<HTMLButtonElement>("add-edit").addEventListener("click", guard(async () => {
    const edit = bufferedEdit();
    if (edit) {
      state = { ...state, editBuffer: [...state.editBuffer, edit] };
      const item = document.createElement("li");
      item.textContent = JSON.stringify(edit);
      el<HTMLUListElement>("edit-buffer").appendChild(item);
    }
  }));
  el<HTMLButtonElement>("submit-whatif").addEventListener("click", guard(submitWhatIf));
  el<HTMLDivElement>("lineage-pane").addEventListener("click", guard(async (ev: MouseEvent) => {
    const runId = (ev.target as HTMLElement).closest<HTMLElement>("[data-run]")?.dataset.run;
    if (runId && state.runs.has(runId)) {
      state = selectRun(state, runId);
      await refreshRunViews();
    }
  }));
  el<HTMLDivElement>("network-pane").addEventListener("click", guard(async (ev: MouseEvent) => {
    const root = (ev.target as HTMLElement).closest<HTMLElement>("[data-root]")?.dataset.root;
    if (root) await sweepRoot(root);
  }));
  client.health().then(
    (h) => { el<HTMLSpanElement>("health").textContent = `server ${h.version}`; },
    () => { el<HTMLSpanElement>("health").textContent = "server unreachable"; },
  );
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
