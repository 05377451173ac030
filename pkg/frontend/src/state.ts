/**
 * Session view state: the active model, an append-only lineage tree of runs
 * (parent -> what-if children) and the current selection.
 */

import { RunRecord, WhatIfEdit } from "./types.js";

export interface LineageNode {
  runId: string;
  parentRunId: string | null;
  children: string[];
}

export interface ViewState {
  activeModelId: string | null;
  runs: Map<string, RunRecord>;
  lineage: Map<string, LineageNode>;
  rootRunIds: string[];
  selectedRunId: string | null;
  selectedYear: number | null;
  editBuffer: WhatIfEdit[];
  runPending: boolean;
}

export function initialState(): ViewState {
  return {
    activeModelId: null,
    runs: new Map(),
    lineage: new Map(),
    rootRunIds: [],
    selectedRunId: null,
    selectedYear: null,
    editBuffer: [],
    runPending: false,
  };
}

/** Record a finished run and select it. Lineage is append-only. */
export function addRun(state: ViewState, run: RunRecord): ViewState {
  if (state.runs.has(run.run_id)) {
    return { ...state, selectedRunId: run.run_id };
  }
  const runs = new Map(state.runs);
  runs.set(run.run_id, run);
  const lineage = new Map(state.lineage);
  lineage.set(run.run_id, {
    runId: run.run_id,
    parentRunId: run.parent_run_id,
    children: [],
  });
  const rootRunIds = [...state.rootRunIds];
  if (run.parent_run_id !== null && lineage.has(run.parent_run_id)) {
    const parent = lineage.get(run.parent_run_id)!;
    lineage.set(run.parent_run_id, {
      ...parent,
      children: [...parent.children, run.run_id],
    });
  } else {
    rootRunIds.push(run.run_id);
  }
  return { ...state, runs, lineage, rootRunIds, selectedRunId: run.run_id };
}

export function selectRun(state: ViewState, runId: string): ViewState {
  if (!state.runs.has(runId)) {
    throw new Error(`unknown run ${runId}`);
  }
  return { ...state, selectedRunId: runId, selectedYear: null };
}

export function selectedRun(state: ViewState): RunRecord | null {
  return state.selectedRunId === null
    ? null
    : state.runs.get(state.selectedRunId) ?? null;
}

export function parentOfSelected(state: ViewState): RunRecord | null {
  const run = selectedRun(state);
  if (run === null || run.parent_run_id === null) return null;
  return state.runs.get(run.parent_run_id) ?? null;
}

/**
 * Client-side validation of the edit buffer before submission; mirrors the
 * server's checks so obviously broken edits never leave the browser.
 */
export function validateEdits(edits: WhatIfEdit[]): string[] {
  const problems: string[] = [];
  edits.forEach((edit, i) => {
    switch (edit.kind) {
      case "add_actor":
        if (typeof edit.actor !== "object" || edit.actor === null || !("id" in edit.actor)) {
          problems.push(`edits[${i}]: actor document needs an id`);
        }
        break;
      case "remove_actor":
        if (!edit.actor_id) problems.push(`edits[${i}]: actor_id required`);
        break;
      case "override_trend":
        if (!edit.parameter_id) problems.push(`edits[${i}]: parameter_id required`);
        if (edit.slope === undefined && edit.intercept === undefined && edit.residual_std === undefined) {
          problems.push(`edits[${i}]: nothing to override`);
        }
        break;
      case "set_theory":
        if (!edit.theory) problems.push(`edits[${i}]: theory required`);
        break;
      case "override_root_mapping":
        if (!edit.node_id) problems.push(`edits[${i}]: node_id required`);
        break;
      case "set_tripwire":
        if (!(edit.tripwire >= 0 && edit.tripwire <= 1)) {
          problems.push(`edits[${i}]: tripwire must be in [0, 1]`);
        }
        break;
      default:
        problems.push(`edits[${i}]: unknown kind`);
    }
  });
  return problems;
}
