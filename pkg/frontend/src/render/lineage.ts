/** Run lineage tree: roots at top level, what-if children nested. */

import { ViewState } from "../state.js";

function renderSubtree(state: ViewState, runId: string): string {
  const node = state.lineage.get(runId);
  if (!node) return "";
  const run = state.runs.get(runId);
  const selected = state.selectedRunId === runId;
  const label = run
    ? `${runId.slice(0, 8)} · seed ${run.config.seed}`
    : runId.slice(0, 8);
  const children = node.children
    .map((child) => renderSubtree(state, child))
    .join("");
  return `<li class="lineage-node${selected ? " selected" : ""}" data-run="${runId}">
<button class="select-run" data-run="${runId}">${label}</button>
${children ? `<ul>${children}</ul>` : ""}
</li>`;
}

export function renderLineage(state: ViewState): string {
  if (state.rootRunIds.length === 0) {
    return `<p class="lineage-empty">no runs yet</p>`;
  }
  const roots = state.rootRunIds.map((id) => renderSubtree(state, id)).join("");
  return `<ul class="lineage">${roots}</ul>`;
}
