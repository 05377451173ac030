/**
 * BBN view: layered DAG with a marginal bar per node. Roots get a
 * data-root attribute so the app can attach sensitivity sliders.
 */

import { layeredLayout } from "../layout.js";
import { NetworkPayload, SensitivityPayload } from "../types.js";

const NODE_W = 120;
const NODE_H = 46;

export function renderNetwork(payload: NetworkPayload): string {
  const layout = layeredLayout(payload.network.nodes);
  const parents = new Map(
    payload.network.nodes.map((n) => [n.id, n.parents ?? []]),
  );
  const pos = new Map(layout.nodes.map((n) => [n.id, n]));

  const edges = layout.edges
    .map(({ from, to }) => {
      const a = pos.get(from)!;
      const b = pos.get(to)!;
      return `<line class="edge" x1="${a.x + NODE_W}" y1="${a.y + NODE_H / 2}" x2="${b.x}" y2="${b.y + NODE_H / 2}"/>`;
    })
    .join("\n  ");

  const nodes = layout.nodes
    .map((n) => {
      const marginal = payload.marginals[n.id];
      const isRoot = (parents.get(n.id) ?? []).length === 0;
      const barW = marginal === undefined ? 0 : marginal * (NODE_W - 12);
      const label = marginal === undefined ? "" : String(marginal);
      return `<g class="node${isRoot ? " root" : ""}" transform="translate(${n.x},${n.y})"${isRoot ? ` data-root="${n.id}"` : ""}>
    <rect class="box" width="${NODE_W}" height="${NODE_H}"/>
    <text class="label" x="6" y="16">${n.id}</text>
    <rect class="marginal-bar" x="6" y="24" width="${barW.toFixed(1)}" height="8"/>
    <text class="marginal" x="6" y="42" data-node="${n.id}" data-value="${label}">${label}</text>
  </g>`;
    })
    .join("\n  ");

  return `<svg class="network" viewBox="0 0 ${layout.width + NODE_W} ${layout.height + NODE_H}" data-run="${payload.run_id}">
  ${edges}
  ${nodes}
</svg>`;
}

/** Sensitivity sweep for one root: the server's (prior, p) pairs verbatim. */
export function renderSensitivity(payload: SensitivityPayload): string {
  const rows = payload.sweep
    .map(
      ([prior, p]) =>
        `<tr><td class="prior">${prior}</td><td class="p" data-value="${p}">${p}</td></tr>`,
    )
    .join("");
  return `<table class="sensitivity" data-root="${payload.root}">
<thead><tr><th>root prior</th><th>p(intervention)</th></tr></thead>
<tbody>${rows}</tbody>
</table>`;
}
