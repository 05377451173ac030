/**
 * What-if diff: parent vs child index series side by side. Differences are
 * child minus parent, rendered from the server's numbers without rounding
 * so a no-op edit shows an exact zero in every row.
 */

import { RunRecord } from "../types.js";

export function diffRows(
  parent: RunRecord,
  child: RunRecord,
): { year: number; parent: number; child: number; delta: number }[] {
  const parentByYear = new Map(
    parent.per_year.map((yr) => [yr.year, yr.p_intervention_mean]),
  );
  return child.per_year
    .filter((yr) => parentByYear.has(yr.year))
    .map((yr) => {
      const p = parentByYear.get(yr.year)!;
      return { year: yr.year, parent: p, child: yr.p_intervention_mean, delta: yr.p_intervention_mean - p };
    });
}

export function renderDiff(parent: RunRecord, child: RunRecord): string {
  const rows = diffRows(parent, child)
    .map(
      (r) =>
        `<tr${r.delta === 0 ? "" : ' class="changed"'}><td>${r.year}</td><td>${r.parent}</td><td>${r.child}</td><td class="delta" data-value="${r.delta}">${r.delta}</td></tr>`,
    )
    .join("");
  const allZero = diffRows(parent, child).every((r) => r.delta === 0);
  return `<div class="diff" data-parent="${parent.run_id}" data-child="${child.run_id}">
<p class="diff-summary">${allZero ? "no change from parent run" : "child diverges from parent"}</p>
<table>
<thead><tr><th>year</th><th>parent</th><th>child</th><th>delta</th></tr></thead>
<tbody>${rows}</tbody>
</table>
</div>`;
}
