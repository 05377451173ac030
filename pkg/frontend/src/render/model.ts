/** Model view: parameter roster grouped by domain, plus the actor list. */

import { ModelDocument } from "../types.js";

export function renderModel(modelId: string, doc: ModelDocument): string {
  const byDomain = new Map<string, typeof doc.parameters>();
  for (const param of doc.parameters) {
    const bucket = byDomain.get(param.domain) ?? [];
    bucket.push(param);
    byDomain.set(param.domain, bucket);
  }
  const groups = [...byDomain.entries()]
    .sort((a, b) => a[0].localeCompare(b[0]))
    .map(([domain, params]) => {
      const items = params
        .map(
          (p) =>
            `<li class="param" data-id="${p.id}">${p.display_name ?? p.id}${p.units ? ` <span class="units">(${p.units})</span>` : ""}</li>`,
        )
        .join("");
      return `<section class="domain"><h3>${domain}</h3><ul>${items}</ul></section>`;
    })
    .join("");
  const actors = doc.actors
    .map((a) => `<li class="actor">${a.id} <span class="actor-type">type ${a.actor_type}</span></li>`)
    .join("");
  return `<div class="model" data-model="${modelId}">
<h2>${doc.region_name}</h2>
<p class="meta">${doc.parameters.length} parameters · ${doc.actors.length} actors · horizon ${doc.horizon_years} years · theory ${doc.theory}</p>
${groups}
<section class="actors"><h3>Actors</h3><ul>${actors}</ul></section>
</div>`;
}
