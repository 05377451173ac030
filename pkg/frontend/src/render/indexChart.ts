/**
 * Intervention-index timeline: index line, 90% CI band and the tripwire
 * band. Pure SVG string from a run record plus its report payload; every
 * displayed number is the server's value verbatim.
 */

import { ReportPayload, RunRecord } from "../types.js";

const W = 720;
const H = 260;
const PAD = 42;

function sx(i: number, n: number): number {
  return PAD + (i * (W - 2 * PAD)) / Math.max(1, n - 1);
}

function sy(p: number): number {
  return H - PAD - p * (H - 2 * PAD);
}

export function renderIndexChart(run: RunRecord, report: ReportPayload): string {
  const n = report.years.length;
  const line = report.index_series
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(i, n).toFixed(1)},${sy(p).toFixed(1)}`)
    .join(" ");
  const band = [
    ...run.per_year.map((yr, i) => `${i === 0 ? "M" : "L"}${sx(i, n).toFixed(1)},${sy(yr.p_intervention_ci[1]).toFixed(1)}`),
    ...[...run.per_year].reverse().map((yr, j) => {
      const i = n - 1 - j;
      return `L${sx(i, n).toFixed(1)},${sy(yr.p_intervention_ci[0]).toFixed(1)}`;
    }),
    "Z",
  ].join(" ");
  const tripY = sy(report.tripwire_threshold).toFixed(1);
  const marks = report.years
    .map((year, i) =>
      report.tripwire_years.includes(year)
        ? `<circle class="tripped" cx="${sx(i, n).toFixed(1)}" cy="${sy(report.index_series[i]!).toFixed(1)}" r="4" data-year="${year}"/>`
        : "",
    )
    .join("");
  const finalIndex = report.index_series[n - 1];
  const finalYear = report.years[n - 1];
  const ticks = [0, 0.25, 0.5, 0.75, 1]
    .map((p) => `<text class="tick" x="${PAD - 8}" y="${sy(p).toFixed(1)}">${p}</text>`)
    .join("");
  return `<svg class="index-chart" viewBox="0 0 ${W} ${H}" data-run="${report.run_id}">
  <rect class="plot" x="${PAD}" y="${PAD}" width="${W - 2 * PAD}" height="${H - 2 * PAD}"/>
  ${ticks}
  <path class="ci-band" d="${band}"/>
  <line class="tripwire" x1="${PAD}" y1="${tripY}" x2="${W - PAD}" y2="${tripY}" data-threshold="${report.tripwire_threshold}"/>
  <path class="index-line" d="${line}"/>
  ${marks}
  <text class="axis" x="${PAD}" y="${H - 10}">${report.years[0]}</text>
  <text class="axis" x="${W - PAD}" y="${H - 10}" text-anchor="end">${finalYear}</text>
  <text class="final-index" x="${W - PAD}" y="${PAD - 12}" text-anchor="end" data-value="${finalIndex}">final-year index ${finalIndex}</text>
</svg>`;
}

/** Tripwire summary line under the chart. */
export function renderTripwireNote(report: ReportPayload): string {
  if (report.tripwire_years.length === 0) {
    return `<p class="tripwire-note">tripwire ${report.tripwire_threshold} never crossed</p>`;
  }
  const first = report.tripwire_years[0];
  const drivers = report.top_drivers[String(first)] ?? [];
  const top = drivers
    .slice(0, 3)
    .map(([root, delta]) => `${root} (${delta})`)
    .join(", ");
  return `<p class="tripwire-note">tripwire ${report.tripwire_threshold} first crossed in ${first}${top ? ` — drivers: ${top}` : ""}</p>`;
}
