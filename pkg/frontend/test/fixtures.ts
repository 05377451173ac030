/** Mocked service payloads shared by the snapshot tests. */

import {
  NetworkPayload,
  ReportPayload,
  RunRecord,
  SensitivityPayload,
} from "../src/types.js";

export const runRecord: RunRecord = {
  run_id: "a1b2c3d4e5f60718",
  parent_run_id: null,
  model_fingerprint: "f".repeat(64),
  config: { seed: 42, samples: 2000, tripwire: 0.5 },
  theory: "trend_baseline",
  horizon_years: 4,
  key_variables: ["migration", "gdp", "potable_water"],
  sign_matrix: {
    variables: ["migration", "gdp", "potable_water"],
    entries: [
      ["self", "minus", "plus"],
      ["minus", "self", "plus"],
      ["minus", "plus", "self"],
    ],
  },
  attainments: { actor_a: 0.8125, actor_b: 1.0 },
  per_year: [
    {
      year: 2026,
      p_intervention_mean: 0.4812345678901234,
      p_intervention_ci: [0.47, 0.4925],
      samples_used: 2000,
      root_priors: { religious_dogmatism: 0.61, water_shortage: 0.55 },
      drivers: [["water_shortage", 0.21], ["religious_dogmatism", 0.14]],
    },
    {
      year: 2027,
      p_intervention_mean: 0.5301,
      p_intervention_ci: [0.5188, 0.5414],
      samples_used: 2000,
      root_priors: { religious_dogmatism: 0.63, water_shortage: 0.58 },
      drivers: [["water_shortage", 0.22], ["religious_dogmatism", 0.15]],
    },
    {
      year: 2028,
      p_intervention_mean: 0.5744,
      p_intervention_ci: [0.5629, 0.5859],
      samples_used: 2000,
      root_priors: { religious_dogmatism: 0.64, water_shortage: 0.62 },
      drivers: [["water_shortage", 0.24], ["religious_dogmatism", 0.15]],
    },
    {
      year: 2029,
      p_intervention_mean: 0.6199997165263352,
      p_intervention_ci: [0.6083, 0.6317],
      samples_used: 2000,
      root_priors: { religious_dogmatism: 0.66, water_shortage: 0.65 },
      drivers: [["water_shortage", 0.26], ["religious_dogmatism", 0.16]],
    },
  ],
};

export const report: ReportPayload = {
  run_id: runRecord.run_id,
  years: [2026, 2027, 2028, 2029],
  index_series: [
    0.4812345678901234, 0.5301, 0.5744, 0.6199997165263352,
  ],
  tripwire_threshold: 0.5,
  tripwire_years: [2027, 2028, 2029],
  top_drivers: {
    "2027": [["water_shortage", 0.22], ["religious_dogmatism", 0.15]],
    "2028": [["water_shortage", 0.24], ["religious_dogmatism", 0.15]],
    "2029": [["water_shortage", 0.26], ["religious_dogmatism", 0.16]],
  },
};

export const network: NetworkPayload = {
  run_id: runRecord.run_id,
  network: {
    nodes: [
      { id: "religious_dogmatism", states: ["true", "false"], parents: [] },
      { id: "water_shortage", states: ["true", "false"], parents: [] },
      { id: "migration_surge", states: ["true", "false"], parents: ["water_shortage"] },
      { id: "gdp_below_threshold", states: ["true", "false"], parents: ["religious_dogmatism", "migration_surge"] },
      { id: "civil_unrest", states: ["true", "false"], parents: ["gdp_below_threshold"] },
      { id: "intervention", states: ["true", "false"], parents: ["civil_unrest"] },
    ],
    intervention_node: "intervention",
  },
  marginals: {
    religious_dogmatism: 0.66,
    water_shortage: 0.65,
    migration_surge: 0.5875,
    gdp_below_threshold: 0.7431,
    civil_unrest: 0.6624,
    intervention: 0.6199997165263352,
  },
};

export const sensitivity: SensitivityPayload = {
  run_id: runRecord.run_id,
  root: "religious_dogmatism",
  sweep: [
    [0.46, 0.5922],
    [0.56, 0.6061],
    [0.66, 0.6199997165263352],
    [0.76, 0.6339],
    [0.86, 0.6478],
  ],
};

/** Child with identical numbers, as an empty what-if edit list produces. */
export const childRunNoop: RunRecord = {
  ...runRecord,
  run_id: "0918273645abcdef",
  parent_run_id: runRecord.run_id,
};

/** Child diverging from 2028 on, as a trend override produces. */
export const childRunChanged: RunRecord = {
  ...runRecord,
  run_id: "00ff00ff00ff00ff",
  parent_run_id: runRecord.run_id,
  per_year: runRecord.per_year.map((yr) =>
    yr.year >= 2028
      ? { ...yr, p_intervention_mean: yr.p_intervention_mean + 0.1001 }
      : yr,
  ),
};
