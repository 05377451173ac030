/**
 * Wire types for the themis HTTP API, validated with zod so a drifting
 * server fails loudly at the boundary instead of deep inside a view.
 */

import { z } from "zod";

export const ErrorEnvelope = z.object({
  code: z.string(),
  message: z.string(),
  path: z.string(),
});
export type ErrorEnvelope = z.infer<typeof ErrorEnvelope>;

export const HealthPayload = z.object({
  status: z.string(),
  version: z.string(),
});

export const ModelSummary = z.object({
  model_id: z.string(),
  region_name: z.string(),
  parameters: z.number().int(),
  actors: z.number().int(),
  horizon_years: z.number().int(),
});
export type ModelSummary = z.infer<typeof ModelSummary>;

export const ModelListPayload = z.object({ models: z.array(ModelSummary) });

export const ParameterDef = z.object({
  id: z.string(),
  domain: z.string(),
  units: z.string().optional().nullable(),
  display_name: z.string().optional().nullable(),
});
export type ParameterDef = z.infer<typeof ParameterDef>;

/** Only the slices of the model document the views read. */
export const ModelDocument = z
  .object({
    region_name: z.string(),
    horizon_years: z.number().int(),
    theory: z.string(),
    parameters: z.array(ParameterDef.passthrough()),
    actors: z.array(z.object({ id: z.string(), actor_type: z.string() }).passthrough()),
  })
  .passthrough();
export type ModelDocument = z.infer<typeof ModelDocument>;

export const ModelPayload = z.object({
  model_id: z.string(),
  model: ModelDocument,
});

export const YearResult = z.object({
  year: z.number().int(),
  p_intervention_mean: z.number(),
  p_intervention_ci: z.tuple([z.number(), z.number()]),
  samples_used: z.number().int(),
  root_priors: z.record(z.number()),
  drivers: z.array(z.tuple([z.string(), z.number()])),
});
export type YearResult = z.infer<typeof YearResult>;

export const RunRecord = z
  .object({
    run_id: z.string(),
    parent_run_id: z.string().nullable(),
    model_fingerprint: z.string(),
    config: z.object({
      seed: z.number().int(),
      samples: z.number().int(),
      tripwire: z.number(),
    }).passthrough(),
    theory: z.string(),
    horizon_years: z.number().int(),
    key_variables: z.array(z.string()),
    sign_matrix: z.object({
      variables: z.array(z.string()),
      entries: z.array(z.array(z.string())),
    }),
    attainments: z.record(z.number()),
    per_year: z.array(YearResult),
  })
  .passthrough();
export type RunRecord = z.infer<typeof RunRecord>;

export const RunListPayload = z.object({
  runs: z.array(
    z.object({
      run_id: z.string(),
      parent_run_id: z.string().nullable(),
      theory: z.string(),
      seed: z.number().int(),
    }),
  ),
});

export const ReportPayload = z.object({
  run_id: z.string(),
  years: z.array(z.number().int()),
  index_series: z.array(z.number()),
  tripwire_threshold: z.number(),
  tripwire_years: z.array(z.number().int()),
  top_drivers: z.record(z.array(z.tuple([z.string(), z.number()]))),
});
export type ReportPayload = z.infer<typeof ReportPayload>;

export const SensitivityPayload = z.object({
  run_id: z.string(),
  root: z.string(),
  sweep: z.array(z.tuple([z.number(), z.number()])),
});
export type SensitivityPayload = z.infer<typeof SensitivityPayload>;

export const NetworkNode = z
  .object({
    id: z.string(),
    states: z.array(z.string()).optional(),
    parents: z.array(z.string()).optional(),
  })
  .passthrough();
export type NetworkNode = z.infer<typeof NetworkNode>;

export const NetworkPayload = z.object({
  run_id: z.string(),
  network: z.object({
    nodes: z.array(NetworkNode),
    intervention_node: z.string().optional(),
  }).passthrough(),
  marginals: z.record(z.number()),
});
export type NetworkPayload = z.infer<typeof NetworkPayload>;

/** What-if edit documents, mirrored from the pipeline's accepted kinds. */
export type WhatIfEdit =
  | { kind: "add_actor"; actor: Record<string, unknown> }
  | { kind: "remove_actor"; actor_id: string }
  | { kind: "override_trend"; parameter_id: string; slope?: number; intercept?: number; residual_std?: number }
  | { kind: "set_theory"; theory: string }
  | { kind: "override_root_mapping"; node_id: string; root_mapping: Record<string, unknown> }
  | { kind: "set_tripwire"; tripwire: number };
