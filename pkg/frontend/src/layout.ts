/**
 * Layered (topological) DAG layout. Cosmetic only: the x column is the
 * node's longest-path depth from the roots, the y slot its index within
 * the layer, sorted by id for determinism.
 */

import { NetworkNode } from "./types.js";

export interface PlacedNode {
  id: string;
  layer: number;
  slot: number;
  x: number;
  y: number;
}

export interface LayoutResult {
  nodes: PlacedNode[];
  edges: { from: string; to: string }[];
  width: number;
  height: number;
}

export const LAYER_GAP = 170;
export const SLOT_GAP = 72;
export const MARGIN = 60;

export function layeredLayout(nodes: NetworkNode[]): LayoutResult {
  const depth = new Map<string, number>();
  const byId = new Map(nodes.map((n) => [n.id, n]));

  const resolve = (id: string, trail: Set<string>): number => {
    const cached = depth.get(id);
    if (cached !== undefined) return cached;
    if (trail.has(id)) throw new Error(`cycle through ${id}`);
    trail.add(id);
    const node = byId.get(id);
    const parents = node?.parents ?? [];
    const d = parents.length === 0
      ? 0
      : 1 + Math.max(...parents.map((p) => resolve(p, trail)));
    trail.delete(id);
    depth.set(id, d);
    return d;
  };
  nodes.forEach((n) => resolve(n.id, new Set()));

  const layers = new Map<number, string[]>();
  for (const n of [...nodes].sort((a, b) => a.id.localeCompare(b.id))) {
    const d = depth.get(n.id)!;
    const layer = layers.get(d) ?? [];
    layer.push(n.id);
    layers.set(d, layer);
  }

  const placed: PlacedNode[] = [];
  const tallest = Math.max(...[...layers.values()].map((l) => l.length));
  for (const [layer, ids] of [...layers.entries()].sort((a, b) => a[0] - b[0])) {
    const offset = ((tallest - ids.length) * SLOT_GAP) / 2;
    ids.forEach((id, slot) => {
      placed.push({
        id,
        layer,
        slot,
        x: MARGIN + layer * LAYER_GAP,
        y: MARGIN + offset + slot * SLOT_GAP,
      });
    });
  }

  const edges = nodes
    .flatMap((n) => (n.parents ?? []).map((p) => ({ from: p, to: n.id })))
    .sort((a, b) => a.from.localeCompare(b.from) || a.to.localeCompare(b.to));
  const nLayers = layers.size;
  return {
    nodes: placed,
    edges,
    width: 2 * MARGIN + (nLayers - 1) * LAYER_GAP + 120,
    height: 2 * MARGIN + (tallest - 1) * SLOT_GAP,
  };
}
