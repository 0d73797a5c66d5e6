/**
 * Word-aligned activation extraction.
 *
 * For word i the model runs on a window holding the last min(i, c) words
 * plus word i itself, attention strictly left to right. The word's feature
 * row is the mean of its own sub-token states at the requested layer. Rows
 * come out in transcript order, one per word, zero-duration words included.
 *
 * Windows are recomputed per word rather than cached across words: redundant
 * compute on a model this small, but every row's provenance is one forward
 * pass with no cross-window state to reason about.
 */

import { forward, type Model } from "./model.js";
import { tokenizeWord } from "./tokenizer.js";
import type { WordEntry } from "./transcript.js";
import type { FeatMatrix } from "./feat.js";

export interface PooledStates {
  /** Per layer (0 = embedding table), per word, one f32 row. */
  layers: Float32Array[][];
  dims: number;
}

function checkContext(context: number): void {
  if (!Number.isInteger(context) || context < 1) {
    throw new Error(`context length must be an integer >= 1, got ${context}`);
  }
}

/**
 * Run every window once and pool all layers. Both single-layer and
 * all-layer extraction read from this, so their rows agree bit for bit.
 */
export function pooledStates(
  model: Model,
  entries: WordEntry[],
  context: number
): PooledStates {
  checkContext(context);
  const { dim, vocab, layers } = model.config;

  const tokenized = entries.map((entry, i) => {
    const ids = tokenizeWord(entry.word, vocab);
    if (ids.length === 0) {
      throw new Error(
        `word ${i} ('${entry.word}') produced zero sub-word tokens`
      );
    }
    return ids;
  });

  const pooled: Float32Array[][] = [];
  for (let l = 0; l <= layers; l++) {
    pooled.push([]);
  }

  for (let i = 0; i < entries.length; i++) {
    const start = i - Math.min(i, context);
    const windowIds: number[] = [];
    for (let w = start; w <= i; w++) {
      windowIds.push(...tokenized[w]);
    }
    const span = tokenized[i].length;
    const states = forward(model, windowIds);
    for (let l = 0; l <= layers; l++) {
      const rows = states[l];
      const mean = new Float64Array(dim);
      for (let s = rows.length - span; s < rows.length; s++) {
        const row = rows[s];
        for (let j = 0; j < dim; j++) {
          mean[j] += row[j];
        }
      }
      const out = new Float32Array(dim);
      for (let j = 0; j < dim; j++) {
        out[j] = Math.fround(mean[j] / span);
      }
      pooled[l].push(out);
    }
  }

  return { layers: pooled, dims: dim };
}

function toMatrix(
  rows: Float32Array[],
  dims: number,
  layerId: number,
  contextLength: number,
  modelTag: string
): FeatMatrix {
  const values = new Float32Array(rows.length * dims);
  rows.forEach((row, i) => values.set(row, i * dims));
  return { rows: rows.length, dims, layerId, contextLength, modelTag, values };
}

function checkLayer(model: Model, layer: number): void {
  const top = model.config.layers;
  if (!Number.isInteger(layer) || layer < 0 || layer > top) {
    throw new Error(
      `layer ${layer} out of range: model '${model.config.name}' has layers 0..${top}`
    );
  }
}

/** Extract one layer's word-aligned features. */
export function extract(
  model: Model,
  entries: WordEntry[],
  layer: number,
  context: number
): FeatMatrix {
  checkLayer(model, layer);
  const pooled = pooledStates(model, entries, context);
  return toMatrix(pooled.layers[layer], pooled.dims, layer, context, model.config.name);
}

/** Extract every layer at once, one matrix per layer id 0..layers. */
export function extractAllLayers(
  model: Model,
  entries: WordEntry[],
  context: number
): FeatMatrix[] {
  const pooled = pooledStates(model, entries, context);
  return pooled.layers.map((rows, l) =>
    toMatrix(rows, pooled.dims, l, context, model.config.name)
  );
}
