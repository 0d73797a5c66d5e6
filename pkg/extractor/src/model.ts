/**
 * A tiny autoregressive transformer with generated weights.
 *
 * The point is not language quality: extraction needs a causal model whose
 * hidden states are cheap, deterministic, and available at every layer. All
 * weights are drawn from a seeded generator, so a model id fully determines
 * the network. Fine-tuned variants are expressed as a base id plus a seeded
 * low-amplitude weight delta, loaded from a JSON checkpoint file.
 *
 * Layer 0 is the token embedding table itself: it sees no position signal
 * and no attention, so a word's layer-0 vector cannot depend on context.
 */

import { readFileSync } from "node:fs";
import { createRng, type Rng } from "./rng.js";

export interface ModelConfig {
  name: string;
  dim: number;
  layers: number;
  heads: number;
  ffn: number;
  vocab: number;
  seed: number;
}

interface BlockWeights {
  wq: Float32Array;
  wk: Float32Array;
  wv: Float32Array;
  wo: Float32Array;
  w1: Float32Array;
  b1: Float32Array;
  w2: Float32Array;
  b2: Float32Array;
  ln1Gain: Float32Array;
  ln1Bias: Float32Array;
  ln2Gain: Float32Array;
  ln2Bias: Float32Array;
}

export interface Model {
  config: ModelConfig;
  embedding: Float32Array;
  blocks: BlockWeights[];
}

const BASE_CONFIG: ModelConfig = {
  name: "tiny-base",
  dim: 16,
  layers: 3,
  heads: 2,
  ffn: 32,
  vocab: 512,
  seed: 101,
};

/** Builtin fine-tune: tiny-base plus a seeded delta. */
const TUNED_DELTA = { seed: 202, scale: 0.05 };

const LN_EPS = 1e-5;

function drawMatrix(rng: Rng, rows: number, cols: number): Float32Array {
  const out = new Float32Array(rows * cols);
  const scale = 1 / Math.sqrt(rows);
  for (let i = 0; i < out.length; i++) {
    out[i] = Math.fround(rng.gauss() * scale);
  }
  return out;
}

function buildModel(config: ModelConfig): Model {
  const rng = createRng(config.seed);
  const { dim, ffn, vocab, layers } = config;
  const embedding = drawMatrix(rng, vocab, dim);
  const blocks: BlockWeights[] = [];
  for (let l = 0; l < layers; l++) {
    blocks.push({
      wq: drawMatrix(rng, dim, dim),
      wk: drawMatrix(rng, dim, dim),
      wv: drawMatrix(rng, dim, dim),
      wo: drawMatrix(rng, dim, dim),
      w1: drawMatrix(rng, dim, ffn),
      b1: new Float32Array(ffn),
      w2: drawMatrix(rng, ffn, dim),
      b2: new Float32Array(dim),
      ln1Gain: new Float32Array(dim).fill(1),
      ln1Bias: new Float32Array(dim),
      ln2Gain: new Float32Array(dim).fill(1),
      ln2Bias: new Float32Array(dim),
    });
  }
  return { config, embedding, blocks };
}

function addDelta(model: Model, seed: number, scale: number, name: string): Model {
  const rng = createRng(seed);
  const perturb = (w: Float32Array): Float32Array => {
    const out = new Float32Array(w.length);
    for (let i = 0; i < w.length; i++) {
      out[i] = Math.fround(w[i] + scale * rng.gauss());
    }
    return out;
  };
  return {
    config: { ...model.config, name },
    embedding: perturb(model.embedding),
    blocks: model.blocks.map((b) => ({
      wq: perturb(b.wq),
      wk: perturb(b.wk),
      wv: perturb(b.wv),
      wo: perturb(b.wo),
      w1: perturb(b.w1),
      b1: perturb(b.b1),
      w2: perturb(b.w2),
      b2: perturb(b.b2),
      ln1Gain: perturb(b.ln1Gain),
      ln1Bias: perturb(b.ln1Bias),
      ln2Gain: perturb(b.ln2Gain),
      ln2Bias: perturb(b.ln2Bias),
    })),
  };
}

interface Checkpoint {
  base: string;
  deltaSeed: number;
  deltaScale: number;
  name?: string;
}

function parseCheckpoint(path: string): Checkpoint {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new Error(`cannot read checkpoint '${path}': ${(err as Error).message}`);
  }
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error(`checkpoint '${path}' is not valid JSON`);
  }
  if (typeof data !== "object" || data === null) {
    throw new Error(`checkpoint '${path}' must be a JSON object`);
  }
  const record = data as Record<string, unknown>;
  if (typeof record.base !== "string") {
    throw new Error(`checkpoint '${path}' is missing string field 'base'`);
  }
  if (typeof record.deltaSeed !== "number" || !Number.isInteger(record.deltaSeed)) {
    throw new Error(`checkpoint '${path}' is missing integer field 'deltaSeed'`);
  }
  if (typeof record.deltaScale !== "number" || !Number.isFinite(record.deltaScale)) {
    throw new Error(`checkpoint '${path}' is missing finite field 'deltaScale'`);
  }
  if (record.name !== undefined && typeof record.name !== "string") {
    throw new Error(`checkpoint '${path}' field 'name' must be a string`);
  }
  return {
    base: record.base,
    deltaSeed: record.deltaSeed,
    deltaScale: record.deltaScale,
    name: record.name as string | undefined,
  };
}

/**
 * Resolve a model id: a builtin name, or a path to a .json checkpoint that
 * names its base model and a weight delta.
 */
export function loadModel(id: string, depth = 0): Model {
  if (depth > 8) {
    throw new Error(`checkpoint chain too deep at '${id}'`);
  }
  if (id === "tiny-base") {
    return buildModel(BASE_CONFIG);
  }
  if (id === "tiny-tuned") {
    return addDelta(buildModel(BASE_CONFIG), TUNED_DELTA.seed, TUNED_DELTA.scale, "tiny-tuned");
  }
  if (id.endsWith(".json")) {
    const ckpt = parseCheckpoint(id);
    const base = loadModel(ckpt.base, depth + 1);
    return addDelta(base, ckpt.deltaSeed, ckpt.deltaScale, ckpt.name ?? id);
  }
  throw new Error(
    `unknown model '${id}' (builtin models: tiny-base, tiny-tuned; or a path to a .json checkpoint)`
  );
}

function layerNorm(
  x: Float64Array,
  offset: number,
  dim: number,
  gain: Float32Array,
  bias: Float32Array,
  out: Float64Array
): void {
  let mean = 0;
  for (let j = 0; j < dim; j++) mean += x[offset + j];
  mean /= dim;
  let variance = 0;
  for (let j = 0; j < dim; j++) {
    const centered = x[offset + j] - mean;
    variance += centered * centered;
  }
  variance /= dim;
  const inv = 1 / Math.sqrt(variance + LN_EPS);
  for (let j = 0; j < dim; j++) {
    out[j] = (x[offset + j] - mean) * inv * gain[j] + bias[j];
  }
}

function gelu(x: number): number {
  return 0.5 * x * (1 + Math.tanh(Math.sqrt(2 / Math.PI) * (x + 0.044715 * x * x * x)));
}

/**
 * Run the model over a token id sequence with causal attention.
 *
 * Returns hidden states per layer: index 0 is the embedding-table lookup
 * (position-free), index l >= 1 is the residual stream after block l. Rows
 * are rounded to f32 so downstream pooling sees exactly what extraction
 * writes.
 */
export function forward(model: Model, ids: number[]): Float32Array[][] {
  const { dim, heads, ffn, vocab, layers } = model.config;
  const T = ids.length;
  const headDim = dim / heads;
  const states: Float32Array[][] = [];

  const embedded: Float32Array[] = [];
  const x = new Float64Array(T * dim);
  for (let t = 0; t < T; t++) {
    const id = ids[t];
    if (id < 0 || id >= vocab) {
      throw new Error(`token id ${id} out of range for vocabulary of ${vocab}`);
    }
    const row = model.embedding.subarray(id * dim, (id + 1) * dim);
    embedded.push(new Float32Array(row));
    for (let j = 0; j < dim; j++) {
      // sinusoidal position signal; layer 0 above is recorded without it
      const pair = Math.floor(j / 2);
      const angle = t * Math.pow(10000, (-2 * pair) / dim);
      const pos = j % 2 === 0 ? Math.sin(angle) : Math.cos(angle);
      x[t * dim + j] = row[j] + pos;
    }
  }
  states.push(embedded);

  const normed = new Float64Array(dim);
  const q = new Float64Array(T * dim);
  const k = new Float64Array(T * dim);
  const v = new Float64Array(T * dim);
  const attn = new Float64Array(T * dim);
  const scores = new Float64Array(T);
  const hidden = new Float64Array(ffn);

  for (let l = 0; l < layers; l++) {
    const block = model.blocks[l];

    q.fill(0);
    k.fill(0);
    v.fill(0);
    for (let t = 0; t < T; t++) {
      layerNorm(x, t * dim, dim, block.ln1Gain, block.ln1Bias, normed);
      for (let i = 0; i < dim; i++) {
        const value = normed[i];
        if (value === 0) continue;
        const rowOffset = i * dim;
        for (let j = 0; j < dim; j++) {
          q[t * dim + j] += value * block.wq[rowOffset + j];
          k[t * dim + j] += value * block.wk[rowOffset + j];
          v[t * dim + j] += value * block.wv[rowOffset + j];
        }
      }
    }

    attn.fill(0);
    const invSqrt = 1 / Math.sqrt(headDim);
    for (let h = 0; h < heads; h++) {
      const headOffset = h * headDim;
      for (let t = 0; t < T; t++) {
        let maxScore = -Infinity;
        for (let s = 0; s <= t; s++) {
          let dot = 0;
          for (let j = 0; j < headDim; j++) {
            dot += q[t * dim + headOffset + j] * k[s * dim + headOffset + j];
          }
          scores[s] = dot * invSqrt;
          if (scores[s] > maxScore) maxScore = scores[s];
        }
        let total = 0;
        for (let s = 0; s <= t; s++) {
          scores[s] = Math.exp(scores[s] - maxScore);
          total += scores[s];
        }
        for (let s = 0; s <= t; s++) {
          const weight = scores[s] / total;
          for (let j = 0; j < headDim; j++) {
            attn[t * dim + headOffset + j] += weight * v[s * dim + headOffset + j];
          }
        }
      }
    }

    for (let t = 0; t < T; t++) {
      for (let j = 0; j < dim; j++) {
        let value = 0;
        for (let i = 0; i < dim; i++) {
          value += attn[t * dim + i] * block.wo[i * dim + j];
        }
        x[t * dim + j] += value;
      }
    }

    const rows: Float32Array[] = [];
    for (let t = 0; t < T; t++) {
      layerNorm(x, t * dim, dim, block.ln2Gain, block.ln2Bias, normed);
      for (let f = 0; f < ffn; f++) {
        let value = block.b1[f];
        for (let i = 0; i < dim; i++) {
          value += normed[i] * block.w1[i * ffn + f];
        }
        hidden[f] = gelu(value);
      }
      for (let j = 0; j < dim; j++) {
        let value = block.b2[j];
        for (let f = 0; f < ffn; f++) {
          value += hidden[f] * block.w2[f * dim + j];
        }
        x[t * dim + j] += value;
      }
      const row = new Float32Array(dim);
      for (let j = 0; j < dim; j++) {
        row[j] = Math.fround(x[t * dim + j]);
      }
      rows.push(row);
    }
    states.push(rows);
  }

  return states;
}
