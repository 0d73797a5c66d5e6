/**
 * Deterministic random number generation.
 *
 * Model weights are generated, not trained, so every weight tensor must be
 * reproducible from a 32-bit seed alone. splitmix32 is small, passes the
 * usual empirical batteries at this output size, and has no shared state.
 */

/** A counter-based generator over a 32-bit state. */
export interface Rng {
  /** Uniform float in [0, 1). */
  next(): number;
  /** Standard normal deviate (Box-Muller, both halves used). */
  gauss(): number;
}

export function createRng(seed: number): Rng {
  let state = seed >>> 0;
  let spare: number | null = null;

  function nextU32(): number {
    state = (state + 0x9e3779b9) >>> 0;
    let z = state;
    z = Math.imul(z ^ (z >>> 16), 0x21f0aaad);
    z = Math.imul(z ^ (z >>> 15), 0x735a2d97);
    z = z ^ (z >>> 15);
    return z >>> 0;
  }

  function next(): number {
    return nextU32() / 4294967296;
  }

  function gauss(): number {
    if (spare !== null) {
      const value = spare;
      spare = null;
      return value;
    }
    // u must stay away from 0 for the log; the +1 offset guarantees it
    const u = (nextU32() + 1) / 4294967297;
    const v = next();
    const radius = Math.sqrt(-2 * Math.log(u));
    spare = radius * Math.sin(2 * Math.PI * v);
    return radius * Math.cos(2 * Math.PI * v);
  }

  return { next, gauss };
}

/** FNV-1a over UTF-8 bytes; stable 32-bit hash for strings. */
export function hashString(text: string): number {
  const bytes = new TextEncoder().encode(text);
  let hash = 0x811c9dc5;
  for (const byte of bytes) {
    hash ^= byte;
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}
