/**
 * Sub-word tokenizer: greedy fixed-length character chunks.
 *
 * Each word is split into chunks of up to CHUNK_LENGTH characters, left to
 * right, and every chunk is hashed into a fixed vocabulary. There is no
 * merge table to ship, the mapping is stable across runs, and any word of
 * length > CHUNK_LENGTH exercises the multi-token pooling path.
 */

import { hashString } from "./rng.js";

export const CHUNK_LENGTH = 3;

/** Split a word into its chunk strings. Empty input yields zero chunks. */
export function subTokens(word: string): string[] {
  const text = word.trim();
  const chunks: string[] = [];
  for (let start = 0; start < text.length; start += CHUNK_LENGTH) {
    chunks.push(text.slice(start, start + CHUNK_LENGTH));
  }
  return chunks;
}

/** Map a word to vocabulary ids, one per chunk. */
export function tokenizeWord(word: string, vocabSize: number): number[] {
  if (vocabSize < 1) {
    throw new Error(`vocabulary size must be positive, got ${vocabSize}`);
  }
  return subTokens(word).map((chunk) => hashString(chunk) % vocabSize);
}
