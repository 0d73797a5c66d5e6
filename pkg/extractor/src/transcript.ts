/**
 * Reader for word-level transcripts: tab-separated text with a fixed
 * header of word, onset, offset, sentence_id. Every row becomes one output
 * row downstream, including zero-duration words, so nothing is filtered
 * here beyond structural validation.
 */

import { readFileSync } from "node:fs";

export interface WordEntry {
  word: string;
  onset: number;
  offset: number;
  sentenceId: number;
}

const HEADER = ["word", "onset", "offset", "sentence_id"];

export function parseTranscript(text: string, source = "<transcript>"): WordEntry[] {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error(`${source}: empty transcript`);
  }
  const header = lines[0].replace(/\r$/, "").split("\t");
  if (header.length !== HEADER.length || !HEADER.every((h, i) => header[i] === h)) {
    throw new Error(
      `${source}: header must be '${HEADER.join("\\t")}', got '${lines[0]}'`
    );
  }
  const entries: WordEntry[] = [];
  for (let n = 1; n < lines.length; n++) {
    const fields = lines[n].replace(/\r$/, "").split("\t");
    if (fields.length !== 4) {
      throw new Error(`${source}: line ${n + 1} has ${fields.length} fields, expected 4`);
    }
    const onset = Number(fields[1]);
    const offset = Number(fields[2]);
    const sentenceId = Number(fields[3]);
    if (!Number.isFinite(onset) || !Number.isFinite(offset)) {
      throw new Error(`${source}: line ${n + 1} has non-numeric times`);
    }
    if (!Number.isInteger(sentenceId)) {
      throw new Error(`${source}: line ${n + 1} has non-integer sentence_id`);
    }
    entries.push({ word: fields[0], onset, offset, sentenceId });
  }
  if (entries.length === 0) {
    throw new Error(`${source}: transcript has a header but no words`);
  }
  return entries;
}

export function readTranscript(path: string): WordEntry[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new Error(`cannot read transcript '${path}': ${(err as Error).message}`);
  }
  return parseTranscript(text, path);
}
