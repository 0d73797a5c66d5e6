/**
 * Command line entry point.
 *
 * featx extract --model ID --layer L --context C --transcript PATH --out PATH
 *
 * Exit codes: 0 success, 2 anything the command can diagnose (bad flags,
 * unreadable files, malformed transcripts, out-of-range arguments).
 */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";
import { loadModel } from "./model.js";
import { readTranscript } from "./transcript.js";
import { extract } from "./extractor.js";
import { encodeFeat } from "./feat.js";

const USAGE =
  "usage: featx extract --model ID --layer L --context C --transcript PATH --out PATH";

function parseIntFlag(name: string, raw: string): number {
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new Error(`--${name} must be an integer, got '${raw}'`);
  }
  return value;
}

function runExtract(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      layer: { type: "string" },
      context: { type: "string" },
      transcript: { type: "string" },
      out: { type: "string" },
    },
    allowPositionals: false,
  });

  for (const flag of ["model", "layer", "context", "transcript", "out"] as const) {
    if (values[flag] === undefined) {
      throw new Error(`missing required flag --${flag}\n${USAGE}`);
    }
  }

  const layer = parseIntFlag("layer", values.layer!);
  const context = parseIntFlag("context", values.context!);
  const model = loadModel(values.model!);
  const entries = readTranscript(values.transcript!);
  const matrix = extract(model, entries, layer, context);
  writeFileSync(values.out!, encodeFeat(matrix));
  process.stdout.write(
    JSON.stringify({
      out: values.out,
      rows: matrix.rows,
      dims: matrix.dims,
      layer: matrix.layerId,
      context: matrix.contextLength,
      model: matrix.modelTag,
    }) + "\n"
  );
}

function main(): number {
  const argv = process.argv.slice(2);
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    process.stdout.write(USAGE + "\n");
    return argv.length === 0 ? 2 : 0;
  }
  if (argv[0] !== "extract") {
    process.stderr.write(`error: unknown command '${argv[0]}'\n${USAGE}\n`);
    return 2;
  }
  try {
    runExtract(argv.slice(1));
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

// exitCode instead of exit() so pending stdout writes flush before exit
process.exitCode = main();
