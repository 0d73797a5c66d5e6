import { spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

export const CLI_PATH = fileURLToPath(new URL("../dist/cli.js", import.meta.url));

export function makeTempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

export interface RunResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function runCli(args: string[]): RunResult {
  const result = spawnSync(process.execPath, [CLI_PATH, ...args], {
    encoding: "utf8",
  });
  if (result.error) {
    throw result.error;
  }
  return { status: result.status ?? -1, stdout: result.stdout, stderr: result.stderr };
}

/** Run the scoring toolkit's own command line client. */
export function runVoxelscore(args: string[]): RunResult {
  const result = spawnSync("voxelscore", args, { encoding: "utf8" });
  if (result.error) {
    throw new Error(`voxelscore not runnable: ${result.error.message}`);
  }
  return { status: result.status ?? -1, stdout: result.stdout, stderr: result.stderr };
}

/** Write a transcript with evenly spaced words, 0.3 s each. */
export function writeWordsFile(path: string, words: string[]): void {
  const lines = ["word\tonset\toffset\tsentence_id"];
  words.forEach((word, i) => {
    const onset = (i * 0.3).toFixed(3);
    const offset = (i * 0.3 + 0.25).toFixed(3);
    lines.push(`${word}\t${onset}\t${offset}\t0`);
  });
  writeFileSync(path, lines.join("\n") + "\n");
}
