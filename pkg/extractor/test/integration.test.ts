import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { makeTempDir, runCli, runVoxelscore } from "./helpers.js";

/**
 * Cross-package run: features extracted here must be accepted by the
 * scoring toolkit's own transcript/feature pair validation and survive a
 * full scoring pass. Everything crosses the process boundary; no Python
 * internals are imported.
 */
describe("scoring toolkit integration", () => {
  it("scores an augmented transcript with extracted features", { timeout: 180_000 }, () => {
    const dir = makeTempDir("featx-it-");

    const synth = runVoxelscore([
      "synth", dir,
      "--words", "120",
      "--dims", "8",
      "--frames", "80",
      "--tr", "1.5",
      "--voxels", "12",
      "--subjects", "2",
      "--lags", "2",
      "--augment-dims", "2",
      "--seed", "5",
    ]);
    expect(synth.status).toBe(0);
    const paths = JSON.parse(synth.stdout);

    const feat = join(dir, "extracted.feat");
    const extracted = runCli([
      "extract",
      "--model", "tiny-base",
      "--layer", "2",
      "--context", "8",
      "--transcript", paths.transcript_augmented,
      "--out", feat,
    ]);
    expect(extracted.status).toBe(0);
    const rows = JSON.parse(extracted.stdout).rows;
    const words = readFileSync(paths.transcript_augmented, "utf8")
      .trim()
      .split("\n").length - 1;
    expect(rows).toBe(words);

    const score = runVoxelscore([
      "score",
      paths.transcript_augmented,
      feat,
      paths.bold_dir,
      "--out", join(dir, "scores.csv"),
      "--k", "2",
      "--outer-folds-pooled", "3",
      "--inner-folds", "3",
      "--workers", "2",
    ]);
    expect(score.status).toBe(0);
    const summary = JSON.parse(score.stdout);
    expect(summary.n_voxels).toBe(12);
    expect(Number.isFinite(summary.mean_score)).toBe(true);

    // row-count validation has teeth: features for the shorter base
    // transcript must be rejected against the augmented one
    const baseFeat = join(dir, "base.feat");
    const baseExtract = runCli([
      "extract",
      "--model", "tiny-base",
      "--layer", "2",
      "--context", "8",
      "--transcript", paths.transcript,
      "--out", baseFeat,
    ]);
    expect(baseExtract.status).toBe(0);
    const mismatch = runVoxelscore([
      "score",
      paths.transcript_augmented,
      baseFeat,
      paths.bold_dir,
      "--out", join(dir, "bad.csv"),
      "--k", "2",
    ]);
    expect(mismatch.status).toBe(2);
  });
});
