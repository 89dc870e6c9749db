/**
 * Cross-tool checks: caches written here must load in the matcher and
 * drive a full embedding-setting run.  These tests shell out to python3
 * and the kgmatch console script, both installed alongside this package.
 */
import { execFileSync } from "node:child_process";
import { existsSync } from "node:fs";
import { mkdtemp, readFile, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { jobLabels, makeJob, runJob } from "../src/index.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const DATA = fileURLToPath(new URL("../../demos/data", import.meta.url));

function python(code: string): string {
  return execFileSync("python3", ["-c", code], { encoding: "utf-8" });
}

let dir: string;
let cachePath: string;

beforeAll(async () => {
  dir = await mkdtemp(join(tmpdir(), "interop-"));
  cachePath = join(dir, "cache.tsv");
  const report = await runJob(
    makeJob({
      ontologyPaths: [join(DATA, "source.ttl"), join(DATA, "target.ttl")],
      modelId: "tiny-model",
      localModelRoot: FIXTURES,
      outputPath: cachePath,
      batchSize: 4,
    }),
  );
  expect(report.records).toBeGreaterThan(0);
});

afterAll(async () => {
  await rm(dir, { recursive: true, force: true });
});

describe("cache interchange", () => {
  it("covers every label either tool would derive from the ontologies", async () => {
    const labels = await jobLabels(
      makeJob({
        ontologyPaths: [join(DATA, "source.ttl"), join(DATA, "target.ttl")],
        modelId: "tiny-model",
        outputPath: "unused",
      }),
    );
    expect(labels).toContain("accepted paper");
    expect(labels).toContain("has decision");
    const lines = (await readFile(cachePath, "utf-8")).trim().split("\n");
    expect(lines.map((l) => l.split("\t")[0])).toEqual(labels);
  });

  it("loads in the matcher with full precision", async () => {
    const out = python(`
import json
from kgmatch.embeddings import load_store
store = load_store(${JSON.stringify(cachePath)})
vec = store.lookup("accepted paper")
print(json.dumps({"records": len(store), "dim": store.dim, "head": list(vec[:4])}))
`);
    const report = JSON.parse(out) as { records: number; dim: number; head: number[] };
    const lines = (await readFile(cachePath, "utf-8")).trim().split("\n");
    expect(report.records).toBe(lines.length);
    expect(report.dim).toBe(32);

    const written = lines
      .find((l) => l.startsWith("accepted paper\t"))!
      .split("\t")[1]!
      .split(" ")
      .slice(0, 4)
      .map(Number);
    expect(report.head).toEqual(written);
  });

  it("drives an end-to-end embedding-setting match run", async () => {
    const outDir = join(dir, "alignment");
    execFileSync(
      "kgmatch",
      [
        "match",
        "--source", join(DATA, "source.ttl"),
        "--target", join(DATA, "target.ttl"),
        "--queries", join(DATA, "queries"),
        "--embeddings", cachePath,
        "--setting", "les",
        "--threshold", "0.5",
        "--out", outDir,
      ],
      { encoding: "utf-8" },
    );
    const alignmentPath = join(outDir, "source-target-les-0.5.json");
    expect(existsSync(alignmentPath)).toBe(true);

    const alignment = JSON.parse(await readFile(alignmentPath, "utf-8")) as {
      correspondences: { confidence: number }[];
    };
    expect(alignment.correspondences.length).toBeGreaterThan(0);
    for (const c of alignment.correspondences) {
      expect(c.confidence).toBeGreaterThan(0.5);
    }
  });
});
