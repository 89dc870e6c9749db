/** A complete cache-generation job and its runner. */
import { LabelEmbedder } from "./embed.js";
import { writeCache, type CacheEntry } from "./cache.js";
import {
  DEFAULT_LABEL_PREDICATES,
  collectLabels,
  cleanLabel,
  compareCodePoints,
  readLabelFile,
} from "./labels.js";

export interface EmbedJob {
  ontologyPaths: readonly string[];
  labelPredicates: readonly string[];
  modelId: string;
  outputPath: string;
  caseFoldOutput: boolean;
  batchSize: number;
  /** Plain-text files with one extra label per line. */
  extraLabelFiles?: readonly string[];
  /** Resolve the model under this directory only; no downloads. */
  localModelRoot?: string;
}

export interface JobDefaults {
  ontologyPaths?: readonly string[];
  labelPredicates?: readonly string[];
  modelId: string;
  outputPath: string;
  caseFoldOutput?: boolean;
  batchSize?: number;
  extraLabelFiles?: readonly string[];
  localModelRoot?: string;
}

export interface JobReport {
  labels: number;
  records: number;
  dim: number;
  outputPath: string;
}

export function makeJob(defaults: JobDefaults): EmbedJob {
  return {
    ontologyPaths: defaults.ontologyPaths ?? [],
    labelPredicates: defaults.labelPredicates ?? DEFAULT_LABEL_PREDICATES,
    modelId: defaults.modelId,
    outputPath: defaults.outputPath,
    caseFoldOutput: defaults.caseFoldOutput ?? false,
    batchSize: defaults.batchSize ?? 8,
    extraLabelFiles: defaults.extraLabelFiles,
    localModelRoot: defaults.localModelRoot,
  };
}

export function validateJob(job: EmbedJob): void {
  if (!Number.isInteger(job.batchSize) || job.batchSize < 1) {
    throw new RangeError(`batch size must be a positive integer, got ${job.batchSize}`);
  }
  if (job.ontologyPaths.length === 0 && (job.extraLabelFiles?.length ?? 0) === 0) {
    throw new Error("nothing to embed: no ontologies and no label files");
  }
  if (!job.modelId) throw new Error("model id is required");
  if (!job.outputPath) throw new Error("output path is required");
}

/** Gather the label list a job will embed, deduplicated and sorted. */
export async function jobLabels(job: EmbedJob): Promise<string[]> {
  const labels = new Set(await collectLabels(job.ontologyPaths, job.labelPredicates));
  for (const path of job.extraLabelFiles ?? []) {
    for (const label of await readLabelFile(path)) labels.add(cleanLabel(label));
  }
  return [...labels].sort(compareCodePoints);
}

/** Collect, embed and write; returns a small summary for reporting. */
export async function runJob(
  job: EmbedJob,
  onWarning?: (message: string) => void,
): Promise<JobReport> {
  validateJob(job);
  const labels = await jobLabels(job);
  if (labels.length === 0) throw new Error("no labels found in the inputs");
  const embedder = await LabelEmbedder.load({
    modelId: job.modelId,
    localModelRoot: job.localModelRoot,
  });
  const vectors = await embedder.embed(labels, job.batchSize);
  const entries: CacheEntry[] = labels.map((label, i) => ({ label, vector: vectors[i]! }));
  await writeCache(job.outputPath, entries, { caseFold: job.caseFoldOutput, onWarning });
  const records = job.caseFoldOutput
    ? new Set(labels.map((l) => l.toLowerCase())).size
    : labels.length;
  return { labels: labels.length, records, dim: vectors[0]!.length, outputPath: job.outputPath };
}
