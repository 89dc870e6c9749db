#!/usr/bin/env node
/** Command line front end: ontologies in, embedding cache out. */
import { realpathSync } from "node:fs";
import process from "node:process";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { DEFAULT_LABEL_PREDICATES } from "./labels.js";
import { makeJob, runJob } from "./job.js";

export async function main(argv: readonly string[]): Promise<number> {
  const args = await yargs(hideBin([...argv]))
    .scriptName("kgmatch-embed")
    .usage("$0 --ontology FILE [--ontology FILE ...] --model ID --out FILE")
    .option("ontology", {
      alias: "o",
      type: "string",
      array: true,
      default: [] as string[],
      describe: "Ontology file to harvest labels from (repeatable)",
    })
    .option("labels", {
      type: "string",
      array: true,
      default: [] as string[],
      describe: "Extra label list, one label per line (repeatable)",
    })
    .option("model", {
      alias: "m",
      type: "string",
      demandOption: true,
      describe: "Model id understood by the embedding runtime",
    })
    .option("model-root", {
      type: "string",
      describe: "Resolve the model under this directory only (offline)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "Cache file to write",
    })
    .option("batch-size", {
      type: "number",
      default: 8,
      describe: "Labels per forward pass (>= 1)",
    })
    .option("case-fold", {
      type: "boolean",
      default: false,
      describe: "Lowercase stored labels; colliding labels keep the first vector",
    })
    .option("label-predicate", {
      type: "string",
      array: true,
      describe: "Override the label predicate priority list (repeatable)",
    })
    .strict()
    .fail((message, error) => {
      if (error) throw error;
      console.error(message);
      process.exit(2);
    })
    .parse();

  const job = makeJob({
    ontologyPaths: args.ontology,
    extraLabelFiles: args.labels,
    labelPredicates: args.labelPredicate ?? DEFAULT_LABEL_PREDICATES,
    modelId: args.model,
    outputPath: args.out,
    batchSize: args.batchSize,
    caseFoldOutput: args.caseFold,
    localModelRoot: args.modelRoot,
  });
  try {
    const report = await runJob(job, (message) => console.warn(message));
    console.log(
      `wrote ${report.records} vectors (dim ${report.dim}) from ${report.labels} labels to ${report.outputPath}`,
    );
    return 0;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : String(error)}`);
    return 1;
  }
}

// Resolve bin-shim symlinks before comparing, or the guard never fires.
const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
if (invokedDirectly) {
  process.exitCode = await main(process.argv);
}
