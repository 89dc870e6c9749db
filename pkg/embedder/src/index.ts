export {
  DEFAULT_LABEL_PREDICATES,
  cleanLabel,
  collectLabels,
  compareCodePoints,
  labelsFromQuads,
  localName,
  parseOntology,
  readLabelFile,
  splitLocalName,
} from "./labels.js";
export { LabelEmbedder, maskedMean, type EncodedBatch, type LoadOptions } from "./embed.js";
export { formatCache, writeCache, type CacheEntry, type FormatOptions } from "./cache.js";
export {
  makeJob,
  jobLabels,
  runJob,
  validateJob,
  type EmbedJob,
  type JobDefaults,
  type JobReport,
} from "./job.js";
