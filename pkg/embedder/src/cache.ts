/**
 * Writer for the matcher's embedding-cache format.
 *
 * One record per line: the label, a TAB, then the vector components
 * separated by single spaces.  Records are sorted by label.  With case
 * folding the stored key is the lowercased label and colliding labels
 * keep the first vector, same as the matcher's folding loader.
 */
import { writeFile } from "node:fs/promises";
import { cleanLabel, compareCodePoints } from "./labels.js";

export interface CacheEntry {
  label: string;
  vector: ArrayLike<number>;
}

export interface FormatOptions {
  caseFold?: boolean;
  onWarning?: (message: string) => void;
}

/** Render cache entries to file text; validates shape and finiteness. */
export function formatCache(entries: readonly CacheEntry[], options: FormatOptions = {}): string {
  const warn = options.onWarning ?? ((message: string) => console.warn(message));
  const byKey = new Map<string, ArrayLike<number>>();
  let dim: number | undefined;
  for (const entry of entries) {
    const key = options.caseFold ? cleanLabel(entry.label).toLowerCase() : cleanLabel(entry.label);
    if (entry.vector.length === 0) {
      throw new Error(`empty vector for label ${JSON.stringify(entry.label)}`);
    }
    if (dim === undefined) {
      dim = entry.vector.length;
    } else if (entry.vector.length !== dim) {
      throw new Error(
        `dimension mismatch for label ${JSON.stringify(entry.label)}: expected ${dim}, got ${entry.vector.length}`,
      );
    }
    for (let i = 0; i < entry.vector.length; i++) {
      const v = entry.vector[i]!;
      if (!Number.isFinite(v)) {
        throw new Error(`non-finite component for label ${JSON.stringify(entry.label)}`);
      }
    }
    if (byKey.has(key)) {
      warn(`duplicate cache key ${JSON.stringify(key)}; keeping first`);
      continue;
    }
    byKey.set(key, entry.vector);
  }
  const keys = [...byKey.keys()].sort(compareCodePoints);
  let text = "";
  for (const key of keys) {
    const vector = byKey.get(key)!;
    text += key + "\t" + Array.from(vector, String).join(" ") + "\n";
  }
  return text;
}

export async function writeCache(
  path: string,
  entries: readonly CacheEntry[],
  options: FormatOptions = {},
): Promise<void> {
  await writeFile(path, formatCache(entries, options), "utf-8");
}
