/**
 * Label harvesting from RDF ontologies.
 *
 * The rules mirror the matcher exactly: per entity, literal values of the
 * label predicates win (checked in priority order), and an entity without
 * any label triple falls back to its split-and-lowercased IRI local name.
 * The final list is cleaned, deduplicated and sorted so the cache writer
 * receives a canonical sequence.
 */
import { readFile } from "node:fs/promises";
import { extname } from "node:path";
import { Parser, type Quad, type Term } from "n3";

export const DEFAULT_LABEL_PREDICATES: readonly string[] = [
  "http://www.w3.org/2004/02/skos/core#prefLabel",
  "http://www.w3.org/2004/02/skos/core#altLabel",
  "http://www.w3.org/2008/05/skos-xl#literalForm",
  "http://www.w3.org/2000/01/rdf-schema#label",
  "http://www.w3.org/2000/01/rdf-schema#comment",
];

const CAMEL_BOUNDARY = /(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])/g;

/** Split CamelCase/underscores/hyphens and lowercase: "AcceptedPaper" -> "accepted paper". */
export function splitLocalName(name: string): string {
  const words: string[] = [];
  for (const part of name.split(/[_\-]+/)) {
    if (!part) continue;
    for (const word of part.replace(CAMEL_BOUNDARY, " ").split(/\s+/)) {
      if (word) words.push(word);
    }
  }
  return words.map((w) => w.toLowerCase()).join(" ") || name.toLowerCase();
}

/** Last path segment of an IRI (after '#' or '/'), or the raw value. */
export function localName(iri: string): string {
  for (const sep of ["#", "/"]) {
    const at = iri.lastIndexOf(sep);
    if (at >= 0) {
      const tail = iri.slice(at + 1);
      if (tail) return tail;
    }
  }
  return iri;
}

/** Cache labels may not contain TAB or line breaks; each becomes a space. */
export function cleanLabel(raw: string): string {
  return raw.replace(/[\t\n\r]/g, " ");
}

/** Code-point string order, matching the matcher's sorted() calls. */
export function compareCodePoints(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

function formatForPath(path: string): string | undefined {
  const ext = extname(path).toLowerCase();
  if (ext === ".nt") return "application/N-Triples";
  if (ext === ".ttl") return "text/turtle";
  return undefined;
}

/** Parse one ontology file into quads (Turtle or N-Triples by extension). */
export async function parseOntology(path: string): Promise<Quad[]> {
  const text = await readFile(path, "utf-8");
  try {
    return new Parser({ format: formatForPath(path) }).parse(text);
  } catch (error) {
    // The parser reports the line but not which file it came from.
    const reason = error instanceof Error ? error.message : String(error);
    throw new Error(`${path}: ${reason}`);
  }
}

function entityKey(term: Term): string | undefined {
  if (term.termType === "NamedNode") return term.value;
  if (term.termType === "BlankNode") return "_:" + term.value;
  return undefined;
}

/**
 * Labels of every entity mentioned in the quads.
 *
 * Blank nodes contribute their label-triple values but have no local-name
 * fallback; their generated ids carry no meaning.  The result is cleaned,
 * deduplicated and sorted.
 */
export function labelsFromQuads(
  quads: readonly Quad[],
  labelPredicates: readonly string[] = DEFAULT_LABEL_PREDICATES,
): string[] {
  const predicateRank = new Map(labelPredicates.map((p, i) => [p, i]));
  const iris = new Map<string, string>();
  const labelValues = new Map<string, string[][]>();

  const noteEntity = (term: Term) => {
    const key = entityKey(term);
    if (key === undefined) return;
    if (term.termType === "NamedNode" && !iris.has(key)) iris.set(key, term.value);
    if (!labelValues.has(key)) labelValues.set(key, labelPredicates.map(() => []));
  };

  for (const quad of quads) {
    noteEntity(quad.subject);
    noteEntity(quad.predicate);
    noteEntity(quad.object);
    const rank = predicateRank.get(quad.predicate.value);
    if (rank !== undefined && quad.object.termType === "Literal") {
      const key = entityKey(quad.subject);
      if (key !== undefined) labelValues.get(key)!.at(rank)!.push(quad.object.value);
    }
  }

  const out = new Set<string>();
  for (const [key, perPredicate] of labelValues) {
    const labels: string[] = [];
    for (const values of perPredicate) labels.push(...[...values].sort(compareCodePoints));
    if (labels.length === 0) {
      const iri = iris.get(key);
      if (iri !== undefined) labels.push(splitLocalName(localName(iri)));
    }
    for (const label of labels) {
      const cleaned = cleanLabel(label);
      if (cleaned.trim()) out.add(cleaned);
    }
  }
  return [...out].sort(compareCodePoints);
}

/** Union of labels across ontology files, deduplicated and sorted. */
export async function collectLabels(
  ontologyPaths: readonly string[],
  labelPredicates: readonly string[] = DEFAULT_LABEL_PREDICATES,
): Promise<string[]> {
  const out = new Set<string>();
  for (const path of ontologyPaths) {
    for (const label of labelsFromQuads(await parseOntology(path), labelPredicates)) {
      out.add(label);
    }
  }
  return [...out].sort(compareCodePoints);
}

/** One label per line; blank lines are skipped, labels cleaned. */
export async function readLabelFile(path: string): Promise<string[]> {
  const text = await readFile(path, "utf-8");
  const out: string[] = [];
  for (const line of text.split("\n")) {
    const cleaned = cleanLabel(line.replace(/\r$/, ""));
    if (cleaned.trim()) out.push(cleaned);
  }
  return out;
}
