/**
 * Transformer mean-pool embeddings for label strings.
 *
 * Pooling is the arithmetic mean over the token axis of the final hidden
 * layer.  Padding positions are excluded via the attention mask, so a label
 * embeds identically whether it is sent alone or inside a padded batch.
 */
import {
  AutoModel,
  AutoTokenizer,
  env,
  type PreTrainedModel,
  type PreTrainedTokenizer,
  type Tensor,
} from "@huggingface/transformers";

export interface LoadOptions {
  modelId: string;
  /** When set, models resolve under this directory only; no downloads. */
  localModelRoot?: string;
}

export interface EncodedBatch {
  input_ids: Tensor;
  attention_mask: Tensor;
}

export class LabelEmbedder {
  private constructor(
    readonly modelId: string,
    private readonly tokenizer: PreTrainedTokenizer,
    private readonly model: PreTrainedModel,
  ) {}

  static async load(options: LoadOptions): Promise<LabelEmbedder> {
    if (options.localModelRoot !== undefined) {
      env.localModelPath = options.localModelRoot;
      env.allowRemoteModels = false;
    }
    const tokenizer = await AutoTokenizer.from_pretrained(options.modelId);
    // Full-precision weights: quantization would make the cache depend on
    // the runtime's quantization scheme.
    const model = await AutoModel.from_pretrained(options.modelId, { dtype: "fp32" });
    return new LabelEmbedder(options.modelId, tokenizer, model);
  }

  /** Tokenize a batch with padding; exposed for the inspection tests. */
  encode(labels: readonly string[]): EncodedBatch {
    const encoded = this.tokenizer([...labels], { padding: true, truncation: true });
    return { input_ids: encoded.input_ids, attention_mask: encoded.attention_mask };
  }

  /** Final-layer hidden states for an encoded batch, shape [B, S, N]. */
  async hiddenStates(batch: EncodedBatch): Promise<Tensor> {
    const output = await this.model({ ...batch });
    return output.last_hidden_state;
  }

  /** Mean-pooled vectors for one forward pass over the whole batch. */
  async embedBatch(labels: readonly string[]): Promise<Float64Array[]> {
    if (labels.length === 0) return [];
    const batch = this.encode(labels);
    const hidden = await this.hiddenStates(batch);
    return maskedMean(hidden, batch.attention_mask, labels);
  }

  /** Embed labels in fixed-size batches, preserving input order. */
  async embed(labels: readonly string[], batchSize: number): Promise<Float64Array[]> {
    if (!Number.isInteger(batchSize) || batchSize < 1) {
      throw new RangeError(`batch size must be a positive integer, got ${batchSize}`);
    }
    const out: Float64Array[] = [];
    for (let start = 0; start < labels.length; start += batchSize) {
      out.push(...await this.embedBatch(labels.slice(start, start + batchSize)));
    }
    return out;
  }
}

/** Per-row mean of hidden states over unmasked positions. */
export function maskedMean(
  hidden: Tensor,
  attentionMask: Tensor,
  labels?: readonly string[],
): Float64Array[] {
  const [batch, seq, dim] = hidden.dims as [number, number, number];
  const values = hidden.data as Float32Array;
  const mask = attentionMask.data;
  const out: Float64Array[] = [];
  for (let row = 0; row < batch; row++) {
    const vec = new Float64Array(dim);
    let kept = 0;
    for (let pos = 0; pos < seq; pos++) {
      if (Number(mask[row * seq + pos]) === 0) continue;
      kept += 1;
      const base = (row * seq + pos) * dim;
      for (let k = 0; k < dim; k++) vec[k] = vec[k]! + values[base + k]!;
    }
    if (kept === 0) {
      const which = labels?.[row] !== undefined ? ` ${JSON.stringify(labels[row])}` : "";
      throw new Error(`label${which} tokenized to an empty sequence`);
    }
    for (let k = 0; k < dim; k++) vec[k] = vec[k]! / kept;
    out.push(vec);
  }
  return out;
}
