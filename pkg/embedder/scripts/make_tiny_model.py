"""Build the tiny randomly initialised encoder used by the test suite.

The fixture is a two-layer BERT encoder with a whole-word WordPiece
tokenizer.  The tokenizer deliberately has no post-processor, so no
marker tokens are inserted around the input; a one-word label therefore
produces a one-token sequence, which the pooling tests rely on.

The ONNX graph takes input_ids and attention_mask and returns
last_hidden_state.  Token type ids are fixed to zero inside the graph.

Run from anywhere:

    python3 scripts/make_tiny_model.py
"""

import json
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import BertConfig, BertModel

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "tiny-model"

# Whole words only: anything outside this list tokenizes to [UNK].
WORDS = [
    "accepted",
    "acceptance",
    "alpha",
    "approval",
    "article",
    "comment",
    "decision",
    "document",
    "draft",
    "has",
    "label",
    "manuscript",
    "of",
    "one",
    "paper",
    "review",
    "reviewer",
    "submission",
    "two",
    "type",
]

SEED = 20240817


class Encoder(torch.nn.Module):
    """Wrapper that exposes only the hidden-state output."""

    def __init__(self, inner: BertModel):
        super().__init__()
        self.inner = inner

    def forward(self, input_ids, attention_mask):
        out = self.inner(input_ids=input_ids, attention_mask=attention_mask)
        return out.last_hidden_state


def build_tokenizer(vocab: dict) -> Tokenizer:
    tok = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]", max_input_chars_per_word=100))
    tok.normalizer = normalizers.Lowercase()
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    # No post-processor on purpose: sequences carry label tokens only.
    return tok


def patch_exporter() -> None:
    """Skip the exporter step that inlines onnx-script functions.

    That step needs the optional onnx package but is a no-op for models
    without custom onnx-script ops, which this one has none of.
    """
    from torch.onnx._internal.torchscript_exporter import onnx_proto_utils

    onnx_proto_utils._add_onnxscript_fn = lambda model_bytes, custom_opsets: model_bytes


def main() -> None:
    (OUT / "onnx").mkdir(parents=True, exist_ok=True)

    vocab = {"[PAD]": 0, "[UNK]": 1}
    for word in WORDS:
        vocab[word] = len(vocab)
    build_tokenizer(vocab).save(str(OUT / "tokenizer.json"))

    (OUT / "tokenizer_config.json").write_text(json.dumps({
        "tokenizer_class": "PreTrainedTokenizerFast",
        "pad_token": "[PAD]",
        "unk_token": "[UNK]",
        "model_max_length": 64,
        "clean_up_tokenization_spaces": False,
    }, indent=2) + "\n")
    (OUT / "special_tokens_map.json").write_text(json.dumps({
        "pad_token": "[PAD]",
        "unk_token": "[UNK]",
    }, indent=2) + "\n")

    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        type_vocab_size=2,
        pad_token_id=0,
    )
    torch.manual_seed(SEED)
    model = BertModel(config, add_pooling_layer=False)
    model.eval()
    (OUT / "config.json").write_text(model.config.to_json_string())

    patch_exporter()
    ids = torch.tensor([[2, 3, 4], [5, 6, 0]], dtype=torch.long)
    mask = torch.tensor([[1, 1, 1], [1, 1, 0]], dtype=torch.long)
    torch.onnx.export(
        Encoder(model),
        (ids, mask),
        str(OUT / "onnx" / "model.onnx"),
        input_names=["input_ids", "attention_mask"],
        output_names=["last_hidden_state"],
        dynamic_axes={
            "input_ids": {0: "batch", 1: "sequence"},
            "attention_mask": {0: "batch", 1: "sequence"},
            "last_hidden_state": {0: "batch", 1: "sequence"},
        },
        opset_version=14,
        dynamo=False,
    )
    print(f"wrote fixture to {OUT} (vocab size {len(vocab)})")


if __name__ == "__main__":
    main()
