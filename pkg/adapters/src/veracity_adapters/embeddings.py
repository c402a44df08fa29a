"""Token-level contextual embeddings from transcripts.

The ``bert`` backend runs a pretrained bert-base encoder in deterministic
eval mode and exports last-layer hidden states per word piece (special
tokens dropped). It is selected automatically when the transformers stack
and model weights are present; point ADAPTERS_BERT_MODEL at a local model
directory for fully offline use. The ``hashed`` backend is the offline
stand-in: each token maps to a fixed seeded random vector, mixed with its
neighbors so embeddings remain context-dependent, same file contract and
dimensionality. Every output names its encoder in a comment line that
downstream parsers skip.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AdapterError, EmptyTranscript

TOOL_VERSION = "veracity-adapters/0.1.0"
EMBED_DIM = 768
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

# Neighbor mixing weights for the hashed backend: keep most of the token
# identity, add enough context that repeated words differ by position.
_SELF_W = 0.8
_NEIGHBOR_W = 0.2


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class HashedBackend:
    """Deterministic seeded-hash encoder, no model weights required."""

    name = "hashed-v1"
    layer = "n/a"

    def encode(self, tokens: list[str]) -> np.ndarray:
        base = np.stack([self._token_vector(t) for t in tokens])
        out = base.copy()
        for i in range(len(tokens)):
            neighbors = [base[j] for j in (i - 1, i + 1) if 0 <= j < len(tokens)]
            if neighbors:
                out[i] = _SELF_W * base[i] + _NEIGHBOR_W * np.mean(neighbors, axis=0)
        return out

    @staticmethod
    def _token_vector(token: str) -> np.ndarray:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        return rng.standard_normal(EMBED_DIM) / np.sqrt(EMBED_DIM)


class BertBackend:
    """Pretrained bert-base encoder, last hidden layer, one row per word piece."""

    ENV_VAR = "ADAPTERS_BERT_MODEL"
    DEFAULT_MODEL = "bert-base-uncased"
    layer = "last"

    def __init__(self) -> None:
        import torch
        from transformers import AutoModel, AutoTokenizer

        model_id = os.environ.get(self.ENV_VAR, self.DEFAULT_MODEL)
        local_only = bool(os.environ.get(self.ENV_VAR))
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_id, local_files_only=local_only)
        self._model = AutoModel.from_pretrained(model_id, local_files_only=local_only)
        self._model.eval()
        self.name = f"{Path(model_id).name}"

    @staticmethod
    def available() -> bool:
        try:
            import torch  # noqa: F401
            import transformers  # noqa: F401
        except ImportError:
            return False
        return bool(os.environ.get(BertBackend.ENV_VAR))

    def encode(self, tokens: list[str]) -> np.ndarray:
        enc = self._tokenizer(" ".join(tokens), return_tensors="pt")
        with self._torch.no_grad():
            hidden = self._model(**enc).last_hidden_state[0]
        special = self._tokenizer.get_special_tokens_mask(
            enc["input_ids"][0].tolist(), already_has_special_tokens=True
        )
        keep = [i for i, s in enumerate(special) if not s]
        return hidden[keep].numpy().astype(np.float64)


def get_backend(name: str = "auto"):
    if name == "auto":
        return BertBackend() if BertBackend.available() else HashedBackend()
    if name == "hashed":
        return HashedBackend()
    if name == "bert":
        return BertBackend()
    raise AdapterError(f"unknown embedding backend {name!r}")


@dataclass(frozen=True)
class EmbeddingEmitResult:
    out: Path
    backend: str
    tokens: int
    dim: int


def emit_embeddings(
    transcript: str | Path, out: str | Path, backend: str = "auto"
) -> EmbeddingEmitResult:
    """Encode a UTF-8 transcript into a token-embedding file.

    Header line gives dim and token count; the encoder identity and layer
    choice are recorded in leading comment lines.
    """
    text = Path(transcript).read_text(encoding="utf-8")
    tokens = tokenize(text)
    if not tokens:
        raise EmptyTranscript(f"{transcript}: no tokens")
    enc = get_backend(backend)
    vectors = enc.encode(tokens)
    out = Path(out)
    lines = [
        f"# tool={TOOL_VERSION} encoder={enc.name} layer={enc.layer} pooling=none",
        f"dim={vectors.shape[1]} tokens={vectors.shape[0]}",
    ]
    lines += [" ".join(f"{v:.6g}" for v in row) for row in vectors]
    out.write_text("\n".join(lines) + "\n")
    return EmbeddingEmitResult(
        out=out, backend=enc.name, tokens=vectors.shape[0], dim=vectors.shape[1]
    )
