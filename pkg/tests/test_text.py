import numpy as np
import pytest

from veracity.errors import MalformedEmbedding
from veracity.features import Modality
from veracity.text import (
    EmbeddingMatrix,
    embeddings_to_features,
    parse_embeddings,
    write_embeddings,
)


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    matrix = EmbeddingMatrix(values=rng.standard_normal((5, 768)))
    path = tmp_path / "emb.txt"
    write_embeddings(path, matrix)
    back = parse_embeddings(path)
    assert back.tokens == 5 and back.dim == 768
    assert np.max(np.abs(back.values - matrix.values)) < 1e-7


def test_comments_ignored(tmp_path):
    path = tmp_path / "emb.txt"
    write_embeddings(
        path,
        EmbeddingMatrix(values=np.eye(3)),
        comments=["model: none", "note"],
    )
    text = path.read_text()
    assert text.startswith("# model: none\n# note\n")
    back = parse_embeddings(path)
    assert np.array_equal(back.values, np.eye(3))


def test_header_required(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("1.0 2.0\n")
    with pytest.raises(MalformedEmbedding, match="header"):
        parse_embeddings(path)


def test_header_token_count_enforced(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dim=2 tokens=3\n1 2\n3 4\n")
    with pytest.raises(MalformedEmbedding, match="tokens"):
        parse_embeddings(path)


def test_row_width_enforced(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dim=3 tokens=1\n1 2\n")
    with pytest.raises(MalformedEmbedding, match="expected 3 values"):
        parse_embeddings(path)


def test_non_numeric_rejected(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dim=2 tokens=1\n1 banana\n")
    with pytest.raises(MalformedEmbedding, match="non-numeric"):
        parse_embeddings(path)


def test_non_finite_rejected(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dim=2 tokens=1\n1 nan\n")
    with pytest.raises(MalformedEmbedding, match="non-finite"):
        parse_embeddings(path)


def test_zero_dims_rejected(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dim=0 tokens=1\n\n")
    with pytest.raises(MalformedEmbedding):
        parse_embeddings(path)


def test_feature_conversion_is_relabeling():
    matrix = EmbeddingMatrix(values=np.arange(6.0).reshape(2, 3))
    feats = embeddings_to_features(matrix)
    assert feats.modality is Modality.TEXT
    assert feats.frame_rate == 0.0
    assert np.array_equal(feats.frames, matrix.values)
