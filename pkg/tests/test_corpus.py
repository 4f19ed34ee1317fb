import numpy as np
import pytest

from intentcluster.corpus import (
    CorpusFormatError,
    Document,
    EmbeddingFormatError,
    load_corpus,
    load_embeddings,
    parse_corpus_text,
    save_corpus,
    save_embeddings,
    tokenize,
)


class TestTokenize:
    def test_basic(self):
        assert tokenize("World Cup final!") == ["world", "cup", "final"]

    def test_empty(self):
        assert tokenize("") == []

    def test_numeric_and_punct(self):
        # mirrors score-style text: "W L 1-0" splits on the hyphen
        assert tokenize("W L 1-0") == ["w", "l", "1", "0"]

    def test_underscore_is_punctuation(self):
        assert tokenize("a_b") == ["a", "b"]

    def test_idempotent_on_joined_output(self):
        for text in ["Hello, World!", "a-b c_d 1.5", "", "  spaces  ", "MiXeD CaSe 42"]:
            toks = tokenize(text)
            assert tokenize(" ".join(toks)) == toks


class TestCorpusFile:
    def test_round_trip(self, tmp_path):
        docs = [
            Document.make("a", "first doc"),
            Document.make("b", "second doc!", label="x"),
            Document.make("c", ""),
        ]
        path = tmp_path / "corpus.jsonl"
        save_corpus(docs, path)
        loaded = load_corpus(path)
        assert loaded == docs

    def test_order_preserved(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "one"}\n{"id": "b", "text": "two"}\n')
        docs = load_corpus(path)
        assert [d.id for d in docs] == ["a", "b"]
        assert docs[0].tokens == ["one"]

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "one"}\n{"id": "a", "text": "two"}\n')
        with pytest.raises(CorpusFormatError, match="'a'"):
            load_corpus(path)

    def test_missing_text_names_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "one"}\n{"id": "b"}\n')
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_corpus(path)

    def test_invalid_json_names_line(self):
        with pytest.raises(CorpusFormatError, match="line 1"):
            parse_corpus_text("not json")

    def test_blank_lines_skipped(self):
        docs = parse_corpus_text('{"id": "a", "text": "x"}\n\n{"id": "b", "text": "y"}\n')
        assert len(docs) == 2

    def test_tokens_recomputed_on_load(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "Some TEXT here"}\n')
        (doc,) = load_corpus(path)
        assert doc.tokens == tokenize(doc.text)


class TestEmbeddingFile:
    def test_round_trip_zeros(self, tmp_path):
        m = np.zeros((2, 3), dtype=np.float32)
        path = tmp_path / "m.emb"
        save_embeddings(m, path)
        assert np.array_equal(load_embeddings(path), m)

    def test_round_trip_empty(self, tmp_path):
        m = np.zeros((0, 4), dtype=np.float32)
        path = tmp_path / "m.emb"
        save_embeddings(m, path)
        out = load_embeddings(path)
        assert out.shape == (0, 4)

    def test_round_trip_random_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        for trial in range(20):
            m = rng.normal(size=(100, 16)).astype(np.float32)
            path = tmp_path / f"m{trial}.emb"
            save_embeddings(m, path)
            out = load_embeddings(path)
            assert out.dtype == np.float32
            assert np.array_equal(out.view(np.uint32), m.view(np.uint32))  # bit-exact

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.emb"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(EmbeddingFormatError, match="magic"):
            load_embeddings(path)

    def test_truncated(self, tmp_path):
        m = np.ones((4, 4), dtype=np.float32)
        path = tmp_path / "m.emb"
        save_embeddings(m, path)
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(EmbeddingFormatError, match="truncated"):
            load_embeddings(path)

    def test_non_finite_rejected(self, tmp_path):
        m = np.array([[np.nan, 1.0]], dtype=np.float32)
        with pytest.raises(ValueError, match="NaN"):
            save_embeddings(m, tmp_path / "m.emb")

    def test_layout_is_little_endian_row_major(self, tmp_path):
        m = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.float32)
        path = tmp_path / "m.emb"
        save_embeddings(m, path)
        raw = path.read_bytes()
        assert raw[:4] == b"EMB1"
        assert int.from_bytes(raw[4:8], "little") == 2
        assert int.from_bytes(raw[8:12], "little") == 2
        assert np.frombuffer(raw[12:], "<f4").tolist() == [1.0, 2.0, 3.0, 4.0]
