"""CoNLL reader/writer and embedding-table loader."""

import numpy as np
import pytest

from casetag.data import read_conll, read_embeddings, write_conll
from casetag.errors import ParseError
from casetag.ner import NerExample


def test_read_two_line_sentence(tmp_path):
    p = tmp_path / "d.conll"
    p.write_text("Alan B-PER\nran O\n\n", encoding="utf-8")
    examples = read_conll(str(p))
    assert len(examples) == 1
    assert examples[0].tokens == ["Alan", "ran"]
    assert examples[0].tags == ["B-PER", "O"]


def test_read_skips_docstart(tmp_path):
    p = tmp_path / "d.conll"
    p.write_text("-DOCSTART- -X- O O\n\nAlan B-PER\n\n", encoding="utf-8")
    examples = read_conll(str(p))
    assert len(examples) == 1 and examples[0].tokens == ["Alan"]


def test_read_takes_first_and_last_columns(tmp_path):
    p = tmp_path / "d.conll"
    p.write_text("Alan NNP I-NP B-PER\nran VBD I-VP O\n\n", encoding="utf-8")
    ex = read_conll(str(p))[0]
    assert ex.tokens == ["Alan", "ran"] and ex.tags == ["B-PER", "O"]


def test_read_missing_tag_column_reports_line(tmp_path):
    p = tmp_path / "d.conll"
    p.write_text("Alan B-PER\nran\n\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        read_conll(str(p))
    assert "line 2" in str(err.value)


def test_roundtrip_three_sentences(tmp_path):
    examples = [
        NerExample(["Alan", "ran", "."], ["B-PER", "O", "O"]),
        NerExample(["to", "Boston"], ["O", "B-LOC"]),
        NerExample(["done"], ["O"]),
    ]
    p = tmp_path / "d.conll"
    write_conll(examples, str(p))
    again = read_conll(str(p))
    assert len(again) == 3
    assert [ex.tokens for ex in again] == [ex.tokens for ex in examples]
    assert [ex.tags for ex in again] == [ex.tags for ex in examples]
    # a second write is byte-identical
    p2 = tmp_path / "d2.conll"
    write_conll(again, str(p2))
    assert p.read_bytes() == p2.read_bytes()


def _embedding_file(tmp_path, lines):
    p = tmp_path / "emb.txt"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(p)


def test_embeddings_two_words(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3", "dog 4 5 6"])
    table = read_embeddings(path, dim=3)
    assert len(table.words) == 2
    assert np.allclose(table.lookup("cat").data, [1, 2, 3])


def test_embeddings_unseen_word_gets_unk(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3", "dog 4 5 6"])
    table = read_embeddings(path, dim=3)
    assert np.allclose(table.lookup("zebra").data, table.unk.data)


def test_embeddings_unk_is_mean(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3", "dog 4 5 6", "eel -2 0 9"])
    table = read_embeddings(path, dim=3)
    want = np.array([[1, 2, 3], [4, 5, 6], [-2, 0, 9]], dtype=float).mean(axis=0)
    assert np.allclose(table.unk.data, want, atol=1e-9)


def test_embeddings_duplicates_first_wins(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3", "cat 9 9 9"])
    table = read_embeddings(path, dim=3)
    assert np.allclose(table.lookup("cat").data, [1, 2, 3])
    assert table.duplicates_skipped == 1


def test_embeddings_wrong_count_reports_line(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3", "dog 4 5"])
    with pytest.raises(ParseError) as err:
        read_embeddings(path, dim=3)
    assert "line 2" in str(err.value)


def test_embeddings_lookup_lowercases_key(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3"])
    table = read_embeddings(path, dim=3)
    assert np.allclose(table.lookup("CAT").data, [1, 2, 3])


def test_loaded_embeddings_frozen_unk_trainable(tmp_path):
    path = _embedding_file(tmp_path, ["cat 1 2 3"])
    table = read_embeddings(path, dim=3)
    assert not table.vectors.requires_grad
    assert table.unk.requires_grad
    names = [n for n, _ in table.named_params()]
    assert names == ["unk"]
