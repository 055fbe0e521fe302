import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cognet.ingest import (
    EMOTIONS,
    NEGATIVE,
    NEUTRAL,
    POSITIVE,
    AnnotatedCorpus,
    AnnotatedToken,
    ConlluParseError,
    EmptyCorpusError,
    IngestError,
    TreeValidationError,
    load_free_associations,
    load_lexicons,
    normalize_lemma,
    normalize_lemmas,
    quartile_polarity,
    read_conllu,
    read_emotions,
    read_valence,
    validate_tree,
    write_conllu,
)
from cognet.synthetic import make_corpus

from conftest import FIXTURES


def _row(i, form, lemma, upos, head, deprel):
    return "\t".join([str(i), form, lemma, upos, "_", "_", str(head), deprel, "_", "_"])


def test_fixture_sentence_tokens():
    corpus = read_conllu(FIXTURES / "he_was_looking.conllu")
    assert corpus.doc_ids == ("si_example",)
    assert corpus.n_sentences == 1
    # ten words plus the comma and the final period
    assert corpus.n_tokens == 12
    sent = corpus.documents[0][0]
    assert [t.lemma for t in sent][:3] == ["he", "be", "look"]


def test_documents_split_on_newdoc(tmp_path):
    text = "\n".join([
        "# newdoc id = a",
        _row(1, "I", "I", "PRON", 2, "nsubj"), _row(2, "cry", "cry", "VERB", 0, "ROOT"), "",
        _row(1, "Go", "go", "VERB", 0, "ROOT"), "",
        "# newdoc id = b",
        _row(1, "Bye", "bye", "INTJ", 0, "ROOT"), "",
    ])
    path = tmp_path / "x.conllu"
    path.write_text(text)
    corpus = read_conllu(path)
    assert corpus.doc_ids == ("a", "b")
    assert [len(d) for d in corpus.documents] == [2, 1]

    single = read_conllu(path, one_doc_per_file=True)
    assert single.doc_ids == ("x",)
    assert single.n_sentences == 3


def test_multiword_and_empty_nodes_skipped(tmp_path):
    text = "\n".join([
        "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_",
        _row(1, "do", "do", "AUX", 3, "aux"), _row(2, "n't", "not", "PART", 3, "neg"),
        _row(3, "go", "go", "VERB", 0, "ROOT"),
        "3.1\tx\tx\tX\t_\t_\t_\t_\t_\t_", "",
    ])
    path = tmp_path / "mw.conllu"
    path.write_text(text)
    sent = read_conllu(path).documents[0][0]
    assert [t.surface for t in sent] == ["do", "n't", "go"]


def test_underscore_lemma_falls_back_to_surface(tmp_path):
    path = tmp_path / "u.conllu"
    path.write_text(_row(1, "Hello", "_", "INTJ", 0, "ROOT") + "\n\n")
    assert read_conllu(path).documents[0][0][0].lemma == "Hello"


def test_parse_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.conllu"
    path.write_text(_row(1, "a", "a", "X", 0, "ROOT") + "\n1\tb\tb\n\n")
    with pytest.raises(ConlluParseError) as err:
        read_conllu(path)
    assert err.value.lineno == 2

    path.write_text(_row(1, "a", "a", "X", 0, "ROOT") + "\n" + _row(3, "b", "b", "X", 1, "dep") + "\n\n")
    with pytest.raises(ConlluParseError):
        read_conllu(path)


def test_tree_validation(tmp_path):
    path = tmp_path / "cycle.conllu"
    path.write_text("\n".join([_row(1, "a", "a", "X", 2, "dep"), _row(2, "b", "b", "X", 1, "dep"),
                               _row(3, "c", "c", "X", 0, "ROOT"), "", ""]))
    with pytest.raises(TreeValidationError) as err:
        read_conllu(path)
    assert err.value.sentence_index == 1

    two_roots = [AnnotatedToken("a", "a", "X", "ROOT", 0), AnnotatedToken("b", "b", "X", "ROOT", 0)]
    with pytest.raises(TreeValidationError):
        validate_tree(two_roots, 1)
    with pytest.raises(TreeValidationError):
        validate_tree([AnnotatedToken("a", "a", "X", "ROOT", 5)], 1)


def test_empty_corpus(tmp_path):
    path = tmp_path / "empty.conllu"
    path.write_text("# just a comment\n\n")
    with pytest.raises(EmptyCorpusError):
        read_conllu(path)


def test_conllu_round_trip(tmp_path):
    corpus = make_corpus(n_docs=4, seed=3)
    path = tmp_path / "rt.conllu"
    write_conllu(corpus, path)
    assert read_conllu(path) == corpus


def test_person_lemmas_merge():
    assert normalize_lemma("He") == "s/he"
    assert normalize_lemma("she") == "s/he"
    assert normalize_lemma("Jane", ["jane"]) == "s/he"
    assert normalize_lemma("Tree") == "tree"
    corpus = AnnotatedCorpus(
        documents=(((AnnotatedToken("She", "she", "PRON", "nsubj", 2),
                     AnnotatedToken("left", "leave", "VERB", "ROOT", 0)),),),
        doc_ids=("d",))
    assert [t.lemma for t in normalize_lemmas(corpus).documents[0][0]] == ["s/he", "leave"]


def test_quartiles_against_statistics_module():
    scores = {f"w{i:03d}": float(i) for i in range(1, 101)}
    q1, _, q3 = statistics.quantiles(scores.values(), n=4, method="inclusive")
    assert (q1, q3) == (25.75, 75.25)
    pol = quartile_polarity(scores)
    assert sum(v == NEGATIVE for v in pol.values()) == 25
    assert sum(v == POSITIVE for v in pol.values()) == 25
    assert pol["w025"] == NEGATIVE and pol["w026"] == NEUTRAL
    assert pol["w075"] == NEUTRAL and pol["w076"] == POSITIVE


def test_quartile_boundary_ties():
    pol = quartile_polarity({"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0, "e": 5.0})
    # Q1 = Q3 = 1, so the tied block sits on both boundaries
    assert pol == {"a": NEUTRAL, "b": NEUTRAL, "c": NEUTRAL, "d": NEUTRAL, "e": POSITIVE}


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=60))
def test_quartile_polarity_properties(values):
    scores = {f"w{i}": v for i, v in enumerate(values)}
    pol = quartile_polarity(scores)
    if len(values) > 1:
        q1, _, q3 = statistics.quantiles(values, n=4, method="inclusive")
    else:
        q1 = q3 = values[0]
    for k, v in scores.items():
        expect = NEGATIVE if v < q1 - 1e-9 else POSITIVE if v > q3 + 1e-9 else None
        if expect is not None:
            assert pol[k] == expect
    neg = [scores[k] for k, p in pol.items() if p == NEGATIVE]
    pos = [scores[k] for k, p in pol.items() if p == POSITIVE]
    if neg and pos:
        assert max(neg) < min(pos)


def test_valence_reader(tmp_path):
    path = tmp_path / "v.tsv"
    path.write_text("Word\tV.Mean.Sum\nLove\t8.0\nhate\t2.1\n")
    assert read_valence(path) == {"love": 8.0, "hate": 2.1}
    path.write_text("love\t8\nhate\tbad\n")
    with pytest.raises(IngestError, match=":2:"):
        read_valence(path)


def test_emotion_reader(tmp_path):
    path = tmp_path / "e.tsv"
    rows = ["abandon\tfear\t1", "abandon\tsadness\t1", "abandon\tjoy\t0", "abandon\tnegative\t1",
            "zero\tanger\t0", "zero\tpositive\t1"]
    path.write_text("\n".join(rows) + "\n")
    emotions, vocab = read_emotions(path)
    assert emotions == {"abandon": frozenset({"fear", "sadness"})}
    assert vocab == {"abandon", "zero"}
    path.write_text("x\tboredom\t1\n")
    with pytest.raises(IngestError, match="unknown emotion"):
        read_emotions(path)
    assert len(EMOTIONS) == 8


def test_load_lexicons(tmp_path):
    (tmp_path / "v.tsv").write_text("".join(f"w{i}\t{i}\n" for i in range(1, 9)))
    (tmp_path / "e.tsv").write_text("w1\tjoy\t1\n")
    (tmp_path / "s.txt").write_text("The\n# comment\nand\n")
    lex = load_lexicons(tmp_path / "v.tsv", tmp_path / "e.tsv", tmp_path / "s.txt")
    assert lex.stopwords == {"the", "and"}
    assert lex.valence_of("w1") == NEGATIVE
    assert lex.valence_of("w8") == POSITIVE
    assert lex.valence_of("unknown") == NEUTRAL


def test_free_associations(tmp_path):
    path = tmp_path / "fa.tsv"
    path.write_text("cue\tresponse\tcount\nDog\tcat\t3\nhe\tshe\t2\nsun\tmoon\n")
    fa = load_free_associations(path)
    assert ("dog", "cat", 3) in fa.pairs
    assert ("sun", "moon", 1) in fa.pairs
    assert fa.dropped_self_pairs == 1
    path.write_text("")
    with pytest.raises(IngestError):
        load_free_associations(path)
