"""Readers for annotated corpora (CoNLL-U) and the lexical resources used
downstream: valence norms, word-emotion associations, stopwords and free
associations."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

EMOTIONS = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

POSITIVE = "Positive"
NEUTRAL = "Neutral"
NEGATIVE = "Negative"

PERSON_LEMMA = "s/he"
_DEFAULT_PERSON_LEMMAS = frozenset({"he", "she"})


class IngestError(ValueError):
    """Raised for malformed or inconsistent input files."""


class ConlluParseError(IngestError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class TreeValidationError(IngestError):
    def __init__(self, sentence_index: int, message: str, doc_id: str | None = None):
        self.sentence_index = sentence_index
        self.doc_id = doc_id
        where = f"sentence {sentence_index}"
        if doc_id is not None:
            where += f" (document {doc_id})"
        super().__init__(f"{where}: {message}")


class EmptyCorpusError(IngestError):
    pass


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    upos: str
    deprel: str
    head: int


Sentence = tuple[AnnotatedToken, ...]
Document = tuple[Sentence, ...]


@dataclass(frozen=True)
class AnnotatedCorpus:
    documents: tuple[Document, ...]
    doc_ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.documents) != len(self.doc_ids):
            raise ValueError("documents and doc_ids differ in length")

    def sentences(self) -> Iterable[tuple[str, int, Sentence]]:
        """Yield ``(doc_id, sentence_index, sentence)`` in corpus order."""
        for doc_id, doc in zip(self.doc_ids, self.documents):
            for k, sent in enumerate(doc):
                yield doc_id, k, sent

    @property
    def n_sentences(self) -> int:
        return sum(len(d) for d in self.documents)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for d in self.documents for s in d)


@dataclass(frozen=True)
class AffectLexicons:
    valence: dict[str, str]
    emotions: dict[str, frozenset[str]]
    stopwords: frozenset[str] = frozenset()
    # every lemma listed in the emotion file, including rows with all flags 0
    emotion_vocabulary: frozenset[str] = frozenset()

    def valence_of(self, lemma: str) -> str:
        return self.valence.get(lemma, NEUTRAL)


@dataclass(frozen=True)
class FreeAssociationData:
    pairs: tuple[tuple[str, str, int], ...]
    dropped_self_pairs: int = 0


def validate_tree(tokens: Sequence[AnnotatedToken], sentence_index: int, doc_id=None) -> None:
    """Check that head indices form a single-rooted tree."""
    n = len(tokens)
    roots = 0
    for k, tok in enumerate(tokens, start=1):
        if tok.head < 0 or tok.head > n:
            raise TreeValidationError(
                sentence_index, f"token {k} has head {tok.head} outside 0..{n}", doc_id
            )
        if tok.head == k:
            raise TreeValidationError(sentence_index, f"token {k} is its own head", doc_id)
        if tok.head == 0:
            roots += 1
    if roots != 1:
        raise TreeValidationError(sentence_index, f"expected 1 root, found {roots}", doc_id)
    for k in range(1, n + 1):
        seen = set()
        cur = k
        while cur != 0:
            if cur in seen:
                raise TreeValidationError(sentence_index, f"cycle through token {k}", doc_id)
            seen.add(cur)
            cur = tokens[cur - 1].head


def read_conllu(
    path,
    doc_key: str = "newdoc",
    one_doc_per_file: bool = False,
) -> AnnotatedCorpus:
    """Read a CoNLL-U file.

    Documents are delimited by ``# newdoc`` comments (or ``# <doc_key>``).
    Sentences appearing before the first marker go to an implicit first
    document. With ``one_doc_per_file`` all markers are ignored and the file
    is a single document named after its stem. Multiword-token ranges and
    empty nodes are skipped.
    """
    path = Path(path)
    documents: list[list[Sentence]] = []
    doc_ids: list[str] = []
    current: list[AnnotatedToken] = []
    pending_doc: str | None = None
    sent_counter = 0

    def new_document(name: str | None):
        doc_ids.append(name if name else f"{path.stem}#{len(doc_ids) + 1}")
        documents.append([])

    def flush_sentence():
        nonlocal sent_counter, pending_doc
        if not current:
            return
        if pending_doc is not None or not documents:
            new_document(pending_doc)
            pending_doc = None
        sent_counter += 1
        validate_tree(current, sent_counter, doc_ids[-1])
        documents[-1].append(tuple(current))
        current.clear()

    if one_doc_per_file:
        new_document(path.stem)

    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                flush_sentence()
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key = body.split("=", 1)[0].split()
                if key and key[0] == doc_key and not one_doc_per_file:
                    flush_sentence()
                    value = body.split("=", 1)[1].strip() if "=" in body else ""
                    pending_doc = value or f"{path.stem}#{len(doc_ids) + 1}"
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ConlluParseError(path, lineno, f"expected 10 columns, got {len(cols)}")
            tid = cols[0]
            if "-" in tid or "." in tid:
                continue
            try:
                index = int(tid)
            except ValueError:
                raise ConlluParseError(path, lineno, f"bad token id {tid!r}") from None
            if index != len(current) + 1:
                raise ConlluParseError(
                    path, lineno, f"token id {index} out of sequence (expected {len(current) + 1})"
                )
            try:
                head = int(cols[6])
            except ValueError:
                raise ConlluParseError(path, lineno, f"bad head {cols[6]!r}") from None
            lemma = cols[2] if cols[2] != "_" else cols[1]
            current.append(
                AnnotatedToken(surface=cols[1], lemma=lemma, upos=cols[3], deprel=cols[7], head=head)
            )
    flush_sentence()

    documents_t = tuple(tuple(d) for d in documents if d)
    ids_t = tuple(i for i, d in zip(doc_ids, documents) if d)
    if not documents_t:
        raise EmptyCorpusError(f"{path}: no sentences found")
    return AnnotatedCorpus(documents=documents_t, doc_ids=ids_t)


def write_conllu(corpus: AnnotatedCorpus, path, doc_key: str = "newdoc") -> None:
    with open(path, "w", encoding="utf-8") as f:
        for doc_id, doc in zip(corpus.doc_ids, corpus.documents):
            f.write(f"# {doc_key} id = {doc_id}\n")
            for sent in doc:
                for k, tok in enumerate(sent, start=1):
                    cols = [str(k), tok.surface, tok.lemma, tok.upos, "_", "_",
                            str(tok.head), tok.deprel, "_", "_"]
                    f.write("\t".join(cols) + "\n")
                f.write("\n")


def normalize_lemma(lemma: str, person_placeholders: Iterable[str] = ()) -> str:
    low = lemma.lower()
    placeholders = _DEFAULT_PERSON_LEMMAS | {p.lower() for p in person_placeholders}
    return PERSON_LEMMA if low in placeholders else low


def normalize_lemmas(corpus: AnnotatedCorpus, person_placeholders: Iterable[str] = ()) -> AnnotatedCorpus:
    """Lowercase every lemma and merge person references into ``s/he``.

    ``he``, ``she`` and every lemma in ``person_placeholders`` (the generic
    names used when a corpus was anonymized) map to the same lemma.
    """
    placeholders = _DEFAULT_PERSON_LEMMAS | {p.lower() for p in person_placeholders}

    def fix(tok: AnnotatedToken) -> AnnotatedToken:
        low = tok.lemma.lower()
        new = PERSON_LEMMA if low in placeholders else low
        return tok if new == tok.lemma else replace(tok, lemma=new)

    docs = tuple(tuple(tuple(fix(t) for t in s) for s in d) for d in corpus.documents)
    return AnnotatedCorpus(documents=docs, doc_ids=corpus.doc_ids)


def quartile_polarity(scores: dict[str, float]) -> dict[str, str]:
    """Label scores Negative below the first quartile, Positive above the
    third, Neutral otherwise. Scores exactly on a boundary stay Neutral."""
    if not scores:
        return {}
    values = np.fromiter(scores.values(), dtype=float)
    q1, q3 = np.quantile(values, [0.25, 0.75])
    out = {}
    for lemma, s in scores.items():
        if s < q1:
            out[lemma] = NEGATIVE
        elif s > q3:
            out[lemma] = POSITIVE
        else:
            out[lemma] = NEUTRAL
    return out


def _rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE), start=1):
            if not row or not any(c.strip() for c in row):
                continue
            if row[0].startswith("#"):
                continue
            yield lineno, [c.strip() for c in row]


def read_valence(path) -> dict[str, float]:
    scores: dict[str, float] = {}
    for lineno, row in _rows(path):
        if len(row) < 2:
            raise IngestError(f"{path}:{lineno}: expected lemma<TAB>score")
        try:
            score = float(row[1])
        except ValueError:
            if lineno == 1 and not scores:
                continue  # header row
            raise IngestError(f"{path}:{lineno}: non-numeric valence score {row[1]!r}") from None
        if not math.isfinite(score):
            raise IngestError(f"{path}:{lineno}: non-finite valence score {row[1]!r}")
        scores[row[0].lower()] = score
    return scores


def read_emotions(path) -> tuple[dict[str, frozenset[str]], frozenset[str]]:
    found: dict[str, set[str]] = {}
    for lineno, row in _rows(path):
        if len(row) < 3:
            raise IngestError(f"{path}:{lineno}: expected lemma<TAB>emotion<TAB>flag")
        lemma, emotion, flag = row[0].lower(), row[1].lower(), row[2]
        if flag not in ("0", "1"):
            if lineno == 1 and not found:
                continue  # header row
            raise IngestError(f"{path}:{lineno}: flag must be 0 or 1, got {flag!r}")
        # NRC files also carry positive/negative sentiment rows; only the
        # eight emotions are kept
        if emotion in ("positive", "negative"):
            found.setdefault(lemma, set())
            continue
        if emotion not in EMOTIONS:
            raise IngestError(f"{path}:{lineno}: unknown emotion {emotion!r}")
        entry = found.setdefault(lemma, set())
        if flag == "1":
            entry.add(emotion)
    emotions = {k: frozenset(v) for k, v in found.items() if v}
    return emotions, frozenset(found)


def read_stopwords(path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            w = line.strip()
            if w and not w.startswith("#"):
                words.add(w.lower())
    return frozenset(words)


def load_lexicons(valence_path, emotion_path, stopword_path=None) -> AffectLexicons:
    valence = quartile_polarity(read_valence(valence_path))
    emotions, vocab = read_emotions(emotion_path)
    stopwords = read_stopwords(stopword_path) if stopword_path else frozenset()
    return AffectLexicons(valence=valence, emotions=emotions, stopwords=stopwords,
                          emotion_vocabulary=vocab)


def load_free_associations(path, person_placeholders: Iterable[str] = ()) -> FreeAssociationData:
    """Read ``cue<TAB>response[<TAB>count]`` rows; self-pairs are dropped."""
    pairs = []
    dropped = 0
    seen_rows = 0
    for lineno, row in _rows(path):
        if len(row) < 2:
            raise IngestError(f"{path}:{lineno}: expected cue<TAB>response")
        count = 1
        if len(row) >= 3 and row[2]:
            try:
                count = int(row[2])
            except ValueError:
                if lineno == 1 and seen_rows == 0:
                    continue  # header row
                raise IngestError(f"{path}:{lineno}: non-integer count {row[2]!r}") from None
            if count < 1:
                continue
        seen_rows += 1
        cue = normalize_lemma(row[0], person_placeholders)
        resp = normalize_lemma(row[1], person_placeholders)
        if not cue or not resp:
            continue
        if cue == resp:
            dropped += 1
            continue
        pairs.append((cue, resp, count))
    if seen_rows == 0:
        raise IngestError(f"{path}: no free-association rows")
    return FreeAssociationData(pairs=tuple(pairs), dropped_self_pairs=dropped)
