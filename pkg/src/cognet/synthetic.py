"""Deterministic synthetic corpus and lexicons for demos and tests.

Sentences come from a handful of dependency templates labelled the way
spaCy's English models label them, so every construct the SVO extractor
handles (prepositional objects, relative clauses, negation, clausal
complements) occurs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ingest import EMOTIONS, AnnotatedCorpus, AnnotatedToken, write_conllu

SUBJECTS = [("I", "I", "PRON"), ("you", "you", "PRON"), ("he", "he", "PRON"), ("she", "she", "PRON"),
            ("we", "we", "PRON"), ("they", "they", "PRON"), ("Jane", "Jane", "PROPN"),
            ("William", "William", "PROPN")]
VERBS = ["love", "miss", "want", "take", "give", "tell", "know", "need", "hate", "hope", "lose",
         "find", "see", "leave", "help", "forgive", "remember", "feel"]
NOUNS = ["life", "love", "family", "friend", "time", "day", "money", "pain", "home", "world", "heart",
         "child", "mother", "job", "future", "death", "sorrow", "peace", "joy", "night", "letter",
         "fault", "debt", "dream", "god", "wife", "husband", "father", "hope", "burden"]
ADJS = ["kind", "long", "dark", "happy", "sad", "tired", "alone", "sorry", "good", "bad", "empty",
        "beautiful", "lost", "free"]
ADVS = ["very", "so", "really", "too", "always", "never"]
ADPS = ["for", "with", "about", "without", "in"]
DETS = ["the", "my", "a", "your", "this"]
RELS = ["who", "which", "that"]

STOPWORDS = ["the", "a", "my", "your", "this", "to", "do", "be", "and", "of", "that", "which", "who"]

PERSON_PLACEHOLDERS = ["jane", "william"]

NEGATIVE_WORDS = {"pain", "death", "sorrow", "hate", "lose", "dark", "sad", "tired", "alone", "sorry",
                  "bad", "empty", "lost", "debt", "burden", "fault", "night", "leave", "miss"}
POSITIVE_WORDS = {"love", "joy", "peace", "happy", "good", "kind", "beautiful", "free", "hope", "friend",
                  "help", "forgive", "home", "dream", "family", "god"}


def _zipf_pick(rng, items, s=1.1):
    w = 1.0 / np.arange(1, len(items) + 1) ** s
    return items[rng.choice(len(items), p=w / w.sum())]


def _tok(surface, lemma, upos, head, deprel):
    return AnnotatedToken(surface=surface, lemma=lemma, upos=upos, deprel=deprel, head=head)


def _sentence(rng) -> tuple[AnnotatedToken, ...]:
    s_surface, s_lemma, s_upos = _zipf_pick(rng, SUBJECTS, 0.9)
    verb = _zipf_pick(rng, VERBS)
    noun = _zipf_pick(rng, NOUNS)
    det = DETS[rng.integers(len(DETS))]
    kind = rng.integers(6)
    if kind == 0:
        toks = [_tok(s_surface, s_lemma, s_upos, 2, "nsubj"), _tok(verb, verb, "VERB", 0, "ROOT"),
                _tok(det, det, "DET", 4, "det"), _tok(noun, noun, "NOUN", 2, "dobj")]
    elif kind == 1:
        adp = _zipf_pick(rng, ADPS)
        toks = [_tok(s_surface, s_lemma, s_upos, 2, "nsubj"), _tok(verb, verb, "VERB", 0, "ROOT"),
                _tok(adp, adp, "ADP", 2, "prep"), _tok(det, det, "DET", 5, "det"),
                _tok(noun, noun, "NOUN", 3, "pobj")]
    elif kind == 2:
        adv, adj = _zipf_pick(rng, ADVS), _zipf_pick(rng, ADJS)
        toks = [_tok(det, det, "DET", 2, "det"), _tok(noun, noun, "NOUN", 3, "nsubj"),
                _tok("seem", "seem", "VERB", 0, "ROOT"), _tok(adv, adv, "ADV", 5, "advmod"),
                _tok(adj, adj, "ADJ", 3, "acomp")]
    elif kind == 3:
        verb2 = _zipf_pick(rng, VERBS)
        toks = [_tok(s_surface, s_lemma, s_upos, 2, "nsubj"), _tok("want", "want", "VERB", 0, "ROOT"),
                _tok("to", "to", "PART", 4, "aux"), _tok(verb2, verb2, "VERB", 2, "xcomp"),
                _tok(det, det, "DET", 6, "det"), _tok(noun, noun, "NOUN", 4, "dobj")]
    elif kind == 4:
        rel = RELS[rng.integers(len(RELS))]
        adj = _zipf_pick(rng, ADJS)
        toks = [_tok(s_surface, s_lemma, s_upos, 2, "nsubj"), _tok(verb, verb, "VERB", 0, "ROOT"),
                _tok(det, det, "DET", 4, "det"), _tok(noun, noun, "NOUN", 2, "dobj"),
                _tok(",", ",", "PUNCT", 4, "punct"), _tok(rel, rel, "PRON", 7, "nsubj"),
                _tok("was", "be", "AUX", 4, "relcl"), _tok(adj, adj, "ADJ", 7, "acomp")]
    else:
        toks = [_tok(s_surface, s_lemma, s_upos, 4, "nsubj"), _tok("do", "do", "AUX", 4, "aux"),
                _tok("not", "not", "PART", 4, "neg"), _tok(verb, verb, "VERB", 0, "ROOT"),
                _tok(noun, noun, "NOUN", 4, "dobj")]
    root = next(k for k, t in enumerate(toks, start=1) if t.head == 0)
    toks.append(_tok(".", ".", "PUNCT", root, "punct"))
    return tuple(toks)


def make_corpus(n_docs: int = 20, seed: int = 7, sentences=(5, 9)) -> AnnotatedCorpus:
    rng = np.random.default_rng(seed)
    docs, ids = [], []
    for d in range(n_docs):
        n = int(rng.integers(sentences[0], sentences[1] + 1))
        docs.append(tuple(_sentence(rng) for _ in range(n)))
        ids.append(f"note{d + 1:03d}")
    return AnnotatedCorpus(documents=tuple(docs), doc_ids=tuple(ids))


def _content_vocab() -> list[str]:
    words = {w for w in VERBS + NOUNS + ADJS + ADVS + ADPS} | {"i", "you", "s/he", "we", "they", "seem", "not"}
    return sorted(words)


def filler_vocab(n: int = 400) -> list[str]:
    return [f"filler{k:04d}" for k in range(n)]


def write_lexicons(directory, seed: int = 7, n_filler: int = 400) -> dict[str, Path]:
    """Write valence, emotion, stopword and free-association files."""
    rng = np.random.default_rng(seed + 1)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    vocab = _content_vocab()
    filler = filler_vocab(n_filler)

    paths = {}
    paths["valence"] = directory / "valence.tsv"
    with open(paths["valence"], "w", encoding="utf-8") as f:
        f.write("lemma\tscore\n")
        for w in vocab + filler:
            if w in NEGATIVE_WORDS:
                score = rng.uniform(1.5, 3.5)
            elif w in POSITIVE_WORDS:
                score = rng.uniform(6.8, 8.5)
            else:
                score = rng.uniform(3.8, 6.6)
            f.write(f"{w}\t{score:.2f}\n")

    paths["emotions"] = directory / "emotions.tsv"
    with open(paths["emotions"], "w", encoding="utf-8") as f:
        for w in vocab + filler:
            for e in EMOTIONS:
                base = 0.12
                if w in NEGATIVE_WORDS and e in ("sadness", "fear", "anger", "disgust"):
                    base = 0.5
                if w in POSITIVE_WORDS and e in ("joy", "trust", "anticipation"):
                    base = 0.55
                flag = int(rng.random() < base)
                f.write(f"{w}\t{e}\t{flag}\n")

    paths["stopwords"] = directory / "stopwords.txt"
    paths["stopwords"].write_text("\n".join(STOPWORDS) + "\n", encoding="utf-8")

    paths["placeholders"] = directory / "placeholders.txt"
    paths["placeholders"].write_text("\n".join(PERSON_PLACEHOLDERS) + "\n", encoding="utf-8")

    paths["fa"] = directory / "free_associations.tsv"
    cues = [w for w in vocab if w not in ADPS]
    with open(paths["fa"], "w", encoding="utf-8") as f:
        for cue in cues:
            for _ in range(3):
                resp = cues[rng.integers(len(cues))]
                f.write(f"{cue}\t{resp}\t{int(rng.integers(1, 5))}\n")
    return paths


def write_bundle(directory, n_docs: int = 20, seed: int = 7) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = write_lexicons(directory, seed)
    paths["corpus"] = directory / "corpus.conllu"
    write_conllu(make_corpus(n_docs, seed), paths["corpus"])
    return paths


def bundled_data_dir() -> Path:
    return Path(__file__).parent / "data"
