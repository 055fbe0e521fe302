"""Construction of co-occurrence (CO), subject-verb-object (SVO) and
free-association (FA) networks over lemmas."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from .ingest import AnnotatedCorpus, AnnotatedToken, FreeAssociationData

CO = "CO"
SVO = "SVO"
FA = "FA"

Edge = tuple[str, str]


def edge_key(a: str, b: str) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class LexicalNetwork:
    """Undirected weighted lemma graph.

    ``weights`` maps sorted lemma pairs to positive integer weights. When
    ``doc_ids`` is set it maps the same keys to the documents that
    contributed the edge. Node ids are positions in the sorted node list.
    """

    kind: str
    weights: Mapping[Edge, int]
    doc_ids: Mapping[Edge, frozenset[str]] | None = None
    isolates: frozenset[str] = frozenset()
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for (a, b), w in self.weights.items():
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if not a < b:
                raise ValueError(f"edge key {(a, b)!r} is not sorted")
            if w < 1:
                raise ValueError(f"edge {(a, b)!r} has weight {w} < 1")

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        names = set(self.isolates)
        for a, b in self.weights:
            names.add(a)
            names.add(b)
        return tuple(sorted(names))

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def adjacency(self) -> dict[str, dict[str, int]]:
        adj: dict[str, dict[str, int]] = {n: {} for n in self.nodes}
        for (a, b), w in self.weights.items():
            adj[a][b] = w
            adj[b][a] = w
        return adj

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def __contains__(self, lemma) -> bool:
        return lemma in self.index

    def neighbors(self, lemma: str) -> set[str]:
        return set(self.adjacency[lemma])

    def degree(self) -> dict[str, int]:
        return {n: len(nb) for n, nb in self.adjacency.items()}

    def strength(self) -> dict[str, int]:
        return {n: sum(nb.values()) for n, nb in self.adjacency.items()}

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(pairs, weights)`` in node-id space, sorted by key."""
        keys = sorted(self.weights)
        pairs = np.array([(self.index[a], self.index[b]) for a, b in keys], dtype=np.int64)
        w = np.array([self.weights[k] for k in keys], dtype=np.int64)
        return pairs.reshape(-1, 2), w

    def to_networkx(self, weighted: bool = True) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        if weighted:
            g.add_weighted_edges_from((a, b, w) for (a, b), w in self.weights.items())
        else:
            g.add_edges_from(self.weights)
        return g

    @classmethod
    def from_edges(cls, kind: str, edges: Iterable[tuple[str, str]] | Mapping[Edge, int],
                   isolates: Iterable[str] = (), **params) -> "LexicalNetwork":
        weights: Counter = Counter()
        if isinstance(edges, Mapping):
            for (a, b), w in edges.items():
                weights[edge_key(a, b)] += w
        else:
            for a, b in edges:
                weights[edge_key(a, b)] += 1
        return cls(kind=kind, weights=dict(weights), isolates=frozenset(isolates), params=params)


@dataclass(frozen=True)
class SvoTriplet:
    subject: str
    verb: str
    object: str
    doc_id: str
    sentence: int


@dataclass(frozen=True)
class SvoConfig:
    """Tag and label sets driving SVO extraction.

    Defaults cover both Universal Dependencies labels and the ClearNLP
    labels emitted by spaCy's English models.
    """

    semantic_upos: frozenset[str] = frozenset({"NOUN", "PROPN", "PRON", "VERB", "ADV", "ADJ", "ADP"})
    noun_upos: frozenset[str] = frozenset({"NOUN", "PROPN"})
    verb_upos: frozenset[str] = frozenset({"VERB"})
    subject_deprels: frozenset[str] = frozenset(
        {"nsubj", "nsubjpass", "nsubj:pass", "csubj", "csubjpass", "csubj:pass"}
    )
    relcl_deprels: frozenset[str] = frozenset({"relcl", "acl:relcl"})
    negation_deprels: frozenset[str] = frozenset({"neg"})
    negation_lemmas: frozenset[str] = frozenset({"not", "n't"})
    punct_upos: frozenset[str] = frozenset({"PUNCT"})


DEFAULT_SVO_CONFIG = SvoConfig()


@dataclass
class SvoExtraction:
    triplets: list[SvoTriplet]
    skipped_no_verb: int = 0
    skipped_no_subject: int = 0


def build_co_network(corpus: AnnotatedCorpus, punct_upos: Iterable[str] = ("PUNCT",)) -> LexicalNetwork:
    """Link each pair of adjacent lemmas within a sentence.

    Punctuation tokens break adjacency and are never nodes.
    """
    punct = frozenset(punct_upos)
    weights: Counter = Counter()
    docs: dict[Edge, set[str]] = defaultdict(set)
    isolates: set[str] = set()
    for doc_id, _, sent in corpus.sentences():
        prev = None
        for tok in sent:
            if tok.upos in punct:
                prev = None
                continue
            lemma = tok.lemma
            isolates.add(lemma)
            if prev is not None and prev != lemma:
                key = edge_key(prev, lemma)
                weights[key] += 1
                docs[key].add(doc_id)
            prev = lemma
    linked = {n for k in weights for n in k}
    return LexicalNetwork(
        kind=CO,
        weights=dict(weights),
        doc_ids={k: frozenset(v) for k, v in docs.items()},
        isolates=frozenset(isolates - linked),
    )


def _classify(sent: tuple[AnnotatedToken, ...], cfg: SvoConfig) -> list[str | None]:
    classes: list[str | None] = []
    for tok in sent:
        negation = tok.deprel in cfg.negation_deprels or (
            tok.deprel == "advmod" and tok.lemma.lower() in cfg.negation_lemmas
        )
        relcl = tok.deprel in cfg.relcl_deprels
        if not (tok.upos in cfg.semantic_upos or negation or relcl):
            classes.append(None)
        elif tok.deprel in cfg.subject_deprels:
            classes.append("SUBJECT")
        elif tok.upos in cfg.verb_upos or relcl:
            classes.append("VERB")
        else:
            classes.append("OBJECT")
    return classes


def extract_sentence_triplets(sent, cfg: SvoConfig = DEFAULT_SVO_CONFIG, doc_id: str = "",
                              sentence_index: int = 0, stats: SvoExtraction | None = None):
    """Generalized SVO triplets of one dependency-parsed sentence.

    Every OBJECT token yields (subject, verb, token) where the verb is the
    closest VERB ancestor and the subject is the closest SUBJECT in that
    verb's subtree (breadth-first, earlier position on ties). A subject that
    is not a (proper) noun is replaced by its closest noun ancestor, or kept
    as-is when it has none.
    """
    n = len(sent)
    classes = _classify(sent, cfg)
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for k, tok in enumerate(sent, start=1):
        children[tok.head].append(k)

    def ancestors(k):
        cur = sent[k - 1].head
        while cur != 0:
            yield cur
            cur = sent[cur - 1].head

    def get_verb(k):
        for a in ancestors(k):
            if classes[a - 1] == "VERB":
                return a
        return None

    def nearest_subject(verb):
        frontier = sorted(children[verb])
        while frontier:
            hits = [c for c in frontier if classes[c - 1] == "SUBJECT"]
            if hits:
                return min(hits)
            frontier = sorted(c for f in frontier for c in children[f])
        return None

    def get_subject(k):
        verb = get_verb(k)
        if verb is None:
            return None
        subj = nearest_subject(verb)
        if subj is None:
            return None
        if sent[subj - 1].upos in cfg.noun_upos:
            return subj
        for a in ancestors(subj):
            if sent[a - 1].upos in cfg.noun_upos:
                return a
        return subj

    out = []
    for k in range(1, n + 1):
        if classes[k - 1] != "OBJECT":
            continue
        verb = get_verb(k)
        if verb is None:
            if stats is not None:
                stats.skipped_no_verb += 1
            continue
        subj = get_subject(k)
        if subj is None:
            if stats is not None:
                stats.skipped_no_subject += 1
            continue
        out.append(SvoTriplet(sent[subj - 1].lemma, sent[verb - 1].lemma, sent[k - 1].lemma,
                              doc_id, sentence_index))
    return out


def extract_svo_triplets(corpus: AnnotatedCorpus, cfg: SvoConfig = DEFAULT_SVO_CONFIG) -> SvoExtraction:
    result = SvoExtraction(triplets=[])
    for doc_id, k, sent in corpus.sentences():
        result.triplets.extend(extract_sentence_triplets(sent, cfg, doc_id, k, result))
    return result


def triplet_pairs(t: SvoTriplet) -> tuple[Edge, Edge, Edge]:
    return ((t.subject, t.verb), (t.verb, t.object), (t.subject, t.object))


def build_svo_network(triplets: Iterable[SvoTriplet], min_weight: int = 2) -> LexicalNetwork:
    """Decompose triplets into subject-verb, verb-object and subject-object
    links, drop links seen fewer than ``min_weight`` times and shift the
    surviving weights down by ``min_weight - 1``.

    Pairs whose two lemmas coincide (e.g. a verb reused as its own object)
    contribute nothing.
    """
    if min_weight < 1:
        raise ValueError("min_weight must be >= 1")
    weights: Counter = Counter()
    docs: dict[Edge, set[str]] = defaultdict(set)
    for t in triplets:
        for a, b in triplet_pairs(t):
            if a == b:
                continue
            key = edge_key(a, b)
            weights[key] += 1
            docs[key].add(t.doc_id)
    shift = min_weight - 1
    kept = {k: w - shift for k, w in weights.items() if w >= min_weight}
    return LexicalNetwork(
        kind=SVO,
        weights=kept,
        doc_ids={k: frozenset(docs[k]) for k in kept},
        params={"min_weight": min_weight},
    )


def build_fa_network(fa: FreeAssociationData, restrict_to: Iterable[str] | None = None) -> LexicalNetwork:
    weights: Counter = Counter()
    for cue, resp, count in fa.pairs:
        weights[edge_key(cue, resp)] += count
    net = LexicalNetwork(kind=FA, weights=dict(weights))
    if restrict_to is not None:
        net = restrict_network(net, restrict_to)
    return net


def restrict_network(net: LexicalNetwork, vocab: Iterable[str]) -> LexicalNetwork:
    """Induced subgraph on ``vocab``; nodes left without edges are dropped."""
    keep = set(vocab)
    weights = {k: w for k, w in net.weights.items() if k[0] in keep and k[1] in keep}
    docs = None
    if net.doc_ids is not None:
        docs = {k: net.doc_ids[k] for k in weights}
    return LexicalNetwork(kind=net.kind, weights=weights, doc_ids=docs, params=dict(net.params))


def pair_document_counts(net: LexicalNetwork, top_k: int | None = None) -> list[tuple[Edge, int]]:
    if net.doc_ids is None:
        raise ValueError("network was built without document tracking")
    ranked = sorted(((k, len(v)) for k, v in net.doc_ids.items()), key=lambda kv: (-kv[1], kv[0]))
    return ranked if top_k is None else ranked[:top_k]


# -- edge-list serialization ------------------------------------------------

def write_edgelist(net: LexicalNetwork, path, extra: Mapping | None = None) -> None:
    """Write ``lemma_i<TAB>lemma_j<TAB>weight[<TAB>doc_ids]`` rows after a
    single ``# {json}`` header line."""
    header = {
        "kind": net.kind,
        "n_nodes": net.n_nodes,
        "n_edges": net.n_edges,
        "params": dict(net.params),
        "isolates": sorted(net.isolates),
        "has_doc_ids": net.doc_ids is not None,
    }
    if extra:
        header.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("# " + json.dumps(header, sort_keys=True) + "\n")
        for key in sorted(net.weights):
            row = [key[0], key[1], str(net.weights[key])]
            if net.doc_ids is not None:
                row.append(",".join(sorted(net.doc_ids[key])))
            f.write("\t".join(row) + "\n")


def read_edgelist(path) -> LexicalNetwork:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        first = f.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing JSON header line")
        header = json.loads(first[2:])
        weights: dict[Edge, int] = {}
        docs: dict[Edge, frozenset[str]] | None = {} if header.get("has_doc_ids") else None
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) < 3:
                raise ValueError(f"{path}:{lineno}: expected at least 3 columns")
            key = edge_key(cols[0], cols[1])
            weights[key] = int(cols[2])
            if docs is not None:
                docs[key] = frozenset(d for d in cols[3].split(",") if d) if len(cols) > 3 else frozenset()
    return LexicalNetwork(
        kind=header["kind"],
        weights=weights,
        doc_ids=docs,
        isolates=frozenset(header.get("isolates", ())),
        params=header.get("params", {}),
    )
