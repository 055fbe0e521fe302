"""Valence-derived edge signs, signed triad census and degree of balance."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import partial
from typing import Mapping

import numpy as np

from ._parallel import parallel_map
from .ingest import NEGATIVE, NEUTRAL, AffectLexicons
from .netbuild import Edge, LexicalNetwork
from .nullmodels import (
    DEGREE_REWIRE,
    LABEL_SHUFFLE,
    NullEnsembleSpec,
    _rewire_task,
    shuffle_valences,
)

TRIAD_TYPES = ("+++", "++-", "+--", "---")


@dataclass(frozen=True)
class SignedNetwork:
    base: LexicalNetwork
    node_valence: Mapping[str, str]
    edge_sign: Mapping[Edge, int]

    def sign_counts(self) -> dict[str, int]:
        vals = list(self.edge_sign.values())
        return {"positive": vals.count(1), "negative": vals.count(-1), "zero": vals.count(0)}

    def is_consistent(self) -> bool:
        return all(edge_sign(self.node_valence[a], self.node_valence[b]) == s
                   for (a, b), s in self.edge_sign.items())


def edge_sign(va: str, vb: str) -> int:
    """-1 if either end is Negative, 0 if both are Neutral, else +1."""
    if va == NEGATIVE or vb == NEGATIVE:
        return -1
    if va == NEUTRAL and vb == NEUTRAL:
        return 0
    return 1


def signed_from_valences(net: LexicalNetwork, valence: Mapping[str, str]) -> SignedNetwork:
    signs = {k: edge_sign(valence[k[0]], valence[k[1]]) for k in net.weights}
    return SignedNetwork(base=net, node_valence=dict(valence), edge_sign=signs)


def assign_signs(net: LexicalNetwork, lex: AffectLexicons) -> SignedNetwork:
    """Attach node valences from the lexicon (missing lemmas are Neutral)
    and derive every edge sign from them."""
    return signed_from_valences(net, {n: lex.valence_of(n) for n in net.nodes})


@dataclass(frozen=True)
class TriadCensus:
    ppp: int = 0
    ppm: int = 0
    pmm: int = 0
    mmm: int = 0
    excluded: int = 0

    @property
    def classified(self) -> int:
        return self.ppp + self.ppm + self.pmm + self.mmm

    @property
    def degree_of_balance(self) -> float | None:
        total = self.classified
        if total == 0:
            return None
        return (self.ppp + self.pmm) / total

    def counts(self) -> dict[str, int]:
        return dict(zip(TRIAD_TYPES, (self.ppp, self.ppm, self.pmm, self.mmm)))

    def fractions(self) -> dict[str, float | None]:
        total = self.classified
        return {k: (v / total if total else None) for k, v in self.counts().items()}

    def as_dict(self) -> dict:
        return {
            "counts": self.counts(),
            "excluded_zero_sign": self.excluded,
            "fractions": self.fractions(),
            "degree_of_balance": self.degree_of_balance,
        }


def triangles(net: LexicalNetwork):
    """Yield every triangle once as a sorted lemma triple.

    Edges are oriented from lower to higher (degree, name) rank and forward
    neighbor sets are intersected, which visits each triangle exactly once.
    """
    adj = net.adjacency
    rank = {n: r for r, n in enumerate(sorted(adj, key=lambda n: (len(adj[n]), n)))}
    forward = {n: {m for m in adj[n] if rank[m] > rank[n]} for n in adj}
    for u in adj:
        fu = forward[u]
        for v in fu:
            for w in fu & forward[v]:
                yield tuple(sorted((u, v, w)))


def census_from_signs(net: LexicalNetwork, signs: Mapping[Edge, int]) -> TriadCensus:
    counts = [0, 0, 0, 0]
    excluded = 0
    for a, b, c in triangles(net):
        s1, s2, s3 = signs[(a, b)], signs[(a, c)], signs[(b, c)]
        if s1 == 0 or s2 == 0 or s3 == 0:
            excluded += 1
            continue
        counts[(s1 < 0) + (s2 < 0) + (s3 < 0)] += 1
    return TriadCensus(*counts, excluded=excluded)


def triad_census(snet: SignedNetwork) -> TriadCensus:
    return census_from_signs(snet.base, snet.edge_sign)


def structural_impossibility_check(snet: SignedNetwork) -> bool:
    """True when no {+,+,-} triangle occurs, which valence-derived signs
    guarantee; a False result means the signs did not come from valences."""
    return triad_census(snet).ppm == 0


def _rewire_census(index: int, net: LexicalNetwork, spec: NullEnsembleSpec,
                   valence: Mapping[str, str]) -> TriadCensus:
    sample = _rewire_task(index, net, spec)
    return triad_census(signed_from_valences(sample, valence))


def _shuffle_census(index: int, snet: SignedNetwork, spec: NullEnsembleSpec) -> TriadCensus:
    shuffled = shuffle_valences(snet.base.nodes, snet.node_valence, spec.rng(index))
    return triad_census(signed_from_valences(snet.base, shuffled))


def _summarize(empirical: TriadCensus, ensemble: list[TriadCensus]) -> dict:
    out = {"n_samples": len(ensemble), "fractions": {}, "counts": {}, "fraction_z": {}}
    emp_fr = empirical.fractions()
    for t in TRIAD_TYPES:
        fr = np.array([c.fractions()[t] for c in ensemble if c.classified], dtype=float)
        ct = np.array([c.counts()[t] for c in ensemble], dtype=float)
        out["fractions"][t] = _mean_sd(fr)
        out["counts"][t] = _mean_sd(ct)
        out["fraction_z"][t] = _z(emp_fr[t], out["fractions"][t])
    dobs = np.array([c.degree_of_balance for c in ensemble if c.degree_of_balance is not None])
    out["degree_of_balance"] = _mean_sd(dobs)
    out["dob_z"] = _z(empirical.degree_of_balance, out["degree_of_balance"])
    out["undefined_dob_samples"] = len(ensemble) - len(dobs)
    return out


def _z(value, summary) -> float | None:
    if value is None or summary["mean"] is None or not summary["sd"]:
        return None
    return (value - summary["mean"]) / summary["sd"]


def _mean_sd(values: np.ndarray) -> dict:
    if len(values) == 0:
        return {"mean": None, "sd": None}
    sd = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return {"mean": float(values.mean()), "sd": sd}


@dataclass
class BalanceReport:
    empirical: TriadCensus
    sign_counts: dict[str, int]
    rewire: list[TriadCensus]
    shuffle: list[TriadCensus]
    n_samples: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "empirical": self.empirical.as_dict(),
            "edge_signs": self.sign_counts,
            "impossible_triad_absent": self.empirical.ppm == 0,
            "null_models": {
                DEGREE_REWIRE: _summarize(self.empirical, self.rewire),
                LABEL_SHUFFLE: _summarize(self.empirical, self.shuffle),
            },
            "n_samples": self.n_samples,
            "seed": self.seed,
        }

    def write_csv(self, path) -> None:
        """Per-realization censuses, one row per (ensemble, index)."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["ensemble", "index", *TRIAD_TYPES, "excluded", "degree_of_balance"])
            rows = [("empirical", 0, self.empirical)]
            rows += [(DEGREE_REWIRE, i, c) for i, c in enumerate(self.rewire)]
            rows += [(LABEL_SHUFFLE, i, c) for i, c in enumerate(self.shuffle)]
            for name, i, c in rows:
                dob = c.degree_of_balance
                w.writerow([name, i, c.ppp, c.ppm, c.pmm, c.mmm, c.excluded,
                            "" if dob is None else repr(dob)])


def balance_comparison(snet: SignedNetwork, lex: AffectLexicons | None = None, n_samples: int = 1000,
                       seed: int = 0, rewire_multiplier: int = 10, workers: int = 1) -> BalanceReport:
    """Triad census of ``snet`` against rewired and label-shuffled ensembles.

    Node valences travel with the lemmas through rewiring; shuffling permutes
    them over the fixed topology. ``lex`` is accepted for symmetry with
    :func:`assign_signs`; valences are taken from ``snet``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    empirical = triad_census(snet)
    rw_spec = NullEnsembleSpec(DEGREE_REWIRE, n_samples, seed, rewire_multiplier)
    sh_spec = NullEnsembleSpec(LABEL_SHUFFLE, n_samples, seed)
    rewired = parallel_map(partial(_rewire_census, net=snet.base, spec=rw_spec,
                                   valence=snet.node_valence), range(n_samples), workers)
    shuffled = parallel_map(partial(_shuffle_census, snet=snet, spec=sh_spec), range(n_samples), workers)
    return BalanceReport(empirical, snet.sign_counts(), rewired, shuffled, n_samples, seed)
