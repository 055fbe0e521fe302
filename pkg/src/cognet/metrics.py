"""Structural measures on lexical networks: closeness prominence, rank
drop, degeneracy, strength distribution tails, giant-component shrinkage and
Girvan-Newman communities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .ingest import NEGATIVE, POSITIVE, AffectLexicons
from .netbuild import LexicalNetwork, restrict_network
from .stats import centile_bounds, empirical_p

ALPHA = 0.05


class MetricError(ValueError):
    pass


def _csr(net: LexicalNetwork, weighted: bool = False) -> sparse.csr_matrix:
    n = net.n_nodes
    pairs, w = net.edge_array()
    if len(pairs) == 0:
        return sparse.csr_matrix((n, n))
    data = w.astype(float) if weighted else np.ones(len(pairs))
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return sparse.csr_matrix((np.concatenate([data, data]), (rows, cols)), shape=(n, n))


# -- closeness -----------------------------------------------------------------

@dataclass(frozen=True)
class CentralityRanking:
    entries: tuple[tuple[str, float, int], ...]
    filter: str = "none"

    def rank_of(self, lemma: str) -> int | None:
        for name, _, rank in self.entries:
            if name == lemma:
                return rank
        return None

    def ranks(self) -> dict[str, int]:
        return {name: rank for name, _, rank in self.entries}

    def top(self, k: int) -> list[tuple[str, float, int]]:
        return list(self.entries[:k])


def closeness(net: LexicalNetwork) -> dict[str, float]:
    """(reachable - 1) / sum of hop distances to reachable nodes; 0 for
    isolated nodes. Each node is scored within its own component."""
    if net.n_nodes == 0:
        return {}
    dist = csgraph.shortest_path(_csr(net), method="D", unweighted=True, directed=False)
    finite = np.isfinite(dist)
    total = np.where(finite, dist, 0.0).sum(axis=1)
    reach = finite.sum(axis=1) - 1
    with np.errstate(invalid="ignore", divide="ignore"):
        score = np.where(total > 0, reach / total, 0.0)
    return dict(zip(net.nodes, score.tolist()))


def rank_scores(scores: Mapping[str, float], exclude: Iterable[str] = (), label: str = "none") -> CentralityRanking:
    """Descending order, ties broken alphabetically; ranks are 1..n."""
    drop = set(exclude)
    items = sorted(((n, s) for n, s in scores.items() if n not in drop), key=lambda t: (-t[1], t[0]))
    return CentralityRanking(tuple((n, s, r) for r, (n, s) in enumerate(items, start=1)), label)


def closeness_ranking(net: LexicalNetwork, stopwords: Iterable[str] = ()) -> CentralityRanking:
    """Closeness computed on the full graph, stopwords removed from the
    ranking afterwards."""
    stop = frozenset(stopwords)
    return rank_scores(closeness(net), stop, "content-words-only" if stop else "none")


@dataclass(frozen=True)
class RankDrop:
    lemma: str
    empirical_rank: int | None
    mean_null_rank: float | None
    drop: float | None
    p_value: float | None
    significant: bool
    missing: bool = False

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lemma", "empirical_rank", "mean_null_rank", "drop", "p_value", "significant", "missing")}


def rank_drop(net: LexicalNetwork, ensemble: Sequence[LexicalNetwork], targets: Iterable[str],
              stopwords: Iterable[str] = (), alpha: float = ALPHA) -> list[RankDrop]:
    """Mean null closeness rank minus empirical rank per target.

    Positive drops mean the lemma is more prominent than its randomized
    counterparts. Significance uses a two-sided add-one empirical p-value.
    """
    stop = frozenset(stopwords)
    emp = closeness_ranking(net, stop).ranks()
    null_ranks = [closeness_ranking(s, stop).ranks() for s in ensemble]
    return rank_drop_from_ranks(emp, null_ranks, targets, alpha)


def rank_drop_from_ranks(emp: Mapping[str, int], null_ranks: Sequence[Mapping[str, int]],
                         targets: Iterable[str], alpha: float = ALPHA) -> list[RankDrop]:
    out = []
    for lemma in targets:
        if lemma not in emp:
            out.append(RankDrop(lemma, None, None, None, None, False, missing=True))
            continue
        ranks = np.array([r[lemma] for r in null_ranks if lemma in r], dtype=float)
        if len(ranks) == 0:
            out.append(RankDrop(lemma, emp[lemma], None, None, None, False, missing=True))
            continue
        mean = float(ranks.mean())
        p = empirical_p(emp[lemma], ranks, "two")
        out.append(RankDrop(lemma, emp[lemma], mean, mean - emp[lemma], p, p < alpha))
    return out


# -- degeneracy ----------------------------------------------------------------

def _entropy2(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def star_entropy(n: int) -> float:
    """Entropy of the column means of the row-normalized star on n nodes.

    The hub receives mass (n-1)/n and every leaf 1/(n(n-1)).
    """
    hub = (n - 1) / n
    leaf = 1 / (n * (n - 1))
    return -hub * math.log2(hub) - (n - 1) * leaf * math.log2(leaf)


def degeneracy(net: LexicalNetwork, subgraph: Iterable[str] | None = None) -> float:
    """How star-like a weighted graph is: 1 for stars, 0 when one random-walk
    step from a uniformly chosen node lands uniformly on all nodes.

    ``(log2 N - H(mean_i W_i.)) / (log2 N - S)`` with W the row-normalized
    weight matrix and S the same entropy evaluated on a star of N nodes.
    Unequal weights can concentrate the walk more than an unweighted star
    does; such graphs are clamped to 1.
    """
    if subgraph is not None:
        keep = set(subgraph)
        net = LexicalNetwork(kind=net.kind, weights={k: w for k, w in net.weights.items()
                                                     if k[0] in keep and k[1] in keep},
                             isolates=frozenset(keep & set(net.nodes)))
    n = net.n_nodes
    if n < 3:
        raise MetricError("degeneracy needs at least 3 nodes")
    a = _csr(net, weighted=True)
    s = np.asarray(a.sum(axis=1)).ravel()
    if np.any(s <= 0):
        isolated = [net.nodes[i] for i in np.flatnonzero(s <= 0)[:5]]
        raise MetricError(f"isolated node(s) in scope: {isolated}")
    w = sparse.diags(1 / s) @ a
    col_mean = np.asarray(w.sum(axis=0)).ravel() / n
    h_max = math.log2(n)
    value = (h_max - _entropy2(col_mean)) / (h_max - star_entropy(n))
    return float(min(1.0, max(0.0, value)))


# -- strength distribution and tail exponent ----------------------------------

@dataclass(frozen=True)
class PowerLawFit:
    alpha: float | None
    xmin: float | None
    ks: float | None
    n_tail: int
    n: int
    reason: str | None = None

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "xmin": self.xmin, "ks": self.ks,
                "n_tail": self.n_tail, "n": self.n, "reason": self.reason}


def fit_power_law_tail(values: Sequence[float], min_tail: int = 10,
                       xmin: float | None = None) -> PowerLawFit:
    """Continuous maximum-likelihood power-law tail fit.

    For each candidate x_min the exponent is 1 + n / sum(log(x / x_min)) over
    the tail; x_min minimizes the Kolmogorov-Smirnov distance between the
    tail and the fitted law. Candidates leaving fewer than ``min_tail``
    points are skipped.
    """
    x = np.sort(np.asarray(values, dtype=float))
    x = x[x > 0]
    n = len(x)
    if n == 0 or x[0] == x[-1]:
        return PowerLawFit(None, None, None, 0, n, "degenerate: all values equal or empty")
    logs = np.log(x)
    suffix = np.cumsum(logs[::-1])[::-1]
    if xmin is not None:
        starts = [int(np.searchsorted(x, xmin, side="left"))]
    else:
        uniq_first = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
        starts = [int(i) for i in uniq_first if n - i >= min_tail]
    best = None
    for i in starts:
        m = n - i
        if m < 2:
            continue
        denom = suffix[i] - m * logs[i]
        if denom <= 0:
            continue
        alpha = 1 + m / denom
        tail = x[i:]
        model = 1 - (tail / x[i]) ** (1 - alpha)
        emp_hi = np.arange(1, m + 1) / m
        emp_lo = np.arange(0, m) / m
        ks = float(max(np.max(np.abs(emp_hi - model)), np.max(np.abs(model - emp_lo))))
        if best is None or ks < best[0]:
            best = (ks, alpha, x[i], m)
    if best is None:
        return PowerLawFit(None, None, None, 0, n, "no admissible x_min")
    ks, alpha, xm, m = best
    return PowerLawFit(float(alpha), float(xm), ks, m, n)


@dataclass(frozen=True)
class StrengthDistribution:
    strengths: dict[str, int]
    ccdf: list[tuple[float, float]]
    tail: PowerLawFit

    def as_dict(self) -> dict:
        return {"ccdf": [list(p) for p in self.ccdf], "tail": self.tail.as_dict()}


def ccdf_points(values: Sequence[float]) -> list[tuple[float, float]]:
    """(x, P(X >= x)) at each distinct value."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    uniq, first = np.unique(x, return_index=True)
    return [(float(u), float((n - f) / n)) for u, f in zip(uniq, first)]


def strength_distribution(net: LexicalNetwork, min_tail: int = 10) -> StrengthDistribution:
    if net.n_nodes < 10:
        raise MetricError("strength distribution needs at least 10 nodes")
    st = net.strength()
    vals = list(st.values())
    return StrengthDistribution(st, ccdf_points(vals), fit_power_law_tail(vals, min_tail=min_tail))


# -- components and shrinkage ---------------------------------------------------

def components(net: LexicalNetwork) -> list[list[str]]:
    """Connected components, largest first; equal sizes ordered by their
    smallest node id."""
    if net.n_nodes == 0:
        return []
    _, labels = csgraph.connected_components(_csr(net), directed=False)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(i)
    ordered = sorted(groups.values(), key=lambda g: (-len(g), g[0]))
    return [[net.nodes[i] for i in g] for g in ordered]


def giant_component(net: LexicalNetwork) -> list[str]:
    """Largest component; empty when the graph has no edges, since a lone
    node does not form a giant component."""
    comps = components(net)
    return comps[0] if comps and len(comps[0]) > 1 else []


def giant_component_stats(net: LexicalNetwork) -> tuple[float, float]:
    """Fractions of nodes and of total strength inside the giant component."""
    if net.n_nodes == 0:
        return 0.0, 0.0
    gc = set(giant_component(net))
    st = net.strength()
    total = sum(st.values())
    node_frac = len(gc) / net.n_nodes
    strength_frac = sum(st[n] for n in gc) / total if total else 0.0
    return node_frac, strength_frac


def _gc_size(adj: sparse.csr_matrix, keep: np.ndarray | None = None) -> int:
    if keep is not None:
        adj = adj[keep][:, keep]
    if adj.shape[0] == 0:
        return 0
    _, labels = csgraph.connected_components(adj, directed=False)
    largest = int(np.bincount(labels).max())
    return largest if largest > 1 else 0


def shrinkage(net: LexicalNetwork, targets: Iterable[str]) -> dict[str, int | None]:
    """|GC(G)| - |GC(G - v)| per target; None when v is outside the giant
    component. The deleted node itself is counted, and a graph left without
    edges has no giant component, so deleting a star's center gives N."""
    adj = _csr(net)
    base = _gc_size(adj)
    gc = set(giant_component(net))
    out = {}
    for t in targets:
        if t not in gc:
            out[t] = None
            continue
        keep = np.ones(net.n_nodes, dtype=bool)
        keep[net.index[t]] = False
        out[t] = base - _gc_size(adj, keep)
    return out


def null_shrinkage(sample: LexicalNetwork, targets: Iterable[str]) -> dict[str, int]:
    """Shrinkage in a null sample, 0 for targets outside its giant component."""
    adj = _csr(sample)
    base = _gc_size(adj)
    out = {}
    for t in targets:
        if t not in sample:
            out[t] = 0
            continue
        keep = np.ones(sample.n_nodes, dtype=bool)
        keep[sample.index[t]] = False
        out[t] = base - _gc_size(adj, keep)
    return out


def detached_nodes(net: LexicalNetwork, lemma: str) -> list[str]:
    """Giant-component nodes that leave it when ``lemma`` is deleted (the
    lemma itself excluded)."""
    gc = giant_component(net)
    rest = restrict_network(net, [n for n in gc if n != lemma])
    remaining = set(giant_component(rest))
    return sorted(n for n in gc if n != lemma and n not in remaining)


@dataclass(frozen=True)
class NodeShrinkage:
    lemma: str
    shrinkage: int | None
    null_low: float | None = None
    null_high: float | None = None
    null_mean: float | None = None
    p_lower: float | None = None
    p_upper: float | None = None
    outside_giant_component: bool = False

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("lemma", "shrinkage", "null_low", "null_high", "null_mean",
                                              "p_lower", "p_upper", "outside_giant_component")}


@dataclass(frozen=True)
class ShrinkageResult:
    nodes: tuple[NodeShrinkage, ...]
    low_centile: float = 1
    high_centile: float = 99

    def as_dict(self) -> dict:
        return {"centiles": [self.low_centile, self.high_centile],
                "nodes": [n.as_dict() for n in self.nodes]}


def shrinkage_analysis(net: LexicalNetwork, ensemble: Sequence[LexicalNetwork], targets: Iterable[str],
                       low: float = 1, high: float = 99) -> ShrinkageResult:
    targets = list(targets)
    return summarize_shrinkage(shrinkage(net, targets), [null_shrinkage(s, targets) for s in ensemble],
                               targets, low, high)


def summarize_shrinkage(emp: Mapping[str, int | None], null: Sequence[Mapping[str, int]],
                        targets: Iterable[str], low: float = 1, high: float = 99) -> ShrinkageResult:
    """Compare empirical shrinkage with per-sample null values: centile
    bounds and one-sided add-one p-values in both directions."""
    rows = []
    for t in targets:
        if emp.get(t) is None:
            rows.append(NodeShrinkage(t, None, outside_giant_component=True))
            continue
        samples = np.array([d[t] for d in null], dtype=float)
        if len(samples) == 0:
            rows.append(NodeShrinkage(t, emp[t]))
            continue
        lo, hi = centile_bounds(samples, low, high)
        rows.append(NodeShrinkage(
            t, emp[t], lo, hi, float(samples.mean()),
            empirical_p(emp[t], samples, "less"), empirical_p(emp[t], samples, "greater"),
        ))
    return ShrinkageResult(tuple(rows), low, high)


# -- Girvan-Newman ---------------------------------------------------------------

@dataclass
class Cluster:
    members: list[str]
    positive_fraction: float | None = None
    negative_fraction: float | None = None
    degeneracy: float | None = None

    def as_dict(self) -> dict:
        return {"size": len(self.members), "members": self.members,
                "positive_fraction": self.positive_fraction,
                "negative_fraction": self.negative_fraction, "degeneracy": self.degeneracy}


@dataclass
class Partition:
    clusters: list[Cluster]
    removed_edges: list[tuple[str, str]] = field(default_factory=list)

    def labels(self) -> dict[str, int]:
        return {m: k for k, c in enumerate(self.clusters) for m in c.members}

    def as_dict(self) -> dict:
        return {"n_clusters": len(self.clusters), "removed_edges": len(self.removed_edges),
                "clusters": [c.as_dict() for c in self.clusters], "membership": self.labels()}


def girvan_newman_clusters(net: LexicalNetwork, n_clusters: int,
                           lex: AffectLexicons | None = None) -> Partition:
    """Remove the highest-betweenness edge (unweighted, recomputed after every
    removal, ties to the alphabetically first edge) until the graph splits
    into ``n_clusters`` components."""
    if n_clusters < 1:
        raise MetricError("n_clusters must be >= 1")
    if n_clusters > net.n_nodes:
        raise MetricError(f"n_clusters={n_clusters} exceeds node count {net.n_nodes}")
    g = net.to_networkx(weighted=False)
    removed = []
    while nx.number_connected_components(g) < n_clusters:
        eb = nx.edge_betweenness_centrality(g, normalized=False)
        top = max(eb.values())
        cands = sorted(tuple(sorted(e)) for e, v in eb.items() if v >= top - 1e-9 * max(1.0, top))
        u, v = cands[0]
        g.remove_edge(u, v)
        removed.append((u, v))
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: (-len(c), c[0]))
    clusters = []
    for members in comps:
        c = Cluster(members)
        if lex is not None:
            vals = [lex.valence_of(m) for m in members]
            c.positive_fraction = vals.count(POSITIVE) / len(vals)
            c.negative_fraction = vals.count(NEGATIVE) / len(vals)
        if len(members) >= 3:
            sub = restrict_network(net, members)
            if sub.n_nodes == len(members):
                c.degeneracy = degeneracy(sub)
        clusters.append(c)
    return Partition(clusters, removed)
