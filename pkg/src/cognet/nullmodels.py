"""Randomization baselines.

* connected degree-preserving rewiring (double-edge swaps),
* valence-label shuffling on a fixed topology,
* the undirected weighted soft configuration model, a maximum-entropy
  ensemble with geometrically distributed weights whose expected node
  strengths match the observed ones.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ._parallel import parallel_map
from .netbuild import LexicalNetwork

log = logging.getLogger(__name__)

DEGREE_REWIRE = "DegreeRewire"
LABEL_SHUFFLE = "LabelShuffle"
SOFT_WEIGHTED_CM = "SoftWeightedCM"

_STREAM_TAGS = {DEGREE_REWIRE: 1, LABEL_SHUFFLE: 2, SOFT_WEIGHTED_CM: 3}


class NullModelError(RuntimeError):
    pass


class ConvergenceError(NullModelError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3g})")


@dataclass(frozen=True)
class NullEnsembleSpec:
    kind: str
    n_samples: int = 1000
    seed: int = 0
    rewire_multiplier: int = 10

    def __post_init__(self):
        if self.kind not in _STREAM_TAGS:
            raise ValueError(f"unknown null model kind {self.kind!r}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.rewire_multiplier < 1:
            raise ValueError("rewire_multiplier must be >= 1")

    def rng(self, index: int) -> np.random.Generator:
        """Independent stream for realization ``index``."""
        return np.random.default_rng([self.seed, _STREAM_TAGS[self.kind], index])


# -- degree-preserving rewiring ---------------------------------------------

def _reaches(adj: list[set[int]], src: int, dst: int) -> bool:
    if dst in adj[src]:
        return True
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v == dst:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def rewire_edges(n_nodes: int, edges: list[tuple[int, int]], n_attempts: int,
                 rng: np.random.Generator, keep_connected: bool = True) -> list[tuple[int, int]]:
    """Run ``n_attempts`` double-edge swaps on an edge list in id space.

    Each attempt picks two edges (a, b), (c, d) and proposes (a, d), (c, b).
    Proposals creating a self-loop or a parallel edge are rejected; with
    ``keep_connected`` so are proposals after which a no longer reaches b or
    c no longer reaches d, which is exactly the condition for a component
    to split.
    """
    edges = [tuple(e) for e in edges]
    m = len(edges)
    adj: list[set[int]] = [set() for _ in range(n_nodes)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    picks = rng.integers(0, m, size=(n_attempts, 2))
    flips = rng.random(n_attempts) < 0.5
    for t in range(n_attempts):
        i, j = picks[t]
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if flips[t]:
            c, d = d, c
        if a == d or c == b or a == c or b == d:
            continue
        if d in adj[a] or b in adj[c]:
            continue
        adj[a].discard(b); adj[b].discard(a)
        adj[c].discard(d); adj[d].discard(c)
        adj[a].add(d); adj[d].add(a)
        adj[c].add(b); adj[b].add(c)
        if keep_connected and not (_reaches(adj, a, b) and _reaches(adj, c, d)):
            adj[a].discard(d); adj[d].discard(a)
            adj[c].discard(b); adj[b].discard(c)
            adj[a].add(b); adj[b].add(a)
            adj[c].add(d); adj[d].add(c)
            continue
        edges[i] = (a, d)
        edges[j] = (c, b)
    return edges


def _rewire_task(index: int, net: LexicalNetwork, spec: NullEnsembleSpec) -> LexicalNetwork:
    rng = spec.rng(index)
    pairs, _ = net.edge_array()
    n_attempts = spec.rewire_multiplier * len(pairs)
    new = rewire_edges(net.n_nodes, [tuple(p) for p in pairs.tolist()], n_attempts, rng)
    names = net.nodes
    weights = {}
    for a, b in new:
        x, y = names[a], names[b]
        weights[(x, y) if x < y else (y, x)] = 1
    linked = {n for k in weights for n in k}
    return LexicalNetwork(kind=net.kind, weights=weights,
                          isolates=frozenset(n for n in names if n not in linked),
                          params={"null": DEGREE_REWIRE, "index": index})


def degree_rewire(net: LexicalNetwork, spec: NullEnsembleSpec, workers: int = 1) -> list[LexicalNetwork]:
    """Degree-preserving, connectivity-preserving rewired copies of ``net``.

    Weights are discarded: every sampled edge has weight 1.
    """
    if net.n_edges < 2:
        raise NullModelError("degree rewiring needs at least 2 edges")
    return parallel_map(partial(_rewire_task, net=net, spec=spec), range(spec.n_samples), workers)


# -- label shuffling ----------------------------------------------------------

def shuffle_valences(nodes, valence: dict[str, str], rng: np.random.Generator) -> dict[str, str]:
    labels = [valence[n] for n in nodes]
    perm = rng.permutation(len(labels))
    return {n: labels[p] for n, p in zip(nodes, perm)}


def label_shuffle(snet, spec: NullEnsembleSpec) -> list:
    """Signed networks with node valences permuted and signs recomputed."""
    from .signedbalance import signed_from_valences

    out = []
    for k in range(spec.n_samples):
        shuffled = shuffle_valences(snet.base.nodes, snet.node_valence, spec.rng(k))
        out.append(signed_from_valences(snet.base, shuffled))
    return out


# -- weighted soft configuration model ----------------------------------------

@dataclass(frozen=True)
class FittedSoftCM:
    nodes: tuple[str, ...]
    x: np.ndarray
    strengths: np.ndarray
    residual: float
    iterations: int

    def pair_probabilities(self) -> np.ndarray:
        p = np.outer(self.x, self.x)
        np.fill_diagonal(p, 0.0)
        return p

    def expected_strengths(self) -> np.ndarray:
        return expected_strengths(self.x)

    def expected_edge_count(self) -> float:
        """Sum over pairs of P(w_ij > 0) = x_i x_j."""
        p = self.pair_probabilities()
        return float(p.sum() / 2)


def expected_strengths(x: np.ndarray) -> np.ndarray:
    p = np.outer(x, x)
    np.fill_diagonal(p, 0.0)
    return (p / (1.0 - p)).sum(axis=1)


def _max_pair_product(x: np.ndarray) -> float:
    if len(x) < 2:
        return 0.0
    top = np.partition(x, -2)[-2:]
    return float(top[0] * top[1])


def fit_soft_weighted_cm(net: LexicalNetwork, tolerance: float = 1e-8, max_iters: int = 10000,
                         damping: float = 0.5) -> FittedSoftCM:
    """Solve for node multipliers x with sum_j x_i x_j / (1 - x_i x_j) = s_i.

    Damped fixed-point iteration x_i <- s_i / sum_j x_j / (1 - x_i x_j),
    blended geometrically with the previous iterate. The damping factor is
    halved whenever a step would leave the feasible region x_i x_j < 1. Once
    the residual is small the iteration hands over to Newton steps in log x,
    which converge quadratically near the root.
    """
    s = np.array([float(v) for v in net.strength().values()])
    nodes = tuple(net.strength())
    if len(s) < 2:
        raise NullModelError("soft configuration model needs at least 2 nodes")
    if np.any(s <= 0):
        raise NullModelError("every node needs positive strength")

    total = s.sum()
    x = s / math.sqrt(total + s.max() ** 2)
    while _max_pair_product(x) >= 1:
        x *= 0.5

    def residual_of(x):
        return float(np.max(np.abs(expected_strengths(x) - s)))

    res = residual_of(x)
    d = damping
    it = 0
    newton_from = 1e-3
    while it < max_iters and res > tolerance:
        it += 1
        if res < newton_from * max(1.0, s.max()):
            step = _newton_step(x, s)
            if step is not None:
                x = step
                new_res = residual_of(x)
                if new_res < res:
                    res = new_res
                    continue
        p = np.outer(x, x)
        np.fill_diagonal(p, 0.0)
        denom = (x[None, :] / (1.0 - p))
        np.fill_diagonal(denom, 0.0)
        target = s / denom.sum(axis=1)
        while True:
            cand = x ** (1 - d) * target ** d
            if _max_pair_product(cand) < 1:
                break
            d *= 0.5
            if d < 1e-12:
                raise ConvergenceError("soft CM iteration left the feasible region", res)
        x = cand
        res = residual_of(x)
    if res > tolerance:
        raise ConvergenceError(f"soft CM did not converge in {max_iters} iterations", res)
    return FittedSoftCM(nodes=nodes, x=x, strengths=s, residual=res, iterations=it)


def _newton_step(x: np.ndarray, s: np.ndarray) -> np.ndarray | None:
    p = np.outer(x, x)
    np.fill_diagonal(p, 0.0)
    f = (p / (1 - p)).sum(axis=1) - s
    g = p / (1 - p) ** 2
    jac = g + np.diag(g.sum(axis=1))
    delta, *_ = np.linalg.lstsq(jac, -f, rcond=None)
    scale = 1.0
    for _ in range(30):
        cand = x * np.exp(scale * delta)
        if _max_pair_product(cand) < 1:
            return cand
        scale *= 0.5
    return None


def sample_soft_cm_weights(fit: FittedSoftCM, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One draw: returns ``(pairs, weights)`` for pairs with positive weight.

    Weight w_ij ~ Geometric on {0, 1, ...} with P(w >= k) = (x_i x_j)^k.
    """
    n = len(fit.x)
    iu, ju = np.triu_indices(n, k=1)
    p = fit.x[iu] * fit.x[ju]
    u = rng.random(len(p))
    with np.errstate(divide="ignore"):
        w = np.floor(np.log1p(-u) / np.log(p)).astype(np.int64)
    w[p <= 0] = 0
    keep = w > 0
    return np.stack([iu[keep], ju[keep]], axis=1), w[keep]


def _soft_cm_task(index: int, fit: FittedSoftCM, spec: NullEnsembleSpec, kind: str) -> LexicalNetwork:
    pairs, w = sample_soft_cm_weights(fit, spec.rng(index))
    names = fit.nodes
    weights = {}
    for (a, b), wt in zip(pairs.tolist(), w.tolist()):
        x, y = names[a], names[b]
        weights[(x, y) if x < y else (y, x)] = wt
    linked = {n for k in weights for n in k}
    return LexicalNetwork(kind=kind, weights=weights,
                          isolates=frozenset(n for n in names if n not in linked),
                          params={"null": SOFT_WEIGHTED_CM, "index": index})


def sample_soft_cm(fit: FittedSoftCM, spec: NullEnsembleSpec, kind: str = "SVO",
                   workers: int = 1) -> list[LexicalNetwork]:
    return parallel_map(partial(_soft_cm_task, fit=fit, spec=spec, kind=kind),
                        range(spec.n_samples), workers)
