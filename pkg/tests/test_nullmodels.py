import itertools
import math
from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from cognet.ingest import NEGATIVE, NEUTRAL, POSITIVE
from cognet.netbuild import LexicalNetwork
from cognet.nullmodels import (
    DEGREE_REWIRE,
    LABEL_SHUFFLE,
    SOFT_WEIGHTED_CM,
    NullEnsembleSpec,
    NullModelError,
    degree_rewire,
    fit_soft_weighted_cm,
    label_shuffle,
    rewire_edges,
    sample_soft_cm,
    sample_soft_cm_weights,
    shuffle_valences,
)
from cognet.signedbalance import signed_from_valences

from conftest import random_graph


def test_spec_validation_and_streams():
    with pytest.raises(ValueError):
        NullEnsembleSpec("Bogus")
    with pytest.raises(ValueError):
        NullEnsembleSpec(DEGREE_REWIRE, n_samples=0)
    with pytest.raises(ValueError):
        NullEnsembleSpec(DEGREE_REWIRE, rewire_multiplier=0)
    spec = NullEnsembleSpec(DEGREE_REWIRE, seed=5)
    assert spec.rng(3).random() == NullEnsembleSpec(DEGREE_REWIRE, seed=5).rng(3).random()
    assert spec.rng(3).random() != spec.rng(4).random()
    assert spec.rng(3).random() != NullEnsembleSpec(LABEL_SHUFFLE, seed=5).rng(3).random()


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 30), st.floats(0.1, 0.6), st.integers(0, 10_000), st.booleans())
def test_rewire_preserves_degrees_and_simplicity(n, p, seed, keep_connected):
    g = nx.gnp_random_graph(n, p, seed=seed)
    edges = list(g.edges())
    if len(edges) < 2:
        return
    new = rewire_edges(n, edges, 5 * len(edges), np.random.default_rng(seed), keep_connected)
    h = nx.Graph(new)
    h.add_nodes_from(range(n))
    assert h.number_of_edges() == len(edges)
    assert all(u != v for u, v in new)
    assert dict(h.degree()) == dict(g.degree())
    if keep_connected:
        # swaps may merge components but never split one
        assert nx.number_connected_components(h) <= nx.number_connected_components(g)


def test_degree_rewire_output():
    net = random_graph(20, 0.3, seed=1)
    samples = degree_rewire(net, NullEnsembleSpec(DEGREE_REWIRE, 5, seed=1))
    assert [s.params["index"] for s in samples] == list(range(5))
    assert all(set(s.weights.values()) == {1} for s in samples)
    assert all(s.nodes == net.nodes for s in samples)
    with pytest.raises(NullModelError):
        degree_rewire(LexicalNetwork.from_edges("CO", [("a", "b")]), NullEnsembleSpec(DEGREE_REWIRE, 1))


def test_label_shuffle_is_uniform_over_permutations():
    nodes = ("a", "b", "c", "d")
    val = {"a": "p", "b": "q", "c": "r", "d": "s"}
    spec = NullEnsembleSpec(LABEL_SHUFFLE, seed=8)
    counts = Counter(tuple(shuffle_valences(nodes, val, spec.rng(i)).values()) for i in range(4800))
    perms = set(itertools.permutations("pqrs"))
    assert set(counts) == perms
    assert sps.chisquare([counts[p] for p in sorted(perms)]).pvalue > 0.001


def test_label_shuffle_ensemble():
    net = random_graph(12, 0.4, seed=2)
    val = {n: (POSITIVE, NEUTRAL, NEGATIVE)[i % 3] for i, n in enumerate(net.nodes)}
    shuffled = label_shuffle(signed_from_valences(net, val), NullEnsembleSpec(LABEL_SHUFFLE, 10, seed=2))
    for s in shuffled:
        assert s.base is net
        assert Counter(s.node_valence.values()) == Counter(val.values())
        assert s.is_consistent()


def _weighted(seed, n=10, p=0.6):
    rng = np.random.default_rng(seed)
    g = nx.gnp_random_graph(n, p, seed=seed)
    return LexicalNetwork.from_edges(
        "SVO", {(f"w{u:02d}", f"w{v:02d}"): int(rng.integers(1, 6)) for u, v in g.edges()})


def test_soft_cm_expectation_by_direct_loops():
    net = _weighted(3)
    fit = fit_soft_weighted_cm(net)
    x = dict(zip(fit.nodes, fit.x))
    strength = net.strength()
    for i in fit.nodes:
        expected = sum(x[i] * x[j] / (1 - x[i] * x[j]) for j in fit.nodes if j != i)
        assert abs(expected - strength[i]) < 1e-6
    assert fit.residual < 1e-8
    probs = fit.pair_probabilities()
    assert np.all(probs < 1) and np.all(np.diag(probs) == 0)


def test_soft_cm_edge_presence_and_weight_law():
    net = _weighted(4, n=6, p=0.8)
    fit = fit_soft_weighted_cm(net)
    rng = np.random.default_rng(0)
    n = len(fit.nodes)
    present = np.zeros((n, n))
    total_w = np.zeros((n, n))
    draws = 4000
    for _ in range(draws):
        pairs, w = sample_soft_cm_weights(fit, rng)
        for (a, b), wt in zip(pairs.tolist(), w.tolist()):
            present[a, b] += 1
            total_w[a, b] += wt
    for a, b in itertools.combinations(range(n), 2):
        q = fit.x[a] * fit.x[b]
        se = math.sqrt(q * (1 - q) / draws)
        assert abs(present[a, b] / draws - q) < 4 * se + 1e-12
        mean_w = q / (1 - q)
        sd_w = math.sqrt(q) / (1 - q)
        assert abs(total_w[a, b] / draws - mean_w) < 4 * sd_w / math.sqrt(draws)
    assert abs(fit.expected_edge_count() - sum(fit.x[a] * fit.x[b] for a, b in
                                               itertools.combinations(range(n), 2))) < 1e-12


def test_soft_cm_sample_networks():
    fit = fit_soft_weighted_cm(_weighted(5))
    spec = NullEnsembleSpec(SOFT_WEIGHTED_CM, 8, seed=5)
    a = sample_soft_cm(fit, spec)
    b = sample_soft_cm(fit, spec, workers=2)
    assert [dict(s.weights) for s in a] == [dict(s.weights) for s in b]
    assert all(s.nodes == fit.nodes for s in a)


def test_soft_cm_errors():
    with pytest.raises(NullModelError):
        fit_soft_weighted_cm(LexicalNetwork.from_edges("SVO", [("a", "b")], isolates=["c"]))
