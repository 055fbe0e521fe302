import json
import math

import numpy as np
import pytest
from scipy import stats as sps

from cognet.emoprofile import (
    WHEEL_ORDER,
    ProfileError,
    SemanticFrame,
    emotion_matrix,
    emotion_profile,
    null_fractions,
    profile_comparison,
    semantic_frame,
    wheel_export,
    wheel_json,
    z_threshold,
)
from cognet.ingest import EMOTIONS, AffectLexicons
from cognet.netbuild import LexicalNetwork


def _lexicon(n=400, joy_every=4, fear_words=()):
    vocab = [f"u{i:04d}" for i in range(n)]
    emotions = {}
    for i, w in enumerate(vocab):
        if i % joy_every == 0:
            emotions[w] = frozenset({"joy"})
    for w in fear_words:
        emotions[w] = emotions.get(w, frozenset()) | {"fear"}
    return vocab, AffectLexicons(valence={}, emotions=emotions, emotion_vocabulary=frozenset(vocab),
                                 stopwords=frozenset({"the"}))


def test_semantic_frame():
    net = LexicalNetwork.from_edges("CO", [("love", "life"), ("love", "the"), ("love", "you"), ("a", "b")])
    frame = semantic_frame(net, "love", {"the"})
    assert frame.neighbors == {"life", "you"} and frame.source == "CO"
    assert semantic_frame(net, "a").neighbors == {"b"}
    with pytest.raises(ProfileError):
        semantic_frame(net, "absent")


def test_emotion_matrix_columns_follow_emotion_order():
    lex = AffectLexicons(valence={}, emotions={"x": frozenset({"anger", "trust"})})
    m = emotion_matrix(["x", "y"], lex)
    assert m.shape == (2, 8)
    assert [EMOTIONS[k] for k in np.flatnonzero(m[0])] == ["anger", "trust"]
    assert not m[1].any()


def test_null_fractions_follow_hypergeometric_law():
    universe = np.zeros((200, 8), dtype=bool)
    universe[:50, 0] = True
    draws = null_fractions(universe, 20, 4000, np.random.default_rng(1))
    k = draws[:, 0] * 20
    ref = sps.hypergeom(200, 50, 20)
    assert abs(k.mean() - ref.mean()) < 4 * ref.std() / math.sqrt(4000)
    assert k.var(ddof=1) == pytest.approx(ref.var(), rel=0.1)
    assert draws[:, 1:].max() == 0


def test_null_fractions_without_replacement():
    universe = np.zeros((10, 8), dtype=bool)
    universe[:3, 2] = True
    draws = null_fractions(universe, 10, 50, np.random.default_rng(0))
    assert np.all(draws[:, 2] == 0.3)
    with pytest.raises(ProfileError):
        null_fractions(universe, 11, 5, np.random.default_rng(0))


def test_profile_observed_fractions_and_significance():
    vocab, lex = _lexicon(fear_words=[f"u{i:04d}" for i in range(1, 400, 40)])
    frame_words = [f"u{i:04d}" for i in range(1, 400, 40)]  # all fear, no joy
    frame = SemanticFrame("focus", frozenset(frame_words), "SVO")
    prof = emotion_profile(frame, lex, n_samples=500, seed=3)
    scores = prof.by_emotion()
    assert scores["fear"].fraction == 1.0 and scores["fear"].significant
    assert scores["fear"].z > z_threshold()
    assert scores["joy"].fraction == 0.0 and not scores["joy"].significant
    assert scores["anger"].z is None and not scores["anger"].significant
    assert prof.sample_size == 10
    again = emotion_profile(frame, lex, n_samples=500, seed=3)
    assert again == prof


def test_profile_threshold_is_empirical_quantile():
    vocab, lex = _lexicon()
    frame = SemanticFrame("f", frozenset(vocab[:30]), "CO")
    prof = emotion_profile(frame, lex, n_samples=300, seed=0)
    joy = prof.by_emotion()["joy"]
    assert joy.fraction == pytest.approx(8 / 30)
    assert joy.significant == (joy.fraction > joy.threshold)
    assert joy.null_mean == pytest.approx(0.25, abs=0.02)


def test_covered_only_and_errors():
    vocab, lex = _lexicon()
    frame = SemanticFrame("f", frozenset(vocab[:4] + ["outside1", "outside2"]), "CO")
    assert emotion_profile(frame, lex, n_samples=100).sample_size == 6
    assert emotion_profile(frame, lex, n_samples=100, covered_only=True).sample_size == 4
    with pytest.raises(ProfileError):
        emotion_profile(SemanticFrame("f", frozenset(), "CO"), lex)
    with pytest.raises(ProfileError):
        emotion_profile(frame, lex, n_samples=99)
    with pytest.raises(ProfileError):
        emotion_profile(SemanticFrame("f", frozenset({"outside"}), "CO"), lex, covered_only=True)


def test_profile_comparison():
    fear = [f"u{i:04d}" for i in range(1, 400, 40)]
    vocab, lex = _lexicon(fear_words=fear)
    a = LexicalNetwork.from_edges("CO", [("hub", w) for w in fear])
    b = LexicalNetwork.from_edges("FA", [("hub", w) for w in vocab[0:40:4]])
    cmp = profile_comparison(a, b, "hub", lex, n_samples=300)
    assert "fear" in cmp.only_a and "joy" in cmp.only_b
    d = cmp.as_dict()
    assert d["significant_only_in_a"] == list(cmp.only_a)


def test_wheel_export():
    vocab, lex = _lexicon()
    prof = emotion_profile(SemanticFrame("f", frozenset(vocab[:40]), "CO"), lex, n_samples=100)
    wheel = wheel_export(prof)
    assert [e["emotion"] for e in wheel["emotions"]] == list(WHEEL_ORDER)
    assert sorted(WHEEL_ORDER) == list(EMOTIONS)
    assert wheel["threshold_radius"] == pytest.approx(1.6448536269514722)
    assert json.loads(wheel_json(prof)) == json.loads(json.dumps(wheel))
