"""Semantic frames and their emotional profiles against random word samples."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import EMOTIONS, AffectLexicons
from .netbuild import LexicalNetwork

ALPHA = 0.05

# clockwise order of the emotion wheel
WHEEL_ORDER = ("anger", "anticipation", "joy", "trust", "fear", "surprise", "sadness", "disgust")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticFrame:
    focus: str
    neighbors: frozenset[str]
    source: str

    @property
    def empty(self) -> bool:
        return not self.neighbors


def semantic_frame(net: LexicalNetwork, focus: str, stopwords: Iterable[str] = ()) -> SemanticFrame:
    if focus not in net:
        raise ProfileError(f"focus lemma {focus!r} not in {net.kind} network")
    nb = net.neighbors(focus) - set(stopwords) - {focus}
    return SemanticFrame(focus, frozenset(nb), net.kind)


@dataclass(frozen=True)
class EmotionScore:
    emotion: str
    fraction: float
    null_mean: float
    null_sd: float
    z: float | None
    threshold: float
    significant: bool

    def as_dict(self) -> dict:
        return {"emotion": self.emotion, "fraction": self.fraction, "null_mean": self.null_mean,
                "null_sd": self.null_sd, "z": self.z, "threshold": self.threshold,
                "significant": self.significant}


@dataclass(frozen=True)
class EmotionProfile:
    focus: str
    source: str
    sample_size: int
    scores: tuple[EmotionScore, ...]
    n_samples: int
    seed: int
    alpha: float = ALPHA

    def by_emotion(self) -> dict[str, EmotionScore]:
        return {s.emotion: s for s in self.scores}

    def as_dict(self) -> dict:
        return {"focus": self.focus, "source": self.source, "sample_size": self.sample_size,
                "n_samples": self.n_samples, "seed": self.seed, "alpha": self.alpha,
                "emotions": [s.as_dict() for s in self.scores]}


def emotion_matrix(lemmas: Sequence[str], lex: AffectLexicons) -> np.ndarray:
    """Boolean (len(lemmas), 8) matrix of elicited emotions."""
    m = np.zeros((len(lemmas), len(EMOTIONS)), dtype=bool)
    col = {e: k for k, e in enumerate(EMOTIONS)}
    for i, lemma in enumerate(lemmas):
        for e in lex.emotions.get(lemma, ()):
            m[i, col[e]] = True
    return m


def lemma_stream_seed(seed: int, lemma: str) -> list[int]:
    digest = hashlib.sha256(lemma.encode("utf-8")).digest()
    return [seed, int.from_bytes(digest[:8], "little")]


def null_fractions(universe_matrix: np.ndarray, size: int, n_samples: int,
                   rng: np.random.Generator) -> np.ndarray:
    """(n_samples, 8) emotion fractions of ``size`` words drawn without
    replacement from the universe."""
    n = universe_matrix.shape[0]
    if size > n:
        raise ProfileError(f"frame of {size} words exceeds sampling universe of {n}")
    counts = universe_matrix.astype(np.int32)
    out = np.empty((n_samples, counts.shape[1]))
    for k in range(n_samples):
        idx = rng.choice(n, size=size, replace=False)
        out[k] = counts[idx].sum(axis=0)
    return out / size


def _universe(lex: AffectLexicons, universe: Iterable[str] | None) -> list[str]:
    if universe is not None:
        return sorted(set(universe))
    vocab = lex.emotion_vocabulary or frozenset(lex.emotions)
    return sorted(vocab)


def emotion_profile(frame: SemanticFrame, lex: AffectLexicons, n_samples: int = 1000, seed: int = 0,
                    universe: Iterable[str] | None = None, covered_only: bool = False,
                    alpha: float = ALPHA) -> EmotionProfile:
    """Per-emotion fraction of frame words eliciting it, z-scored against
    random samples of the same size.

    Samples come from the emotion lexicon's vocabulary unless ``universe``
    is given. With ``covered_only`` frame words absent from the lexicon are
    left out of the denominator. An emotion is significant when its observed
    fraction exceeds the (1 - alpha) quantile of the sampled fractions.
    """
    if frame.empty:
        raise ProfileError(f"semantic frame of {frame.focus!r} is empty")
    if n_samples < 100:
        raise ProfileError("n_samples must be >= 100")
    words = sorted(frame.neighbors)
    if covered_only:
        vocab = lex.emotion_vocabulary or frozenset(lex.emotions)
        words = [w for w in words if w in vocab]
        if not words:
            raise ProfileError(f"no frame word of {frame.focus!r} is covered by the emotion lexicon")
    observed = emotion_matrix(words, lex).mean(axis=0)
    uni = _universe(lex, universe)
    rng = np.random.default_rng(lemma_stream_seed(seed, frame.focus))
    null = null_fractions(emotion_matrix(uni, lex), len(words), n_samples, rng)
    means = null.mean(axis=0)
    sds = null.std(axis=0, ddof=1)
    thresholds = np.quantile(null, 1 - alpha, axis=0)
    scores = []
    for k, e in enumerate(EMOTIONS):
        z = None if sds[k] == 0 else float((observed[k] - means[k]) / sds[k])
        scores.append(EmotionScore(e, float(observed[k]), float(means[k]), float(sds[k]), z,
                                   float(thresholds[k]), bool(observed[k] > thresholds[k])))
    return EmotionProfile(frame.focus, frame.source, len(words), tuple(scores), n_samples, seed, alpha)


@dataclass(frozen=True)
class ProfileComparison:
    focus: str
    a: EmotionProfile
    b: EmotionProfile
    only_a: tuple[str, ...]
    only_b: tuple[str, ...]

    def as_dict(self) -> dict:
        return {"focus": self.focus, "a": self.a.as_dict(), "b": self.b.as_dict(),
                "significant_only_in_a": list(self.only_a), "significant_only_in_b": list(self.only_b)}


def profile_comparison(net_a: LexicalNetwork, net_b: LexicalNetwork, focus: str, lex: AffectLexicons,
                       n_samples: int = 1000, seed: int = 0, **kwargs) -> ProfileComparison:
    pa = emotion_profile(semantic_frame(net_a, focus, lex.stopwords), lex, n_samples, seed, **kwargs)
    pb = emotion_profile(semantic_frame(net_b, focus, lex.stopwords), lex, n_samples, seed, **kwargs)
    sa = {s.emotion for s in pa.scores if s.significant}
    sb = {s.emotion for s in pb.scores if s.significant}
    return ProfileComparison(focus, pa, pb,
                             tuple(e for e in EMOTIONS if e in sa - sb),
                             tuple(e for e in EMOTIONS if e in sb - sa))


def z_threshold(alpha: float = ALPHA) -> float:
    """One-sided normal critical value, used as the wheel's reference ring."""
    from scipy.stats import norm

    return float(norm.ppf(1 - alpha))


def wheel_export(profile: EmotionProfile) -> dict:
    scores = profile.by_emotion()
    return {
        "focus": profile.focus,
        "source": profile.source,
        "alpha": profile.alpha,
        "threshold_radius": z_threshold(profile.alpha),
        "emotions": [
            {"emotion": e, "z": scores[e].z, "significant": scores[e].significant}
            for e in WHEEL_ORDER
        ],
    }


def wheel_json(profile: EmotionProfile) -> str:
    return json.dumps(wheel_export(profile), sort_keys=True, indent=2)
