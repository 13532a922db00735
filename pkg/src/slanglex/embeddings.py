"""Skip-gram with negative sampling over slang usage examples.

Training is single-threaded and deterministic for a fixed seed. The
published vectors are the input (center-word) vectors. Persisted tables
use the common text format: a `<vocab> <dim>` header line, then one
`token v1 ... v_d` line per word, which also lets the loader read
third-party reference embeddings for the bias comparisons.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import LexiconEntry
from .errors import AnalysisError, SchemaError

# underscore admitted so joined multiword headwords survive the split
_TOKEN_RE = re.compile(r"[a-z0-9_]+(?:'[a-z0-9_]+)*")


@dataclass(frozen=True)
class TrainingConfig:
    dimension: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    min_count: int = 5
    subsample_threshold: float = 1e-3  # <= 0 disables subsampling
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise AnalysisError(f"dimension must be >= 1, got {self.dimension}")
        if self.window < 1:
            raise AnalysisError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise AnalysisError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise AnalysisError(f"epochs must be >= 1, got {self.epochs}")
        if self.min_count < 1:
            raise AnalysisError(f"min_count must be >= 1, got {self.min_count}")
        if not self.initial_lr > 0:
            raise AnalysisError("initial_lr must be positive")


class EmbeddingTable:
    """token -> d-dimensional vector, with corpus counts as metadata."""

    def __init__(self, tokens: Sequence[str], matrix: np.ndarray,
                 counts: Mapping[str, int],
                 epoch_losses: tuple[float, ...] = ()):
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise AnalysisError("embedding matrix does not match token list")
        if not np.all(np.isfinite(matrix)):
            raise AnalysisError("embedding matrix contains non-finite values")
        self.tokens = tuple(tokens)
        self.matrix = matrix
        self.counts = dict(counts)
        self.epoch_losses = epoch_losses
        self._index = {t: i for i, t in enumerate(self.tokens)}
        if len(self._index) != len(self.tokens):
            raise AnalysisError("duplicate tokens in embedding table")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.tokens)

    def vector(self, token: str) -> np.ndarray:
        i = self._index.get(token)
        if i is None:
            raise AnalysisError(f"token {token!r} not in embedding vocabulary")
        return self.matrix[i]


def build_usage_corpus(entries: Iterable[LexiconEntry]) -> list[list[str]]:
    """Token sequences from example sentences.

    Text is lowercased and split on whitespace/punctuation with apostrophes
    kept inside tokens. Occurrences of any known multiword headword are
    replaced by its underscore-joined form before splitting, greedy longest
    phrase first.
    """
    entries = list(entries)
    phrases = {}
    for entry in entries:
        head = entry.headword.strip().lower()
        if re.search(r"\s", head):
            phrases[head] = "_".join(head.split())
    replacements = [
        (re.compile(r"\b" + r"\s+".join(re.escape(w) for w in phrase.split())
                    + r"\b"), joined)
        for phrase, joined in sorted(phrases.items(),
                                     key=lambda kv: (-len(kv[0]), kv[0]))
    ]
    corpus = []
    for entry in entries:
        for example in entry.examples:
            text = example.lower()
            for pattern, joined in replacements:
                text = pattern.sub(joined, text)
            tokens = _TOKEN_RE.findall(text)
            if tokens:
                corpus.append(tokens)
    return corpus


def _log_sigmoid(x: float) -> float:
    return -float(np.logaddexp(0.0, -x))


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def sgns_pair_gradients(center: np.ndarray, positive: np.ndarray,
                        negatives: np.ndarray
                        ) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Loss and gradients for one (center, context, negatives) update.

    loss = -log sigmoid(u.v+) - sum_j log sigmoid(-u.v_j). Returns
    (loss, d/du, d/dv+, d/dV-) so the trainer and the gradient checks share
    one definition.
    """
    pos_dot = float(center @ positive)
    neg_dots = negatives @ center
    loss = -_log_sigmoid(pos_dot) - sum(
        _log_sigmoid(-dot) for dot in neg_dots)
    g_pos = _sigmoid(pos_dot) - 1.0
    g_negs = _sigmoid(neg_dots)
    grad_center = g_pos * positive + g_negs @ negatives
    grad_positive = g_pos * center
    grad_negatives = np.outer(g_negs, center)
    return loss, grad_center, grad_positive, grad_negatives


def train_skipgram(corpus: Sequence[Sequence[str]],
                   config: TrainingConfig) -> EmbeddingTable:
    """Train SGNS embeddings; negatives come from the unigram^0.75 table."""
    counts: dict[str, int] = {}
    for sentence in corpus:
        for token in sentence:
            counts[token] = counts.get(token, 0) + 1
    vocab = sorted((t for t, c in counts.items() if c >= config.min_count),
                   key=lambda t: (-counts[t], t))
    if not vocab:
        raise AnalysisError(
            f"no token appears at least min_count={config.min_count} times")
    index = {t: i for i, t in enumerate(vocab)}
    vocab_counts = np.array([counts[t] for t in vocab], dtype=np.float64)
    total = float(vocab_counts.sum())

    keep_prob = np.ones(len(vocab))
    if config.subsample_threshold > 0:
        freq = vocab_counts / total
        with np.errstate(divide="ignore"):
            keep_prob = np.minimum(
                1.0, np.sqrt(config.subsample_threshold / freq))

    noise = vocab_counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    rng = np.random.default_rng(config.seed)
    d = config.dimension
    vectors = (rng.random((len(vocab), d)) - 0.5) / d
    context = np.zeros((len(vocab), d))

    sentences = [[index[t] for t in sent if t in index] for sent in corpus]
    epoch_losses = []
    for epoch in range(config.epochs):
        lr = max(config.initial_lr * (1.0 - epoch / config.epochs),
                 config.initial_lr * 1e-4)
        loss_sum = 0.0
        n_pairs = 0
        for sent in sentences:
            kept = [w for w in sent
                    if keep_prob[w] >= 1.0 or rng.random() < keep_prob[w]]
            for i, center in enumerate(kept):
                b = int(rng.integers(1, config.window + 1))
                window_ids = kept[max(0, i - b):i] + kept[i + 1:i + 1 + b]
                for ctx in window_ids:
                    negs = noise_cdf.searchsorted(
                        rng.random(config.negatives))
                    negs = negs[negs != ctx]
                    loss, g_c, g_p, g_n = sgns_pair_gradients(
                        vectors[center], context[ctx], context[negs])
                    vectors[center] -= lr * g_c
                    context[ctx] -= lr * g_p
                    np.subtract.at(context, negs, lr * g_n)
                    loss_sum += loss
                    n_pairs += 1
        epoch_losses.append(loss_sum / n_pairs if n_pairs else 0.0)

    return EmbeddingTable(tokens=vocab, matrix=vectors,
                          counts={t: int(counts[t]) for t in vocab},
                          epoch_losses=tuple(epoch_losses))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    if u.shape != v.shape:
        raise AnalysisError(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise AnalysisError("cosine undefined for a zero vector")
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def nearest(table: EmbeddingTable, token: str,
            k: int) -> list[tuple[str, float]]:
    """Exact top-k neighbors by cosine, ties broken lexicographically."""
    if k < 1:
        raise AnalysisError(f"k must be at least 1, got {k}")
    query = table.vector(token)
    qn = float(np.linalg.norm(query))
    if qn == 0.0:
        raise AnalysisError(f"token {token!r} has a zero vector")
    norms = np.linalg.norm(table.matrix, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = table.matrix @ query / (norms * qn)
    sims = np.where(norms == 0.0, -2.0, sims)  # zero vectors sort last
    ranked = sorted(
        ((other, float(np.clip(sims[i], -2.0, 1.0)))
         for i, other in enumerate(table.tokens) if other != token),
        key=lambda pair: (-pair[1], pair[0]))
    return ranked[:k]


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{len(table)} {table.dimension}\n")
        for i, token in enumerate(table.tokens):
            row = " ".join(f"{x:.6f}" for x in table.matrix[i])
            handle.write(f"{token} {row}\n")


def load_embeddings(path) -> EmbeddingTable:
    """Read the text vector format; counts are not stored in this format,
    so every loaded token gets count 1."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise SchemaError("expected '<vocab> <dim>' header", line=1)
        try:
            n_tokens, dim = int(header[0]), int(header[1])
        except ValueError:
            raise SchemaError("non-integer header fields", line=1) from None
        tokens = []
        rows = []
        for lineno, line in enumerate(handle, 2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise SchemaError(
                    f"expected token plus {dim} values", line=lineno)
            tokens.append(parts[0])
            try:
                rows.append([float(x) for x in parts[1:]])
            except ValueError:
                raise SchemaError("non-numeric vector value",
                                  line=lineno) from None
    if len(tokens) != n_tokens:
        raise SchemaError(
            f"header declared {n_tokens} tokens, file has {len(tokens)}")
    matrix = np.array(rows, dtype=np.float64).reshape(len(tokens), dim)
    return EmbeddingTable(tokens=tokens, matrix=matrix,
                          counts={t: 1 for t in tokens})
