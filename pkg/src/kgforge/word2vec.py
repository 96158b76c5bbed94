"""Token embeddings from walk corpora: skip-gram and CBOW with negative sampling.

The trainer is a plain SGD loop over (target, context) pairs inside a
symmetric window. Sigmoid inputs are clamped to [-6, 6] so no update can
overflow; noise tokens are drawn from the unigram^0.75 distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .walks import WalkCorpus

ARCHITECTURES = ("skipgram", "cbow")

_CLAMP = 6.0


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -_CLAMP, _CLAMP)))


@dataclass
class W2VConfig:
    dimension: int = 50
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_count: int = 1
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.negatives <= 0:
            raise ValueError("negatives must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class TokenEmbeddings:
    """Token -> vector map with the training-internal context vectors kept."""

    tokens: list[str]
    vectors: np.ndarray
    context_vectors: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)
    token_ids: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.token_ids:
            self.token_ids = {tok: i for i, tok in enumerate(self.tokens)}

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, token: str) -> bool:
        return token in self.token_ids

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.token_ids[token]]

    def save_text(self, path) -> None:
        """`vocab_size k` header then `token v1 ... vk` rows."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.tokens)} {self.dimension}\n")
            for tok, row in zip(self.tokens, self.vectors):
                fh.write(tok + " " + " ".join(f"{x:.8g}" for x in row) + "\n")

    @staticmethod
    def load_text(path) -> "TokenEmbeddings":
        with open(path, "r", encoding="utf-8") as fh:
            n, k = (int(x) for x in fh.readline().split())
            tokens, rows = [], []
            for _ in range(n):
                parts = fh.readline().rstrip("\n").rsplit(" ", k)
                tokens.append(parts[0])
                rows.append([float(x) for x in parts[1:]])
        return TokenEmbeddings(tokens=tokens, vectors=np.array(rows),
                               metadata={"loaded_from": str(path)})


def negative_sample(frequencies, n: int, exclude: str | None = None,
                    rng=None) -> list[str]:
    """Draw `n` noise tokens i.i.d. from unigram^0.75, none equal to `exclude`."""
    tokens = list(frequencies)
    if len(tokens) < 2:
        raise ValueError("negative sampling needs a vocabulary of at least 2 tokens")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    weights = np.array([float(frequencies[t]) for t in tokens]) ** 0.75
    cum = np.cumsum(weights / weights.sum())
    draws = np.searchsorted(cum, rng.random(n), side="right")
    if exclude is not None and exclude in frequencies:
        banned = tokens.index(exclude)
        clash = draws == banned
        while clash.any():
            draws[clash] = np.searchsorted(cum, rng.random(int(clash.sum())), side="right")
            clash = draws == banned
    return [tokens[i] for i in draws]


# -- objectives (also used by gradient checks) -----------------------------------


def skipgram_objective(w, c_pos, c_negs):
    """Negative log-likelihood of one pair plus its noise tokens.

    loss = -log s(w.c) - sum log s(-w.n_i); returns (loss, gw, gc, gnegs).
    """
    w = np.asarray(w, dtype=float)
    c_pos = np.asarray(c_pos, dtype=float)
    c_negs = np.atleast_2d(np.asarray(c_negs, dtype=float))
    s_pos = _sigmoid(w @ c_pos)
    s_neg = _sigmoid(c_negs @ w)
    loss = -float(np.log(s_pos) + np.log(1.0 - s_neg).sum())
    coeff_pos = s_pos - 1.0
    gw = coeff_pos * c_pos + s_neg @ c_negs
    gc = coeff_pos * w
    gnegs = s_neg[:, None] * w[None, :]
    return loss, gw, gc, gnegs


def cbow_objective(context_vecs, c_pos, c_negs):
    """CBOW variant: the predictor is the mean of the window's input vectors.

    Returns (loss, gcontext, gc, gnegs) with gcontext shaped like the input.
    """
    ctx = np.atleast_2d(np.asarray(context_vecs, dtype=float))
    h = ctx.mean(axis=0)
    loss, gh, gc, gnegs = skipgram_objective(h, c_pos, c_negs)
    gctx = np.tile(gh / ctx.shape[0], (ctx.shape[0], 1))
    return loss, gctx, gc, gnegs


# -- training --------------------------------------------------------------------


class _NoiseTable:
    def __init__(self, counts: np.ndarray):
        weights = counts.astype(float) ** 0.75
        self.cum = np.cumsum(weights / weights.sum())

    def draw(self, n: int, exclude: int, rng: np.random.Generator) -> np.ndarray:
        draws = np.searchsorted(self.cum, rng.random(n), side="right")
        clash = draws == exclude
        while clash.any():
            draws[clash] = np.searchsorted(self.cum, rng.random(int(clash.sum())),
                                           side="right")
            clash = draws == exclude
        return draws


def _pair_update(h, w_out, cands, labels, lr):
    """One negative-sampling step; returns the pair loss and the predictor grad."""
    s = _sigmoid(w_out[cands] @ h)
    loss = -float(np.log(np.where(labels, s, 1.0 - s)).sum())
    coeff = s - labels
    gh = coeff @ w_out[cands]
    np.subtract.at(w_out, cands, lr * coeff[:, None] * h)
    return loss, gh


def train_sequences(corpus: WalkCorpus, architecture: str,
                    config: W2VConfig) -> TokenEmbeddings:
    """SGD over windowed pairs; deterministic for a fixed seed, single worker."""
    if architecture not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {architecture!r}")
    config.validate()
    if not corpus.sequences:
        raise ValueError("cannot train on an empty corpus")
    kept = [tok for tok, cnt in corpus.vocabulary.items() if cnt >= config.min_count]
    if not kept:
        raise ValueError("min_count leaves no vocabulary")
    ids = {tok: i for i, tok in enumerate(kept)}
    counts = np.array([corpus.vocabulary[tok] for tok in kept], dtype=float)
    seqs = [[ids[t] for t in seq if t in ids] for seq in corpus.sequences]
    seqs = [s for s in seqs if s]

    rng = np.random.default_rng(config.seed)
    k = config.dimension
    w_in = (rng.random((len(kept), k)) - 0.5) / k
    w_out = np.zeros((len(kept), k))
    noise = _NoiseTable(counts)
    lr = config.learning_rate
    loss_history: list[float] = []

    for _ in range(config.epochs):
        order = rng.permutation(len(seqs))
        total, pairs = 0.0, 0
        for si in order:
            seq = seqs[si]
            for pos, center in enumerate(seq):
                lo = max(0, pos - config.window)
                hi = min(len(seq), pos + config.window + 1)
                context = [seq[j] for j in range(lo, hi) if j != pos]
                if not context:
                    continue
                if architecture == "skipgram":
                    for ctx in context:
                        negs = noise.draw(config.negatives, ctx, rng)
                        cands = np.concatenate(([ctx], negs))
                        labels = np.zeros(len(cands))
                        labels[0] = 1.0
                        loss, gh = _pair_update(w_in[center], w_out, cands, labels, lr)
                        w_in[center] -= lr * gh
                        total += loss
                        pairs += 1
                else:
                    negs = noise.draw(config.negatives, center, rng)
                    cands = np.concatenate(([center], negs))
                    labels = np.zeros(len(cands))
                    labels[0] = 1.0
                    h = w_in[context].mean(axis=0)
                    loss, gh = _pair_update(h, w_out, cands, labels, lr)
                    np.subtract.at(w_in, context, lr * gh / len(context))
                    total += loss
                    pairs += 1
        loss_history.append(total / max(pairs, 1))

    metadata = {"architecture": architecture, "window": config.window,
                "negatives": config.negatives, "epochs": config.epochs,
                "learning_rate": config.learning_rate,
                "min_count": config.min_count, "seed": config.seed,
                "loss_history": loss_history}
    return TokenEmbeddings(tokens=kept, vectors=w_in, context_vectors=w_out,
                           metadata=metadata)
