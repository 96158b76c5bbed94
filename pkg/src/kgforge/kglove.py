"""Global co-occurrence embeddings: weighted PPR contexts plus GloVe training.

The co-occurrence matrix row for an entity is its approximate personalized
PageRank score vector on the weighted graph plus the same computation on the
reversed graph, self-score zeroed, row-normalized. exact_ppr is kept as the
power-iteration oracle the push approximation is checked against.
"""

from __future__ import annotations

import heapq
import struct
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graph import KnowledgeGraph, reverse_graph
from .word2vec import TokenEmbeddings

WEIGHTINGS = ("uniform", "predicate-frequency", "inverse-predicate-frequency")

_COOC_MAGIC = b"KGCOOC01"


@dataclass
class WeightedGraph:
    """Graph plus per-edge transition weights, normalized per source vertex."""

    graph: KnowledgeGraph
    out_weights: list  # per vertex: list of (relation, successor, weight)

    def is_dangling(self, v: int) -> bool:
        return not self.out_weights[v]

    def merged_transitions(self, v: int) -> list[tuple[int, float]]:
        """(successor, weight) pairs with parallel edges collapsed."""
        acc: dict[int, float] = {}
        for _, succ, w in self.out_weights[v]:
            acc[succ] = acc.get(succ, 0.0) + w
        return sorted(acc.items())


def weigh_edges(g: KnowledgeGraph, strategy: str = "uniform") -> WeightedGraph:
    """Assign per-edge transition weights, normalized to sum 1 per vertex.

    uniform: 1/out-degree. predicate-frequency: proportional to the global
    triple count of the edge's relation. inverse-predicate-frequency: the
    reciprocal of that count.
    """
    if strategy not in WEIGHTINGS:
        raise ValueError(f"unknown weighting strategy {strategy!r}")
    counts = Counter(r for _, r, _ in g.triples)
    out_weights = []
    for v in range(g.n_entities):
        edges = g.out_adj[v]
        if not edges:
            out_weights.append([])
            continue
        if strategy == "uniform":
            raw = [1.0] * len(edges)
        elif strategy == "predicate-frequency":
            raw = [float(counts[r]) for r, _ in edges]
        else:
            raw = [1.0 / counts[r] for r, _ in edges]
        total = sum(raw)
        out_weights.append([(r, t, w / total) for (r, t), w in zip(edges, raw)])
    return WeightedGraph(graph=g, out_weights=out_weights)


# -- personalized PageRank -------------------------------------------------------


def exact_ppr(wg: WeightedGraph, focus: int, alpha: float,
              tol: float = 1e-12, max_iter: int = 200000) -> np.ndarray:
    """Stationary restart-walk distribution by power iteration.

    Dangling mass is teleported back to the focus, keeping the iteration a
    true stochastic fixed point; scores sum to 1.
    """
    n = wg.graph.n_entities
    if not 0 <= focus < n:
        raise ValueError(f"unknown focus id {focus}")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    P = np.zeros((n, n))
    dangling = np.zeros(n, dtype=bool)
    for v in range(n):
        trans = wg.merged_transitions(v)
        if not trans:
            dangling[v] = True
            continue
        for succ, w in trans:
            P[v, succ] += w
    p = np.zeros(n)
    p[focus] = 1.0
    for _ in range(max_iter):
        nxt = (1.0 - alpha) * (P.T @ p)
        nxt[focus] += alpha + (1.0 - alpha) * p[dangling].sum()
        if np.abs(nxt - p).sum() < tol:
            return nxt
        p = nxt
    raise RuntimeError("power iteration did not converge")


@dataclass
class PaintResult:
    """Sparse scores plus the paint-mass bookkeeping of one push run."""

    scores: dict
    discarded: float
    residual: float

    @property
    def retained(self) -> float:
        return sum(self.scores.values())

    def normalized(self) -> dict:
        """Scores rescaled by 1/(1 - discarded), comparable to exact_ppr."""
        keep = 1.0 - self.discarded
        return {v: s / keep for v, s in self.scores.items()}


def approx_ppr(wg: WeightedGraph, focus: int, alpha: float,
               eps: float) -> PaintResult:
    """Push-style approximation: retain an alpha-portion, distribute the rest.

    A unit of paint starts at the focus; the node with the largest pending
    mass is processed first; pending parcels of at most `eps` are left as
    residual; paint reaching a dangling node is discarded. Conserves
    retained + discarded + residual = 1.
    """
    n = wg.graph.n_entities
    if not 0 <= focus < n:
        raise ValueError(f"unknown focus id {focus}")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if eps <= 0:
        raise ValueError("paint threshold must be positive")
    merged = [wg.merged_transitions(v) for v in range(n)]
    pending: dict[int, float] = {focus: 1.0}
    scores: dict[int, float] = {}
    discarded = 0.0
    heap = [(-1.0, focus)]
    while heap:
        _, node = heapq.heappop(heap)
        amount = pending.get(node, 0.0)
        if amount <= eps:
            continue  # stale entry or sub-threshold parcel
        pending[node] = 0.0
        scores[node] = scores.get(node, 0.0) + alpha * amount
        spread = (1.0 - alpha) * amount
        trans = merged[node]
        if not trans:
            discarded += spread
            continue
        for succ, w in trans:
            new = pending.get(succ, 0.0) + spread * w
            pending[succ] = new
            if new > eps:
                heapq.heappush(heap, (-new, succ))
    residual = sum(pending.values())
    return PaintResult(scores=scores, discarded=discarded, residual=residual)


# -- co-occurrence matrix --------------------------------------------------------


@dataclass
class SparseCooccurrence:
    """Row-normalized focus x context weights over the entity vocabulary."""

    n_tokens: int
    entries: list  # (focus, context, weight > 0)
    tokens: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def row(self, i: int) -> dict:
        return {c: w for f, c, w in self.entries if f == i}


def build_cooccurrence(g: KnowledgeGraph, strategy: str = "uniform",
                       alpha: float = 0.15, eps: float = 1e-5,
                       ppr: str = "approx") -> SparseCooccurrence:
    """PPR context rows on the forward plus reversed weighted graph.

    Each focus row is the sum of both score vectors with the focus's own
    score zeroed, then normalized to sum 1; rows with no remaining mass are
    dropped. Approximate scores are rescaled by 1/(1 - discarded) per pass
    so both passes carry the weight of a full probability distribution,
    matching the oracle. `ppr="exact"` swaps in the power-iteration oracle.
    """
    if ppr not in ("approx", "exact"):
        raise ValueError(f"unknown ppr mode {ppr!r}")
    wg_fwd = weigh_edges(g, strategy)
    wg_rev = weigh_edges(reverse_graph(g), strategy)
    entries = []
    for i in range(g.n_entities):
        row: dict[int, float] = defaultdict(float)
        for wg in (wg_fwd, wg_rev):
            if ppr == "approx":
                for v, s in approx_ppr(wg, i, alpha, eps).normalized().items():
                    row[v] += s
            else:
                dense = exact_ppr(wg, i, alpha)
                for v in np.flatnonzero(dense):
                    row[v] += float(dense[v])
        row.pop(i, None)
        total = sum(row.values())
        if total <= 0.0:
            continue
        entries.extend((i, j, w / total) for j, w in sorted(row.items()))
    return SparseCooccurrence(n_tokens=g.n_entities, entries=entries,
                              tokens=list(g.entities),
                              meta={"strategy": strategy, "alpha": alpha,
                                    "eps": eps, "ppr": ppr, "normalized": "row"})


def save_cooccurrence(x: SparseCooccurrence, path) -> None:
    """Binary matrix file: magic, token count, nnz, then (u32, u32, f64) LE."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<8sQQ", _COOC_MAGIC, x.n_tokens, x.nnz))
        for f, c, w in x.entries:
            fh.write(struct.pack("<IId", f, c, w))


def load_cooccurrence(path) -> SparseCooccurrence:
    with open(path, "rb") as fh:
        magic, n_tokens, nnz = struct.unpack("<8sQQ", fh.read(24))
        if magic != _COOC_MAGIC:
            raise ValueError("not a co-occurrence matrix file")
        entries = []
        for _ in range(nnz):
            f, c, w = struct.unpack("<IId", fh.read(16))
            entries.append((f, c, w))
    return SparseCooccurrence(n_tokens=n_tokens, entries=entries,
                              tokens=[str(i) for i in range(n_tokens)],
                              meta={"loaded_from": str(path)})


def dump_cooccurrence_text(x: SparseCooccurrence, path) -> None:
    """Debug dump: `focus<TAB>context<TAB>weight` per stored entry."""
    with open(path, "w", encoding="utf-8") as fh:
        for f, c, w in x.entries:
            fh.write(f"{f}\t{c}\t{w:.12g}\n")


# -- GloVe training ---------------------------------------------------------------


@dataclass
class GloVeConfig:
    dimension: int = 50
    x_max: float | None = None  # default: 95th percentile of stored entries
    exponent: float = 0.75
    epochs: int = 30
    learning_rate: float = 0.05
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.x_max is not None and self.x_max <= 0:
            raise ValueError("x_max must be positive")
        if self.exponent <= 0:
            raise ValueError("weighting exponent must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def glove_weight(x: float, x_max: float, exponent: float) -> float:
    """Co-occurrence weighting f(x) = min((x / x_max)^exponent, 1)."""
    return min((x / x_max) ** exponent, 1.0)


def glove_objective(w, wc, b, bc, entries, x_max: float, exponent: float):
    """Weighted least-squares cost and its full-batch gradients.

    J = sum f(x) (w_i . wc_j + b_i + bc_j - log x)^2 over stored entries.
    """
    w = np.asarray(w, dtype=float)
    wc = np.asarray(wc, dtype=float)
    b = np.asarray(b, dtype=float)
    bc = np.asarray(bc, dtype=float)
    gw, gwc = np.zeros_like(w), np.zeros_like(wc)
    gb, gbc = np.zeros_like(b), np.zeros_like(bc)
    total = 0.0
    for i, j, x in entries:
        fx = glove_weight(x, x_max, exponent)
        diff = float(w[i] @ wc[j] + b[i] + bc[j] - np.log(x))
        total += fx * diff * diff
        common = 2.0 * fx * diff
        gw[i] += common * wc[j]
        gwc[j] += common * w[i]
        gb[i] += common
        gbc[j] += common
    return total, (gw, gwc, gb, gbc)


def train_glove(x: SparseCooccurrence, config: GloVeConfig) -> TokenEmbeddings:
    """Adaptive-step SGD over nonzero entries; exported vector is w_i + wc_i.

    Per-parameter learning rates divide by the root of accumulated squared
    gradients, the usual GloVe scheme. Deterministic for a fixed seed in
    single-worker mode.
    """
    config.validate()
    if x.nnz == 0:
        raise ValueError("cannot train on an empty co-occurrence matrix")
    values = np.array([w for _, _, w in x.entries])
    if (values <= 0).any():
        raise ValueError("stored co-occurrence entries must be positive")
    x_max = config.x_max if config.x_max is not None else float(np.percentile(values, 95))
    n, k = x.n_tokens, config.dimension
    rng = np.random.default_rng(config.seed)
    w = (rng.random((n, k)) - 0.5) / k
    wc = (rng.random((n, k)) - 0.5) / k
    b = (rng.random(n) - 0.5) / k
    bc = (rng.random(n) - 0.5) / k
    gsq_w = np.ones((n, k))
    gsq_wc = np.ones((n, k))
    gsq_b = np.ones(n)
    gsq_bc = np.ones(n)

    fi = np.array([e[0] for e in x.entries], dtype=np.int64)
    ci = np.array([e[1] for e in x.entries], dtype=np.int64)
    logx = np.log(values)
    fx = np.minimum((values / x_max) ** config.exponent, 1.0)
    lr = config.learning_rate
    loss_history: list[float] = []

    for _ in range(config.epochs):
        order = rng.permutation(x.nnz)
        total = 0.0
        for e in order:
            i, j = fi[e], ci[e]
            diff = w[i] @ wc[j] + b[i] + bc[j] - logx[e]
            total += fx[e] * diff * diff
            common = 2.0 * fx[e] * diff
            gi = common * wc[j]
            gj = common * w[i]
            w[i] -= lr * gi / np.sqrt(gsq_w[i])
            wc[j] -= lr * gj / np.sqrt(gsq_wc[j])
            gsq_w[i] += gi * gi
            gsq_wc[j] += gj * gj
            b[i] -= lr * common / np.sqrt(gsq_b[i])
            bc[j] -= lr * common / np.sqrt(gsq_bc[j])
            gsq_b[i] += common * common
            gsq_bc[j] += common * common
        loss_history.append(total / x.nnz)

    tokens = list(x.tokens) if x.tokens else [str(i) for i in range(n)]
    metadata = {"dimension": k, "x_max": x_max, "exponent": config.exponent,
                "epochs": config.epochs, "learning_rate": lr,
                "seed": config.seed, "loss_history": loss_history}
    return TokenEmbeddings(tokens=tokens, vectors=w + wc, context_vectors=wc,
                           metadata=metadata)
