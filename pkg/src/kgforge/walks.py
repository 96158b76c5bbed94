"""Token-sequence corpora from graphs: bounded walks and iterative relabeling.

Walk sequences alternate entity, relation, entity, ... tokens. A walk is
extended until it has taken `depth` edge steps or reaches a sink, whichever
comes first, so the exhaustive walk set from a root matches brute-force path
enumeration. Relabeling corpora render the same walks once per label
iteration, with the root token kept at its original label.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass, field

from .graph import KnowledgeGraph

MODES = ("walks", "wl")
_SEP = "\x1f"


@dataclass
class WalkCorpus:
    """Set of token sequences plus vocabulary counts and provenance."""

    sequences: list[list[str]]
    vocabulary: Counter = field(default_factory=Counter)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.vocabulary:
            self.vocabulary = Counter(tok for seq in self.sequences for tok in seq)

    def __len__(self) -> int:
        return len(self.sequences)


def _coerce_rng(rng) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(0 if rng is None else rng)


def _count_walks(g: KnowledgeGraph, node: int, depth: int, memo: dict) -> int:
    key = (node, depth)
    cached = memo.get(key)
    if cached is not None:
        return cached
    edges = g.out_adj[node]
    if depth == 0 or not edges:
        memo[key] = 1
        return 1
    total = sum(_count_walks(g, t, depth - 1, memo) for _, t in edges)
    memo[key] = total
    return total


def _walk_steps_by_index(g, node, depth, index, memo) -> list[tuple[int, int]]:
    """Unrank the `index`-th walk (in adjacency order) from `node`."""
    edges = g.out_adj[node]
    if depth == 0 or not edges:
        return []
    for r, t in edges:
        below = _count_walks(g, t, depth - 1, memo)
        if index < below:
            return [(r, t)] + _walk_steps_by_index(g, t, depth - 1, index, memo)
        index -= below
    raise IndexError("walk index out of range")


def _all_walk_steps(g, node, depth) -> list[list[tuple[int, int]]]:
    edges = g.out_adj[node]
    if depth == 0 or not edges:
        return [[]]
    walks = []
    for r, t in edges:
        for rest in _all_walk_steps(g, t, depth - 1):
            walks.append([(r, t)] + rest)
    return walks


def _id_walks(g, root, depth, cap, rng) -> list[list[tuple[int, int]]]:
    if cap is None:
        return _all_walk_steps(g, root, depth)
    memo: dict = {}
    total = _count_walks(g, root, depth, memo)
    if total <= cap:
        return _all_walk_steps(g, root, depth)
    indices = sorted(_coerce_rng(rng).sample(range(total), cap))
    return [_walk_steps_by_index(g, root, depth, i, memo) for i in indices]


def _render(g, root, steps) -> list[str]:
    tokens = [g.entities[root]]
    for r, t in steps:
        tokens.append(g.relations[r])
        tokens.append(g.entities[t])
    return tokens


def enumerate_walks(g: KnowledgeGraph, root: int, depth: int,
                    cap: int | None = None, rng=None) -> list[list[str]]:
    """All directed walks of up to `depth` edge steps rooted at `root`.

    Walks stop early at sinks; vertices may repeat (depth bounds cycles).
    With `cap`, a uniform seeded sample of min(cap, total) distinct walks is
    returned instead of the full set.
    """
    if not 0 <= root < g.n_entities:
        raise ValueError(f"unknown root id {root}")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if cap is not None and cap <= 0:
        raise ValueError("cap must be positive")
    return [_render(g, root, steps) for steps in _id_walks(g, root, depth, cap, rng)]


def _wl_hash(label: str, signature: tuple) -> str:
    payload = label + _SEP + _SEP.join(r + " " + l for r, l in signature)
    return hashlib.blake2b(payload.encode("utf-8"), digest_size=8).hexdigest()


def wl_relabel(g: KnowledgeGraph, iterations: int) -> list[list[str]]:
    """Iterative vertex relabeling over out-neighbor label multisets.

    Returns one labeling (entity id -> label) per iteration, index 0 being
    the original labels. A vertex whose sorted (relation, neighbor-label)
    multiset is unchanged from the previous iteration keeps its previous
    label instead of hashing a new one, so stable regions stop churning.
    """
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    current = list(g.entities)
    labelings = [current]
    prev_sigs: list[tuple] = [() for _ in range(g.n_entities)]
    for _ in range(iterations):
        sigs = [
            tuple(sorted((g.relations[r], current[t]) for r, t in g.out_adj[v]))
            for v in range(g.n_entities)
        ]
        current = [
            current[v] if sigs[v] == prev_sigs[v] else _wl_hash(current[v], sigs[v])
            for v in range(g.n_entities)
        ]
        labelings.append(current)
        prev_sigs = sigs
    return labelings


def build_corpus(g: KnowledgeGraph, mode: str = "walks", depth: int = 4,
                 cap: int | None = None, iterations: int = 0,
                 seed: int = 0) -> WalkCorpus:
    """Union of per-root walk sequences, optionally across relabel iterations.

    walks mode: every vertex contributes its (possibly capped) walk set.
    wl mode: the same walks are rendered once per relabel iteration
    0..iterations, with the first token kept at the root's original label.
    Duplicate sequences collapse; order is deterministic for a fixed seed.
    """
    if mode not in MODES:
        raise ValueError(f"unknown corpus mode {mode!r}")
    sequences: list[list[str]] = []
    seen: set[tuple[str, ...]] = set()

    def add(tokens: list[str]) -> None:
        key = tuple(tokens)
        if key not in seen:
            seen.add(key)
            sequences.append(tokens)

    labelings = wl_relabel(g, iterations) if mode == "wl" else None
    for v in range(g.n_entities):
        walks = _id_walks(g, v, depth, cap, random.Random(f"{seed}:{v}"))
        if mode == "walks":
            for steps in walks:
                add(_render(g, v, steps))
        else:
            for labels in labelings:
                for steps in walks:
                    tokens = [g.entities[v]]
                    for r, t in steps:
                        tokens.append(g.relations[r])
                        tokens.append(labels[t])
                    add(tokens)
    provenance = {"mode": mode, "depth": depth, "cap": cap,
                  "iterations": iterations if mode == "wl" else None, "seed": seed}
    return WalkCorpus(sequences=sequences, provenance=provenance)


def save_corpus(corpus: WalkCorpus, path) -> None:
    """One sequence per line, tokens space-separated, UTF-8."""
    with open(path, "w", encoding="utf-8") as fh:
        for seq in corpus.sequences:
            fh.write(" ".join(seq) + "\n")


def load_corpus(path) -> WalkCorpus:
    sequences = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if tokens:
                sequences.append(tokens)
    return WalkCorpus(sequences=sequences, provenance={"mode": "loaded", "path": str(path)})
