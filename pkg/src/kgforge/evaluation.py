"""Link-prediction ranking, metric aggregation, and neighbor queries.

Ranks are pessimistic: candidates tying the true triple's score count
against it, so a constant scorer ranks every triple at |E|. The filtered
setting drops corruptions that are themselves triples of the filter graph.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .graph import KnowledgeGraph
from .word2vec import TokenEmbeddings

SLOTS = ("head", "tail")
SETTINGS = ("raw", "filtered")


@dataclass(frozen=True)
class RankMetrics:
    """Mean rank and Hits@k fractions for one list of ranks."""

    mean_rank: float
    hits: dict
    count: int


def aggregate_metrics(ranks, ks=(1, 3, 10)) -> RankMetrics:
    """Arithmetic mean rank plus the fraction of ranks <= k for each k."""
    ranks = list(ranks)
    if not ranks:
        raise ValueError("cannot aggregate an empty rank list")
    hits = {k: sum(1 for r in ranks if r <= k) / len(ranks) for k in ks}
    return RankMetrics(mean_rank=sum(ranks) / len(ranks), hits=hits, count=len(ranks))


@dataclass(frozen=True)
class EvalReport:
    """Per-slot and combined ranking metrics for one raw/filtered setting."""

    setting: str
    ks: tuple
    head: RankMetrics
    tail: RankMetrics
    combined: RankMetrics

    @property
    def n_triples(self) -> int:
        return self.head.count

    @classmethod
    def from_ranks(cls, head_ranks, tail_ranks, ks, setting) -> "EvalReport":
        return cls(setting=setting, ks=tuple(ks),
                   head=aggregate_metrics(head_ranks, ks),
                   tail=aggregate_metrics(tail_ranks, ks),
                   combined=aggregate_metrics(list(head_ranks) + list(tail_ranks), ks))


def rank_triple(scorer, g: KnowledgeGraph, triple, slot: str,
                setting: str = "raw") -> int:
    """Rank of the true triple among all single-slot corruptions.

    `scorer` maps (h, r, t) ids to a real score, lower meaning more
    plausible. Returns 1 + the number of corruption candidates scoring at
    most the true score (ties count against the true triple).
    """
    if slot not in SLOTS:
        raise ValueError(f"unknown slot {slot!r}")
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}")
    h, r, t = triple
    if not (0 <= h < g.n_entities and 0 <= t < g.n_entities and 0 <= r < g.n_relations):
        raise ValueError(f"triple ({h},{r},{t}) references unknown ids")
    true_score = scorer(h, r, t)
    original = h if slot == "head" else t
    not_worse = 0
    for e in range(g.n_entities):
        if e == original:
            continue
        cand = (e, r, t) if slot == "head" else (h, r, e)
        if setting == "filtered" and cand in g.triples:
            continue
        if scorer(*cand) <= true_score:
            not_worse += 1
    return 1 + not_worse


def _known_slots(g: KnowledgeGraph):
    heads_by_rt = defaultdict(list)
    tails_by_hr = defaultdict(list)
    for h, r, t in g.triples:
        heads_by_rt[(r, t)].append(h)
        tails_by_hr[(h, r)].append(t)
    return heads_by_rt, tails_by_hr


def evaluate(model, g: KnowledgeGraph, test_triples, ks=(1, 3, 10)):
    """Rank every test triple in both slots and both settings.

    `model` needs a `score_batch(hs, rs, ts)` method (lower = better).
    Returns ({"raw": EvalReport, "filtered": EvalReport}, rank_rows) where
    rank_rows are (h, r, t, slot, setting, rank) tuples for dumping.
    """
    heads_by_rt, tails_by_hr = _known_slots(g)
    n = g.n_entities
    all_entities = np.arange(n, dtype=np.int64)
    ranks = {(slot, setting): [] for slot in SLOTS for setting in SETTINGS}
    rows = []
    for h, r, t in test_triples:
        for slot in SLOTS:
            original = h if slot == "head" else t
            if slot == "head":
                scores = model.score_batch(all_entities, np.full(n, r), np.full(n, t))
                known = heads_by_rt.get((r, t), ())
            else:
                scores = model.score_batch(np.full(n, h), np.full(n, r), all_entities)
                known = tails_by_hr.get((h, r), ())
            true_score = scores[original]
            mask = np.ones(n, dtype=bool)
            mask[original] = False
            le = scores <= true_score
            raw = 1 + int(np.count_nonzero(le & mask))
            fmask = mask.copy()
            fmask[list(known)] = False
            filtered = 1 + int(np.count_nonzero(le & fmask))
            ranks[(slot, "raw")].append(raw)
            ranks[(slot, "filtered")].append(filtered)
            rows.append((h, r, t, slot, "raw", raw))
            rows.append((h, r, t, slot, "filtered", filtered))
    reports = {
        setting: EvalReport.from_ranks(ranks[("head", setting)],
                                       ranks[("tail", setting)], ks, setting)
        for setting in SETTINGS
    }
    return reports, rows


def nearest_neighbors(embeddings: TokenEmbeddings, query: str, k: int = 10,
                      metric: str = "cosine"):
    """Top-k closest tokens to `query`, excluding the query itself.

    Cosine scores are similarities (higher first); euclidean scores are
    distances (lower first). Ties break on token id.
    """
    if metric not in ("cosine", "euclidean"):
        raise ValueError(f"unknown metric {metric!r}")
    if query not in embeddings.token_ids:
        raise ValueError(f"unknown token {query!r}")
    qi = embeddings.token_ids[query]
    q = embeddings.vectors[qi]
    vecs = embeddings.vectors
    if metric == "cosine":
        norms = np.linalg.norm(vecs, axis=1) * max(np.linalg.norm(q), 1e-300)
        scores = (vecs @ q) / np.maximum(norms, 1e-300)
        order_key = -scores
    else:
        diff = vecs - q
        scores = np.sqrt((diff * diff).sum(axis=1))
        order_key = scores
    candidates = [i for i in range(len(vecs)) if i != qi]
    candidates.sort(key=lambda i: (order_key[i], i))
    top = candidates[:min(k, len(candidates))]
    return [(embeddings.tokens[i], float(scores[i])) for i in top]


# -- report serialization ---------------------------------------------------------


def report_lines(reports: dict) -> list[str]:
    """Flat `metric.slot.setting = value` lines for the text report."""
    lines = []
    for setting in sorted(reports):
        rep = reports[setting]
        lines.append(f"n_triples.combined.{setting} = {rep.n_triples}")
        for slot_name, metrics in (("head", rep.head), ("tail", rep.tail),
                                   ("combined", rep.combined)):
            lines.append(f"mean_rank.{slot_name}.{setting} = {metrics.mean_rank:.6g}")
            for k in rep.ks:
                lines.append(f"hits@{k}.{slot_name}.{setting} = {metrics.hits[k]:.6g}")
    return lines


def write_report_text(reports: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in report_lines(reports):
            fh.write(line + "\n")


def write_report_tsv(reports: dict, path) -> None:
    """Machine-readable report: metric, slot, setting, value columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("metric\tslot\tsetting\tvalue\n")
        for setting in sorted(reports):
            rep = reports[setting]
            fh.write(f"n_triples\tcombined\t{setting}\t{rep.n_triples}\n")
            for slot_name, metrics in (("head", rep.head), ("tail", rep.tail),
                                       ("combined", rep.combined)):
                fh.write(f"mean_rank\t{slot_name}\t{setting}\t{metrics.mean_rank:.6g}\n")
                for k in rep.ks:
                    fh.write(f"hits@{k}\t{slot_name}\t{setting}\t{metrics.hits[k]:.6g}\n")


def write_ranks_tsv(rows, g: KnowledgeGraph, path) -> None:
    """Per-triple rank dump: labels, slot, setting, rank."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("head\trelation\ttail\tslot\tsetting\trank\n")
        for h, r, t, slot, setting, rank in rows:
            fh.write(f"{g.entities[h]}\t{g.relations[r]}\t{g.entities[t]}"
                     f"\t{slot}\t{setting}\t{rank}\n")
