import io
from collections import Counter

import numpy as np
import pytest

from kgforge.graph import KnowledgeGraph, load_graph
from kgforge.walks import (WalkCorpus, build_corpus, enumerate_walks,
                           load_corpus, save_corpus, wl_relabel)

from conftest import random_graph


def brute_force_walks(g, root, depth):
    """Independent recursive enumeration oracle."""
    out = []

    def recurse(node, remaining, acc):
        edges = g.out_adj[node]
        if remaining == 0 or not edges:
            out.append(acc)
            return
        for r, t in edges:
            recurse(t, remaining - 1, acc + [g.relations[r], g.entities[t]])

    recurse(root, depth, [g.entities[root]])
    return out


def test_isolated_vertex_yields_single_walk():
    g = KnowledgeGraph(["x"], [], [])
    assert enumerate_walks(g, 0, 2) == [["x"]]


def test_single_edge_chain_depth_one():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    assert enumerate_walks(g, 0, 1) == [["a", "p", "b"]]


def test_diamond_matches_brute_force():
    g = load_graph(io.StringIO("a\tp\tb\na\tp\tc\nb\tq\td\nc\tq\td\n"))
    walks = enumerate_walks(g, 0, 2)
    assert sorted(map(tuple, walks)) == sorted(map(tuple, brute_force_walks(g, 0, 2)))
    assert len(walks) == 2


def test_unknown_root_rejected():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    with pytest.raises(ValueError):
        enumerate_walks(g, 9, 2)


def test_walks_match_brute_force_on_random_dags(rng):
    for _ in range(200):
        g = random_graph(rng, n_entities=int(rng.integers(2, 9)), acyclic=True)
        root = int(rng.integers(g.n_entities))
        depth = int(rng.integers(0, 5))
        got = sorted(map(tuple, enumerate_walks(g, root, depth)))
        want = sorted(map(tuple, brute_force_walks(g, root, depth)))
        assert got == want


def test_walks_may_revisit_vertices_in_cycles():
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\ta\n"))
    walks = enumerate_walks(g, 0, 3)
    assert walks == [["a", "p", "b", "p", "a", "p", "b"]]


def test_capped_sampling_is_a_uniform_subset():
    # star fan-out: 6 walks of depth 1
    g = load_graph(io.StringIO("".join(f"a\tp\tx{i}\n" for i in range(6))))
    full = set(map(tuple, enumerate_walks(g, 0, 1)))
    assert len(full) == 6
    sample = enumerate_walks(g, 0, 1, cap=3, rng=42)
    assert len(sample) == 3
    assert set(map(tuple, sample)) <= full
    assert enumerate_walks(g, 0, 1, cap=3, rng=42) == sample  # seeded determinism
    assert len(enumerate_walks(g, 0, 1, cap=100, rng=0)) == 6  # cap above total


def test_cap_sampling_covers_all_walks_across_seeds():
    g = load_graph(io.StringIO("".join(f"a\tp\tx{i}\n" for i in range(6))))
    seen = set()
    for seed in range(40):
        seen |= set(map(tuple, enumerate_walks(g, 0, 1, cap=2, rng=seed)))
    assert len(seen) == 6


# -- relabeling -----------------------------------------------------------------


def test_edgeless_graph_labels_never_change():
    g = KnowledgeGraph(["a", "b", "c"], [], [])
    labelings = wl_relabel(g, 3)
    assert all(lab == ["a", "b", "c"] for lab in labelings)


def test_path_labels_distinct_after_two_iterations():
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\tc\n"))
    labelings = wl_relabel(g, 2)
    final = labelings[2]
    assert len(set(final)) == 3
    # the sink kept its original label throughout
    assert final[g.entity_ids["c"]] == "c"


def test_isomorphic_constructions_get_identical_label_multisets(rng):
    for _ in range(30):
        g = random_graph(rng, n_entities=6, n_triples=10)
        # same labeled graph with permuted internal ids
        eperm = rng.permutation(g.n_entities)
        rperm = rng.permutation(g.n_relations)
        entities = [g.entities[i] for i in eperm]
        relations = [g.relations[j] for j in rperm]
        emap = {old: new for new, old in enumerate(eperm)}
        rmap = {old: new for new, old in enumerate(rperm)}
        h = KnowledgeGraph(entities, relations,
                           [(emap[a], rmap[r], emap[b]) for a, r, b in g.triples])
        for la, lb in zip(wl_relabel(g, 3), wl_relabel(h, 3)):
            assert Counter(la) == Counter(lb)


def test_wl_partitions_refine_monotonically(rng):
    for _ in range(40):
        g = random_graph(rng, n_entities=8)
        labelings = wl_relabel(g, 4)
        for prev, cur in zip(labelings, labelings[1:]):
            groups = {}
            for v, lab in enumerate(cur):
                groups.setdefault(lab, set()).add(prev[v])
            # same label now -> same label before
            assert all(len(prior) == 1 for prior in groups.values())


def test_wl_iteration_zero_is_original_labels():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    assert wl_relabel(g, 0) == [["a", "b"]]


# -- corpus ----------------------------------------------------------------------


def test_empty_graph_gives_empty_corpus():
    corpus = build_corpus(KnowledgeGraph([], [], []), "walks", depth=2)
    assert corpus.sequences == []
    assert len(corpus.vocabulary) == 0


def test_single_triple_walk_corpus():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    corpus = build_corpus(g, "walks", depth=1)
    assert sorted(map(tuple, corpus.sequences)) == [("a", "p", "b"), ("b",)]


def test_wl_zero_iterations_equals_walks_mode():
    g = load_graph(io.StringIO("a\tp\tb\nb\tq\tc\na\tp\tc\n"))
    walks = build_corpus(g, "walks", depth=2, seed=3)
    wl = build_corpus(g, "wl", depth=2, iterations=0, seed=3)
    assert sorted(map(tuple, walks.sequences)) == sorted(map(tuple, wl.sequences))


def test_wl_corpus_roots_keep_original_labels():
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\tc\n"))
    corpus = build_corpus(g, "wl", depth=1, iterations=2)
    roots = {seq[0] for seq in corpus.sequences}
    assert roots <= set(g.entities)


def test_walk_sequences_alternate_and_vocab_counts():
    g = load_graph(io.StringIO("a\tp\tb\nb\tq\tc\n"))
    corpus = build_corpus(g, "walks", depth=2)
    ents, rels = set(g.entities), set(g.relations)
    for seq in corpus.sequences:
        assert seq[0] in ents
        for i, tok in enumerate(seq):
            assert tok in (ents if i % 2 == 0 else rels)
    assert corpus.vocabulary == Counter(t for s in corpus.sequences for t in s)
    assert all(c >= 1 for c in corpus.vocabulary.values())


def test_corpus_generation_is_deterministic():
    g = load_graph(io.StringIO("".join(f"a\tp\tx{i}\n" for i in range(9))))
    a = build_corpus(g, "walks", depth=2, cap=4, seed=13)
    b = build_corpus(g, "walks", depth=2, cap=4, seed=13)
    assert a.sequences == b.sequences


def test_corpus_file_round_trip(tmp_path):
    g = load_graph(io.StringIO("a\tp\tb\nb\tq\tc\n"))
    corpus = build_corpus(g, "walks", depth=2)
    path = tmp_path / "corpus.txt"
    save_corpus(corpus, path)
    loaded = load_corpus(path)
    assert loaded.sequences == corpus.sequences


def test_unknown_mode_rejected():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    with pytest.raises(ValueError):
        build_corpus(g, "teleport")
