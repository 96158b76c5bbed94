import io

import numpy as np
import pytest

from kgforge.graph import KnowledgeGraph, load_graph
from kgforge.kglove import (GloVeConfig, SparseCooccurrence, approx_ppr,
                            build_cooccurrence, dump_cooccurrence_text,
                            exact_ppr, glove_objective, glove_weight,
                            load_cooccurrence, save_cooccurrence, train_glove,
                            weigh_edges)

from conftest import fd_grad, rel_err


def weighted_random_graph(rng, max_nodes=12):
    n = int(rng.integers(1, max_nodes + 1))
    triples = set()
    for _ in range(int(rng.integers(0, 3 * n + 1))):
        triples.add((int(rng.integers(n)), int(rng.integers(2)), int(rng.integers(n))))
    g = KnowledgeGraph([f"n{i}" for i in range(n)], ["p", "q"], triples)
    strategy = ("uniform", "predicate-frequency",
                "inverse-predicate-frequency")[int(rng.integers(3))]
    try:
        return weigh_edges(g, strategy)
    except ZeroDivisionError:  # strategy needs counts; fall back
        return weigh_edges(g, "uniform")


# -- edge weighting ----------------------------------------------------------------


def test_uniform_weighting():
    g = load_graph(io.StringIO("v\tp\ta\nv\tp\tb\nv\tq\tc\nv\tq\td\n"))
    wg = weigh_edges(g, "uniform")
    weights = [w for _, _, w in wg.out_weights[g.entity_ids["v"]]]
    assert weights == [0.25, 0.25, 0.25, 0.25]


def test_predicate_frequency_weighting():
    # p occurs 3 times globally, q once; v has one p-edge and one q-edge
    g = load_graph(io.StringIO("v\tp\ta\nv\tq\tb\nx\tp\ty\nx\tp\tz\n"))
    wg = weigh_edges(g, "predicate-frequency")
    by_rel = {g.relations[r]: w for r, _, w in wg.out_weights[g.entity_ids["v"]]}
    assert by_rel["p"] == pytest.approx(0.75)
    assert by_rel["q"] == pytest.approx(0.25)
    wg = weigh_edges(g, "inverse-predicate-frequency")
    by_rel = {g.relations[r]: w for r, _, w in wg.out_weights[g.entity_ids["v"]]}
    assert by_rel["p"] == pytest.approx(0.25)
    assert by_rel["q"] == pytest.approx(0.75)


def test_unknown_strategy_rejected():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    with pytest.raises(ValueError):
        weigh_edges(g, "pagerank")


def test_out_weights_normalized(rng):
    for _ in range(30):
        wg = weighted_random_graph(rng)
        for v in range(wg.graph.n_entities):
            ws = [w for _, _, w in wg.out_weights[v]]
            if ws:
                assert sum(ws) == pytest.approx(1.0, abs=1e-9)
                assert all(w > 0 for w in ws)


# -- exact PPR ---------------------------------------------------------------------


def test_exact_ppr_isolated_node():
    wg = weigh_edges(KnowledgeGraph(["a"], [], []))
    assert np.allclose(exact_ppr(wg, 0, 0.15), [1.0])


def test_exact_ppr_two_cycle_closed_form():
    wg = weigh_edges(load_graph(io.StringIO("a\tp\tb\nb\tp\ta\n")))
    p = exact_ppr(wg, 0, 0.5)
    assert p[0] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert p[1] == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_exact_ppr_is_a_distribution(rng):
    for _ in range(50):
        wg = weighted_random_graph(rng)
        focus = int(rng.integers(wg.graph.n_entities))
        p = exact_ppr(wg, focus, 0.2)
        assert p.sum() == pytest.approx(1.0, abs=1e-9)
        assert (p >= -1e-15).all()


def test_exact_ppr_unknown_focus():
    wg = weigh_edges(load_graph(io.StringIO("a\tp\tb\n")))
    with pytest.raises(ValueError):
        exact_ppr(wg, 5, 0.2)


# -- push approximation -------------------------------------------------------------


def test_approx_ppr_single_dangling_node():
    wg = weigh_edges(KnowledgeGraph(["a"], [], []))
    res = approx_ppr(wg, 0, 0.15, 1e-6)
    assert res.scores == {0: pytest.approx(0.15)}
    assert res.discarded == pytest.approx(0.85)


def test_approx_ppr_two_cycle_matches_closed_form():
    wg = weigh_edges(load_graph(io.StringIO("a\tp\tb\nb\tp\ta\n")))
    res = approx_ppr(wg, 0, 0.5, 1e-9)
    assert res.discarded == 0.0
    assert res.scores[0] == pytest.approx(2.0 / 3.0, abs=1e-6)
    assert res.scores[1] == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_approx_ppr_threshold_at_first_distribution():
    wg = weigh_edges(load_graph(io.StringIO("a\tp\tb\nb\tp\ta\n")))
    res = approx_ppr(wg, 0, 0.5, 0.5)  # eps == 1 - alpha
    assert set(res.scores) == {0}


def test_paint_conservation(rng):
    for _ in range(100):
        wg = weighted_random_graph(rng)
        focus = int(rng.integers(wg.graph.n_entities))
        eps = 10.0 ** -rng.integers(2, 9)
        res = approx_ppr(wg, focus, 0.2, eps)
        total = res.retained + res.discarded + res.residual
        assert total == pytest.approx(1.0, abs=1e-9)


def test_approx_ppr_monotone_in_eps(rng):
    for _ in range(30):
        wg = weighted_random_graph(rng)
        focus = int(rng.integers(wg.graph.n_entities))
        covered = set()
        for eps in (1e-2, 1e-4, 1e-6, 1e-8):
            nodes = set(approx_ppr(wg, focus, 0.2, eps).scores)
            assert covered <= nodes
            covered = nodes


def test_approx_matches_exact_after_renormalization(rng):
    for _ in range(100):
        wg = weighted_random_graph(rng)
        focus = int(rng.integers(wg.graph.n_entities))
        alpha = float(rng.uniform(0.1, 0.6))
        exact = exact_ppr(wg, focus, alpha)
        approx = approx_ppr(wg, focus, alpha, 1e-9).normalized()
        dense = np.zeros(wg.graph.n_entities)
        for v, s in approx.items():
            dense[v] = s
        assert np.abs(dense - exact).sum() <= 1e-3


def test_approx_ppr_validates_inputs():
    wg = weigh_edges(load_graph(io.StringIO("a\tp\tb\n")))
    with pytest.raises(ValueError):
        approx_ppr(wg, 0, 1.5, 1e-3)
    with pytest.raises(ValueError):
        approx_ppr(wg, 0, 0.2, 0.0)
    with pytest.raises(ValueError):
        approx_ppr(wg, 9, 0.2, 1e-3)


# -- co-occurrence matrix -----------------------------------------------------------


def test_cooccurrence_single_triple_structure():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    x = build_cooccurrence(g, alpha=0.15, eps=1e-9)
    assert (0, 1, pytest.approx(1.0)) in [tuple(e) for e in x.entries]
    assert (1, 0, pytest.approx(1.0)) in [tuple(e) for e in x.entries]


def test_cooccurrence_empty_graph():
    x = build_cooccurrence(KnowledgeGraph([], [], []))
    assert x.entries == [] and x.n_tokens == 0


def test_cooccurrence_rows_sum_to_one(rng):
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\tc\nc\tq\ta\nc\tp\td\nd\tq\tb\n"))
    x = build_cooccurrence(g, alpha=0.2, eps=1e-7)
    sums = {}
    for f, _, w in x.entries:
        sums[f] = sums.get(f, 0.0) + w
        assert w > 0
    for total in sums.values():
        assert total == pytest.approx(1.0, abs=1e-9)


def test_cooccurrence_matches_exact_oracle():
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\tc\nc\tq\ta\nc\tp\td\nd\tq\te\n"))
    fast = build_cooccurrence(g, alpha=0.2, eps=1e-9, ppr="approx")
    oracle = build_cooccurrence(g, alpha=0.2, eps=1e-9, ppr="exact")
    a = {(f, c): w for f, c, w in fast.entries}
    b = {(f, c): w for f, c, w in oracle.entries}
    for key in set(a) | set(b):
        assert abs(a.get(key, 0.0) - b.get(key, 0.0)) <= 1e-5


def test_cooccurrence_file_round_trip(tmp_path):
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\ta\n"))
    x = build_cooccurrence(g, alpha=0.3, eps=1e-8)
    path = tmp_path / "cooc.bin"
    save_cooccurrence(x, path)
    loaded = load_cooccurrence(path)
    assert loaded.n_tokens == x.n_tokens
    assert [(f, c) for f, c, _ in loaded.entries] == [(f, c) for f, c, _ in x.entries]
    assert np.allclose([w for _, _, w in loaded.entries],
                       [w for _, _, w in x.entries])
    dump_cooccurrence_text(x, tmp_path / "cooc.tsv")
    assert len((tmp_path / "cooc.tsv").read_text().splitlines()) == x.nnz


# -- GloVe --------------------------------------------------------------------------


def test_glove_weight_closed_form():
    assert glove_weight(10.0, 10.0, 0.75) == 1.0
    assert glove_weight(5.0, 10.0, 0.75) == pytest.approx(0.5 ** 0.75)
    assert glove_weight(20.0, 10.0, 0.75) == 1.0  # capped


def test_glove_single_entry_is_exactly_solvable():
    x = SparseCooccurrence(n_tokens=1, entries=[(0, 0, 1.0)], tokens=["t"])
    cfg = GloVeConfig(dimension=4, x_max=1.0, epochs=120, learning_rate=0.1, seed=0)
    emb = train_glove(x, cfg)
    assert emb.metadata["loss_history"][-1] < 1e-6


def test_glove_objective_gradients(rng):
    n, k = 5, 4
    entries = [(int(rng.integers(n)), int(rng.integers(n)), float(rng.uniform(0.1, 3)))
               for _ in range(10)]
    for _ in range(50):
        w = rng.normal(size=(n, k)) * 0.3
        wc = rng.normal(size=(n, k)) * 0.3
        b = rng.normal(size=n) * 0.3
        bc = rng.normal(size=n) * 0.3
        _, (gw, gwc, gb, gbc) = glove_objective(w, wc, b, bc, entries, 2.0, 0.75)
        assert rel_err(fd_grad(lambda x: glove_objective(x, wc, b, bc, entries, 2.0, 0.75)[0], w), gw) <= 1e-4
        assert rel_err(fd_grad(lambda x: glove_objective(w, x, b, bc, entries, 2.0, 0.75)[0], wc), gwc) <= 1e-4
        assert rel_err(fd_grad(lambda x: glove_objective(w, wc, x, bc, entries, 2.0, 0.75)[0], b), gb) <= 1e-4
        assert rel_err(fd_grad(lambda x: glove_objective(w, wc, b, x, entries, 2.0, 0.75)[0], bc), gbc) <= 1e-4


def test_glove_loss_non_increasing_on_frozen_matrix():
    rng = np.random.default_rng(3)
    entries = [(i, j, float(rng.uniform(0.05, 2.0)))
               for i in range(20) for j in range(20) if rng.random() < 0.3]
    x = SparseCooccurrence(n_tokens=20, entries=entries)
    outcomes = []
    for seed in (1, 2, 3):
        cfg = GloVeConfig(dimension=8, epochs=15, learning_rate=0.05, seed=seed)
        hist = train_glove(x, cfg).metadata["loss_history"]
        outcomes.append(all(b <= a + 1e-12 for a, b in zip(hist, hist[1:])))
    assert sorted(outcomes)[1]  # median seed is monotone


def test_glove_rejects_nonpositive_entries():
    x = SparseCooccurrence(n_tokens=2, entries=[(0, 1, 0.0)])
    with pytest.raises(ValueError):
        train_glove(x, GloVeConfig(dimension=2))


def test_glove_deterministic_and_vectors_are_sum():
    g = load_graph(io.StringIO("a\tp\tb\nb\tp\tc\nc\tp\ta\n"))
    x = build_cooccurrence(g, alpha=0.2, eps=1e-8)
    cfg = GloVeConfig(dimension=6, epochs=10, seed=4)
    e1, e2 = train_glove(x, cfg), train_glove(x, cfg)
    assert np.array_equal(e1.vectors, e2.vectors)
    assert e1.tokens == ["a", "b", "c"]
    assert np.isfinite(e1.vectors).all()


def test_glove_default_x_max_is_95th_percentile():
    entries = [(0, 1, 0.5), (1, 0, 1.0), (0, 2, 2.0), (2, 0, 4.0)]
    x = SparseCooccurrence(n_tokens=3, entries=entries)
    emb = train_glove(x, GloVeConfig(dimension=2, epochs=1, seed=0))
    assert emb.metadata["x_max"] == pytest.approx(
        float(np.percentile([0.5, 1.0, 2.0, 4.0], 95)))
