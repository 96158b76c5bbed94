import io

import numpy as np
import pytest

from kgforge.graph import (GraphParseError, KnowledgeGraph, load_graph,
                           relation_stats, reverse_graph)

from conftest import random_graph


def test_empty_stream_is_valid_empty_graph():
    g = load_graph(io.StringIO(""))
    assert (g.n_entities, g.n_relations, g.n_triples) == (0, 0, 0)


def test_single_line_minimal_graph():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    assert (g.n_entities, g.n_relations, g.n_triples) == (2, 1, 1)


def test_duplicate_lines_collapse_to_one_triple():
    g = load_graph(io.StringIO("a\tp\tb\n" * 3))
    assert g.n_triples == 1


def test_interning_is_first_seen_order():
    g = load_graph(io.StringIO("z\tp\ta\na\tq\tz\nm\tp\tz\n"))
    assert g.entities == ["z", "a", "m"]
    assert g.relations == ["p", "q"]


def test_malformed_tsv_line_reports_line_number():
    with pytest.raises(GraphParseError) as exc:
        load_graph(io.StringIO("a\tp\tb\nbad line\n"))
    assert exc.value.line_no == 2
    with pytest.raises(GraphParseError):
        load_graph(io.StringIO("a\tp\t\n"))


def test_ntriples_subset_parses_iris():
    text = "<http://x/a> <http://x/p> <http://x/b> .\n"
    g = load_graph(io.StringIO(text), "ntriples")
    assert g.entities == ["http://x/a", "http://x/b"]
    assert g.n_triples == 1


def test_ntriples_literal_objects_skipped_and_counted():
    text = ('<http://x/a> <http://x/p> <http://x/b> .\n'
            '<http://x/a> <http://x/q> "42"^^<http://x/int> .\n'
            '<http://x/b> <http://x/q> "hello"@en .\n')
    g = load_graph(io.StringIO(text), "ntriples")
    assert g.n_triples == 1
    assert g.skipped_literals == 2


def test_ntriples_malformed_lines_error():
    with pytest.raises(GraphParseError):
        load_graph(io.StringIO("<a> <p> <b>\n"), "ntriples")  # no dot
    with pytest.raises(GraphParseError):
        load_graph(io.StringIO("_:blank <p> <b> .\n"), "ntriples")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        load_graph(io.StringIO(""), "xml")


def test_reverse_empty_and_single():
    assert reverse_graph(KnowledgeGraph([], [], [])).n_triples == 0
    g = load_graph(io.StringIO("a\tp\tb\n"))
    rg = reverse_graph(g)
    assert rg.triples == {(g.entity_ids["b"], 0, g.entity_ids["a"])}
    assert rg.entities == g.entities and rg.relations == g.relations


def test_reverse_is_an_involution(rng):
    g = random_graph(rng, n_entities=8, n_triples=10)
    assert reverse_graph(reverse_graph(g)).triples == g.triples


def test_relation_stats_trivial_cases():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    s = relation_stats(g, 0)
    assert (s.tails_per_head, s.heads_per_tail) == (1.0, 1.0)

    g = load_graph(io.StringIO("a\tp\tb\na\tp\tc\na\tp\td\n"))
    s = relation_stats(g, 0)
    assert (s.tails_per_head, s.heads_per_tail) == (3.0, 1.0)


def test_relation_stats_hand_enumeration():
    # heads {a, c}, tails {b, d}: 3 triples over 2 heads / 2 tails
    g = load_graph(io.StringIO("a\tp\tb\nc\tp\tb\na\tp\td\n"))
    s = relation_stats(g, 0)
    assert (s.tails_per_head, s.heads_per_tail) == (1.5, 1.5)


def test_relation_stats_unused_relation_errors():
    g = load_graph(io.StringIO("a\tp\tb\n"))
    with pytest.raises(ValueError):
        relation_stats(g, 7)


def test_tsv_round_trip_preserves_triples(rng, tmp_path):
    g = random_graph(rng, n_entities=12, n_triples=30)
    path = tmp_path / "g.tsv"
    g.write_tsv(path)
    g2 = load_graph(path)
    assert set(g2.label_triples()) == set(g.label_triples())


def test_degree_sums_match_triple_count(rng):
    for _ in range(20):
        g = random_graph(rng)
        assert sum(g.out_degree(v) for v in range(g.n_entities)) == g.n_triples
        assert sum(g.in_degree(v) for v in range(g.n_entities)) == g.n_triples
        for v in range(g.n_entities):
            assert g.out_degree(v) == sum(1 for h, _, _ in g.triples if h == v)


def test_vocab_dump_format(tmp_path):
    g = load_graph(io.StringIO("a\tp\tb\n"))
    path = tmp_path / "ents.tsv"
    g.write_vocab(path, "entity")
    assert path.read_text() == "0\ta\n1\tb\n"
    g.write_vocab(path, "relation")
    assert path.read_text() == "0\tp\n"


def test_triples_referencing_unknown_ids_rejected():
    with pytest.raises(ValueError):
        KnowledgeGraph(["a"], ["p"], [(0, 0, 5)])
