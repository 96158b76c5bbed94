"""Interned directed labeled multigraphs and their line-oriented serializations.

Entities and relations are interned to dense integer ids in first-seen order,
which makes every parameter matrix in the embedding modules directly indexable
by id. Graphs are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

log = logging.getLogger("kgforge.graph")

FORMAT_TSV = "tsv"
FORMAT_NTRIPLES = "ntriples"

_IRI = re.compile(r"<([^<>\s]*)>")


class GraphParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class CardinalityStats:
    """Mean distinct-tail / distinct-head counts for one relation."""

    tails_per_head: float
    heads_per_tail: float


class KnowledgeGraph:
    """Directed labeled multigraph over interned entity and relation ids.

    Triples are a set of (head, relation, tail) id tuples; duplicates collapse.
    Adjacency lists are ordered by sorted triple id, so traversal order does
    not depend on input order.
    """

    def __init__(self, entities: Iterable[str], relations: Iterable[str],
                 triples: Iterable[tuple[int, int, int]]):
        self.entities: list[str] = list(entities)
        self.relations: list[str] = list(relations)
        self.entity_ids: dict[str, int] = {e: i for i, e in enumerate(self.entities)}
        self.relation_ids: dict[str, int] = {r: i for i, r in enumerate(self.relations)}
        self.triples: set[tuple[int, int, int]] = set(tuple(t) for t in triples)
        self.skipped_literals = 0
        ne, nr = len(self.entities), len(self.relations)
        for h, r, t in self.triples:
            if not (0 <= h < ne and 0 <= t < ne and 0 <= r < nr):
                raise ValueError(f"triple ({h},{r},{t}) references unknown ids")
        self.out_adj: list[list[tuple[int, int]]] = [[] for _ in range(ne)]
        self.in_adj: list[list[tuple[int, int]]] = [[] for _ in range(ne)]
        for h, r, t in sorted(self.triples):
            self.out_adj[h].append((r, t))
            self.in_adj[t].append((r, h))
        self._cardinality_cache: dict[int, CardinalityStats] = {}

    # -- basic shape ---------------------------------------------------------

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_relations(self) -> int:
        return len(self.relations)

    @property
    def n_triples(self) -> int:
        return len(self.triples)

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def sorted_triples(self) -> list[tuple[int, int, int]]:
        return sorted(self.triples)

    def label_triples(self) -> Iterator[tuple[str, str, str]]:
        for h, r, t in self.sorted_triples():
            yield self.entities[h], self.relations[r], self.entities[t]

    # -- construction --------------------------------------------------------

    @classmethod
    def from_triples(cls, label_triples: Iterable[tuple[str, str, str]]) -> "KnowledgeGraph":
        """Intern labels in first-seen order and build the graph."""
        entities: dict[str, int] = {}
        relations: dict[str, int] = {}
        triples: set[tuple[int, int, int]] = set()
        for h, r, t in label_triples:
            hi = entities.setdefault(h, len(entities))
            ri = relations.setdefault(r, len(relations))
            ti = entities.setdefault(t, len(entities))
            triples.add((hi, ri, ti))
        return cls(entities, relations, triples)

    # -- serialization -------------------------------------------------------

    def write_tsv(self, dest: str | Path | IO[str]) -> None:
        """One `head<TAB>relation<TAB>tail` line per triple, UTF-8."""
        out = _open_text_sink(dest)
        try:
            for h, r, t in self.label_triples():
                out.write(f"{h}\t{r}\t{t}\n")
        finally:
            if out is not dest:
                out.close()

    def write_vocab(self, dest: str | Path | IO[str], which: str = "entity") -> None:
        """Dump `id<TAB>label` lines for entities or relations."""
        labels = self.entities if which == "entity" else self.relations
        out = _open_text_sink(dest)
        try:
            for i, label in enumerate(labels):
                out.write(f"{i}\t{label}\n")
        finally:
            if out is not dest:
                out.close()


def _open_text_sink(dest):
    if isinstance(dest, (str, Path)):
        return open(dest, "w", encoding="utf-8")
    return dest


def _iter_lines(source) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            for no, line in enumerate(fh, start=1):
                yield no, line
        return
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        for no, line in enumerate(source.splitlines(), start=1):
            yield no, line
        return
    for no, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield no, line


def _parse_tsv_line(no: int, line: str) -> tuple[str, str, str] | None:
    fields = line.split("\t")
    if len(fields) != 3 or any(f == "" for f in fields):
        raise GraphParseError(no, f"expected 3 tab-separated fields, got {len(fields)}")
    return fields[0], fields[1], fields[2]


def _parse_ntriples_line(no: int, line: str) -> tuple[str, str, str] | None:
    """Parse one `<iri> <iri> <iri> .` line; literal objects return None."""
    if not line.endswith("."):
        raise GraphParseError(no, "missing terminating '.'")
    body = line[:-1].strip()
    m_s = _IRI.match(body)
    if m_s is None:
        raise GraphParseError(no, "subject is not an IRI")
    rest = body[m_s.end():].lstrip()
    m_p = _IRI.match(rest)
    if m_p is None:
        raise GraphParseError(no, "predicate is not an IRI")
    obj = rest[m_p.end():].strip()
    if obj.startswith('"'):
        return None  # literal object: skipped, counted by the caller
    m_o = _IRI.fullmatch(obj)
    if m_o is None:
        raise GraphParseError(no, "object is neither an IRI nor a literal")
    return m_s.group(1), m_p.group(1), m_o.group(1)


def load_graph(source, fmt: str = FORMAT_TSV) -> KnowledgeGraph:
    """Parse a line-oriented triple stream into an interned graph.

    `source` may be a path, a string/bytes blob, or an iterable of lines.
    TSV lines are `head<TAB>relation<TAB>tail`; the N-Triples subset accepts
    IRI-only statements and skips literal objects with a counted warning.
    Empty input yields a valid empty graph. Malformed lines raise
    :class:`GraphParseError` with the offending line number.
    """
    if fmt not in (FORMAT_TSV, FORMAT_NTRIPLES):
        raise ValueError(f"unknown format {fmt!r}")
    parsed: list[tuple[str, str, str]] = []
    skipped = 0
    for no, raw in _iter_lines(source):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if fmt == FORMAT_NTRIPLES:
            if line.lstrip().startswith("#"):
                continue
            triple = _parse_ntriples_line(no, line.strip())
            if triple is None:
                skipped += 1
                continue
        else:
            triple = _parse_tsv_line(no, line)
        parsed.append(triple)
    graph = KnowledgeGraph.from_triples(parsed)
    graph.skipped_literals = skipped
    if skipped:
        log.warning("skipped %d literal-object statement(s)", skipped)
    return graph


def reverse_graph(g: KnowledgeGraph) -> KnowledgeGraph:
    """Graph with every (h, r, t) flipped to (t, r, h); vocabularies identical."""
    return KnowledgeGraph(g.entities, g.relations,
                          ((t, r, h) for h, r, t in g.triples))


def relation_stats(g: KnowledgeGraph, r: int) -> CardinalityStats:
    """Tails-per-head and heads-per-tail means for relation id `r`.

    Raises ValueError if the relation has no triples.
    """
    cached = g._cardinality_cache.get(r)
    if cached is not None:
        return cached
    heads: set[int] = set()
    tails: set[int] = set()
    count = 0
    for h, rel, t in g.triples:
        if rel == r:
            heads.add(h)
            tails.add(t)
            count += 1
    if count == 0:
        raise ValueError(f"relation id {r} has no triples")
    stats = CardinalityStats(tails_per_head=count / len(heads),
                             heads_per_tail=count / len(tails))
    g._cardinality_cache[r] = stats
    return stats
