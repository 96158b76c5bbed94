"""Synthetic graph generators for recoverability tests and the failure demo.

The planted generator lays entities on a noisy 2-D integer lattice and uses
small lattice offsets as relations, so every emitted triple satisfies
||h + r - t|| <= sigma by construction and a translational model can recover
the structure. The factory generator builds a heterogeneous
machine/sensor/status graph with injected failures at node, edge, subgraph,
or whole-graph granularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import KnowledgeGraph

FAILURE_MODES = ("node", "edge", "subgraph", "graph")

_CRITICAL_LEVELS = (0, 1, 8, 9)
_NORMAL_LEVELS = tuple(range(2, 8))


def generate_planted_kg(n_entities: int, n_relations: int, dimension: int,
                        triples_per_relation: int, noise_sigma: float = 0.0,
                        seed: int = 0, lattice_fill: float = 0.865):
    """Graph whose triples are exact lattice translations up to `noise_sigma`.

    Entities occupy a seeded random subset of a square 2-D grid (the grid is
    sized so roughly `lattice_fill` of its points are used; gaps keep
    distinct entities separated), jittered by at most sigma/2 each.
    Relations are distinct small grid offsets. For each relation a seeded
    sample of `triples_per_relation` (head, head+offset) pairs with both
    endpoints present is emitted. Returns (graph, truth) where truth holds
    the ground-truth entity and relation matrices.
    """
    if min(n_entities, n_relations, dimension, triples_per_relation) <= 0:
        raise ValueError("all counts must be positive")
    if dimension < 2:
        raise ValueError("dimension must be at least 2 for the planted lattice")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be nonnegative")
    if not 0.0 < lattice_fill <= 1.0:
        raise ValueError("lattice fill must be in (0, 1]")
    offsets = sorted(
        ((dx, dy) for dx in range(-3, 4) for dy in range(-3, 4) if (dx, dy) != (0, 0)),
        key=lambda o: (o[0] * o[0] + o[1] * o[1], o))
    if n_relations > len(offsets):
        raise ValueError(f"at most {len(offsets)} relations supported")
    offsets = offsets[:n_relations]

    rng = np.random.default_rng((seed, 17))
    width = max(round(math.sqrt(n_entities / lattice_fill)),
                math.isqrt(n_entities - 1) + 1)
    cells = [(i % width, i // width) for i in range(width * width)]
    keep = sorted(rng.permutation(len(cells))[:n_entities])
    points = [cells[i] for i in keep]
    index = {p: i for i, p in enumerate(points)}

    entity_vecs = np.zeros((n_entities, dimension))
    entity_vecs[:, 0] = [x for x, _ in points]
    entity_vecs[:, 1] = [y for _, y in points]
    if noise_sigma > 0:
        direction = rng.normal(size=(n_entities, dimension))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        entity_vecs += direction * (rng.random((n_entities, 1)) * noise_sigma / 2.0)
    relation_vecs = np.zeros((n_relations, dimension))
    for j, (dx, dy) in enumerate(offsets):
        relation_vecs[j, 0] = dx
        relation_vecs[j, 1] = dy

    triples = []
    for j, (dx, dy) in enumerate(offsets):
        pairs = [(i, index[(x + dx, y + dy)])
                 for i, (x, y) in enumerate(points) if (x + dx, y + dy) in index]
        if len(pairs) < triples_per_relation:
            raise ValueError(
                f"relation {j} offers {len(pairs)} distinct pairs, "
                f"{triples_per_relation} requested")
        chosen = rng.permutation(len(pairs))[:triples_per_relation]
        triples.extend((pairs[c][0], j, pairs[c][1]) for c in chosen)

    entities = [f"e{i:04d}" for i in range(n_entities)]
    relations = [f"r{j:02d}" for j in range(n_relations)]
    graph = KnowledgeGraph(entities, relations, triples)
    truth = {"entity_vectors": entity_vecs, "relation_vectors": relation_vecs,
             "offsets": offsets, "noise_sigma": noise_sigma}
    return graph, truth


def generate_one_to_many_kg(n_heads: int = 25, tails_per_head: int = 8):
    """One-to-many benchmark: each head fans out to its own tail set.

    Besides the `fanout` relation (one head, many tails) every tail points
    back at its head via `owner`, and slot-mates of consecutive heads are
    linked by symmetric `peer` edges. A single-space translational model
    must drive the peer translation toward zero, collapsing slot-mates
    across heads into indistinguishable piles; a hyperplane model keeps
    them apart along the peer normal while still satisfying fanout.
    """
    if n_heads <= 0 or tails_per_head <= 0:
        raise ValueError("counts must be positive")
    triples = []
    for i in range(n_heads):
        for j in range(tails_per_head):
            triples.append((f"h{i:03d}", "fanout", f"t{i:03d}_{j}"))
            triples.append((f"t{i:03d}_{j}", "owner", f"h{i:03d}"))
    for j in range(tails_per_head):
        for i in range(n_heads):
            a = f"t{i:03d}_{j}"
            b = f"t{(i + 1) % n_heads:03d}_{j}"
            triples.append((a, "peer", b))
            triples.append((b, "peer", a))
    return KnowledgeGraph.from_triples(triples)


# -- factory failure graph ---------------------------------------------------------


@dataclass(frozen=True)
class FailureAnnotation:
    mode: str
    elements: tuple


@dataclass
class FailureLabeledGraph:
    """Factory graph plus per-node health labels and failure annotations."""

    graph: KnowledgeGraph
    node_status: dict
    annotations: list = field(default_factory=list)

    def labeled(self, kind: str):
        """(label, status) pairs for nodes of one kind: machine|sensor|status."""
        prefix = {"machine": "machine", "sensor": "sensor", "status": "lvl"}[kind]
        return [(lab, st) for lab, st in self.node_status.items()
                if lab.startswith(prefix)]


def _mode_counts(n_machines: int, mix: dict) -> dict:
    counts = {}
    for mode in ("node", "edge", "subgraph"):
        counts[mode] = int(round(mix.get(mode, 0.0) * n_machines))
    return counts


def generate_factory_graph(n_machines: int, n_sensors_per_machine: int,
                           failure_mix: dict | None = None,
                           seed: int = 0) -> FailureLabeledGraph:
    """Heterogeneous machine/sensor/status graph with injected failures.

    Machines form a `feeds` ring with a few extra links; every sensor
    `measures` its machine and reports a discretized reading through a
    `status` edge to a shared level node (levels 2-7 in range, 0-1 and 8-9
    critical). Failure fractions are per-machine: node failures push sensors
    to critical levels, edge failures drop or garble the machine's feeds
    edge, subgraph failures pin all sensors of a machine to one in-range
    extreme (each reading valid, the combination anomalous). A positive
    graph fraction drifts every healthy reading up one level and annotates
    the whole graph.
    """
    if n_machines <= 0 or n_sensors_per_machine <= 0:
        raise ValueError("counts must be positive")
    mix = dict(failure_mix or {})
    unknown = set(mix) - set(FAILURE_MODES)
    if unknown:
        raise ValueError(f"unknown failure modes: {sorted(unknown)}")
    if any(v < 0 for v in mix.values()) or sum(mix.values()) > 1.0 + 1e-9:
        raise ValueError("failure fractions must be nonnegative and sum to at most 1")

    rng = np.random.default_rng((seed, 23))
    machines = [f"machine{i:02d}" for i in range(n_machines)]
    counts = _mode_counts(n_machines, mix)
    if n_machines == 1:
        counts["edge"] = 0  # a lone machine has no feeds edge to fail
    order = rng.permutation(n_machines)
    assigned: dict[int, str] = {}
    cursor = 0
    for mode in ("node", "edge", "subgraph"):
        for _ in range(counts[mode]):
            if cursor < n_machines:
                assigned[int(order[cursor])] = mode
                cursor += 1
    graph_failure = mix.get("graph", 0.0) > 0

    triples: list[tuple[str, str, str]] = []
    node_status: dict[str, str] = {}
    annotations: list[FailureAnnotation] = []

    # feeds ring plus a few extra links; an edge-failed machine loses its
    # ring edge, which is either dropped or garbled toward a random machine
    if n_machines > 1:
        for i in range(n_machines):
            dst = (i + 1) % n_machines
            if assigned.get(i) == "edge":
                if n_machines >= 3 and rng.random() < 0.5:
                    wrong = int(rng.integers(0, n_machines))
                    while wrong in (i, dst):
                        wrong = int(rng.integers(0, n_machines))
                    triples.append((machines[i], "feeds", machines[wrong]))
                    annotations.append(FailureAnnotation(
                        "edge", (machines[i], machines[wrong])))
                else:
                    annotations.append(FailureAnnotation(
                        "edge", (machines[i], machines[dst])))
            else:
                triples.append((machines[i], "feeds", machines[dst]))
    for _ in range(max(0, n_machines // 3)):
        a, b = rng.integers(0, n_machines, 2)
        if a != b:
            triples.append((machines[int(a)], "feeds", machines[int(b)]))

    for i in range(n_machines):
        mode = assigned.get(i)
        machine_failed = mode is not None or graph_failure
        node_status[machines[i]] = "failed" if machine_failed else "healthy"
        sensor_labels = []
        for j in range(n_sensors_per_machine):
            sensor = f"sensor{i:02d}_{j}"
            sensor_labels.append(sensor)
            triples.append((sensor, "measures", machines[i]))
            center = 3 + (j % 4)
            if mode == "node":
                level = int(rng.choice(_CRITICAL_LEVELS))
                node_status[sensor] = "failed"
            elif mode == "subgraph":
                level = _NORMAL_LEVELS[-1]
                node_status[sensor] = "failed"
            else:
                level = int(np.clip(center + rng.integers(-1, 2), 2, 7))
                if graph_failure:
                    level = min(level + 1, 7)
                node_status[sensor] = "healthy"
            triples.append((sensor, "status", f"lvl{level}"))
        if mode == "node":
            annotations.append(FailureAnnotation("node", (machines[i],)))
        elif mode == "subgraph":
            annotations.append(FailureAnnotation(
                "subgraph", tuple([machines[i]] + sensor_labels)))

    if graph_failure:
        annotations.append(FailureAnnotation("graph", tuple(machines)))

    graph = KnowledgeGraph.from_triples(triples)
    for lvl in range(10):
        label = f"lvl{lvl}"
        if label in graph.entity_ids:
            node_status[label] = "failed" if lvl in _CRITICAL_LEVELS else "healthy"
    return FailureLabeledGraph(graph=graph, node_status=node_status,
                               annotations=annotations)


# -- threshold-classifier demo -------------------------------------------------------


@dataclass(frozen=True)
class DemoResult:
    accuracy: float
    n_train: int
    n_test: int
    predictions: dict


def failure_detection_demo(labeled: FailureLabeledGraph, embeddings,
                           train_fraction: float = 0.6, seed: int = 0,
                           kind: str = "sensor") -> DemoResult:
    """Held-out threshold classification of node health from embeddings.

    Projects vectors onto the difference of the training class means and
    thresholds at the midpoint. Stratified seeded split; returns held-out
    accuracy.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train fraction must be in (0, 1)")
    items = [(lab, st) for lab, st in labeled.labeled(kind) if lab in embeddings]
    failed = [lab for lab, st in items if st == "failed"]
    healthy = [lab for lab, st in items if st == "healthy"]
    if len(failed) < 2 or len(healthy) < 2:
        raise ValueError("need at least 2 embedded nodes per class")
    rng = np.random.default_rng((seed, 31))

    def split(labels):
        labels = list(labels)
        rng.shuffle(labels)
        cut = max(1, int(round(train_fraction * len(labels))))
        cut = min(cut, len(labels) - 1)
        return labels[:cut], labels[cut:]

    f_train, f_test = split(failed)
    h_train, h_test = split(healthy)
    vec = embeddings.vector
    mu_f = np.mean([vec(l) for l in f_train], axis=0)
    mu_h = np.mean([vec(l) for l in h_train], axis=0)
    direction = mu_f - mu_h
    threshold = (float(mu_f @ direction) + float(mu_h @ direction)) / 2.0

    predictions = {}
    correct = 0
    for lab in f_test + h_test:
        pred = "failed" if float(vec(lab) @ direction) > threshold else "healthy"
        predictions[lab] = pred
        if pred == labeled.node_status[lab]:
            correct += 1
    n_test = len(f_test) + len(h_test)
    return DemoResult(accuracy=correct / n_test,
                      n_train=len(f_train) + len(h_train),
                      n_test=n_test, predictions=predictions)
