import numpy as np
import pytest

from kgforge.graph import KnowledgeGraph


def fd_grad(f, x, h=1e-6):
    """Central-difference gradient of scalar f at array x."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        hi = f(x)
        flat[i] = orig - h
        lo = f(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2 * h)
    return g


def rel_err(approx, exact):
    approx = np.asarray(approx, dtype=float).reshape(-1)
    exact = np.asarray(exact, dtype=float).reshape(-1)
    denom = max(np.linalg.norm(approx), np.linalg.norm(exact), 1e-12)
    return np.linalg.norm(approx - exact) / denom


def random_graph(rng, n_entities=None, n_relations=None, n_triples=None,
                 acyclic=False) -> KnowledgeGraph:
    """Seeded random labeled graph; optionally edges only from lower to higher id."""
    ne = n_entities or int(rng.integers(2, 10))
    nr = n_relations or int(rng.integers(1, 4))
    nt = n_triples if n_triples is not None else int(rng.integers(1, 3 * ne))
    triples = set()
    for _ in range(nt):
        h = int(rng.integers(ne))
        t = int(rng.integers(ne))
        if acyclic:
            if h == t:
                continue
            h, t = min(h, t), max(h, t)
        triples.add((h, int(rng.integers(nr)), t))
    return KnowledgeGraph([f"n{i}" for i in range(ne)],
                          [f"p{j}" for j in range(nr)], triples)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
