"""Translational embedding models: TransE, TransH, TransR.

Scoring functions are plain (vector, vector, ...) -> float so they can be
checked against finite differences; training uses vectorized minibatch
equivalents of the same formulas. Lower score = more plausible triple.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import KnowledgeGraph, relation_stats

VARIANTS = ("transe", "transh", "transr")
NORMS = ("l1", "l2")
CORRUPTIONS = ("uniform", "bernoulli")

_CKPT_MAGIC = b"KGCKPT01"
_VARIANT_CODES = {"transe": 1, "transh": 2, "transr": 3}
_NORM_CODES = {"l1": 1, "l2": 2}


@dataclass
class TrainConfig:
    """Hyperparameters for margin-ranking training.

    `relation_dimension` only matters for TransR and defaults to `dimension`.
    `constraint_weight` (C) and `orthogonality_eps` only matter for TransH.
    """

    dimension: int = 50
    relation_dimension: int | None = None
    margin: float = 1.0
    learning_rate: float = 0.01
    epochs: int = 50
    batch_size: int = 256
    corruption: str = "uniform"
    constraint_weight: float = 0.25
    orthogonality_eps: float = 0.1
    norm: str = "l2"
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.relation_dimension is not None and self.relation_dimension <= 0:
            raise ValueError("relation_dimension must be positive")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.batch_size <= 0:
            raise ValueError("batch size must be positive")
        if self.corruption not in CORRUPTIONS:
            raise ValueError(f"unknown corruption strategy {self.corruption!r}")
        if self.constraint_weight < 0:
            raise ValueError("constraint weight must be nonnegative")
        if self.orthogonality_eps <= 0:
            raise ValueError("orthogonality tolerance must be positive")
        if self.norm not in NORMS:
            raise ValueError(f"unknown norm {self.norm!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def rel_dim(self) -> int:
        return self.relation_dimension or self.dimension


# -- scoring ------------------------------------------------------------------


def transe_score(h, l, t, norm: str = "l2") -> float:
    """Translation dissimilarity ||h + l - t|| under the chosen norm."""
    h, l, t = (np.asarray(x, dtype=float) for x in (h, l, t))
    if not (h.shape == l.shape == t.shape):
        raise ValueError("dimension mismatch")
    u = h + l - t
    if norm == "l1":
        return float(np.abs(u).sum())
    return float(np.sqrt(u @ u))


def transe_score_grad(h, l, t, norm: str = "l2"):
    """Score plus gradients w.r.t. h, l, t (subgradient 0 at the L2 origin)."""
    h, l, t = (np.asarray(x, dtype=float) for x in (h, l, t))
    u = h + l - t
    if norm == "l1":
        g = np.sign(u)
        return float(np.abs(u).sum()), g, g.copy(), -g
    d = float(np.sqrt(u @ u))
    g = u / d if d > 0 else np.zeros_like(u)
    return d, g, g.copy(), -g


def hyperplane_project(e, w):
    """Remove the component of `e` along the unit normal `w`."""
    e = np.asarray(e, dtype=float)
    w = np.asarray(w, dtype=float)
    if e.shape != w.shape:
        raise ValueError("dimension mismatch")
    wn = float(np.sqrt(w @ w))
    if abs(wn - 1.0) > 1e-6:
        raise ValueError(f"normal vector is not unit length (norm {wn:.6g})")
    return e - (w @ e) * w


def transh_score(h, t, w_r, d_r) -> float:
    """Squared L2 distance between hyperplane projections shifted by d_r."""
    h, t, w_r, d_r = (np.asarray(x, dtype=float) for x in (h, t, w_r, d_r))
    if not (h.shape == t.shape == w_r.shape == d_r.shape):
        raise ValueError("dimension mismatch")
    u = (h - (w_r @ h) * w_r) + d_r - (t - (w_r @ t) * w_r)
    return float(u @ u)


def transh_score_grad(h, t, w_r, d_r):
    """Score plus gradients w.r.t. h, t, w_r, d_r."""
    h, t, w_r, d_r = (np.asarray(x, dtype=float) for x in (h, t, w_r, d_r))
    z = h - t
    wz = w_r @ z
    u = z - wz * w_r + d_r
    f = float(u @ u)
    pu = u - (u @ w_r) * w_r
    gh = 2.0 * pu
    gt = -2.0 * pu
    gd = 2.0 * u
    gw = -2.0 * ((u @ w_r) * z + wz * u)
    return f, gh, gt, gw, gd


def transr_score(h, t, r, m_r) -> float:
    """Squared L2 norm of M_r h + r - M_r t (relation-space translation)."""
    h, t, r = (np.asarray(x, dtype=float) for x in (h, t, r))
    m_r = np.asarray(m_r, dtype=float)
    if h.shape != t.shape or m_r.shape != (r.shape[0], h.shape[0]):
        raise ValueError("shape mismatch")
    u = m_r @ h + r - m_r @ t
    return float(u @ u)


def transr_score_grad(h, t, r, m_r):
    """Score plus gradients w.r.t. h, t, r, M_r."""
    h, t, r = (np.asarray(x, dtype=float) for x in (h, t, r))
    m_r = np.asarray(m_r, dtype=float)
    z = h - t
    u = m_r @ z + r
    f = float(u @ u)
    gh = 2.0 * (m_r.T @ u)
    gt = -gh
    gr = 2.0 * u
    gm = 2.0 * np.outer(u, z)
    return f, gh, gt, gr, gm


def margin_loss(pos: float, neg: float, gamma: float) -> float:
    """Hinge max(0, pos + gamma - neg)."""
    if gamma <= 0:
        raise ValueError("margin must be positive")
    return max(0.0, pos + gamma - neg)


# -- model bundle --------------------------------------------------------------


@dataclass
class TranslationalModel:
    """Parameter bundle for one translational variant.

    entity_vecs: (n_e, k); relation_vecs: (n_r, k) or (n_r, d) for TransR;
    normal_vecs: (n_r, k) TransH hyperplane normals; proj_mats: (n_r, d, k)
    TransR projections.
    """

    variant: str
    norm: str
    entity_vecs: np.ndarray
    relation_vecs: np.ndarray
    normal_vecs: np.ndarray | None = None
    proj_mats: np.ndarray | None = None
    seed: int = 0
    reinit_count: int = 0
    loss_history: list = field(default_factory=list)

    @property
    def n_entities(self) -> int:
        return self.entity_vecs.shape[0]

    @property
    def n_relations(self) -> int:
        return self.relation_vecs.shape[0]

    @property
    def dimension(self) -> int:
        return self.entity_vecs.shape[1]

    @property
    def rel_dimension(self) -> int:
        return self.relation_vecs.shape[1]

    def copy(self) -> "TranslationalModel":
        return TranslationalModel(
            variant=self.variant,
            norm=self.norm,
            entity_vecs=self.entity_vecs.copy(),
            relation_vecs=self.relation_vecs.copy(),
            normal_vecs=None if self.normal_vecs is None else self.normal_vecs.copy(),
            proj_mats=None if self.proj_mats is None else self.proj_mats.copy(),
            seed=self.seed,
            reinit_count=self.reinit_count,
            loss_history=list(self.loss_history),
        )

    def score(self, h: int, r: int, t: int) -> float:
        if self.variant == "transe":
            return transe_score(self.entity_vecs[h], self.relation_vecs[r],
                                self.entity_vecs[t], self.norm)
        if self.variant == "transh":
            return transh_score(self.entity_vecs[h], self.entity_vecs[t],
                                self.normal_vecs[r], self.relation_vecs[r])
        return transr_score(self.entity_vecs[h], self.entity_vecs[t],
                            self.relation_vecs[r], self.proj_mats[r])

    def score_batch(self, hs, rs, ts) -> np.ndarray:
        """Vectorized scoring over parallel id arrays."""
        hs = np.asarray(hs, dtype=np.int64)
        rs = np.asarray(rs, dtype=np.int64)
        ts = np.asarray(ts, dtype=np.int64)
        E, R = self.entity_vecs, self.relation_vecs
        if self.variant == "transe":
            u = E[hs] + R[rs] - E[ts]
            if self.norm == "l1":
                return np.abs(u).sum(axis=1)
            return np.sqrt((u * u).sum(axis=1))
        if self.variant == "transh":
            W = self.normal_vecs[rs]
            z = E[hs] - E[ts]
            u = z - (W * z).sum(axis=1, keepdims=True) * W + R[rs]
            return (u * u).sum(axis=1)
        M = self.proj_mats[rs]
        z = E[hs] - E[ts]
        u = np.einsum("bdk,bk->bd", M, z) + R[rs]
        return (u * u).sum(axis=1)

    def scorer(self):
        """Triple -> score callable for the evaluation harness."""
        return lambda h, r, t: self.score(h, r, t)


def _reinit_row(model: TranslationalModel, row: int, width: int) -> np.ndarray:
    rng = np.random.default_rng((model.seed, 9749, int(row), model.reinit_count))
    bound = 6.0 / np.sqrt(width)
    model.reinit_count += 1
    return rng.uniform(-bound, bound, width)


def _renorm_rows(model: TranslationalModel, mat: np.ndarray) -> None:
    """Scale rows to unit norm; zero rows are reinitialized and counted."""
    norms = np.linalg.norm(mat, axis=1)
    for i in np.flatnonzero(norms == 0.0):
        mat[i] = _reinit_row(model, i, mat.shape[1])
        norms[i] = np.linalg.norm(mat[i])
    off = np.abs(norms - 1.0) > 1e-12
    mat[off] /= norms[off, None]


def _clip_rows(mat: np.ndarray) -> None:
    norms = np.linalg.norm(mat, axis=1)
    over = norms > 1.0 + 1e-12
    mat[over] /= norms[over, None]


def enforce_norm_constraints(model: TranslationalModel) -> TranslationalModel:
    """Re-establish the per-variant norm constraints in place.

    TransE: entity rows renormalized to length 1. TransH: hyperplane normals
    renormalized, entity rows clipped to length <= 1. TransR: entity rows
    clipped. Idempotent; zero rows hit during renormalization are
    reinitialized (deterministically from the model seed) and counted.
    """
    if model.variant == "transe":
        _renorm_rows(model, model.entity_vecs)
    elif model.variant == "transh":
        _renorm_rows(model, model.normal_vecs)
        _clip_rows(model.entity_vecs)
    elif model.variant == "transr":
        _clip_rows(model.entity_vecs)
    else:
        raise ValueError(f"unknown variant {model.variant!r}")
    return model


def transh_constraint_penalty(model: TranslationalModel, eps: float) -> float:
    """Sum of the two TransH soft-constraint terms, unweighted by C.

    Scale term sums [||e||^2 - 1]_+ over entities; orthogonality term sums
    [(w_r . d_r)^2 / ||d_r||^2 - eps^2]_+ over relations.
    """
    if model.variant != "transh":
        raise ValueError("constraint penalty is defined for TransH models only")
    E = model.entity_vecs
    scale = np.maximum((E * E).sum(axis=1) - 1.0, 0.0).sum()
    W, D = model.normal_vecs, model.relation_vecs
    dn = (D * D).sum(axis=1)
    ok = dn > 0
    wd = (W[ok] * D[ok]).sum(axis=1)
    orth = np.maximum(wd * wd / dn[ok] - eps * eps, 0.0).sum()
    return float(scale + orth)


# -- corruption ----------------------------------------------------------------


def corrupt_triple(g: KnowledgeGraph, triple: tuple[int, int, int],
                   strategy: str = "uniform", rng=None) -> tuple[int, int, int]:
    """Replace exactly one of head/tail with a different entity.

    Under `uniform` the slot is a fair coin and the replacement is uniform
    over entities; under `bernoulli` the head is replaced with probability
    tph / (tph + hpt) for the triple's relation, biasing corruption toward
    the many side of skewed relations.
    """
    if g.n_entities < 2:
        raise ValueError("corruption needs at least 2 entities")
    if strategy not in CORRUPTIONS:
        raise ValueError(f"unknown corruption strategy {strategy!r}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    h, r, t = triple
    if strategy == "bernoulli":
        stats = relation_stats(g, r)
        p_head = stats.tails_per_head / (stats.tails_per_head + stats.heads_per_tail)
    else:
        p_head = 0.5
    replace_head = rng.random() < p_head
    original = h if replace_head else t
    new = int(rng.integers(g.n_entities))
    while new == original:
        new = int(rng.integers(g.n_entities))
    return (new, r, t) if replace_head else (h, r, new)


def _head_probs(g: KnowledgeGraph, strategy: str) -> np.ndarray:
    if strategy == "uniform":
        return np.full(g.n_relations, 0.5)
    probs = np.empty(g.n_relations)
    for r in range(g.n_relations):
        try:
            s = relation_stats(g, r)
            probs[r] = s.tails_per_head / (s.tails_per_head + s.heads_per_tail)
        except ValueError:
            probs[r] = 0.5  # relation absent from this split
    return probs


def _corrupt_batch(batch: np.ndarray, n_entities: int, p_head: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    m = len(batch)
    replace_head = rng.random(m) < p_head[batch[:, 1]]
    original = np.where(replace_head, batch[:, 0], batch[:, 2])
    new = rng.integers(0, n_entities, m)
    clash = new == original
    while clash.any():
        new[clash] = rng.integers(0, n_entities, int(clash.sum()))
        clash = new == original
    out = batch.copy()
    out[replace_head, 0] = new[replace_head]
    out[~replace_head, 2] = new[~replace_head]
    return out


# -- training ------------------------------------------------------------------


def init_model(g: KnowledgeGraph, variant: str, config: TrainConfig) -> TranslationalModel:
    """Seeded uniform init in [-6/sqrt(k), 6/sqrt(k)], constraints applied."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    k, d = config.dimension, config.rel_dim
    rng = np.random.default_rng(config.seed)
    bound_k = 6.0 / np.sqrt(k)
    entity = rng.uniform(-bound_k, bound_k, (g.n_entities, k))
    if variant == "transr":
        bound_d = 6.0 / np.sqrt(d)
        relation = rng.uniform(-bound_d, bound_d, (g.n_relations, d))
        proj = np.tile(np.eye(d, k), (g.n_relations, 1, 1))
        model = TranslationalModel(variant, config.norm, entity, relation,
                                   proj_mats=proj, seed=config.seed)
    elif variant == "transh":
        relation = rng.uniform(-bound_k, bound_k, (g.n_relations, k))
        normals = rng.uniform(-bound_k, bound_k, (g.n_relations, k))
        model = TranslationalModel(variant, config.norm, entity, relation,
                                   normal_vecs=normals, seed=config.seed)
    else:
        relation = rng.uniform(-bound_k, bound_k, (g.n_relations, k))
        model = TranslationalModel(variant, config.norm, entity, relation,
                                   seed=config.seed)
    return enforce_norm_constraints(model)


def _transe_batch_update(model, pos, neg, config):
    E, R = model.entity_vecs, model.relation_vecs
    lr = config.learning_rate
    u_pos = E[pos[:, 0]] + R[pos[:, 1]] - E[pos[:, 2]]
    u_neg = E[neg[:, 0]] + R[neg[:, 1]] - E[neg[:, 2]]
    if config.norm == "l1":
        d_pos = np.abs(u_pos).sum(axis=1)
        d_neg = np.abs(u_neg).sum(axis=1)
    else:
        d_pos = np.sqrt((u_pos * u_pos).sum(axis=1))
        d_neg = np.sqrt((u_neg * u_neg).sum(axis=1))
    losses = np.maximum(d_pos + config.margin - d_neg, 0.0)
    viol = losses > 0
    if viol.any():
        if config.norm == "l1":
            g_pos = np.sign(u_pos[viol])
            g_neg = np.sign(u_neg[viol])
        else:
            g_pos = u_pos[viol] / np.maximum(d_pos[viol], 1e-12)[:, None]
            g_neg = u_neg[viol] / np.maximum(d_neg[viol], 1e-12)[:, None]
        p, n = pos[viol], neg[viol]
        np.add.at(E, p[:, 0], -lr * g_pos)
        np.add.at(E, p[:, 2], lr * g_pos)
        np.add.at(R, p[:, 1], -lr * (g_pos - g_neg))
        np.add.at(E, n[:, 0], lr * g_neg)
        np.add.at(E, n[:, 2], -lr * g_neg)
    return float(losses.sum())


def _transh_batch_update(model, pos, neg, config):
    E, R, W = model.entity_vecs, model.relation_vecs, model.normal_vecs
    lr, C = config.learning_rate, config.constraint_weight

    def parts(tr):
        w = W[tr[:, 1]]
        z = E[tr[:, 0]] - E[tr[:, 2]]
        wz = (w * z).sum(axis=1, keepdims=True)
        u = z - wz * w + R[tr[:, 1]]
        return w, z, wz, u, (u * u).sum(axis=1)

    w_p, z_p, wz_p, u_p, f_pos = parts(pos)
    w_n, z_n, wz_n, u_n, f_neg = parts(neg)
    losses = np.maximum(f_pos + config.margin - f_neg, 0.0)
    viol = losses > 0
    if viol.any():
        p, n = pos[viol], neg[viol]

        def accumulate(tr, w, z, wz, u, sign):
            uw = (u * w).sum(axis=1, keepdims=True)
            pu = u - uw * w
            np.add.at(E, tr[:, 0], -lr * sign * 2.0 * pu)
            np.add.at(E, tr[:, 2], lr * sign * 2.0 * pu)
            np.add.at(R, tr[:, 1], -lr * sign * 2.0 * u)
            gw = -2.0 * (uw * z + wz * u)
            np.add.at(W, tr[:, 1], -lr * sign * gw)

        accumulate(p, w_p[viol], z_p[viol], wz_p[viol], u_p[viol], 1.0)
        accumulate(n, w_n[viol], z_n[viol], wz_n[viol], u_n[viol], -1.0)

    # soft constraints, restricted to the rows this batch touched
    penalty = 0.0
    ents = np.unique(np.concatenate([pos[:, 0], pos[:, 2], neg[:, 0], neg[:, 2]]))
    ev = E[ents]
    sq = (ev * ev).sum(axis=1)
    over = sq > 1.0
    if over.any():
        penalty += float((sq[over] - 1.0).sum())
        np.add.at(E, ents[over], -lr * C * 2.0 * ev[over])
    rels = np.unique(pos[:, 1])
    wv, dv = W[rels], R[rels]
    dn = (dv * dv).sum(axis=1)
    ok = dn > 0
    wd = (wv * dv).sum(axis=1)
    eps2 = config.orthogonality_eps ** 2
    active = ok & (wd * wd / np.maximum(dn, 1e-300) - eps2 > 0)
    if active.any():
        a_wd = wd[active, None]
        a_dn = dn[active, None]
        penalty += float((wd[active] ** 2 / dn[active] - eps2).sum())
        gw = 2.0 * a_wd * dv[active] / a_dn
        gd = 2.0 * a_wd * wv[active] / a_dn - 2.0 * a_wd ** 2 * dv[active] / a_dn ** 2
        np.add.at(W, rels[active], -lr * C * gw)
        np.add.at(R, rels[active], -lr * C * gd)
    return float(losses.sum() + C * penalty)


def _transr_batch_update(model, pos, neg, config):
    E, R, M = model.entity_vecs, model.relation_vecs, model.proj_mats
    lr = config.learning_rate

    def parts(tr):
        m = M[tr[:, 1]]
        z = E[tr[:, 0]] - E[tr[:, 2]]
        u = np.einsum("bdk,bk->bd", m, z) + R[tr[:, 1]]
        return m, z, u, (u * u).sum(axis=1)

    m_p, z_p, u_p, f_pos = parts(pos)
    m_n, z_n, u_n, f_neg = parts(neg)
    losses = np.maximum(f_pos + config.margin - f_neg, 0.0)
    viol = losses > 0
    if viol.any():
        p, n = pos[viol], neg[viol]

        def accumulate(tr, m, z, u, sign):
            gu = np.einsum("bdk,bd->bk", m, u)
            np.add.at(E, tr[:, 0], -lr * sign * 2.0 * gu)
            np.add.at(E, tr[:, 2], lr * sign * 2.0 * gu)
            np.add.at(R, tr[:, 1], -lr * sign * 2.0 * u)
            gm = 2.0 * np.einsum("bd,bk->bdk", u, z)
            np.add.at(M, tr[:, 1], -lr * sign * gm)

        accumulate(p, m_p[viol], z_p[viol], u_p[viol], 1.0)
        accumulate(n, m_n[viol], z_n[viol], u_n[viol], -1.0)
    return float(losses.sum())


_BATCH_UPDATES = {
    "transe": _transe_batch_update,
    "transh": _transh_batch_update,
    "transr": _transr_batch_update,
}


def train_translational(g: KnowledgeGraph, variant: str,
                        config: TrainConfig) -> TranslationalModel:
    """Margin-ranking SGD with one sampled corruption per positive per epoch.

    Norm constraints are re-enforced after every batch. Single-worker runs
    are a pure function of (graph, config); workers > 1 applies batch shards
    concurrently without synchronization and promises convergence behavior
    only.
    """
    config.validate()
    if g.n_triples == 0:
        raise ValueError("cannot train on an empty graph")
    if g.n_entities < 2:
        raise ValueError("training needs at least 2 entities")
    model = init_model(g, variant, config)
    triples = np.array(g.sorted_triples(), dtype=np.int64)
    p_head = _head_probs(g, config.corruption)
    rng = np.random.default_rng((config.seed, 1))
    update = _BATCH_UPDATES[variant]
    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for _ in range(config.epochs):
            order = rng.permutation(len(triples))
            total = 0.0
            for start in range(0, len(order), config.batch_size):
                pos = triples[order[start:start + config.batch_size]]
                neg = _corrupt_batch(pos, g.n_entities, p_head, rng)
                if pool is None:
                    total += update(model, pos, neg, config)
                else:
                    shards = np.array_split(np.arange(len(pos)), config.workers)
                    futures = [pool.submit(update, model, pos[s], neg[s], config)
                               for s in shards if len(s)]
                    total += sum(f.result() for f in futures)
                enforce_norm_constraints(model)
            model.loss_history.append(total / len(triples))
    finally:
        if pool is not None:
            pool.shutdown()
    return model


# -- checkpoint and text export --------------------------------------------------


def save_checkpoint(model: TranslationalModel, path) -> None:
    """Binary checkpoint: fixed header + row-major little-endian f32 matrices."""
    header = struct.pack(
        "<8sBBIIII", _CKPT_MAGIC, _VARIANT_CODES[model.variant],
        _NORM_CODES[model.norm], model.dimension, model.rel_dimension,
        model.n_entities, model.n_relations)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(model.entity_vecs, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(model.relation_vecs, dtype="<f4").tobytes())
        if model.variant == "transh":
            fh.write(np.ascontiguousarray(model.normal_vecs, dtype="<f4").tobytes())
        elif model.variant == "transr":
            fh.write(np.ascontiguousarray(model.proj_mats, dtype="<f4").tobytes())


def load_checkpoint(path) -> TranslationalModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    head_len = struct.calcsize("<8sBBIIII")
    magic, vcode, ncode, k, d, n_e, n_r = struct.unpack("<8sBBIIII", blob[:head_len])
    if magic != _CKPT_MAGIC:
        raise ValueError("not a model checkpoint file")
    variant = {v: k_ for k_, v in _VARIANT_CODES.items()}[vcode]
    norm = {v: k_ for k_, v in _NORM_CODES.items()}[ncode]
    offset = head_len

    def take(shape):
        nonlocal offset
        count = int(np.prod(shape))
        arr = np.frombuffer(blob, dtype="<f4", count=count, offset=offset)
        offset += count * 4
        return arr.reshape(shape).astype(np.float64)

    entity = take((n_e, k))
    relation = take((n_r, d if variant == "transr" else k))
    normals = take((n_r, k)) if variant == "transh" else None
    proj = take((n_r, d, k)) if variant == "transr" else None
    return TranslationalModel(variant, norm, entity, relation,
                              normal_vecs=normals, proj_mats=proj)


def export_text(model: TranslationalModel, labels: list[str], path,
                what: str = "entity") -> None:
    """Write `label v1 v2 ... vk` rows for entity or relation vectors."""
    mat = model.entity_vecs if what == "entity" else model.relation_vecs
    if len(labels) != mat.shape[0]:
        raise ValueError("label count does not match matrix rows")
    with open(path, "w", encoding="utf-8") as fh:
        for label, row in zip(labels, mat):
            fh.write(label + " " + " ".join(f"{x:.8g}" for x in row) + "\n")
