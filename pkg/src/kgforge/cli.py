"""Batch CLI: ingest, split, train, eval, nearest, export, synth.

Runs are driven by an INI-style config file (one section per model plus
[run]) with flags taking precedence over file values. Every training run
writes a manifest echoing the full resolved config; replaying the manifest
reproduces the run byte for byte. Exit codes: 0 success, 2 bad
arguments/config, 3 I/O failure, 4 validation failure. Diagnostics go to
stderr, results to stdout. KGFORGE_LOG selects the log level.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluation, report, synth
from .graph import GraphParseError, KnowledgeGraph, load_graph
from .kglove import (GloVeConfig, build_cooccurrence, dump_cooccurrence_text,
                     save_cooccurrence, train_glove)
from .trans import (TrainConfig, VARIANTS, export_text, load_checkpoint,
                    save_checkpoint, train_translational)
from .walks import build_corpus, save_corpus
from .word2vec import TokenEmbeddings, W2VConfig, train_sequences

log = logging.getLogger("kgforge.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

MODELS = ("transe", "transh", "transr", "rdf2vec", "kglove")


class UsageError(Exception):
    """Bad arguments or configuration (exit 2)."""


class ValidationError(Exception):
    """Inputs that parse but do not fit together (exit 4)."""


DEFAULTS = {
    "run": {
        "input": "", "format": "tsv", "model": "transe", "seed": "0",
        "output": "out", "graph": "", "splits": "0.8,0.1,0.1",
        "workers": "1", "hits": "1,3,10",
    },
    "transe": {
        "dimension": "50", "margin": "1.0", "learning_rate": "0.01",
        "epochs": "50", "batch_size": "256", "corruption": "uniform",
        "norm": "l2",
    },
    "transh": {
        "dimension": "50", "margin": "1.0", "learning_rate": "0.01",
        "epochs": "50", "batch_size": "256", "corruption": "uniform",
        "constraint_weight": "0.25", "orthogonality_eps": "0.1",
    },
    "transr": {
        "dimension": "50", "relation_dimension": "", "margin": "1.0",
        "learning_rate": "0.01", "epochs": "50", "batch_size": "256",
        "corruption": "uniform",
    },
    "rdf2vec": {
        "mode": "walks", "depth": "4", "walks_per_vertex": "",
        "wl_iterations": "2", "architecture": "skipgram", "dimension": "50",
        "window": "5", "negatives": "5", "epochs": "5",
        "learning_rate": "0.025", "min_count": "1",
    },
    "kglove": {
        "strategy": "uniform", "alpha": "0.15", "paint_eps": "1e-5",
        "dimension": "50", "x_max": "", "exponent": "0.75", "epochs": "30",
        "learning_rate": "0.05",
    },
}


def resolve_config(path: str | None, overrides) -> dict:
    """Layer defaults, config file, and --set overrides; reject unknown keys."""
    cfg = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
    if path:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise UsageError(f"config parse error: {exc}") from exc
        for sec in parser.sections():
            if sec not in cfg:
                raise UsageError(f"unknown config section [{sec}]")
            for key, val in parser[sec].items():
                if key not in cfg[sec]:
                    raise UsageError(f"unknown config key {sec}.{key}")
                cfg[sec][key] = val
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise UsageError(f"--set expects section.key=value, got {item!r}")
        target, val = item.split("=", 1)
        sec, key = target.split(".", 1)
        if sec not in cfg or key not in cfg[sec]:
            raise UsageError(f"unknown config key {sec}.{key}")
        cfg[sec][key] = val.strip()
    return cfg


def write_manifest(cfg: dict, sections, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sec in sections:
            fh.write(f"[{sec}]\n")
            for key in sorted(cfg[sec]):
                fh.write(f"{key} = {cfg[sec][key]}\n")
            fh.write("\n")


def _typed(cfg, sec, key, parse, check=None, what=""):
    raw = cfg[sec][key]
    try:
        val = parse(raw)
    except (TypeError, ValueError):
        raise UsageError(f"{sec}.{key}: cannot parse {raw!r}") from None
    if check is not None and not check(val):
        raise UsageError(f"{sec}.{key}={raw!r} is out of domain{what}")
    return val


def _opt(cfg, sec, key, parse):
    raw = cfg[sec][key].strip()
    return None if raw == "" else _typed(cfg, sec, key, parse)


def _train_config(cfg, model: str, seed: int, workers: int) -> TrainConfig:
    sec = cfg[model]
    tc = TrainConfig(
        dimension=_typed(cfg, model, "dimension", int),
        relation_dimension=_opt(cfg, model, "relation_dimension", int)
        if "relation_dimension" in sec else None,
        margin=_typed(cfg, model, "margin", float),
        learning_rate=_typed(cfg, model, "learning_rate", float),
        epochs=_typed(cfg, model, "epochs", int),
        batch_size=_typed(cfg, model, "batch_size", int),
        corruption=_typed(cfg, model, "corruption", str),
        constraint_weight=_typed(cfg, model, "constraint_weight", float)
        if "constraint_weight" in sec else 0.25,
        orthogonality_eps=_typed(cfg, model, "orthogonality_eps", float)
        if "orthogonality_eps" in sec else 0.1,
        norm=_typed(cfg, model, "norm", str) if "norm" in sec else "l2",
        seed=seed,
        workers=workers,
    )
    try:
        tc.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return tc


def _load_vocab_graph(cfg) -> tuple[KnowledgeGraph, list]:
    """Graph providing the id space, plus the training triples mapped into it."""
    fmt = _typed(cfg, "run", "format", str,
                 check=lambda v: v in ("tsv", "ntriples"))
    train_path = cfg["run"]["input"]
    if not train_path:
        raise UsageError("no training input given (flag --train or run.input)")
    vocab_path = cfg["run"]["graph"]
    train_graph = load_graph(train_path, fmt)
    if not vocab_path:
        return train_graph, train_graph.sorted_triples()
    full = load_graph(vocab_path, fmt)
    triples = []
    for h, r, t in train_graph.label_triples():
        try:
            triples.append((full.entity_ids[h], full.relation_ids[r],
                            full.entity_ids[t]))
        except KeyError as exc:
            raise ValidationError(
                f"training label {exc.args[0]!r} missing from vocabulary graph")
    return KnowledgeGraph(full.entities, full.relations, triples), triples


def _write_loss_table(losses, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch\tmean_loss\n")
        for i, l in enumerate(losses, start=1):
            fh.write(f"{i}\t{l:.10g}\n")


# -- subcommands -----------------------------------------------------------------


def cmd_ingest(args) -> int:
    g = load_graph(args.input, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    g.write_tsv(out / "graph.tsv")
    g.write_vocab(out / "entities.tsv", "entity")
    g.write_vocab(out / "relations.tsv", "relation")
    print(f"entities={g.n_entities} relations={g.n_relations} "
          f"triples={g.n_triples} skipped_literals={g.skipped_literals}")
    return EXIT_OK


def cmd_split(args) -> int:
    parts = args.fractions.split(",")
    if len(parts) != 3:
        raise UsageError("--fractions expects train,valid,test")
    try:
        fracs = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse fractions {args.fractions!r}") from None
    if any(f <= 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
        raise UsageError("split fractions must be positive and sum to 1")
    g = load_graph(args.input, args.format)
    if g.n_triples == 0:
        raise ValidationError("cannot split an empty graph")
    triples = list(g.label_triples())
    rng = np.random.default_rng((args.seed, 5))
    order = rng.permutation(len(triples))
    n_train = int(round(fracs[0] * len(triples)))
    n_valid = int(round(fracs[1] * len(triples)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pieces = {
        "train.tsv": order[:n_train],
        "valid.tsv": order[n_train:n_train + n_valid],
        "test.tsv": order[n_train + n_valid:],
    }
    for name, idx in pieces.items():
        with open(out / name, "w", encoding="utf-8") as fh:
            for i in idx:
                h, r, t = triples[i]
                fh.write(f"{h}\t{r}\t{t}\n")
    print(" ".join(f"{name.split('.')[0]}={len(idx)}"
                   for name, idx in pieces.items()))
    return EXIT_OK


def _train_translational(cfg, g, model_name, seed, workers, out: Path) -> None:
    tc = _train_config(cfg, model_name, seed, workers)
    try:
        model = train_translational(g, model_name, tc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    save_checkpoint(model, out / "model.ckpt")
    _write_loss_table(model.loss_history, out / "loss.tsv")
    if model.loss_history:
        report.save_loss_curve(model.loss_history, out / "loss.png",
                               title=f"{model_name} training loss")
    print(f"checkpoint={out / 'model.ckpt'}")


def _train_rdf2vec(cfg, g, seed, workers, out: Path) -> None:
    sec = "rdf2vec"
    mode = _typed(cfg, sec, "mode", str, check=lambda v: v in ("walks", "wl"))
    corpus = build_corpus(
        g, mode=mode,
        depth=_typed(cfg, sec, "depth", int, check=lambda v: v > 0),
        cap=_opt(cfg, sec, "walks_per_vertex", int),
        iterations=_typed(cfg, sec, "wl_iterations", int, check=lambda v: v >= 0),
        seed=seed)
    save_corpus(corpus, out / "corpus.txt")
    wc = W2VConfig(
        dimension=_typed(cfg, sec, "dimension", int),
        window=_typed(cfg, sec, "window", int),
        negatives=_typed(cfg, sec, "negatives", int),
        epochs=_typed(cfg, sec, "epochs", int),
        learning_rate=_typed(cfg, sec, "learning_rate", float),
        min_count=_typed(cfg, sec, "min_count", int),
        seed=seed, workers=workers)
    try:
        wc.validate()
        emb = train_sequences(corpus, _typed(cfg, sec, "architecture", str),
                              wc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emb.save_text(out / "vectors.txt")
    losses = emb.metadata.get("loss_history", [])
    _write_loss_table(losses, out / "loss.tsv")
    if losses:
        report.save_loss_curve(losses, out / "loss.png", title="rdf2vec training loss")
    print(f"vectors={out / 'vectors.txt'}")


def _train_kglove(cfg, g, seed, workers, out: Path) -> None:
    sec = "kglove"
    try:
        x = build_cooccurrence(
            g,
            strategy=_typed(cfg, sec, "strategy", str),
            alpha=_typed(cfg, sec, "alpha", float,
                         check=lambda v: 0.0 < v < 1.0),
            eps=_typed(cfg, sec, "paint_eps", float, check=lambda v: v > 0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    save_cooccurrence(x, out / "cooccurrence.bin")
    dump_cooccurrence_text(x, out / "cooccurrence.tsv")
    gc = GloVeConfig(
        dimension=_typed(cfg, sec, "dimension", int),
        x_max=_opt(cfg, sec, "x_max", float),
        exponent=_typed(cfg, sec, "exponent", float),
        epochs=_typed(cfg, sec, "epochs", int),
        learning_rate=_typed(cfg, sec, "learning_rate", float),
        seed=seed, workers=workers)
    try:
        gc.validate()
        emb = train_glove(x, gc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emb.save_text(out / "vectors.txt")
    losses = emb.metadata.get("loss_history", [])
    _write_loss_table(losses, out / "loss.tsv")
    if losses:
        report.save_loss_curve(losses, out / "loss.png", title="kglove training loss")
    print(f"vectors={out / 'vectors.txt'}")


def cmd_train(args) -> int:
    cfg = resolve_config(args.config, args.set)
    for flag, key in (("train", "input"), ("graph", "graph"),
                      ("model", "model"), ("out", "output"),
                      ("seed", "seed"), ("workers", "workers")):
        val = getattr(args, flag)
        if val is not None:
            cfg["run"][key] = str(val)
    model_name = cfg["run"]["model"]
    if model_name not in MODELS:
        raise UsageError(f"unknown model {model_name!r}")
    seed = _typed(cfg, "run", "seed", int)
    workers = _typed(cfg, "run", "workers", int, check=lambda v: v >= 1)
    g, _ = _load_vocab_graph(cfg)
    out = Path(cfg["run"]["output"])
    out.mkdir(parents=True, exist_ok=True)
    if model_name in VARIANTS:
        _train_translational(cfg, g, model_name, seed, workers, out)
    elif model_name == "rdf2vec":
        _train_rdf2vec(cfg, g, seed, workers, out)
    else:
        _train_kglove(cfg, g, seed, workers, out)
    write_manifest(cfg, ("run", model_name), out / "manifest.cfg")
    print(f"manifest={out / 'manifest.cfg'}")
    return EXIT_OK


def _triples_via_vocab(path, fmt, g: KnowledgeGraph):
    raw = load_graph(path, fmt)
    triples = []
    for h, r, t in raw.label_triples():
        try:
            triples.append((g.entity_ids[h], g.relation_ids[r], g.entity_ids[t]))
        except KeyError as exc:
            raise ValidationError(
                f"label {exc.args[0]!r} missing from the filter graph vocabulary")
    return triples


def cmd_eval(args) -> int:
    g = load_graph(args.graph, args.format)
    model = load_checkpoint(args.checkpoint)
    if (model.n_entities, model.n_relations) != (g.n_entities, g.n_relations):
        raise ValidationError(
            f"checkpoint vocabulary ({model.n_entities} entities, "
            f"{model.n_relations} relations) does not match the graph "
            f"({g.n_entities}, {g.n_relations})")
    test = _triples_via_vocab(args.test, args.format, g)
    if not test:
        raise ValidationError("test split is empty")
    try:
        ks = tuple(int(k) for k in args.hits.split(","))
    except ValueError:
        raise UsageError(f"cannot parse --hits {args.hits!r}") from None
    reports, rows = evaluation.evaluate(model, g, test, ks)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    evaluation.write_report_text(reports, out / "report.txt")
    evaluation.write_report_tsv(reports, out / "report.tsv")
    evaluation.write_ranks_tsv(rows, g, out / "ranks.tsv")
    by_setting = {s: [rank for *_x, st, rank in rows if st == s]
                  for s in ("raw", "filtered")}
    report.save_rank_histogram(by_setting, out / "rank_histogram.png")
    for line in evaluation.report_lines(reports):
        print(line)
    return EXIT_OK


def cmd_nearest(args) -> int:
    emb = TokenEmbeddings.load_text(args.vectors)
    try:
        results = evaluation.nearest_neighbors(emb, args.query, args.k, args.metric)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    for token, score in results:
        print(f"{token}\t{score:.6g}")
    return EXIT_OK


def cmd_export(args) -> int:
    model = load_checkpoint(args.checkpoint)
    g = load_graph(args.graph, args.format)
    if (model.n_entities, model.n_relations) != (g.n_entities, g.n_relations):
        raise ValidationError("checkpoint vocabulary does not match the graph")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wrote = []
    if args.what in ("entity", "both"):
        export_text(model, g.entities, out / "entities.txt", "entity")
        wrote.append(str(out / "entities.txt"))
    if args.what in ("relation", "both"):
        export_text(model, g.relations, out / "relations.txt", "relation")
        wrote.append(str(out / "relations.txt"))
    print(" ".join(wrote))
    return EXIT_OK


def _write_truth(mat, labels, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, row in zip(labels, mat):
            fh.write(label + " " + " ".join(f"{x:.8g}" for x in row) + "\n")


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "planted":
        try:
            g, truth = synth.generate_planted_kg(
                args.entities, args.relations, args.dimension,
                args.triples_per_relation, args.noise, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        g.write_tsv(out / "graph.tsv")
        g.write_vocab(out / "entities.tsv", "entity")
        g.write_vocab(out / "relations.tsv", "relation")
        _write_truth(truth["entity_vectors"], g.entities, out / "truth_entities.txt")
        _write_truth(truth["relation_vectors"], g.relations, out / "truth_relations.txt")
        print(f"entities={g.n_entities} relations={g.n_relations} "
              f"triples={g.n_triples}")
        return EXIT_OK
    mix = {"node": args.node_fraction, "edge": args.edge_fraction,
           "subgraph": args.subgraph_fraction, "graph": args.graph_fraction}
    try:
        labeled = synth.generate_factory_graph(args.machines, args.sensors,
                                               mix, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    g = labeled.graph
    g.write_tsv(out / "graph.tsv")
    g.write_vocab(out / "entities.tsv", "entity")
    g.write_vocab(out / "relations.tsv", "relation")
    with open(out / "status.tsv", "w", encoding="utf-8") as fh:
        for label in sorted(labeled.node_status):
            fh.write(f"{label}\t{labeled.node_status[label]}\n")
    with open(out / "annotations.tsv", "w", encoding="utf-8") as fh:
        for ann in labeled.annotations:
            fh.write(ann.mode + "\t" + " ".join(ann.elements) + "\n")
    n_failed = sum(1 for s in labeled.node_status.values() if s == "failed")
    print(f"entities={g.n_entities} triples={g.n_triples} "
          f"failed_nodes={n_failed} annotations={len(labeled.annotations)}")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgforge",
        description="Knowledge-graph embedding toolkit: ingest, train, evaluate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a triple file, write canonical artifacts")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="tsv", choices=("tsv", "ntriples"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="materialize train/valid/test triple files")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="tsv", choices=("tsv", "ntriples"))
    p.add_argument("--fractions", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a model, write checkpoint and manifest")
    p.add_argument("--config", default=None)
    p.add_argument("--model", default=None, choices=MODELS)
    p.add_argument("--train", default=None, help="training triple file")
    p.add_argument("--graph", default=None,
                   help="optional full graph supplying the vocabulary")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--set", action="append", default=[],
                   metavar="SECTION.KEY=VALUE")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="rank test triples against a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--graph", required=True,
                   help="filter graph supplying the vocabulary")
    p.add_argument("--format", default="tsv", choices=("tsv", "ntriples"))
    p.add_argument("--hits", default="1,3,10")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("nearest", help="query nearest neighbors in a vector file")
    p.add_argument("--vectors", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--metric", default="cosine", choices=("cosine", "euclidean"))
    p.set_defaults(func=cmd_nearest)

    p = sub.add_parser("export", help="dump checkpoint matrices as labeled text")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--format", default="tsv", choices=("tsv", "ntriples"))
    p.add_argument("--what", default="both", choices=("entity", "relation", "both"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    kind = p.add_subparsers(dest="kind", required=True)
    pl = kind.add_parser("planted", help="lattice-translation graph with ground truth")
    pl.add_argument("--entities", type=int, default=1000)
    pl.add_argument("--relations", type=int, default=10)
    pl.add_argument("--dimension", type=int, default=20)
    pl.add_argument("--triples-per-relation", type=int, default=800)
    pl.add_argument("--noise", type=float, default=0.05)
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_synth)
    fa = kind.add_parser("factory", help="machine/sensor graph with injected failures")
    fa.add_argument("--machines", type=int, default=10)
    fa.add_argument("--sensors", type=int, default=4)
    fa.add_argument("--node-fraction", type=float, default=0.0)
    fa.add_argument("--edge-fraction", type=float, default=0.0)
    fa.add_argument("--subgraph-fraction", type=float, default=0.0)
    fa.add_argument("--graph-fraction", type=float, default=0.0)
    fa.add_argument("--seed", type=int, default=0)
    fa.add_argument("--out", required=True)
    fa.set_defaults(func=cmd_synth)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("KGFORGE_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def run(argv=None) -> int:
    """Dispatch one CLI invocation and return its exit code."""
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
