"""Command-line pipeline: prepare, train-baseline, score, fuse, topics,
regions, report.

Every command is deterministic given its inputs, config and seed: reports
carry no timestamps, json is emitted with sorted keys, and reruns produce
byte-identical files.  Machine outputs are json/csv; a human-readable
table goes to stdout.  Errors print one ``aquasift: error: ...`` line on
stderr and exit 2.
"""

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import AquasiftError, baseline, cluster, fusion, geo, metrics, topics
from . import corpus as corpus_mod
from .optimize import METHODS, OptimizerConfig, TrackedObjective, run_method


def _write_json(payload, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv_rows(path, header, rows) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ----------------------------------------------------------------- config

def _load_config(path):
    if path is None:
        return configparser.ConfigParser()
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise AquasiftError(f"config file {path!r} not found")
    return parser


def _resolve(args, config, section: str, key: str, default, cast=str):
    """flag > config-file value > default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if config.has_option(section, key):
        raw = config.get(section, key)
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


# ---------------------------------------------------------------- prepare

def cmd_prepare(args, config) -> int:
    min_tokens = _resolve(args, config, "prepare", "min-tokens", 3, int)
    seed = _resolve(args, config, "prepare", "seed", 0, int)
    ratios_raw = _resolve(args, config, "prepare", "ratios", "0.7,0.2,0.1")
    ratios = tuple(float(r) for r in str(ratios_raw).split(","))
    filter_keywords = _resolve(args, config, "prepare", "filter-keywords", False, bool)

    c = corpus_mod.ingest(args.corpus)
    if filter_keywords:
        keywords = corpus_mod.load_keywords(args.keywords) if args.keywords else None
        c = corpus_mod.keyword_filter(c, keywords)
    c = corpus_mod.clean(c, min_tokens=min_tokens)
    if len(c) == 0:
        raise AquasiftError("empty corpus")
    c = corpus_mod.split(c, ratios=ratios, seed=seed)
    corpus_mod.write_jsonl(c, args.out)

    print(f"prepared {len(c)} tweets -> {args.out}")
    for split_name in corpus_mod.SPLITS:
        part = c.by_split(split_name)
        by_label = {}
        for t in part:
            by_label[t.label or "(unlabeled)"] = by_label.get(t.label or "(unlabeled)", 0) + 1
        label_str = ", ".join(f"{k}={v}" for k, v in sorted(by_label.items()))
        print(f"  {split_name:<11s} {len(part):>7d}  ({label_str})")
    return 0


# ----------------------------------------------------------- train/score

def cmd_train_baseline(args, config) -> int:
    epochs = _resolve(args, config, "train-baseline", "epochs", 200, int)
    learning_rate = _resolve(args, config, "train-baseline", "learning-rate", 0.1, float)
    seed = _resolve(args, config, "train-baseline", "seed", 0, int)
    dim = _resolve(args, config, "train-baseline", "dim", baseline.DEFAULT_DIM, int)

    c = corpus_mod.ingest(args.corpus)
    part = c.by_split(args.split) if args.split else c
    if len(part) == 0:
        raise AquasiftError(f"no tweets in split {args.split!r}")
    model = baseline.train(
        part, epochs=epochs, learning_rate=learning_rate, seed=seed, dim=dim, name=args.name
    )
    baseline.save_model(model, args.out)

    scores = baseline.score(model, part)
    preds = fusion.decide(scores)
    rep = metrics.report_for(preds, [t.label for t in part])
    print(
        f"trained {args.name!r} on {len(part)} tweets "
        f"(epochs={epochs}, lr={learning_rate}, seed={seed}): "
        f"train accuracy {rep.accuracy:.4f}, f1 {rep.f1:.4f} -> {args.out}"
    )
    return 0


def cmd_score(args, config) -> int:
    c = corpus_mod.ingest(args.corpus)
    part = c.by_split(args.split) if args.split else c
    if len(part) == 0:
        raise AquasiftError(f"no tweets in split {args.split!r}")
    models = [baseline.load_model(p) for p in args.model]
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise AquasiftError(f"duplicate model names among inputs: {names}")
    values = np.vstack([baseline.score(m, part) for m in models])
    matrix = fusion.ScoreMatrix(tuple(names), tuple(t.id for t in part), values)
    fusion.write_scores_csv(matrix, args.out)
    print(f"scored {len(part)} tweets with {len(models)} models -> {args.out}")
    if args.labels_out:
        labeled = [(t.id, t.label) for t in part if t.label is not None]
        if len(labeled) != len(part):
            raise AquasiftError("cannot write labels: some tweets are unlabeled")
        fusion.write_labels_csv(labeled, args.labels_out)
        print(f"labels -> {args.labels_out}")
    return 0


# -------------------------------------------------------------------- fuse

def _fitness_objective(matrix, labels, threshold, smooth=False):
    """Optimizer-facing objective over the raw weight box.

    Points outside [0, 1] are clipped and an all-zero vector scores the
    worst possible error, so every optimizer iterate is well defined."""
    fit = metrics.smoothed_fitness if smooth else metrics.fitness_error

    def objective(w):
        w = np.clip(np.asarray(w, dtype=np.float64), 0.0, 1.0)
        if w.sum() <= 0.0:
            return 1.0
        return fit(w, matrix, labels, threshold)

    return objective


def _eval_pair(weights, val_matrix, val_labels, test_matrix, test_labels, threshold, macro):
    out = {}
    for split_name, matrix, labels in (
        ("validation", val_matrix, val_labels),
        ("test", test_matrix, test_labels),
    ):
        fused = fusion.fuse(matrix, weights)
        preds = fusion.decide(fused, threshold)
        out[split_name] = metrics.report_for(preds, labels, macro=macro).to_dict()
    return out


def cmd_fuse(args, config) -> int:
    optimizer = _resolve(args, config, "fuse", "optimizer", "nelder-mead")
    top_k = _resolve(args, config, "fuse", "top-k", None, int)
    threshold = _resolve(args, config, "fuse", "threshold", 0.5, float)
    seed = _resolve(args, config, "fuse", "seed", 0, int)
    max_iterations = _resolve(args, config, "fuse", "max-iterations", None, int)
    smooth = _resolve(args, config, "fuse", "smooth", False, bool)
    macro = _resolve(args, config, "fuse", "macro-f1", False, bool)

    if optimizer != "all" and optimizer not in METHODS:
        raise AquasiftError(f"unknown optimizer {optimizer!r}")
    methods = list(METHODS) if optimizer == "all" else [optimizer]

    val_matrix = fusion.read_scores_csv(args.scores_validation)
    val_labels = fusion.labels_for(val_matrix, fusion.read_labels_csv(args.labels_validation))
    test_matrix = fusion.read_scores_csv(args.scores_test)
    test_labels = fusion.labels_for(test_matrix, fusion.read_labels_csv(args.labels_test))
    if set(val_matrix.model_names) != set(test_matrix.model_names):
        raise AquasiftError("validation and test score files disagree on models")

    # individual models, ranked on validation F1
    model_reports = {}
    per_model = {}
    for name in val_matrix.model_names:
        val_rep = metrics.report_for(
            fusion.decide(val_matrix.column(name), threshold), val_labels, macro=macro
        )
        test_rep = metrics.report_for(
            fusion.decide(test_matrix.column(name), threshold), test_labels, macro=macro
        )
        per_model[name] = val_rep
        model_reports[name] = {"validation": val_rep.to_dict(), "test": test_rep.to_dict()}

    k = top_k if top_k is not None else val_matrix.n_models
    selected = fusion.select_top_k(per_model, k)
    val_sel = val_matrix.select_models(selected)
    test_sel = test_matrix.select_models(selected)

    report = {
        "threshold": threshold,
        "top_k": k,
        "selected_models": selected,
        "models": model_reports,
        "simple_averaging": _eval_pair(
            np.ones(len(selected)), val_sel, val_labels, test_sel, test_labels, threshold, macro
        ),
        "fused": {},
    }

    weights_out = {}
    cfg = OptimizerConfig(seed=seed, max_iterations=max_iterations)
    raw_objective = _fitness_objective(val_sel, val_labels, threshold)
    for method in methods:
        if smooth:
            # optimize the surrogate but return the raw-error argmin over
            # every visited point; the reported error stays the raw one
            tracked = TrackedObjective(
                _fitness_objective(val_sel, val_labels, threshold, smooth=True),
                raw_objective,
            )
            result = run_method(method, tracked, len(selected), cfg)
            best = np.clip(tracked.best_weights, 0.0, 1.0)
        else:
            result = run_method(method, raw_objective, len(selected), cfg)
            best = np.clip(result.best_weights, 0.0, 1.0)
        if best.sum() <= 0.0:
            best = np.ones(len(selected))
        raw_error = metrics.fitness_error(best, val_sel, val_labels, threshold)
        normalized = fusion.normalize_weights(best)
        entry = _eval_pair(best, val_sel, val_labels, test_sel, test_labels, threshold, macro)
        entry["weights"] = {name: float(w) for name, w in zip(selected, normalized)}
        entry["optimization"] = {
            "objective": "smoothed" if smooth else "raw",
            "best_objective": float(result.best_error),
            "best_error": float(raw_error),
            "evaluations": int(result.evaluations),
            "iterations": len(result.trace),
            "trace": [float(v) for v in result.trace],
        }
        report["fused"][method] = entry
        weights_out[method] = entry["weights"]

    _write_json(report, args.out)
    print(f"fusion report -> {args.out}")
    _print_fuse_table(report)
    if args.weights_out:
        _write_json(weights_out, args.weights_out)
        print(f"weights -> {args.weights_out}")
    return 0


_METRIC_COLUMNS = ("accuracy", "error", "precision", "recall", "f1")


def _print_fuse_table(report: dict) -> None:
    methods = sorted(report["fused"])
    rows = []
    for name in sorted(report["models"]):
        rows.append((f"model:{name}", report["models"][name]))
    rows.append(("simple_averaging", report["simple_averaging"]))
    for method in methods:
        rows.append((f"fused:{method}", report["fused"][method]))

    name_width = max(len(r[0]) for r in rows) + 2
    print(f"{'':{name_width}s} split       " + "  ".join(f"{c:>9s}" for c in _METRIC_COLUMNS))
    for name, entry in rows:
        for split_name in ("validation", "test"):
            rep = entry[split_name]
            values = "  ".join(f"{rep[c]:>9.4f}" for c in _METRIC_COLUMNS)
            print(f"{name:{name_width}s} {split_name:<11s} {values}")


def cmd_report(args, config) -> int:
    payload = json.loads(Path(args.input).read_text(encoding="utf-8"))
    if "fused" not in payload or "models" not in payload:
        raise AquasiftError("not a fusion report")
    _print_fuse_table(payload)
    return 0


# ------------------------------------------------------------------ topics

def _topics_for(embedding, token_docs, ids, params):
    sub = embedding.subset(ids)
    docs = [token_docs[i] for i in ids]
    assignment, _ = cluster.hdbscan(
        sub,
        min_cluster_size=params["min_cluster_size"],
        min_samples=params["min_samples"],
        metric=params["metric"],
    )
    if assignment.n_clusters == 0:
        return [], assignment
    found = topics.extract_topics(
        docs, assignment.labels, n_topics=params["n_topics"], n_terms=params["n_terms"]
    )
    return found, assignment


def cmd_topics(args, config) -> int:
    params = {
        "target_dim": _resolve(args, config, "topics", "target-dim", 5, int),
        "min_cluster_size": _resolve(args, config, "topics", "min-cluster-size", 10, int),
        "min_samples": _resolve(args, config, "topics", "min-samples", 5, int),
        "n_topics": _resolve(args, config, "topics", "n-topics", 10, int),
        "n_terms": _resolve(args, config, "topics", "n-terms", 10, int),
        "min_count": _resolve(args, config, "topics", "min-count", 70, int),
        "metric": _resolve(args, config, "topics", "metric", "euclidean"),
        "fallback_dim": _resolve(args, config, "topics", "fallback-dim", 64, int),
        "seed": _resolve(args, config, "topics", "seed", 0, int),
    }

    c = corpus_mod.ingest(args.corpus)
    relevant = corpus_mod.Corpus(t for t in c if t.label == fusion.POSITIVE)
    if len(relevant) == 0:
        raise AquasiftError("no relevant tweets")

    token_docs = {t.id: corpus_mod.preprocess_tokens(t.text) for t in relevant}
    ids = [t.id for t in relevant]

    if args.embeddings:
        embedding = cluster.load_embeddings(args.embeddings, expected_ids=ids)
    else:
        embedding = cluster.embed_fallback(
            relevant, dim=params["fallback_dim"], seed=params["seed"]
        )
    if params["target_dim"] < embedding.dim:
        embedding = cluster.pca_reduce(embedding, params["target_dim"])

    global_topics, assignment = _topics_for(embedding, token_docs, ids, params)

    gazetteer = geo.load_gazetteer(args.gazetteer_patterns, args.gazetteer_regions)
    payload = {
        "parameters": params,
        "n_documents": len(relevant),
        "global": topics.topics_to_dict(global_topics),
        "by_country": {},
        "by_region": {},
    }
    for key_name, section in (("country", "by_country"), ("region", "by_region")):
        for group in geo.group_and_filter(relevant, gazetteer, key=key_name, min_count=params["min_count"]):
            group_topics, _ = _topics_for(embedding, token_docs, list(group.member_ids), params)
            payload[section][group.key] = {
                "count": group.count,
                "topics": topics.topics_to_dict(group_topics),
            }

    _write_json(payload, args.out)
    print(
        f"topics -> {args.out} (global clusters: {assignment.n_clusters}, "
        f"countries: {len(payload['by_country'])}, regions: {len(payload['by_region'])})"
    )
    if args.csv_out:
        rows = topics.topics_to_csv_rows(global_topics)
        _write_csv_rows(args.csv_out, ["term", "weight", "topic"], [(t, repr(w), k) for t, w, k in rows])
        print(f"plot data -> {args.csv_out}")
    if args.clusters_out:
        assignment.write_csv(args.clusters_out)
        print(f"cluster assignment -> {args.clusters_out}")
    return 0


# ----------------------------------------------------------------- regions

def cmd_regions(args, config) -> int:
    only_relevant = _resolve(args, config, "regions", "only-relevant", False, bool)
    c = corpus_mod.ingest(args.corpus)
    if only_relevant:
        c = corpus_mod.Corpus(t for t in c if t.label == fusion.POSITIVE)
    gazetteer = geo.load_gazetteer(args.gazetteer_patterns, args.gazetteer_regions)

    for key_name, out_path in (("country", args.countries_out), ("region", args.regions_out)):
        groups = geo.group_by_key(c, gazetteer, key=key_name)
        if out_path:
            _write_csv_rows(out_path, [key_name, "count"], [(g.key, g.count) for g in groups])
        print(f"{key_name} distribution:")
        for g in groups:
            print(f"  {g.key:<28s} {g.count:>7d}")
    return 0


# -------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aquasift",
        description="Merit-based late fusion and topic discovery for labeled short-text corpora.",
    )
    parser.add_argument("--config", help="INI config file; sections mirror subcommands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="clean, deduplicate and split a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-tokens", type=int)
    p.add_argument("--ratios", help="train,test,validation ratios (default 0.7,0.2,0.1)")
    p.add_argument("--seed", type=int)
    p.add_argument("--filter-keywords", action="store_const", const=True)
    p.add_argument("--keywords", help="keyword list file (default: bundled)")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train-baseline", help="train the stand-in logistic scorer")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="train")
    p.add_argument("--name", default="baseline")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("score", help="score a corpus split with trained models")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--model", action="append", required=True, help="model file (repeatable)")
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("fuse", help="optimize fusion weights and evaluate")
    p.add_argument("--scores-validation", required=True)
    p.add_argument("--labels-validation", required=True)
    p.add_argument("--scores-test", required=True)
    p.add_argument("--labels-test", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weights-out")
    p.add_argument("--optimizer", choices=list(METHODS) + ["all"])
    p.add_argument("--top-k", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--smooth", action="store_const", const=True,
                   help="optimize the smoothed surrogate instead of raw error")
    p.add_argument("--macro-f1", action="store_const", const=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("topics", help="cluster relevant tweets and extract topics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", help="external embedding file (csv or jsonl)")
    p.add_argument("--out", required=True)
    p.add_argument("--csv-out")
    p.add_argument("--clusters-out")
    p.add_argument("--target-dim", type=int)
    p.add_argument("--min-cluster-size", type=int)
    p.add_argument("--min-samples", type=int)
    p.add_argument("--n-topics", type=int)
    p.add_argument("--n-terms", type=int)
    p.add_argument("--min-count", type=int)
    p.add_argument("--metric", choices=["euclidean", "cosine"])
    p.add_argument("--fallback-dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gazetteer-patterns")
    p.add_argument("--gazetteer-regions")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("regions", help="country and region distribution tables")
    p.add_argument("--corpus", required=True)
    p.add_argument("--countries-out")
    p.add_argument("--regions-out")
    p.add_argument("--only-relevant", action="store_const", const=True)
    p.add_argument("--gazetteer-patterns")
    p.add_argument("--gazetteer-regions")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("report", help="print the table from a fusion report json")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (AquasiftError, OSError) as e:
        print(f"aquasift: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
