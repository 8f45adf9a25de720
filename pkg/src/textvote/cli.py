"""Command-line front end: embed, train, predict, vote, evaluate, nn, paper-run."""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path

import numpy as np

from . import bow_svm, embeddings, ensemble, metrics, nets
from .corpus import DatasetSpec, build_vocab, load_dataset, read_token_lines, read_unlabeled
from .textio import atomic_write

VARIANTS = [v.value for v in embeddings.Variant]
ARCHS = [a.value for a in nets.Arch] + ["svm"]
INITS = [i.value for i in nets.Init]

W11_WARNING = (
    "warning: fasttext with window 11 lets single-character n-grams dominate Chinese word vectors; "
    "in the reference experiments this setting put 5 one-character words in the top 10 neighbours of "
    "高兴 (0 for the other embeddings) and was dropped from the ensemble. Audit with `textvote nn`."
)

# Published development-set accuracies for the configurations `paper-run` rebuilds,
# shown next to the regenerated numbers for comparison.
REFERENCE_DEV_ACCURACY = {
    "nbow/CWE-L-W5": 0.814, "nbow/CWE-P-W5": 0.816, "nbow/FastText-W5": 0.812,
    "nbow/CWE-L-W11": 0.816, "nbow/CWE-P-W11": 0.816,
    "cnn/CWE-L-W5": 0.822, "cnn/CWE-P-W5": 0.823, "cnn/FastText-W5": 0.820,
    "cnn/CWE-L-W11": 0.824, "cnn/CWE-P-W11": 0.821,
    "lstm/CWE-L-W5": 0.808, "lstm/CWE-P-W5": 0.805, "lstm/FastText-W5": 0.801,
    "lstm/CWE-L-W11": 0.807, "lstm/CWE-P-W11": 0.806,
    "bow-svm": 0.791, "vote": 0.826,
}


class CliError(Exception):
    pass


def _need_file(path, what):
    if path is None or not Path(path).is_file():
        raise CliError(f"{what} not found: {path}")


def _need_outdir(path):
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise CliError(f"output directory does not exist: {parent}")


@contextlib.contextmanager
def _cleanup_on_error(*paths):
    """Remove every listed output if the body fails, so no partial results remain.

    A list argument is read at failure time, so the body may keep appending to it.
    """
    try:
        yield
    except BaseException:
        for p in paths:
            for q in p if isinstance(p, list) else [p]:
                if q is not None:
                    with contextlib.suppress(FileNotFoundError):
                        os.unlink(q)
        raise


def _model_kind(path) -> str:
    with open(path, encoding="utf-8") as f:
        head = f.readline().rstrip("\n")
    if head == bow_svm.SVM_MAGIC:
        return "svm"
    if head == f"{nets.MODEL_MAGIC} net":
        return "net"
    raise CliError(f"{path}: field 'magic': unrecognised model header {head[:40]!r}")


# ---------------------------------------------------------------- embed


def _embed_config(args, variant=None, window=None) -> embeddings.EmbeddingTrainConfig:
    return embeddings.EmbeddingTrainConfig(
        dim=args.dim,
        window=window or args.window,
        epochs=args.epochs,
        negatives=args.negatives,
        min_count=args.min_count,
        lr0=args.lr,
        variant=variant or args.variant,
        clusters=args.clusters,
        min_n=args.min_n,
        max_n=args.max_n,
        seed=args.seed,
        sample=args.sample,
        workers=args.workers,
    )


def cmd_embed(args) -> int:
    _need_file(args.corpus, "corpus")
    _need_outdir(args.out)
    config = _embed_config(args)
    if config.variant is embeddings.Variant.FASTTEXT and config.window >= 11:
        print(W11_WARNING, file=sys.stderr)
    with _cleanup_on_error(args.out, embeddings.sidecar_path(args.out)):
        eset = embeddings.train_embeddings(read_token_lines(args.corpus), config)
        embeddings.save_embeddings(eset, args.out)
    print(f"wrote {eset.vocab.n_tokens} x {eset.dim} vectors to {args.out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- train


def _net_config(args, spec, dim) -> nets.NetConfig:
    init = args.init or ("pretrained" if args.embeddings else "random-word")
    return nets.NetConfig(
        arch=args.arch,
        dim=dim,
        num_classes=spec.num_classes,
        filter_width=args.filter_width,
        num_filters=args.num_filters,
        hidden=args.hidden,
        max_len=args.max_len,
        lr=args.lr,
        epochs=args.epochs if args.epochs is not None else 10,
        batch_size=args.batch_size,
        seed=args.seed,
        fine_tune_embeddings=not args.no_fine_tune,
        init=init,
        granularity=args.granularity,
    )


def cmd_train(args) -> int:
    _need_file(args.classes, "class list")
    _need_file(args.train, "training file")
    _need_file(args.dev, "dev file")
    if args.embeddings:
        _need_file(args.embeddings, "embedding file")
    _need_outdir(args.out)
    if args.report:
        _need_outdir(args.report)
    spec = DatasetSpec.from_file(args.classes)
    train_set = load_dataset(args.train, spec)
    dev_set = load_dataset(args.dev, spec)
    with _cleanup_on_error(args.out, args.report):
        if args.arch == "svm":
            _train_svm(args, spec, train_set, dev_set)
        else:
            _train_net(args, spec, train_set, dev_set)
    return 0


def _train_svm(args, spec, train_set, dev_set):
    config = bow_svm.SvmConfig(
        C=args.C, epochs=args.epochs if args.epochs is not None else 20, seed=args.seed, binary=not args.counts
    )
    vocab = build_vocab((h.tokens for h in train_set), 1)
    model = bow_svm.train_svm(train_set, vocab, config, spec.num_classes, spec.class_names)
    bow_svm.save_svm(model, args.out)
    acc = float(np.mean([bow_svm.predict_tokens(model, h.tokens)[0] == h.label for h in dev_set]))
    if args.report:
        with atomic_write(args.report) as f:
            f.write(f"epochs\tdev_accuracy\n{config.epochs}\t{acc:.6f}\n")
    print(f"svm dev accuracy {acc:.4f}", file=sys.stderr)


def _train_net(args, spec, train_set, dev_set):
    pretrained = embeddings.load_embeddings(args.embeddings) if args.embeddings else None
    dim = args.dim if args.dim is not None else (pretrained.dim if pretrained is not None else 300)
    config = _net_config(args, spec, dim)
    if config.init is not nets.Init.PRETRAINED:
        pretrained = None
    vocab = nets.build_unit_vocab(train_set, config)
    model = nets.init_model(config, vocab, pretrained, spec.class_names)
    best, report = nets.train(model, train_set, dev_set)
    nets.save_model(best, args.out)
    if args.report:
        with atomic_write(args.report) as f:
            f.write(report.to_tsv())
    print(f"{config.arch.value} best dev accuracy {report.best_dev_accuracy:.4f} (epoch {report.best_epoch})", file=sys.stderr)


# ---------------------------------------------------------------- predict


def predict_file(model_path, input_path):
    """``(label_names, score_rows)`` for every line of ``input_path``."""
    seqs = read_unlabeled(input_path)
    if _model_kind(model_path) == "svm":
        model = bow_svm.load_svm(model_path)
        rows = [bow_svm.predict_tokens(model, s) for s in seqs]
        labels = [model.class_names[k] for k, _ in rows]
        return labels, [p for _, p in rows]
    model = nets.load_model(model_path)
    probs = nets.predict_batch(model, seqs) if seqs else np.zeros((0, model.config.num_classes))
    return [model.class_names[k] for k in probs.argmax(axis=1)], probs


def cmd_predict(args) -> int:
    _need_file(args.model, "model file")
    _need_file(args.input, "input file")
    _need_outdir(args.out)
    labels, probs = predict_file(args.model, args.input)
    ensemble.write_predictions(args.out, labels, probs)
    return 0


# ---------------------------------------------------------------- vote


def _pred_sources(items):
    sources = {}
    for item in items:
        sys_id, sep, path = item.partition("=")
        if not sep:
            path, sys_id = item, Path(item).stem
        if sys_id in sources:
            raise CliError(f"system {sys_id!r} given twice")
        sources[sys_id] = path
    return sources


def vote_files(tree, sources: dict, class_names, soft=False):
    for leaf in ensemble.leaves(tree):
        if leaf not in sources:
            raise CliError(f"no prediction file for system {leaf!r}")
        _need_file(sources[leaf], f"prediction file for system {leaf!r}")
    K = len(class_names)
    rows = {leaf: ensemble.read_predictions(sources[leaf]) for leaf in set(ensemble.leaves(tree))}
    sizes = {len(r) for r in rows.values()}
    if len(sizes) != 1:
        raise CliError(f"prediction files differ in length: { {k: len(v) for k, v in rows.items()} }")
    n = sizes.pop()
    labels, scores = [], np.zeros((n, K))
    for i in range(n):
        preds = {s: ensemble.to_prediction(*rows[s][i], class_names) for s in rows}
        winner = ensemble.eval_tree(tree, preds, soft)
        labels.append(class_names[winner.label])
        scores[i, winner.label] = winner.confidence
    return labels, scores


def cmd_vote(args) -> int:
    _need_file(args.spec, "ensemble spec")
    _need_file(args.classes, "class list")
    _need_outdir(args.out)
    tree = ensemble.load_tree(args.spec)
    if args.flat:
        tree = ensemble.flatten(tree)
    spec = DatasetSpec.from_file(args.classes)
    labels, scores = vote_files(tree, _pred_sources(args.pred), spec.class_names, args.soft)
    ensemble.write_predictions(args.out, labels, scores)
    return 0


# ---------------------------------------------------------------- evaluate


def evaluate_files(gold_path, pred_path, spec: DatasetSpec, harmonic=False):
    gold = load_dataset(gold_path, spec)
    preds = ensemble.read_predictions(pred_path)
    if len(gold) != len(preds):
        raise CliError(f"{len(gold)} gold lines but {len(preds)} predictions")
    try:
        p = [spec.index(label) for label, _ in preds]
    except KeyError as e:
        raise CliError(f"unknown predicted class {e}") from None
    cm = metrics.confusion([h.label for h in gold], p, spec.num_classes)
    return metrics.report_items(metrics.compute_metrics(cm), spec.class_names, harmonic)


def cmd_evaluate(args) -> int:
    for path, what in ((args.gold, "gold file"), (args.pred, "prediction file"), (args.classes, "class list")):
        _need_file(path, what)
    for out in (args.out, args.json):
        if out:
            _need_outdir(out)
    spec = DatasetSpec.from_file(args.classes)
    items = evaluate_files(args.gold, args.pred, spec, args.macro_f1 == "harmonic")
    with _cleanup_on_error(args.out, args.json):
        metrics.write_report(items, args.out, args.json)
    if not args.out and not args.json:
        for key, val in items:
            print(f"{key}\t{val:.6f}")
    return 0


# ---------------------------------------------------------------- nn


def cmd_nn(args) -> int:
    _need_file(args.embeddings, "embedding file")
    eset = embeddings.load_embeddings(args.embeddings)
    try:
        neighbours = embeddings.nearest_neighbors(eset, args.token, args.k)
    except KeyError:
        raise CliError(f"{args.token!r} is not in the embedding vocabulary") from None
    for tok, sim in neighbours:
        print(f"{tok}\t{sim:.6f}")
    print(f"single_char_in_top{args.k}={embeddings.single_char_audit(neighbours)}")
    return 0


# ---------------------------------------------------------------- paper-run

EMBEDDING_RECIPES = {
    "CWE-L-W5": ("cwe-l", 5),
    "CWE-P-W5": ("cwe-p", 5),
    "FastText-W5": ("fasttext", 5),
    "CWE-L-W11": ("cwe-l", 11),
    "CWE-P-W11": ("cwe-p", 11),
}


def cmd_paper_run(args) -> int:
    """Rebuild the 16-system ensemble end to end on user-supplied data.

    Given the original NLPCC 2017 headline data and the embedding corpora,
    the summary regenerates the 15 pretrained-embedding dev accuracies, the
    BoW SVM accuracy and the voted accuracy, printed next to the published
    values.
    """
    for path, what in ((args.train, "training file"), (args.dev, "dev file"), (args.classes, "class list"), (args.corpus, "corpus")):
        _need_file(path, what)
    work = Path(args.workdir)
    for sub in ("emb", "models", "pred", "metrics"):
        (work / sub).mkdir(parents=True, exist_ok=True)
    written: list = []
    with _cleanup_on_error(written):
        _paper_run(args, work, written)
    print((work / "summary.tsv").read_text(encoding="utf-8"), end="")
    return 0


def _paper_run(args, work: Path, written: list) -> None:
    def out(path):
        written.append(path)
        return path

    spec = DatasetSpec.from_file(args.classes)
    train_set = load_dataset(args.train, spec)
    dev_set = load_dataset(args.dev, spec)
    corpus = list(read_token_lines(args.corpus))
    baseline_ids, bow_id = ensemble.paper_system_ids()

    sets = {}
    for name, (variant, window) in EMBEDDING_RECIPES.items():
        config = _embed_config(args, variant, window)
        path = out(work / "emb" / f"{name}.vec")
        eset = embeddings.train_embeddings(corpus, config)
        out(embeddings.sidecar_path(path))
        embeddings.save_embeddings(eset, path)
        sets[name] = embeddings.load_embeddings(path)
        print(f"embedded {name}", file=sys.stderr)

    sources = {}
    for sys_id in baseline_ids:
        arch, emb = sys_id.split("/")
        config = nets.NetConfig(
            arch=arch, dim=args.dim, num_classes=spec.num_classes, filter_width=args.filter_width,
            num_filters=args.num_filters, hidden=args.hidden, max_len=args.max_len, lr=args.net_lr,
            epochs=args.net_epochs, batch_size=args.batch_size, seed=args.seed, init="pretrained",
        )
        model = nets.init_model(config, nets.build_unit_vocab(train_set, config), sets[emb], spec.class_names)
        best, _ = nets.train(model, train_set, dev_set)
        model_path = out(work / "models" / f"{arch}-{emb}.model")
        nets.save_model(best, model_path)
        sources[sys_id] = out(work / "pred" / f"{arch}-{emb}.pred")
        ensemble.write_predictions(sources[sys_id], *predict_file(model_path, args.dev))
        print(f"trained {sys_id}", file=sys.stderr)

    svm_config = bow_svm.SvmConfig(C=args.C, epochs=args.svm_epochs, seed=args.seed)
    svm = bow_svm.train_svm(train_set, build_vocab((h.tokens for h in train_set), 1), svm_config, spec.num_classes, spec.class_names)
    bow_svm.save_svm(svm, out(work / "models" / "bow-svm.model"))
    sources[bow_id] = out(work / "pred" / "bow-svm.pred")
    ensemble.write_predictions(sources[bow_id], *predict_file(work / "models" / "bow-svm.model", args.dev))

    tree = ensemble.build_paper_topology(baseline_ids, bow_id)
    ensemble.save_tree(tree, out(work / "ensemble.tree"))
    sources["vote"] = out(work / "pred" / "vote.pred")
    ensemble.write_predictions(sources["vote"], *vote_files(tree, sources, spec.class_names))

    with atomic_write(out(work / "summary.tsv")) as f:
        f.write("system\tdev_accuracy\tmacro_f1\treference_accuracy\n")
        for sys_id, pred_path in sources.items():
            items = dict(evaluate_files(args.dev, pred_path, spec))
            metrics.write_report(list(items.items()), out(work / "metrics" / f"{Path(pred_path).stem}.tsv"))
            ref = REFERENCE_DEV_ACCURACY.get(sys_id)
            f.write(f"{sys_id}\t{items['accuracy']:.6f}\t{items['macro_f1']:.6f}\t{'' if ref is None else f'{ref:.3f}'}\n")


# ---------------------------------------------------------------- parser


def _add_embed_flags(p, include_variant=True):
    if include_variant:
        p.add_argument("--variant", choices=VARIANTS, default="sgns", help="embedding variant (default: %(default)s)")
        p.add_argument("--window", type=int, default=5, help="max context offset (default: %(default)s)")
        p.add_argument("--epochs", type=int, default=5, help="passes over the corpus (default: %(default)s)")
        p.add_argument("--lr", type=float, default=0.025, help="starting learning rate (default: %(default)s)")
        p.add_argument("--seed", type=int, default=1, help="random seed (default: %(default)s)")
    else:
        p.add_argument("--emb-epochs", dest="epochs", type=int, default=5, help="embedding passes (default: %(default)s)")
        p.add_argument("--emb-lr", dest="lr", type=float, default=0.025, help="embedding starting learning rate (default: %(default)s)")
    p.add_argument("--dim", type=int, default=300, help="vector size (default: %(default)s)")
    p.add_argument("--negatives", type=int, default=5, help="negative samples per pair (default: %(default)s)")
    p.add_argument("--min-count", type=int, default=5, help="drop rarer tokens (default: %(default)s)")
    p.add_argument("--clusters", type=int, default=3, help="cwe-l vectors per character (default: %(default)s)")
    p.add_argument("--min-n", type=int, default=1, help="fasttext shortest n-gram (default: %(default)s)")
    p.add_argument("--max-n", type=int, default=3, help="fasttext longest n-gram (default: %(default)s)")
    p.add_argument("--sample", type=float, default=0.0, help="frequent-word subsampling threshold, 0 = off (default: %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="training threads; >1 is not reproducible (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="textvote", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="train word embeddings")
    p.add_argument("--corpus", required=True, help="unlabeled corpus, one tokenized sentence per line")
    p.add_argument("--out", required=True, help="output vector file (a .sub sidecar is written next to it)")
    _add_embed_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="train a classifier")
    p.add_argument("--train", required=True, help="labeled training file")
    p.add_argument("--dev", required=True, help="labeled development file")
    p.add_argument("--classes", required=True, help="class names, one per line")
    p.add_argument("--arch", choices=ARCHS, default="nbow", help="classifier (default: %(default)s)")
    p.add_argument("--embeddings", help="pretrained vector file")
    p.add_argument("--init", choices=INITS, help="embedding init (default: pretrained with --embeddings, else random-word)")
    p.add_argument("--granularity", choices=["word", "char"], default="word", help="input units (default: %(default)s)")
    p.add_argument("--dim", type=int, help="embedding width (default: from --embeddings, else 300)")
    p.add_argument("--filter-width", type=int, default=3, help="CNN filter width (default: %(default)s)")
    p.add_argument("--num-filters", type=int, default=128, help="CNN filters (default: %(default)s)")
    p.add_argument("--hidden", type=int, default=128, help="LSTM hidden size (default: %(default)s)")
    p.add_argument("--max-len", type=int, default=30, help="truncation length (default: %(default)s)")
    p.add_argument("--lr", type=float, default=1e-3, help="Adam step size (default: %(default)s)")
    p.add_argument("--epochs", type=int, help="epochs (default: 10 for networks, 20 for svm)")
    p.add_argument("--batch-size", type=int, default=64, help="mini-batch size (default: %(default)s)")
    p.add_argument("--no-fine-tune", action="store_true", help="freeze the embedding layer (default: fine-tune)")
    p.add_argument("--C", type=float, default=1.0, help="svm regularization trade-off (default: %(default)s)")
    p.add_argument("--counts", action="store_true", help="svm count features instead of binary occurrence (default: binary)")
    p.add_argument("--seed", type=int, default=1, help="random seed (default: %(default)s)")
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--report", help="per-epoch report file (TSV)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels for a file")
    p.add_argument("--model", required=True, help="model file from `train`")
    p.add_argument("--input", required=True, help="one tokenized headline per line, label column optional")
    p.add_argument("--out", required=True, help="prediction file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("vote", help="combine prediction files through a vote tree")
    p.add_argument("--spec", required=True, help="ensemble spec (indented tree)")
    p.add_argument("--classes", required=True, help="class names, one per line")
    p.add_argument("--pred", nargs="+", required=True, metavar="ID=PATH", help="prediction file per system (bare PATH uses its stem as ID)")
    p.add_argument("--soft", action="store_true", help="rank labels by summed confidence (default: vote counts)")
    p.add_argument("--flat", action="store_true", help="one flat vote over all leaves (default: the tree as given)")
    p.add_argument("--out", required=True, help="voted prediction file")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("evaluate", help="accuracy and macro P/R/F1")
    p.add_argument("--gold", required=True, help="labeled file")
    p.add_argument("--pred", required=True, help="prediction file")
    p.add_argument("--classes", required=True, help="class names, one per line")
    p.add_argument("--macro-f1", choices=["mean", "harmonic"], default="mean", help="macro F1 aggregation (default: %(default)s)")
    p.add_argument("--out", help="report as key<TAB>value")
    p.add_argument("--json", help="report as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("nn", help="nearest neighbours and single-character audit")
    p.add_argument("--embeddings", required=True, help="vector file")
    p.add_argument("--token", required=True, help="query word")
    p.add_argument("--k", type=int, default=10, help="neighbours to list (default: %(default)s)")
    p.set_defaults(func=cmd_nn)

    p = sub.add_parser("paper-run", help="full 16-system pipeline on user data")
    p.add_argument("--train", required=True, help="labeled training file")
    p.add_argument("--dev", required=True, help="labeled development file")
    p.add_argument("--classes", required=True, help="class names, one per line")
    p.add_argument("--corpus", required=True, help="unlabeled embedding corpus")
    p.add_argument("--workdir", required=True, help="directory for all artifacts")
    _add_embed_flags(p, include_variant=False)
    p.add_argument("--filter-width", type=int, default=3, help="CNN filter width (default: %(default)s)")
    p.add_argument("--num-filters", type=int, default=128, help="CNN filters (default: %(default)s)")
    p.add_argument("--hidden", type=int, default=128, help="LSTM hidden size (default: %(default)s)")
    p.add_argument("--max-len", type=int, default=30, help="truncation length (default: %(default)s)")
    p.add_argument("--net-lr", type=float, default=1e-3, help="Adam step size (default: %(default)s)")
    p.add_argument("--net-epochs", type=int, default=10, help="network epochs (default: %(default)s)")
    p.add_argument("--batch-size", type=int, default=64, help="mini-batch size (default: %(default)s)")
    p.add_argument("--C", type=float, default=1.0, help="svm regularization trade-off (default: %(default)s)")
    p.add_argument("--svm-epochs", type=int, default=20, help="svm epochs (default: %(default)s)")
    p.add_argument("--seed", type=int, default=1, help="random seed (default: %(default)s)")
    p.set_defaults(func=cmd_paper_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"textvote {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
