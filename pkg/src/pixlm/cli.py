"""Command-line entry point.

Subcommands: render, pretrain, finetune, evaluate, probe, retrieve,
export-embeddings, subsample. Exit codes: 0 success, 1 usage error, 2
data/format error, 3 numeric failure. A flat key=value config file can
seed any flag; explicit flags win. PXM4_THREADS caps BLAS parallelism and
must be applied before numpy loads, so heavy imports stay inside the
command handlers.
"""

import argparse
import logging
import os
import sys

log = logging.getLogger("pixlm")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_layers(text):
    """"0..12" or "0,3,7" to a list of layer indices."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x]


def _parse_sizes(text):
    return [int(x) for x in text.split(",") if x]


def _load_config_args(path):
    """key=value lines to CLI-style tokens, prepended so real flags win."""
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key, value = key.strip(), value.strip()
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    tokens.append(f"--{key}")
            else:
                tokens.extend([f"--{key}", value])
    return tokens


def build_parser():
    root = Parser(prog="pixlm", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--dry-run", action="store_true",
                       help="validate inputs and print the plan, no side effects")

    def model_flags(p):
        p.add_argument("--hidden-dim", type=int, default=192)
        p.add_argument("--num-layers", type=int, default=6)
        p.add_argument("--num-heads", type=int, default=3)
        p.add_argument("--decoder-dim", type=int, default=96)
        p.add_argument("--decoder-layers", type=int, default=2)
        p.add_argument("--dropout", type=float, default=0.1)

    p = sub.add_parser("render", help="render a corpus to a binary patch file")
    common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-patches", type=int, default=529)
    p.add_argument("--patch-size", type=int, default=16)

    p = sub.add_parser("pretrain", help="masked-autoencoder pretraining")
    common(p)
    model_flags(p)
    p.add_argument("--corpus", required=True, help="JSONL corpus with text and lang")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--steps", type=int, default=300)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--max-patches", type=int, default=529)
    p.add_argument("--mask-ratio", type=float, default=0.25)
    p.add_argument("--max-span", type=int, default=6)
    p.add_argument("--peak-lr", type=float, default=1.5e-3)

    p = sub.add_parser("finetune", help="attach a task head and fine-tune")
    common(p)
    model_flags(p)
    p.add_argument("--task", required=True, choices=["cls", "udp", "ner"])
    p.add_argument("--data", required=True, help="directory with train/val files")
    p.add_argument("--checkpoint", help="pretrained checkpoint; omit to train from scratch")
    p.add_argument("--out", required=True)
    p.add_argument("--lr", default=None,
                   help="learning rate, or 'grid' to sweep the default grid")
    p.add_argument("--max-steps", type=int, default=15000)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-patches", type=int, default=None)
    p.add_argument("--eval-every", type=int, default=None)
    p.add_argument("--patience", type=int, default=None)

    p = sub.add_parser("evaluate", help="score a fine-tuned checkpoint on a file")
    common(p)
    p.add_argument("--task", required=True, choices=["cls", "udp", "ner"])
    p.add_argument("--data", required=True, help="evaluation split file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--lang", default="und")
    p.add_argument("--out", help="append a CSV metric row here")

    p = sub.add_parser("probe", help="layer-wise linear word probes")
    common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True,
                   help="directory with train.tsv/val.tsv/test.tsv word-label pairs")
    p.add_argument("--layers", default="0..6")
    p.add_argument("--task-name", default="probe")
    p.add_argument("--lang", default="und")
    p.add_argument("--out", required=True)

    p = sub.add_parser("retrieve", help="cross-lingual retrieval recall@k")
    common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="directory with <lang>.txt aligned files")
    p.add_argument("--pairs", required=True, help="e.g. eng-ukr,eng-hin")
    p.add_argument("--layers", default="0..6")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--max-patches", type=int, default=256)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export-embeddings", help="dump sentence embeddings to TSV")
    common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--in", dest="input", required=True, help="JSONL corpus")
    p.add_argument("--layers", default="0..6")
    p.add_argument("--max-patches", type=int, default=256)
    p.add_argument("--out", required=True)

    p = sub.add_parser("subsample", help="deterministic training subsets")
    common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv", "bio", "conllu"], default="tsv")
    p.add_argument("--sizes", default="1024,2048,4096,8192")
    p.add_argument("--num-seeds", type=int, default=8)
    p.add_argument("--out-dir", required=True)

    return root


def _read_text_or_jsonl(path):
    """Corpus records from JSONL, or one plain-text document per line."""
    from .data import CorpusRecord, read_corpus

    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if stripped.startswith("{"):
        return read_corpus(content.splitlines())
    return [CorpusRecord(text=line.strip(), lang="und")
            for line in content.splitlines() if line.strip()]


def cmd_render(args):
    from .render import RenderConfig, render_text, write_patch_file

    records = _read_text_or_jsonl(args.input)
    cfg = RenderConfig(patch_size=args.patch_size, max_patches=args.max_patches)
    if args.dry_run:
        log.info("would render %d records at %d patches to %s",
                 len(records), cfg.max_patches, args.out)
        return 0
    sequences = [render_text(rec.text, cfg) for rec in records]
    write_patch_file(args.out, sequences)
    log.info("wrote %d sequences to %s", len(sequences), args.out)
    return 0


def _model_config(args, max_patches):
    from .model import ModelConfig

    return ModelConfig(hidden_dim=args.hidden_dim, num_layers=args.num_layers,
                       num_heads=args.num_heads, decoder_dim=args.decoder_dim,
                       decoder_layers=args.decoder_layers, dropout=args.dropout,
                       max_patches=max_patches)


def cmd_pretrain(args):
    import numpy as np

    from .data import group_by_lang
    from .masking import MaskSpec
    from .model import PixelModel, save_model
    from .render import RenderConfig
    from .train import OptimConfig, pretrain

    records = _read_text_or_jsonl(args.corpus)
    corpora = group_by_lang(records)
    render_cfg = RenderConfig(max_patches=args.max_patches)
    model_cfg = _model_config(args, args.max_patches)
    if args.dry_run:
        log.info("would pretrain %s for %d steps on %d records in %d languages",
                 model_cfg, args.steps, len(records), len(corpora))
        return 0
    os.makedirs(args.out, exist_ok=True)
    model = PixelModel(model_cfg, seed=args.seed)
    optim = OptimConfig(peak_lr=args.peak_lr, total_steps=args.steps,
                        warmup_steps=min(100, max(args.steps // 10, 1)))
    result = pretrain(model, corpora,
                      mask_spec=MaskSpec(ratio=args.mask_ratio, max_span=args.max_span),
                      optim_cfg=optim, steps=args.steps, batch_size=args.batch_size,
                      render_cfg=render_cfg, seed=args.seed,
                      trace_path=os.path.join(args.out, "trace.csv"))
    save_model(os.path.join(args.out, "checkpoint.pxck"), result.model,
               extra_config={"render": {"max_patches": args.max_patches}})
    losses = result.trace.values("mae_loss")
    log.info("pretrained %d steps, loss %.4f -> %.4f, %d skipped",
             args.steps, losses[0], losses[-1], result.skipped_steps)
    return 0


def _find_split(data_dir, split, task):
    ext = {"cls": "tsv", "udp": "conllu", "ner": "bio"}[task]
    path = os.path.join(data_dir, f"{split}.{ext}")
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing {path}")
    return path


def _load_task_file(path, task):
    from .data import parse_conllu, read_bio, read_cls_tsv

    with open(path, encoding="utf-8") as fh:
        if task == "cls":
            return read_cls_tsv(fh)
        if task == "udp":
            return parse_conllu(fh)
        return list(read_bio(fh))


def _load_model(args, max_patches):
    from .model import PixelModel, load_model

    if args.checkpoint:
        model, doc, rest = load_model(args.checkpoint)
        return model, doc, rest
    model_cfg = _model_config(args, max_patches)
    return PixelModel(model_cfg, seed=args.seed), None, {}


def cmd_finetune(args):
    from .model import save_model
    from .train import FinetuneConfig, finetune, finetune_grid

    train_path = _find_split(args.data, "train", args.task)
    val_path = _find_split(args.data, "val", args.task)
    train_data = _load_task_file(train_path, args.task)
    val_data = _load_task_file(val_path, args.task)

    overrides = {"max_steps": args.max_steps, "seed": args.seed}
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if args.max_patches is not None:
        overrides["max_patches"] = args.max_patches
    if args.eval_every is not None:
        overrides["eval_every"] = args.eval_every
    if args.patience is not None:
        overrides["patience"] = args.patience
    cfg = FinetuneConfig.for_task(args.task, **overrides)

    if args.dry_run:
        log.info("would finetune %s on %d train / %d val examples with %s",
                 args.task, len(train_data), len(val_data), cfg)
        return 0
    os.makedirs(args.out, exist_ok=True)

    if args.lr == "grid":
        def factory():
            model, _, _ = _load_model(args, cfg.max_patches)
            return model
        result, best_lr = finetune_grid(factory, train_data, val_data, cfg)
        log.info("grid selected lr=%g", best_lr)
    else:
        model, _, _ = _load_model(args, cfg.max_patches)
        if args.lr is not None:
            from dataclasses import replace
            cfg = replace(cfg, lr=float(args.lr))
        result = finetune(model, train_data, val_data, cfg,
                          trace_path=os.path.join(args.out, "trace.csv"))

    save_model(os.path.join(args.out, "checkpoint.pxck"), result.model,
               extra_config={"task": args.task, "labels": result.label_set,
                             "max_patches": cfg.max_patches},
               extra_tensors=result.head.params)
    log.info("best %s=%.4f at step %d", args.task, result.best_metric, result.best_step)
    return 0


def _rebuild_head(task, doc, rest, hidden_dim):
    import numpy as np

    from . import numerics as nx
    from .heads import BiaffineParser, SequenceClassifier, TokenTagger

    labels = doc["labels"]
    if task == "cls":
        head = SequenceClassifier(hidden_dim, len(labels))
    elif task == "udp":
        proj_dim = rest["head.udp.dep.w"].shape[1]
        head = BiaffineParser(hidden_dim, labels, proj_dim=proj_dim)
    else:
        head = TokenTagger(hidden_dim, labels)
    for name in head.params:
        if name not in rest:
            raise ValueError(f"checkpoint missing head tensor {name}")
        head.params[name] = nx.Tensor(np.ascontiguousarray(rest[name]), requires_grad=True)
    return head, labels


def cmd_evaluate(args):
    from dataclasses import replace

    from .model import load_model
    from .render import RenderConfig
    from .train.tasks import get_task

    model, doc, rest = load_model(args.checkpoint)
    if doc.get("task") != args.task:
        raise ValueError(f"checkpoint was fine-tuned for {doc.get('task')!r}, "
                         f"not {args.task!r}")
    head, labels = _rebuild_head(args.task, doc, rest, model.config.hidden_dim)
    data = _load_task_file(args.data, args.task)
    task = get_task(args.task)
    render_cfg = replace(RenderConfig(), max_patches=doc.get("max_patches", 256))
    prepared = task.prepare(data, labels, render_cfg)
    if args.dry_run:
        log.info("would evaluate %d examples", len(prepared))
        return 0
    metric = task.evaluate(model, head, prepared, labels)
    print(f"{task.metric_name}\t{metric:.6f}")
    if args.out:
        new = not os.path.exists(args.out)
        with open(args.out, "a", encoding="utf-8") as fh:
            if new:
                fh.write("task,lang,seed,metric,value\n")
            fh.write(f"{args.task},{args.lang},{args.seed},{task.metric_name},{metric:.6f}\n")
    return 0


def _read_word_label_tsv(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            word, label = line.split("\t")
            pairs.append((word, label))
    return pairs


def cmd_probe(args):
    from .analysis import ProbeDataset, probe_layerwise
    from .model import load_model

    model, doc, _ = load_model(args.checkpoint)
    dataset = ProbeDataset(
        train=_read_word_label_tsv(os.path.join(args.data, "train.tsv")),
        val=_read_word_label_tsv(os.path.join(args.data, "val.tsv")),
        test=_read_word_label_tsv(os.path.join(args.data, "test.tsv")),
        task=args.task_name, lang=args.lang)
    layers = _parse_layers(args.layers)
    if args.dry_run:
        log.info("would probe layers %s on %d/%d/%d words", layers,
                 len(dataset.train), len(dataset.val), len(dataset.test))
        return 0
    from .render import RenderConfig
    render_cfg = RenderConfig(max_patches=model.config.max_patches)
    results = probe_layerwise(model, dataset, layers, render_cfg=render_cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("task,lang,layer,accuracy\n")
        for layer in layers:
            fh.write(f"{args.task_name},{args.lang},{layer},{results[layer]:.6f}\n")
    log.info("wrote probe report to %s", args.out)
    return 0


def cmd_retrieve(args):
    import numpy as np

    from .analysis import embed_sentences, retrieval_recall_at_k
    from .model import load_model
    from .render import RenderConfig

    model, doc, _ = load_model(args.checkpoint)
    layers = _parse_layers(args.layers)
    pairs = [p.split("-", 1) for p in args.pairs.split(",") if p]
    render_cfg = RenderConfig(max_patches=min(args.max_patches, model.config.max_patches))

    def load_lines(lang):
        path = os.path.join(args.data, f"{lang}.txt")
        with open(path, encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]

    if args.dry_run:
        log.info("would compute recall@%d for %d pairs over layers %s",
                 args.k, len(pairs), layers)
        return 0
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("lang_pair,layer,recall_at_k\n")
        for src, tgt in pairs:
            src_lines, tgt_lines = load_lines(src), load_lines(tgt)
            for layer in layers:
                q = np.stack([e.vector for e in
                              embed_sentences(model, src_lines, layer, render_cfg)])
                c = np.stack([e.vector for e in
                              embed_sentences(model, tgt_lines, layer, render_cfg)])
                recall = retrieval_recall_at_k(q, c, k=args.k)
                fh.write(f"{src}-{tgt},{layer},{recall:.6f}\n")
    log.info("wrote retrieval report to %s", args.out)
    return 0


def cmd_export_embeddings(args):
    from .analysis import embed_sentences, export_embeddings
    from .model import load_model
    from .render import RenderConfig

    model, _, _ = load_model(args.checkpoint)
    records = _read_text_or_jsonl(args.input)
    layers = _parse_layers(args.layers)
    if args.dry_run:
        log.info("would export %d sentences x %d layers", len(records), len(layers))
        return 0
    render_cfg = RenderConfig(max_patches=min(args.max_patches, model.config.max_patches))
    texts = [r.text for r in records]
    langs = [r.lang for r in records]
    embeddings = []
    for layer in layers:
        embeddings.extend(embed_sentences(model, texts, layer, render_cfg, langs=langs))
    export_embeddings(embeddings, args.out)
    log.info("wrote %d embedding rows to %s", len(embeddings), args.out)
    return 0


def cmd_subsample(args):
    from .data import (parse_conllu, read_bio, read_cls_tsv, read_corpus,
                       serialize_conllu, subsample, write_corpus)

    sizes = _parse_sizes(args.sizes)
    with open(args.input, encoding="utf-8") as fh:
        if args.format == "jsonl":
            examples = read_corpus(fh)
        elif args.format == "conllu":
            examples = parse_conllu(fh)
        elif args.format == "bio":
            examples = list(read_bio(fh))
        else:
            examples = [line.rstrip("\n") for line in fh if line.strip()]
    if args.dry_run:
        log.info("would draw %s x %d seeds from %d examples",
                 sizes, args.num_seeds, len(examples))
        return 0
    os.makedirs(args.out_dir, exist_ok=True)
    ext = {"jsonl": "jsonl", "tsv": "tsv", "bio": "bio", "conllu": "conllu"}[args.format]
    for size in sizes:
        for offset in range(args.num_seeds):
            seed = args.seed + offset
            subset = subsample(examples, size, seed)
            path = os.path.join(args.out_dir, f"subset_{size}_{seed}.{ext}")
            with open(path, "w", encoding="utf-8") as fh:
                if args.format == "jsonl":
                    write_corpus(fh, subset)
                elif args.format == "conllu":
                    fh.write(serialize_conllu(subset))
                elif args.format == "bio":
                    for ex in subset:
                        for w, t in zip(ex.words, ex.tags):
                            fh.write(f"{w}\t{t}\n")
                        fh.write("\n")
                else:
                    fh.write("\n".join(subset) + "\n")
    log.info("wrote %d subset files to %s", len(sizes) * args.num_seeds, args.out_dir)
    return 0


_COMMANDS = {
    "render": cmd_render,
    "pretrain": cmd_pretrain,
    "finetune": cmd_finetune,
    "evaluate": cmd_evaluate,
    "probe": cmd_probe,
    "retrieve": cmd_retrieve,
    "export-embeddings": cmd_export_embeddings,
    "subsample": cmd_subsample,
}


def run(argv):
    """Dispatch argv; returns the process exit code."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = os.environ.get("PXM4_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)

    parser = build_parser()
    try:
        if argv and "--config" in argv:
            i = argv.index("--config")
            config_tokens = _load_config_args(argv[i + 1])
            argv = [argv[0]] + config_tokens + argv[1:]
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, IndexError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1

    log.info("resolved config: %s", {k: v for k, v in sorted(vars(args).items())
                                     if k != "command"})
    from .errors import (ExhaustedCorpusError, FormatError, NonFiniteGradError,
                         PixlmError, ShapeError, SizeError)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, SizeError, ExhaustedCorpusError, FileNotFoundError,
            OSError, KeyError) as exc:
        log.error("data error: %s", exc)
        return 2
    except (OverflowError, NonFiniteGradError, ZeroDivisionError,
            ArithmeticError, ShapeError) as exc:
        log.error("numeric failure: %s", exc)
        return 3
    except PixlmError as exc:
        log.error("error: %s", exc)
        return 2
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
