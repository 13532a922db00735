"""Command-line driver for the slang lexicon analyses.

Subcommands mirror the library modules one to one; ``pipeline`` chains
them end to end, optionally on the bundled fixture corpus. Reports are
CSV with provenance headers; every subcommand takes ``--seed`` where
randomness is involved and is run-to-run deterministic.

Config files use flat ``section.key = value`` lines (dots select the
subcommand, e.g. ``embed.dimension = 50``); explicit flags win over the
config file, which wins over built-in defaults.
"""
from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

import click

from . import __version__
from .corpus import (
    filter_by_votes,
    load_gold_classes,
    load_slang_lexicon,
    load_standard_lexicon,
    save_slang_lexicon,
    split_gold,
    stratified_split,
)
from .embeddings import (
    TrainingConfig,
    build_usage_corpus,
    load_embeddings,
    save_embeddings,
    train_skipgram,
)
from .errors import SlanglexError
from .labels import REJECTED, SlangClass
from .morphology import (
    AffixSide,
    affix_distribution,
    normalize_word,
    save_segmenter,
    segment,
    train_segmenter,
)
from .phonology import (
    ConversionSource,
    Manner,
    WordPosition,
    load_bundled_fallback_rules,
    load_bundled_pronouncing_table,
    manner_of,
    odds_ratio_ranking,
    phoneme_distribution,
    positional_manner_distribution,
    to_phonemes,
)
from .reports import fnum, provenance_lines, summary_line, write_csv
from .slangclass import (
    NgramKind,
    ScoreType,
    argmax_label,
    blend_suffix_stats,
    classify_clipping,
    classify_reduplicative,
    confidence_score,
    cross_class_validate,
    extract_char_ngrams,
    extract_morpheme_ngrams,
    fit_vocabulary,
    load_classifier,
    predict_proba,
    predict_with_reject,
    random_baseline,
    save_classifier,
    substitution_stats,
    train_logreg,
)
from .social import (
    GenderLexicon,
    KnnMetric,
    direct_bias,
    evaluate_subject_model,
    gender_direction,
    knn_from_embedding,
    load_bias_lexicons,
    name_prejudice_comparison,
    occupation_projections,
    religious_prejudice_matrix,
    sexprej,
    subject_token,
)
from .stats import weighted_f1

SCORE_CHOICES = click.Choice([s.value for s in ScoreType])
METRIC_CHOICES = click.Choice([m.value for m in KnnMetric])


def _read_config(path: str) -> dict:
    """Flat `a.b.c = value` lines -> nested default map for click."""
    tree: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        parts = [p.strip().replace("-", "_") for p in key.strip().split(".")]
        if not all(parts):
            raise click.UsageError(f"{path}:{lineno}: empty key component")
        node = tree
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value.strip()
    return tree


def _apply_config(ctx, param, value):
    if value:
        ctx.default_map = _read_config(value)
    return value


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


def _check_delta(score: ScoreType, delta: float) -> None:
    if score is ScoreType.MAX_PROB and not 0.0 <= delta <= 1.0:
        raise click.UsageError("MaxProb delta must be within [0, 1]")
    if score is ScoreType.NEG_ENTROPY and delta > 0.0:
        raise click.UsageError(
            "NegEntropy delta must be <= 0 (scores are negated entropy in nats)")


def _letters(word: str) -> str:
    return re.sub(r"[^a-z]", "", normalize_word(word))


def _echo_summary(command: str, **fields) -> None:
    click.echo(summary_line(command, **fields))


@click.group()
@click.version_option(__version__, prog_name="slanglex")
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              callback=_apply_config, is_eager=True, expose_value=False,
              help="Flat key=value config file; flags override it.")
def main():
    """Analyze slang lexicons: sounds, morphs, classes, vectors, bias."""


# --------------------------------------------------------------------------
# ingest

@main.command()
@click.option("--slang", "slang_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--min-votes", default=100, show_default=True,
              help="Keep entries with at least this many total votes.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def ingest(slang_path, min_votes, out_path):
    """Filter a slang lexicon by community vote count."""
    try:
        entries = load_slang_lexicon(slang_path)
        kept = filter_by_votes(entries, min_votes)
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        save_slang_lexicon(kept, out_path)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("ingest", read=len(entries), kept=len(kept),
                  dropped=len(entries) - len(kept), min_votes=min_votes)


# --------------------------------------------------------------------------
# phonology

def run_phonology(slang_path, standard_path, out_dir, smoothing) -> dict:
    entries = load_slang_lexicon(slang_path)
    standard = load_standard_lexicon(standard_path)
    table = load_bundled_pronouncing_table()
    rules = load_bundled_fallback_rules()

    slang_seqs = [to_phonemes(e.headword, table, rules) for e in entries]
    std_seqs = [to_phonemes(w, table, rules) for w in sorted(standard.words)]
    fallback = sum(1 for s in slang_seqs
                   if s.source is ConversionSource.RULE_FALLBACK)

    p_slang = phoneme_distribution(slang_seqs)
    p_std = phoneme_distribution(std_seqs)
    ranking = odds_ratio_ranking(p_slang, p_std, smoothing=smoothing)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(None, [("slang", slang_path),
                                     ("standard", standard_path)])
    write_csv(out / "phoneme_odds.csv",
              ["rank", "phoneme", "manner", "odds_ratio", "p_slang", "p_standard"],
              [{"rank": e.rank, "phoneme": e.symbol,
                "manner": manner_of(e.symbol).value, "odds_ratio": fnum(e.ratio),
                "p_slang": fnum(p_slang.get(e.symbol, 0.0)),
                "p_standard": fnum(p_std.get(e.symbol, 0.0))}
               for e in ranking.entries],
              header)

    rows = []
    for corpus_name, seqs in (("slang", slang_seqs), ("standard", std_seqs)):
        for position in (WordPosition.FIRST, WordPosition.FINAL):
            dist = positional_manner_distribution(seqs, position)
            for manner in sorted(Manner, key=lambda m: m.value):
                rows.append({"corpus": corpus_name, "position": position.value,
                             "manner": manner.value,
                             "share": fnum(dist.probabilities.get(manner, 0.0))})
    write_csv(out / "manner_positions.csv",
              ["corpus", "position", "manner", "share"], rows, header)

    top = ranking.entries[0]
    return {"slang_words": len(slang_seqs), "standard_words": len(std_seqs),
            "fallback_conversions": fallback,
            "top_phoneme": top.symbol, "top_odds": top.ratio}


@main.command()
@click.option("--slang", "slang_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--standard", "standard_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--smoothing", default=1e-6, show_default=True,
              help="Additive smoothing for the odds ratios.")
def phonology(slang_path, standard_path, out_dir, smoothing):
    """Phoneme distributions and slang-vs-standard odds ratios."""
    try:
        info = run_phonology(slang_path, standard_path, out_dir, smoothing)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("phonology", **info)


# --------------------------------------------------------------------------
# morphology

def run_morphology(slang_path, standard_path, out_dir, max_iters, affix_k,
                   seed) -> dict:
    entries = load_slang_lexicon(slang_path)
    standard = load_standard_lexicon(standard_path)
    slang_words = sorted({w for w in (_letters(e.headword) for e in entries) if w})
    std_words = sorted({w for w in (_letters(w) for w in standard.words) if w})

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(seed, [("slang", slang_path),
                                     ("standard", standard_path)])

    info: dict = {}
    affix_rows = []
    for corpus_name, words in (("slang", slang_words), ("standard", std_words)):
        model = train_segmenter(words, max_iters=max_iters, seed=seed)
        save_segmenter(model, out / f"segmenter_{corpus_name}.tsv")
        segs = [segment(model, w) for w in words]
        with open(out / f"segmentations_{corpus_name}.tsv", "w",
                  encoding="utf-8") as handle:
            for line in header:
                handle.write(line + "\n")
            for seg in segs:
                handle.write(f"{seg.word}\t{'+'.join(seg.morphs)}\n")
        for side in (AffixSide.PREFIX, AffixSide.SUFFIX):
            dist = affix_distribution(segs, side, k=affix_k)
            running = 0.0
            for rank, (affix, share) in enumerate(dist.entries, 1):
                running += share
                affix_rows.append({"corpus": corpus_name, "side": side.value,
                                   "rank": rank, "affix": affix,
                                   "share": fnum(share),
                                   "cumulative": fnum(running)})
        info[f"{corpus_name}_types"] = len(words)
        info[f"{corpus_name}_morphs"] = len(model.morph_counts)
        info[f"{corpus_name}_bits"] = model.total_code_length
    write_csv(out / "affix_shares.csv",
              ["corpus", "side", "rank", "affix", "share", "cumulative"],
              affix_rows, header)
    return info


@main.command()
@click.option("--slang", "slang_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--standard", "standard_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--max-iters", default=10, show_default=True)
@click.option("--affix-k", default=25, show_default=True,
              help="Rank cutoff for the affix share report.")
@click.option("--seed", default=0, show_default=True)
def morphology(slang_path, standard_path, out_dir, max_iters, affix_k, seed):
    """Train code-length segmenters and compare affix inventories."""
    try:
        info = run_morphology(slang_path, standard_path, out_dir, max_iters,
                              affix_k, seed)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("morphology", **info)


# --------------------------------------------------------------------------
# classes

@main.group()
def classes():
    """Train, apply, and probe the slang-class detector."""


def _feature_maps(words, kind: NgramKind, n_min: int, n_max: int, segmenter):
    if kind is NgramKind.CHAR:
        return [extract_char_ngrams(w, n_min, n_max) for w in words]
    if segmenter is None:
        raise SlanglexError("morpheme features require a trained segmenter")
    return [extract_morpheme_ngrams(segment(segmenter, w), n_min, n_max)
            for w in words]


def run_classes_train(gold_path, out_path, kind, n_min, n_max, cap, l2, lr,
                      max_epochs, tol, test_fraction, seed, segmenter) -> dict:
    records = load_gold_classes(gold_path)
    split = split_gold(records, test_fraction=test_fraction, seed=seed)
    train_maps = _feature_maps([r.word for r in split.train], kind, n_min,
                               n_max, segmenter)
    vocab = fit_vocabulary(train_maps, kind, cap=cap, n_min=n_min, n_max=n_max)
    model = train_logreg(train_maps, [r.label for r in split.train], vocab,
                         l2=l2, lr=lr, max_epochs=max_epochs, tol=tol,
                         seed=seed)
    if out_path is not None:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        save_classifier(model, out_path)
    preds = [argmax_label(predict_proba(model, r.word, segmenter))
             for r in split.test]
    f1 = weighted_f1([r.label for r in split.test], preds)
    return {"model": model, "split": split,
            "info": {"features": kind.value, "train": len(split.train),
                     "test": len(split.test), "vocab": len(vocab.features),
                     "test_f1": f1}}


@classes.command("train")
@click.option("--gold", "gold_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--features", "kind", default="char", show_default=True,
              type=click.Choice([k.value for k in NgramKind]))
@click.option("--segmenter", "segmenter_path",
              type=click.Path(exists=True, dir_okay=False),
              help="Saved segmenter TSV; required for morph features.")
@click.option("--n-min", default=1, show_default=True)
@click.option("--n-max", default=5, show_default=True)
@click.option("--cap", default=200, show_default=True,
              help="Feature vocabulary size.")
@click.option("--l2", default=1.0, show_default=True)
@click.option("--lr", default=1.0, show_default=True)
@click.option("--max-epochs", default=500, show_default=True)
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--test-fraction", default=0.10, show_default=True)
@click.option("--seed", default=0, show_default=True)
def classes_train(gold_path, out_path, kind, segmenter_path, n_min, n_max,
                  cap, l2, lr, max_epochs, tol, test_fraction, seed):
    """Fit the four-class detector on labeled words."""
    try:
        segmenter = None
        if segmenter_path is not None:
            from .morphology import load_segmenter
            segmenter = load_segmenter(segmenter_path)
        result = run_classes_train(gold_path, out_path, NgramKind(kind),
                                   n_min, n_max, cap, l2, lr, max_epochs, tol,
                                   test_fraction, seed, segmenter)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("classes.train", **result["info"])


@classes.command("predict")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--words", "words_csv", help="Comma-separated words to label.")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              help="File with one word per line.")
@click.option("--delta", required=True, type=float,
              help="Rejection threshold (inclusive).")
@click.option("--score", "score_name", default="maxprob", show_default=True,
              type=SCORE_CHOICES)
@click.option("--segmenter", "segmenter_path",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="CSV destination; prints rows when omitted.")
def classes_predict(model_path, words_csv, in_path, delta, score_name,
                    segmenter_path, out_path):
    """Label words, rejecting low-confidence predictions."""
    score = ScoreType(score_name)
    _check_delta(score, delta)
    if (words_csv is None) == (in_path is None):
        raise click.UsageError("provide exactly one of --words or --in")
    try:
        model = load_classifier(model_path)
        segmenter = None
        if segmenter_path is not None:
            from .morphology import load_segmenter
            segmenter = load_segmenter(segmenter_path)
        if words_csv is not None:
            words = [w.strip() for w in words_csv.split(",") if w.strip()]
        else:
            words = [line.strip()
                     for line in Path(in_path).read_text(encoding="utf-8").splitlines()
                     if line.strip()]
        if not words:
            raise SlanglexError("no words to label")
        prob_model = lambda w: predict_proba(model, w, segmenter)  # noqa: E731
        labels = predict_with_reject(list(model.classes), prob_model, words,
                                     delta, score)
        rows = []
        for word, label in zip(words, labels):
            dist = prob_model(word)
            row = {"word": word, "prediction": str(label),
                   "score": fnum(confidence_score(dist, score))}
            for cls in model.classes:
                row[f"p_{cls}"] = fnum(dist[cls])
            rows.append(row)
        fieldnames = ["word", "prediction", "score"] + [
            f"p_{c}" for c in model.classes]
        if out_path is not None:
            header = provenance_lines(None, [("model", model_path)])
            Path(out_path).parent.mkdir(parents=True, exist_ok=True)
            write_csv(out_path, fieldnames, rows, header)
        else:
            click.echo(",".join(fieldnames))
            for row in rows:
                click.echo(",".join(str(row[f]) for f in fieldnames))
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    rejected = sum(1 for lab in labels if lab is REJECTED)
    _echo_summary("classes.predict", words=len(words), rejected=rejected,
                  delta=delta, score=score.value)


def _char_model_factory(n_min, n_max, cap, l2, lr, max_epochs, tol):
    """Training procedure handed to the cross-class evaluation."""
    def factory(train_records, known_classes, seed):
        maps = [extract_char_ngrams(r.word, n_min, n_max)
                for r in train_records]
        vocab = fit_vocabulary(maps, NgramKind.CHAR, cap=cap, n_min=n_min,
                               n_max=n_max)
        model = train_logreg(maps, [r.label for r in train_records], vocab,
                             l2=l2, lr=lr, max_epochs=max_epochs, tol=tol,
                             seed=seed)
        return lambda word: predict_proba(model, word)
    return factory


def run_classes_eval(gold_path, delta, score, seed, test_fraction, n_min,
                     n_max, cap, l2, lr, max_epochs, tol, out_path) -> dict:
    records = load_gold_classes(gold_path)
    report = cross_class_validate(
        records, _char_model_factory(n_min, n_max, cap, l2, lr, max_epochs,
                                     tol),
        delta, score, seed, test_fraction=test_fraction)
    if out_path is not None:
        header = provenance_lines(seed, [("gold", gold_path)])
        rows = [{"held_class": str(cls), "weighted_f1": fnum(f1)}
                for cls, f1 in sorted(report.fold_f1.items(), key=lambda i: str(i[0]))]
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        write_csv(out_path, ["held_class", "weighted_f1"], rows, header)
    info = {f"fold_{cls}": f1
            for cls, f1 in sorted(report.fold_f1.items(), key=lambda i: str(i[0]))}
    info["mean_f1"] = report.mean_f1
    info["delta"] = delta
    info["score"] = score.value
    return info


@classes.command("eval")
@click.option("--gold", "gold_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", required=True, type=float)
@click.option("--score", "score_name", default="maxprob", show_default=True,
              type=SCORE_CHOICES)
@click.option("--seed", default=0, show_default=True)
@click.option("--test-fraction", default=0.10, show_default=True)
@click.option("--n-min", default=1, show_default=True)
@click.option("--n-max", default=5, show_default=True)
@click.option("--cap", default=200, show_default=True)
@click.option("--l2", default=1.0, show_default=True)
@click.option("--lr", default=1.0, show_default=True)
@click.option("--max-epochs", default=500, show_default=True)
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def classes_eval(gold_path, delta, score_name, seed, test_fraction, n_min,
                 n_max, cap, l2, lr, max_epochs, tol, out_path):
    """Cross-class validation: hold out each class as unknown."""
    score = ScoreType(score_name)
    _check_delta(score, delta)
    try:
        info = run_classes_eval(gold_path, delta, score, seed, test_fraction,
                                n_min, n_max, cap, l2, lr, max_epochs, tol,
                                out_path)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("classes.eval", **info)


def run_classes_patterns(gold_path, out_dir, suffix_k, seed) -> dict:
    records = load_gold_classes(gold_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(seed, [("gold", gold_path)])

    clip_rows = []
    unsourced = 0
    for r in records:
        if r.label is not SlangClass.CLIPPING:
            continue
        if not r.components:
            unsourced += 1
            continue
        source = " ".join(r.components)
        clip_rows.append({"word": r.word, "source": source,
                          "type": classify_clipping(r.word, source).value})
    write_csv(out / "clipping_types.csv", ["word", "source", "type"],
              clip_rows, header)

    redup_rows = []
    pairs = []
    for r in records:
        if r.label is not SlangClass.REDUPLICATIVE:
            continue
        redup_rows.append({"word": r.word,
                           "type": classify_reduplicative(r.word).value})
        first, second = re.split(r"[-\s]+", r.word.strip())
        if len(first) == len(second):
            pairs.append((first, second))
    write_csv(out / "reduplicative_types.csv", ["word", "type"], redup_rows,
              header)

    subs = None
    if pairs:
        subs = substitution_stats(pairs)
        sub_rows = [{"original": a, "replacement": b, "share": fnum(share)}
                    for a in subs.replacements
                    for b, share in subs.replacements[a].items()]
        write_csv(out / "substitutions.csv",
                  ["original", "replacement", "share"], sub_rows, header)

    blends = [r for r in records if r.label is SlangClass.BLEND]
    dist, skipped_blends = blend_suffix_stats(blends, k=suffix_k)
    running = 0.0
    blend_rows = []
    for rank, (suffix, share) in enumerate(dist.entries, 1):
        running += share
        blend_rows.append({"rank": rank, "suffix": suffix,
                           "share": fnum(share), "cumulative": fnum(running)})
    write_csv(out / "blend_suffixes.csv",
              ["rank", "suffix", "share", "cumulative"], blend_rows, header)

    return {"clippings": len(clip_rows), "clippings_unsourced": unsourced,
            "reduplicatives": len(redup_rows),
            "substitution_pairs_skipped": subs.skipped if subs else 0,
            "blends": len(blends), "blends_skipped": skipped_blends}


@classes.command("patterns")
@click.option("--gold", "gold_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--suffix-k", default=5, show_default=True,
              help="Rank cutoff for the blend suffix report.")
def classes_patterns(gold_path, out_dir, suffix_k):
    """Rule-based formation analyses over labeled words."""
    try:
        info = run_classes_patterns(gold_path, out_dir, suffix_k, seed=None)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("classes.patterns", **info)


# --------------------------------------------------------------------------
# embed

def run_embed(slang_path, out_path, config: TrainingConfig, min_votes) -> dict:
    entries = load_slang_lexicon(slang_path)
    if min_votes > 0:
        entries = filter_by_votes(entries, min_votes)
    corpus = build_usage_corpus(entries)
    table = train_skipgram(corpus, config)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    save_embeddings(table, out_path)
    return {"entries": len(entries), "sentences": len(corpus),
            "tokens": sum(len(s) for s in corpus), "vocab": len(table),
            "dimension": table.dimension,
            "first_epoch_loss": table.epoch_losses[0],
            "last_epoch_loss": table.epoch_losses[-1]}


@main.command()
@click.option("--slang", "slang_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--dimension", default=100, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--min-count", default=5, show_default=True)
@click.option("--subsample", default=1e-3, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--lr", default=0.025, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--min-votes", default=0, show_default=True,
              help="Vote filter applied before corpus extraction.")
@click.option("--workers", default=1, show_default=True,
              help="Reserved for parallel training; current trainer is "
                   "single-threaded.")
def embed(slang_path, out_path, dimension, window, negatives, min_count,
          subsample, epochs, lr, seed, min_votes, workers):
    """Train skip-gram vectors on usage examples."""
    if workers < 1:
        raise click.UsageError("--workers must be at least 1")
    try:
        config = TrainingConfig(dimension=dimension, window=window,
                                negatives=negatives, epochs=epochs,
                                initial_lr=lr, min_count=min_count,
                                subsample_threshold=subsample, seed=seed)
        info = run_embed(slang_path, out_path, config, min_votes)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("embed", **info)


# --------------------------------------------------------------------------
# subjects

def run_subjects(slang_path, vectors_path, out_dir, k, metric, test_fraction,
                 seed) -> dict:
    entries = load_slang_lexicon(slang_path)
    labeled = []
    ambiguous = 0
    for e in entries:
        if e.subjects is None or len(e.subjects) == 0:
            continue
        if len(e.subjects) != 1:
            ambiguous += 1
            continue
        labeled.append((e.headword, next(iter(e.subjects))))
    if not labeled:
        raise SlanglexError("no entry carries exactly one subject tag")
    train, test = stratified_split(labeled, lambda item: item[1],
                                   test_fraction, seed)
    embedding = load_embeddings(vectors_path)
    model, skipped_train = knn_from_embedding(embedding, train, k=k,
                                              metric=metric)
    evaluation = evaluate_subject_model(model, test, embedding)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(seed, [("slang", slang_path),
                                     ("vectors", vectors_path)])
    confusion = evaluation.confusion
    write_csv(out / "subject_confusion.csv", ["true", "predicted", "count"],
              [{"true": str(t), "predicted": str(p),
                "count": confusion[t, p]}
               for t in confusion.labels for p in confusion.labels],
              header)
    write_csv(out / "subject_metrics.csv",
              ["label", "precision", "recall", "f1", "support"],
              [{"label": str(m.label), "precision": fnum(m.precision),
                "recall": fnum(m.recall), "f1": fnum(m.f1),
                "support": m.support}
               for m in sorted(evaluation.per_class,
                               key=lambda m: str(m.label))],
              header)
    return {"labeled": len(labeled), "ambiguous_skipped": ambiguous,
            "train": len(train), "test": len(test),
            "train_oov_skipped": skipped_train,
            "test_oov_excluded": evaluation.excluded,
            "weighted_f1": evaluation.f1}


@main.command()
@click.option("--slang", "slang_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--vectors", "vectors_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--k", default=5, show_default=True)
@click.option("--metric", "metric_name", default="cosine", show_default=True,
              type=METRIC_CHOICES)
@click.option("--test-fraction", default=0.10, show_default=True)
@click.option("--seed", default=0, show_default=True)
def subjects(slang_path, vectors_path, out_dir, k, metric_name, test_fraction,
             seed):
    """Nearest-neighbor subject classification over trained vectors."""
    try:
        info = run_subjects(slang_path, vectors_path, out_dir, k,
                            KnnMetric(metric_name), test_fraction, seed)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("subjects", **info)


# --------------------------------------------------------------------------
# bias

@main.group()
def bias():
    """Quantify stereotype signal in the trained vectors."""


def run_bias_gender(vectors_path, lexicons_dir, out_dir, strictness) -> dict:
    embedding = load_embeddings(vectors_path)
    lexicons = load_bias_lexicons(lexicons_dir)
    present = [(m, f) for m, f in lexicons.gender_pairs
               if m in embedding and f in embedding]
    if not present:
        raise SlanglexError("no gender pair is fully inside the vocabulary")
    g = gender_direction(embedding, present)
    bias_value = direct_bias(embedding, lexicons.occupations, g, c=strictness)
    projections = occupation_projections(embedding, lexicons.occupations, g)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(None, [("vectors", vectors_path)])
    write_csv(out / "occupation_projections.csv",
              ["rank", "occupation", "cosine_to_female"],
              [{"rank": rank, "occupation": word,
                "cosine_to_female": fnum(value)}
               for rank, (word, value) in enumerate(projections, 1)],
              header)
    return {"direct_bias": bias_value, "strictness": strictness,
            "pairs_used": len(present),
            "pairs_missing": len(lexicons.gender_pairs) - len(present),
            "occupations_scored": len(projections),
            "occupations_missing": len(lexicons.occupations) - len(projections)}


@bias.command("gender")
@click.option("--vectors", "vectors_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicons", "lexicons_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--strictness", default=1.0, show_default=True,
              help="Exponent on |cosine| in the bias average.")
def bias_gender(vectors_path, lexicons_dir, out_dir, strictness):
    """Gender direction, direct bias, and occupation projections."""
    try:
        info = run_bias_gender(vectors_path, lexicons_dir, out_dir, strictness)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("bias.gender", **info)


def run_bias_sexprej(vectors_path, lexicons_dir, names_path, out_dir, n_perms,
                     seed) -> dict:
    embedding = load_embeddings(vectors_path)
    lexicons = load_bias_lexicons(lexicons_dir)
    genders = GenderLexicon.from_csv(names_path)
    names = []
    for line in Path(names_path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line.split(",")[0].strip())
    report = name_prejudice_comparison(embedding, names, genders,
                                       lexicons.prejudice_terms,
                                       n_permutations=n_perms, seed=seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(seed, [("vectors", vectors_path),
                                     ("names", names_path)])
    rows = []
    for name in names:
        gender = genders.lookup(name)
        token = subject_token(name)
        if gender.value == "unknown" or token not in embedding:
            continue
        rows.append({"name": name, "gender": gender.value,
                     "sexprej": fnum(sexprej(embedding, name,
                                             lexicons.prejudice_terms))})
    write_csv(out / "name_sexprej.csv", ["name", "gender", "sexprej"], rows,
              header)
    terms_present = sum(1 for t in lexicons.prejudice_terms if t in embedding)
    return {"female_mean": report.female_mean, "female_n": report.female_n,
            "male_mean": report.male_mean, "male_n": report.male_n,
            "difference": report.difference, "p_value": report.p_value,
            "exhaustive": report.exhaustive,
            "excluded_unknown": report.excluded_unknown,
            "excluded_oov": report.excluded_oov,
            "terms_present": terms_present,
            "terms_missing": len(lexicons.prejudice_terms) - terms_present}


@bias.command("sexprej")
@click.option("--vectors", "vectors_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicons", "lexicons_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--names", "names_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--n-perms", default=10_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def bias_sexprej(vectors_path, lexicons_dir, names_path, out_dir, n_perms,
                 seed):
    """Sexual-prejudice proximity of personal names, by gender."""
    try:
        info = run_bias_sexprej(vectors_path, lexicons_dir, names_path,
                                out_dir, n_perms, seed)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("bias.sexprej", **info)


def run_bias_religion(vectors_path, lexicons_dir, out_dir) -> dict:
    embedding = load_embeddings(vectors_path)
    lexicons = load_bias_lexicons(lexicons_dir)
    report = religious_prejudice_matrix(embedding, lexicons.religious_terms,
                                        lexicons.trait_terms)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance_lines(None, [("vectors", vectors_path)])
    for name, matrix in (("raw", report.raw),
                         ("standardized", report.standardized)):
        rows = []
        for i, religion in enumerate(report.religions):
            row = {"religion": religion}
            for j, trait in enumerate(report.prejudices):
                row[trait] = fnum(float(matrix[i, j]))
            rows.append(row)
        write_csv(out / f"religious_bias_{name}.csv",
                  ["religion"] + list(report.prejudices), rows, header)
    return {"religions": len(report.religions),
            "traits": len(report.prejudices),
            "overall_mean_raw": report.overall_mean_raw,
            "missing_religions": len(report.missing_religions),
            "missing_traits": len(report.missing_prejudices)}


@bias.command("religion")
@click.option("--vectors", "vectors_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicons", "lexicons_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def bias_religion(vectors_path, lexicons_dir, out_dir):
    """Religion-to-trait cosine matrix, column standardized."""
    try:
        info = run_bias_religion(vectors_path, lexicons_dir, out_dir)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("bias.religion", **info)


# --------------------------------------------------------------------------
# pipeline

def _fixture_path(*parts) -> str:
    return str(resources.files("slanglex").joinpath("data", "fixtures", *parts))


def run_pipeline(slang_path, standard_path, gold_path, lexicons_dir,
                 names_path, out_dir, seed, min_votes, dimension, window,
                 negatives, min_count, subsample, epochs, lr, delta, score,
                 k, echo=click.echo) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries = load_slang_lexicon(slang_path)
    kept = filter_by_votes(entries, min_votes)
    filtered_path = out / "filtered.jsonl"
    save_slang_lexicon(kept, filtered_path)
    echo(summary_line("pipeline.ingest", read=len(entries), kept=len(kept),
                      min_votes=min_votes))

    info = run_phonology(filtered_path, standard_path, out, smoothing=1e-6)
    echo(summary_line("pipeline.phonology", **info))

    info = run_morphology(filtered_path, standard_path, out, max_iters=10,
                          affix_k=25, seed=seed)
    echo(summary_line("pipeline.morphology", **info))

    # detector comparison: char vs morph features vs label-draw baseline
    from .morphology import load_segmenter
    segmenter = load_segmenter(out / "segmenter_slang.tsv")
    records = load_gold_classes(gold_path)
    split = split_gold(records, test_fraction=0.10, seed=seed)
    test_words = [r.word for r in split.test]
    test_labels = [r.label for r in split.test]
    model_rows = []
    predictions = {}
    for kind, seg in ((NgramKind.CHAR, None), (NgramKind.MORPHEME, segmenter)):
        maps = _feature_maps([r.word for r in split.train], kind, 1, 5, seg)
        vocab = fit_vocabulary(maps, kind, cap=200, n_min=1, n_max=5)
        model = train_logreg(maps, [r.label for r in split.train], vocab,
                             seed=seed)
        preds = [argmax_label(predict_proba(model, w, seg)) for w in test_words]
        predictions[kind.value] = preds
        model_rows.append({"model": kind.value,
                           "weighted_f1": fnum(weighted_f1(test_labels, preds))})
    sampler = random_baseline([r.label for r in split.train], seed)
    baseline_preds = sampler.draw(len(test_words))
    model_rows.append({"model": "baseline",
                       "weighted_f1": fnum(weighted_f1(test_labels,
                                                       baseline_preds))})
    header = provenance_lines(seed, [("gold", gold_path)])
    write_csv(out / "class_model_comparison.csv", ["model", "weighted_f1"],
              model_rows, header)
    write_csv(out / "class_predictions.csv",
              ["word", "true", "char_prediction", "morph_prediction"],
              [{"word": w, "true": str(t),
                "char_prediction": str(predictions["char"][i]),
                "morph_prediction": str(predictions["morph"][i])}
               for i, (w, t) in enumerate(zip(test_words, test_labels))],
              header)
    echo(summary_line("pipeline.classes",
                      **{row["model"] + "_f1": row["weighted_f1"]
                         for row in model_rows}))

    info = run_classes_eval(gold_path, delta, score, seed, 0.10, 1, 5, 200,
                            1.0, 1.0, 500, 1e-6, out / "crossclass_f1.csv")
    echo(summary_line("pipeline.crossclass", mean_f1=info["mean_f1"]))

    info = run_classes_patterns(gold_path, out, suffix_k=5, seed=seed)
    echo(summary_line("pipeline.patterns", **info))

    config = TrainingConfig(dimension=dimension, window=window,
                            negatives=negatives, epochs=epochs,
                            initial_lr=lr, min_count=min_count,
                            subsample_threshold=subsample, seed=seed)
    vectors_path = out / "vectors.txt"
    info = run_embed(filtered_path, vectors_path, config, min_votes=0)
    echo(summary_line("pipeline.embed", **info))

    info = run_subjects(filtered_path, vectors_path, out, k,
                        KnnMetric.COSINE, 0.10, seed)
    echo(summary_line("pipeline.subjects", **info))

    info = run_bias_gender(vectors_path, lexicons_dir, out, strictness=1.0)
    echo(summary_line("pipeline.bias.gender", **info))

    info = run_bias_sexprej(vectors_path, lexicons_dir, names_path, out,
                            n_perms=10_000, seed=seed)
    echo(summary_line("pipeline.bias.sexprej", **info))

    info = run_bias_religion(vectors_path, lexicons_dir, out)
    echo(summary_line("pipeline.bias.religion", **info))


@main.command()
@click.option("--fixtures", is_flag=True,
              help="Run on the bundled miniature corpus.")
@click.option("--slang", "slang_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--standard", "standard_path",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--gold", "gold_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicons", "lexicons_dir",
              type=click.Path(exists=True, file_okay=False))
@click.option("--names", "names_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", default="slanglex-run", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--min-votes", default=100, show_default=True)
@click.option("--dimension", default=100, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--min-count", default=2, show_default=True,
              help="Fixture-scale default; raise for larger corpora.")
@click.option("--subsample", default=1e-3, show_default=True)
@click.option("--epochs", default=8, show_default=True)
@click.option("--lr", default=0.025, show_default=True)
@click.option("--delta", default=0.5, show_default=True)
@click.option("--score", "score_name", default="maxprob", show_default=True,
              type=SCORE_CHOICES)
@click.option("--k", default=5, show_default=True)
@click.option("--workers", default=1, show_default=True,
              help="Reserved for parallel analyses; currently single-threaded.")
def pipeline(fixtures, slang_path, standard_path, gold_path, lexicons_dir,
             names_path, out_dir, seed, min_votes, dimension, window,
             negatives, min_count, subsample, epochs, lr, delta, score_name,
             k, workers):
    """Run every analysis in sequence into one output directory."""
    if workers < 1:
        raise click.UsageError("--workers must be at least 1")
    score = ScoreType(score_name)
    _check_delta(score, delta)
    if fixtures:
        slang_path = slang_path or _fixture_path("slang.jsonl")
        standard_path = standard_path or _fixture_path("standard.tsv")
        gold_path = gold_path or _fixture_path("gold_classes.csv")
        lexicons_dir = lexicons_dir or _fixture_path("lexicons")
        names_path = names_path or _fixture_path("names_gender.csv")
    missing = [name for name, value in
               (("--slang", slang_path), ("--standard", standard_path),
                ("--gold", gold_path), ("--lexicons", lexicons_dir),
                ("--names", names_path)) if value is None]
    if missing:
        raise click.UsageError(
            f"missing inputs (or pass --fixtures): {', '.join(missing)}")
    try:
        run_pipeline(slang_path, standard_path, gold_path, lexicons_dir,
                     names_path, out_dir, seed, min_votes, dimension, window,
                     negatives, min_count, subsample, epochs, lr, delta,
                     score, k)
    except (SlanglexError, OSError) as exc:
        raise _fail(exc)
    _echo_summary("pipeline", out=out_dir, seed=seed)


if __name__ == "__main__":
    main()
