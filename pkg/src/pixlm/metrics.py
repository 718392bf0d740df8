"""Evaluation metrics: macro-F1, attachment scores, entity span-F1.

Classification macro-F1 averages over the full declared class set so scores
stay comparable across small evaluation splits; NER span-F1 averages over
the types present in gold or predictions, with strict (type, start, end)
matching.
"""

from .errors import AlignmentError, LengthMismatchError, TokenCountMismatchError
from .data.task_formats import repair_bio


def _f1(tp, fp, fn):
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(gold, pred, classes):
    """Unweighted mean of per-class F1 over the full class set."""
    if len(gold) != len(pred):
        raise LengthMismatchError(f"{len(gold)} gold vs {len(pred)} predicted labels")
    classes = list(classes)
    tally = {c: [0, 0, 0] for c in classes}  # tp, fp, fn
    for g, p in zip(gold, pred):
        if g == p:
            if g in tally:
                tally[g][0] += 1
        else:
            if p in tally:
                tally[p][1] += 1
            if g in tally:
                tally[g][2] += 1
    scores = [_f1(*tally[c]) for c in classes]
    return sum(scores) / len(scores) if scores else 0.0


def las_uas(gold, pred):
    """(LAS, UAS) micro-averaged over all tokens.

    `gold` and `pred` are lists of sentences, each a (heads, rels) pair.
    """
    if len(gold) != len(pred):
        raise TokenCountMismatchError(f"{len(gold)} gold vs {len(pred)} predicted sentences")
    total = 0
    head_ok = 0
    both_ok = 0
    for i, ((gh, gr), (ph, pr)) in enumerate(zip(gold, pred)):
        if len(gh) != len(ph) or len(gr) != len(pr) or len(gh) != len(gr):
            raise TokenCountMismatchError(f"sentence {i}: token counts differ")
        for g_head, g_rel, p_head, p_rel in zip(gh, gr, ph, pr):
            total += 1
            if g_head == p_head:
                head_ok += 1
                if g_rel == p_rel:
                    both_ok += 1
    if total == 0:
        return 1.0, 1.0
    return both_ok / total, head_ok / total


def decode_spans(tags):
    """BIO tags to a set of (type, start, end_exclusive) spans, post-repair."""
    fixed, _ = repair_bio(tags)
    spans = set()
    start = None
    current = None
    for i, tag in enumerate(fixed):
        if tag.startswith("B-"):
            if current is not None:
                spans.add((current, start, i))
            current = tag[2:]
            start = i
        elif tag.startswith("I-") and current == tag[2:]:
            continue
        else:
            if current is not None:
                spans.add((current, start, i))
            current, start = None, None
    if current is not None:
        spans.add((current, start, len(fixed)))
    return spans


def entity_span_f1(gold_seqs, pred_seqs):
    """Macro-over-types F1 with exact span matching."""
    if len(gold_seqs) != len(pred_seqs):
        raise AlignmentError(f"{len(gold_seqs)} gold vs {len(pred_seqs)} predicted examples")
    tally = {}

    def bump(t):
        return tally.setdefault(t, [0, 0, 0])

    for i, (gold, pred) in enumerate(zip(gold_seqs, pred_seqs)):
        if len(gold) != len(pred):
            raise AlignmentError(f"example {i}: {len(gold)} gold vs {len(pred)} predicted tags")
        gspans = decode_spans(gold)
        pspans = decode_spans(pred)
        for span in pspans & gspans:
            bump(span[0])[0] += 1
        for span in pspans - gspans:
            bump(span[0])[1] += 1
        for span in gspans - pspans:
            bump(span[0])[2] += 1
    if not tally:
        return 1.0  # no entities anywhere and none predicted: nothing wrong
    scores = [_f1(*counts) for counts in tally.values()]
    return sum(scores) / len(scores)


def average_top_runs(runs, top_k=5):
    """Mean test score of the top_k runs by validation score.

    `runs` is a list of (validation_score, test_score) pairs.
    """
    if not runs:
        raise ValueError("no runs to aggregate")
    ranked = sorted(runs, key=lambda r: -r[0])
    chosen = ranked[:top_k]
    return sum(t for _, t in chosen) / len(chosen)
