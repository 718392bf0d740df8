"""Deterministic subsetting and the multilingual equal-share batch mixer."""

import numpy as np

from ..errors import ExhaustedCorpusError, SizeError


def subsample(examples, size, seed):
    """Uniform sample without replacement, kept in original corpus order."""
    if size > len(examples):
        raise SizeError(f"requested {size} of {len(examples)} examples")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(examples), size=size, replace=False)
    return [examples[i] for i in sorted(idx)]


def mix_batches(corpora, batch_size, seed, equal_share=True):
    """Yield batches mixing every language, each sample used once per epoch.

    Each batch takes floor(batch_size / L) samples per language; the
    remainder rotates across languages, with the starting language chosen by
    the seed. Per-language order and within-batch order are seed-shuffled.
    Iteration ends when all corpora are exactly consumed; if one language
    runs dry while another still has samples, equal-share mode raises
    ExhaustedCorpusError.
    """
    langs = sorted(corpora)
    if not langs or all(len(corpora[lang]) == 0 for lang in langs):
        raise ExhaustedCorpusError("no samples in any corpus")
    L = len(langs)
    if equal_share and batch_size < L:
        raise ValueError(f"batch_size {batch_size} < {L} languages in equal-share mode")

    rng = np.random.default_rng(seed)
    queues = {}
    for lang in langs:
        order = rng.permutation(len(corpora[lang]))
        queues[lang] = [corpora[lang][i] for i in order]
    cursors = {lang: 0 for lang in langs}
    rotation = int(rng.integers(L))

    base = batch_size // L if equal_share else None
    remainder = batch_size % L if equal_share else None
    batch_index = 0

    while True:
        remaining = {lang: len(queues[lang]) - cursors[lang] for lang in langs}
        if all(r == 0 for r in remaining.values()):
            return
        if equal_share:
            want = {lang: base for lang in langs}
            for i in range(remainder):
                want[langs[(rotation + batch_index + i) % L]] += 1
            short = [lang for lang in langs if remaining[lang] < want[lang]]
            if short:
                raise ExhaustedCorpusError(
                    f"language(s) {short} exhausted mid-epoch "
                    f"(remaining {remaining})")
        else:
            total = sum(remaining.values())
            want = {}
            left = min(batch_size, total)
            for lang in langs:
                take = min(remaining[lang], left)
                want[lang] = take
                left -= take

        batch = []
        for lang in langs:
            c = cursors[lang]
            batch.extend(queues[lang][c:c + want[lang]])
            cursors[lang] = c + want[lang]
        order = rng.permutation(len(batch))
        yield [batch[i] for i in order]
        batch_index += 1
