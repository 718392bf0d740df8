"""Task adapters: rendering, head construction, loss and evaluation.

Word-aligned tasks drop examples whose words do not all fit the patch
budget, since a partial alignment map would silently misalign gold labels.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyInputError
from ..heads import BiaffineParser, SequenceClassifier, TokenTagger, pool_words
from ..metrics import entity_span_f1, las_uas, macro_f1
from ..render import render_text, render_words


def encode_finetune(model, seq, training=False, rng=None):
    """Encoder pass with patch masking disabled: all text patches visible."""
    visible = np.arange(seq.num_text_patches)
    tokens = model.embed_patches(seq)
    return model.encode(tokens, visible, training=training, rng=rng)


def _attended_rows(encoding):
    rows = np.zeros(encoding.last.shape[0], dtype=bool)
    rows[1:] = True
    return rows


@dataclass
class ClsTask:
    metric_name = "macro_f1"

    def label_set(self, examples):
        return sorted({ex.label for ex in examples})

    def prepare(self, examples, label_set, render_cfg):
        index = {lab: i for i, lab in enumerate(label_set)}
        out = []
        for ex in examples:
            seq = render_text(ex.text, render_cfg)
            if seq.num_text_patches == 0:
                continue
            out.append((seq, index.get(ex.label, -1), ex.label))
        return out

    def build_head(self, hidden_dim, label_set, cfg, rng):
        return SequenceClassifier(hidden_dim, len(label_set), rng=rng)

    def example_loss(self, model, head, prepared, training, rng):
        seq, label_id, _ = prepared
        if label_id < 0:
            raise EmptyInputError("training example with unknown label")
        enc = encode_finetune(model, seq, training=training, rng=rng)
        return head.loss(enc.last, _attended_rows(enc), label_id)

    def evaluate(self, model, head, prepared, label_set):
        gold, pred = [], []
        for seq, _, label in prepared:
            enc = encode_finetune(model, seq)
            pred.append(label_set[head.predict(enc.last, _attended_rows(enc))])
            gold.append(label)
        return macro_f1(gold, pred, label_set)


@dataclass
class UdpTask:
    metric_name = "las"

    def label_set(self, sentences):
        rels = set()
        for sent in sentences:
            rels.update(sent.deprels)
        return sorted(rels)

    def prepare(self, sentences, label_set, render_cfg):
        index = {rel: i for i, rel in enumerate(label_set)}
        out = []
        for sent in sentences:
            if not sent.tokens:
                continue
            seq = render_words(sent.forms, render_cfg)
            if seq.truncated_words:
                continue
            rel_ids = [index.get(rel, 0) for rel in sent.deprels]
            out.append((seq, list(sent.heads), rel_ids, list(sent.deprels)))
        return out

    def build_head(self, hidden_dim, label_set, cfg, rng):
        return BiaffineParser(hidden_dim, label_set, proj_dim=cfg.proj_dim, rng=rng)

    def _words(self, model, prepared, training=False, rng=None):
        seq = prepared[0]
        enc = encode_finetune(model, seq, training=training, rng=rng)
        return pool_words(enc.last, seq.word_spans)

    def example_loss(self, model, head, prepared, training, rng):
        words = self._words(model, prepared, training, rng)
        return head.loss(words, prepared[1], prepared[2])

    def evaluate(self, model, head, prepared, label_set):
        gold, pred = [], []
        for item in prepared:
            words = self._words(model, item)
            heads, label_ids = head.predict(words)
            gold.append((item[1], item[3]))
            pred.append((heads, [label_set[i] for i in label_ids]))
        las, _ = las_uas(gold, pred)
        return las


@dataclass
class NerTask:
    metric_name = "span_f1"

    def label_set(self, corpus):
        tags = set()
        for ex in corpus:
            tags.update(ex.tags)
        tags.discard("O")
        return ["O"] + sorted(tags)  # "O" at index 0: zero logits predict it

    def prepare(self, corpus, label_set, render_cfg):
        index = {tag: i for i, tag in enumerate(label_set)}
        out = []
        for ex in corpus:
            seq = render_words(ex.words, render_cfg)
            if seq.truncated_words or not ex.words:
                continue
            out.append((seq, [index.get(t, 0) for t in ex.tags], list(ex.tags)))
        return out

    def build_head(self, hidden_dim, label_set, cfg, rng):
        return TokenTagger(hidden_dim, label_set, rng=rng)

    def example_loss(self, model, head, prepared, training, rng):
        seq = prepared[0]
        enc = encode_finetune(model, seq, training=training, rng=rng)
        words = pool_words(enc.last, seq.word_spans)
        return head.loss(words, prepared[1])

    def evaluate(self, model, head, prepared, label_set):
        gold, pred = [], []
        for seq, _, tags in prepared:
            enc = encode_finetune(model, seq)
            words = pool_words(enc.last, seq.word_spans)
            ids = head.predict(words)
            gold.append(tags)
            pred.append([label_set[i] for i in ids])
        return entity_span_f1(gold, pred)


_TASKS = {"cls": ClsTask(), "udp": UdpTask(), "ner": NerTask()}


def get_task(name):
    try:
        return _TASKS[name]
    except KeyError:
        raise ValueError(f"unknown task {name!r}; expected one of {sorted(_TASKS)}") from None
