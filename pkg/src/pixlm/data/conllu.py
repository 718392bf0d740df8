"""CoNLL-U reader and writer.

Ten tab-separated columns per token line. Multiword-token ranges ("1-2")
and empty nodes ("1.1") are skipped, matching universal evaluation
practice; comment lines are preserved on the sentence. A blank line
terminates a sentence.
"""

from dataclasses import dataclass, field

from ..errors import FormatError

_COLUMNS = 10


@dataclass
class ConlluToken:
    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: str = "_"
    head: int = 0
    deprel: str = "_"
    deps: str = "_"
    misc: str = "_"


@dataclass
class ConlluSentence:
    tokens: list
    comments: list = field(default_factory=list)

    @property
    def forms(self):
        return [t.form for t in self.tokens]

    @property
    def heads(self):
        return [t.head for t in self.tokens]

    @property
    def deprels(self):
        return [t.deprel for t in self.tokens]


def _is_range_id(col):
    return "-" in col


def _is_empty_node_id(col):
    return "." in col


def parse_conllu(stream):
    """Parse a CoNLL-U stream into sentences; raises FormatError with line."""
    sentences = []
    tokens = []
    comments = []

    def flush():
        nonlocal tokens, comments
        if tokens or comments:
            sent = ConlluSentence(tokens=tokens, comments=comments)
            _validate(sent)
            sentences.append(sent)
        tokens, comments = [], []

    lineno = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != _COLUMNS:
            raise FormatError(f"expected {_COLUMNS} columns, got {len(cols)}", line=lineno)
        if _is_range_id(cols[0]) or _is_empty_node_id(cols[0]):
            continue
        try:
            tid = int(cols[0])
        except ValueError:
            raise FormatError(f"non-integer token id {cols[0]!r}", line=lineno) from None
        head_col = cols[6]
        try:
            head = int(head_col)
        except ValueError:
            raise FormatError(f"non-integer head {head_col!r}", line=lineno) from None
        tokens.append(ConlluToken(id=tid, form=cols[1], lemma=cols[2], upos=cols[3],
                                  xpos=cols[4], feats=cols[5], head=head,
                                  deprel=cols[7], deps=cols[8], misc=cols[9]))
    flush()
    return sentences


def _validate(sentence):
    n = len(sentence.tokens)
    for t in sentence.tokens:
        if not 0 <= t.head <= n:
            raise FormatError(f"head {t.head} outside [0, {n}] for token {t.id}")
        if t.head == t.id:
            raise FormatError(f"token {t.id} is its own head")
    ids = [t.id for t in sentence.tokens]
    if ids != list(range(1, n + 1)):
        raise FormatError(f"token ids not contiguous from 1: {ids}")


def serialize_conllu(sentences):
    """Render sentences back to CoNLL-U text."""
    out = []
    for sent in sentences:
        out.extend(sent.comments)
        for t in sent.tokens:
            out.append("\t".join([str(t.id), t.form, t.lemma, t.upos, t.xpos,
                                  t.feats, str(t.head), t.deprel, t.deps, t.misc]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")
