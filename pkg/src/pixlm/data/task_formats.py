"""Readers for the BIO tagging and classification TSV formats."""

from dataclasses import dataclass

from ..errors import FormatError


@dataclass
class NerExample:
    words: list
    tags: list


@dataclass
class ClsExample:
    text: str
    label: str


@dataclass
class BioCorpus:
    examples: list
    repaired: int  # count of I-X tags promoted to B-X

    def __iter__(self):
        return iter(self.examples)

    def __len__(self):
        return len(self.examples)


def repair_bio(tags):
    """Promote I-X with no preceding B-X/I-X to B-X; returns (tags, repairs)."""
    fixed = []
    repairs = 0
    prev_type = None
    for tag in tags:
        if tag.startswith("I-"):
            t = tag[2:]
            if prev_type != t:
                fixed.append("B-" + t)
                repairs += 1
            else:
                fixed.append(tag)
            prev_type = t
        elif tag.startswith("B-"):
            fixed.append(tag)
            prev_type = tag[2:]
        else:
            fixed.append(tag)
            prev_type = None
    return fixed, repairs


def read_bio(stream):
    """word<TAB>tag lines, blank-line separated examples."""
    examples = []
    words, tags = [], []
    repaired = 0

    def flush():
        nonlocal words, tags, repaired
        if words:
            fixed, n = repair_bio(tags)
            repaired += n
            examples.append(NerExample(words=words, tags=fixed))
        words, tags = [], []

    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise FormatError(f"expected word<TAB>tag, got {line!r}", line=lineno)
        word, tag = cols
        if not word:
            raise FormatError("empty word", line=lineno)
        if tag != "O" and not (tag.startswith("B-") or tag.startswith("I-")):
            raise FormatError(f"bad BIO tag {tag!r}", line=lineno)
        words.append(word)
        tags.append(tag)
    flush()
    return BioCorpus(examples=examples, repaired=repaired)


def read_cls_tsv(stream):
    """label<TAB>text lines, one example each."""
    examples = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        cols = line.split("\t", 1)
        if len(cols) != 2:
            raise FormatError(f"expected label<TAB>text, got {line!r}", line=lineno)
        label, text = cols
        if not label or not text.strip():
            raise FormatError("empty label or text", line=lineno)
        examples.append(ClsExample(text=text, label=label))
    return examples
