"""Corpus records: newline-delimited JSON, one {"text", "lang"} per line."""

import json
from dataclasses import dataclass

from ..errors import FormatError


@dataclass(frozen=True)
class CorpusRecord:
    text: str
    lang: str

    def __post_init__(self):
        if not self.lang:
            raise ValueError("lang must be non-empty")
        if not self.text.strip():
            raise ValueError("text must be non-empty after trimming")


def read_corpus(stream):
    """Parse JSONL corpus records; blank lines are ignored."""
    records = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            records.append(CorpusRecord(text=obj["text"], lang=obj["lang"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad corpus record: {exc}", line=lineno) from exc
    return records


def write_corpus(stream, records):
    for rec in records:
        stream.write(json.dumps({"text": rec.text, "lang": rec.lang},
                                ensure_ascii=False) + "\n")


def group_by_lang(records):
    groups = {}
    for rec in records:
        groups.setdefault(rec.lang, []).append(rec)
    return groups
