from .conllu import ConlluSentence, ConlluToken, parse_conllu, serialize_conllu
from .corpus import CorpusRecord, group_by_lang, read_corpus, write_corpus
from .sampling import mix_batches, subsample
from .task_formats import (BioCorpus, ClsExample, NerExample, read_bio,
                           read_cls_tsv, repair_bio)

__all__ = [
    "ConlluSentence", "ConlluToken", "parse_conllu", "serialize_conllu",
    "CorpusRecord", "group_by_lang", "read_corpus", "write_corpus",
    "mix_batches", "subsample",
    "BioCorpus", "ClsExample", "NerExample", "read_bio", "read_cls_tsv", "repair_bio",
]
