from .biaffine import BiaffineParser
from .classifier import SequenceClassifier, classify_sequence
from .edmonds import decode_tree
from .pooling import pool_sequence, pool_words
from .tagger import TokenTagger, tag_tokens

__all__ = ["BiaffineParser", "SequenceClassifier", "TokenTagger",
           "classify_sequence", "decode_tree", "pool_sequence", "pool_words",
           "tag_tokens"]
