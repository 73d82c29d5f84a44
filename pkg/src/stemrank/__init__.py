"""Reference-free ranking of machine translation outputs.

stemrank builds trigram language models over raw and stemmed text,
stems target-language words with lexicon-backed suffix rules, and ranks
competing translations of a source sentence by their cumulative
stem-trigram probability. Rankings can be checked against human
judgments via per-category win counts and Spearman rank correlation.
"""

__version__ = "0.1.0"

from .corpus import (
    BilingualLexicon,
    ParallelCorpus,
    Sentence,
    TokenizerConfig,
    load_bilingual_lexicon,
    load_parallel_corpus,
    normalize,
    tokenize,
)
from .errors import DataError
from .lm import NGramModel, build_model, extract_ngrams, load_model, merge_models, save_model
from .ranker import (
    CandidateTranslation,
    RankEntry,
    RankerConfig,
    rank_candidates,
    register_stem_trigrams,
    retain_source_trigrams,
    score_candidate,
)
from .stemmer import Lexicon, StemRule, StemRuleSet, default_rules, load_lexicon, load_rules, stem
