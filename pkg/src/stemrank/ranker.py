"""Candidate ranking by cumulative stem-trigram probability.

For one source sentence: keep the source trigrams known to the source
language model, collect the bilingual translations of the words of
those trigrams into a bag of stems, admit ("register") every candidate
stem trigram sharing at least min_stem_matches stems with that bag, and
score each candidate by the sum of stem-model probabilities over its
registered trigrams. Candidates sort by descending score under
competition ranking: equal scores share a rank (1, 1, 3, ...) and keep
their input order.

All shared inputs (models, lexicons, rules) are read-only, so sentences
may be ranked concurrently; results never depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .corpus import BilingualLexicon, Sentence
from .errors import DataError
from .lm import NGram, NGramModel, extract_ngrams
from .stemmer import EMPTY_LEXICON, Lexicon, StemRuleSet, stem_trigrams


@dataclass(frozen=True)
class RankerConfig:
    """min_stem_matches: how many of a trigram's three stems must be
    translations of retained-source-trigram words for registration."""

    min_stem_matches: int = 1
    normalize_by_trigram_count: bool = False

    def __post_init__(self) -> None:
        if self.min_stem_matches not in (1, 2, 3):
            raise ValueError(f"min_stem_matches must be 1, 2 or 3, got {self.min_stem_matches}")


class RankEntry(NamedTuple):
    engine_id: str
    score: float
    rank: int


@dataclass
class CandidateTranslation:
    """One engine's output with its registration and scoring state."""

    engine_id: str
    sentence: Sentence
    stem_trigrams: list[NGram] = field(default_factory=list)
    registered: list[NGram] = field(default_factory=list)
    score: float = 0.0


@dataclass
class SentenceRanking:
    """Full per-sentence trace: retained source trigrams, scored candidates, final order."""

    retained: list[NGram]
    candidates: list[CandidateTranslation]
    entries: list[RankEntry]


def retain_source_trigrams(source: Sentence, source_model: NGramModel) -> set[NGram]:
    """Source trigrams with a nonzero count in the source language model."""
    return {gram for gram in extract_ngrams(source, 3) if source_model.count(gram) > 0}


def translation_bag(retained: Sequence[NGram] | set[NGram], lexicon: BilingualLexicon) -> frozenset[str]:
    """Union of lexicon translations over every word of every retained trigram."""
    stems: set[str] = set()
    for gram in retained:
        for word in gram:
            stems |= lexicon.lookup(word)
    return frozenset(stems)


def register_stem_trigrams(
    retained: Sequence[NGram] | set[NGram],
    candidate_stems: Sequence[NGram],
    lexicon: BilingualLexicon,
    config: RankerConfig | None = None,
) -> list[NGram]:
    """Candidate stem trigrams whose stems match the translation bag.

    A trigram registers when at least min_stem_matches of its three
    stems appear in the bag; candidate order and multiplicity are kept.
    An empty retained set or lexicon registers nothing.
    """
    config = config or RankerConfig()
    bag = translation_bag(retained, lexicon)
    if not bag:
        return []
    return [gram for gram in candidate_stems if sum(s in bag for s in gram) >= config.min_stem_matches]


def score_candidate(registered: Sequence[NGram], stem_model: NGramModel) -> float:
    """Sum of stem-model trigram probabilities; unseen trigrams contribute 0."""
    total = 0.0
    for gram in registered:
        total += stem_model.trigram_prob(*gram)
    return total


def competition_rank(scored: Sequence[tuple[str, float]], descending: bool = True) -> list[RankEntry]:
    """Competition ("1, 1, 3") ranking; ties share a rank and keep input order."""
    key: Callable[[int], float] = (lambda i: -scored[i][1]) if descending else (lambda i: scored[i][1])
    order = sorted(range(len(scored)), key=key)
    entries: list[RankEntry] = []
    rank = 0
    prev: float | None = None
    for position, index in enumerate(order, start=1):
        engine_id, score = scored[index]
        if prev is None or score != prev:
            rank = position
            prev = score
        entries.append(RankEntry(engine_id, score, rank))
    return entries


def rank_sentence(
    source: Sentence,
    candidates: Sequence[tuple[str, Sentence]],
    source_model: NGramModel,
    stem_model: NGramModel,
    bilingual: BilingualLexicon,
    rules: StemRuleSet | None = None,
    lexicon: Lexicon = EMPTY_LEXICON,
    config: RankerConfig | None = None,
) -> SentenceRanking:
    """Run the full pipeline for one source sentence and its candidates.

    Each candidate is stemmed, its stem trigrams are registered against
    the retained source trigrams, and the registered probabilities are
    summed; deterministic for fixed inputs.
    """
    if not candidates:
        raise DataError("empty candidate list")
    config = config or RankerConfig()
    rules = rules if rules is not None else StemRuleSet()
    retained = sorted(retain_source_trigrams(source, source_model))
    bag = translation_bag(retained, bilingual)
    scored: list[CandidateTranslation] = []
    for engine_id, sentence in candidates:
        stems = stem_trigrams(sentence, rules, lexicon)
        registered = [g for g in stems if sum(s in bag for s in g) >= config.min_stem_matches] if bag else []
        score = score_candidate(registered, stem_model)
        if config.normalize_by_trigram_count and stems:
            score /= len(stems)
        scored.append(CandidateTranslation(engine_id, sentence, stems, registered, score))
    entries = competition_rank([(c.engine_id, c.score) for c in scored])
    return SentenceRanking(retained, scored, entries)


def rank_candidates(
    source: Sentence,
    candidates: Sequence[tuple[str, Sentence]],
    source_model: NGramModel,
    stem_model: NGramModel,
    bilingual: BilingualLexicon,
    rules: StemRuleSet | None = None,
    lexicon: Lexicon = EMPTY_LEXICON,
    config: RankerConfig | None = None,
) -> list[RankEntry]:
    """The tie-aware descending ordering of candidates for one sentence."""
    return rank_sentence(source, candidates, source_model, stem_model, bilingual, rules, lexicon, config).entries


def rank_test_set(
    sources: Sequence[Sentence],
    engines: Sequence[tuple[str, Sequence[Sentence]]],
    source_model: NGramModel,
    stem_model: NGramModel,
    bilingual: BilingualLexicon,
    rules: StemRuleSet | None = None,
    lexicon: Lexicon = EMPTY_LEXICON,
    config: RankerConfig | None = None,
    workers: int = 1,
) -> list[SentenceRanking]:
    """Rank every source sentence against its line-aligned candidates.

    Sentences are independent, so with workers > 1 they are scored in a
    thread pool; results are assembled in input order either way and are
    byte-for-byte identical to a single-threaded run.
    """
    for engine_id, sentences in engines:
        if len(sentences) != len(sources):
            raise DataError(
                f"engine {engine_id}: {len(sentences)} candidate sentences for {len(sources)} source sentences"
            )

    def rank_one(index: int) -> SentenceRanking:
        candidates = [(engine_id, sentences[index]) for engine_id, sentences in engines]
        return rank_sentence(sources[index], candidates, source_model, stem_model, bilingual, rules, lexicon, config)

    indices = range(len(sources))
    if workers <= 1:
        return [rank_one(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(rank_one, indices))
