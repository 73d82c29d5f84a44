"""Trigram language model: frequency counts and MLE probabilities.

Counts aggregate contiguous n-grams (n = 1, 2, 3) over a tokenized
corpus, with no boundary padding and no smoothing: an n-gram never seen
in the corpus has probability exactly 0. Probabilities are plain count
ratios, recomputed on demand and never stored.

Model file format (UTF-8, LF):

    #total <token count>
    #order 1
    <token>\\t<count>
    #order 2
    <token> <token>\\t<count>
    #order 3
    <token> <token> <token>\\t<count>

Within each order, lines are sorted by descending count, ties by
codepoint-ascending n-gram text, so saving the same model twice is
byte-identical. Lines starting with "# " (hash space) are comments and
are ignored on load.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

NGram = tuple[str, ...]


def extract_ngrams(tokens: Sequence[str], n: int) -> list[NGram]:
    """The max(0, L-n+1) contiguous n-grams of a sentence, in order."""
    if n not in (1, 2, 3):
        raise ValueError(f"n-gram order must be 1, 2 or 3, got {n}")
    toks = tuple(tokens)
    return [toks[i : i + n] for i in range(len(toks) - n + 1)]


class NGramModel:
    """Counts for orders 1..3 plus MLE probability queries.

    Immutable by convention once built; queries are safe from any number
    of concurrent readers.
    """

    order = 3

    def __init__(
        self,
        unigrams: Counter[NGram] | None = None,
        bigrams: Counter[NGram] | None = None,
        trigrams: Counter[NGram] | None = None,
        total_unigrams: int = 0,
    ):
        self.unigrams: Counter[NGram] = unigrams if unigrams is not None else Counter()
        self.bigrams: Counter[NGram] = bigrams if bigrams is not None else Counter()
        self.trigrams: Counter[NGram] = trigrams if trigrams is not None else Counter()
        self.total_unigrams = total_unigrams

    @property
    def vocabulary_size(self) -> int:
        return len(self.unigrams)

    def _counter_for(self, n: int) -> Counter[NGram]:
        if n == 1:
            return self.unigrams
        if n == 2:
            return self.bigrams
        if n == 3:
            return self.trigrams
        raise ValueError(f"n-gram order must be 1, 2 or 3, got {n}")

    def count(self, ngram: Sequence[str]) -> int:
        gram = tuple(ngram)
        return self._counter_for(len(gram)).get(gram, 0)

    def unigram_prob(self, word: str, denominator: str = "tokens") -> float:
        """count(w) over the total token count, or over the vocabulary size.

        The default "tokens" denominator makes unigram probabilities a
        distribution (they sum to 1); "vocabulary" divides by the number
        of distinct words instead. 0 for unseen words and empty models.
        """
        if denominator == "tokens":
            denom = self.total_unigrams
        elif denominator == "vocabulary":
            denom = self.vocabulary_size
        else:
            raise ValueError(f"denominator must be 'tokens' or 'vocabulary', got {denominator!r}")
        if denom == 0:
            return 0.0
        return self.unigrams.get((word,), 0) / denom

    def bigram_prob(self, w_prev: str, word: str) -> float:
        """count(w_prev, w) / count(w_prev); 0 when the history is unseen."""
        history = self.unigrams.get((w_prev,), 0)
        if history == 0:
            return 0.0
        return self.bigrams.get((w_prev, word), 0) / history

    def trigram_prob(self, w_pp: str, w_p: str, word: str) -> float:
        """count(w_pp, w_p, w) / count(w_pp, w_p); 0 when the prefix bigram is unseen."""
        history = self.bigrams.get((w_pp, w_p), 0)
        if history == 0:
            return 0.0
        return self.trigrams.get((w_pp, w_p, word), 0) / history

    def distinct_counts(self) -> tuple[int, int, int]:
        """Number of distinct n-grams per order (1, 2, 3)."""
        return len(self.unigrams), len(self.bigrams), len(self.trigrams)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NGramModel):
            return NotImplemented
        return (
            self.total_unigrams == other.total_unigrams
            and self.unigrams == other.unigrams
            and self.bigrams == other.bigrams
            and self.trigrams == other.trigrams
        )


def build_model(sentences: Iterable[Sequence[str]]) -> NGramModel:
    """Aggregate n-gram counts over every sentence; empty corpus gives an empty model."""
    tokenized = [tuple(sentence) for sentence in sentences]
    return NGramModel(
        unigrams=Counter(g for toks in tokenized for g in extract_ngrams(toks, 1)),
        bigrams=Counter(g for toks in tokenized for g in extract_ngrams(toks, 2)),
        trigrams=Counter(g for toks in tokenized for g in extract_ngrams(toks, 3)),
        total_unigrams=sum(len(toks) for toks in tokenized),
    )


def merge_models(models: Iterable[NGramModel]) -> NGramModel:
    """Add partial counts; merging shard models equals one single-pass build."""
    merged = NGramModel()
    for model in models:
        merged.unigrams.update(model.unigrams)
        merged.bigrams.update(model.bigrams)
        merged.trigrams.update(model.trigrams)
        merged.total_unigrams += model.total_unigrams
    return merged


def _sorted_lines(counter: Counter[NGram]) -> list[str]:
    entries = sorted(((" ".join(gram), count) for gram, count in counter.items()), key=lambda e: (-e[1], e[0]))
    return [f"{text}\t{count}" for text, count in entries]


def dumps_model(model: NGramModel) -> str:
    """The canonical model file body; byte-deterministic for a given model."""
    lines = [f"#total {model.total_unigrams}"]
    for n in (1, 2, 3):
        lines.append(f"#order {n}")
        lines.extend(_sorted_lines(model._counter_for(n)))
    return "\n".join(lines) + "\n"


def save_model(model: NGramModel, path) -> None:
    """Write the canonical model file; deterministic for a given model."""
    Path(path).write_text(dumps_model(model), encoding="utf-8", newline="\n")


def _validate(model: NGramModel, path) -> None:
    if sum(model.unigrams.values()) != model.total_unigrams:
        raise DataError(f"{path}: unigram counts sum to {sum(model.unigrams.values())}, header says {model.total_unigrams}")
    for (w1, w2), count in model.bigrams.items():
        if count > model.unigrams.get((w1,), 0) or model.unigrams.get((w2,), 0) == 0:
            raise DataError(f"{path}: bigram ({w1} {w2}) inconsistent with unigram counts")
    for gram, count in model.trigrams.items():
        if count > model.bigrams.get(gram[:2], 0):
            raise DataError(f"{path}: trigram ({' '.join(gram)}) exceeds its prefix bigram count")


def load_model(path) -> NGramModel:
    """Parse a model file; structural problems raise DataError with a line number."""
    from .corpus import read_lines

    model = NGramModel()
    total: int | None = None
    current: Counter[NGram] | None = None
    current_order = 0
    for lineno, line in enumerate(read_lines(path), start=1):
        if not line.strip() or line.startswith("# "):
            continue
        if line.startswith("#total "):
            if total is not None:
                raise DataError(f"{path}:{lineno}: duplicate #total header")
            try:
                total = int(line.split(maxsplit=1)[1])
            except (IndexError, ValueError):
                raise DataError(f"{path}:{lineno}: malformed #total header") from None
            continue
        if line.startswith("#order "):
            try:
                current_order = int(line.split(maxsplit=1)[1])
                current = model._counter_for(current_order)
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed #order header") from None
            continue
        if current is None or total is None:
            raise DataError(f"{path}:{lineno}: n-gram line before #total/#order headers")
        text, sep, count_text = line.partition("\t")
        gram = tuple(text.split(" "))
        if not sep or not all(gram) or len(gram) != current_order:
            raise DataError(f"{path}:{lineno}: expected a {current_order}-gram line `tokens<TAB>count`")
        try:
            count = int(count_text)
        except ValueError:
            raise DataError(f"{path}:{lineno}: count is not an integer") from None
        if count <= 0:
            raise DataError(f"{path}:{lineno}: count must be positive")
        if gram in current:
            raise DataError(f"{path}:{lineno}: duplicate {current_order}-gram `{text}`")
        current[gram] = count
    model.total_unigrams = total if total is not None else 0
    _validate(model, path)
    return model
