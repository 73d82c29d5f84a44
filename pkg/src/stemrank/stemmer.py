"""Lexicon-backed suffix-stripping stemmer.

A word found in the lexicon is already a valid root or derivational
word and is returned unchanged. Otherwise rules are tried longest
suffix first and the first applicable rule fires exactly once; a rule
is applicable when its suffix matches the word's tail and the rewritten
word keeps at least min_stem_len codepoints. A word no rule matches
passes through unchanged (it may be a proper name or an invalid word),
so stemming never empties a token.

Rule files hold one `suffix<TAB>replacement[<TAB>min_stem_len]` entry
per line, with `-` standing for the empty replacement; `#` lines are
comments. A rewrite rule keeps part of the tail, e.g. a rule mapping
the suffix ने to ना.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from typing import Iterable, Iterator

from .corpus import Sentence, normalize
from .errors import DataError
from .lm import NGram, extract_ngrams


@dataclass(frozen=True)
class StemRule:
    suffix: str
    replacement: str = ""
    min_stem_len: int = 1

    def __post_init__(self) -> None:
        if not self.suffix:
            raise ValueError("rule suffix must be non-empty")
        if self.suffix == self.replacement:
            raise ValueError(f"rule {self.suffix!r} rewrites to itself")
        if self.min_stem_len < 1:
            raise ValueError("min_stem_len must be at least 1")

    def apply(self, word: str) -> str | None:
        """The rewritten word, or None when this rule does not apply."""
        if not word.endswith(self.suffix):
            return None
        stemmed = word[: len(word) - len(self.suffix)] + self.replacement
        if len(stemmed) < self.min_stem_len:
            return None
        return stemmed


class StemRuleSet:
    """Rules ordered by descending suffix length; ties keep the given order."""

    def __init__(self, rules: Iterable[StemRule] = ()):
        rules = list(rules)
        seen: set[str] = set()
        for rule in rules:
            if rule.suffix in seen:
                raise ValueError(f"duplicate rule suffix {rule.suffix!r}")
            seen.add(rule.suffix)
        self.rules: tuple[StemRule, ...] = tuple(sorted(rules, key=lambda r: -len(r.suffix)))

    def __iter__(self) -> Iterator[StemRule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


class Lexicon:
    """Set of known valid words; membership short-circuits stemming."""

    def __init__(self, words: Iterable[str] = ()):
        normalized = frozenset(normalize(w) for w in words)
        if "" in normalized:
            raise ValueError("lexicon words must be non-empty")
        self.words = normalized

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


EMPTY_LEXICON = Lexicon()


def load_rules(path) -> StemRuleSet:
    """Read a rule file; duplicate suffixes and malformed lines are errors."""
    from .corpus import read_lines

    rules: list[StemRule] = []
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split("\t")
        if len(fields) not in (2, 3):
            raise DataError(f"{path}:{lineno}: expected suffix<TAB>replacement[<TAB>min_stem_len]")
        suffix = normalize(fields[0])
        replacement = "" if fields[1] == "-" else normalize(fields[1])
        try:
            min_stem_len = int(fields[2]) if len(fields) == 3 else 1
            rule = StemRule(suffix, replacement, min_stem_len)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if any(r.suffix == rule.suffix for r in rules):
            raise DataError(f"{path}:{lineno}: duplicate suffix {rule.suffix!r}")
        rules.append(rule)
    return StemRuleSet(rules)


def load_lexicon(path) -> Lexicon:
    """Read a lexicon file: one word per line, `#` lines are comments."""
    from .corpus import read_lines

    words = []
    for line in read_lines(path):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            words.append(stripped)
    return Lexicon(words)


def default_rules() -> StemRuleSet:
    """The starter Hindi suffix rules shipped with the package.

    A reconstruction of a common lightweight-stemmer suffix inventory,
    not a published rule set; replace with your own file for serious use.
    """
    resource = importlib.resources.files(__package__) / "data" / "hindi_suffixes.txt"
    with importlib.resources.as_file(resource) as path:
        return load_rules(path)


def stem(word: str, rules: StemRuleSet, lexicon: Lexicon = EMPTY_LEXICON) -> str:
    if word in lexicon:
        return word
    for rule in rules:
        stemmed = rule.apply(word)
        if stemmed is not None:
            return stemmed
    return word


def stem_sentence(sentence: Sentence, rules: StemRuleSet, lexicon: Lexicon = EMPTY_LEXICON) -> Sentence:
    """Stem every token; token count is preserved.

    Punctuation tokens pass through untouched because no rule suffix
    matches them (rule files are built from word suffixes).
    """
    stems = tuple(stem(token, rules, lexicon) for token in sentence)
    return Sentence(stems, raw=" ".join(stems))


def stem_trigrams(sentence: Sentence, rules: StemRuleSet, lexicon: Lexicon = EMPTY_LEXICON) -> list[NGram]:
    """Trigrams of the stemmed sentence: max(0, L-2) of them for L tokens."""
    return extract_ngrams(stem_sentence(sentence, rules, lexicon), 3)
