"""Corpus loading, Unicode normalization, and tokenization.

All text is normalized to NFC so downstream n-gram matching is
codepoint-exact; Devanagari input shows up in mixed normalization forms
in practice. Tokenization is a whitespace split plus detachment of
terminal punctuation (danda, period, ...) into standalone tokens.

File readers accept LF or CRLF line endings and report malformed input
with the file name and 1-based line number.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import DataError

DEFAULT_PUNCT = frozenset({"।", ".", "?", "!", "|"})  # U+0964 is Devanagari danda


@dataclass(frozen=True)
class TokenizerConfig:
    """Whether and which trailing punctuation is split off into its own token."""

    strip_terminal_punct: bool = True
    punct_set: frozenset[str] = DEFAULT_PUNCT

    def __post_init__(self) -> None:
        if self.strip_terminal_punct and not self.punct_set:
            raise ValueError("punct_set must be non-empty when strip_terminal_punct is enabled")


@dataclass(frozen=True)
class Sentence:
    """A tokenized sentence. Tokens are NFC, non-empty, and whitespace-free."""

    tokens: tuple[str, ...]
    raw: str = ""

    def __post_init__(self) -> None:
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r}: tokens must be non-empty and contain no whitespace")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]


@dataclass(frozen=True)
class ParallelCorpus:
    """Line-aligned sentence pairs; pair i came from line i of each file."""

    pairs: tuple[tuple[Sentence, Sentence], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[Sentence, Sentence]]:
        return iter(self.pairs)

    @property
    def sources(self) -> list[Sentence]:
        return [src for src, _ in self.pairs]

    @property
    def targets(self) -> list[Sentence]:
        return [tgt for _, tgt in self.pairs]


class BilingualLexicon:
    """Source word (casefolded, NFC) to set of target stems.

    Lookup of an unknown word yields the empty set, never an error.
    """

    def __init__(self, entries: dict[str, set[str]] | None = None):
        self._entries: dict[str, frozenset[str]] = {}
        for source, targets in (entries or {}).items():
            key = normalize(source).casefold()
            values = frozenset(normalize(t) for t in targets)
            if not key or not values or "" in values:
                raise ValueError(f"lexicon entries need a non-empty source and targets: {source!r} -> {targets!r}")
            self._entries[key] = self._entries.get(key, frozenset()) | values

    def lookup(self, word: str) -> frozenset[str]:
        return self._entries.get(normalize(word).casefold(), frozenset())

    def __contains__(self, word: str) -> bool:
        return bool(self.lookup(word))

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()


def normalize(text: str) -> str:
    """NFC-normalize and trim surrounding whitespace, including line ends."""
    return unicodedata.normalize("NFC", text).strip()


def tokenize(text: str, config: TokenizerConfig | None = None) -> Sentence:
    """Split on whitespace runs, detaching trailing punctuation characters.

    Each detached punctuation character becomes its own token, in reading
    order, so joining the tokens with single spaces and re-tokenizing is a
    fixed point. Whitespace-only input yields an empty token sequence.
    """
    config = config or TokenizerConfig()
    tokens: list[str] = []
    for piece in text.split():
        if config.strip_terminal_punct:
            tail: list[str] = []
            while len(piece) >= 2 and piece[-1] in config.punct_set:
                tail.append(piece[-1])
                piece = piece[:-1]
            tokens.append(piece)
            tokens.extend(reversed(tail))
        else:
            tokens.append(piece)
    return Sentence(tuple(tokens), raw=text)


def read_lines(path) -> list[str]:
    """Lines of a UTF-8 file without terminators; LF and CRLF both accepted.

    A trailing newline at end of file does not produce a phantom empty
    line. Undecodable bytes raise DataError naming file and line.
    """
    data = Path(path).read_bytes()
    if not data:
        return []
    raw_lines = data.split(b"\n")
    if raw_lines[-1] == b"":
        raw_lines.pop()
    lines: list[str] = []
    for lineno, raw in enumerate(raw_lines, start=1):
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid UTF-8 byte sequence ({exc.reason})") from exc
    return lines


def load_sentences(path, config: TokenizerConfig | None = None) -> list[Sentence]:
    """One sentence per line, normalized and tokenized.

    Empty lines become empty sentences so that alignment by line number
    is preserved; they contribute no n-grams downstream.
    """
    return [tokenize(normalize(line), config) for line in read_lines(path)]


def load_parallel_corpus(source_path, target_path, config: TokenizerConfig | None = None) -> ParallelCorpus:
    """Load two line-aligned files into sentence pairs, in file order."""
    source_lines = read_lines(source_path)
    target_lines = read_lines(target_path)
    if len(source_lines) != len(target_lines):
        raise DataError(
            f"aligned files differ in line count: {len(source_lines)} vs {len(target_lines)} "
            f"({source_path} / {target_path})"
        )
    pairs = tuple(
        (tokenize(normalize(s), config), tokenize(normalize(t), config))
        for s, t in zip(source_lines, target_lines)
    )
    return ParallelCorpus(pairs)


def load_bilingual_lexicon(path) -> BilingualLexicon:
    """Load `source<TAB>target1,target2,...` entries; `#` lines are comments.

    Duplicate source words merge by set union. Source words are
    casefolded; lines missing a TAB or with an empty field are errors.
    """
    entries: dict[str, set[str]] = {}
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" not in stripped:
            raise DataError(f"{path}:{lineno}: expected source<TAB>targets")
        source, _, rhs = stripped.partition("\t")
        source = normalize(source).casefold()
        targets = [normalize(t) for t in rhs.split(",")]
        if not source or not targets or any(not t for t in targets):
            raise DataError(f"{path}:{lineno}: empty source or target field")
        entries.setdefault(source, set()).update(targets)
    return BilingualLexicon(entries)
