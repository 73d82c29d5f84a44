"""Human-judgment ingestion, win-count tables, and rank agreement.

A human judgment scores one translation on eleven parameters, each on a
5-point scale from 1 (ideal) to 5 (not acceptable). A candidate's human
aggregate is the unweighted mean of the eleven scores, so lower is
better; the module handles that inversion internally and exposes only
rank numbers. Win counts say how often an engine holds rank 1 within a
category of engines, and Spearman's rho with average-rank tie handling
quantifies agreement between two win-count tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DataError
from .ranker import RankEntry, competition_rank

SCORE_COUNT = 11
SCORE_MIN, SCORE_MAX = 1, 5

WEB_ENGINES = ("E1", "E2", "E3")
TOOLKIT_ENGINES = ("E4", "E5", "E6")

WinCountTable = dict[str, int]


@dataclass(frozen=True)
class HumanJudgment:
    sentence_index: int
    engine_id: str
    scores: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.sentence_index < 0:
            raise ValueError("sentence_index must be non-negative")
        if not self.engine_id:
            raise ValueError("engine_id must be non-empty")
        if len(self.scores) != SCORE_COUNT:
            raise ValueError(f"expected {SCORE_COUNT} scores, got {len(self.scores)}")
        for score in self.scores:
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise ValueError(f"score {score} outside {SCORE_MIN}..{SCORE_MAX}")

    @property
    def mean_score(self) -> float:
        return sum(self.scores) / SCORE_COUNT


@dataclass(frozen=True)
class CategorySpec:
    """A named engine subset to evaluate within."""

    name: str
    engines: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.engines:
            raise ValueError("a category needs at least one engine")
        if len(set(self.engines)) != len(self.engines):
            raise ValueError("category engines must be distinct")
        if self.name == "web" and not set(self.engines) <= set(WEB_ENGINES):
            raise ValueError(f"web category is limited to {WEB_ENGINES}")
        if self.name == "toolkit" and not set(self.engines) <= set(TOOLKIT_ENGINES):
            raise ValueError(f"toolkit category is limited to {TOOLKIT_ENGINES}")


def web_category() -> CategorySpec:
    return CategorySpec("web", WEB_ENGINES)


def toolkit_category() -> CategorySpec:
    return CategorySpec("toolkit", TOOLKIT_ENGINES)


def combined_category(engines: Sequence[str]) -> CategorySpec:
    """The union category over whatever engines are present."""
    return CategorySpec("combined", tuple(sorted(set(engines))))


def load_judgments(path) -> list[HumanJudgment]:
    """Read judgment rows `sentence_index<TAB>engine_id<TAB>s1..s11`.

    The eleven scores may be eleven TAB columns or one space-separated
    column. Every (sentence_index, engine_id) pair must be unique;
    `#` lines are comments.
    """
    from .corpus import read_lines

    judgments: list[HumanJudgment] = []
    seen: set[tuple[int, str]] = set()
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split("\t")
        if len(fields) == 3:
            score_fields = fields[2].split()
        elif len(fields) == 2 + SCORE_COUNT:
            score_fields = fields[2:]
        else:
            raise DataError(f"{path}:{lineno}: expected {2 + SCORE_COUNT} columns, got {len(fields)}")
        if len(score_fields) != SCORE_COUNT:
            raise DataError(f"{path}:{lineno}: expected {SCORE_COUNT} score columns, got {len(score_fields)}")
        try:
            judgment = HumanJudgment(int(fields[0]), fields[1], tuple(int(s) for s in score_fields))
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        key = (judgment.sentence_index, judgment.engine_id)
        if key in seen:
            raise DataError(f"{path}:{lineno}: duplicate judgment for sentence {key[0]}, engine {key[1]}")
        seen.add(key)
        judgments.append(judgment)
    return judgments


def human_rank(judgments: Sequence[HumanJudgment]) -> list[RankEntry]:
    """Rank one sentence's engines by ascending mean score (1 = ideal).

    Ties share a rank and keep input order; the reported score is the
    mean rounded to 4 decimal places. Ranking itself compares exact
    integer score sums, so rounding never affects the order.
    """
    if not judgments:
        raise DataError("no judgments for sentence")
    if len({j.engine_id for j in judgments}) != len(judgments):
        raise DataError("duplicate engine in one sentence's judgments")
    totals = [(j.engine_id, float(sum(j.scores))) for j in judgments]
    ranked = competition_rank(totals, descending=False)
    return [RankEntry(e.engine_id, round(e.score / SCORE_COUNT, 4), e.rank) for e in ranked]


def _restrict_and_rerank(entries: Sequence[RankEntry], engines: set[str]) -> list[RankEntry]:
    # Re-ranking on the original rank values preserves the order and the
    # ties of the full list, whichever direction its scores run in.
    kept = [e for e in entries if e.engine_id in engines]
    reranked = competition_rank([(e.engine_id, float(e.rank)) for e in kept], descending=False)
    by_engine = {e.engine_id: e.score for e in kept}
    return [RankEntry(e.engine_id, by_engine[e.engine_id], e.rank) for e in reranked]


def win_counts(
    ranked_lists: Mapping[int, Sequence[RankEntry]] | Sequence[Sequence[RankEntry]],
    category: CategorySpec,
    tie_policy: str = "shared",
) -> WinCountTable:
    """Count, per engine, the sentences where it holds rank 1 in the category.

    Each sentence's list is restricted to the category engines and
    re-ranked within the restriction. Under tie policy "shared" every
    rank-1 engine of a sentence gets a win; under "first" only the
    earliest-listed one does.
    """
    if tie_policy not in ("shared", "first"):
        raise ValueError(f"tie_policy must be 'shared' or 'first', got {tie_policy!r}")
    items = ranked_lists.items() if isinstance(ranked_lists, Mapping) else enumerate(ranked_lists)
    engines = set(category.engines)
    counts: WinCountTable = {engine: 0 for engine in category.engines}
    for sentence_id, entries in items:
        present = {e.engine_id for e in entries}
        missing = [engine for engine in category.engines if engine not in present]
        if missing:
            raise DataError(f"sentence {sentence_id}: missing engine(s) {', '.join(missing)} for category {category.name}")
        winners = [e for e in _restrict_and_rerank(entries, engines) if e.rank == 1]
        if tie_policy == "first":
            winners = winners[:1]
        for entry in winners:
            counts[entry.engine_id] += 1
    return counts


def _average_ranks(values: Sequence[float]) -> list[float]:
    """1-based descending ranks; tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0.0] * len(values)
    position = 0
    while position < len(order):
        end = position
        while end + 1 < len(order) and values[order[end + 1]] == values[order[position]]:
            end += 1
        average = (position + end) / 2 + 1
        for k in range(position, end + 1):
            ranks[order[k]] = average
        position = end + 1
    return ranks


def rank_correlation(a: WinCountTable, b: WinCountTable) -> float:
    """Spearman's rho between two win-count tables over the same engines.

    Engines are ranked by count with average ranks for ties; rho is the
    Pearson correlation of the two rank vectors. NaN when either table
    has no variation.
    """
    if set(a) != set(b):
        raise DataError(f"engine sets differ: {sorted(a)} vs {sorted(b)}")
    engines = sorted(a)
    ranks_a = _average_ranks([float(a[e]) for e in engines])
    ranks_b = _average_ranks([float(b[e]) for e in engines])
    n = len(engines)
    mean_a = sum(ranks_a) / n
    mean_b = sum(ranks_b) / n
    cov = sum((x - mean_a) * (y - mean_b) for x, y in zip(ranks_a, ranks_b))
    var_a = sum((x - mean_a) ** 2 for x in ranks_a)
    var_b = sum((y - mean_b) ** 2 for y in ranks_b)
    if var_a == 0.0 or var_b == 0.0:
        return math.nan
    return cov / math.sqrt(var_a * var_b)


def render_win_table(category: CategorySpec, system_counts: WinCountTable, human_counts: WinCountTable) -> str:
    """A fixed-width text table of per-engine win counts, system vs human."""
    rows = [("Engine", "System wins", "Human wins")]
    for engine in category.engines:
        rows.append((engine, str(system_counts.get(engine, 0)), str(human_counts.get(engine, 0))))
    widths = [max(len(row[col]) for row in rows) for col in range(3)]
    lines = [f"Category: {category.name}"]
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def build_report(
    category: CategorySpec,
    system_counts: WinCountTable,
    human_counts: WinCountTable,
    tie_policy: str = "shared",
) -> dict:
    """The machine-readable agreement report."""
    rho = rank_correlation(system_counts, human_counts)
    return {
        "category": category.name,
        "engines": list(category.engines),
        "win_counts_system": {e: system_counts[e] for e in category.engines},
        "win_counts_human": {e: human_counts[e] for e in category.engines},
        "spearman_rho": None if math.isnan(rho) else rho,
        "tie_policy": tie_policy,
        "aggregation": "unweighted-mean-of-11-scores",
    }
