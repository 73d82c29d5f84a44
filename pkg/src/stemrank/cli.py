"""Command-line interface: build-lm, stem, rank, and evaluate.

One executable drives the whole pipeline so a single --config file can
govern tokenizer and stemmer settings across model building and
ranking, preventing train/inference mismatches. Every output file
starts with a `# `-prefixed metadata header (tool version, config hash,
effective settings) and re-running a subcommand on identical inputs
produces byte-identical output.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    DEFAULT_PUNCT,
    TokenizerConfig,
    load_bilingual_lexicon,
    load_sentences,
    normalize,
    read_lines,
    tokenize,
)
from .errors import DataError
from .evaluation import (
    CategorySpec,
    build_report,
    combined_category,
    human_rank,
    load_judgments,
    render_win_table,
    toolkit_category,
    web_category,
    win_counts,
)
from .lm import build_model, dumps_model, load_model
from .ranker import RankEntry, RankerConfig, rank_test_set
from .stemmer import EMPTY_LEXICON, StemRuleSet, load_lexicon, load_rules, stem_sentence


class UsageError(Exception):
    """Bad invocation: missing/unknown options or inconsistent flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # spec reserves exit code 2 for data errors
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


TRUE_WORDS = {"true", "yes", "on", "1"}
FALSE_WORDS = {"false", "no", "off", "0"}


def _as_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in TRUE_WORDS:
        return True
    if lowered in FALSE_WORDS:
        return False
    raise UsageError(f"expected a boolean, got {raw!r}")


def _as_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"expected an integer, got {raw!r}") from None


def _load_config(path) -> dict[str, str]:
    """key = value lines; `#` comments; hyphens and underscores equivalent."""
    config: dict[str, str] = {}
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected `key = value`")
        key, _, value = stripped.partition("=")
        config[key.strip().replace("-", "_")] = value.strip().strip("'\"")
    return config


class Settings:
    """Effective option values: CLI flag first, then config file, then default."""

    def __init__(self, args: argparse.Namespace, allowed: tuple[str, ...]):
        self.config = _load_config(args.config) if getattr(args, "config", None) else {}
        unknown = sorted(set(self.config) - set(allowed))
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        self.args = args
        self.echo: dict[str, object] = {}

    def get(self, key, default=None, parse=None, required=False, record=True):
        value = getattr(self.args, key, None)
        if value is None and key in self.config:
            raw = self.config[key]
            value = parse(raw) if parse else raw
        if value is None:
            value = default
        if value is None and required:
            raise UsageError(f"missing required option --{key.replace('_', '-')}")
        if record:
            self.echo[key] = value
        return value

    def metadata_lines(self, **extra) -> list[str]:
        echoed = dict(self.echo)
        echoed.update(extra)
        blob = json.dumps({k: str(v) for k, v in echoed.items()}, ensure_ascii=False, sort_keys=True)
        digest = hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]
        lines = [f"# stemrank {__version__}", f"# config-hash {digest}"]
        lines.extend(f"# {key} = {value}" for key, value in echoed.items())
        return lines

    def tokenizer(self) -> TokenizerConfig:
        strip = self.get("strip_terminal_punct", default=True, parse=_as_bool)
        chars = self.get("punct_chars", default="".join(sorted(DEFAULT_PUNCT)))
        try:
            return TokenizerConfig(strip_terminal_punct=strip, punct_set=frozenset(chars))
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _write_text(path, lines: list[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def cmd_build_lm(args) -> int:
    settings = Settings(
        args,
        allowed=("out", "stem", "rules", "lexicon", "unigram_denominator", "strip_terminal_punct", "punct_chars"),
    )
    settings.echo["corpus"] = args.corpus
    out = settings.get("out", required=True)
    stem_corpus = settings.get("stem", default=False, parse=_as_bool)
    rules_path = settings.get("rules")
    lexicon_path = settings.get("lexicon")
    settings.get("unigram_denominator", default="tokens")
    tok_config = settings.tokenizer()

    if stem_corpus and (not rules_path or not lexicon_path):
        raise UsageError("--stem requires both --rules and --lexicon")
    sentences = load_sentences(args.corpus, tok_config)
    if stem_corpus:
        rules = load_rules(rules_path)
        lexicon = load_lexicon(lexicon_path)
        sentences = [stem_sentence(s, rules, lexicon) for s in sentences]
    model = build_model(sentences)
    unigrams, bigrams, trigrams = model.distinct_counts()
    body = dumps_model(model)
    Path(out).write_text("\n".join(settings.metadata_lines()) + "\n" + body, encoding="utf-8", newline="\n")
    print(f"1-grams: {unigrams}, 2-grams: {bigrams}, 3-grams: {trigrams}")
    return 0


def cmd_stem(args) -> int:
    settings = Settings(args, allowed=("rules", "lexicon", "strip_terminal_punct", "punct_chars"))
    rules = load_rules(settings.get("rules", required=True))
    lexicon = load_lexicon(settings.get("lexicon", required=True))
    tok_config = settings.tokenizer()
    for line in sys.stdin:
        sentence = tokenize(normalize(line), tok_config)
        print(" ".join(stem_sentence(sentence, rules, lexicon).tokens))
    return 0


def _load_manifest(path) -> list[tuple[str, Path]]:
    """`engine_id<TAB>path` rows; relative paths resolve against the manifest."""
    base = Path(path).parent
    engines: list[tuple[str, Path]] = []
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        engine_id, sep, candidate_path = stripped.partition("\t")
        if not sep or not engine_id or not candidate_path:
            raise DataError(f"{path}:{lineno}: expected engine_id<TAB>path")
        if any(engine_id == seen for seen, _ in engines):
            raise DataError(f"{path}:{lineno}: duplicate engine id {engine_id}")
        engines.append((engine_id, base / candidate_path))
    if not engines:
        raise DataError(f"{path}: manifest lists no engines")
    return engines


def cmd_rank(args) -> int:
    settings = Settings(
        args,
        allowed=(
            "source",
            "manifest",
            "source_model",
            "stem_model",
            "bilingual_lexicon",
            "rules",
            "lexicon",
            "out",
            "explain",
            "min_stem_matches",
            "normalize_by_trigram_count",
            "unigram_denominator",
            "workers",
            "strip_terminal_punct",
            "punct_chars",
        ),
    )
    source_path = settings.get("source", required=True)
    manifest_path = settings.get("manifest", required=True)
    source_model_path = settings.get("source_model", required=True)
    stem_model_path = settings.get("stem_model", required=True)
    bilingual_path = settings.get("bilingual_lexicon", required=True)
    rules_path = settings.get("rules")
    lexicon_path = settings.get("lexicon")
    out = settings.get("out")
    explain_path = settings.get("explain")
    min_matches = settings.get("min_stem_matches", default=1, parse=_as_int)
    normalize_flag = settings.get("normalize_by_trigram_count", default=False, parse=_as_bool)
    settings.get("unigram_denominator", default="tokens")
    # Parallelism never changes output bytes, so it is not part of the echoed config.
    workers = settings.get("workers", default=1, parse=_as_int, record=False)
    tok_config = settings.tokenizer()

    try:
        config = RankerConfig(min_stem_matches=min_matches, normalize_by_trigram_count=normalize_flag)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sources = load_sentences(source_path, tok_config)
    engines = []
    for engine_id, candidate_path in _load_manifest(manifest_path):
        candidates = load_sentences(candidate_path, tok_config)
        if len(candidates) != len(sources):
            raise DataError(
                f"{candidate_path}: {len(candidates)} candidate lines do not match {len(sources)} source lines"
            )
        engines.append((engine_id, candidates))
    source_model = load_model(source_model_path)
    stem_model = load_model(stem_model_path)
    bilingual = load_bilingual_lexicon(bilingual_path)
    rules = load_rules(rules_path) if rules_path else StemRuleSet()
    lexicon = load_lexicon(lexicon_path) if lexicon_path else EMPTY_LEXICON

    rankings = rank_test_set(
        sources, engines, source_model, stem_model, bilingual, rules, lexicon, config, workers=workers
    )

    metadata = settings.metadata_lines(tie_rule="competition-ranking-input-order-stable")
    rows = list(metadata)
    for index, ranking in enumerate(rankings):
        for entry in ranking.entries:
            rows.append(f"{index}\t{entry.engine_id}\t{entry.score:.9f}\t{entry.rank}")
    if out:
        _write_text(out, rows)
    else:
        print("\n".join(rows))

    if explain_path:
        trace = [json.dumps({"metadata": {k: str(v) for k, v in settings.echo.items()}}, ensure_ascii=False)]
        for index, ranking in enumerate(rankings):
            for candidate in ranking.candidates:
                trace.append(
                    json.dumps(
                        {
                            "sentence_index": index,
                            "engine_id": candidate.engine_id,
                            "retained": [list(g) for g in ranking.retained],
                            "registered": [list(g) for g in candidate.registered],
                            "score": candidate.score,
                        },
                        ensure_ascii=False,
                    )
                )
        _write_text(explain_path, trace)
    return 0


def _load_ranked_tsv(path) -> dict[int, list[RankEntry]]:
    ranked: dict[int, list[RankEntry]] = {}
    for lineno, line in enumerate(read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise DataError(f"{path}:{lineno}: expected index<TAB>engine<TAB>score<TAB>rank")
        try:
            index, engine_id, score, rank = int(fields[0]), fields[1], float(fields[2]), int(fields[3])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed ranked row") from None
        ranked.setdefault(index, []).append(RankEntry(engine_id, score, rank))
    return ranked


def _category_for(name: str, engines_csv: str | None, observed: set[str]) -> CategorySpec:
    if name == "combined":
        return combined_category(sorted(observed))
    if name == "web":
        return web_category()
    if name == "toolkit":
        return toolkit_category()
    if not engines_csv:
        raise UsageError("--category custom requires --engines E1,E2,...")
    return CategorySpec("custom", tuple(engines_csv.split(",")))


def cmd_evaluate(args) -> int:
    settings = Settings(
        args, allowed=("ranked", "judgments", "category", "engines", "tie_policy", "out", "json_out")
    )
    ranked_path = settings.get("ranked", required=True)
    judgments_path = settings.get("judgments", required=True)
    category_name = settings.get("category", default="combined")
    engines_csv = settings.get("engines")
    tie_policy = settings.get("tie_policy", default="shared")
    out = settings.get("out", record=False)
    json_out = settings.get("json_out", record=False)
    if tie_policy not in ("shared", "first"):
        raise UsageError(f"--tie-policy must be shared or first, got {tie_policy!r}")

    system_lists = _load_ranked_tsv(ranked_path)
    judgments = load_judgments(judgments_path)
    by_sentence: dict[int, list] = {}
    for judgment in judgments:
        by_sentence.setdefault(judgment.sentence_index, []).append(judgment)
    human_lists = {index: human_rank(group) for index, group in sorted(by_sentence.items())}

    observed = {e.engine_id for entries in system_lists.values() for e in entries}
    observed |= {e.engine_id for entries in human_lists.values() for e in entries}
    try:
        category = _category_for(category_name, engines_csv, observed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    sentence_ids = sorted(set(system_lists) | set(human_lists))
    missing: list[str] = []
    for side, lists in (("system", system_lists), ("human", human_lists)):
        pairs = {(i, e.engine_id) for i, entries in lists.items() for e in entries}
        for index in sentence_ids:
            for engine in category.engines:
                if (index, engine) not in pairs:
                    missing.append(f"{side}:(sentence {index}, {engine})")
    if missing:
        raise DataError(f"coverage mismatch for category {category.name}: missing {', '.join(missing)}")

    system_counts = win_counts(system_lists, category, tie_policy)
    human_counts = win_counts(human_lists, category, tie_policy)
    report = build_report(category, system_counts, human_counts, tie_policy)

    rho = report["spearman_rho"]
    text_lines = settings.metadata_lines()
    text_lines.extend(render_win_table(category, system_counts, human_counts).splitlines())
    text_lines.append(f"Spearman rho: {'nan' if rho is None else format(rho, '.6f')}")
    if out:
        _write_text(out, text_lines)
    else:
        print("\n".join(text_lines))
    if json_out:
        payload = {"metadata": {k: str(v) for k, v in settings.echo.items()}}
        payload.update(report)
        _write_text(json_out, [json.dumps(payload, ensure_ascii=False, indent=2)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stemrank", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"stemrank {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    boolean = argparse.BooleanOptionalAction

    build = sub.add_parser("build-lm", help="build a trigram model file from a one-sentence-per-line corpus")
    build.add_argument("corpus", help="corpus file, one sentence per line")
    build.add_argument("--out", help="model file to write")
    build.add_argument("--stem", action=boolean, default=None, help="stem every sentence before counting")
    build.add_argument("--rules", help="suffix rule file (required with --stem)")
    build.add_argument("--lexicon", help="known-word lexicon file (required with --stem)")
    build.set_defaults(func=cmd_build_lm)

    stem_cmd = sub.add_parser("stem", help="stem sentences from stdin to stdout")
    stem_cmd.add_argument("--rules", help="suffix rule file")
    stem_cmd.add_argument("--lexicon", help="known-word lexicon file")
    stem_cmd.set_defaults(func=cmd_stem)

    rank = sub.add_parser("rank", help="rank candidate translations per source sentence")
    rank.add_argument("--source", help="source sentences, one per line")
    rank.add_argument("--manifest", help="engine manifest: engine_id<TAB>candidate-file per line")
    rank.add_argument("--source-model", help="source-language model file")
    rank.add_argument("--stem-model", help="stemmed target-language model file")
    rank.add_argument("--bilingual-lexicon", help="source-word to target-stems lexicon file")
    rank.add_argument("--rules", help="suffix rule file for stemming candidates")
    rank.add_argument("--lexicon", help="known-word lexicon file for stemming candidates")
    rank.add_argument("--out", help="ranked TSV output (default: stdout)")
    rank.add_argument("--explain", help="write a JSON-lines trace of retained/registered trigrams")
    rank.add_argument("--min-stem-matches", type=int, choices=(1, 2, 3), default=None)
    rank.add_argument("--normalize-by-trigram-count", action=boolean, default=None)
    rank.add_argument("--workers", type=int, default=None, help="sentences ranked in parallel (default 1)")
    rank.set_defaults(func=cmd_rank)

    evaluate = sub.add_parser("evaluate", help="compare system rankings with human judgments")
    evaluate.add_argument("--ranked", help="ranked TSV produced by the rank subcommand")
    evaluate.add_argument("--judgments", help="human judgments TSV")
    evaluate.add_argument("--category", choices=("combined", "web", "toolkit", "custom"), default=None)
    evaluate.add_argument("--engines", help="comma-separated engine ids for --category custom")
    evaluate.add_argument("--tie-policy", choices=("shared", "first"), default=None)
    evaluate.add_argument("--out", help="text report output (default: stdout)")
    evaluate.add_argument("--json-out", help="machine-readable JSON report output")
    evaluate.set_defaults(func=cmd_evaluate)

    for command in (build, stem_cmd, rank, evaluate):
        command.add_argument("--config", help="key = value settings file; flags override it")
        if command is not evaluate:
            command.add_argument("--strip-terminal-punct", action=boolean, default=None)
            command.add_argument("--punct-chars", help="characters split off token ends")
        if command in (build, rank):
            command.add_argument("--unigram-denominator", choices=("tokens", "vocabulary"), default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stemrank: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"stemrank: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"stemrank: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
