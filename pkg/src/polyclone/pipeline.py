"""Per-file pipeline: read, preprocess, parse, simplify, extract bags.

The CLI runs this over a worker pool; results are merged in path order so
output never depends on scheduling.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AdapterUnavailable, EmptyAfterFiltering, LexFailure
from .frontend import (
    LanguageConfig,
    degraded_outcome,
    file_level_bag,
    parse_file,
    preprocess,
    read_source,
)
from .spt import SimplifyConfig, simplify
from .tokenbag import TokenBag

PARSED = "parsed"
DEGRADED = "degraded"
SKIPPED = "skipped"


@dataclass(frozen=True)
class PipelineSettings:
    m_size: int = 20
    min_tokens: int = 20
    keyword_filter: bool = False
    max_granularity: int | None = 4


@dataclass
class FileResult:
    rel_path: str
    status: str
    bags: list[TokenBag] = field(default_factory=list)
    recovered_errors: int = 0
    reason: str = ""


def process_file(
    path: Path,
    rel_path: str,
    cfg: LanguageConfig,
    settings: PipelineSettings,
    config_dir: str | None = None,
) -> FileResult:
    try:
        raw = read_source(path)
    except LexFailure as exc:
        return FileResult(rel_path, SKIPPED, reason=str(exc))
    text = preprocess(raw, cfg)

    try:
        outcome = parse_file(text, cfg, config_dir)
    except AdapterUnavailable:
        outcome = degraded_outcome(text, cfg)
    if not outcome.tokens:
        return FileResult(rel_path, SKIPPED, reason="no tokens")

    recovered = sum(1 for e in outcome.error_report if e.recovered)
    if outcome.degraded:
        try:
            bag = file_level_bag(outcome, rel_path)
        except EmptyAfterFiltering:
            return FileResult(rel_path, DEGRADED, recovered_errors=recovered,
                              reason="no retained tokens")
        bags = [bag] if bag.size >= settings.min_tokens else []
        return FileResult(rel_path, DEGRADED, bags=bags, recovered_errors=recovered)

    root = simplify(outcome.tree, outcome.tokens, SimplifyConfig(settings.m_size))
    if root.file_level_only:
        try:
            bag = file_level_bag(outcome, rel_path)
        except EmptyAfterFiltering:
            return FileResult(rel_path, PARSED, recovered_errors=recovered)
        bags = [bag] if bag.size >= settings.min_tokens else []
        return FileResult(rel_path, PARSED, bags=bags, recovered_errors=recovered)

    bags = _generate(root, outcome, rel_path, cfg, settings)
    return FileResult(rel_path, PARSED, bags=bags, recovered_errors=recovered)


def _generate(root, outcome, rel_path, cfg, settings) -> list[TokenBag]:
    from .tokenbag import generate_bags

    return generate_bags(
        root,
        outcome.tokens,
        rel_path,
        keywords=cfg.keywords if settings.keyword_filter else None,
        min_tokens=settings.min_tokens,
        max_granularity=settings.max_granularity,
    )


def discover_files(input_dir: Path, cfg: LanguageConfig) -> list[tuple[Path, str]]:
    """All files under input_dir with one of the language's extensions."""
    found: list[tuple[Path, str]] = []
    for path in sorted(input_dir.rglob("*")):
        if path.is_file() and path.suffix.lower() in cfg.file_extensions:
            found.append((path, path.relative_to(input_dir).as_posix()))
    return found


# ---------------------------------------------------------------------------
# Worker pool
# ---------------------------------------------------------------------------

_worker_cfg: LanguageConfig | None = None
_worker_settings: PipelineSettings | None = None
_worker_config_dir: str | None = None


def _init_worker(cfg: LanguageConfig, settings: PipelineSettings, config_dir: str | None) -> None:
    global _worker_cfg, _worker_settings, _worker_config_dir
    _worker_cfg = cfg
    _worker_settings = settings
    _worker_config_dir = config_dir


def _run_one(task: tuple[str, str]) -> FileResult:
    path, rel = task
    assert _worker_cfg is not None and _worker_settings is not None
    return process_file(Path(path), rel, _worker_cfg, _worker_settings, _worker_config_dir)


def process_files(
    files: list[tuple[Path, str]],
    cfg: LanguageConfig,
    settings: PipelineSettings,
    config_dir: str | None = None,
    jobs: int = 1,
) -> list[FileResult]:
    """Process files, preserving input (path) order in the result list."""
    if jobs <= 1 or len(files) < 2:
        return [process_file(p, rel, cfg, settings, config_dir) for p, rel in files]
    tasks = [(str(p), rel) for p, rel in files]
    with multiprocessing.Pool(
        processes=jobs, initializer=_init_worker, initargs=(cfg, settings, config_dir)
    ) as pool:
        results = pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (jobs * 8)))
    return results
