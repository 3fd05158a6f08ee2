"""Evaluation harness: three context-construction conditions over one QA set.

SHORT_CONTEXT hands the model only events from the last ``window``
seconds of the video. FULL_LOG hands it everything. TSG prunes the scene
graph per question and hands over just the retrieved slice. Every
question is answered by the configured backend, judged against gold, and
recorded with its token cost and compression; a failing backend call
marks that question incorrect with an error note instead of aborting the
sweep.

Token accounting prefers the backend's reported input token count and
falls back to the local estimate over context+question. Reports
(markdown, CSV, JSON) are byte-deterministic for a fixed config and a
deterministic backend; the config echo carries only semantic knobs, no
paths or wall-clock times.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .backend import AnswerRequest
from .errors import SegError
from .events import InteractionEvent
from .graph import TemporalSceneGraph, build_graph
from .narrative import estimate_tokens, verbalize
from .prune import PruneConfig, prune
from .synth import CATEGORIES, QAItem

SHORT_CONTEXT = "SHORT_CONTEXT"
FULL_LOG = "FULL_LOG"
TSG = "TSG"
CONDITIONS = (SHORT_CONTEXT, FULL_LOG, TSG)

DEFAULT_WINDOW = 30.0


@dataclass(frozen=True)
class EvalRow:
    question_id: str
    category: str
    condition: str
    question: str
    gold: str
    answer: str
    correct: bool
    tokens: int
    compression: float
    mode: str
    error: str | None = None


@dataclass(frozen=True)
class ConditionSummary:
    accuracy: float
    avg_tokens: float
    avg_compression: float


@dataclass(frozen=True)
class EvalReport:
    conditions: dict[str, ConditionSummary]
    categories: dict[str, dict[str, float]]
    rows: tuple[EvalRow, ...]
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "conditions": {
                cond: {"accuracy": s.accuracy, "avg_tokens": s.avg_tokens,
                       "avg_compression": s.avg_compression}
                for cond, s in self.conditions.items()
            },
            "categories": self.categories,
            "rows": [
                {"question_id": r.question_id, "category": r.category,
                 "condition": r.condition, "question": r.question,
                 "gold": r.gold, "answer": r.answer, "correct": r.correct,
                 "tokens": r.tokens, "compression": r.compression,
                 "mode": r.mode, "error": r.error}
                for r in self.rows
            ],
        }


@dataclass(frozen=True)
class _Prepared:
    context: str
    compression: float
    mode: str


def prepare_context(events: Sequence[InteractionEvent], condition: str,
                    question: str, *, graph: TemporalSceneGraph | None = None,
                    prune_cfg: PruneConfig | None = None,
                    window: float = DEFAULT_WINDOW,
                    t_max: float | None = None,
                    estimator: str = "bytes") -> _Prepared:
    """Build the context one condition would hand the backend for one question."""
    if condition == SHORT_CONTEXT:
        limit = _resolve_t_max(events, t_max) - window
        survivors = [e for e in events if e.timestamp >= limit]
        return _Prepared(context=verbalize(survivors, estimator).text,
                         compression=0.0, mode="-")
    if condition == FULL_LOG:
        return _Prepared(context=verbalize(list(events), estimator).text,
                         compression=0.0, mode="-")
    if condition == TSG:
        g = graph if graph is not None else build_graph(events)
        result = prune(g, question, prune_cfg or PruneConfig())
        return _Prepared(context=verbalize(result.events, estimator).text,
                         compression=result.compression, mode=result.mode)
    raise ValueError(f"unknown condition {condition!r}; choose from {CONDITIONS}")


def _resolve_t_max(events: Sequence[InteractionEvent],
                   t_max: float | None) -> float:
    if t_max is not None:
        return t_max
    return max((e.timestamp for e in events), default=0.0)


def run_eval(events: Sequence[InteractionEvent], qa: Sequence[QAItem],
             backend, judge, *, conditions: Sequence[str] = CONDITIONS,
             window: float = DEFAULT_WINDOW,
             prune_cfg: PruneConfig | None = None,
             t_max: float | None = None, estimator: str = "bytes",
             concurrency: int = 4, seed: int | None = None,
             backend_name: str = "?", judge_name: str = "?") -> EvalReport:
    """Answer and judge every question under every requested condition."""
    for condition in conditions:
        if condition not in CONDITIONS:
            raise ValueError(
                f"unknown condition {condition!r}; choose from {CONDITIONS}")
    prune_cfg = prune_cfg or PruneConfig()
    events = tuple(sorted(events, key=lambda e: (e.frame, e.seq)))
    resolved_t_max = _resolve_t_max(events, t_max)
    graph = build_graph(events) if TSG in conditions else None

    rows: list[EvalRow] = []
    for condition in conditions:
        shared: _Prepared | None = None
        if condition in (SHORT_CONTEXT, FULL_LOG):
            shared = prepare_context(events, condition, "", window=window,
                                     t_max=resolved_t_max, estimator=estimator)

        def run_one(item: tuple[int, QAItem],
                    condition: str = condition,
                    shared: _Prepared | None = shared) -> EvalRow:
            i, q = item
            qid = f"q{i:03d}"
            prep = shared if shared is not None else prepare_context(
                events, condition, q.question, graph=graph,
                prune_cfg=prune_cfg, window=window, t_max=resolved_t_max,
                estimator=estimator)
            answer_text = ""
            correct = False
            error: str | None = None
            tokens = estimate_tokens(prep.context + q.question, estimator)
            try:
                resp = backend.answer(AnswerRequest(context=prep.context,
                                                    question=q.question))
                answer_text = resp.answer
                if resp.reported_input_tokens is not None:
                    tokens = resp.reported_input_tokens
                correct = judge.judge(resp.answer, q.answer).correct
            except SegError as exc:
                error = f"{qid}: {type(exc).__name__}: {exc}"
            return EvalRow(question_id=qid, category=q.category,
                           condition=condition, question=q.question,
                           gold=q.answer, answer=answer_text, correct=correct,
                           tokens=tokens, compression=prep.compression,
                           mode=prep.mode, error=error)

        if concurrency > 1 and len(qa) > 1:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                rows.extend(pool.map(run_one, enumerate(qa)))
        else:
            rows.extend(run_one(item) for item in enumerate(qa))

    rows.sort(key=lambda r: (CONDITIONS.index(r.condition), r.question_id))

    summaries: dict[str, ConditionSummary] = {}
    categories: dict[str, dict[str, float]] = {}
    for condition in conditions:
        crows = [r for r in rows if r.condition == condition]
        n = max(len(crows), 1)
        summaries[condition] = ConditionSummary(
            accuracy=sum(r.correct for r in crows) / n,
            avg_tokens=sum(r.tokens for r in crows) / n,
            avg_compression=sum(r.compression for r in crows) / n)
        per_cat: dict[str, float] = {}
        for cat in CATEGORIES:
            cat_rows = [r for r in crows if r.category == cat]
            if cat_rows:
                per_cat[cat] = sum(r.correct for r in cat_rows) / len(cat_rows)
        categories[condition] = per_cat

    config = {
        "backend": backend_name,
        "judge": judge_name,
        "estimator": estimator,
        "tau": prune_cfg.tau,
        "use_stopwords": prune_cfg.use_stopwords,
        "window": window,
        "t_max": resolved_t_max,
        "seed": seed,
        "concurrency": concurrency,
        "conditions": list(conditions),
    }
    return EvalReport(conditions=summaries, categories=categories,
                      rows=tuple(rows), config=config)


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def render_report(report: EvalReport) -> tuple[str, str, str]:
    """(markdown, csv, json) renderings, all byte-deterministic."""
    md = io.StringIO()
    md.write("# Evaluation report\n\n")
    for key in ("backend", "judge", "estimator", "tau", "use_stopwords",
                "window", "t_max", "seed", "concurrency"):
        md.write(f"- {key}: {report.config.get(key)}\n")
    md.write("\n## Overall\n\n")
    md.write("| Condition | Accuracy | Avg tokens | Avg compression |\n")
    md.write("|---|---|---|---|\n")
    for cond in CONDITIONS:
        if cond not in report.conditions:
            continue
        s = report.conditions[cond]
        md.write(f"| {cond} | {_pct(s.accuracy)} | {s.avg_tokens:.1f} "
                 f"| {_pct(s.avg_compression)} |\n")

    listed = [c for c in CONDITIONS if c in report.conditions]
    md.write("\n## Accuracy by category\n\n")
    md.write("| Category | " + " | ".join(listed) + " |\n")
    md.write("|---" * (len(listed) + 1) + "|\n")
    for cat in CATEGORIES:
        cells = []
        for cond in listed:
            acc = report.categories.get(cond, {}).get(cat)
            cells.append(_pct(acc) if acc is not None else "-")
        md.write(f"| {cat} | " + " | ".join(cells) + " |\n")

    md.write("\n## Questions\n\n")
    md.write("| id | category | condition | verdict | tokens "
             "| compression | mode | error |\n")
    md.write("|---|---|---|---|---|---|---|---|\n")
    for r in report.rows:
        verdict = "correct" if r.correct else "incorrect"
        md.write(f"| {r.question_id} | {r.category} | {r.condition} "
                 f"| {verdict} | {r.tokens} | {r.compression:.4f} "
                 f"| {r.mode} | {r.error or '-'} |\n")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["question_id", "category", "condition", "question",
                     "answer", "gold", "verdict", "tokens", "compression",
                     "mode", "error"])
    for r in report.rows:
        writer.writerow([r.question_id, r.category, r.condition, r.question,
                         r.answer, r.gold,
                         "correct" if r.correct else "incorrect",
                         r.tokens, repr(r.compression), r.mode, r.error or ""])

    json_text = json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
    return md.getvalue(), buf.getvalue(), json_text


def write_report(report: EvalReport, out_dir: str) -> dict[str, str]:
    """Write report.md, report.csv, report.json under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    md, csv_text, json_text = render_report(report)
    paths = {
        "md": os.path.join(out_dir, "report.md"),
        "csv": os.path.join(out_dir, "report.csv"),
        "json": os.path.join(out_dir, "report.json"),
    }
    with open(paths["md"], "w", encoding="utf-8") as fh:
        fh.write(md)
    with open(paths["csv"], "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    with open(paths["json"], "w", encoding="utf-8") as fh:
        fh.write(json_text)
    return paths
