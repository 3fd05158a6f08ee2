"""Symbolic interaction-event indexing for long videos.

Pipeline: parse a detection log, extract START/END proximity events,
index them as a temporal scene graph, prune per query, verbalize, and
answer questions through a pluggable backend with token accounting.
"""

from .backend import (AnswerRequest, AnswerResponse, ExactJudge, HttpBackend,
                      HttpJudge, MockAnswerer, SubstringJudge, Verdict,
                      make_answerer, make_judge)
from .detlog import (Detection, DetectionLog, FrameRecord, VideoMeta,
                     detection_log_to_json, load_detection_log,
                     parse_detection_log, render_detection_log)
from .errors import (AlternationError, BackendError, DataError,
                     FrameOrderError, IdentityConflictError,
                     InfeasibleSpecError, MalformedResponseError, SchemaError,
                     SegError, UndefinedScoreError)
from .events import (ExtractionConfig, InteractionEvent, events_from_json,
                     events_to_json, extract_events, load_events)
from .graph import (EventEdge, EntityNode, TemporalSceneGraph, build_graph,
                    export_dot)
from .harness import (CONDITIONS, EvalReport, EvalRow, prepare_context,
                      render_report, run_eval, write_report)
from .narrative import (Interval, Narrative, estimate_tokens, format_timestamp,
                        pair_intervals, verbalize)
from .prune import (PruneConfig, PruneResult, QueryTokens, event_tokens,
                    find_anchors, lexical_score, prune, tokenize)
from .synth import (GeneratedScenario, PlantedInteraction, QAItem,
                    ScenarioSpec, generate, plan_gold_events, random_spec,
                    standard_scenario, write_scenario)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
