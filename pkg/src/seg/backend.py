"""Answer and judge backends.

Two families behind one contract. The offline family (MockAnswerer,
ExactJudge, SubstringJudge) is deterministic and touches no network, so
the whole pipeline can run hermetically. The HTTP family speaks a thin
JSON protocol to any service you put behind it:

    POST <base>/v1/answer  {"context": str, "question": str}
        -> {"answer": str, "input_tokens": int?}
    POST <base>/v1/judge   {"predicted": str, "gold": str}
        -> {"correct": bool, "rationale": str?}

When the SEG_API_KEY environment variable is set, requests carry
``authorization: Bearer <key>``. Connection errors and 5xx responses are
retried with exponential backoff; 4xx and malformed bodies fail fast.

The mock answerer is a regex lookup over the narrative text. It handles
exactly four question shapes (start time, stop time, total duration,
what-next-after-ending) and falls back to "not present in clip", which
makes it a closed-book reader: it can only answer from the context it
was handed, exactly the property the evaluation needs.
"""

from __future__ import annotations

import os
import re
import time
from dataclasses import dataclass

import requests

from .errors import BackendError, MalformedResponseError
from .narrative import format_timestamp

NOT_PRESENT = "not present in clip"
API_KEY_ENV = "SEG_API_KEY"

_ID = r"[a-z0-9_]+-[0-9]+"

_LINE_RE = re.compile(
    r"^\[t=(?P<ts>[0-9.]+)s, frame (?P<frame>[0-9]+)\] "
    r"(?P<subject>" + _ID + r") (?P<verb>STARTED|ENDED) "
    r"interacting with (?P<object>" + _ID + r")\.$")

_Q_START = re.compile(
    r"^when did (" + _ID + r") (?:first )?start interacting with (" + _ID + r")\??$")
_Q_STOP = re.compile(
    r"^when did (" + _ID + r") (?:first )?stop interacting with (" + _ID + r")\??$")
_Q_DURATION = re.compile(
    r"^for how long did (" + _ID + r") interact with (" + _ID + r")(?: in total)?\??$")
_Q_AFTER = re.compile(
    r"^what did (" + _ID + r") start interacting with (?:right )?after ending with ("
    + _ID + r")\??$")


@dataclass(frozen=True)
class AnswerRequest:
    context: str
    question: str

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("question must be non-empty")


@dataclass(frozen=True)
class AnswerResponse:
    answer: str
    reported_input_tokens: int | None = None
    latency: float | None = None


@dataclass(frozen=True)
class Verdict:
    correct: bool
    rationale: str | None = None


@dataclass(frozen=True)
class _Mention:
    ts: float
    subject: str
    verb: str
    object: str


def _parse_lines(context: str) -> list[_Mention]:
    out = []
    for line in context.splitlines():
        m = _LINE_RE.match(line)
        if m:
            out.append(_Mention(ts=float(m.group("ts")),
                                subject=m.group("subject"),
                                verb=m.group("verb"),
                                object=m.group("object")))
    return out


class MockAnswerer:
    """Deterministic closed-book reader over the narrative template."""

    def answer(self, req: AnswerRequest) -> AnswerResponse:
        mentions = _parse_lines(req.context)
        q = req.question.strip().lower()

        m = _Q_START.match(q)
        if m:
            return AnswerResponse(self._first_ts(mentions, m[1], m[2], "STARTED"))
        m = _Q_STOP.match(q)
        if m:
            return AnswerResponse(self._first_ts(mentions, m[1], m[2], "ENDED"))
        m = _Q_DURATION.match(q)
        if m:
            return AnswerResponse(self._total_duration(mentions, m[1], m[2]))
        m = _Q_AFTER.match(q)
        if m:
            return AnswerResponse(self._next_after(mentions, m[1], m[2]))
        return AnswerResponse(NOT_PRESENT)

    @staticmethod
    def _first_ts(mentions: list[_Mention], subj: str, obj: str, verb: str) -> str:
        for mn in mentions:
            if mn.subject == subj and mn.object == obj and mn.verb == verb:
                return f"t={format_timestamp(mn.ts)}s"
        return NOT_PRESENT

    @staticmethod
    def _total_duration(mentions: list[_Mention], subj: str, obj: str) -> str:
        total = 0.0
        start: float | None = None
        seen = False
        for mn in mentions:
            if mn.subject != subj or mn.object != obj:
                continue
            if mn.verb == "STARTED":
                start = mn.ts
            elif start is not None:
                total += mn.ts - start
                start = None
                seen = True
        if not seen:
            return NOT_PRESENT
        return f"{format_timestamp(total)}s"

    @staticmethod
    def _next_after(mentions: list[_Mention], subj: str, obj: str) -> str:
        ended = False
        for mn in mentions:
            if not ended:
                if mn.subject == subj and mn.object == obj and mn.verb == "ENDED":
                    ended = True
            elif mn.subject == subj and mn.verb == "STARTED":
                return mn.object
        return NOT_PRESENT


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


class ExactJudge:
    """Case- and whitespace-insensitive equality."""

    def judge(self, predicted: str, gold: str) -> Verdict:
        return Verdict(correct=_normalize(predicted) == _normalize(gold))


class SubstringJudge:
    """Correct when the normalized gold appears inside the prediction."""

    def judge(self, predicted: str, gold: str) -> Verdict:
        return Verdict(correct=_normalize(gold) in _normalize(predicted))


class _HttpClient:
    def __init__(self, base_url: str, timeout: float = 60.0,
                 max_retries: int = 3, backoff_base: float = 0.5) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._session = requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"content-type": "application/json"}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["authorization"] = f"Bearer {key}"
        return headers

    def post(self, path: str, body: dict) -> dict:
        url = f"{self.base_url}{path}"
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                resp = self._session.post(url, json=body,
                                          headers=self._headers(),
                                          timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = BackendError(
                    f"{url} returned {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise BackendError(
                    f"{url} returned {resp.status_code}: {resp.text[:200]}")
            try:
                doc = resp.json()
            except ValueError as exc:
                raise MalformedResponseError(
                    f"{url} returned a non-JSON body") from exc
            if not isinstance(doc, dict):
                raise MalformedResponseError(
                    f"{url} returned {type(doc).__name__}, expected an object")
            return doc
        raise BackendError(
            f"{url} unreachable after {self.max_retries + 1} attempts: {last_error}")


class HttpBackend:
    """Answer backend speaking the /v1/answer wire protocol."""

    def __init__(self, base_url: str, timeout: float = 60.0,
                 max_retries: int = 3, backoff_base: float = 0.5) -> None:
        self._client = _HttpClient(base_url, timeout, max_retries, backoff_base)

    def answer(self, req: AnswerRequest) -> AnswerResponse:
        t0 = time.monotonic()
        doc = self._client.post("/v1/answer",
                                {"context": req.context, "question": req.question})
        if "answer" not in doc or not isinstance(doc["answer"], str):
            raise MalformedResponseError(
                "answer response missing string field 'answer'")
        tokens = doc.get("input_tokens")
        if tokens is not None and (not isinstance(tokens, int) or isinstance(tokens, bool)):
            raise MalformedResponseError("'input_tokens' must be an integer")
        return AnswerResponse(answer=doc["answer"],
                              reported_input_tokens=tokens,
                              latency=time.monotonic() - t0)


class HttpJudge:
    """Judge backend speaking the /v1/judge wire protocol."""

    def __init__(self, base_url: str, timeout: float = 60.0,
                 max_retries: int = 3, backoff_base: float = 0.5) -> None:
        self._client = _HttpClient(base_url, timeout, max_retries, backoff_base)

    def judge(self, predicted: str, gold: str) -> Verdict:
        doc = self._client.post("/v1/judge",
                                {"predicted": predicted, "gold": gold})
        if "correct" not in doc or not isinstance(doc["correct"], bool):
            raise MalformedResponseError(
                "judge response missing boolean field 'correct'")
        rationale = doc.get("rationale")
        if rationale is not None and not isinstance(rationale, str):
            raise MalformedResponseError("'rationale' must be a string")
        return Verdict(correct=doc["correct"], rationale=rationale)


def _is_url(spec: str) -> bool:
    return spec.startswith("http://") or spec.startswith("https://")


def make_answerer(spec: str, timeout: float = 60.0, max_retries: int = 3,
                  backoff_base: float = 0.5):
    """'mock' or a backend base URL."""
    if spec == "mock":
        return MockAnswerer()
    if _is_url(spec):
        return HttpBackend(spec, timeout=timeout, max_retries=max_retries,
                           backoff_base=backoff_base)
    raise ValueError(f"unknown answer backend {spec!r} (use 'mock' or an http(s) URL)")


def make_judge(spec: str, timeout: float = 60.0, max_retries: int = 3,
               backoff_base: float = 0.5):
    """'exact', 'substring', or a judge base URL."""
    if spec == "exact":
        return ExactJudge()
    if spec == "substring":
        return SubstringJudge()
    if _is_url(spec):
        return HttpJudge(spec, timeout=timeout, max_retries=max_retries,
                         backoff_base=backoff_base)
    raise ValueError(
        f"unknown judge {spec!r} (use 'exact', 'substring', or an http(s) URL)")


def answer(req: AnswerRequest, backend) -> AnswerResponse:
    return backend.answer(req)


def judge(predicted: str, gold: str, judge_impl) -> Verdict:
    return judge_impl.judge(predicted, gold)
