"""HTTP clients for the three external model services.

Wire protocol (JSON over HTTP):

    POST /parse     {"sentences": [...]}  -> CoNLL-U text body
    POST /score     {"sentences": [...]}  -> {"scores": [...]}     in [0, 1]
    POST /generate  {"inputs": [...]}     -> {"questions": [...]}  non-empty

All clients preserve order and cardinality or raise. Retried requests
reuse a client-generated ``X-Request-Id`` header so an idempotent server
can de-duplicate. Configuration keys (``parser_url``, ``scorer_url``,
``generator_url``, ``label_map_path``, ``bearer_token``) can be overridden
with ``DEFQUEST_PARSER_URL`` etc.
"""

import json
import os
import time
import uuid
from dataclasses import dataclass, replace

import httpx

from .depgraph import DependencyGraph, parse_conllu
from .errors import DataError, ProtocolError, ServiceError
from .selection import ScoredSentence

ENV_KEYS = {
    "parser_url": "DEFQUEST_PARSER_URL",
    "scorer_url": "DEFQUEST_SCORER_URL",
    "generator_url": "DEFQUEST_GENERATOR_URL",
    "label_map_path": "DEFQUEST_LABEL_MAP_PATH",
    "bearer_token": "DEFQUEST_BEARER_TOKEN",
}


@dataclass(frozen=True)
class ServiceEndpoint:
    base_url: str
    timeout: float = 30.0
    max_in_flight: int = 4
    retries: int = 2
    bearer_token: str | None = None

    def __post_init__(self):
        if self.timeout <= 0:
            raise DataError("timeout must be positive")
        if self.max_in_flight < 1:
            raise DataError("max_in_flight must be at least 1")


def load_service_config(path: str | None = None) -> dict:
    """Service URLs and options from a JSON config file plus env overrides."""
    config = {}
    if path:
        with open(path, encoding="utf-8") as f:
            config = json.load(f)
    for key, env in ENV_KEYS.items():
        if os.environ.get(env):
            config[key] = os.environ[env]
    return config


def load_label_map(source) -> dict[str, str]:
    text = source if isinstance(source, str) else source.read()
    mapping = json.loads(text)
    if not isinstance(mapping, dict):
        raise DataError("label map must be a JSON object")
    return mapping


def _post(endpoint: ServiceEndpoint, path: str, payload: dict, transport=None) -> httpx.Response:
    headers = {"X-Request-Id": str(uuid.uuid4())}
    if endpoint.bearer_token:
        headers["Authorization"] = f"Bearer {endpoint.bearer_token}"
    last_error = None
    for attempt in range(endpoint.retries + 1):
        try:
            with httpx.Client(
                base_url=endpoint.base_url, timeout=endpoint.timeout, transport=transport
            ) as client:
                response = client.post(path, json=payload, headers=headers)
            if response.status_code >= 500:
                last_error = ServiceError(f"{path}: HTTP {response.status_code}")
            elif response.status_code >= 400:
                raise ServiceError(f"{path}: HTTP {response.status_code}")
            else:
                return response
        except httpx.TimeoutException as exc:
            last_error = ServiceError(f"{path}: timeout after {endpoint.timeout}s")
            last_error.__cause__ = exc
        except httpx.HTTPError as exc:
            last_error = ServiceError(f"{path}: {exc}")
            last_error.__cause__ = exc
        if attempt < endpoint.retries:
            time.sleep(min(0.05 * (2**attempt), 1.0))
    raise last_error


def remote_parse(
    endpoint: ServiceEndpoint,
    sentences: list[str],
    label_map: dict[str, str] | None = None,
    transport=None,
) -> list[DependencyGraph]:
    if not sentences:
        raise DataError("empty batch")
    response = _post(endpoint, "/parse", {"sentences": sentences}, transport=transport)
    try:
        graphs = parse_conllu(response.text)
    except DataError as exc:
        raise ProtocolError(f"/parse returned malformed CoNLL-U: {exc}") from exc
    if len(graphs) != len(sentences):
        raise ProtocolError(
            f"/parse returned {len(graphs)} graphs for {len(sentences)} sentences"
        )
    if label_map:
        graphs = [
            DependencyGraph(
                sentence_id=g.sentence_id,
                tokens=tuple(
                    replace(t, deprel=label_map.get(t.deprel, t.deprel)) for t in g.tokens
                ),
                comments=g.comments,
            )
            for g in graphs
        ]
    return graphs


def remote_score(
    endpoint: ServiceEndpoint, sentences: list[str], transport=None
) -> list[float]:
    if not sentences:
        raise DataError("empty batch")
    response = _post(endpoint, "/score", {"sentences": sentences}, transport=transport)
    body = response.json()
    scores = body.get("scores")
    if not isinstance(scores, list) or len(scores) != len(sentences):
        raise ProtocolError(f"/score returned {scores!r} for {len(sentences)} sentences")
    for value in scores:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            raise ProtocolError(f"/score returned out-of-range value {value!r}")
    return [float(v) for v in scores]


def remote_generate(
    endpoint: ServiceEndpoint, inputs: list[str], transport=None
) -> list[str]:
    if not inputs:
        raise DataError("empty batch")
    response = _post(endpoint, "/generate", {"inputs": inputs}, transport=transport)
    body = response.json()
    questions = body.get("questions")
    if not isinstance(questions, list) or len(questions) != len(inputs):
        raise ProtocolError(f"/generate returned {len(questions or [])} questions for {len(inputs)} inputs")
    for q in questions:
        if not isinstance(q, str) or not q.strip():
            raise ProtocolError("/generate returned an empty question")
    return questions


class RemoteScorer:
    """selection.Scorer protocol over the /score endpoint."""

    def __init__(self, endpoint: ServiceEndpoint, transport=None):
        self.endpoint = endpoint
        self.transport = transport
        self.scorer_id = f"external:{endpoint.base_url}"

    def score_batch(self, sentences) -> list[ScoredSentence]:
        if not sentences:
            return []
        scores = remote_score(self.endpoint, [s.text for s in sentences], transport=self.transport)
        return [
            ScoredSentence(sentence_id=s.id, score=v, scorer_id=self.scorer_id)
            for s, v in zip(sentences, scores)
        ]
