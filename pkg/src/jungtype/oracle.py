"""Coordination oracles: a deterministic scripted one and an LLM-backed one.

The engine consults an oracle at five points: whether the pair handles a
question, which function compensates on failure, which auxiliary pairs with
a reorganized dominant, whether a proposed rewrite is approved, and which
pole answers a questionnaire item.  The scripted oracle resolves all five
from its construction arguments and is fully deterministic.  The LLM oracle
renders file templates into an OpenAI-compatible chat completion request,
expects the answer label alone on the first reply line, and retries with a
format reminder when parsing fails.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Protocol, Sequence

import httpx

from .typology import CANONICAL_ORDER, PsychFunction

if TYPE_CHECKING:  # annotation-only imports, no runtime cycle
    from .adaptation import EpisodeStep, ReflectionEvent
    from .evaluation import QuestionnaireItem
    from .weights import WeightProfile

DEFAULT_MEMORY_WINDOW = 15
DEFAULT_TEMPERATURE = 0.6

FUNCTION_TRAITS: dict[PsychFunction, str] = {
    PsychFunction.TI: "internally consistent logical analysis",
    PsychFunction.NE: "exploration of emerging possibilities and associations",
    PsychFunction.SI: "careful recall of concrete precedent and routine",
    PsychFunction.FE: "attunement to shared feeling and group harmony",
    PsychFunction.TE: "organized external execution and efficiency",
    PsychFunction.NI: "convergent foresight toward an underlying pattern",
    PsychFunction.SE: "direct engagement with immediate sensory detail",
    PsychFunction.FI: "fidelity to inner values and personal authenticity",
}


class RequestKind(Enum):
    HANDLE = "handle"
    COMPENSATE = "compensate"
    CHOOSE_AUXILIARY = "choose_auxiliary"
    APPROVE_REWRITE = "approve_rewrite"
    ANSWER_ITEM = "answer_item"


class Directive(Enum):
    DOMINANT_ONLY = "dominant-only"
    AUXILIARY_ONLY = "auxiliary-only"
    BOTH = "both"


@dataclass(frozen=True)
class OracleRequest:
    kind: RequestKind
    profile: "WeightProfile"
    text: str = ""
    directive: Directive = Directive.BOTH
    memory: tuple["EpisodeStep", ...] = ()
    choices: tuple[PsychFunction, ...] | None = None
    proposal: tuple[Any, Any, Any] | None = None  # (ShiftKind, before, after)
    item: "QuestionnaireItem | None" = None


@dataclass(frozen=True)
class OracleResponse:
    handled_by: PsychFunction | None = None
    success: bool | None = None
    function: PsychFunction | None = None
    approved: bool | None = None
    choice: str | None = None
    rationale: str = ""


class Oracle(Protocol):
    def respond(self, request: OracleRequest) -> OracleResponse: ...


class OracleError(Exception):
    """Base for oracle-layer failures."""


class TransportError(OracleError):
    """Network or HTTP-status failure talking to the endpoint."""


class OracleTimeout(OracleError):
    """The endpoint did not answer within the configured timeout."""


class ParseFailure(OracleError):
    """No parseable label after exhausting the retry budget."""


@dataclass
class ScriptedOracle:
    """Deterministic oracle driven by a single target function.

    Coordination succeeds exactly when the target sits in the pair, and the
    target itself is named handler or compensator.  Approvals follow the
    policy: "always", "never", or a sequence of booleans consumed in order.
    Questionnaire items are answered with the pole matching the profile's
    type letter, flipped for item ids in `flip_items`.
    """

    target: PsychFunction
    approvals: str | Sequence[bool] = "always"
    flip_items: frozenset = frozenset()
    _approval_cursor: int = field(default=0, repr=False)

    def _next_approval(self) -> bool:
        if self.approvals == "always":
            return True
        if self.approvals == "never":
            return False
        value = bool(self.approvals[self._approval_cursor])
        self._approval_cursor += 1
        return value

    def respond(self, request: OracleRequest) -> OracleResponse:
        profile = request.profile
        if request.kind is RequestKind.HANDLE:
            pair = (profile.dominant, profile.auxiliary)
            if self.target in pair:
                return OracleResponse(handled_by=self.target, success=True)
            return OracleResponse(handled_by=profile.dominant, success=False)
        if request.kind is RequestKind.COMPENSATE:
            return OracleResponse(function=self.target)
        if request.kind is RequestKind.CHOOSE_AUXILIARY:
            assert request.choices
            best = max(
                request.choices,
                key=lambda fn: (profile.base[fn], -CANONICAL_ORDER.index(fn)),
            )
            return OracleResponse(function=best)
        if request.kind is RequestKind.APPROVE_REWRITE:
            return OracleResponse(approved=self._next_approval())
        if request.kind is RequestKind.ANSWER_ITEM:
            item = request.item
            assert item is not None
            letter = profile.mbti.letter(item.dimension)
            choice = "A" if item.pole_a == letter else "B"
            if item.id in self.flip_items:
                choice = "B" if choice == "A" else "A"
            return OracleResponse(choice=choice)
        raise ValueError(f"unhandled request kind: {request.kind}")


def answer_questionnaire_item(
    profile: "WeightProfile", item: "QuestionnaireItem", oracle: Oracle
) -> str:
    """Choice label for one item.  Never mutates the profile."""
    resp = oracle.respond(OracleRequest(kind=RequestKind.ANSWER_ITEM, profile=profile, item=item))
    if resp.choice not in ("A", "B"):
        raise ParseFailure(f"oracle returned non-binary choice {resp.choice!r}")
    return resp.choice


@dataclass
class RateLimiter:
    """Token bucket; acquire() blocks until a token is available."""

    rate_per_second: float
    capacity: float = 1.0
    _tokens: float = field(default=0.0, repr=False)
    _last: float = field(default=0.0, repr=False)

    def acquire(self) -> None:
        now = time.monotonic()
        if self._last == 0.0:
            self._tokens = self.capacity
        else:
            self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate_per_second)
        self._last = now
        if self._tokens < 1.0:
            wait = (1.0 - self._tokens) / self.rate_per_second
            time.sleep(wait)
            self._tokens = 1.0
            self._last = time.monotonic()
        self._tokens -= 1.0


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str
    api_key_env: str = "JUNGTYPE_API_KEY"
    temperature: float = DEFAULT_TEMPERATURE
    timeout: float = 30.0
    retries: int = 2
    memory_window: int = DEFAULT_MEMORY_WINDOW
    template_dir: str | None = None
    requests_per_second: float | None = None


Transport = Callable[[dict], dict]


def _default_transport(config: EndpointConfig) -> Transport:
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(config.api_key_env, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    url = config.base_url.rstrip("/") + "/chat/completions"

    def post(payload: dict) -> dict:
        try:
            response = httpx.post(url, json=payload, headers=headers, timeout=config.timeout)
        except httpx.TimeoutException as exc:
            raise OracleTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise TransportError(f"endpoint returned HTTP {response.status_code}")
        return response.json()

    return post


def _template_text(name: str, template_dir: str | None) -> str:
    if template_dir is not None:
        return (Path(template_dir) / name).read_text(encoding="utf-8")
    from importlib.resources import files

    return files("jungtype").joinpath("templates", name).read_text(encoding="utf-8")


_TEMPLATE_BY_KIND = {
    RequestKind.HANDLE: "handle.txt",
    RequestKind.COMPENSATE: "compensate.txt",
    RequestKind.CHOOSE_AUXILIARY: "choose_auxiliary.txt",
    RequestKind.APPROVE_REWRITE: "approve_rewrite.txt",
    RequestKind.ANSWER_ITEM: "answer_item.txt",
}


def render_function_weights(profile: "WeightProfile") -> str:
    lines = []
    for fn in CANONICAL_ORDER:
        role = ""
        if fn is profile.dominant:
            role = " [dominant]"
        elif fn is profile.auxiliary:
            role = " [auxiliary]"
        lines.append(f"- {fn.value}{role}: weight {profile.base[fn]:.4f}, {FUNCTION_TRAITS[fn]}")
    return "\n".join(lines)


def _directive_text(request: OracleRequest) -> str:
    dom = request.profile.dominant.value
    aux = request.profile.auxiliary.value
    if request.directive is Directive.DOMINANT_ONLY:
        return f"Rely on your dominant {dom} alone."
    if request.directive is Directive.AUXILIARY_ONLY:
        return f"Rely on your auxiliary {aux} alone."
    return f"Coordinate your dominant {dom} and auxiliary {aux}, singly or together."


def _memory_text(request: OracleRequest) -> str:
    if not request.memory:
        return "(no prior steps)"
    lines = []
    for s in request.memory:
        lines.append(f"Q{s.question_index}: {s.outcome.value}, reinforced {s.boosted.value}")
    return "\n".join(lines)


def build_messages(request: OracleRequest, config: EndpointConfig) -> list[dict]:
    system = _template_text("persona_system.txt", config.template_dir).format(
        function_weights=render_function_weights(request.profile),
        dominant=request.profile.dominant.value,
        auxiliary=request.profile.auxiliary.value,
        directive=_directive_text(request),
    )
    question = request.text
    if request.kind is RequestKind.ANSWER_ITEM and request.item is not None:
        question = (
            f"{request.item.text}\n"
            f"A) {request.item.pole_a}-leaning response\n"
            f"B) {request.item.pole_b}-leaning response"
        )
    choices = ""
    if request.choices:
        choices = ", ".join(fn.value for fn in request.choices)
    proposal = ""
    if request.proposal is not None:
        kind, before, after = request.proposal
        proposal = (
            f"{kind.value}: {before.dominant.value}/{before.auxiliary.value}"
            f" ({before.mbti.value}) -> {after.dominant.value}/{after.auxiliary.value}"
            f" ({after.mbti.value})"
        )
    user = _template_text(_TEMPLATE_BY_KIND[request.kind], config.template_dir).format(
        question=question,
        dominant=request.profile.dominant.value,
        auxiliary=request.profile.auxiliary.value,
        directive=_directive_text(request),
        function_weights=render_function_weights(request.profile),
        choices=choices,
        proposal=proposal,
        memory=_memory_text(request),
    )
    return [{"role": "system", "content": system}, {"role": "user", "content": user}]


def _expected_labels(request: OracleRequest) -> list[str]:
    profile = request.profile
    if request.kind is RequestKind.HANDLE:
        return [profile.dominant.value, profile.auxiliary.value, "None"]
    if request.kind is RequestKind.COMPENSATE:
        return [fn.value for fn in CANONICAL_ORDER]
    if request.kind is RequestKind.CHOOSE_AUXILIARY:
        assert request.choices
        return [fn.value for fn in request.choices]
    if request.kind is RequestKind.APPROVE_REWRITE:
        return ["Approve", "Decline"]
    return ["A", "B"]


def _parse_reply(request: OracleRequest, content: str) -> OracleResponse:
    lines = content.strip().splitlines()
    first = lines[0].strip().rstrip(".") if lines else ""
    rationale = "\n".join(lines[1:]).strip()
    lowered = {label.lower(): label for label in _expected_labels(request)}
    if first.lower() not in lowered:
        raise ParseFailure(f"first line {first!r} is not one of {sorted(lowered.values())}")
    label = lowered[first.lower()]
    if request.kind is RequestKind.HANDLE:
        if label == "None":
            return OracleResponse(handled_by=None, success=False, rationale=rationale)
        return OracleResponse(handled_by=PsychFunction.parse(label), success=True, rationale=rationale)
    if request.kind in (RequestKind.COMPENSATE, RequestKind.CHOOSE_AUXILIARY):
        return OracleResponse(function=PsychFunction.parse(label), rationale=rationale)
    if request.kind is RequestKind.APPROVE_REWRITE:
        return OracleResponse(approved=label == "Approve", rationale=rationale)
    return OracleResponse(choice=label, rationale=rationale)


def llm_complete(
    request: OracleRequest, config: EndpointConfig, transport: Transport | None = None
) -> OracleResponse:
    """One oracle exchange: render, post, parse, retrying on malformed replies."""
    if transport is None:
        transport = _default_transport(config)
    messages = build_messages(request, config)
    reminder = _template_text("format_reminder.txt", config.template_dir).format(
        labels=" | ".join(_expected_labels(request))
    )
    last_error: ParseFailure | None = None
    for _ in range(config.retries + 1):
        payload = {"model": config.model, "messages": messages, "temperature": config.temperature}
        body = transport(payload)
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion body: {exc}") from exc
        try:
            return _parse_reply(request, content)
        except ParseFailure as exc:
            last_error = exc
            messages = messages + [
                {"role": "assistant", "content": content},
                {"role": "user", "content": reminder},
            ]
    assert last_error is not None
    raise last_error


@dataclass
class LlmOracle:
    """Oracle backed by an OpenAI-compatible chat-completions endpoint."""

    config: EndpointConfig
    transport: Transport | None = None
    limiter: RateLimiter | None = None

    def __post_init__(self) -> None:
        if self.limiter is None and self.config.requests_per_second:
            self.limiter = RateLimiter(self.config.requests_per_second)

    def respond(self, request: OracleRequest) -> OracleResponse:
        if self.limiter is not None:
            self.limiter.acquire()
        return llm_complete(request, self.config, self.transport)
