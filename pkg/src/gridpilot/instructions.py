"""Instruction dissection and parsing into action sequences.

The rule-based path is fully deterministic: an instruction is split into
clauses, each clause is classified (goal phrase, constraint, standalone
action keyword), landmark phrases are normalized against the registry,
and the resulting actions are emitted in canonical order (resets, cost
modifications, goal). A remote text-generation backend can replace the
rules, but its output is never trusted: it always goes through the strict
payload decoder plus landmark validation, with one retry on a schema
error.
"""

import json
import os
import re
import urllib.error
import urllib.request
from dataclasses import dataclass

from .actions import (
    ActionSequence,
    AvoidAreas,
    ModifyCost,
    PreferAreas,
    ResetMap,
    SetGoal,
    decode_action_payload,
    encode_action_sequence,
)
from .errors import BackendUnavailable, NoTaskFound, SchemaViolation, UnknownLandmark

GOAL_VERBS = ("navigate to", "go to", "return to", "head to", "move to", "proceed to", "drive to")
AVOID_MARKERS = ("avoiding", "avoid", "stay away from", "keep away from", "keep out of", "steer clear of")
PREFER_MARKERS = ("preferring", "prefer", "using", "use", "utilizing", "utilize", "take", "stick to", "keep to")
RESET_PHRASES = ("reset the map", "reset map", "reset")
PEDESTRIAN_PATTERN = re.compile(
    r"(maintain|maintaining|keep|keeping)\b.*(distance|away|clear).*(pedestrian|people|worker)",
    re.IGNORECASE,
)

PAYLOAD_SCHEMA_DESCRIPTION = """\
Respond with ONLY a JSON array of action objects, no prose. Each object is one of:
  {"action": "RESET_MAP"}
  {"action": "SET_GOAL", "target": <landmark-name or [x, y]>}
  {"action": "AVOID_AREAS", "region": <landmark-name or {"rect": [x0, y0, x1, y1]}>}
  {"action": "PREFER_AREAS", "region": <landmark-name or {"rect": [x0, y0, x1, y1]}>}
  {"action": "MODIFY_COST", "region": <ref>, "value": <number or "BLOCKED">, "mode": "set" or "add"}
Unknown action names and extra keys are rejected."""


@dataclass(frozen=True)
class InstructionParts:
    """The dissected instruction: goal phrase, action keywords, constraint phrases."""

    task: str = None
    action_format: tuple = ()
    semantic_constraints: tuple = ()


@dataclass(frozen=True)
class NluRequest:
    text: str
    landmark_names: tuple
    schema_description: str = PAYLOAD_SCHEMA_DESCRIPTION


_CLAUSE_SPLIT = re.compile(r",|;|\.\s|\band\b|\bthen\b|\bwhile\b", re.IGNORECASE)


def _clauses(text):
    parts = [p.strip(" .!") for p in _CLAUSE_SPLIT.split(text)]
    return [p for p in parts if p]


def classify_constraint(clause):
    """Classify one clause as ('avoid'|'prefer'|'pedestrian', phrase) or (None, None)."""
    lowered = clause.lower()
    if PEDESTRIAN_PATTERN.search(clause):
        return "pedestrian", clause
    for marker in AVOID_MARKERS:
        if lowered.startswith(marker + " "):
            return "avoid", clause[len(marker):].strip()
    for marker in PREFER_MARKERS:
        if lowered.startswith(marker + " "):
            return "prefer", clause[len(marker):].strip()
    return None, None


def dissect(text):
    """Split an instruction into task, action keywords, and constraint phrases."""
    if not text or not text.strip():
        raise NoTaskFound("empty instruction")
    task = None
    action_format = []
    constraints = []
    for clause in _clauses(text):
        lowered = clause.lower()
        matched = False
        for verb in GOAL_VERBS:
            if lowered.startswith(verb + " "):
                if task is None:
                    task = clause
                    action_format.append("SET_GOAL")
                matched = True
                break
        if matched:
            continue
        if lowered in RESET_PHRASES:
            action_format.append("RESET_MAP")
            continue
        kind, _ = classify_constraint(clause)
        if kind == "pedestrian":
            constraints.append(clause)
            action_format.append("MODIFY_COST")
        elif kind == "avoid":
            constraints.append(clause)
            action_format.append("AVOID_AREAS")
        elif kind == "prefer":
            constraints.append(clause)
            action_format.append("PREFER_AREAS")
        # unmatched clauses carry no recognized intent and are ignored
    if task is None and not action_format:
        raise NoTaskFound(f"no goal verb or action keyword in {text!r}", text=text)
    return InstructionParts(
        task=task,
        action_format=tuple(dict.fromkeys(action_format)),
        semantic_constraints=tuple(constraints),
    )


_ARTICLES = ("the ", "a ", "an ")


def normalize_landmark_phrase(phrase):
    """Lowercase, drop articles, collapse separators: 'the Repair Area' -> 'repair_area'."""
    p = phrase.strip().strip(".!?,").lower()
    for art in _ARTICLES:
        if p.startswith(art):
            p = p[len(art):]
    p = re.sub(r"[\s\-]+", "_", p.strip())
    return p


def _resolve_phrase(phrase, registry):
    """Resolve a landmark phrase, trimming trailing words until a name matches."""
    name = normalize_landmark_phrase(phrase)
    while name:
        if registry.get(name) is not None:
            return name
        if "_" not in name:
            break
        name = name.rsplit("_", 1)[0]
    raise UnknownLandmark(f"no landmark matches {phrase.strip()!r}", phrase=phrase.strip())


def _rules_to_actions(parts, registry):
    """Map dissected parts to actions; landmark phrases must resolve."""
    actions = []
    if "RESET_MAP" in parts.action_format:
        actions.append(ResetMap())
    for constraint in parts.semantic_constraints:
        kind, phrase = classify_constraint(constraint)
        if kind == "avoid":
            actions.append(AvoidAreas(region=_resolve_phrase(phrase, registry)))
        elif kind == "prefer":
            actions.append(PreferAreas(region=_resolve_phrase(phrase, registry)))
        # pedestrian constraints become an episode flag, not a wire action
    if parts.task is not None:
        lowered = parts.task.lower()
        for verb in GOAL_VERBS:
            if lowered.startswith(verb + " "):
                actions.append(SetGoal(target=_resolve_phrase(parts.task[len(verb):], registry)))
                break
    return actions


def wants_pedestrian_buffer(text):
    return any(PEDESTRIAN_PATTERN.search(clause) for clause in _clauses(text))


class RuleBasedBackend:
    """Deterministic built-in parser; emits the canonical payload format."""

    name = "rule"
    supports_retry = False

    def generate(self, request, registry, note=None):
        parts = dissect(request.text)
        actions = _rules_to_actions(parts, registry)
        return encode_action_sequence(actions)


class ReplayBackend:
    """Fixture-backed backend: replays recorded payloads keyed by instruction text."""

    supports_retry = False

    def __init__(self, recordings, name="replay"):
        self.recordings = dict(recordings)
        self.name = name

    @classmethod
    def from_file(cls, path, name=None):
        with open(path, encoding="utf-8") as fh:
            recordings = json.load(fh)
        return cls(recordings, name=name or os.path.splitext(os.path.basename(path))[0])

    def generate(self, request, registry, note=None):
        payload = self.recordings.get(request.text)
        if payload is None:
            raise BackendUnavailable(
                f"no recorded payload for instruction {request.text!r}", instruction=request.text
            )
        return payload if isinstance(payload, str) else json.dumps(payload)


class RemoteBackend:
    """HTTP text-generation backend (request body: {model, prompt, temperature})."""

    supports_retry = True

    def __init__(self, url=None, model=None, timeout_ms=None, name="remote"):
        self.url = url or os.environ.get("NLU_URL")
        self.model = model or os.environ.get("NLU_MODEL", "")
        if timeout_ms is None:
            timeout_ms = int(os.environ.get("NLU_TIMEOUT_MS", "10000"))
        self.timeout_ms = timeout_ms
        self.name = name

    def _prompt(self, request, note=None):
        lines = [
            "Translate the navigation instruction into actions.",
            f"Known landmarks: {', '.join(request.landmark_names) or '(none)'}",
            request.schema_description,
            f"Instruction: {request.text}",
        ]
        if note:
            lines.append(f"Your previous reply was invalid: {note}. Reply with a corrected JSON array only.")
        return "\n".join(lines)

    def generate(self, request, registry, note=None):
        if not self.url:
            raise BackendUnavailable("remote backend not configured (set NLU_URL)")
        body = json.dumps(
            {"model": self.model, "prompt": self._prompt(request, note), "temperature": 0}
        ).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_ms / 1000.0) as resp:
                doc = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as e:
            raise BackendUnavailable(f"remote backend failed: {e}", url=self.url) from e
        if not isinstance(doc, dict) or "response" not in doc:
            raise BackendUnavailable("remote backend reply lacks a \"response\" field", url=self.url)
        return str(doc["response"])


_CATEGORY_RANK = {ResetMap: 0, ModifyCost: 1, AvoidAreas: 1, PreferAreas: 1, SetGoal: 2}


def canonical_order(actions):
    """Stable sort: resets, then cost modifications, then the goal."""
    return tuple(sorted(actions, key=lambda a: _CATEGORY_RANK[type(a)]))


def _check_landmarks(actions, registry):
    for action in actions:
        ref = getattr(action, "region", None)
        if isinstance(ref, str):
            registry.resolve(ref)
        target = getattr(action, "target", None)
        if isinstance(target, str):
            registry.resolve(target)


def parse_instruction(text, registry, profile, backend=None):
    """Turn instruction text into a validated, canonically ordered ActionSequence."""
    backend = backend or RuleBasedBackend()
    request = NluRequest(text=text, landmark_names=tuple(registry.names()))
    payload = backend.generate(request, registry)
    try:
        seq = decode_action_payload(payload)
    except SchemaViolation as e:
        if not backend.supports_retry:
            raise
        payload = backend.generate(request, registry, note=f"{e.message} at {e.path}")
        seq = decode_action_payload(payload)
    _check_landmarks(seq.actions, registry)
    return ActionSequence(
        actions=canonical_order(seq.actions),
        pedestrian_buffer=wants_pedestrian_buffer(text),
    )
