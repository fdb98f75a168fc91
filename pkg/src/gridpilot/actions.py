"""The action algebra: variants, sequencing, validation, and the JSON wire format.

Five variants exist on the wire; AVOID_AREAS and PREFER_AREAS are sugar
that lowers to MODIFY_COST with magnitudes taken from the active
StrategyProfile, so the three navigation strategies stay expressible as
data rather than code.
"""

import json
import math
from dataclasses import dataclass

from .errors import (
    ActionSequenceError,
    GridPilotError,
    SchemaViolation,
)
from .grid import BLOCKED, COST_FLOOR, Region, is_enterable, modify_cost, reset_map, set_goal


@dataclass(frozen=True)
class ResetMap:
    pass


@dataclass(frozen=True)
class ModifyCost:
    region: object  # landmark name or Region
    value: float
    mode: str = "set"


@dataclass(frozen=True)
class AvoidAreas:
    region: object


@dataclass(frozen=True)
class PreferAreas:
    region: object


@dataclass(frozen=True)
class SetGoal:
    target: object  # landmark name or (x, y)


Action = (ResetMap, ModifyCost, AvoidAreas, PreferAreas, SetGoal)


@dataclass(frozen=True)
class ActionSequence:
    """Ordered actions plus episode-level flags the wire format cannot carry."""

    actions: tuple = ()
    pedestrian_buffer: bool = False

    def __iter__(self):
        return iter(self.actions)

    def __len__(self):
        return len(self.actions)


def _resolve_region(ref, registry):
    if isinstance(ref, Region):
        return ref
    return registry.resolve(ref).region


def lower_action(action, state, registry, profile):
    """Rewrite sugar variants to their primitive form; primitives pass through.

    Landmark references stay symbolic here; resolution happens in
    apply_action so replans re-ground against the live registry.
    """
    if isinstance(action, AvoidAreas):
        return ModifyCost(region=action.region, value=profile.avoid_cost, mode="set")
    if isinstance(action, PreferAreas):
        return ModifyCost(region=action.region, value=profile.prefer_discount, mode="set")
    return action


def apply_action(state, action, registry, profile):
    """Dispatch one action to its grid transformation, returning the new state."""
    action = lower_action(action, state, registry, profile)
    if isinstance(action, ResetMap):
        return reset_map(state)
    if isinstance(action, ModifyCost):
        region = _resolve_region(action.region, registry)
        return modify_cost(state, region, action.value, action.mode)
    if isinstance(action, SetGoal):
        target = action.target
        if isinstance(target, str):
            target = registry.resolve(target).goal_cell(state)
        return set_goal(state, tuple(target))
    raise ValueError(f"unhandled action variant {type(action).__name__}")


def apply_sequence(state, seq, registry, profile):
    """Left fold of apply_action; atomic — any failure leaves the input state live.

    Raises ActionSequenceError carrying the index of the failing action.
    """
    current = state
    for i, action in enumerate(seq):
        try:
            current = apply_action(current, action, registry, profile)
        except GridPilotError as e:
            raise ActionSequenceError(i, e) from e
    return current


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    field: str = None


def validate_action(action, state, registry, profile=None):
    """Check an action against the current state without mutating anything.

    Returns a list of diagnostics; empty means the action is applicable.
    """
    diags = []

    def region_diags(ref):
        if isinstance(ref, str):
            lm = registry.get(ref)
            if lm is None:
                diags.append(Diagnostic("unknown_landmark", f"unknown landmark {ref!r}", "region"))
                return None
            return lm.region
        return ref

    if isinstance(action, ResetMap):
        return diags
    if isinstance(action, (AvoidAreas, PreferAreas)):
        region = region_diags(action.region)
        if region is not None:
            for c in region.cells():
                if not state.in_bounds(c):
                    diags.append(Diagnostic("out_of_bounds", f"region cell {c} out of bounds", "region"))
                    break
        return _dedupe(diags)
    if isinstance(action, ModifyCost):
        region = region_diags(action.region)
        if region is not None:
            for c in region.cells():
                if not state.in_bounds(c):
                    diags.append(Diagnostic("out_of_bounds", f"region cell {c} out of bounds", "region"))
                    break
        if action.mode not in ("set", "add"):
            diags.append(Diagnostic("bad_mode", f"mode must be set or add, got {action.mode!r}", "mode"))
        if action.mode == "set" and action.value != BLOCKED and action.value < COST_FLOOR:
            diags.append(
                Diagnostic("value_below_floor", f"cost {action.value} below floor {COST_FLOOR}", "value")
            )
        return _dedupe(diags)
    if isinstance(action, SetGoal):
        target = action.target
        if isinstance(target, str):
            lm = registry.get(target)
            if lm is None:
                diags.append(Diagnostic("unknown_landmark", f"unknown landmark {target!r}", "target"))
                return diags
            try:
                target = lm.goal_cell(state)
            except GridPilotError as e:
                diags.append(Diagnostic(e.code, e.message, "target"))
                return diags
        target = tuple(target)
        if not state.in_bounds(target):
            diags.append(Diagnostic("out_of_bounds", f"goal {target} out of bounds", "target"))
        elif not is_enterable(state, target):
            diags.append(Diagnostic("goal_occupied", f"goal {target} is occupied or blocked", "target"))
        return diags
    diags.append(Diagnostic("unknown_action", f"unknown action {type(action).__name__}", "action"))
    return diags


def _dedupe(diags):
    seen = set()
    out = []
    for d in diags:
        key = (d.code, d.field)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


# --- canonical JSON payload format ---------------------------------------
#
# A payload is a JSON array of objects:
#   {"action": "RESET_MAP"}
#   {"action": "MODIFY_COST", "region": <ref>, "value": <num | "BLOCKED">, "mode": "set"|"add"}
#   {"action": "AVOID_AREAS", "region": <ref>}
#   {"action": "PREFER_AREAS", "region": <ref>}
#   {"action": "SET_GOAL", "target": <landmark-name | [x, y]>}
# where <ref> is a landmark name or {"rect": [x0, y0, x1, y1]}.
# Unknown action names and unknown keys are rejected.

_ALLOWED_KEYS = {
    "RESET_MAP": set(),
    "MODIFY_COST": {"region", "value", "mode"},
    "AVOID_AREAS": {"region"},
    "PREFER_AREAS": {"region"},
    "SET_GOAL": {"target"},
}
_REQUIRED_KEYS = {
    "RESET_MAP": set(),
    "MODIFY_COST": {"region", "value"},
    "AVOID_AREAS": {"region"},
    "PREFER_AREAS": {"region"},
    "SET_GOAL": {"target"},
}


def _reject_nonfinite(_):
    raise ValueError("non-finite numbers are not valid JSON")


def _decode_region_ref(value, path):
    if isinstance(value, str):
        if not value:
            raise SchemaViolation("landmark name must be non-empty", path)
        return value
    if isinstance(value, dict):
        if set(value.keys()) != {"rect"}:
            raise SchemaViolation("inline region must be {\"rect\": [x0,y0,x1,y1]}", path)
        rect = value["rect"]
        if (
            not isinstance(rect, list)
            or len(rect) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in rect)
        ):
            raise SchemaViolation("rect must be four integers", f"{path}.rect")
        x0, y0, x1, y1 = rect
        if x0 > x1 or y0 > y1:
            raise SchemaViolation(f"degenerate rect {rect}", f"{path}.rect")
        return Region.from_rect(x0, y0, x1, y1)
    raise SchemaViolation("region must be a landmark name or inline rect", path)


def _decode_value(value, path):
    if value == "BLOCKED":
        return BLOCKED
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation("value must be a number or \"BLOCKED\"", path)
    if not math.isfinite(value):
        raise SchemaViolation("value must be finite", path)
    return float(value)


def decode_action_payload(payload):
    """Strict parse of payload text into an ActionSequence.

    Raises SchemaViolation with the path to the offending field; never
    returns a partially decoded sequence.
    """
    try:
        doc = json.loads(payload, parse_constant=_reject_nonfinite)
    except (ValueError, TypeError) as e:
        raise SchemaViolation(f"payload is not valid JSON: {e}", "$") from e
    if not isinstance(doc, list):
        raise SchemaViolation("payload must be a JSON array of actions", "$")
    actions = []
    for i, obj in enumerate(doc):
        path = f"$[{i}]"
        if not isinstance(obj, dict):
            raise SchemaViolation("action must be a JSON object", path)
        name = obj.get("action")
        if name is None:
            raise SchemaViolation("missing \"action\" field", f"{path}.action")
        if name not in _ALLOWED_KEYS:
            raise SchemaViolation(f"unknown action name {name!r}", f"{path}.action")
        keys = set(obj.keys()) - {"action"}
        unknown = keys - _ALLOWED_KEYS[name]
        if unknown:
            raise SchemaViolation(
                f"unknown keys for {name}: {sorted(unknown)}", f"{path}.{sorted(unknown)[0]}"
            )
        missing = _REQUIRED_KEYS[name] - keys
        if missing:
            raise SchemaViolation(
                f"missing required field {sorted(missing)[0]!r} for {name}",
                f"{path}.{sorted(missing)[0]}",
            )
        if name == "RESET_MAP":
            actions.append(ResetMap())
        elif name == "MODIFY_COST":
            region = _decode_region_ref(obj["region"], f"{path}.region")
            value = _decode_value(obj["value"], f"{path}.value")
            mode = obj.get("mode", "set")
            if mode not in ("set", "add"):
                raise SchemaViolation(f"mode must be \"set\" or \"add\", got {mode!r}", f"{path}.mode")
            actions.append(ModifyCost(region=region, value=value, mode=mode))
        elif name == "AVOID_AREAS":
            actions.append(AvoidAreas(region=_decode_region_ref(obj["region"], f"{path}.region")))
        elif name == "PREFER_AREAS":
            actions.append(PreferAreas(region=_decode_region_ref(obj["region"], f"{path}.region")))
        elif name == "SET_GOAL":
            target = obj["target"]
            if isinstance(target, str):
                if not target:
                    raise SchemaViolation("target landmark name must be non-empty", f"{path}.target")
                actions.append(SetGoal(target=target))
            elif (
                isinstance(target, list)
                and len(target) == 2
                and all(isinstance(v, int) and not isinstance(v, bool) for v in target)
            ):
                actions.append(SetGoal(target=(target[0], target[1])))
            else:
                raise SchemaViolation(
                    "target must be a landmark name or [x, y]", f"{path}.target"
                )
    return ActionSequence(actions=tuple(actions))


def _encode_region_ref(ref):
    if isinstance(ref, str):
        return ref
    if ref.rect is not None:
        return {"rect": list(ref.rect)}
    # explicit cell sets encode as their bounding boxes only if exact
    cells = ref.cells()
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    rect = (min(xs), min(ys), max(xs), max(ys))
    if (rect[2] - rect[0] + 1) * (rect[3] - rect[1] + 1) == len(cells):
        return {"rect": list(rect)}
    raise ValueError("non-rectangular cell regions have no wire form")


def encode_action(action):
    if isinstance(action, ResetMap):
        return {"action": "RESET_MAP"}
    if isinstance(action, ModifyCost):
        value = "BLOCKED" if action.value == BLOCKED else action.value
        return {
            "action": "MODIFY_COST",
            "region": _encode_region_ref(action.region),
            "value": value,
            "mode": action.mode,
        }
    if isinstance(action, AvoidAreas):
        return {"action": "AVOID_AREAS", "region": _encode_region_ref(action.region)}
    if isinstance(action, PreferAreas):
        return {"action": "PREFER_AREAS", "region": _encode_region_ref(action.region)}
    if isinstance(action, SetGoal):
        target = action.target if isinstance(action.target, str) else list(action.target)
        return {"action": "SET_GOAL", "target": target}
    raise ValueError(f"unhandled action variant {type(action).__name__}")


def encode_action_sequence(seq):
    """Canonical payload text for a sequence (stable key order, compact)."""
    return json.dumps([encode_action(a) for a in seq], separators=(",", ":"))
