"""Error types shared across the package.

Every domain failure is a subclass of GridPilotError so callers (CLI,
HTTP gateway, episode loop) can catch one base and map it to a
diagnostic without losing the specific code.
"""


class GridPilotError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_dict(self):
        return {"code": self.code, "message": self.message, "detail": self.detail}


class MalformedMap(GridPilotError):
    code = "malformed_map"


class OutOfBounds(GridPilotError):
    code = "out_of_bounds"


class RegionOutOfBounds(GridPilotError):
    code = "region_out_of_bounds"


class ValueBelowFloor(GridPilotError):
    code = "value_below_floor"


class GoalOccupied(GridPilotError):
    code = "goal_occupied"


class UnknownLandmark(GridPilotError):
    code = "unknown_landmark"


class UnknownStrategy(GridPilotError):
    code = "unknown_strategy"


class NoTaskFound(GridPilotError):
    code = "no_task_found"


class SchemaViolation(GridPilotError):
    """Invalid action payload; ``path`` points at the offending field."""

    code = "schema_violation"

    def __init__(self, message, path="$", **detail):
        super().__init__(message, path=path, **detail)
        self.path = path


class BackendUnavailable(GridPilotError):
    code = "backend_unavailable"


class ActionSequenceError(GridPilotError):
    """Wraps the first failing action of a sequence with its index."""

    code = "action_sequence_error"

    def __init__(self, index, cause):
        super().__init__(
            f"action {index} failed: {cause.message}", index=index, cause=cause.to_dict()
        )
        self.index = index
        self.cause = cause


class NoPath(GridPilotError):
    code = "no_path"


class NoGoalSet(GridPilotError):
    code = "no_goal_set"


class StartBlocked(GridPilotError):
    code = "start_blocked"


class BlockedCellOnPath(GridPilotError):
    code = "blocked_cell_on_path"


class IllegalMove(GridPilotError):
    code = "illegal_move"


class ScenarioError(GridPilotError):
    code = "scenario_error"


class InvalidEventTime(ScenarioError):
    code = "invalid_event_time"


class EmptyConfig(GridPilotError):
    code = "empty_config"


class UnknownSession(GridPilotError):
    code = "unknown_session"
