"""The adaptive instruction-execution loop.

An episode parses its instruction, derives the cost layer and goal from
the resulting actions, plans, then walks the plan one world tick at a
time. After every tick it decides whether the plan is still valid; by
default replanning is event-driven (blocked path cells, a relevant new
landmark, an invalidated goal), while literal mode re-parses and replans
every tick.

On every (re)plan the cost layer is rebuilt from scratch on the current
occupancy: instruction actions are re-grounded against the live landmark
registry, avoid constraints are widened to every landmark sharing the
avoided kind (a newly observed repair zone is caught by an old "avoid the
repair area"), and safety inflation is re-stamped around obstacles and
pedestrians. Rebuilding rather than accumulating keeps repeated add-mode
writes from drifting.
"""

import json
from dataclasses import dataclass, field, replace

from .actions import (
    AvoidAreas,
    SetGoal,
    apply_sequence,
    encode_action,
    encode_action_sequence,
    lower_action,
)
from .errors import GridPilotError, IllegalMove
from .grid import BLOCKED, CostLayer, Region
from .instructions import parse_instruction
from .planner import plan as plan_path
from .profiles import INFLATION_COST
from .world import heading_between, step


@dataclass
class TickRecord:
    tick: int
    pose: tuple
    theta: str
    events_fired: int = 0
    replanned: bool = False
    illegal_move: bool = False


@dataclass
class ReplanRecord:
    tick: int
    reason: str
    actions_payload: str
    lowered_payload: str
    plan: object = None
    error: dict = None


@dataclass
class EpisodeLog:
    instruction: str
    profile_name: str
    backend_name: str
    action_sequences: list = field(default_factory=list)
    plans: list = field(default_factory=list)
    replan_records: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    outcome: str = None
    ticks: int = 0
    replans: int = 0
    executed_cost: float = 0.0
    executed_path: list = field(default_factory=list)
    error: dict = None


def _chebyshev_ring(sources, radius, width, height):
    cells = set()
    for sx, sy in sources:
        for dy in range(-radius, radius + 1):
            for dx in range(-radius, radius + 1):
                x, y = sx + dx, sy + dy
                if 0 <= x < width and 0 <= y < height:
                    cells.add((x, y))
    return cells


def inflation_region(grid_state, pedestrians, profile, pedestrian_buffer):
    """Free cells that should carry one ring of add-mode safety cost."""
    width, height = grid_state.width, grid_state.height
    sources = set()
    obstacle_radius = profile.safety_inflation
    ped_radius = max(profile.safety_inflation, 1 if pedestrian_buffer else 0)
    cells = set()
    if obstacle_radius > 0:
        occ = grid_state.occupancy
        occupied = [
            (x, y) for y in range(height) for x in range(width) if occ.occupied((x, y))
        ]
        cells |= _chebyshev_ring(occupied, obstacle_radius, width, height)
    if ped_radius > 0:
        cells |= _chebyshev_ring([p.pos for p in pedestrians], ped_radius, width, height)
    cells = {c for c in cells if not grid_state.occupancy.occupied(c)}
    return Region.from_cells(cells, name="safety_inflation") if cells else None


def widen_avoids(seq, registry):
    """Extend each avoid constraint to every landmark sharing the avoided kind."""
    actions = list(seq.actions)
    covered = {a.region for a in actions if isinstance(a, AvoidAreas) and isinstance(a.region, str)}
    extra = []
    for name in sorted(covered):
        lm = registry.get(name)
        if lm is None:
            continue
        for other in registry.of_kind(lm.kind):
            if other.name not in covered:
                covered.add(other.name)
                extra.append(AvoidAreas(region=other.name))
    if not extra:
        return seq
    goal_at_end = [a for a in actions if not isinstance(a, SetGoal)] + extra + [
        a for a in actions if isinstance(a, SetGoal)
    ]
    return replace(seq, actions=tuple(goal_at_end))


def rebuild_planning_state(grid_state, seq, registry, profile, pedestrians,
                           pedestrian_buffer, extra_blocked=()):
    """Fresh cost layer on current occupancy: actions, then safety inflation.

    ``extra_blocked`` hard-blocks specific cells for this plan only (used to
    break pedestrian stand-offs).
    """
    cleared = replace(
        grid_state, costs=CostLayer.zeros(grid_state.width, grid_state.height)
    )
    state = apply_sequence(cleared, seq, registry, profile)
    region = inflation_region(state, pedestrians, profile, pedestrian_buffer)
    if region is not None:
        state = replace(
            state,
            costs=state.costs.with_values(
                {
                    c: (state.costs.at(c) + INFLATION_COST)
                    if state.costs.at(c) != BLOCKED
                    else BLOCKED
                    for c in region.cells()
                }
            ),
        )
    blocked_updates = {c: BLOCKED for c in extra_blocked if state.in_bounds(c)}
    if blocked_updates:
        state = replace(state, costs=state.costs.with_values(blocked_updates))
    return state


def needs_replan(observation, current_plan, remaining_path, *, planning_state=None,
                 avoided_kinds=(), known_landmarks=()):
    """True when the environment invalidated the remaining plan.

    Triggers: a remaining path cell became occupied or BLOCKED, a new
    landmark of an actively avoided kind overlaps the remaining path, or
    the goal cell is no longer enterable.
    """
    grid = observation.grid
    layer = planning_state.costs if planning_state is not None else grid.costs
    for cell in remaining_path:
        if grid.occupancy.occupied(cell) or layer.at(cell) == BLOCKED:
            return True
    if remaining_path:
        goal = remaining_path[-1]
        if grid.occupancy.occupied(goal):
            return True
    known = set(known_landmarks)
    for lm in observation.landmarks:
        if lm.name in known:
            continue
        if lm.kind in avoided_kinds and any(lm.region.contains(c) for c in remaining_path):
            return True
    return False


class EpisodeRunner:
    """Incremental episode execution; drives run_episode and the HTTP sessions."""

    def __init__(self, world, instruction, profile, backend=None, step_limit=None,
                 literal_loop=False):
        self.world = world
        self.instruction = instruction
        self.profile = profile
        self.backend = backend
        if step_limit is None:
            gs = world.grid_state
            step_limit = 4 * (gs.width + gs.height)
        self.step_limit = step_limit
        self.literal_loop = literal_loop
        self.log = EpisodeLog(
            instruction=instruction,
            profile_name=profile.name,
            backend_name=getattr(backend, "name", "rule"),
        )
        self.path = None
        self.path_index = 0
        self.done = False
        self.consecutive_illegal = 0

    # -- planning ----------------------------------------------------------

    def _avoided_kinds(self, seq):
        kinds = set()
        for action in seq.actions:
            if isinstance(action, AvoidAreas) and isinstance(action.region, str):
                lm = self.world.registry.get(action.region)
                if lm is not None:
                    kinds.add(lm.kind)
        return kinds

    def _parse_and_plan(self, reason, extra_blocked=()):
        seq = parse_instruction(
            self.instruction, self.world.registry, self.profile, self.backend
        )
        seq = widen_avoids(seq, self.world.registry)
        planning_state = rebuild_planning_state(
            self.world.grid_state, seq, self.world.registry, self.profile,
            self.world.pedestrians, seq.pedestrian_buffer,
            extra_blocked=extra_blocked,
        )
        result = plan_path(planning_state, self.world.pose.cell, self.profile)
        lowered = [
            encode_action(
                lower_action(a, planning_state, self.world.registry, self.profile)
            )
            for a in seq.actions
        ]
        self.world = replace(self.world, grid_state=planning_state)
        self.log.action_sequences.append(seq)
        self.log.plans.append(result)
        self.log.replan_records.append(
            ReplanRecord(
                tick=self.world.tick,
                reason=reason,
                actions_payload=encode_action_sequence(seq.actions),
                lowered_payload=json.dumps(lowered, separators=(",", ":")),
                plan=result,
            )
        )
        self.seq = seq
        self.avoided_kinds = self._avoided_kinds(seq)
        self.known_landmarks = set(self.world.registry.names())
        self.path = result.path
        self.path_index = 0
        return result

    def start(self):
        """Initial parse + apply + plan (A_0)."""
        try:
            self._parse_and_plan(reason="initial")
        except GridPilotError as e:
            self._finish("NoPath", error=e.to_dict())
            return self.log
        self.log.executed_path.append(self.world.pose.cell)
        if self.world.pose.cell == self.world.grid_state.goal:
            self._finish("GoalReached")
        return self.log

    def _finish(self, outcome, error=None):
        self.done = True
        self.log.outcome = outcome
        self.log.error = error
        self.log.ticks = self.world.tick
        self.log.replans = max(0, len(self.log.action_sequences) - 1)

    # -- stepping ----------------------------------------------------------

    def remaining_path(self):
        if self.path is None:
            return ()
        return self.path[self.path_index + 1:]

    def tick(self):
        """Advance one world tick along the plan; replan if invalidated."""
        if self.done:
            return
        if self.world.tick >= self.step_limit:
            self._finish("StepLimit")
            return
        move = None
        nxt = None
        if self.path is not None and self.path_index + 1 < len(self.path):
            nxt = self.path[self.path_index + 1]
            move = heading_between(self.world.pose.cell, nxt)
        events_before = len(self.world.pending_events)
        illegal = False
        try:
            self.world, obs = step(self.world, move)
            self.consecutive_illegal = 0
            if nxt is not None:
                self.path_index += 1
                self.log.executed_cost += 1.0 + self.world.grid_state.costs.at(nxt)
                self.log.executed_path.append(nxt)
        except IllegalMove as e:
            self.world, obs = e.world, e.observation
            illegal = True
            self.consecutive_illegal += 1
        events_fired = events_before - len(self.world.pending_events)
        record = TickRecord(
            tick=self.world.tick,
            pose=self.world.pose.cell,
            theta=self.world.pose.theta,
            events_fired=events_fired,
            illegal_move=illegal,
        )
        self.log.trace.append(record)

        if self.world.pose.cell == self.world.grid_state.goal:
            self._finish("GoalReached")
            return

        replan_reason = None
        if self.literal_loop:
            replan_reason = "literal"
        elif needs_replan(
            obs, None, self.remaining_path(),
            planning_state=self.world.grid_state,
            avoided_kinds=self.avoided_kinds,
            known_landmarks=self.known_landmarks,
        ):
            replan_reason = "invalidated"
        if replan_reason:
            record.replanned = True
            try:
                self._parse_and_plan(reason=replan_reason)
            except GridPilotError as e:
                self._finish("NoPath", error=e.to_dict())
                return
        elif illegal and self.consecutive_illegal >= 2:
            # a standing pedestrian stand-off; route around its current cell
            try:
                self._parse_and_plan(
                    reason="pedestrian_stalemate",
                    extra_blocked=tuple(sorted(self.world.pedestrian_cells())),
                )
                record.replanned = True
                self.consecutive_illegal = 0
            except GridPilotError:
                pass  # keep waiting; the stand-off may clear on its own
        if self.world.tick >= self.step_limit and not self.done:
            self._finish("StepLimit")

    def run(self):
        self.start()
        while not self.done:
            self.tick()
        return self.log


def run_episode(instruction, world, profile, backend=None, step_limit=None,
                literal_loop=False):
    """Execute the full loop until GoalReached, NoPath, or StepLimit."""
    runner = EpisodeRunner(world, instruction, profile, backend=backend,
                           step_limit=step_limit, literal_loop=literal_loop)
    return runner.run()


# --- log serialization ------------------------------------------------------


def _plan_summary(result):
    if result is None:
        return None
    return {
        "nodes_expanded": result.nodes_expanded,
        "search_time_s": result.search_time,
        "path_cost": result.path_cost,
        "path_length": result.path_length,
        "turns": result.turns,
    }


def episode_log_records(log):
    """The line-delimited record stream: replans and ticks in order, then a summary."""
    records = []
    for rec in log.replan_records:
        records.append(
            {
                "type": "replan",
                "tick": rec.tick,
                "reason": rec.reason,
                "actions": json.loads(rec.actions_payload),
                "lowered": json.loads(rec.lowered_payload),
                "plan": _plan_summary(rec.plan),
            }
        )
    for t in log.trace:
        records.append(
            {
                "type": "tick",
                "tick": t.tick,
                "pose": list(t.pose),
                "theta": t.theta,
                "events_fired": t.events_fired,
                "replanned": t.replanned,
                "illegal_move": t.illegal_move,
            }
        )
    records.sort(key=lambda r: (r["tick"], 0 if r["type"] == "tick" else 1))
    records.append(
        {
            "type": "summary",
            "instruction": log.instruction,
            "profile": log.profile_name,
            "backend": log.backend_name,
            "outcome": log.outcome,
            "ticks": log.ticks,
            "replans": log.replans,
            "executed_cost": log.executed_cost,
            "error": log.error,
        }
    )
    return records


def write_episode_log(log, fh):
    for record in episode_log_records(log):
        fh.write(json.dumps(record, separators=(",", ":")) + "\n")
