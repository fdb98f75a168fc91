"""Lockstep world simulator: robot pose, landmarks, pedestrians, timed events.

One robot move per tick. Events due at a tick fire at the start of that
tick, then pedestrians advance one cell, then the robot moves. All state
is persistent (frozen dataclasses), so observations are true snapshots:
later mutation of the world can never leak into one.

Scenario document format (line-based, '#' comments allowed):

    map:
      <indented map rows: '.' free, '#' occupied, 'G' goal, 'S' start>
    start: x,y
    landmarks:
      <name>: kind=<kind> rect=x0,y0,x1,y1 [access=x,y]
      <name>: kind=<kind> cells=x,y;x,y;... [access=x,y]
    pedestrians:
      <id>: start=x,y [waypoints=x,y;x,y;...] [mode=cycle|random] [seed=N]
    events:
      <tick>: add_obstacle rect=x0,y0,x1,y1
      <tick>: remove_obstacle rect=x0,y0,x1,y1
      <tick>: add_landmark name=<name> kind=<kind> rect=x0,y0,x1,y1 [access=x,y]
      <tick>: move_pedestrian id=<id> waypoint=x,y

Sections may be omitted; 'start:' may be omitted when the map has an 'S' cell.
"""

import random
from dataclasses import dataclass, replace

from .errors import IllegalMove, InvalidEventTime, OutOfBounds, ScenarioError
from .grid import GridState, Region, new_grid_state, parse_map_text
from .landmarks import LANDMARK_KINDS, Landmark, LandmarkRegistry

HEADINGS = ("E", "S", "W", "N")
_DELTAS = {"E": (1, 0), "S": (0, 1), "W": (-1, 0), "N": (0, -1)}


@dataclass(frozen=True)
class Pose:
    x: int
    y: int
    theta: str = "E"

    @property
    def cell(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Pedestrian:
    id: str
    pos: tuple
    waypoints: tuple = ()
    wp_index: int = 0
    mode: str = "cycle"
    seed: int = 0


@dataclass(frozen=True)
class ScenarioEvent:
    at_time: int
    kind: str  # add_obstacle | remove_obstacle | add_landmark | move_pedestrian
    region: Region = None
    name: str = None
    landmark_kind: str = "custom"
    access: tuple = None
    ped_id: str = None
    waypoint: tuple = None

    def __post_init__(self):
        if self.at_time < 0:
            raise InvalidEventTime(f"event time {self.at_time} < 0")


@dataclass(frozen=True)
class WorldState:
    tick: int
    grid_state: GridState
    pose: Pose
    registry: LandmarkRegistry
    pedestrians: tuple = ()
    pending_events: tuple = ()

    def pedestrian_cells(self):
        return {p.pos for p in self.pedestrians}


@dataclass(frozen=True)
class Observation:
    grid: GridState
    pose: Pose
    landmarks: LandmarkRegistry
    tick: int
    pedestrians: tuple = ()


def observe(world):
    """Consistent snapshot of the current tick; never mutates."""
    return Observation(
        grid=world.grid_state,
        pose=world.pose,
        landmarks=world.registry,
        tick=world.tick,
        pedestrians=world.pedestrians,
    )


# --- scenario parsing ------------------------------------------------------


def _parse_cell(text, line_no):
    try:
        x, y = text.split(",")
        return (int(x), int(y))
    except ValueError:
        raise ScenarioError(f"line {line_no}: expected x,y got {text!r}") from None


def _parse_kv(tokens, line_no):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ScenarioError(f"line {line_no}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _parse_region(kv, line_no, name=None):
    if "rect" in kv:
        parts = kv["rect"].split(",")
        if len(parts) != 4:
            raise ScenarioError(f"line {line_no}: rect needs 4 integers")
        try:
            x0, y0, x1, y1 = (int(p) for p in parts)
        except ValueError:
            raise ScenarioError(f"line {line_no}: rect needs integers") from None
        if x0 > x1 or y0 > y1:
            raise ScenarioError(f"line {line_no}: degenerate rect {kv['rect']}")
        return Region.from_rect(x0, y0, x1, y1, name=name)
    if "cells" in kv:
        cells = [_parse_cell(c, line_no) for c in kv["cells"].split(";") if c]
        if not cells:
            raise ScenarioError(f"line {line_no}: empty cell list")
        return Region.from_cells(cells, name=name)
    raise ScenarioError(f"line {line_no}: landmark needs rect= or cells=")


def load_scenario(text):
    """Parse a scenario document into the initial WorldState (tick 0)."""
    map_lines = []
    start = None
    landmarks = []
    pedestrians = []
    events = []
    section = None
    for line_no, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        indented = raw.startswith((" ", "\t"))
        # '#' starts a comment everywhere except inside the map block,
        # where it is the occupied-cell character
        if stripped.startswith("#") and not (indented and section == "map"):
            continue
        if not indented:
            if stripped == "map:":
                section = "map"
            elif stripped.startswith("start:"):
                start = _parse_cell(stripped[len("start:"):].strip(), line_no)
                section = None
            elif stripped == "landmarks:":
                section = "landmarks"
            elif stripped == "pedestrians:":
                section = "pedestrians"
            elif stripped == "events:":
                section = "events"
            else:
                raise ScenarioError(f"line {line_no}: unknown section {stripped!r}")
            continue
        if section == "map":
            map_lines.append(stripped)
        elif section == "landmarks":
            if ":" not in stripped:
                raise ScenarioError(f"line {line_no}: landmark needs 'name: ...'")
            name, rest = stripped.split(":", 1)
            kv = _parse_kv(rest.split(), line_no)
            kind = kv.get("kind", "custom")
            if kind not in LANDMARK_KINDS:
                raise ScenarioError(f"line {line_no}: unknown landmark kind {kind!r}")
            access = _parse_cell(kv["access"], line_no) if "access" in kv else None
            landmarks.append(
                Landmark(name=name.strip(), region=_parse_region(kv, line_no, name=name.strip()),
                         kind=kind, access=access)
            )
        elif section == "pedestrians":
            if ":" not in stripped:
                raise ScenarioError(f"line {line_no}: pedestrian needs 'id: ...'")
            pid, rest = stripped.split(":", 1)
            kv = _parse_kv(rest.split(), line_no)
            if "start" not in kv:
                raise ScenarioError(f"line {line_no}: pedestrian needs start=x,y")
            waypoints = tuple(
                _parse_cell(c, line_no) for c in kv.get("waypoints", "").split(";") if c
            )
            pedestrians.append(
                Pedestrian(
                    id=pid.strip(),
                    pos=_parse_cell(kv["start"], line_no),
                    waypoints=waypoints,
                    mode=kv.get("mode", "cycle"),
                    seed=int(kv.get("seed", "0")),
                )
            )
        elif section == "events":
            if ":" not in stripped:
                raise ScenarioError(f"line {line_no}: event needs '<tick>: ...'")
            when, rest = stripped.split(":", 1)
            try:
                at_time = int(when.strip())
            except ValueError:
                raise ScenarioError(f"line {line_no}: bad event tick {when!r}") from None
            tokens = rest.split()
            if not tokens:
                raise ScenarioError(f"line {line_no}: empty event")
            kind = tokens[0]
            kv = _parse_kv(tokens[1:], line_no)
            if kind in ("add_obstacle", "remove_obstacle"):
                events.append(ScenarioEvent(at_time, kind, region=_parse_region(kv, line_no)))
            elif kind == "add_landmark":
                if "name" not in kv:
                    raise ScenarioError(f"line {line_no}: add_landmark needs name=")
                lkind = kv.get("kind", "custom")
                if lkind not in LANDMARK_KINDS:
                    raise ScenarioError(f"line {line_no}: unknown landmark kind {lkind!r}")
                events.append(
                    ScenarioEvent(
                        at_time, kind, region=_parse_region(kv, line_no, name=kv["name"]),
                        name=kv["name"], landmark_kind=lkind,
                        access=_parse_cell(kv["access"], line_no) if "access" in kv else None,
                    )
                )
            elif kind == "move_pedestrian":
                if "id" not in kv or "waypoint" not in kv:
                    raise ScenarioError(f"line {line_no}: move_pedestrian needs id= waypoint=")
                events.append(
                    ScenarioEvent(at_time, kind, ped_id=kv["id"],
                                  waypoint=_parse_cell(kv["waypoint"], line_no))
                )
            else:
                raise ScenarioError(f"line {line_no}: unknown event kind {kind!r}")
        else:
            raise ScenarioError(f"line {line_no}: content outside any section")

    if not map_lines:
        raise ScenarioError("scenario has no map section")
    map_text = "\n".join(map_lines)
    grid_state = new_grid_state(map_text)
    _, _, map_start = parse_map_text(map_text)
    if start is None:
        start = map_start
    if start is None:
        raise ScenarioError("scenario has no start (use start: or an 'S' map cell)")
    if not grid_state.in_bounds(start) or grid_state.occupancy.occupied(start):
        raise ScenarioError(f"start {start} is out of bounds or occupied")

    names = [lm.name for lm in landmarks]
    if len(names) != len(set(names)):
        raise ScenarioError("duplicate landmark names")
    for lm in landmarks:
        lm.region.check_bounds(grid_state.base)
        if lm.region.contains(start):
            raise ScenarioError(f"landmark {lm.name!r} region overlaps the start pose {start}")
        if lm.access is not None:
            if not grid_state.in_bounds(lm.access) or grid_state.occupancy.occupied(lm.access):
                raise ScenarioError(f"landmark {lm.name!r} access cell {lm.access} is not free")

    for ped in pedestrians:
        for cell in (ped.pos, *ped.waypoints):
            if not grid_state.in_bounds(cell) or grid_state.occupancy.occupied(cell):
                raise ScenarioError(f"pedestrian {ped.id!r} cell {cell} is not free")
        if ped.mode not in ("cycle", "random"):
            raise ScenarioError(f"pedestrian {ped.id!r} has unknown mode {ped.mode!r}")

    ped_ids = [p.id for p in pedestrians]
    if len(ped_ids) != len(set(ped_ids)):
        raise ScenarioError("duplicate pedestrian ids")

    return WorldState(
        tick=0,
        grid_state=grid_state,
        pose=Pose(x=start[0], y=start[1]),
        registry=LandmarkRegistry.of(*landmarks),
        pedestrians=tuple(sorted(pedestrians, key=lambda p: p.id)),
        pending_events=tuple(sorted(events, key=lambda e: e.at_time)),
    )


# --- stepping --------------------------------------------------------------


def apply_event(world, event):
    """Apply one event immediately, regardless of its at_time."""
    gs = world.grid_state
    if event.kind == "add_obstacle":
        event.region.check_bounds(gs.base)
        protected = world.pedestrian_cells() | {world.pose.cell}
        cells = [c for c in event.region.cells() if c not in protected]
        occupancy = gs.occupancy.with_cells({c: 1 for c in cells})
        # stale zone costs under a hard obstacle are meaningless; clear them
        costs = gs.costs.with_values({c: 0.0 for c in cells})
        return replace(world, grid_state=replace(gs, occupancy=occupancy, costs=costs))
    if event.kind == "remove_obstacle":
        event.region.check_bounds(gs.base)
        updates = {}
        for c in event.region.cells():
            updates[c] = 1 if gs.base.occupied(c) else 0
        occupancy = gs.occupancy.with_cells(updates)
        return replace(world, grid_state=replace(gs, occupancy=occupancy))
    if event.kind == "add_landmark":
        event.region.check_bounds(gs.base)
        lm = Landmark(name=event.name, region=event.region, kind=event.landmark_kind,
                      access=event.access)
        return replace(world, registry=world.registry.with_landmark(lm))
    if event.kind == "move_pedestrian":
        if all(p.id != event.ped_id for p in world.pedestrians):
            raise ScenarioError(f"unknown pedestrian id {event.ped_id!r}")
        peds = []
        for p in world.pedestrians:
            if p.id == event.ped_id:
                if not gs.in_bounds(event.waypoint):
                    raise OutOfBounds(f"waypoint {event.waypoint} out of bounds")
                p = replace(p, waypoints=(event.waypoint,), wp_index=0)
            peds.append(p)
        return replace(world, pedestrians=tuple(peds))
    raise ScenarioError(f"unknown event kind {event.kind!r}")


def _advance_pedestrian(ped, world, occupied_now):
    """One deterministic pedestrian step; blocked pedestrians wait."""
    gs = world.grid_state
    if ped.mode == "random":
        # string seeds hash deterministically, unlike tuples
        rng = random.Random(f"{ped.seed}:{world.tick}:{ped.id}")
        options = []
        for dx, dy in _DELTAS.values():
            cell = (ped.pos[0] + dx, ped.pos[1] + dy)
            if gs.in_bounds(cell) and not gs.occupancy.occupied(cell) and cell not in occupied_now:
                options.append(cell)
        return replace(ped, pos=rng.choice(options)) if options else ped
    if not ped.waypoints:
        return ped
    target = ped.waypoints[ped.wp_index % len(ped.waypoints)]
    if ped.pos == target:
        ped = replace(ped, wp_index=(ped.wp_index + 1) % len(ped.waypoints))
        target = ped.waypoints[ped.wp_index]
        if ped.pos == target:
            return ped
    x, y = ped.pos
    if x != target[0]:
        cell = (x + (1 if target[0] > x else -1), y)
    else:
        cell = (x, y + (1 if target[1] > y else -1))
    if gs.occupancy.occupied(cell) or cell in occupied_now:
        return ped  # wait for the way to clear
    return replace(ped, pos=cell)


def step(world, move=None):
    """Advance one tick: fire due events, move pedestrians, then the robot.

    ``move`` is a heading name ('E','S','W','N') or a (dx, dy) delta.
    An illegal robot move raises IllegalMove, but the world still
    advances; the exception carries .world and .observation for recovery.
    """
    tick = world.tick + 1
    current = replace(world, tick=tick)

    due = [e for e in current.pending_events if e.at_time <= tick]
    remaining = tuple(e for e in current.pending_events if e.at_time > tick)
    for event in due:
        current = apply_event(current, event)
    current = replace(current, pending_events=remaining)

    taken = {p.pos for p in current.pedestrians} | {current.pose.cell}
    peds = []
    for ped in current.pedestrians:
        taken.discard(ped.pos)
        moved = _advance_pedestrian(ped, current, taken)
        taken.add(moved.pos)
        peds.append(moved)
    current = replace(current, pedestrians=tuple(peds))

    if move is not None:
        if isinstance(move, str):
            if move not in _DELTAS:
                raise ValueError(f"move must be one of {HEADINGS}, got {move!r}")
            delta = _DELTAS[move]
            heading = move
        else:
            delta = tuple(move)
            heading = {v: k for k, v in _DELTAS.items()}.get(delta)
            if heading is None:
                raise ValueError(f"move delta must be a unit step, got {move!r}")
        target = (current.pose.x + delta[0], current.pose.y + delta[1])
        gs = current.grid_state
        blocked = (
            not gs.in_bounds(target)
            or gs.occupancy.occupied(target)
            or gs.costs.at(target) == float("inf")
            or target in current.pedestrian_cells()
        )
        if blocked:
            err = IllegalMove(
                f"move {heading} into {target} rejected at tick {tick}", cell=target, tick=tick
            )
            err.world = current
            err.observation = observe(current)
            raise err
        current = replace(current, pose=Pose(x=target[0], y=target[1], theta=heading))

    return current, observe(current)


def heading_between(a, b):
    """Heading name for the unit step a -> b."""
    delta = (b[0] - a[0], b[1] - a[1])
    for name, d in _DELTAS.items():
        if d == delta:
            return name
    raise ValueError(f"cells {a} -> {b} are not 4-adjacent")
