"""Occupancy grid, additive cost layer, regions, and the primitive transformations.

All state types are frozen; every operation returns a new GridState, so
values can be shared between threads and snapshots are free.

Coordinates are (x, y) with x growing east (columns) and y growing south
(rows, matching map-text line order). Cells are stored row-major.
"""

from dataclasses import dataclass, replace

from .errors import (
    GoalOccupied,
    MalformedMap,
    OutOfBounds,
    RegionOutOfBounds,
    ValueBelowFloor,
)

# Sentinel for impassable cells in the cost layer.
BLOCKED = float("inf")

# Lowest finite per-cell cost. Keeps the effective step cost (1 + cost)
# at or above 0.5, which the search heuristic relies on.
COST_FLOOR = -0.5

FREE_CHAR = "."
OCCUPIED_CHAR = "#"
GOAL_CHAR = "G"
START_CHAR = "S"


@dataclass(frozen=True)
class OccupancyGrid:
    """Binary occupancy: 0 = free, 1 = occupied, row-major."""

    width: int
    height: int
    cells: tuple

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise MalformedMap(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if len(self.cells) != self.width * self.height:
            raise MalformedMap(
                f"cell count {len(self.cells)} != {self.width}x{self.height}"
            )
        for v in self.cells:
            if v not in (0, 1):
                raise MalformedMap(f"occupancy values must be 0 or 1, got {v!r}")

    def in_bounds(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def occupied(self, cell):
        x, y = cell
        return self.cells[y * self.width + x] == 1

    def with_cells(self, updates):
        """New grid with {(x, y): value} applied."""
        cells = list(self.cells)
        for (x, y), v in updates.items():
            cells[y * self.width + x] = v
        return OccupancyGrid(self.width, self.height, tuple(cells))


@dataclass(frozen=True)
class Region:
    """A named set of cells, given either explicitly or as an inclusive rectangle."""

    name: str = None
    rect: tuple = None  # (x0, y0, x1, y1) inclusive
    cell_set: frozenset = None

    def __post_init__(self):
        if (self.rect is None) == (self.cell_set is None):
            raise ValueError("Region needs exactly one of rect or cell_set")
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            if x0 > x1 or y0 > y1:
                raise ValueError(f"degenerate rect {self.rect}")

    @classmethod
    def from_cells(cls, cells, name=None):
        return cls(name=name, cell_set=frozenset(cells))

    @classmethod
    def from_rect(cls, x0, y0, x1, y1, name=None):
        return cls(name=name, rect=(x0, y0, x1, y1))

    def cells(self):
        """Deterministically ordered member cells."""
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            return [(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)]
        return sorted(self.cell_set, key=lambda c: (c[1], c[0]))

    def contains(self, cell):
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            x, y = cell
            return x0 <= x <= x1 and y0 <= y <= y1
        return cell in self.cell_set

    def check_bounds(self, grid):
        for c in self.cells():
            if not grid.in_bounds(c):
                raise RegionOutOfBounds(
                    f"region {self.name or self.rect or 'cells'} contains out-of-bounds cell {c}",
                    cell=c,
                )


@dataclass(frozen=True)
class CostLayer:
    """Per-cell additive traversal cost; entries are >= COST_FLOOR or BLOCKED."""

    width: int
    height: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.width * self.height:
            raise MalformedMap("cost layer size mismatch")

    @classmethod
    def zeros(cls, width, height):
        return cls(width, height, (0.0,) * (width * height))

    def at(self, cell):
        x, y = cell
        return self.values[y * self.width + x]

    def with_values(self, updates):
        values = list(self.values)
        for (x, y), v in updates.items():
            values[y * self.width + x] = v
        return CostLayer(self.width, self.height, tuple(values))


@dataclass(frozen=True)
class GridState:
    """The mutable world representation: base map, current occupancy, costs, goal.

    ``base`` is the pristine initial grid and never changes; ``occupancy``
    additionally carries dynamic obstacles.
    """

    base: OccupancyGrid
    occupancy: OccupancyGrid
    costs: CostLayer
    goal: tuple = None

    @property
    def width(self):
        return self.base.width

    @property
    def height(self):
        return self.base.height

    def in_bounds(self, cell):
        return self.base.in_bounds(cell)


def parse_map_text(text):
    """Parse map text into (OccupancyGrid, goal, start).

    Characters: '.' free, '#' occupied, 'G' goal (free), 'S' suggested
    start (free). Rows must have equal length; a trailing newline is fine.
    """
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedMap("empty map text")
    width = len(lines[0])
    cells = []
    goal = None
    start = None
    for y, line in enumerate(lines):
        if len(line) != width:
            raise MalformedMap(f"row {y} has length {len(line)}, expected {width}")
        for x, ch in enumerate(line):
            if ch == FREE_CHAR:
                cells.append(0)
            elif ch == OCCUPIED_CHAR:
                cells.append(1)
            elif ch == GOAL_CHAR:
                if goal is not None:
                    raise MalformedMap(f"multiple goal cells: {goal} and {(x, y)}")
                goal = (x, y)
                cells.append(0)
            elif ch == START_CHAR:
                if start is not None:
                    raise MalformedMap(f"multiple start cells: {start} and {(x, y)}")
                start = (x, y)
                cells.append(0)
            else:
                raise MalformedMap(f"unknown map character {ch!r} at {(x, y)}")
    grid = OccupancyGrid(width, len(lines), tuple(cells))
    return grid, goal, start


def new_grid_state(grid_text):
    """Build the initial GridState from map text: zero costs, goal from 'G' if present."""
    grid, goal, _ = parse_map_text(grid_text)
    return GridState(
        base=grid,
        occupancy=grid,
        costs=CostLayer.zeros(grid.width, grid.height),
        goal=goal,
    )


def render_map_text(state):
    """Inverse of parse_map_text for the current occupancy (goal marked 'G')."""
    rows = []
    for y in range(state.height):
        row = []
        for x in range(state.width):
            if state.goal == (x, y):
                row.append(GOAL_CHAR)
            elif state.occupancy.occupied((x, y)):
                row.append(OCCUPIED_CHAR)
            else:
                row.append(FREE_CHAR)
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def reset_map(state):
    """Restore the pristine grid: base occupancy, zero costs, no goal."""
    return GridState(
        base=state.base,
        occupancy=state.base,
        costs=CostLayer.zeros(state.width, state.height),
        goal=None,
    )


def modify_cost(state, region, value, mode="set"):
    """Write ``value`` into the cost layer over ``region``.

    set: overwrite; add: accumulate, clamped at COST_FLOOR. Cells outside
    the region are untouched. The whole write is validated first, so a
    failure leaves the state unchanged.
    """
    if mode not in ("set", "add"):
        raise ValueError(f"mode must be 'set' or 'add', got {mode!r}")
    region.check_bounds(state.base)
    if mode == "set" and value != BLOCKED and value < COST_FLOOR:
        raise ValueBelowFloor(
            f"cost {value} below floor {COST_FLOOR}", value=value, floor=COST_FLOOR
        )
    updates = {}
    for cell in region.cells():
        if mode == "set":
            updates[cell] = value
        else:
            old = state.costs.at(cell)
            new = old + value  # inf propagates
            updates[cell] = new if new == BLOCKED else max(new, COST_FLOOR)
    return replace(state, costs=state.costs.with_values(updates))


def set_goal(state, cell):
    """Set the navigation goal; the cell must be in bounds and enterable."""
    if not state.in_bounds(cell):
        raise OutOfBounds(f"goal {cell} outside {state.width}x{state.height} grid", cell=cell)
    if state.occupancy.occupied(cell) or state.costs.at(cell) == BLOCKED:
        raise GoalOccupied(f"goal {cell} is occupied or blocked", cell=cell)
    return replace(state, goal=cell)


def traversal_cost(state, cell):
    """Cost-layer value at ``cell``; BLOCKED whenever the cell is occupied."""
    if not state.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside grid", cell=cell)
    if state.occupancy.occupied(cell):
        return BLOCKED
    return state.costs.at(cell)


def is_enterable(state, cell):
    return (
        state.in_bounds(cell)
        and not state.occupancy.occupied(cell)
        and state.costs.at(cell) != BLOCKED
    )
