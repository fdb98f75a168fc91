"""Weighted best-first grid search with turn penalties and zone costs.

The search minimizes, per step into cell c:

    1 + (zone cost of c, if the profile honors zones) + (turn penalty, on
    direction change)

Occupied and BLOCKED cells are never enterable. The heuristic is
0.5 * Manhattan distance, admissible because the effective step cost is
floored at 0.5. Tie-breaking is fixed (open list ordered by f, h, y, x,
heading; neighbors expanded E, S, W, N) so identical inputs always yield
identical paths.

Reported metrics follow the path, not the search: path_cost sums
1 + zone cost over entered cells whether or not the search honored
zones, and turn penalties never appear in it.
"""

import time
from dataclasses import dataclass
from heapq import heappush, heappop

from .errors import BlockedCellOnPath, NoGoalSet, NoPath, StartBlocked
from .grid import BLOCKED, COST_FLOOR

# Neighbor expansion order: E, S, W, N.
DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))
DIR_NAMES = ("E", "S", "W", "N")


@dataclass(frozen=True)
class PlanResult:
    path: tuple
    nodes_expanded: int
    search_time: float
    path_cost: float
    path_length: int
    turns: int


def path_length(path):
    """Total steps in the path: |P| - 1."""
    if len(path) < 1:
        raise ValueError("path must contain at least one cell")
    return len(path) - 1


def count_turns(path):
    """Number of direction changes between consecutive steps."""
    turns = 0
    prev_dir = None
    for a, b in zip(path, path[1:]):
        d = (b[0] - a[0], b[1] - a[1])
        if abs(d[0]) + abs(d[1]) != 1:
            raise ValueError(f"path cells {a} -> {b} are not 4-adjacent")
        if prev_dir is not None and d != prev_dir:
            turns += 1
        prev_dir = d
    return turns


def path_cost(path, state):
    """Sum of (1 + zone cost) over entered cells; the start cell contributes 0."""
    total = 0.0
    for cell in path[1:]:
        zone = state.costs.at(cell)
        if zone == BLOCKED or state.occupancy.occupied(cell):
            raise BlockedCellOnPath(f"path crosses blocked cell {cell}", cell=cell)
        total += 1.0 + zone
    return total


def search_cost_of_path(path, state, profile):
    """The search-objective total of a given path under a profile.

    Recomputable from the path alone, which makes planner output directly
    comparable against an exhaustive-search oracle.
    """
    total = 0.0
    prev_dir = None
    for a, b in zip(path, path[1:]):
        d = (b[0] - a[0], b[1] - a[1])
        step = 1.0
        if profile.honor_zones_in_search:
            step += max(state.costs.at(b), COST_FLOOR)
        if prev_dir is not None and d != prev_dir:
            step += profile.turn_penalty
        total += step
        prev_dir = d
    return total


def plan(state, start, profile):
    """Search from ``start`` to ``state.goal`` and report the five metrics."""
    if state.goal is None:
        raise NoGoalSet("no goal set on grid state")
    goal = state.goal
    if not state.in_bounds(start):
        raise StartBlocked(f"start {start} out of bounds", cell=start)
    width = state.width
    occ = state.occupancy.cells
    layer = state.costs.values
    start_i = start[1] * width + start[0]
    if occ[start_i] == 1 or layer[start_i] == BLOCKED:
        raise StartBlocked(f"start {start} is occupied or blocked", cell=start)

    t0 = time.perf_counter()
    if profile.turn_penalty > 0:
        path, expanded = _search_with_headings(state, start, goal, profile)
    else:
        path, expanded = _search_plain(state, start, goal, profile)
    elapsed = time.perf_counter() - t0

    if path is None:
        raise NoPath(
            f"no path from {start} to {goal}", start=start, goal=goal, nodes_expanded=expanded
        )
    return PlanResult(
        path=tuple(path),
        nodes_expanded=expanded,
        search_time=elapsed,
        path_cost=path_cost(path, state),
        path_length=path_length(path),
        turns=count_turns(path),
    )


def _search_plain(state, start, goal, profile):
    """A* over cells; used when the profile has no turn penalty.

    Heap entries are (f, h, index); row-major index order matches the
    (y, x) tie-break exactly.
    """
    width, height = state.width, state.height
    occ = state.occupancy.cells
    layer = state.costs.values
    honor = profile.honor_zones_in_search
    floor = COST_FLOOR
    blocked = BLOCKED
    gx, gy = goal
    size = width * height

    g = [float("inf")] * size
    parent = [-1] * size
    closed = bytearray(size)
    start_i = start[1] * width + start[0]
    goal_i = gy * width + gx
    g[start_i] = 0.0
    h0 = 0.5 * (abs(start[0] - gx) + abs(start[1] - gy))
    open_heap = [(h0, h0, start_i)]
    push, pop = heappush, heappop
    expanded = 0

    while open_heap:
        f, h, i = pop(open_heap)
        if closed[i]:
            continue
        closed[i] = 1
        expanded += 1
        if i == goal_i:
            return _rebuild(parent, i, width), expanded
        base_g = g[i]
        x = i % width
        y = i // width
        for dx, dy in DIRS:
            nx = x + dx
            if nx < 0 or nx >= width:
                continue
            ny = y + dy
            if ny < 0 or ny >= height:
                continue
            ni = ny * width + nx
            if closed[ni] or occ[ni] == 1:
                continue
            zone = layer[ni]
            if zone == blocked:
                continue
            ng = base_g + 1.0 + ((zone if zone > floor else floor) if honor else 0.0)
            if ng < g[ni]:
                g[ni] = ng
                parent[ni] = i
                nh = 0.5 * (abs(nx - gx) + abs(ny - gy))
                push(open_heap, (ng + nh, nh, ni))
    return None, expanded


def _search_with_headings(state, start, goal, profile):
    """A* over (cell, heading) states; headings pay the turn penalty.

    The start has no heading, so the first move is never a turn. Expanded
    nodes count unique cells, not unique states.
    """
    width, height = state.width, state.height
    occ = state.occupancy.cells
    layer = state.costs.values
    penalty = profile.turn_penalty
    gx, gy = goal
    size = width * height

    honor = profile.honor_zones_in_search
    floor = COST_FLOOR
    blocked = BLOCKED
    g = [float("inf")] * (size * 4)
    parent = [-1] * (size * 4)
    closed = bytearray(size * 4)
    seen_cell = bytearray(size)

    start_i = start[1] * width + start[0]
    goal_i = gy * width + gx
    if start_i == goal_i:
        return [start], 1

    # Seed: the four first moves, turn-free. Heap entries are
    # (f, h, state) with state = (cell index * 4 + heading); state order
    # matches the (y, x, heading) tie-break exactly.
    open_heap = []
    for d, (dx, dy) in enumerate(DIRS):
        nx, ny = start[0] + dx, start[1] + dy
        if not (0 <= nx < width and 0 <= ny < height):
            continue
        ni = ny * width + nx
        if occ[ni] == 1 or layer[ni] == blocked:
            continue
        s = ni * 4 + d
        ng = 1.0 + (max(layer[ni], floor) if honor else 0.0)
        if ng < g[s]:
            g[s] = ng
            parent[s] = -2  # marks the start
            nh = 0.5 * (abs(nx - gx) + abs(ny - gy))
            heappush(open_heap, (ng + nh, nh, s))
    seen_cell[start_i] = 1
    expanded = 1  # the start cell itself
    push, pop = heappush, heappop

    while open_heap:
        f, h, s = pop(open_heap)
        if closed[s]:
            continue
        closed[s] = 1
        i = s >> 2
        d = s & 3
        if not seen_cell[i]:
            seen_cell[i] = 1
            expanded += 1
        if i == goal_i:
            return _rebuild_headed(parent, s, width, start), expanded
        base_g = g[s]
        x = i % width
        y = i // width
        for nd, (dx, dy) in enumerate(DIRS):
            nx = x + dx
            if nx < 0 or nx >= width:
                continue
            ny = y + dy
            if ny < 0 or ny >= height:
                continue
            ni = ny * width + nx
            if occ[ni] == 1:
                continue
            zone = layer[ni]
            if zone == blocked:
                continue
            ns = ni * 4 + nd
            if closed[ns]:
                continue
            ng = base_g + 1.0 + ((zone if zone > floor else floor) if honor else 0.0)
            if nd != d:
                ng += penalty
            if ng < g[ns]:
                g[ns] = ng
                parent[ns] = s
                nh = 0.5 * (abs(nx - gx) + abs(ny - gy))
                push(open_heap, (ng + nh, nh, ns))
    return None, expanded


def _rebuild(parent, i, width):
    path = []
    while i != -1:
        path.append((i % width, i // width))
        i = parent[i]
    path.reverse()
    return path


def _rebuild_headed(parent, s, width, start):
    path = []
    while s != -2:
        i = s // 4
        path.append((i % width, i // width))
        s = parent[s]
    path.append(start)
    path.reverse()
    return path
