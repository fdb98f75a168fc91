"""Independent reference implementations used only to check the planner.

The uniform-cost search here deliberately shares no code with the search
under test: no heuristic, exact Fraction arithmetic, its own state
encoding. Tests that demand exact equality construct profiles and cost
layers from dyadic rationals so the planner's float sums are exact too.
"""

import heapq
from fractions import Fraction

from gridpilot.grid import BLOCKED, COST_FLOOR

_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _enter_cost(state, cell, profile):
    if not profile.honor_zones_in_search:
        return Fraction(1)
    zone = state.costs.at(cell)
    return Fraction(1) + max(Fraction(zone), Fraction(COST_FLOOR))


def _enterable(state, cell):
    return (
        state.in_bounds(cell)
        and not state.occupancy.occupied(cell)
        and state.costs.at(cell) != BLOCKED
    )


def ucs_optimal_cost(state, start, goal, profile):
    """Exact optimal search-objective from start to goal, or None if unreachable.

    Explores (cell, heading) states exhaustively in cost order; heading
    pays the profile's turn penalty on change, the first move is free of it.
    """
    if not _enterable(state, start):
        return None
    if start == goal:
        return Fraction(0)
    penalty = Fraction(profile.turn_penalty)
    counter = 0
    heap = []
    best = {}
    for d, (dx, dy) in enumerate(_DIRS):
        cell = (start[0] + dx, start[1] + dy)
        if not _enterable(state, cell):
            continue
        cost = _enter_cost(state, cell, profile)
        key = (cell, d)
        if key not in best or cost < best[key]:
            best[key] = cost
            counter += 1
            heapq.heappush(heap, (cost, counter, cell, d))
    while heap:
        cost, _, cell, d = heapq.heappop(heap)
        if best.get((cell, d)) != cost:
            continue
        if cell == goal:
            return cost
        for nd, (dx, dy) in enumerate(_DIRS):
            nxt = (cell[0] + dx, cell[1] + dy)
            if not _enterable(state, nxt):
                continue
            ncost = cost + _enter_cost(state, nxt, profile)
            if nd != d:
                ncost += penalty
            key = (nxt, nd)
            if key not in best or ncost < best[key]:
                best[key] = ncost
                counter += 1
                heapq.heappush(heap, (ncost, counter, nxt, nd))
    return None


def dijkstra_to_goal(state, goal, profile):
    """Exact cost-to-goal for every cell, ignoring turn penalties.

    Used for heuristic-admissibility checks: turn penalties only increase
    true costs, so a bound without them is the tighter one.
    """
    dist = {goal: Fraction(0)}
    counter = 0
    heap = [(Fraction(0), 0, goal)]
    while heap:
        cost, _, cell = heapq.heappop(heap)
        if dist.get(cell) != cost:
            continue
        for dx, dy in _DIRS:
            prev = (cell[0] + dx, cell[1] + dy)
            if not _enterable(state, prev):
                continue
            # moving prev -> cell pays the cost of entering `cell`
            ncost = cost + _enter_cost(state, cell, profile)
            if prev not in dist or ncost < dist[prev]:
                dist[prev] = ncost
                counter += 1
                heapq.heappush(heap, (ncost, counter, prev))
    return dist


def exact_path_objective(path, state, profile):
    """Fraction-exact search objective of a concrete path."""
    total = Fraction(0)
    prev_dir = None
    for a, b in zip(path, path[1:]):
        d = (b[0] - a[0], b[1] - a[1])
        total += _enter_cost(state, b, profile)
        if prev_dir is not None and d != prev_dir:
            total += Fraction(profile.turn_penalty)
        prev_dir = d
    return total
