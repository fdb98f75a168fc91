"""Experiment harness: strategy/algorithm comparison table and the grid-scaling study.

Both protocols are fully seeded. The comparison runs the whole
parse -> apply -> plan pipeline per (backend, strategy) against a plain
shortest-path baseline; the scaling study tiles the base map k times in
both dimensions and plans paired random start/goal samples with both
algorithms. Timing columns are always reported but never part of any
determinism contract.
"""

import random
import statistics
from dataclasses import dataclass, field, replace

from .actions import ActionSequence, AvoidAreas, PreferAreas, SetGoal
from .episode import rebuild_planning_state, widen_avoids
from .errors import EmptyConfig, GridPilotError
from .grid import CostLayer, GridState, OccupancyGrid, Region, set_goal
from .instructions import RuleBasedBackend, parse_instruction
from .landmarks import Landmark, LandmarkRegistry
from .planner import plan as plan_path
from .profiles import BALANCE, BASELINE, select_profile
from .world import load_scenario


@dataclass
class ComparisonRow:
    backend: str
    strategy: str
    algorithm: str  # "baseline" | "dcip"
    nodes_expanded: int = None
    search_time_s: float = None
    path_cost: float = None
    path_length: int = None
    turns: int = None
    error: str = None


def _goal_cell_for(world, instruction):
    """Resolve the instruction's goal on the raw grid (rule-based, zones ignored)."""
    seq = parse_instruction(instruction, world.registry, BASELINE, RuleBasedBackend())
    for action in seq.actions:
        if isinstance(action, SetGoal):
            target = action.target
            if isinstance(target, str):
                return world.registry.resolve(target).goal_cell(world.grid_state)
            return tuple(target)
    if world.grid_state.goal is not None:
        return world.grid_state.goal
    raise GridPilotError("instruction sets no goal and the scenario has none")


def run_baseline(world, goal, runs=10):
    """Plain shortest path on the raw grid, timing averaged over ``runs``."""
    state = set_goal(
        replace(world.grid_state, costs=CostLayer.zeros(world.grid_state.width,
                                                        world.grid_state.height)),
        goal,
    )
    times = []
    result = None
    for _ in range(max(1, runs)):
        result = plan_path(state, world.pose.cell, BASELINE)
        times.append(result.search_time)
    return ComparisonRow(
        backend="-",
        strategy="-",
        algorithm="baseline",
        nodes_expanded=result.nodes_expanded,
        search_time_s=sum(times) / len(times),
        path_cost=result.path_cost,
        path_length=result.path_length,
        turns=result.turns,
    )


def run_dcip_row(world, instruction, profile, backend):
    seq = parse_instruction(instruction, world.registry, profile, backend)
    seq = widen_avoids(seq, world.registry)
    state = rebuild_planning_state(
        world.grid_state, seq, world.registry, profile,
        world.pedestrians, seq.pedestrian_buffer,
    )
    if state.goal is None:
        state = set_goal(state, _goal_cell_for(world, instruction))
    result = plan_path(state, world.pose.cell, profile)
    return ComparisonRow(
        backend=getattr(backend, "name", "rule"),
        strategy=profile.name,
        algorithm="dcip",
        nodes_expanded=result.nodes_expanded,
        search_time_s=result.search_time,
        path_cost=result.path_cost,
        path_length=result.path_length,
        turns=result.turns,
    )


def run_comparison(scenario_text, instruction, strategies, backends=None, baseline_runs=10):
    """One baseline row plus one row per (backend, strategy); failures become rows."""
    if not strategies:
        raise EmptyConfig("strategies list is empty")
    backends = backends or [RuleBasedBackend()]
    if not backends:
        raise EmptyConfig("backends list is empty")
    world = load_scenario(scenario_text)
    rows = [run_baseline(world, _goal_cell_for(world, instruction), runs=baseline_runs)]
    for backend in backends:
        for strategy in strategies:
            profile = strategy if hasattr(strategy, "turn_penalty") else select_profile(strategy)
            try:
                rows.append(run_dcip_row(world, instruction, profile, backend))
            except GridPilotError as e:
                rows.append(
                    ComparisonRow(
                        backend=getattr(backend, "name", "rule"),
                        strategy=profile.name,
                        algorithm="dcip",
                        error=f"{e.code}: {e.message}",
                    )
                )
    return rows


def comparison_csv(rows):
    lines = ["backend,strategy,algorithm,nodes_expanded,search_time_s,path_cost,path_length,turns"]
    for r in rows:
        if r.error:
            lines.append(f"{r.backend},{r.strategy},{r.algorithm},error,error,error,error,error")
        else:
            lines.append(
                f"{r.backend},{r.strategy},{r.algorithm},{r.nodes_expanded},"
                f"{r.search_time_s:.4f},{r.path_cost:g},{r.path_length},{r.turns}"
            )
    return "\n".join(lines) + "\n"


def comparison_markdown(rows):
    """Markdown table mirroring the comparison layout."""
    head = (
        "| Backend | Strategy | Algorithm | Nodes Expanded | Search Time (s) "
        "| Path Cost | Path Length | Turns |"
    )
    sep = "|---|---|---|---:|---:|---:|---:|---:|"
    lines = [head, sep]
    for r in rows:
        if r.error:
            lines.append(f"| {r.backend} | {r.strategy} | {r.algorithm} | — | — | — | — | — | ({r.error})")
        else:
            lines.append(
                f"| {r.backend} | {r.strategy} | {r.algorithm} | {r.nodes_expanded:,} "
                f"| {r.search_time_s:.4f} | {r.path_cost:g} | {r.path_length} | {r.turns} |"
            )
    return "\n".join(lines) + "\n"


# --- scaling study ----------------------------------------------------------


def tile_grid(base, k):
    """Tile the occupancy pattern k times in each dimension."""
    w, h = base.width, base.height
    cells = []
    for y in range(h * k):
        row_base = (y % h) * w
        for x in range(w * k):
            cells.append(base.cells[row_base + (x % w)])
    return OccupancyGrid(w * k, h * k, tuple(cells))


def scale_region(region, k):
    if region.rect is not None:
        x0, y0, x1, y1 = region.rect
        return Region.from_rect(x0 * k, y0 * k, (x1 + 1) * k - 1, (y1 + 1) * k - 1,
                                name=region.name)
    cells = set()
    for (x, y) in region.cell_set:
        for dy in range(k):
            for dx in range(k):
                cells.add((x * k + dx, y * k + dy))
    return Region.from_cells(cells, name=region.name)


def scaled_world_states(world, k):
    """(baseline GridState, scaled LandmarkRegistry) for scale factor k."""
    grid = tile_grid(world.grid_state.base, k)
    state = GridState(base=grid, occupancy=grid,
                      costs=CostLayer.zeros(grid.width, grid.height), goal=None)
    landmarks = [
        Landmark(name=lm.name, region=scale_region(lm.region, k), kind=lm.kind, access=None)
        for lm in world.registry
    ]
    return state, LandmarkRegistry.of(*landmarks)


def default_constraint_actions(registry):
    """Avoid every repair-kind landmark, prefer every lane-kind landmark."""
    actions = []
    for lm in sorted(registry.of_kind("repair"), key=lambda l: l.name):
        actions.append(AvoidAreas(region=lm.name))
    for lm in sorted(registry.of_kind("lane"), key=lambda l: l.name):
        actions.append(PreferAreas(region=lm.name))
    return actions


@dataclass
class ScalingTrial:
    scale: int
    trial: int
    algorithm: str
    start: tuple
    goal: tuple
    nodes_expanded: int
    search_time_s: float


@dataclass
class ScalingReport:
    seed: int
    max_scale: int
    trials: int
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def mean_nodes(self, scale, algorithm):
        vals = [r.nodes_expanded for r in self.rows
                if r.scale == scale and r.algorithm == algorithm]
        return statistics.mean(vals) if vals else None

    def std_nodes(self, scale, algorithm):
        vals = [r.nodes_expanded for r in self.rows
                if r.scale == scale and r.algorithm == algorithm]
        return statistics.pstdev(vals) if vals else None

    def mean_time(self, scale, algorithm):
        vals = [r.search_time_s for r in self.rows
                if r.scale == scale and r.algorithm == algorithm]
        return statistics.mean(vals) if vals else None

    def to_csv(self, include_time=True):
        lines = ["scale,trial,algorithm,nodes_expanded,search_time_s"]
        for r in self.rows:
            t = f"{r.search_time_s:.6f}" if include_time else ""
            lines.append(f"{r.scale},{r.trial},{r.algorithm},{r.nodes_expanded},{t}")
        return "\n".join(lines) + "\n"

    def summary_lines(self):
        lines = ["scale,algorithm,mean_nodes,std_nodes,mean_time_s"]
        for k in range(1, self.max_scale + 1):
            for alg in ("baseline", "dcip"):
                if self.mean_nodes(k, alg) is None:
                    continue
                lines.append(
                    f"{k},{alg},{self.mean_nodes(k, alg):.1f},"
                    f"{self.std_nodes(k, alg):.1f},{self.mean_time(k, alg):.6f}"
                )
        return "\n".join(lines) + "\n"


def _snap_to_free(grid, u, v):
    """Deterministically map a unit-square point to the nearest free cell."""
    width, height = grid.width, grid.height
    tx = min(width - 1, max(0, round(u * (width - 1))))
    ty = min(height - 1, max(0, round(v * (height - 1))))
    if grid.cells[ty * width + tx] == 0:
        return (tx, ty)
    for radius in range(1, width + height):
        best = None
        for dy in range(-radius, radius + 1):
            y = ty + dy
            if y < 0 or y >= height:
                continue
            rem = radius - abs(dy)
            for dx in (-rem, rem) if rem else (0,):
                x = tx + dx
                if 0 <= x < width and grid.cells[y * width + x] == 0:
                    cand = (x, y)
                    if best is None or (cand[1], cand[0]) < (best[1], best[0]):
                        best = cand
        if best is not None:
            return best
    return None


def scaling_study(scenario_text, max_scale, trials, seed, profile=BALANCE,
                  constraint_actions=None):
    """Paired baseline-vs-dcip sampling study over k-times-enlarged maps.

    Each trial draws its start/goal as unit-square fractions once and snaps
    them onto every scaled map, so the same relative geometry is measured at
    every k (common random numbers keep the per-scale means comparable);
    both algorithms always plan the identical sample.
    """
    if max_scale < 1 or trials < 1:
        raise EmptyConfig("max_scale and trials must be >= 1")
    world = load_scenario(scenario_text)
    report = ScalingReport(seed=seed, max_scale=max_scale, trials=trials)

    # ten candidate draws per trial, fixed up front so every scale sees the
    # same sequence regardless of which candidates get rejected
    candidates = {}
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        candidates[trial] = [tuple(rng.random() for _ in range(4)) for _ in range(10)]

    for k in range(1, max_scale + 1):
        base_state, registry = scaled_world_states(world, k)
        actions = (
            list(constraint_actions)
            if constraint_actions is not None
            else default_constraint_actions(registry)
        )
        seq = widen_avoids(ActionSequence(actions=tuple(actions)), registry)
        dcip_state = rebuild_planning_state(base_state, seq, registry, profile, (), False)
        for trial in range(trials):
            pair = None
            for (u1, v1, u2, v2) in candidates[trial]:
                start = _snap_to_free(base_state.occupancy, u1, v1)
                goal = _snap_to_free(base_state.occupancy, u2, v2)
                if start is None or goal is None or start == goal:
                    continue
                try:
                    b_state = set_goal(base_state, goal)
                    d_state = set_goal(dcip_state, goal)
                    b_res = plan_path(b_state, start, BASELINE)
                    d_res = plan_path(d_state, start, profile)
                except GridPilotError:
                    continue
                pair = (start, goal, b_res, d_res)
                break
            if pair is None:
                report.notes.append(f"scale {k} trial {trial}: no reachable sample after 10 draws")
                continue
            start, goal, b_res, d_res = pair
            report.rows.append(ScalingTrial(k, trial, "baseline", start, goal,
                                            b_res.nodes_expanded, b_res.search_time))
            report.rows.append(ScalingTrial(k, trial, "dcip", start, goal,
                                            d_res.nodes_expanded, d_res.search_time))
    return report
