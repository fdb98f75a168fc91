"""gridpilot: instruction-driven occupancy-grid navigation.

Parse navigation instructions into a validated action algebra, mutate a
grid's cost structure and goal, plan with a weighted heuristic search,
adapt to simulated environmental change, and benchmark against a plain
shortest-path baseline.
"""

from .actions import (
    ActionSequence,
    AvoidAreas,
    ModifyCost,
    PreferAreas,
    ResetMap,
    SetGoal,
    apply_action,
    apply_sequence,
    decode_action_payload,
    encode_action_sequence,
    validate_action,
)
from .episode import EpisodeRunner, needs_replan, run_episode
from .grid import (
    BLOCKED,
    COST_FLOOR,
    GridState,
    OccupancyGrid,
    Region,
    modify_cost,
    new_grid_state,
    reset_map,
    set_goal,
    traversal_cost,
)
from .instructions import (
    RemoteBackend,
    ReplayBackend,
    RuleBasedBackend,
    dissect,
    parse_instruction,
)
from .landmarks import Landmark, LandmarkRegistry
from .planner import PlanResult, count_turns, path_cost, path_length, plan
from .profiles import BALANCE, BASELINE, MAXIMIZE_SAFETY, NAVIGATE_QUICKLY, StrategyProfile, select_profile
from .world import Observation, Pose, WorldState, apply_event, load_scenario, observe, step

__version__ = "0.1.0"
