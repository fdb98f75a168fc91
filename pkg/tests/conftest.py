import pytest

from gridpilot.data import read_bundled
from gridpilot.grid import CostLayer, GridState, OccupancyGrid
from gridpilot.profiles import StrategyProfile
from gridpilot.world import load_scenario

# One line per acceptance criterion, printed after the run (the summary
# hook bypasses output capture).
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def warehouse_text():
    return read_bundled("warehouse.scn")


@pytest.fixture
def warehouse(warehouse_text):
    return load_scenario(warehouse_text)


@pytest.fixture(scope="session")
def pick_text():
    return read_bundled("pick_phase.scn")


@pytest.fixture(scope="session")
def place_text():
    return read_bundled("place_phase.scn")


@pytest.fixture(scope="session")
def forced_text():
    return read_bundled("warehouse_forced.scn")


PICK_INSTRUCTION = "Navigate to Shelf 3, avoid the repair area, and prefer the open lanes."
PLACE_INSTRUCTION = "Return to the storage area, avoid the restricted zone, and use the open lanes."
FORCED_INSTRUCTION = "Navigate to the east dock and avoid the wet floor."


def random_weighted_state(rng, width=8, height=8, density=0.25, with_goal=True):
    """Seeded random grid with obstacles and a dyadic cost layer.

    Costs are multiples of 0.25 so float sums stay exact against the
    Fraction oracle.
    """
    cells = [1 if rng.random() < density else 0 for _ in range(width * height)]
    free = [i for i, v in enumerate(cells) if v == 0]
    if len(free) < 2:
        cells[0] = cells[-1] = 0
        free = [i for i, v in enumerate(cells) if v == 0]
    values = [rng.choice((-0.5, -0.25, 0.0, 0.0, 0.25, 0.5, 1.0, 2.0)) for _ in cells]
    start_i = free[rng.randrange(len(free))]
    goal_i = free[rng.randrange(len(free))]
    grid = OccupancyGrid(width, height, tuple(cells))
    state = GridState(
        base=grid,
        occupancy=grid,
        costs=CostLayer(width, height, tuple(values)),
        goal=(goal_i % width, goal_i // width) if with_goal else None,
    )
    return state, (start_i % width, start_i // width)


def dyadic_profile(rng):
    """Random profile drawn from dyadic parameter values only."""
    return StrategyProfile(
        name="test",
        turn_penalty=rng.choice((0.0, 0.25, 0.5, 1.0)),
        honor_zones_in_search=rng.random() < 0.8,
        prefer_discount=-0.5,
        safety_inflation=0,
    )
