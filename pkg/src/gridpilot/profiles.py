"""Named strategy profiles: the parameter bundles behind the three navigation styles.

The magnitudes here are artifact defaults chosen so the three strategies
produce distinct, testable behavior; they are the single tuning surface.
"""

from dataclasses import dataclass

from .errors import UnknownStrategy
from .grid import BLOCKED, COST_FLOOR

# Magnitude of one ring of add-mode safety inflation.
INFLATION_COST = 1.0


@dataclass(frozen=True)
class StrategyProfile:
    name: str
    avoid_cost: float = BLOCKED
    prefer_discount: float = -0.5
    turn_penalty: float = 0.0
    safety_inflation: int = 0
    honor_zones_in_search: bool = True

    def __post_init__(self):
        if not (COST_FLOOR <= self.prefer_discount < 0):
            raise ValueError(f"prefer_discount must be in [{COST_FLOOR}, 0), got {self.prefer_discount}")
        if self.safety_inflation < 0:
            raise ValueError("safety_inflation must be >= 0")
        if self.turn_penalty < 0:
            raise ValueError("turn_penalty must be >= 0")


NAVIGATE_QUICKLY = StrategyProfile(
    name="Navigate Quickly",
    avoid_cost=10.0,
    prefer_discount=-0.25,
    turn_penalty=0.8,
    safety_inflation=0,
    honor_zones_in_search=False,
)

MAXIMIZE_SAFETY = StrategyProfile(
    name="Maximize Safety",
    avoid_cost=BLOCKED,
    prefer_discount=-0.25,
    turn_penalty=0.2,
    safety_inflation=1,
    honor_zones_in_search=True,
)

BALANCE = StrategyProfile(
    name="Balance Efficiency and Safety",
    avoid_cost=BLOCKED,
    prefer_discount=-0.5,
    turn_penalty=0.5,
    safety_inflation=1,
    honor_zones_in_search=True,
)

# Plain shortest-path reference: ignores zones, no turn shaping.
BASELINE = StrategyProfile(
    name="Baseline",
    avoid_cost=BLOCKED,
    prefer_discount=-0.5,
    turn_penalty=0.0,
    safety_inflation=0,
    honor_zones_in_search=False,
)

_PROFILES = {
    "navigate quickly": NAVIGATE_QUICKLY,
    "maximize safety": MAXIMIZE_SAFETY,
    "balance efficiency and safety": BALANCE,
    "balance": BALANCE,
    "baseline": BASELINE,
}


def select_profile(name):
    """Look up a strategy by name (case-insensitive, 'Balance' accepted as shorthand)."""
    profile = _PROFILES.get(name.strip().lower())
    if profile is None:
        known = ", ".join(sorted({p.name for p in _PROFILES.values()}))
        raise UnknownStrategy(f"unknown strategy {name!r} (known: {known})", name=name)
    return profile
