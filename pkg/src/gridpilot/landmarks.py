"""Semantic landmarks: named regions with a kind and an optional access cell."""

from dataclasses import dataclass

from .errors import UnknownLandmark
from .grid import is_enterable

LANDMARK_KINDS = ("shelf", "storage", "repair", "lane", "pedestrian_zone", "custom")


@dataclass(frozen=True)
class Landmark:
    name: str
    region: "Region"
    kind: str = "custom"
    access: tuple = None  # declared free cell to navigate to

    def goal_cell(self, state):
        """Cell navigation should target for this landmark.

        The declared access cell wins; otherwise the enterable cell
        adjacent to the region nearest its centroid (shelves are occupied,
        so the landmark itself is usually not enterable).
        """
        if self.access is not None:
            return self.access
        cells = self.region.cells()
        cx = sum(c[0] for c in cells) / len(cells)
        cy = sum(c[1] for c in cells) / len(cells)
        candidates = []
        member = set(cells)
        for (x, y) in cells:
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                cell = (nx, ny)
                if cell not in member and is_enterable(state, cell):
                    candidates.append(cell)
        for cell in cells:  # free in-region cells are acceptable too
            if is_enterable(state, cell):
                candidates.append(cell)
        if not candidates:
            raise UnknownLandmark(
                f"landmark {self.name!r} has no reachable access cell", name=self.name
            )
        return min(candidates, key=lambda c: ((c[0] - cx) ** 2 + (c[1] - cy) ** 2, c[1], c[0]))


@dataclass(frozen=True)
class LandmarkRegistry:
    """Immutable name -> Landmark map."""

    entries: tuple = ()

    @classmethod
    def of(cls, *landmarks):
        return cls(entries=tuple(landmarks))

    def names(self):
        return [lm.name for lm in self.entries]

    def get(self, name):
        for lm in self.entries:
            if lm.name == name:
                return lm
        return None

    def resolve(self, name):
        lm = self.get(name)
        if lm is None:
            raise UnknownLandmark(f"unknown landmark {name!r}", name=name)
        return lm

    def with_landmark(self, landmark):
        """New registry with ``landmark`` added or replaced."""
        kept = tuple(lm for lm in self.entries if lm.name != landmark.name)
        return LandmarkRegistry(entries=kept + (landmark,))

    def of_kind(self, kind):
        return [lm for lm in self.entries if lm.kind == kind]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)
