"""Regenerate the bundled scenario files.

The warehouse map is constructed, not drawn: a staggered bar maze with
band stubs forces any field crossing to weave (many turns), a carved
monotone staircase pins the shortest start-to-shelf path at exactly 177
steps, and a discounted lane corridor along the south edge gives the
zone-honoring strategies a smooth detour. The forced variant reuses the
map with a collinear lane start/goal straddled by a wet-floor zone.

Run from the repo root:  python scripts/generate_maps.py
"""

import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "gridpilot", "data")

W, H = 150, 40
START = (2, 3)


def build_warehouse_grid():
    g = [["."] * W for _ in range(H)]

    # staggered bar maze: rows 4..34 step 3, bars span x=8..149,
    # gap width 3 per period 12, offset rotating by 5 per row
    bar_rows = list(range(4, 35, 3))
    for i, y in enumerate(bar_rows):
        offset = (5 * i) % 12
        for x in range(8, W):
            if (x - 8 - offset) % 12 not in (0, 1, 2):
                g[y][x] = "#"

    # south wall with west/east gaps; the lane corridor lies below it
    for x in range(W):
        if x not in (2, 3, 148, 149):
            g[36][x] = "#"

    # vertical stubs interrupt every free band so field traversals must
    # weave; the top band (rows 0-1) and the lane corridor stay clean
    bands = [(2, 3), (5, 6), (8, 9), (11, 12), (14, 15), (17, 18),
             (20, 21), (23, 24), (26, 27), (29, 30), (32, 33), (35, 35)]
    for b, (y0, y1) in enumerate(bands):
        x = 14 + ((7 * b) % 20)
        while x <= 142:
            for y in range(y0, y1 + 1):
                g[y][x] = "#"
            x += 20

    # shelf 3 block and its access pocket at the east edge
    for y in range(32, 37):
        for x in range(145, 148):
            g[y][x] = "#"
    for y in range(30, 36):
        for x in (148, 149):
            g[y][x] = "."

    # shelf 2 block on the north aisle
    for y in range(0, 2):
        for x in range(44, 47):
            g[y][x] = "#"

    # carve a monotone staircase start -> shelf access so the shortest
    # path is exactly Manhattan length (177) and necessarily turn-heavy
    x, y = START
    staircase = []
    for drop_col in (16, 30, 44, 58, 72, 86, 100, 114, 128):
        while x < drop_col:
            x += 1
            staircase.append((x, y))
        for _ in range(3):
            y += 1
            staircase.append((x, y))
    while x < 148:
        x += 1
        staircase.append((x, y))
    while y < 34:
        y += 1
        staircase.append((x, y))
    for (cx, cy) in staircase:
        g[cy][cx] = "."

    return g


def map_block(g):
    return "\n".join("  " + "".join(row) for row in g)


def warehouse_scn(g):
    return f"""# Reference warehouse: bar maze with a 177-step shortest route to shelf 3,
# a discounted lane corridor along the south edge, and a repair band across
# the maze. Regenerated by scripts/generate_maps.py.
map:
{map_block(g)}
start: {START[0]},{START[1]}
landmarks:
  shelf_3: kind=shelf rect=145,32,147,36 access=148,34
  shelf_2: kind=shelf rect=44,0,46,1 access=47,0
  repair_area: kind=repair rect=64,2,76,35
  open_lanes: kind=lane rect=2,38,149,39
  storage_area: kind=storage rect=3,30,7,34 access=5,32
pedestrians:
  p1: start=4,10 waypoints=4,10;4,16
  p2: start=120,0 waypoints=120,0;126,0
"""


def warehouse_forced_scn(g):
    return f"""# Forced-corridor variant of the warehouse: start and dock are collinear on
# the lane, and the wet floor straddles the only straight route.
map:
{map_block(g)}
start: 1,38
landmarks:
  east_dock: kind=storage rect=148,38,149,39 access=148,38
  wet_floor: kind=repair rect=70,37,76,39
  repair_area: kind=repair rect=64,2,76,35
  open_lanes: kind=lane rect=2,38,149,39
"""


def pick_phase_scn():
    pw, ph = 30, 12
    p = [["#"] * pw for _ in range(ph)]
    for x in range(1, 29):
        p[5][x] = "."   # corridor A
        p[9][x] = "."   # corridor B
    for y in range(5, 10):
        p[y][6] = "."   # west connector
        p[y][22] = "."  # east connector
    for y in range(1, 4):
        for x in range(3, 7):
            p[y][x] = "."  # enclosed repair pocket
    p[5][28] = "."
    return f"""# Pick phase: a corridor run to shelf 3 that a tick-3 obstacle interrupts,
# forcing one replan through the southern detour.
map:
{map_block(p)}
start: 1,5
landmarks:
  shelf_3: kind=shelf rect=29,4,29,6 access=28,5
  repair_area: kind=repair rect=3,1,6,3
events:
  3: add_obstacle rect=12,5,13,5
"""


def place_phase_scn():
    qw, qh = 24, 14
    q = [["."] * qw for _ in range(qh)]
    for y in range(2, 11):
        q[y][9] = "#"
        q[y][15] = "#"
    return f"""# Place phase: return across the floor to the storage area, keeping out of
# the restricted strip between the dividing walls and favoring the south lanes.
map:
{map_block(q)}
start: 21,3
landmarks:
  storage_area: kind=storage rect=2,2,5,6 access=3,4
  restricted_zone: kind=repair rect=10,2,14,10
  open_lanes: kind=lane rect=2,11,21,12
pedestrians:
  p3: start=11,0 waypoints=11,0;13,0
"""


def main():
    g = build_warehouse_grid()
    out = {
        "warehouse.scn": warehouse_scn(g),
        "warehouse_forced.scn": warehouse_forced_scn(g),
        "pick_phase.scn": pick_phase_scn(),
        "place_phase.scn": place_phase_scn(),
    }
    os.makedirs(OUT_DIR, exist_ok=True)
    for name, text in out.items():
        path = os.path.join(OUT_DIR, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {os.path.normpath(path)}")


if __name__ == "__main__":
    main()
