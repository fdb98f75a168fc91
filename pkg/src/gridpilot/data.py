"""Access to bundled scenarios, the instruction corpus, and replay fixtures."""

import os

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def bundled_path(name):
    return os.path.join(_DATA_DIR, name)


def list_bundled(suffix=".scn"):
    return sorted(f for f in os.listdir(_DATA_DIR) if f.endswith(suffix))


def read_bundled(name):
    with open(bundled_path(name), encoding="utf-8") as fh:
        return fh.read()


def resolve_scenario(path_or_name):
    """A filesystem path wins; otherwise fall back to the bundled scenarios."""
    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            return fh.read()
    candidate = path_or_name if path_or_name.endswith(".scn") else path_or_name + ".scn"
    bundled = bundled_path(candidate)
    if os.path.exists(bundled):
        return read_bundled(candidate)
    raise FileNotFoundError(f"scenario {path_or_name!r} not found (cwd or bundled)")
