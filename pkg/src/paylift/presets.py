"""Named formation presets: preferred cable-force direction sets.

Each preset sums exactly to e3 so it can be rescaled to any desired force
(see allocation.rescale_preset). Directions are expressed in the payload
frame; the line runs along x.
"""

import numpy as np

from .errors import PresetUnavailable

# horizontal force share of the outer robots; keeps the commanded cable
# tilt within the thrust envelope of a ~1.4 thrust-to-weight quadrotor
LINE_SPREAD = 0.28
TRIANGLE_SPREAD = 0.20


def preset_table(n_robots):
    """Available presets for a rig size: name -> (n, 3) preferred forces."""
    if n_robots == 2:
        h = LINE_SPREAD
        return {
            "line": np.array([[-h, 0.0, 0.5], [h, 0.0, 0.5]]),
        }
    if n_robots == 3:
        h = LINE_SPREAD
        line = np.array([[-h, 0.0, 0.32], [0.0, 0.0, 0.36], [h, 0.0, 0.32]])
        g = TRIANGLE_SPREAD
        angles = np.array([np.pi / 2, np.pi / 2 + 2 * np.pi / 3, np.pi / 2 + 4 * np.pi / 3])
        triangle = np.column_stack(
            (g * np.cos(angles), g * np.sin(angles), np.full(3, 1.0 / 3.0))
        )
        return {"line": line, "triangle": triangle}
    raise PresetUnavailable(f"no presets for {n_robots} robots")


def preset_names(n_robots):
    try:
        return sorted(preset_table(n_robots))
    except PresetUnavailable:
        return []
