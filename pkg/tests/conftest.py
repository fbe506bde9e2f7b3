import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from paylift.params import PayloadKind, PayloadParams, QuadrotorParams

SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"

TRIANGLE_ATTACH = [
    np.array([0.0, 0.0462, 0.0]),
    np.array([-0.04, -0.0231, 0.0]),
    np.array([0.04, -0.0231, 0.0]),
]


@pytest.fixture
def pm_payload():
    return PayloadParams(kind=PayloadKind.POINT_MASS, mass=0.01)


@pytest.fixture
def pm_quads():
    return [
        QuadrotorParams(cable_length=l, safety_radius=0.13)
        for l in (0.25, 0.5, 0.75)
    ]


@pytest.fixture
def rigid_payload():
    return PayloadParams(
        kind=PayloadKind.RIGID_BODY, mass=0.01,
        inertia=np.diag([1.2e-5, 1.2e-5, 2.2e-5]),
    )


@pytest.fixture
def rigid_quads():
    return [
        QuadrotorParams(cable_length=0.5, safety_radius=0.05, attachment=a)
        for a in TRIANGLE_ATTACH
    ]


def scenario_path(name):
    return SCENARIO_DIR / f"{name}.toml"
