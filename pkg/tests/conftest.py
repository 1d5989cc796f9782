from pathlib import Path

import numpy as np
import pytest

from swarmdyn import ContinuousRarest, SwarmParams, two_segment_field

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def fig1_params() -> SwarmParams:
    """Moderate rates: the no-real-roots regime with a single equilibrium."""
    return SwarmParams(beta=2.0, gamma=3.0, lambda_l=4.0, lambda_s=1.0, delta=2.0)


@pytest.fixture
def skew_params() -> SwarmParams:
    """Heavily skewed arrival/departure rates: off-diagonal equilibria exist."""
    return SwarmParams(beta=2.0, gamma=3.0, lambda_l=48.4, lambda_s=40.0, delta=44.0)


def rarest_first_residual(p: SwarmParams, state) -> float:
    """Max-norm of the closed-loop rarest-first vector field at a state."""
    x = state.as_array() if hasattr(state, "as_array") else np.asarray(state, dtype=float)
    u = ContinuousRarest().value(x[1], x[2])
    return float(np.max(np.abs(two_segment_field(p)(x, u))))
