"""Phase-shifting recovery of one complex Fourier coefficient.

With patterns a + b*cos(theta + phase) and an ideal detector, D_phase is
a*sum(R) + b*Re(F * exp(-j*phase)) where F = sum R * exp(-j*theta) is the
unnormalized DFT coefficient. The three-step combination below cancels the a
term and returns 3b*F; the four-step one returns 2b*F.
"""

import math

import numpy as np

from core.errors import ConsistencyError
from illumination.sampling import PhaseSchedule

SQRT3 = math.sqrt(3.0)


def coefficient_three_step(d0, d1, d2):
    """[2*D0 - D1 - D2] + sqrt(3)*j*[D1 - D2] for phases 0, 2pi/3, 4pi/3.

    Works on scalars or equally shaped arrays.
    """
    return (2.0 * d0 - d1 - d2) + 1j * SQRT3 * (d1 - d2)


def coefficient_four_step(d0, d1, d2, d3):
    """(D0 - D2) + j*(D1 - D3) for phases 0, pi/2, pi, 3pi/2."""
    return (d0 - d2) + 1j * (d1 - d3)


def recovery_gain(schedule: PhaseSchedule) -> float:
    """Multiple of b*F that the schedule's combination returns."""
    return 3.0 if PhaseSchedule(schedule) is PhaseSchedule.THREE_STEP else 2.0


def recover(schedule: PhaseSchedule, values) -> complex | np.ndarray:
    """Apply the schedule's formula to values ordered as schedule.phases.

    `values` has the phase axis first: shape (phases,) or (phases, count).
    """
    schedule = PhaseSchedule(schedule)
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != len(schedule.phases):
        raise ConsistencyError(
            f"{schedule.value} needs {len(schedule.phases)} readings, got {values.shape[0]}")
    if schedule is PhaseSchedule.THREE_STEP:
        return coefficient_three_step(*values)
    return coefficient_four_step(*values)
