"""Reference table for the known extremal average-degree thresholds.

The exact thresholds forcing a complete minor (order t*sqrt(log t)) or a
complete subdivision (order t^2) are not computable from first principles
here; this module stores the published coefficient forms and turns them into
default density targets for the pipelines.  Users override via CLI flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# leading coefficient of the t*sqrt(log t) form for the minor threshold
MINOR_COEFFICIENT = 0.64
# coefficient window of the t^2 form for the subdivision threshold
SUBDIVISION_COEFF_LOWER = 9.0 / 64.0
SUBDIVISION_COEFF_UPPER = 10.0 / 23.0
# degree-floor constant c in c*t*sqrt(log t) + 3t for the sparse unit builder
DEFAULT_DEGREE_FLOOR_COEFF = 1.0 / 128.0


@dataclass(frozen=True)
class KnownBounds:
    t: int
    c_t_coefficient: float = MINOR_COEFFICIENT
    s_t_lower: float = SUBDIVISION_COEFF_LOWER
    s_t_upper: float = SUBDIVISION_COEFF_UPPER

    def __post_init__(self):
        if self.s_t_lower > self.s_t_upper:
            raise ValueError("lower coefficient exceeds upper")

    def minor_threshold(self) -> float:
        return minor_density_target(self.t, self.c_t_coefficient)

    def subdivision_threshold(self) -> float:
        return subdivision_density_target(self.t, self.s_t_upper)


def minor_density_target(t: int, coefficient: float = MINOR_COEFFICIENT) -> float:
    """Default declared density above which a K_t-minor hunt is attempted.

    The asymptotic form underestimates badly at small t, so the exact small-t
    floor 2(t-2) is taken when larger.
    """
    if t < 2:
        return 1.0
    asymptotic = coefficient * t * math.sqrt(max(math.log(t), 1e-9))
    return max(2.0 * (t - 2), asymptotic, 1.0)


def subdivision_density_target(t: int, coefficient: float = SUBDIVISION_COEFF_UPPER) -> float:
    if t < 2:
        return 1.0
    return max(coefficient * t * t, 2.0)


def degree_floor(t: int, coefficient: float = DEFAULT_DEGREE_FLOOR_COEFF) -> float:
    """Minimum-degree requirement for corner growth in the sparse unit builder."""
    return coefficient * t * math.sqrt(max(math.log(t), 1e-9)) + 3.0 * t
