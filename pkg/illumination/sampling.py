"""Which Fourier coefficients to acquire, in what order, and at what cost.

A real scene has a conjugate-symmetric spectrum, so only a canonical half of
the n x n frequency bins is measured. Bins are acquired from low to high
spatial frequency: sorted by u^2 + v^2, ties broken by atan2(v, u).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from core.errors import ConfigError
from illumination.patterns import PatternParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencySample:
    """Signed spatial-frequency pair, u and v in [-n/2, n/2 - 1]."""
    u: int
    v: int

    @property
    def radius2(self) -> int:
        return self.u * self.u + self.v * self.v

    @property
    def angle(self) -> float:
        return math.atan2(self.v, self.u)

    def conjugate(self, n: int) -> 'FrequencySample':
        """Mirror bin (-u, -v), folded back into the signed range."""
        return FrequencySample(signed_frequency(-self.u, n), signed_frequency(-self.v, n))

    def is_self_conjugate(self, n: int) -> bool:
        return self.conjugate(n) == self


def signed_frequency(f: int, n: int) -> int:
    """Representative of f modulo n in [-n/2, n/2 - 1]."""
    return (f + n // 2) % n - n // 2


def _order_key(f: FrequencySample):
    return (f.radius2, f.angle)


def in_half_plane(f: FrequencySample, n: int) -> bool:
    """Canonical half-plane membership.

    All self-conjugate bins are members; from every other conjugate pair the
    member with u > 0, or u == 0 and v > 0, or u == -n/2 and v > 0 is kept.
    """
    if f.is_self_conjugate(n):
        return True
    if f.u > 0:
        return True
    return f.u in (0, -n // 2) and f.v > 0


def _check_size(n: int):
    if n < 2 or n % 2:
        raise ConfigError(f"image size must be even and >= 2, got {n}")


def half_plane_frequencies(n: int) -> list[FrequencySample]:
    """The canonical half-plane H(n), ordered low to high; |H(n)| = n^2/2 + 2."""
    _check_size(n)
    rng = range(-n // 2, n // 2)
    bins = [FrequencySample(u, v) for v in rng for u in rng]
    half = [f for f in bins if in_half_plane(f, n)]
    half.sort(key=_order_key)
    return half


def spiral_path(n: int, m: int) -> list[FrequencySample]:
    """The m lowest-frequency members of H(n) in acquisition order."""
    half = half_plane_frequencies(n)
    if not 1 <= m <= len(half):
        raise ConfigError(f"coefficient count m={m} outside [1, {len(half)}] for n={n}")
    return half[:m]


def compression_rate(n: int, m: int) -> Fraction:
    """Fraction of the n x n spectrum covered by m half-plane coefficients."""
    return Fraction(2 * m, n * n)


# --- Plans ---

class PhaseSchedule(str, Enum):
    THREE_STEP = "three-step"
    FOUR_STEP = "four-step"

    @property
    def phases(self) -> tuple[float, ...]:
        if self is PhaseSchedule.THREE_STEP:
            return (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)
        return (0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0)


class Strategy(str, Enum):
    FULL = "full"
    SPIRAL = "spiral"


@dataclass(frozen=True)
class PlanStep:
    index: int
    frequency: FrequencySample
    phase: float


@dataclass(frozen=True)
class SamplingPlan:
    image_size_n: int
    strategy: Strategy
    coefficient_count: int
    schedule: PhaseSchedule
    illumination_rate_r: float
    pattern: PatternParams = field(default_factory=PatternParams)
    steps: tuple[PlanStep, ...] = ()

    @property
    def measurement_count(self) -> int:
        return len(self.steps)

    @property
    def frequencies(self) -> list[FrequencySample]:
        per = len(self.schedule.phases)
        return [s.frequency for s in self.steps[::per]]

    @property
    def idealized_count(self) -> int:
        """Conventional count |phases| * n^2 / 2, ignoring the self-conjugate extras.

        A spiral plan has no extras to ignore, so its idealized count is M.
        """
        if self.strategy is Strategy.SPIRAL:
            return self.measurement_count
        return len(self.schedule.phases) * self.image_size_n ** 2 // 2

    @property
    def pattern_size(self) -> int:
        return self.image_size_n * self.pattern.upsample_k

    def describe(self) -> str:
        label = self.strategy.value
        if self.strategy is Strategy.SPIRAL:
            label += f"({self.coefficient_count})"
        return (f"n={self.image_size_n} {label} {self.schedule.value} "
                f"k={self.pattern.upsample_k} {self.pattern.mode.value}")


def _steps_for(frequencies: list[FrequencySample], schedule: PhaseSchedule) -> tuple[PlanStep, ...]:
    steps = []
    for f in frequencies:
        for phase in schedule.phases:
            steps.append(PlanStep(len(steps), f, phase))
    return tuple(steps)


def build_plan(n: int, strategy: Strategy | str = Strategy.FULL, m: int | None = None,
               schedule: PhaseSchedule | str = PhaseSchedule.THREE_STEP,
               rate_r: float = 20_000.0,
               pattern: PatternParams | None = None) -> SamplingPlan:
    """Ordered (frequency, phase) steps for a full or spiral acquisition."""
    strategy = Strategy(strategy)
    schedule = PhaseSchedule(schedule)
    if rate_r <= 0:
        raise ConfigError(f"illumination rate must be positive, got {rate_r}")
    if strategy is Strategy.FULL:
        frequencies = half_plane_frequencies(n)
    else:
        if m is None:
            raise ConfigError("spiral strategy needs a coefficient count m")
        frequencies = spiral_path(n, m)
    plan = SamplingPlan(
        image_size_n=n,
        strategy=strategy,
        coefficient_count=len(frequencies),
        schedule=schedule,
        illumination_rate_r=rate_r,
        pattern=pattern or PatternParams(),
        steps=_steps_for(frequencies, schedule),
    )
    logger.debug("built plan %s with M=%d", plan.describe(), plan.measurement_count)
    return plan


def measurement_time(count: int, rate_r) -> Fraction:
    """t_A = M / R as an exact rational (rate given as int, float or str)."""
    rate = Fraction(rate_r)
    if rate <= 0:
        raise ConfigError(f"illumination rate must be positive, got {rate_r}")
    return Fraction(count) / rate


def acquisition_time(plan: SamplingPlan) -> float:
    """Seconds needed to illuminate every step of the plan."""
    return float(measurement_time(plan.measurement_count, plan.illumination_rate_r))


def frame_rate(plan: SamplingPlan) -> float:
    """Frames per second when the plan is repeated back to back."""
    return float(1 / measurement_time(plan.measurement_count, plan.illumination_rate_r))
