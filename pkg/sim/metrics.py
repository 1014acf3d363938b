"""Acquisition metrics: stage timing and per-phase measurement counts."""

import time
from collections import defaultdict


class Metrics:
    """Wall-clock timing of named pipeline stages."""

    def __init__(self):
        self.stages: dict[str, float] = {}
        self._stage_start: dict[str, float] = {}

    def begin(self, stage: str):
        self._stage_start[stage] = time.perf_counter()

    def end(self, stage: str):
        t0 = self._stage_start.pop(stage)
        self.stages[stage] = self.stages.get(stage, 0.0) + time.perf_counter() - t0


class AcquisitionMetrics:
    """Counts what a simulated acquisition consumed."""

    def __init__(self):
        self.patterns_illuminated = 0
        self.samples_taken = 0
        self.samples_retained = 0
        self.by_phase: dict[str, int] = defaultdict(int)
        self.timing = Metrics()

    def record(self, phase: float, taken: int, retained: int):
        self.patterns_illuminated += 1
        self.samples_taken += taken
        self.samples_retained += retained
        self.by_phase[f"{phase:.6f}"] += 1

    def summary_lines(self) -> list[str]:
        lines = [
            f"  Patterns illuminated: {self.patterns_illuminated}",
            f"  DAQ samples taken: {self.samples_taken}",
            f"  DAQ samples averaged: {self.samples_retained}",
        ]
        if self.by_phase:
            lines.append("  By phase (rad):")
            for phase, count in sorted(self.by_phase.items(), key=lambda kv: float(kv[0])):
                lines.append(f"    {phase}: {count}")
        for stage, seconds in self.timing.stages.items():
            lines.append(f"  {stage}: {seconds:.3f}s")
        return lines
