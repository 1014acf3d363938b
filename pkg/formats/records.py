"""Line-oriented text formats for sampling plans and measurement runs.

Floats are written with repr(), which round-trips exactly and never depends
on the locale.

Plan file::

    # fsi-plan 1
    n: 8
    strategy: full
    coefficients: 34
    schedule: three-step
    rate: 20000.0
    a: 0.5
    b: 0.5
    k: 1
    mode: bicubic
    steps: 102
    index,u,v,phase_radians
    0,0,0,0.0
    ...

Measurement file::

    # fsi-measurements 1
    records: 102
    step_index,u,v,phase_radians,value
    0,0,0,0.0,16.0
    ...
"""

import logging
from pathlib import Path

from core.errors import FormatError
from illumination.patterns import PatternParams
from illumination.sampling import (
    FrequencySample, PhaseSchedule, PlanStep, SamplingPlan, Strategy,
)
from sim.detector import MeasurementRecord

logger = logging.getLogger(__name__)

PLAN_MAGIC = "# fsi-plan 1"
MEASUREMENT_MAGIC = "# fsi-measurements 1"
PLAN_KEYS = ("n", "strategy", "coefficients", "schedule", "rate", "a", "b", "k", "mode", "steps")
PLAN_COLUMNS = "index,u,v,phase_radians"
MEASUREMENT_COLUMNS = "step_index,u,v,phase_radians,value"


def _fmt(x: float) -> str:
    return repr(float(x))


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text(encoding="ascii").splitlines()
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not an ASCII text file ({exc.reason} at byte {exc.start})") from exc


def _expect(lines: list[str], pos: int, text: str):
    if pos >= len(lines) or lines[pos].strip() != text:
        found = lines[pos] if pos < len(lines) else "<end of file>"
        raise FormatError(f"line {pos + 1}: expected {text!r}, found {found!r}")


def _header_value(lines: list[str], pos: int, key: str) -> str:
    if pos >= len(lines):
        raise FormatError(f"line {pos + 1}: missing header key {key!r}")
    name, sep, value = lines[pos].partition(":")
    if not sep or name.strip() != key:
        raise FormatError(f"line {pos + 1}: expected header key {key!r}, found {lines[pos]!r}")
    return value.strip()


def _fields(line: str, count: int, lineno: int) -> list[str]:
    parts = line.split(",")
    if len(parts) != count:
        raise FormatError(f"line {lineno}: expected {count} fields, found {len(parts)}")
    return parts


# --- Plans ---

def write_plan(plan: SamplingPlan, path):
    p = plan.pattern
    header = {
        "n": plan.image_size_n,
        "strategy": plan.strategy.value,
        "coefficients": plan.coefficient_count,
        "schedule": plan.schedule.value,
        "rate": _fmt(plan.illumination_rate_r),
        "a": _fmt(p.mean_a),
        "b": _fmt(p.contrast_b),
        "k": p.upsample_k,
        "mode": p.mode.value,
        "steps": plan.measurement_count,
    }
    lines = [PLAN_MAGIC]
    lines += [f"{key}: {header[key]}" for key in PLAN_KEYS]
    lines.append(PLAN_COLUMNS)
    lines += [f"{s.index},{s.frequency.u},{s.frequency.v},{_fmt(s.phase)}" for s in plan.steps]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    logger.info("wrote plan %s (%d steps)", path, plan.measurement_count)


def read_plan(path) -> SamplingPlan:
    lines = _read_lines(path)
    _expect(lines, 0, PLAN_MAGIC)
    raw = {key: _header_value(lines, 1 + i, key) for i, key in enumerate(PLAN_KEYS)}
    pos = 1 + len(PLAN_KEYS)
    _expect(lines, pos, PLAN_COLUMNS)
    body = [line for line in lines[pos + 1:] if line.strip()]
    try:
        declared = int(raw["steps"])
        pattern = PatternParams(float(raw["a"]), float(raw["b"]), int(raw["k"]), raw["mode"])
        steps = []
        for offset, line in enumerate(body):
            index, u, v, phase = _fields(line, 4, pos + 2 + offset)
            steps.append(PlanStep(int(index), FrequencySample(int(u), int(v)), float(phase)))
        plan = SamplingPlan(
            image_size_n=int(raw["n"]),
            strategy=Strategy(raw["strategy"]),
            coefficient_count=int(raw["coefficients"]),
            schedule=PhaseSchedule(raw["schedule"]),
            illumination_rate_r=float(raw["rate"]),
            pattern=pattern,
            steps=tuple(steps),
        )
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"malformed plan file {path}: {exc}") from exc
    if len(steps) != declared:
        raise FormatError(f"plan header declares {declared} steps, file has {len(steps)}")
    for position, step in enumerate(steps):
        if step.index != position:
            raise FormatError(f"step {position} carries index {step.index}")
    per = len(plan.schedule.phases)
    if declared != per * plan.coefficient_count:
        raise FormatError(
            f"{declared} steps do not cover {plan.coefficient_count} coefficients x {per} phases")
    return plan


# --- Measurements ---

def write_measurements(records: list[MeasurementRecord], path):
    lines = [MEASUREMENT_MAGIC, f"records: {len(records)}", MEASUREMENT_COLUMNS]
    lines += [
        f"{r.step_index},{r.frequency.u},{r.frequency.v},{_fmt(r.phase)},{_fmt(r.value)}"
        for r in records
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    logger.info("wrote %d measurements to %s", len(records), path)


def read_measurements(path) -> list[MeasurementRecord]:
    lines = _read_lines(path)
    _expect(lines, 0, MEASUREMENT_MAGIC)
    try:
        declared = int(_header_value(lines, 1, "records"))
    except ValueError as exc:
        raise FormatError(f"malformed record count: {exc}") from exc
    _expect(lines, 2, MEASUREMENT_COLUMNS)
    records = []
    for offset, line in enumerate(l for l in lines[3:] if l.strip()):
        step_index, u, v, phase, value = _fields(line, 5, 4 + offset)
        try:
            records.append(MeasurementRecord(
                int(step_index), FrequencySample(int(u), int(v)), float(phase), float(value)))
        except ValueError as exc:
            raise FormatError(f"line {4 + offset}: {exc}") from exc
    if len(records) != declared:
        raise FormatError(f"header declares {declared} records, file has {len(records)}")
    return records


# --- Raw detector traces ---

TRACE_COLUMNS = "time_s,step_index,sample_value"


def write_trace(segments, path):
    """Raw DAQ samples, one per line, for plotting the detector response."""
    lines = [TRACE_COLUMNS]
    for seg in segments:
        lines += [f"{_fmt(t)},{seg.step_index},{_fmt(s)}" for t, s in zip(seg.times, seg.samples)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    logger.info("wrote %d trace segments to %s", len(segments), path)
