"""Simulation infrastructure: detector chain, response models, metrics."""

from sim.detector import (
    Scene, DetectorConfig, DetectorState, MeasurementRecord, TraceSegment,
    ideal_response, simulate_measurement, run_steps, run_plan, simulate_trace,
)
from sim.response import ResponseModel, InstantResponse, FirstOrderLag, response_for
from sim.metrics import Metrics, AcquisitionMetrics
