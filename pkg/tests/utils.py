"""Test utilities: reference oracles, scene builders, pipeline helpers."""

import cmath
import math

import numpy as np

from core.rng import keyed_generator
from formats.netpbm import write_pgm
from illumination.patterns import PatternParams, PatternSource
from illumination.sampling import build_plan
from reconstruction.spectrum import reconstruct
from sim.detector import DetectorConfig, MeasurementRecord, Scene, run_plan


def brute_dft(image, u, v):
    """F(u, v) = sum R(x, y) exp(-j 2 pi (u x + v y) / n), by double loop."""
    n = len(image)
    total = 0j
    for y in range(n):
        for x in range(n):
            total += image[y][x] * cmath.exp(-2j * math.pi * (u * x + v * y) / n)
    return total


def loop_inner_product(pattern, scene):
    total = 0.0
    for prow, srow in zip(pattern, scene):
        for p, s in zip(prow, srow):
            total += float(p) * float(s)
    return total


def loop_rmse(a, b):
    total, count = 0.0, 0
    for arow, brow in zip(a, b):
        for x, y in zip(arow, brow):
            total += (float(x) - float(y)) ** 2
            count += 1
    return math.sqrt(total / count)


def random_scene(n, seed=0, stream=0):
    return keyed_generator(seed, stream).uniform(0.0, 1.0, (n, n))


def smooth_scene(n, seed=0, stream=0, terms=4):
    """Low-frequency scene in [0, 1]: a few random cosines around 0.5."""
    g = keyed_generator(seed, stream)
    y, x = np.mgrid[0:n, 0:n]
    values = np.full((n, n), 0.5)
    for _ in range(terms):
        u, v = g.integers(0, 4, size=2)
        phase = g.uniform(0.0, 2.0 * math.pi)
        values += (0.4 / terms) * np.cos(2.0 * math.pi * (u * x + v * y) / n + phase)
    return np.clip(values, 0.0, 1.0)


def replicate(values, k):
    """Block-constant kN x kN scene from an N x N one."""
    return np.repeat(np.repeat(values, k, axis=0), k, axis=1)


def save_scene(path, values, maxval=255):
    write_pgm(np.rint(np.asarray(values) * maxval).astype(np.int64), path, maxval)


def quantized(values, maxval=255):
    """Reflectance as it comes back from an 8-bit PGM."""
    return np.rint(np.asarray(values) * maxval) / maxval


def run_ideal(scene_values, n, strategy="full", m=None, schedule="three-step",
              k=1, mode="analytic", binary=False, cfg=None, seed=0):
    """Plan + acquisition + reconstruction; returns (plan, records, spectrum, image)."""
    params = PatternParams(0.5, 0.5, k, mode)
    plan = build_plan(n, strategy, m, schedule, 20_000.0, params)
    source = PatternSource(n, params, binary=binary)
    cfg = cfg or DetectorConfig.ideal()
    records = run_plan(plan, Scene(scene_values), cfg, seed, source)
    spectrum, image = reconstruct(records, plan, cfg.gain)
    return plan, records, spectrum, image


def ideal_records_batch(plan, source, scenes):
    """Noise-free records for several scenes, generating each pattern once."""
    stack = np.stack([np.asarray(s, dtype=np.float64) for s in scenes])
    out = [[] for _ in scenes]
    for step in plan.steps:
        pattern = source(step.frequency.u, step.frequency.v, step.phase).astype(np.float64)
        values = np.einsum("ij,sij->s", pattern, stack)
        for records, value in zip(out, values):
            records.append(MeasurementRecord(step.index, step.frequency, step.phase, float(value)))
    return out
