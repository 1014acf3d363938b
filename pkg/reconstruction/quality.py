"""Reconstruction quality against a reference image."""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import DimensionError

INFINITE = "infinite"


@dataclass(frozen=True)
class QualityReport:
    rmse: float
    psnr_db: float  # math.inf when rmse == 0
    peak: float

    @property
    def psnr_label(self) -> str:
        return INFINITE if math.isinf(self.psnr_db) else f"{self.psnr_db:.2f} dB"

    def to_dict(self) -> dict:
        psnr = INFINITE if math.isinf(self.psnr_db) else self.psnr_db
        return {"rmse": self.rmse, "psnr_db": psnr, "peak": self.peak}


def _values(image) -> np.ndarray:
    return np.asarray(getattr(image, "values", image), dtype=np.float64)


def quality_metrics(image, reference, peak: float = 1.0) -> QualityReport:
    a, b = _values(image), _values(reference)
    if a.shape != b.shape:
        raise DimensionError(f"image {a.shape} and reference {b.shape} differ in size")
    rmse = math.sqrt(float(np.mean((a - b) ** 2))) if a.size else 0.0
    psnr = math.inf if rmse == 0.0 else 20.0 * math.log10(peak / rmse)
    return QualityReport(rmse, psnr, peak)
