"""Power-law decay fits against the Japanese bracket <t> = sqrt(1 + t^2)."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InsufficientData, NonPositiveValues

MIN_POINTS = 8


def japanese(x):
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


@dataclass(frozen=True)
class DecayFit:
    alpha: float
    gamma: float | None
    window: tuple
    r2: float
    stderr: float

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def fit_decay(times, values, window=None, with_log_correction=False):
    """Least squares for log v = c + alpha log<t> (+ gamma log<log<t>>)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is None:
        window = (t.max() / 10.0, t.max())
    lo, hi = window
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    t, v = t[sel], v[sel]
    if t.size < MIN_POINTS:
        raise InsufficientData(f"{t.size} points in window {window}; need {MIN_POINTS}")
    if not np.all(v > 0) or not np.all(np.isfinite(v)):
        raise NonPositiveValues("decay fits need positive finite values")
    lt = np.log(japanese(t))
    cols = [np.ones_like(lt), lt]
    if with_log_correction:
        cols.append(np.log(japanese(lt)))
    X = np.stack(cols, axis=1)
    y = np.log(v)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = t.size - X.shape[1]
    sigma2 = ss_res / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.pinv(X.T @ X)
    return DecayFit(
        alpha=float(coef[1]),
        gamma=float(coef[2]) if with_log_correction else None,
        window=(float(lo), float(hi)),
        r2=float(r2),
        stderr=float(math.sqrt(max(cov[1, 1], 0.0))),
    )
