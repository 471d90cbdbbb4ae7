from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    r_squared: float
    x_label: str
    y_label: str
    point_count: int
    zero_shifted: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "slope": d["slope"],
            "intercept": d["intercept"],
            "rSquared": d["r_squared"],
            "xLabel": d["x_label"],
            "yLabel": d["y_label"],
            "pointCount": d["point_count"],
            "zeroShifted": d["zero_shifted"],
            "model": "ln(y) = intercept + slope * ln(x); exact zeros replaced by 1 before the log",
        }


def loglog_fit(xs, ys, x_label: str = "x", y_label: str = "y") -> FitReport:
    """Least-squares line through ``(ln x, ln y)``.

    Exact zeros (equilibration at step 0) are shifted to 1 first and counted
    in ``zero_shifted``.
    """
    x = np.asarray(xs, dtype=float).reshape(-1)
    y = np.asarray(ys, dtype=float).reshape(-1)
    if x.size != y.size:
        raise ValueError("xs and ys differ in length")
    if x.size < 3:
        raise ValueError("need at least 3 points")
    shifted = int(np.sum(x == 0) + np.sum(y == 0))
    x = np.where(x == 0, 1.0, x)
    y = np.where(y == 0, 1.0, y)
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)) or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs finite positive values")
    lx, ly = np.log(x), np.log(y)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    if ss_tot == 0 or sxx == 0:
        raise ValueError("degenerate data: zero variance in ln x or ln y")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * lx.mean())
    ss_res = float(np.sum((ly - intercept - slope * lx) ** 2))
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return FitReport(slope, intercept, r2, x_label, y_label, int(x.size), shifted)
