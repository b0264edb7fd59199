# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORDERS = {'linear': 1, 'quadratic': 2}


@dataclass(frozen=True)
class GrowthFit:
    """
    Least-squares fit of y = intercept + slope * x**power.

    Attributes:
        order (str): linear or quadratic.
        slope (float): Coefficient of x**power.
        intercept (float): Constant term.
        r2 (float): Coefficient of determination.
    """
    order: str
    slope: float
    intercept: float
    r2: float


def fit_growth(x, y, order: str) -> GrowthFit:
    """
    Fits a single-regressor growth model.

    Args:
        x: Axis values.
        y: Measured values.
        order (str): linear (regress on x) or quadratic (regress on x**2).

    Returns:
        GrowthFit: Coefficients and R^2. A constant series fitted exactly has R^2 = 1.

    Raises:
        ValueError: On an unknown order or fewer than two points.
    """
    if order not in ORDERS:
        raise ValueError(f"unknown growth order '{order}'")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise ValueError("need at least two (x, y) points of equal length")
    regressor = x ** ORDERS[order]
    design = np.vstack([regressor, np.ones_like(regressor)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = y - (slope * regressor + intercept)
    sse = float(np.sum(resid ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst > 0:
        r2 = 1.0 - sse / sst
    else:
        r2 = 1.0 if sse <= 1e-12 else 0.0
    return GrowthFit(order, slope, intercept, r2)


def fit_both(x, y) -> dict:
    """
    Returns:
        dict: order -> GrowthFit for both orders.
    """
    return {order: fit_growth(x, y, order) for order in ORDERS}


def preferred_order(fits: dict) -> str:
    """The order with the higher R^2; linear wins ties."""
    return max(fits.values(), key=lambda fit: (fit.r2, -ORDERS[fit.order])).order
