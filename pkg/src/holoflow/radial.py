"""Radial boundary-limit estimation.

Boundary criteria in this package are stated as limsups along radii
r_k = 1 - 2^{-k}.  With geometrically spaced radii, smooth boundary
approach gives geometrically converging samples, so a one-term geometric
(Aitken-style) extrapolation of the tail recovers the limit to roughly
the square of the last increment.  Non-geometric tails fall back to the
max of the last samples, which is the conservative choice for a limsup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_KS = range(4, 15)


def radii(ks=DEFAULT_KS) -> np.ndarray:
    return 1.0 - 2.0 ** -np.asarray(list(ks), dtype=float)


@dataclass(frozen=True)
class RadialEstimate:
    value: float          # +-inf when diverging
    diverged: bool
    increasing: bool      # tail still rising at the last radius


def estimate_radial_limit(values, diverge_threshold: float = 1e3) -> RadialEstimate:
    """Estimate the r -> 1 limit of sampled values along a radius.

    `values` are ordered by increasing k (radius approaching 1).
    Divergence is declared when the tail magnitude exceeds the threshold
    and is still growing; the sign of the divergence is reported via
    +-inf.
    """
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        # treat overflowed samples as divergence in the direction of the
        # last finite trend
        last = v[np.isfinite(v)]
        sign = 1.0 if (len(last) == 0 or last[-1] >= 0) else -1.0
        return RadialEstimate(sign * np.inf, True, True)
    if len(v) < 3:
        return RadialEstimate(float(v[-1]), False, False)
    increasing = v[-1] > v[-2] > v[-3]
    magnitude_growing = abs(v[-1]) > abs(v[-2]) > abs(v[-3])
    if abs(v[-1]) > diverge_threshold and magnitude_growing:
        return RadialEstimate(np.sign(v[-1]) * np.inf, True, increasing)
    d1 = v[-2] - v[-3]
    d2 = v[-1] - v[-2]
    if abs(d2) < 1e-14 * max(1.0, abs(v[-1])):
        return RadialEstimate(float(v[-1]), False, increasing)
    if abs(d1) > 0:
        rho = d2 / d1
        if 0.0 < rho < 0.95:
            return RadialEstimate(float(v[-1] + d2 * rho / (1.0 - rho)),
                                  False, increasing)
    # oscillating or non-geometric tail: limsup flavour
    return RadialEstimate(float(np.max(v[-3:])), False, increasing)


def estimate_radial_limits(value_grid, diverge_threshold: float = 1e3):
    """Vectorized helper: apply the estimator along axis 0.

    `value_grid` has shape (n_radii, n_angles); returns a list of
    RadialEstimate, one per angle.
    """
    grid = np.asarray(value_grid, dtype=float)
    return [estimate_radial_limit(grid[:, j], diverge_threshold)
            for j in range(grid.shape[1])]
