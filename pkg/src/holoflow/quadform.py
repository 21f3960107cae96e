"""Real quadratic forms on R^2 and their exact suprema.

Used to resolve Gaussian-weighted suprema over the plane in closed
form: the exponent of the weighted-symbol growth factor is exactly a
quadratic in (x, y) = (Re z, Im z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticForm2D:
    """q(x,y) = 1/2 (x,y) H (x,y)^T + l.(x,y) + c with H symmetric."""

    H: np.ndarray
    l: np.ndarray = field(default_factory=lambda: np.zeros(2))
    c: float = 0.0

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.shape != (2, 2) or abs(H[0, 1] - H[1, 0]) > 1e-12:
            raise ValueError("H must be symmetric 2x2")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "l", np.asarray(self.l, dtype=float))

    def __call__(self, x, y):
        v = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
        quad = 0.5 * (self.H[0, 0] * v[0] ** 2 + 2 * self.H[0, 1] * v[0] * v[1]
                      + self.H[1, 1] * v[1] ** 2)
        return quad + self.l[0] * v[0] + self.l[1] * v[1] + self.c

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of H in nondecreasing order."""
        return np.linalg.eigvalsh(self.H)


def sup_real_quadratic(q: QuadraticForm2D) -> float:
    """Supremum of q over R^2; +inf unless H <= 0 and l is orthogonal
    to the kernel of H.

    When finite the value is attained at a stationary point and computed
    in closed form from the eigendecomposition.  Total function: never
    raises.
    """
    evals, evecs = np.linalg.eigh(q.H)
    scale = max(1.0, float(np.max(np.abs(evals))))
    lt = evecs.T @ q.l
    lin_scale = max(1.0, float(np.max(np.abs(q.l))))
    total = q.c
    for lam, li in zip(evals, lt):
        if lam > _ZERO_TOL * scale:
            return math.inf
        if abs(lam) <= _ZERO_TOL * scale:
            if abs(li) > _ZERO_TOL * lin_scale:
                return math.inf
            continue
        total += -li * li / (2.0 * lam)
    return float(total)


def sup_grid_oracle(q: QuadraticForm2D, half_width: float = 10.0,
                    step: float = 0.05) -> float:
    """Brute-force grid maximum over [-hw, hw]^2; cross-check only."""
    xs = np.arange(-half_width, half_width + step / 2, step)
    x, y = np.meshgrid(xs, xs)
    return float(np.max(q(x, y)))
