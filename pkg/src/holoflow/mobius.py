"""Moebius transforms z -> (az+b)/(cz+d) with disc-automorphism detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTransformError, PoleError
from .expressions import AnalyticMap, Const, Div, Add, Mul, Z

_DEGENERATE_TOL = 1e-14
_AUTO_TOL = 1e-12
_AUTO_SAMPLES = 16


@dataclass(frozen=True)
class MoebiusTransform:
    """Coefficients of z -> (az+b)/(cz+d); immutable."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if abs(self.det) < _DEGENERATE_TOL:
            raise DegenerateTransformError(
                f"determinant {self.det:.3e} below {_DEGENERATE_TOL}"
            )

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, theta: float) -> "MoebiusTransform":
        return cls(np.exp(1j * theta), 0, 0, 1)

    @classmethod
    def blaschke(cls, alpha: complex) -> "MoebiusTransform":
        """Self-inverse disc automorphism swapping 0 and alpha."""
        return cls(-1, alpha, -np.conj(alpha), 1)

    @classmethod
    def hyperbolic(cls, r: float) -> "MoebiusTransform":
        """z -> (z+r)/(1+rz), r in (-1,1); fixes +-1."""
        return cls(1, r, r, 1)

    @classmethod
    def cayley(cls) -> "MoebiusTransform":
        """Self-inverse bijection disc -> right half-plane, z -> (1-z)/(1+z)."""
        return cls(-1, 1, 1, 1)

    def normalized(self) -> "MoebiusTransform":
        """Scale coefficients so the determinant is exactly 1."""
        s = np.sqrt(complex(self.det))
        return MoebiusTransform(self.a / s, self.b / s, self.c / s, self.d / s)

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def is_disc_automorphism(self, samples: int = _AUTO_SAMPLES,
                             tol: float = _AUTO_TOL) -> bool:
        """True iff the transform maps the unit circle to itself.

        Checked on `samples` (>= 8) boundary points, plus the requirement
        that the interior goes to the interior (not the exterior).
        """
        samples = max(8, samples)
        theta = 2 * np.pi * np.arange(samples) / samples
        boundary = np.exp(1j * theta)
        try:
            vals = np.array([self(z) for z in boundary])
        except PoleError:
            return False
        if np.max(np.abs(np.abs(vals) - 1.0)) > tol:
            return False
        return abs(self(0.0)) < 1.0

    def __call__(self, z: complex) -> complex:
        den = self.c * z + self.d
        if abs(den) < _DEGENERATE_TOL:
            raise PoleError(f"pole at z={z}")
        return (self.a * z + self.b) / den

    def as_map(self, domain: str = "disc") -> AnalyticMap:
        num = Add(Mul(Const(complex(self.a)), Z()), Const(complex(self.b)))
        den = Add(Mul(Const(complex(self.c)), Z()), Const(complex(self.d)))
        return AnalyticMap(Div(num, den), domain)


def mobius_apply(m: MoebiusTransform, z: complex) -> complex:
    return m(z)


def mobius_compose(m1: MoebiusTransform, m2: MoebiusTransform) -> MoebiusTransform:
    """m1 after m2, by coefficient-matrix product, normalized to det 1."""
    a = m1.a * m2.a + m1.b * m2.c
    b = m1.a * m2.b + m1.b * m2.d
    c = m1.c * m2.a + m1.d * m2.c
    d = m1.c * m2.b + m1.d * m2.d
    det = a * d - b * c
    if abs(det) < _DEGENERATE_TOL:
        raise DegenerateTransformError("composition is degenerate")
    return MoebiusTransform(a, b, c, d).normalized()
