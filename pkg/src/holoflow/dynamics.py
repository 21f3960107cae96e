"""Iteration dynamics on the disc: Denjoy-Wolff points, inner-ness,
and the hyperbolic distortion supremum.

The attracting point of a self-map is found by direct iteration (the
compiled kernel runs the loop), with two refinements:

* interior limits are polished by Newton on phi(z) - z;
* boundary limits are extracted from the trajectory tail by
  sequence acceleration (geometric tails by Aitken, algebraic 1/n
  tails - the parabolic horocycle approach - by one Richardson step),
  then projected to the circle.

Elliptic automorphisms never converge under iteration, so they are
recognized beforehand: an interior fixed point with unimodular
multiplier whose Koenigs conjugate is a rotation on a sample grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import NonConvergenceError, NotSelfMapError
from .expressions import AnalyticMap
from .mobius import MoebiusTransform
from .radial import estimate_radial_limit

_INTERIOR_EDGE = 1.0 - 1e-6
_MAX_ITER = 10 ** 5


@dataclass(frozen=True)
class DWReport:
    point: complex
    kind: str                 # interior | boundary | elliptic_automorphism
    multiplier: complex | None
    iterations: int

    def to_json(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "kind": self.kind,
            "multiplier": None if self.multiplier is None
            else [self.multiplier.real, self.multiplier.imag],
            "iterations": self.iterations,
        }

    @property
    def interior(self) -> bool:
        return self.kind in ("interior", "elliptic_automorphism")


def check_self_map(phi: AnalyticMap, tol: float = 1e-9) -> None:
    """Spot-check that phi maps the disc into the closed disc."""
    radii_arr = np.array([0.2, 0.5, 0.8, 0.95])
    theta = 2 * np.pi * np.arange(16) / 16
    zs = (radii_arr[:, None] * np.exp(1j * theta)[None, :]).ravel()
    vals = phi(zs)
    if not np.all(np.isfinite(vals)):
        raise NotSelfMapError("map overflows inside the disc")
    worst = float(np.max(np.abs(vals)))
    if worst > 1 + tol:
        raise NotSelfMapError(f"|phi| reaches {worst:.6f} inside the disc")


def _interior_fixed_point(phi: AnalyticMap):
    """Newton on phi(z) - z from a spread of seeds; None if not found."""
    dphi = phi.derivative()
    seeds = [0.0, 0.3, -0.3, 0.5j, -0.5j, 0.5, -0.5, 0.3 + 0.3j]
    for z0 in seeds:
        z = complex(z0)
        ok = False
        for _ in range(60):
            r = phi(z) - z
            if abs(r) < 1e-13:
                ok = True
                break
            d = dphi(z) - 1.0
            if not np.isfinite(d) or abs(d) < 1e-15:
                break
            z = z - r / d
            if not np.isfinite(z) or abs(z) > 1.5:
                break
        if ok and abs(z) < _INTERIOR_EDGE:
            return z
    return None


def _is_conjugate_rotation(phi: AnalyticMap, alpha: complex) -> bool:
    """True if b_alpha . phi . b_alpha is a rotation on a sample grid."""
    b = MoebiusTransform.blaschke(alpha).as_map("disc")
    psi = b.compose(phi.compose(b))
    m = psi.derivative()(0.0)
    pts = 0.5 * np.exp(2j * np.pi * np.arange(16) / 16)
    return bool(np.max(np.abs(psi(pts) - m * pts)) < 1e-8)


def _accelerate_tail(tail: np.ndarray, n_end: int) -> complex:
    """Limit of the trajectory tail; n_end is the index of tail[-1]."""
    if len(tail) < 3:
        return tail[-1]
    z0, z1, z2 = tail[-3], tail[-2], tail[-1]
    d1, d2 = z1 - z0, z2 - z1
    if abs(d1) < 1e-16 or abs(d2) < 1e-16:
        return z2
    rho = d2 / d1
    if abs(rho) < 0.999:
        dd = d2 - d1
        if abs(dd) < 1e-16:
            return z2
        return z2 - d2 * d2 / dd
    # algebraic (1/n) tail: one Richardson step using the absolute index
    return z2 + n_end * d2


def denjoy_wolff(phi: AnalyticMap, max_iter: int = _MAX_ITER) -> DWReport:
    """Locate the attracting point of iteration and classify it."""
    check_self_map(phi)

    fp = _interior_fixed_point(phi)
    if fp is not None:
        mult = phi.derivative()(fp)
        if abs(abs(mult) - 1.0) <= 1e-8 and _is_conjugate_rotation(phi, fp):
            return DWReport(fp, "elliptic_automorphism", mult, 0)

    starts = (0.0, 0.3, -0.3, 0.5j)
    last_tail = None
    for z0 in starts:
        z, n, status, tail = K.iterate(
            phi.tape, z0, max_iter, 1e-9, _INTERIOR_EDGE, _INTERIOR_EDGE)
        last_tail = tail
        if status == K.ITER_CONVERGED:
            alpha = fp if fp is not None else z
            # polish once more in case iteration stopped just inside tol
            refined = _interior_fixed_point_near(phi, alpha)
            if refined is not None:
                alpha = refined
            return DWReport(alpha, "interior", phi.derivative()(alpha), n)
        near_boundary = abs(z) > 1 - 1e-4
        if status == K.ITER_BOUNDARY or (status == K.ITER_CAP and near_boundary):
            args = np.unwrap(np.angle(tail))
            if len(args) >= 5 and np.ptp(args[-min(100, len(args)):]) > 1e-3:
                continue
            alpha = _accelerate_tail(tail, n - 1)
            if abs(alpha) < 1e-12:
                continue
            return DWReport(alpha / abs(alpha), "boundary", None, n)
    if fp is not None and abs(phi.derivative()(fp)) < 1 - 1e-9:
        return DWReport(fp, "interior", phi.derivative()(fp), max_iter)
    raise NonConvergenceError(
        f"iteration did not settle within {max_iter} steps", tail=last_tail)


def _interior_fixed_point_near(phi: AnalyticMap, z0: complex):
    dphi = phi.derivative()
    z = complex(z0)
    for _ in range(60):
        r = phi(z) - z
        if abs(r) < 1e-14:
            return z
        d = dphi(z) - 1.0
        if not np.isfinite(d) or abs(d) < 1e-15:
            return None
        z = z - r / d
        if not np.isfinite(z) or abs(z) >= 1:
            return None
    return z if abs(phi(z) - z) < 1e-10 else None


@dataclass(frozen=True)
class InnerProbeReport:
    """Boundary-modulus defect estimate; heuristic by construction."""

    estimate: float
    inner: bool
    heuristic: bool
    per_radius: np.ndarray

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "inner": self.inner,
                "heuristic": True}


def inner_probe(phi: AnalyticMap, n_angles: int = 512) -> InnerProbeReport:
    """Radial mean of 1 - |phi|^2; an inner map extrapolates to ~0.

    Finitely many samples cannot certify a.e. unimodularity, so the
    verdict is explicitly heuristic (threshold 1e-3).
    """
    check_self_map(phi)
    ks = range(4, 13)
    rs = 1.0 - 2.0 ** -np.asarray(list(ks), dtype=float)
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    grid = rs[:, None] * np.exp(1j * theta)[None, :]
    vals = np.abs(phi(grid.ravel()).reshape(grid.shape))
    defect = np.mean(1.0 - vals ** 2, axis=1)
    est = estimate_radial_limit(defect).value
    est = float(max(est, 0.0))
    return InnerProbeReport(est, bool(est < 1e-3), True, defect)


def tau_phi_infty(phi: AnalyticMap, n_angles: int = 128,
                  n_radii: int = 24) -> float:
    """Grid supremum of (1-|z|^2)/(1-|phi|^2) |phi'| (Schwarz-Pick <= 1)."""
    check_self_map(phi)
    rs = np.linspace(0.0, 0.995, n_radii)
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    zs = (rs[:, None] * np.exp(1j * theta)[None, :]).ravel()
    pz = phi(zs)
    dz = phi.derivative()(zs)
    with np.errstate(all="ignore"):
        ratio = (1 - np.abs(zs) ** 2) / (1 - np.abs(pz) ** 2) * np.abs(dz)
    ratio = ratio[np.isfinite(ratio)]
    return float(np.max(ratio))
