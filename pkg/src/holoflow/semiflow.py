"""Disc semiflows: closed-form flows, conformal models, ODE integration,
and the generator criteria.

Three sources of semiflows are supported:

* `FlowSpec` - the three closed-form families of automorphism flows
  (elliptic / hyperbolic / parabolic), exact at every t;
* `SemiflowModel` - conformal models phi_t = h^{-1}(e^{-ct} h) (interior
  fixed point) and h^{-1}(h + it) (boundary fixed point), inverted by
  Newton;
* `GeneratorSemiflow` - numerical flow of an arbitrary analytic G via
  adaptive Runge-Kutta 5(4) on u' = G(u).

The generator criteria implemented here: the interior inequality
Re(2 conj(z) G + (1-|z|^2) G') <= 0, the factorization
G = (alpha - z)(1 - conj(alpha) z) F with Re F >= 0, and the a.e.
radial boundary inequality Re(conj(z) G*) <= 0 (necessary only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import (
    DomainEscapeError,
    InversionError,
    NonConvergenceError,
    ParameterDomainError,
    StepLimitError,
)
from .expressions import AnalyticMap
from .mobius import MoebiusTransform
from .radial import estimate_radial_limit, radii

SCHEMA_VERSION = 1

_INTERIOR_RADII = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99])
_INTERIOR_TOL = 1e-9
_BOUNDARY_TOL = 1e-6


# --------------------------------------------------------------------------
# ODE configuration and integration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ODEConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 10 ** 6

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ParameterDomainError("tolerances must be positive")


DEFAULT_ODE = ODEConfig()
_ESCAPE_RADIUS = 1.0 - 1e-13


def integrate_semiflow(generator: AnalyticMap, z: complex, t: float,
                       config: ODEConfig = DEFAULT_ODE) -> complex:
    """Flow z for time t along u' = generator(u), staying in the disc."""
    if t < 0:
        raise ParameterDomainError("time must be >= 0")
    if abs(z) >= 1:
        raise ParameterDomainError(f"z={z} is not in the open disc")
    u, status, _ = K.integrate(generator.tape, z, t, config.rtol, config.atol,
                               config.max_steps, _ESCAPE_RADIUS)
    if status == K.ESCAPE:
        raise DomainEscapeError(
            f"trajectory from z={z} left the disc by t={t}: the map is not "
            "a disc generator, or tolerances are too loose")
    if status == K.STEP_LIMIT:
        raise StepLimitError(f"step budget exhausted integrating from z={z}")
    if status == K.NONFINITE:
        raise DomainEscapeError(f"generator overflowed along the path from z={z}")
    return u


class GeneratorSemiflow:
    """Semiflow obtained by integrating its generator numerically."""

    def __init__(self, generator: AnalyticMap, config: ODEConfig = DEFAULT_ODE):
        self.generator = generator
        self.config = config

    def __call__(self, t: float, z: complex) -> complex:
        return integrate_semiflow(self.generator, z, t, self.config)


# --------------------------------------------------------------------------
# closed-form automorphism flows
# --------------------------------------------------------------------------

def _as_unimodular(value, name):
    value = complex(value)
    if abs(abs(value) - 1.0) > 1e-9:
        raise ParameterDomainError(f"{name}={value} must lie on the unit circle")
    return value / abs(value)


@dataclass(frozen=True)
class FlowSpec:
    """Parameters of one of the three closed-form automorphism flows.

    elliptic:   interior fixed point alpha, real speed w != 0
    hyperbolic: boundary fixed points alpha1 != alpha2, rate c > 0
                (alpha1 attracting)
    parabolic:  boundary fixed point alpha, real speed w != 0

    Degenerate parameters (w=0, c=0, alpha1=alpha2) are rejected: the
    families cover nontrivial flows only.
    """

    variant: str
    alpha: complex = 0j
    alpha1: complex = 0j
    alpha2: complex = 0j
    w: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.variant == "elliptic":
            if abs(self.alpha) >= 1:
                raise ParameterDomainError("elliptic alpha must be interior")
            if self.w == 0:
                raise ParameterDomainError("elliptic speed w must be nonzero")
        elif self.variant == "hyperbolic":
            a1 = _as_unimodular(self.alpha1, "alpha1")
            a2 = _as_unimodular(self.alpha2, "alpha2")
            if abs(a1 - a2) < 1e-9:
                raise ParameterDomainError("hyperbolic fixed points must differ")
            if self.c <= 0:
                raise ParameterDomainError("hyperbolic rate c must be positive")
            object.__setattr__(self, "alpha1", a1)
            object.__setattr__(self, "alpha2", a2)
        elif self.variant == "parabolic":
            object.__setattr__(self, "alpha",
                               _as_unimodular(self.alpha, "alpha"))
            if self.w == 0:
                raise ParameterDomainError("parabolic speed w must be nonzero")
        else:
            raise ParameterDomainError(f"unknown variant {self.variant!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def elliptic(cls, alpha: complex, w: float) -> "FlowSpec":
        return cls("elliptic", alpha=complex(alpha), w=float(w))

    @classmethod
    def hyperbolic(cls, alpha1: complex, alpha2: complex, c: float) -> "FlowSpec":
        return cls("hyperbolic", alpha1=complex(alpha1), alpha2=complex(alpha2),
                   c=float(c))

    @classmethod
    def parabolic(cls, alpha: complex, w: float) -> "FlowSpec":
        return cls("parabolic", alpha=complex(alpha), w=float(w))

    # -- evaluation ----------------------------------------------------------

    def mobius_at(self, t: float) -> MoebiusTransform:
        """The time-t map as a Moebius transform (exact)."""
        if t < 0:
            raise ParameterDomainError("time must be >= 0")
        if self.variant == "elliptic":
            e = np.exp(-1j * self.w * t)
            aa = abs(self.alpha) ** 2
            return MoebiusTransform(
                e - aa, self.alpha * (1 - e),
                np.conj(self.alpha) * (e - 1), 1 - aa * e)
        if self.variant == "hyperbolic":
            e = np.exp(self.c * t)
            a1, a2 = self.alpha1, self.alpha2
            return MoebiusTransform(
                a2 - a1 * e, a1 * a2 * (e - 1), 1 - e, a2 * e - a1)
        iwt = 1j * self.w * t
        return MoebiusTransform(
            1 - iwt, iwt * self.alpha,
            -iwt * np.conj(self.alpha), 1 + iwt)

    def __call__(self, t: float, z):
        m = self.mobius_at(t)
        num = m.a * np.asarray(z, dtype=complex) + m.b
        den = m.c * np.asarray(z, dtype=complex) + m.d
        out = num / den
        return out if out.shape else complex(out)

    def map_at(self, t: float) -> AnalyticMap:
        return self.mobius_at(t).as_map("disc")

    # -- structure -----------------------------------------------------------

    def attracting_point(self) -> complex:
        if self.variant == "hyperbolic":
            return self.alpha1
        return self.alpha

    def generator_map(self) -> AnalyticMap:
        """Closed-form infinitesimal generator of the flow."""
        zm = AnalyticMap.identity("disc")
        if self.variant == "elliptic":
            a = self.alpha
            scale = 1j * self.w / (1 - abs(a) ** 2)
            return scale * (a - zm) * (1 - np.conj(a) * zm)
        if self.variant == "hyperbolic":
            a1, a2 = self.alpha1, self.alpha2
            return (self.c / (a2 - a1)) * (a2 - zm) * (a1 - zm)
        a = self.alpha
        return (1j * self.w * np.conj(a)) * (zm - a) ** 2

    # -- interchange -----------------------------------------------------------

    def to_json(self) -> dict:
        def cpx(v):
            return {"re": float(np.real(v)), "im": float(np.imag(v))}

        if self.variant == "elliptic":
            params = {"alpha": cpx(self.alpha), "w": self.w}
        elif self.variant == "hyperbolic":
            params = {"alpha1": cpx(self.alpha1), "alpha2": cpx(self.alpha2),
                      "c": self.c}
        else:
            params = {"alpha": cpx(self.alpha), "w": self.w}
        return {"version": SCHEMA_VERSION, "variant": self.variant,
                "params": params}

    @classmethod
    def from_json(cls, doc: dict) -> "FlowSpec":
        def cpx(v):
            return complex(v["re"], v["im"])

        params = doc["params"]
        variant = doc["variant"]
        if variant == "elliptic":
            return cls.elliptic(cpx(params["alpha"]), params["w"])
        if variant == "hyperbolic":
            return cls.hyperbolic(cpx(params["alpha1"]), cpx(params["alpha2"]),
                                  params["c"])
        if variant == "parabolic":
            return cls.parabolic(cpx(params["alpha"]), params["w"])
        raise ParameterDomainError(f"unknown variant {variant!r}")


def make_flow(spec: FlowSpec, t: float, z: complex) -> complex:
    """Closed-form flow value; validates the disc membership of both ends."""
    if abs(z) > 1:
        raise ParameterDomainError(f"z={z} is not in the closed disc")
    out = spec(t, z)
    if abs(out) > 1 + 1e-12:
        raise DomainEscapeError(f"flow value {out} left the closed disc")
    return out


def load_semiflow(doc):
    """Build a flow callable from its JSON document (or JSON text)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "variant" in doc:
        return FlowSpec.from_json(doc)
    if "generator" in doc:
        g = AnalyticMap.parse(doc["generator"], domain="disc")
        return GeneratorSemiflow(g)
    raise ParameterDomainError("semiflow document needs 'variant' or 'generator'")


# --------------------------------------------------------------------------
# conformal models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 50
    tol: float = 1e-12
    restarts: int = 16


@dataclass(frozen=True)
class SemiflowModel:
    """Semiflow transported through a conformal map h.

    interior mode: phi_t = h^{-1}(e^{-ct} h), Re c >= 0, h(0) = 0;
    boundary mode: phi_t = h^{-1}(h + it).
    h must be univalent on the disc (caller-asserted).
    """

    h: AnalyticMap
    mode: str = "interior"
    c: complex = 1.0 + 0j
    newton: NewtonConfig = field(default_factory=NewtonConfig)

    def __post_init__(self):
        if self.mode not in ("interior", "boundary"):
            raise ParameterDomainError(f"unknown mode {self.mode!r}")
        if self.mode == "interior":
            if self.c.real < 0:
                raise ParameterDomainError("interior mode needs Re c >= 0")
            if abs(self.h(0.0)) > 1e-10:
                raise ParameterDomainError("interior mode needs h(0) = 0")

    def __call__(self, t: float, z: complex) -> complex:
        return model_semiflow(self, t, z)


def _invert(h: AnalyticMap, target: complex, seed: complex,
            cfg: NewtonConfig) -> complex:
    hp = h.derivative()
    seeds = [seed]
    rad = abs(seed)
    for j in range(cfg.restarts):
        seeds.append(rad * np.exp(2j * np.pi * j / cfg.restarts))
    for u0 in seeds:
        u = complex(u0)
        for _ in range(cfg.max_iter):
            r = h(u) - target
            if abs(r) < cfg.tol:
                return u
            d = hp(u)
            if not np.isfinite(d) or abs(d) < 1e-15:
                break
            step = r / d
            u = u - step
            if not np.isfinite(u) or abs(u) > 2.0:
                break
        else:
            if abs(h(u) - target) < 1e-10:
                return u
        if np.isfinite(u) and abs(h(u) - target) < 1e-10:
            return u
    raise InversionError(f"Newton failed to invert h at target {target}")


def model_semiflow(model: SemiflowModel, t: float, z: complex) -> complex:
    """Evaluate the h-model semiflow; residual |h(result)-target| < 1e-10."""
    if t < 0:
        raise ParameterDomainError("time must be >= 0")
    if abs(z) >= 1:
        raise ParameterDomainError(f"z={z} is not in the open disc")
    hz = model.h(z)
    if model.mode == "interior":
        target = np.exp(-model.c * t) * hz
    else:
        target = hz + 1j * t
    u = _invert(model.h, target, z, model.newton)
    if abs(u) >= 1:
        raise DomainEscapeError(
            f"model value {u} left the disc (t={t}, z={z})")
    return u


# --------------------------------------------------------------------------
# generator extraction and criteria
# --------------------------------------------------------------------------

def generator_of(flow, z: complex) -> complex:
    """Richardson-extrapolated t -> 0 difference quotient of a flow.

    `flow` is any callable (t, z) -> point.  Also spot-checks the
    continuity normalization phi_t'(0) -> 1.
    """
    hs = (1e-3, 5e-4, 2.5e-4)
    quot = [(flow(h, z) - z) / h for h in hs]
    a1 = 2 * quot[1] - quot[0]
    a2 = 2 * quot[2] - quot[1]
    if abs(a2 - a1) > 1e-5:
        raise NonConvergenceError(
            f"difference quotients disagree by {abs(a2 - a1):.3e} at z={z}")
    eps = 1e-5
    dphi = (flow(hs[2], eps) - flow(hs[2], -eps)) / (2 * eps)
    if abs(dphi - 1.0) > 1e-2:
        raise NonConvergenceError(
            f"phi_t'(0)={dphi} does not tend to 1: flow is not continuous")
    return (4 * a2 - a1) / 3


def _polar_grid(radii_arr, n_angles):
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    return (radii_arr[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True)
class GeneratorCheckReport:
    interior_ok: bool
    boundary_ok: bool
    worst_interior_point: complex
    worst_interior_value: float
    worst_boundary_angle: float
    worst_boundary_value: float
    overflow_points: int

    @property
    def passed(self) -> bool:
        return self.interior_ok and self.boundary_ok

    def to_json(self) -> dict:
        return {
            "interior_ok": self.interior_ok,
            "boundary_ok": self.boundary_ok,
            "passed": self.passed,
            "worst_interior_point": [self.worst_interior_point.real,
                                     self.worst_interior_point.imag],
            "worst_interior_value": self.worst_interior_value,
            "worst_boundary_angle": self.worst_boundary_angle,
            "worst_boundary_value": self.worst_boundary_value,
            "overflow_points": self.overflow_points,
        }


def generator_check(G: AnalyticMap, n_angles: int = 64,
                    n_boundary_angles: int = 128) -> GeneratorCheckReport:
    """Interior inequality on a polar grid plus radial boundary limsups."""
    zs = _polar_grid(_INTERIOR_RADII, n_angles)
    gz = G(zs)
    gpz = G.derivative()(zs)
    vals = np.real(2 * np.conj(zs) * gz + (1 - np.abs(zs) ** 2) * gpz)
    finite = np.isfinite(vals)
    overflow = int(np.sum(~finite))
    worst_i = int(np.nanargmax(np.where(finite, vals, -np.inf)))
    interior_ok = bool(np.all(vals[finite] <= _INTERIOR_TOL)) and overflow == 0

    rs = radii()
    theta = 2 * np.pi * np.arange(n_boundary_angles) / n_boundary_angles
    grid = rs[:, None] * np.exp(1j * theta)[None, :]
    w = np.real(np.conj(grid) * G(grid.ravel()).reshape(grid.shape))
    worst_b_val = -np.inf
    worst_b_angle = 0.0
    for j in range(n_boundary_angles):
        col = w[:, j]
        finite_col = np.isfinite(col)
        if not np.all(finite_col):
            overflow += int(np.sum(~finite_col))
            col = col[finite_col]
            if len(col) < 3:
                continue
        est = estimate_radial_limit(col).value
        if est > worst_b_val:
            worst_b_val = est
            worst_b_angle = theta[j]
    boundary_ok = worst_b_val <= _BOUNDARY_TOL
    return GeneratorCheckReport(
        interior_ok=interior_ok,
        boundary_ok=bool(boundary_ok),
        worst_interior_point=complex(zs[worst_i]),
        worst_interior_value=float(vals[worst_i]) if finite[worst_i] else np.inf,
        worst_boundary_angle=float(worst_b_angle),
        worst_boundary_value=float(worst_b_val),
        overflow_points=overflow,
    )


@dataclass(frozen=True)
class FactorReport:
    """Values of F = G / ((alpha-z)(1-conj(alpha) z)) on the grid."""

    passed: bool
    min_re: float
    argmin: complex
    skipped: int
    points: np.ndarray
    values: np.ndarray

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "min_re": self.min_re,
            "argmin": [self.argmin.real, self.argmin.imag],
            "skipped": self.skipped,
        }


def berkson_porta_factor(G: AnalyticMap, alpha: complex,
                         n_angles: int = 64) -> FactorReport:
    """Factor out the fixed point and test Re F >= 0 on the polar grid."""
    zs = _polar_grid(_INTERIOR_RADII, n_angles)
    den = (alpha - zs) * (1 - np.conj(alpha) * zs)
    keep = (np.abs(zs - alpha) > 1e-6) & (np.abs(den) > 1e-12)
    skipped = int(np.sum(~keep))
    zs = zs[keep]
    f = G(zs) / den[keep]
    finite = np.isfinite(f)
    skipped += int(np.sum(~finite))
    zs, f = zs[finite], f[finite]
    re = np.real(f)
    i = int(np.argmin(re))
    return FactorReport(
        passed=bool(re[i] >= -_INTERIOR_TOL),
        min_re=float(re[i]),
        argmin=complex(zs[i]),
        skipped=skipped,
        points=zs,
        values=f,
    )


@dataclass(frozen=True)
class BoundaryCheckReport:
    """Radial a.e. boundary test; necessary-only unless G is known
    integrable enough for the boundary values to determine G."""

    passed: bool
    necessary_only: bool
    max_estimate: float
    worst_angle: float
    divergent_angles: tuple
    estimates: np.ndarray

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "necessary_only": self.necessary_only,
            "max_estimate": self.max_estimate,
            "worst_angle": self.worst_angle,
            "divergent_angles": list(self.divergent_angles),
        }


def boundary_generator_check(G: AnalyticMap,
                             n_angles: int = 256) -> BoundaryCheckReport:
    """Estimate Re(conj(z) G(z)) radially at the boundary, a.e. style.

    Angles whose radial values diverge are flagged and excluded from the
    maximum (they form a null set for the a.e. condition); everything
    else must extrapolate to <= 1e-6.
    """
    rs = radii()
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    grid = rs[:, None] * np.exp(1j * theta)[None, :]
    w = np.real(np.conj(grid) * G(grid.ravel()).reshape(grid.shape))
    estimates = np.full(n_angles, -np.inf)
    divergent = []
    for j in range(n_angles):
        col = w[:, j]
        est = estimate_radial_limit(col[np.isfinite(col)])
        if est.diverged and est.value > 0:
            divergent.append(float(theta[j]))
            continue
        estimates[j] = est.value if np.isfinite(est.value) else -np.inf
    finite_est = estimates[np.isfinite(estimates)]
    if len(finite_est):
        worst = int(np.argmax(estimates))
        max_est = float(estimates[worst])
        worst_angle = float(theta[worst])
    else:
        max_est, worst_angle = -np.inf, 0.0
    return BoundaryCheckReport(
        passed=bool(max_est <= _BOUNDARY_TOL),
        necessary_only=True,
        max_estimate=max_est,
        worst_angle=worst_angle,
        divergent_angles=tuple(divergent),
        estimates=estimates,
    )
