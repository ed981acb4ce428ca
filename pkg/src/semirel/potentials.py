"""Single-well 1D interaction potentials with a known minimum.

Only non-singular well shapes are representable: a harmonic well, an
even-power quartic well, and an attractive Gaussian well.  The solvers
assume exactly one oscillating region, so construction is permissive but
:func:`validate_single_well` rejects anything that is not monotone on both
sides of the claimed minimum (e.g. a double well).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PotentialSpec",
    "SingleWellError",
    "harmonic",
    "quartic",
    "gaussian_well",
    "from_config",
    "to_config",
    "evaluate",
    "as_scalar_fn",
    "validate_single_well",
    "curvature_at_min",
    "dissociation_limit",
    "turning_points",
]

HARMONIC = "harmonic"
QUARTIC = "quartic"
GAUSSIAN_WELL = "gaussian-well"

_KINDS = (HARMONIC, QUARTIC, GAUSSIAN_WELL)


class SingleWellError(ValueError):
    """Raised when a potential fails the single-well monotonicity check."""


@dataclass(frozen=True)
class PotentialSpec:
    """A potential V(x) of a fixed kind with its minimum location and value.

    params:
      harmonic       (beta,)          V = beta x^2 / 2
      quartic        (beta2, beta4)   V = beta2 x^2 / 2 + beta4 x^4 / 4
      gaussian-well  (depth, width)   V = -depth exp(-x^2 / (2 width^2))
    """

    kind: str
    params: tuple
    x_min: float
    V0: float
    symmetric: bool

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")


def harmonic(beta: float) -> PotentialSpec:
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"harmonic stiffness must be positive and finite, got {beta!r}")
    return PotentialSpec(HARMONIC, (float(beta),), 0.0, 0.0, True)


def quartic(beta2: float, beta4: float) -> PotentialSpec:
    """Quartic well beta2 x^2/2 + beta4 x^4/4.

    beta4 < 0 is rejected (unbounded below, no bound states).  beta2 < 0 is
    representable so that double wells can be constructed and then rejected
    by validate_single_well.
    """
    if beta4 < 0.0 or not (math.isfinite(beta2) and math.isfinite(beta4)):
        raise ValueError(f"quartic coefficients must be finite with beta4 >= 0, got {(beta2, beta4)!r}")
    if beta2 == 0.0 and beta4 == 0.0:
        raise ValueError("quartic coefficients must not both be zero")
    return PotentialSpec(QUARTIC, (float(beta2), float(beta4)), 0.0, 0.0, True)


def gaussian_well(depth: float, width: float) -> PotentialSpec:
    if not (depth > 0.0 and math.isfinite(depth)):
        raise ValueError(f"well depth must be positive and finite, got {depth!r}")
    if not (width > 0.0 and math.isfinite(width)):
        raise ValueError(f"well width must be positive and finite, got {width!r}")
    return PotentialSpec(GAUSSIAN_WELL, (float(depth), float(width)), 0.0, -float(depth), True)


def from_config(record: dict) -> PotentialSpec:
    """Build a spec from a config record such as {"kind": "harmonic", "beta": 1.0}."""
    kind = record.get("kind")
    if kind == HARMONIC:
        return harmonic(record["beta"])
    if kind == QUARTIC:
        return quartic(record["beta2"], record["beta4"])
    if kind == GAUSSIAN_WELL:
        return gaussian_well(record["depth"], record["width"])
    raise ValueError(f"unknown potential kind {kind!r}")


def to_config(spec: PotentialSpec) -> dict:
    if spec.kind == HARMONIC:
        return {"kind": HARMONIC, "beta": spec.params[0]}
    if spec.kind == QUARTIC:
        return {"kind": QUARTIC, "beta2": spec.params[0], "beta4": spec.params[1]}
    return {"kind": GAUSSIAN_WELL, "depth": spec.params[0], "width": spec.params[1]}


def evaluate(spec: PotentialSpec, x):
    """V(x); accepts scalars or numpy arrays."""
    if spec.kind == HARMONIC:
        (beta,) = spec.params
        return 0.5 * beta * np.square(x)
    if spec.kind == QUARTIC:
        beta2, beta4 = spec.params
        x2 = np.square(x)
        return 0.5 * beta2 * x2 + 0.25 * beta4 * np.square(x2)
    depth, width = spec.params
    return -depth * np.exp(-np.square(x) / (2.0 * width * width))


def as_scalar_fn(spec: PotentialSpec):
    """Fast scalar closure for V(x), for use inside integration loops."""
    if spec.kind == HARMONIC:
        (beta,) = spec.params
        half_beta = 0.5 * beta
        return lambda x: half_beta * x * x
    if spec.kind == QUARTIC:
        beta2, beta4 = spec.params
        b2, b4 = 0.5 * beta2, 0.25 * beta4
        return lambda x: (b2 + b4 * x * x) * x * x
    depth, width = spec.params
    inv = 1.0 / (2.0 * width * width)
    return lambda x: -depth * math.exp(-x * x * inv)


def validate_single_well(spec: PotentialSpec, domain: tuple, samples: int = 1001):
    """Confirm V is non-increasing left of x_min and non-decreasing right of it.

    Sampling-based: cheap and adequate for the smooth built-in shapes.
    Returns (x_min, V0) on success; raises SingleWellError otherwise.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    if not (lo < spec.x_min < hi):
        raise ValueError(f"domain {domain!r} does not contain x_min={spec.x_min}")
    xs = np.linspace(lo, hi, samples)
    vs = np.asarray(evaluate(spec, xs), dtype=float)
    scale = max(float(np.max(np.abs(vs))), abs(spec.V0), 1.0)
    tol = 1e-12 * scale

    i_min = int(np.argmin(vs))
    dx = xs[1] - xs[0]
    if abs(xs[i_min] - spec.x_min) > dx + 1e-12:
        raise SingleWellError(
            f"potential is not single-well on domain: sampled minimum at x={xs[i_min]:.6g}, "
            f"declared x_min={spec.x_min:.6g}"
        )
    diffs = np.diff(vs)
    left = diffs[: i_min]
    right = diffs[i_min:]
    if np.any(left > tol) or np.any(right < -tol):
        raise SingleWellError("potential is not single-well on domain")
    v_min = float(evaluate(spec, spec.x_min))
    if abs(v_min - spec.V0) > tol:
        raise SingleWellError(
            f"potential is not single-well on domain: V(x_min)={v_min:.6g} != declared V0={spec.V0:.6g}"
        )
    return spec.x_min, spec.V0


def curvature_at_min(spec: PotentialSpec) -> float:
    """V''(x_min); analytic for the built-ins, used to seed energy brackets."""
    if spec.kind == HARMONIC:
        return spec.params[0]
    if spec.kind == QUARTIC:
        return spec.params[0]
    depth, width = spec.params
    return depth / (width * width)


def dissociation_limit(spec: PotentialSpec):
    """Supremum of V at large |x|, or None when the well confines everything."""
    if spec.kind == GAUSSIAN_WELL:
        return 0.0
    return None


def turning_points(spec: PotentialSpec, eps: float, x_span: float = 1e6) -> tuple:
    """Classical turning points (x_lo, x_hi) where V(x) = eps.

    eps must exceed V0 and, for wells with a dissociation limit, stay below
    it.  Each side is located by an expanding bracket plus bisection.
    """
    if eps <= spec.V0:
        raise ValueError(f"eps={eps!r} does not exceed the well minimum V0={spec.V0!r}")
    limit = dissociation_limit(spec)
    if limit is not None and eps >= limit:
        raise ValueError(f"eps={eps!r} is above the dissociation limit {limit!r}")

    v = as_scalar_fn(spec)

    def _side(direction: int) -> float:
        step = 1.0
        inner = spec.x_min
        while True:
            outer = spec.x_min + direction * step
            if v(outer) > eps:
                break
            inner = outer
            step *= 2.0
            if step > x_span:
                raise ValueError("no turning point found within search span")
        for _ in range(200):
            mid = 0.5 * (inner + outer)
            if v(mid) > eps:
                outer = mid
            else:
                inner = mid
            if abs(outer - inner) <= 1e-14 * max(1.0, abs(outer)):
                break
        return 0.5 * (inner + outer)

    return _side(-1), _side(+1)
