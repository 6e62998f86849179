"""Per-inclusion lifting profiles and the slow logarithmic gauge.

For an inclusion of shape omega shrunk to ``center + eps*omega`` inside the
outer domain, the corrector is the harmonic function

    corrector(x) = log_modulus(x) - log_extension(x),

where log_modulus(x) = ln|T_eps(x)| equals ln(eps) on the inclusion boundary
and grows like ln(capacity*|x - center|), while log_extension is the interior
harmonic extension of exactly that logarithmic trace from the outer boundary.
The corrector is therefore ln(eps) - log_extension on the hole and O(eps) on
the outer boundary; correction amplitudes ride on the gauge

    log_scale = 1 / (log_extension(center) - ln eps),

which tends to zero like 1/|ln eps|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction, angles
from .conformal import ExteriorMap, InteriorMap, RescaledMap
from .errors import GeometryError, ScaleDegeneracyError
from .interior import HarmonicInteriorField, solve_interior

_INSIDE_TOL = 1e-9
DEGENERACY_MARGIN = 0.1


@dataclass(frozen=True, eq=False)
class Profile:
    """Lifting profile of one inclusion at a fixed size eps."""

    index: int
    center: complex
    eps: float
    capacity: float
    rescaled: RescaledMap = field(repr=False)
    log_extension: HarmonicInteriorField = field(repr=False)
    domain: InteriorMap = field(repr=False)
    extension_at_center: float
    log_scale: float
    outer_mismatch: float       # measured sup over the outer boundary of |corrector| / eps

    def log_modulus(self, x):
        """ln |T_eps(x)|; requires x outside the open inclusion."""
        x_arr = np.asarray(x, dtype=complex)
        w = self.rescaled.base.forward((x_arr - self.center) / self.eps)
        out = np.log(self.eps) + np.log(np.abs(w))
        return out if np.ndim(x) else float(out)

    def corrector(self, x):
        """log_modulus - log_extension on the closure of the perforated domain."""
        out = self.log_modulus(x) - self.log_extension.evaluate(x)
        return out if np.ndim(x) else float(out)

    __call__ = corrector

    def hole_boundary(self, theta):
        return self.rescaled.boundary(theta)

    @property
    def denominator(self) -> float:
        """log_extension(center) - ln eps, the gauge denominator."""
        return self.extension_at_center - np.log(self.eps)


def build_profile(domain: InteriorMap, shape_map: ExteriorMap, center, eps,
                  index: int = 0, samples: int = 256) -> Profile:
    """Build the lifting profile for one inclusion.

    Raises GeometryError when the shrunk inclusion is not strictly inside the
    outer domain and ScaleDegeneracyError when eps is too large for the
    logarithmic gauge.
    """
    center = complex(center)
    eps = float(eps)
    rescaled = shape_map.rescaled(center, eps)
    hole = rescaled.boundary(angles(128))
    if np.any(np.abs(domain.forward(hole)) >= 1.0 - _INSIDE_TOL):
        raise GeometryError("inclusion touches or crosses the outer boundary")

    outer = domain.boundary(angles(samples))
    trace = np.log(shape_map.capacity * np.abs(outer - center))
    ext = solve_interior(domain, BoundaryFunction(trace, boundary_id="outer"))
    at_center = ext.evaluate(center)
    denom = at_center - np.log(eps)
    if denom <= 0.0:
        raise ScaleDegeneracyError(
            f"eps={eps:g} at or beyond the gauge degeneracy exp(w(center))={np.exp(at_center):g}")

    mism = shape_map.forward((outer - center) / eps)
    mismatch = np.log(eps * np.abs(mism)) - trace
    profile = Profile(
        index=index,
        center=center,
        eps=eps,
        capacity=shape_map.capacity,
        rescaled=rescaled,
        log_extension=ext,
        domain=domain,
        extension_at_center=at_center,
        log_scale=1.0 / denom,
        outer_mismatch=float(np.max(np.abs(mismatch)) / eps),
    )
    return profile
