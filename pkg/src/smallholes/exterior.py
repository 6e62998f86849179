"""Harmonic extension of boundary data to the exterior of an inclusion.

Boundary data F given on the mapped-circle parametrization of the inclusion
boundary extends to the unique bounded harmonic function outside the shape.
In mapped coordinates W = T(X) the field is the classical exterior-disk
extension

    Psi(X) = far_constant + Re sum_{k>=1} d_k W^{-k},

with far_constant the circle mean of the data (the limit value at infinity)
and d_k = a_k + i b_k the cosine/sine tail amplitudes.  Evaluation composes
with the map, so the data is reproduced exactly on the boundary; the decaying
tail obeys |X|^n |R_n(X)| <= C_n sup|F|, which `tail_sup` measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction, angles
from .conformal import ExteriorMap
from .errors import ResolutionWarning


@dataclass(frozen=True, eq=False)
class HarmonicExteriorField:
    """Bounded harmonic field outside an inclusion, in mapped coordinates."""

    far_constant: float
    tail: np.ndarray            # d_k = a_k + i b_k, k = 1..order
    map: ExteriorMap = field(repr=False)
    order: int
    data_sup: float

    @property
    def cos_coeffs(self) -> np.ndarray:
        return np.real(self.tail)

    @property
    def sin_coeffs(self) -> np.ndarray:
        return np.imag(self.tail)

    @property
    def derivative_coeffs(self) -> np.ndarray:
        """Coefficients c_k (k >= 2) of the holomorphic derivative series."""
        ks = np.arange(1, self.order + 1)
        return -ks * self.tail

    def tail_eval(self, x):
        """The decaying part Psi - far_constant."""
        w = self.map.forward(np.asarray(x, dtype=complex))
        out = np.real(_tail_series(self.tail, 1.0 / w))
        return out if np.ndim(x) else float(out)

    def evaluate(self, x):
        """Field value at points strictly outside (or on) the inclusion."""
        out = self.far_constant + self.tail_eval(x)
        return out if np.ndim(x) else float(out)

    __call__ = evaluate

    def completion(self, w):
        """Holomorphic completion far_constant + sum d_k w^{-k} in mapped coords."""
        w = np.asarray(w, dtype=complex)
        return self.far_constant + _tail_series(self.tail, 1.0 / w)


def _tail_series(coeffs: np.ndarray, v: np.ndarray):
    """sum_{k>=1} coeffs[k-1] v^k by Horner."""
    acc = np.zeros_like(v)
    for c in coeffs[::-1]:
        acc = (acc + c) * v
    return acc


def check_resolution(data: BoundaryFunction):
    """Warn when the Fourier tail above degree M/4 is not negligible."""
    if data.tail_sup(data.size // 4) > 1e-6 * max(data.sup_norm, 1e-300):
        warnings.warn(
            f"boundary data on {data.boundary_id!r} looks under-resolved at"
            f" M={data.size}", ResolutionWarning, stacklevel=3)


def solve_exterior(mapping: ExteriorMap, data: BoundaryFunction) -> HarmonicExteriorField:
    """Exterior Dirichlet extension of data sampled at gamma(theta) = T^{-1}(e^{i theta})."""
    check_resolution(data)
    tail = data.mode_amplitudes()
    return HarmonicExteriorField(
        far_constant=far_constant_of(mapping, data),
        tail=tail,
        map=mapping,
        order=tail.size,
        data_sup=data.sup_norm,
    )


def far_constant_of(mapping: ExteriorMap, data: BoundaryFunction) -> float:
    """Limit value at infinity: the trapezoid circle mean of the mapped data.

    The mapping argument documents the parametrization; the mean itself sees
    only the samples.  Shared with solve_exterior so the two agree bitwise.
    """
    return float(np.mean(data.samples))


def tail_sup(field_: HarmonicExteriorField, n: int, radius: float,
             samples: int = 256) -> float:
    """sup over a circle of |X|^n |R_n(X)| with R_n the tail from index n on."""
    if n < 1:
        raise ValueError("tail index must be >= 1")
    x = radius * np.exp(1j * angles(samples))
    w = field_.map.forward(x)
    rest = np.real(_tail_series(field_.tail[n - 1 :], 1.0 / w) * w ** (-(n - 1)))
    return float(radius**n * np.max(np.abs(rest)))


def contour_mean(field_: HarmonicExteriorField, samples: int = 512) -> float:
    """Discrete contour integral (1/2*pi*i) oint completion(w)/w dw on |w| = 2.

    Its real part recovers far_constant: the criterion for a vanishing
    constant is that this integral vanishes.
    """
    w = 2.0 * np.exp(1j * angles(samples))
    return float(np.real(np.mean(field_.completion(w))))
