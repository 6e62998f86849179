"""Harmonic extension of boundary data into the outer domain.

Data phi sampled at gamma0(theta) = (T0)^{-1}(e^{i theta}) extends into the
domain as the Poisson series in mapped coordinates,

    field(x) = Re( mean + sum_{k>=1} mu_k W^k ),      W = T0(x),

which is spectrally accurate for smooth data and needs no singular
quadrature.  The holomorphic completion h(W) also gives the gradient:
grad = conj(h'(W) * T0'(x)) read as (d/dx1) + i (d/dx2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction
from .conformal import InteriorMap
from .errors import DomainError

_EVAL_TOL = 1e-9  # slack above |W| = 1 for boundary-trace evaluation


@dataclass(frozen=True, eq=False)
class HarmonicInteriorField:
    """Harmonic function in the outer domain matching sampled boundary data."""

    mean: float                 # value at the mapped center
    modes: np.ndarray           # mu_k, k = 1..order
    domain: InteriorMap = field(repr=False)
    data_sup: float

    def _mapped(self, x):
        w = self.domain.forward(np.asarray(x, dtype=complex))
        if np.any(np.abs(w) > 1.0 + _EVAL_TOL):
            raise DomainError("point outside the outer domain")
        return w

    def completion(self, w):
        acc = np.zeros_like(w)
        for c in self.modes[::-1]:
            acc = (acc + c) * w
        return self.mean + acc

    def evaluate(self, x):
        out = np.real(self.completion(self._mapped(x)))
        return out if np.ndim(x) else float(out)

    __call__ = evaluate

    def gradient(self, x):
        """Gradient packed as (d1 field) + i (d2 field)."""
        w = self._mapped(x)
        acc = np.zeros_like(w)
        ks = np.arange(self.modes.size, 0, -1)
        for k, c in zip(ks, self.modes[::-1]):
            acc = acc * w + k * c
        out = np.conj(acc * self.domain.forward_deriv(np.asarray(x, dtype=complex)))
        return out if np.ndim(x) else complex(out)


def solve_interior(domain: InteriorMap, data: BoundaryFunction) -> HarmonicInteriorField:
    """Interior Dirichlet extension of data sampled at gamma0(theta)."""
    return HarmonicInteriorField(
        mean=data.mean,
        modes=data.mode_amplitudes().conj(),
        domain=domain,
        data_sup=data.sup_norm,
    )


class ZeroField:
    """Harmonic extension of identically-zero data (recursion seeds)."""

    mean = 0.0
    data_sup = 0.0

    def evaluate(self, x):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0

    __call__ = evaluate

    def gradient(self, x):
        return np.zeros(np.shape(x), dtype=complex) if np.ndim(x) else 0.0j
