"""Scene description: outer domain, inclusions, forcing, and regime detection.

Inclusion centers may drift with the inclusion size:
``center(eps) = base_center + eps**exponent * offset`` with exponent in [0, 1),
so pairwise distances can sit at a scale between eps and 1.  The regime
classifier inspects the pairwise distance exponents and tags the scene as
separated, clustered, mixed (one close pair, the rest far), or three-scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .conformal import DEFAULT_ORDER, ExteriorMap, InteriorMap, ShapeSpec, build_exterior_map
from .errors import GeometryError, GeometryWarning

SEPARATION_ERROR_RATIO = 3.0    # centers closer than this times eps: reject
SEPARATION_WARN_RATIO = 10.0    # below this the asymptotic regime is marginal


@dataclass(frozen=True)
class Forcing:
    """Right-hand side with a closed-form particular solution.

    kinds: "zero"; "constant" (value f0, particular -f0|x|^2/4);
    "point_sources" (charges q_j at s_j, particular -sum q_j ln|x-s_j|/2pi).
    """

    kind: str = "zero"
    value: float = 0.0
    sources: tuple = ()

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "point_sources"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        object.__setattr__(
            self, "sources",
            tuple((complex(s), float(q)) for s, q in self.sources))

    def particular(self, x):
        """A closed-form u_p with -laplace(u_p) = forcing."""
        x_arr = np.asarray(x, dtype=complex)
        if self.kind == "zero":
            out = np.zeros(x_arr.shape)
        elif self.kind == "constant":
            out = -0.25 * self.value * (np.abs(x_arr) ** 2)
        else:
            out = np.zeros(x_arr.shape)
            for s, q in self.sources:
                out = out - q / (2.0 * np.pi) * np.log(np.abs(x_arr - s))
        return out if np.ndim(x) else float(out)

    def density(self, x):
        """The smooth part of the forcing at x (point sources excluded)."""
        if self.kind == "constant":
            return self.value if np.ndim(x) == 0 else np.full(np.shape(x), self.value)
        return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))


@dataclass(frozen=True, eq=False)
class Inclusion:
    """One inclusion: shape (with its exterior map) and center trajectory."""

    shape: ShapeSpec
    map: ExteriorMap = field(repr=False)
    base_center: complex = 0j
    offset: complex = 0j
    exponent: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.exponent < 1.0):
            raise GeometryError(
                f"center drift exponent must lie in [0, 1), got {self.exponent}")

    def center(self, eps: float) -> complex:
        if self.offset == 0:
            return self.base_center
        return self.base_center + eps**self.exponent * self.offset

    @classmethod
    def build(cls, shape: ShapeSpec, base_center=0j, offset=0j, exponent=0.0,
              order: int = DEFAULT_ORDER):
        return cls(shape=shape, map=build_exterior_map(shape, order),
                   base_center=complex(base_center), offset=complex(offset),
                   exponent=float(exponent))


@dataclass(frozen=True)
class Regime:
    """Leading interaction structure of a multi-inclusion scene."""

    kind: str                   # separated | clustered | mixed | three_scale | general | single
    alpha: float = 0.0
    beta: float = 0.0
    close_pair: tuple = (0, 1)  # indices of the interacting pair (mixed regime)


@dataclass(frozen=True, eq=False)
class Scene:
    """Immutable problem description at one inclusion size eps."""

    domain: InteriorMap
    inclusions: tuple
    forcing: Forcing
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "inclusions", tuple(self.inclusions))
        if self.eps <= 0:
            raise GeometryError("eps must be positive")
        self.validate()

    @property
    def n_inclusions(self) -> int:
        return len(self.inclusions)

    def centers(self) -> np.ndarray:
        return np.array([inc.center(self.eps) for inc in self.inclusions])

    def at(self, eps: float) -> "Scene":
        """The same scene at a different inclusion size (revalidated)."""
        return replace(self, eps=float(eps))

    def min_center_distance(self) -> float:
        c = self.centers()
        if c.size < 2:
            return np.inf
        d = np.abs(c[:, None] - c[None, :])
        return float(np.min(d[~np.eye(c.size, dtype=bool)]))

    def validate(self):
        c = self.centers()
        radii = np.array([inc.map.boundary_radius for inc in self.inclusions])
        for i, inc in enumerate(self.inclusions):
            hole = c[i] + self.eps * inc.map.boundary(np.linspace(0, 2 * np.pi, 64))
            if np.any(np.abs(self.domain.forward(hole)) >= 1.0 - 1e-9):
                raise GeometryError(f"inclusion {i} is not strictly inside the outer domain")
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                d = abs(c[i] - c[j])
                if d <= 1e-12:
                    raise GeometryError(f"inclusions {i} and {j} share a center")
                if d <= self.eps * (radii[i] + radii[j]):
                    raise GeometryError(
                        f"inclusions {i} and {j} overlap (center distance {d:.3g})")
                if d < SEPARATION_ERROR_RATIO * self.eps:
                    raise GeometryError(
                        f"inclusions {i} and {j} closer than {SEPARATION_ERROR_RATIO} eps")
                if d < SEPARATION_WARN_RATIO * self.eps:
                    warnings.warn(
                        f"inclusions {i} and {j}: center distance {d:.3g} below "
                        f"{SEPARATION_WARN_RATIO} eps; asymptotic regime is marginal",
                        GeometryWarning, stacklevel=2)
        if self.forcing.kind == "point_sources":
            for s, _ in self.forcing.sources:
                if not self.domain.contains(s):
                    raise GeometryError(f"point source {s} outside the outer domain")
                for i in range(len(c)):
                    if abs(s - c[i]) < self.eps * radii[i] + 2.0 * self.eps:
                        raise GeometryError(
                            f"point source {s} within 2 eps of inclusion {i}")

    # -- regime classification ---------------------------------------------

    def pair_exponents(self) -> np.ndarray:
        """Leading exponent e_ij of each pairwise distance |x_i - x_j| ~ eps^e."""
        n = self.n_inclusions
        e = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.inclusions[i], self.inclusions[j]
                if abs(a.base_center - b.base_center) > 1e-12:
                    eij = 0.0
                elif abs(a.exponent - b.exponent) <= 1e-12:
                    eij = a.exponent
                else:
                    # the slower-decaying offset dominates the separation
                    eij = min(a.exponent, b.exponent)
                e[i, j] = e[j, i] = eij
        return e

    def regime(self) -> Regime:
        n = self.n_inclusions
        if n <= 1:
            return Regime(kind="single")
        e = self.pair_exponents()
        iu = np.triu_indices(n, 1)
        vals = e[iu]
        if np.all(vals <= 1e-12):
            return Regime(kind="separated")
        if np.all(np.abs(vals - vals[0]) <= 1e-12) and vals[0] > 0:
            return Regime(kind="clustered", alpha=float(vals[0]))
        positive = [(i, j) for i, j in zip(*iu) if e[i, j] > 1e-12]
        if n >= 3 and len(positive) == 1:
            return Regime(kind="mixed", alpha=float(e[positive[0]]),
                          close_pair=positive[0])
        if n == 3:
            v = sorted(vals, reverse=True)
            if v[1] > 1e-12 and abs(v[1] - v[2]) <= 1e-12 and v[0] >= v[1]:
                # one pair at eps^alpha, the third inclusion at eps^beta from both
                alpha, beta = float(v[0]), float(v[1])
                pair = max(zip(*iu), key=lambda ij: e[ij])
                if 0.0 < beta <= alpha < 1.0:
                    return Regime(kind="three_scale", alpha=alpha, beta=beta,
                                  close_pair=pair)
        return Regime(kind="general")
