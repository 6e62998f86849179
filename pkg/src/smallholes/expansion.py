"""Assembly of the asymptotic expansion for the perforated Dirichlet problem.

Writing base for the solution of the unperforated problem, one correction
level adds, per inclusion, the exterior lifting of the hole trace (minus its
far-field constant) plus an amplitude times the lifting corrector:

    bundle(x) = v0(x) + sum_i [lift_i((x - c_i)/eps) - far_i]
                      + sum_i amp_i * corrector_i(x).

For a single inclusion the amplitude is the explicit quotient
(v0(c) - far) / (w(c) - ln eps) and the construction iterates: the residual
traces of level k, divided by eps, become the boundary data of level k+1.
For several inclusions the amplitudes solve the interaction system, and the
construction stops at the first correction level.

An expansion of order k means base plus k correction levels; its boundary
residual is the primary convergence-measurement instrument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction, angles
from .conformal import InteriorMap
from .errors import ScaleDegeneracyError
from .exterior import HarmonicExteriorField, solve_exterior
from .interactions import InteractionMatrix
from .interior import HarmonicInteriorField, ZeroField, solve_interior
from .profiles import DEGENERACY_MARGIN, Profile, build_profile
from .scenes import Scene

TRACE_SAMPLES = 256


# ---------------------------------------------------------------------------
# base (unperforated) solution


@dataclass(frozen=True, eq=False)
class BaseSolution:
    """Solution of the Dirichlet problem without inclusions: particular + lift."""

    scene: Scene = field(repr=False)
    correction: HarmonicInteriorField | ZeroField = field(repr=False)

    def evaluate(self, x):
        out = self.scene.forcing.particular(x) + self.correction.evaluate(x)
        return out if np.ndim(x) else float(out)

    __call__ = evaluate


def base_solution(scene: Scene) -> BaseSolution:
    """Solve the unperforated problem: particular solution minus its boundary trace."""
    if scene.forcing.kind == "zero":
        return BaseSolution(scene=scene, correction=ZeroField())
    trace = scene.forcing.particular(scene.domain.boundary(angles(TRACE_SAMPLES)))
    lift = solve_interior(scene.domain, BoundaryFunction(-trace, boundary_id="outer"))
    return BaseSolution(scene=scene, correction=lift)


# ---------------------------------------------------------------------------
# correction bundles


@dataclass(frozen=True, eq=False)
class CorrectionBundle:
    """One correction level: interior lift, exterior liftings, corrector weights."""

    level: int
    outer_field: HarmonicInteriorField | ZeroField = field(repr=False)
    profiles: tuple = field(repr=False)
    hole_fields: tuple = field(repr=False)
    far_constants: np.ndarray
    amplitudes: np.ndarray
    residual_outer: BoundaryFunction = field(repr=False)
    residual_holes: tuple = field(repr=False)
    residual_sup: float
    stability_constant: float

    def evaluate(self, x):
        out = self.outer_field.evaluate(x)
        for prof, lift, amp in zip(self.profiles, self.hole_fields, self.amplitudes):
            out = out + lift.tail_eval((np.asarray(x, dtype=complex) - prof.center) / prof.eps)
            out = out + amp * prof.corrector(x)
        return out if np.ndim(x) else float(out)

    __call__ = evaluate


def _bundle_residuals(scene, bundle_eval, outer_data, hole_datas, profiles):
    """Residual traces (data - trace)/eps on every boundary component."""
    eps = scene.eps
    m_out = outer_data.size if outer_data is not None else TRACE_SAMPLES
    outer_pts = scene.domain.boundary(angles(m_out))
    target = outer_data.samples if outer_data is not None else 0.0
    r_out = BoundaryFunction((target - bundle_eval(outer_pts)) / eps, boundary_id="outer")
    r_holes = []
    for i, prof in enumerate(profiles):
        pts = prof.hole_boundary(angles(hole_datas[i].size))
        ft = hole_datas[i].samples
        r_holes.append(BoundaryFunction((ft - bundle_eval(pts)) / eps, boundary_id=i))
    return r_out, tuple(r_holes)


def correction_step(scene: Scene, profile: Profile,
                    outer_data: BoundaryFunction | None,
                    hole_data: BoundaryFunction, level: int = 0) -> CorrectionBundle:
    """One single-inclusion correction for boundary data (outer_data, hole_data).

    Returns the term bundle together with the residual traces that feed the
    next level; the recorded stability constant is residual_sup divided by
    the combined data sup.
    """
    if profile.denominator <= DEGENERACY_MARGIN:
        raise ScaleDegeneracyError(
            f"gauge denominator {profile.denominator:.3g} below {DEGENERACY_MARGIN}")
    v0 = ZeroField() if outer_data is None else solve_interior(scene.domain, outer_data)
    lift = solve_exterior(profile.rescaled.base, hole_data)
    far = lift.far_constant
    amp = (v0.evaluate(profile.center) - far) * profile.log_scale

    def trace(x):
        x = np.asarray(x, dtype=complex)
        return (v0.evaluate(x) + lift.tail_eval((x - profile.center) / profile.eps)
                + amp * profile.corrector(x))

    r_out, r_holes = _bundle_residuals(scene, trace, outer_data, [hole_data], [profile])
    sup = max(r_out.sup_norm, r_holes[0].sup_norm)
    data_scale = hole_data.sup_norm + (outer_data.sup_norm if outer_data is not None else 0.0)
    return CorrectionBundle(
        level=level,
        outer_field=v0,
        profiles=(profile,),
        hole_fields=(lift,),
        far_constants=np.array([far]),
        amplitudes=np.array([amp]),
        residual_outer=r_out,
        residual_holes=r_holes,
        residual_sup=sup,
        stability_constant=sup / data_scale if data_scale > 0 else 0.0,
    )


# ---------------------------------------------------------------------------
# interaction matrix assembly


def assemble_interaction_matrix(scene: Scene, profiles, far_constants) -> InteractionMatrix:
    """Entries ln(eps) - w_i(x_i) on the diagonal and
    ln(capacity_j |x_i - x_j|) - w_j(x_i) off it; right-hand side the
    far-field constants of the hole liftings."""
    n = len(profiles)
    m = np.empty((n, n))
    for i, pi in enumerate(profiles):
        m[i, i] = -pi.denominator
        for j, pj in enumerate(profiles):
            if j != i:
                m[i, j] = (np.log(pj.capacity * abs(pi.center - pj.center))
                           - pj.log_extension.evaluate(pi.center))
    return InteractionMatrix(entries=m, rhs=np.asarray(far_constants, dtype=float),
                             regime=scene.regime(), log_eps=float(np.log(scene.eps)))


# ---------------------------------------------------------------------------
# full expansions


@dataclass(frozen=True)
class ResidualReport:
    outer: float
    holes: np.ndarray

    @property
    def total(self) -> float:
        return max(self.outer, float(np.max(self.holes)) if self.holes.size else 0.0)


@dataclass(frozen=True, eq=False)
class Expansion:
    """Evaluable asymptotic expansion with per-level bookkeeping."""

    scene: Scene = field(repr=False)
    profiles: tuple = field(repr=False)
    base: BaseSolution | None = field(repr=False)
    bundles: tuple = field(repr=False)
    matrix: InteractionMatrix | None = None
    outer_target: BoundaryFunction | None = field(default=None, repr=False)
    hole_targets: tuple | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        """Number of correction levels beyond the base solution."""
        return len(self.bundles)

    @property
    def eps(self) -> float:
        return self.scene.eps

    def evaluate(self, x):
        out = self.base.evaluate(x) if self.base is not None else (
            np.zeros(np.shape(x)) if np.ndim(x) else 0.0)
        for k, bundle in enumerate(self.bundles):
            out = out + self.eps**k * bundle.evaluate(x)
        return out if np.ndim(x) else float(out)

    __call__ = evaluate

    def boundary_residuals(self, samples: int = TRACE_SAMPLES) -> ResidualReport:
        """Sup of |target data - expansion trace| per boundary component."""
        if self.outer_target is not None:
            outer_pts = self.scene.domain.boundary(angles(self.outer_target.size))
            target = self.outer_target.samples
        else:
            outer_pts = self.scene.domain.boundary(angles(samples))
            target = 0.0
        outer = float(np.max(np.abs(target - self.evaluate(outer_pts))))
        holes = []
        for i, prof in enumerate(self.profiles):
            if self.hole_targets is not None:
                pts = prof.hole_boundary(angles(self.hole_targets[i].size))
                ft = self.hole_targets[i].samples
            else:
                pts = prof.hole_boundary(angles(samples))
                ft = 0.0
            holes.append(float(np.max(np.abs(ft - self.evaluate(pts)))))
        return ResidualReport(outer=outer, holes=np.asarray(holes))

    @property
    def amplitudes(self) -> np.ndarray:
        return self.bundles[0].amplitudes if self.bundles else np.zeros(len(self.profiles))

    @property
    def far_constants(self) -> np.ndarray:
        return self.bundles[0].far_constants if self.bundles else np.zeros(len(self.profiles))


def build_profiles(scene: Scene):
    return tuple(
        build_profile(scene.domain, inc.map, inc.center(scene.eps), scene.eps, index=i)
        for i, inc in enumerate(scene.inclusions))


def expand_single(scene: Scene, order: int = 1) -> Expansion:
    """Recursive single-inclusion expansion with the given number of levels.

    Level 0 lifts the hole trace of the base solution; the residual traces of
    each level, divided by eps, seed the next one.
    """
    if scene.n_inclusions != 1:
        raise ValueError("expand_single needs exactly one inclusion")
    if order < 0:
        raise ValueError("order must be >= 0")
    base = base_solution(scene)
    (profile,) = build_profiles(scene)
    th = angles(TRACE_SAMPLES)
    outer_data = None
    hole_data = BoundaryFunction(-base.evaluate(profile.hole_boundary(th)), boundary_id=0)
    bundles = []
    for level in range(order):
        bundle = correction_step(scene, profile, outer_data, hole_data, level=level)
        bundles.append(bundle)
        outer_data = bundle.residual_outer
        hole_data = bundle.residual_holes[0]
    return Expansion(scene=scene, profiles=(profile,), base=base, bundles=tuple(bundles))


def expand_multi(scene: Scene) -> Expansion:
    """First-order expansion for several inclusions via the interaction system."""
    if scene.n_inclusions < 2:
        return expand_single(scene, order=1)
    base = base_solution(scene)
    profiles = build_profiles(scene)
    th = angles(TRACE_SAMPLES)
    hole_datas = [
        BoundaryFunction(-base.evaluate(p.hole_boundary(th)), boundary_id=i)
        for i, p in enumerate(profiles)
    ]
    lifts = tuple(solve_exterior(p.rescaled.base, d) for p, d in zip(profiles, hole_datas))
    fars = np.array([lift.far_constant for lift in lifts])
    matrix = assemble_interaction_matrix(scene, profiles, fars)
    amps = matrix.solve()

    v0 = ZeroField()

    def trace(x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape)
        for prof, lift, amp in zip(profiles, lifts, amps):
            out = out + lift.tail_eval((x - prof.center) / prof.eps)
            out = out + amp * prof.corrector(x)
        return out

    r_out, r_holes = _bundle_residuals(scene, trace, None, hole_datas, profiles)
    sup = max(r_out.sup_norm, max(r.sup_norm for r in r_holes))
    data_scale = max(d.sup_norm for d in hole_datas)
    bundle = CorrectionBundle(
        level=0,
        outer_field=v0,
        profiles=profiles,
        hole_fields=lifts,
        far_constants=fars,
        amplitudes=amps,
        residual_outer=r_out,
        residual_holes=r_holes,
        residual_sup=sup,
        stability_constant=sup / data_scale if data_scale > 0 else 0.0,
    )
    return Expansion(scene=scene, profiles=profiles, base=base, bundles=(bundle,),
                     matrix=matrix)


def expand(scene: Scene, order: int = 1) -> Expansion:
    """Dispatch: recursive construction for one inclusion, first order for many."""
    if scene.n_inclusions <= 1:
        return expand_single(scene, order)
    if order == 0:
        return Expansion(scene=scene, profiles=build_profiles(scene),
                         base=base_solution(scene), bundles=())
    return expand_multi(scene)
