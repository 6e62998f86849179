"""Dense reference solver for the perforated Dirichlet problem.

Method of fundamental solutions: the harmonic part is a combination of
full-plane log kernels ln|x - s|/(2 pi) with sources on a ring outside the
outer boundary and in a cluster inside each inclusion (including one source
exactly at each center, which carries the logarithmic-capacity physics),
plus a free constant.  Charges come from a truncated-SVD least-squares fit
of the Dirichlet data at twice as many collocation points as sources.

This solver shares no code path with the expansion machinery; it is the
ground truth that the expansion's remainder is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import angles
from .errors import SolverError
from .scenes import Scene

OUTER_SOURCE_RADIUS = 1.4       # in the mapped frame of the outer domain
INNER_SOURCE_SCALE = 0.5        # cluster at half the inclusion scale
SVD_CUTOFF = 1e-12
ACCEPT_RESIDUAL = 1e-6          # relative to the boundary-data sup
TARGET_RESIDUAL = 1e-7


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """MFS solution u = particular + sum q_j ln|x - s_j|/(2 pi) + constant."""

    scene: Scene = field(repr=False)
    sources: np.ndarray = field(repr=False)
    charges: np.ndarray = field(repr=False)
    constant_term: float
    boundary_residual: float
    data_sup: float

    def harmonic_part(self, x):
        x_arr = np.asarray(x, dtype=complex)
        flat = x_arr.ravel()
        out = np.zeros(flat.shape)
        for i0 in range(0, flat.size, 2048):
            blk = flat[i0 : i0 + 2048]
            out[i0 : i0 + 2048] = (
                np.log(np.abs(blk[:, None] - self.sources[None, :])) @ self.charges
            ) / (2.0 * np.pi)
        out = out.reshape(x_arr.shape) + self.constant_term
        return out if np.ndim(x) else float(out)

    def evaluate(self, x):
        out = self.scene.forcing.particular(x) + self.harmonic_part(x)
        return out if np.ndim(x) else float(out)

    __call__ = evaluate

    def center_charges(self) -> np.ndarray:
        """Total charge inside each inclusion (capacity diagnostics)."""
        c = self.scene.centers()
        radii = np.array([inc.map.boundary_radius for inc in self.scene.inclusions])
        out = np.empty(len(c))
        for i in range(len(c)):
            mask = np.abs(self.sources - c[i]) <= self.scene.eps * radii[i]
            out[i] = self.charges[mask].sum()
        return out


def _boundary_points(scene: Scene, m_outer: int, m_hole: int):
    outer = scene.domain.boundary(angles(m_outer))
    holes = [
        inc.center(scene.eps) + scene.eps * inc.map.boundary(angles(m_hole))
        for inc in scene.inclusions
    ]
    return outer, holes


def _source_points(scene: Scene, n_outer: int, n_hole: int):
    ring = OUTER_SOURCE_RADIUS * np.exp(1j * angles(n_outer))
    if scene.domain.kind == "identity_disk":
        outer = ring
    else:
        outer = scene.domain.inverse(ring)  # Taylor continuation outside the disk
    clusters = []
    for inc in scene.inclusions:
        c = inc.center(scene.eps)
        cluster = c + INNER_SOURCE_SCALE * scene.eps * inc.map.boundary(angles(n_hole))
        clusters.append(np.concatenate(([c], cluster)))
    return np.concatenate([outer] + clusters)


def solve_reference(scene: Scene, outer_data=None, hole_data=None,
                    n_outer: int = 128, n_hole: int = 48) -> ReferenceSolution:
    """Solve the Dirichlet problem on the perforated domain.

    Default data is -particular on every boundary so that the full field
    vanishes there; explicit traces override it (callables of the boundary
    point, or constants).  Refuses solutions whose verification residual on
    a finer boundary sampling exceeds ACCEPT_RESIDUAL times the data sup.
    """
    if scene.eps < 1e-4:
        raise SolverError("boundaries below eps = 1e-4 are not resolvable here")
    sources = _source_points(scene, n_outer, n_hole)
    outer_pts, hole_pts = _boundary_points(scene, 2 * n_outer, 2 * (n_hole + 1))

    def data_on(pts, override):
        if override is None:
            return -scene.forcing.particular(pts)
        if callable(override):
            return np.asarray([override(p) for p in pts], dtype=float)
        return np.full(pts.shape, float(override))

    colloc = np.concatenate([outer_pts] + hole_pts)
    rhs = np.concatenate(
        [data_on(outer_pts, outer_data)]
        + [data_on(pts, None if hole_data is None else hole_data[i])
           for i, pts in enumerate(hole_pts)])
    kernel = np.log(np.abs(colloc[:, None] - sources[None, :])) / (2.0 * np.pi)
    design = np.hstack([kernel, np.ones((colloc.size, 1))])
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=SVD_CUTOFF)

    sol = ReferenceSolution(
        scene=scene, sources=sources, charges=coef[:-1], constant_term=float(coef[-1]),
        boundary_residual=0.0, data_sup=float(np.max(np.abs(rhs))) if rhs.size else 0.0)

    fine_outer, fine_holes = _boundary_points(scene, 4 * n_outer, 4 * (n_hole + 1))
    errs = [np.max(np.abs(sol.harmonic_part(fine_outer) - data_on(fine_outer, outer_data)))]
    for i, pts in enumerate(fine_holes):
        ov = None if hole_data is None else hole_data[i]
        errs.append(np.max(np.abs(sol.harmonic_part(pts) - data_on(pts, ov))))
    residual = float(max(errs))
    scale = max(sol.data_sup, 1e-300)
    if residual > ACCEPT_RESIDUAL * scale:
        raise SolverError(
            f"reference solve rejected: boundary residual {residual:.3e} above "
            f"{ACCEPT_RESIDUAL:g} * data sup {scale:.3e}")
    object.__setattr__(sol, "boundary_residual", residual)
    return sol


@dataclass(frozen=True)
class RemainderReport:
    sup: float
    rms: float
    points: np.ndarray = field(repr=False)
    values_reference: np.ndarray = field(repr=False)
    values_expansion: np.ndarray = field(repr=False)


def probe_grid(scene: Scene, n: int = 48, collar: float = 2.0) -> np.ndarray:
    """Cartesian probe points inside the domain, outside an inclusion collar.

    The collar excludes a band of width collar*eps around each inclusion,
    where both methods' boundary layers dominate.
    """
    s = np.linspace(-1.0, 1.0, n)
    xx, yy = np.meshgrid(s, s)
    pts = (xx + 1j * yy).ravel()
    if scene.domain.kind != "identity_disk":
        bound = np.max(np.abs(scene.domain.boundary(angles(128))))
        pts = pts * bound
    keep = np.abs(scene.domain.forward(pts)) <= 1.0
    c = scene.centers()
    radii = np.array([inc.map.boundary_radius for inc in scene.inclusions])
    for i in range(len(c)):
        keep &= np.abs(pts - c[i]) > scene.eps * radii[i] + collar * scene.eps
    return pts[keep]


def remainder_norm(sol: ReferenceSolution, expansion, grid: np.ndarray | None = None,
                   n: int = 48) -> RemainderReport:
    """Sup and RMS of reference minus expansion over a probe grid."""
    pts = probe_grid(sol.scene, n=n) if grid is None else np.asarray(grid, dtype=complex)
    u_ref = sol.evaluate(pts)
    u_exp = expansion.evaluate(pts) if hasattr(expansion, "evaluate") else expansion(pts)
    diff = u_ref - u_exp
    return RemainderReport(
        sup=float(np.max(np.abs(diff))) if diff.size else 0.0,
        rms=float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0,
        points=pts, values_reference=u_ref, values_expansion=u_exp)
