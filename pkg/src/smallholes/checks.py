"""Seeded invariant suite behind the ``validate`` subcommand.

Each check exercises one contract of the library with randomized data drawn
from a seeded generator, so a fixed seed gives a deterministic verdict.  The
``corrupt`` flag tightens one tolerance to an impossible value; it exists as
a negative control for the harness itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryFunction, angles
from .conformal import InteriorMap, ShapeSpec, build_exterior_map
from .expansion import build_profiles, correction_step, expand
from .exterior import contour_mean, far_constant_of, solve_exterior, tail_sup
from .interactions import (
    InteractionMatrix,
    ones_matrix_inverse,
    three_scale_determinant,
    three_scale_inverse,
    three_scale_matrix,
)
from .interior import solve_interior
from .profiles import build_profile
from .reference import solve_reference
from .scenes import Forcing, Inclusion, Regime, Scene


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_boundary(rng, m=256, modes=8, scale=1.0):
    th = angles(m)
    vals = np.zeros(m)
    for k in range(1, modes + 1):
        vals += rng.normal() * np.cos(k * th) + rng.normal() * np.sin(k * th)
    vals += rng.normal()
    return BoundaryFunction(vals * scale)


def run_all(seed: int = 0, corrupt: bool = False):
    """Run every module's invariant checks; returns a list of CheckResult."""
    rng = np.random.default_rng(seed)
    rt_tol = 1e-20 if corrupt else 1e-8  # corrupt mode: impossible round-trip bar
    results = []

    def record(name, passed, detail=""):
        results.append(CheckResult(name, bool(passed), detail))

    # -- conformal ----------------------------------------------------------
    ellipse = build_exterior_map(ShapeSpec.from_ellipse(1.0, 2.0, 2.0))
    disk = build_exterior_map(ShapeSpec.disk())
    worst = 0.0
    for mapping in (disk, ellipse):
        for r in (1.0, 1.5, 3.0):
            w = r * np.exp(1j * angles(128))
            worst = max(worst, float(np.max(np.abs(mapping.forward(mapping.inverse(w)) - w))
                                     / max(1.0, r)))
    record("conformal.round_trip", worst <= rt_tol, f"max {worst:.2e}")

    z = 10.0 * ellipse.validity_radius * np.exp(1j * angles(64))
    dev = float(np.max(np.abs(ellipse.forward(z) - ellipse.capacity * z)))
    record("conformal.far_field", dev <= ellipse.far_deviation * (1 + 1e-9),
           f"dev {dev:.2e} vs C {ellipse.far_deviation:.2e}")

    diffs = []
    for k in (2, 3, 4):
        near = build_exterior_map(ShapeSpec.from_ellipse(1.0, 1.0 + 10.0**-k, 1.0))
        diffs.append(abs(near.capacity - 1.0))
    record("conformal.ellipse_degeneracy",
           diffs[0] > diffs[1] > diffs[2], f"capacity gaps {diffs}")

    deriv = np.abs(ellipse.inverse_deriv(np.exp(1j * angles(256))))
    record("conformal.boundary_conformality", float(np.min(deriv)) > 0.0,
           f"min |gamma'| {np.min(deriv):.3e}")

    # -- exterior lifting ----------------------------------------------------
    ok = True
    max_ratio = 0.0
    for _ in range(100):
        data = _random_boundary(rng, scale=rng.uniform(0.5, 2.0))
        f = solve_exterior(ellipse, data)
        ok &= abs(f.far_constant) <= data.sup_norm + 1e-12
        grid = np.concatenate([r * np.exp(1j * angles(64)) for r in (2.5, 4.0, 12.0)])
        vals = f.evaluate(ellipse.inverse(grid))
        max_ratio = max(max_ratio, float(np.max(np.abs(vals))) / data.sup_norm)
        ok &= max_ratio <= 2.0
    record("exterior.mean_and_max_bounds", ok, f"max field/data ratio {max_ratio:.3f}")

    data = _random_boundary(rng)
    f = solve_exterior(ellipse, data)
    mono = all(
        tail_sup(f, n, 20.0) <= tail_sup(f, n, 5.0) + 1e-12 for n in range(1, 5))
    record("exterior.tail_decay", mono, "tail sup non-increasing in radius")

    g = _random_boundary(rng)
    fa = solve_exterior(ellipse, data + g)
    fb = solve_exterior(ellipse, data)
    fc = solve_exterior(ellipse, g)
    lin = (abs(fa.far_constant - fb.far_constant - fc.far_constant)
           + float(np.max(np.abs(fa.tail - fb.tail - fc.tail))))
    record("exterior.linearity", lin <= 1e-12 * (data.sup_norm + g.sup_norm),
           f"coefficient defect {lin:.2e}")

    zm = BoundaryFunction(np.sin(3 * angles(256)) + 0.5 * np.cos(angles(256)))
    record("exterior.disk_zero_mean",
           abs(far_constant_of(disk, zm)) <= 1e-14, "zero-mean data gives zero constant")
    record("exterior.contour_mean",
           abs(contour_mean(f) - f.far_constant) <= 1e-8 * max(f.data_sup, 1e-300),
           "holomorphic-completion contour integral")

    # -- interior lifting ----------------------------------------------------
    dom = InteriorMap.unit_disk()
    ok = True
    for _ in range(50):
        phi = _random_boundary(rng)
        fi = solve_interior(dom, phi)
        s = np.linspace(-0.99, 0.99, 64)
        xx, yy = np.meshgrid(s, s)
        pts = (xx + 1j * yy).ravel()
        pts = pts[np.abs(pts) <= 0.999]
        ok &= float(np.max(np.abs(fi.evaluate(pts)))) <= phi.sup_norm + 1e-9
    record("interior.maximum_principle", ok, "50 random traces on a 64x64 grid")

    phi = _random_boundary(rng)
    fi = solve_interior(dom, phi)
    record("interior.mean_value", abs(fi.evaluate(0j) - phi.mean) <= 1e-12,
           "center value equals the trace mean")
    h = 1e-5
    gfd = ((fi.evaluate(h) - fi.evaluate(-h)) / (2 * h)
           + 1j * (fi.evaluate(1j * h) - fi.evaluate(-1j * h)) / (2 * h))
    gan = fi.gradient(0j)
    record("interior.gradient_fd", abs(gfd - gan) <= 1e-6 * max(1.0, abs(gan)),
           f"fd defect {abs(gfd - gan):.2e}")

    # -- profiles ------------------------------------------------------------
    prof = build_profile(dom, ellipse, 0.25 + 0.1j, 0.05)
    hole = prof.hole_boundary(angles(64))
    record("profiles.hole_trace",
           float(np.max(np.abs(prof.log_modulus(hole) - np.log(0.05)))) <= 1e-8,
           "log modulus equals ln(eps) on the hole")
    record("profiles.scale_identity",
           abs(prof.log_scale * prof.denominator - 1.0) <= 1e-15, "gauge times denominator")
    ratios = [build_profile(dom, ellipse, 0.25 + 0.1j, e).outer_mismatch
              for e in (0.1, 0.05, 0.025, 0.0125)]
    record("profiles.outer_mismatch_bounded",
           max(ratios) <= 2.0 * ratios[0] + 1e-9, f"sup|corrector|/eps sweep {ratios}")
    lap = _discrete_laplacian(prof.corrector, 0.55 + 0.2j, 1e-3)
    record("profiles.harmonic", abs(lap) <= 1e-4, f"5-point laplacian {lap:.2e}")

    # -- expansion -----------------------------------------------------------
    annulus = Scene(domain=dom, inclusions=[Inclusion.build(ShapeSpec.disk())],
                    forcing=Forcing(kind="zero"), eps=0.05)
    (aprof,) = build_profiles(annulus)
    bundle = correction_step(annulus, aprof, None, BoundaryFunction(np.ones(256), boundary_id=0))
    xs = np.linspace(0.08, 0.99, 40).astype(complex)
    err = float(np.max(np.abs(bundle.evaluate(xs) - np.log(np.abs(xs)) / np.log(0.05))))
    record("expansion.annulus_exact", err <= 1e-12, f"max err {err:.2e}")

    import warnings as _w
    with _w.catch_warnings():
        _w.simplefilter("ignore")
        scene = Scene(domain=dom,
                      inclusions=[Inclusion.build(ShapeSpec.disk(), base_center=0.3)],
                      forcing=Forcing(kind="point_sources", sources=[(-0.5 + 0j, 1.0)]),
                      eps=0.05)
        e2 = expand(scene, 2)
        r1 = expand(scene, 1).boundary_residuals().total
        r2 = e2.boundary_residuals().total
        record("expansion.residual_drops", r2 < r1, f"order-1 {r1:.2e} -> order-2 {r2:.2e}")

        n1_amp = e2.bundles[0].amplitudes[0]
        fars = e2.bundles[0].far_constants
        m1 = InteractionMatrix(entries=[[-e2.profiles[0].denominator]], rhs=fars,
                               regime=Regime(kind="single"), log_eps=np.log(scene.eps))
        record("expansion.single_matches_system",
               abs(m1.solve()[0] - n1_amp) <= 1e-12 * max(1.0, abs(n1_amp)),
               "explicit quotient equals the 1x1 system solve")

    # -- interaction matrices -------------------------------------------------
    ok = True
    for n in (2, 3, 5):
        m0 = (np.log(0.05) - np.log(0.05**0.5)) * np.eye(n) + np.log(0.05**0.5) * np.ones((n, n))
        ok &= float(np.max(np.abs(
            ones_matrix_inverse(n, np.log(0.05), np.log(0.05**0.5)) - np.linalg.inv(m0)))) <= 1e-10
    record("interactions.rank_one_spectral_inverse", ok, "N in {2,3,5}")

    ok = True
    for _ in range(20):
        beta = rng.uniform(0.05, 0.9)
        alpha = rng.uniform(beta, 0.95)
        mab = three_scale_matrix(alpha, beta)
        ok &= abs(np.linalg.det(mab) - three_scale_determinant(alpha, beta)) <= 1e-12
        ok &= float(np.max(np.abs(three_scale_inverse(alpha, beta) - np.linalg.inv(mab)))) <= 1e-10
    record("interactions.three_scale", ok, "determinant and eigendecomposition")

    # -- reference solver ------------------------------------------------------
    sol = solve_reference(annulus, outer_data=0.0, hole_data=[1.0])
    rr = np.linspace(0.08, 0.97, 50)
    err = float(np.max(np.abs(sol.evaluate(rr.astype(complex)) - np.log(rr) / np.log(0.05))))
    record("reference.annulus", err <= 1e-8, f"radial error {err:.2e}")
    with _w.catch_warnings():
        _w.simplefilter("ignore")
        fine = solve_reference(scene, n_outer=192, n_hole=72)
        coarse = solve_reference(scene)
        pts = 0.75 * np.exp(1j * angles(16))
        drift = float(np.max(np.abs(fine.evaluate(pts) - coarse.evaluate(pts))))
        record("reference.refinement_stability", drift <= 1e-7, f"probe drift {drift:.2e}")

    return results


def _discrete_laplacian(fn, x, h):
    return (fn(x + h) + fn(x - h) + fn(x + 1j * h) + fn(x - 1j * h) - 4.0 * fn(x)) / h**2


def format_report(results) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}"
                     + (f" ({r.detail})" if r.detail else ""))
    n_bad = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_bad}/{len(results)} checks passed")
    return "\n".join(lines)
