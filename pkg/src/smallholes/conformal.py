"""Exterior and interior conformal maps as truncated Laurent/Taylor series.

An inclusion shape omega is described through the biholomorphism T from the
complement of omega onto the complement of the closed unit disk, normalized
at infinity (T(inf) = inf, arg T'(inf) = 0), so that

    T(z)      = capacity*z + sum_{k>=0} coeffs[k] * z**(-k),
    T^{-1}(w) = inv_coeffs[0]*w + inv_coeffs[1] + sum_{k>=1} inv_coeffs[k+1]*w**(-k),

where capacity > 0 is the transfinite diameter of the shape (the leading
Laurent coefficient) and inv_coeffs[0] = 1/capacity.

Disks and ellipses use closed forms for forward evaluation.  For shapes given
by a coefficient list or by boundary samples, the forward map is evaluated by
Newton inversion of the inverse series (with a companion-matrix fallback);
the truncated forward Laurent coefficients are recovered by contour
integration and kept for far-field checks and Newton initialization.

Points are complex numbers x1 + i*x2 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import angles
from .errors import DomainError, GeometryError, MapFitError

DEFAULT_ORDER = 32
_BOUND_TOL = 1e-9  # slack allowed below |w| = 1 when evaluating on boundaries


# ---------------------------------------------------------------------------
# shape specification


def _winding_number(points: np.ndarray, center: complex) -> int:
    v = points - center
    if np.any(np.abs(v) == 0.0):
        raise GeometryError("boundary sample coincides with the centroid")
    turns = np.angle(np.roll(v, -1) / v)
    return int(np.rint(turns.sum() / (2.0 * np.pi)))


@dataclass(frozen=True, eq=False)
class ShapeSpec:
    """Inclusion shape: unit disk, ellipse, inverse-series coefficients, or samples.

    * ``ellipse`` holds (a, b, c) describing {a^2 x^2 + b^2 y^2 < c^2}.
    * ``laurent`` holds inverse-map coefficients [c_{-1}, c_0, c_1, ...]; the
      shape is the image of the unit circle under that series.
    * ``samples`` holds complex boundary points of a simple closed positively
      oriented curve.
    """

    kind: str
    ellipse: tuple | None = None
    laurent: tuple | None = None
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "ellipse":
            a, b, c = self.ellipse
            if not (a > 0 and b > 0 and c > 0):
                raise GeometryError("ellipse parameters must be positive")
        elif self.kind == "samples":
            pts = np.asarray(self.samples, dtype=complex)
            if pts.size < MIN_FIT_SAMPLES:
                raise GeometryError(f"need at least {MIN_FIT_SAMPLES} boundary samples")
            object.__setattr__(self, "samples", pts)
            if _winding_number(pts, pts.mean()) != 1:
                raise GeometryError(
                    "boundary samples must trace a simple closed positively oriented curve"
                )
        elif self.kind == "laurent":
            if len(self.laurent) < 1:
                raise GeometryError("need at least the leading inverse coefficient")
        elif self.kind != "disk":
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @classmethod
    def disk(cls):
        return cls(kind="disk")

    @classmethod
    def from_ellipse(cls, a, b, c):
        return cls(kind="ellipse", ellipse=(float(a), float(b), float(c)))

    @classmethod
    def from_laurent(cls, coeffs):
        return cls(kind="laurent", laurent=tuple(complex(c) for c in coeffs))

    @classmethod
    def from_samples(cls, points):
        pts = np.asarray(points)
        if pts.ndim == 2:
            pts = pts[:, 0] + 1j * pts[:, 1]
        return cls(kind="samples", samples=np.asarray(pts, dtype=complex))


MIN_FIT_SAMPLES = 16


# ---------------------------------------------------------------------------
# series helpers


def _eval_inverse(inv_coeffs: np.ndarray, w):
    """c_{-1} w + c_0 + sum_{k>=1} c_k w^{-k}."""
    w = np.asarray(w, dtype=complex)
    out = inv_coeffs[0] * w + inv_coeffs[1]
    if inv_coeffs.size > 2:
        v = 1.0 / w
        acc = np.zeros_like(w)
        for c in inv_coeffs[:1:-1]:
            acc = (acc + c) * v
        out = out + acc
    return out


def _eval_inverse_deriv(inv_coeffs: np.ndarray, w):
    w = np.asarray(w, dtype=complex)
    out = np.full_like(w, inv_coeffs[0])
    if inv_coeffs.size > 2:
        v = 1.0 / w
        acc = np.zeros_like(w)
        ks = np.arange(inv_coeffs.size - 2, 0, -1)
        for k, c in zip(ks, inv_coeffs[:1:-1]):
            acc = (acc - k * c) * v
        out = out + acc * v
    return out


def _eval_forward_series(capacity: float, coeffs: np.ndarray, z):
    """capacity*z + sum_{k>=0} coeffs[k] z^{-k} (truncated Laurent evaluation)."""
    z = np.asarray(z, dtype=complex)
    out = capacity * z
    if coeffs.size:
        v = 1.0 / z
        acc = np.zeros_like(z)
        for c in coeffs[::-1]:
            acc = acc * v + c
        out = out + acc
    return out


def _newton_invert(inv_coeffs: np.ndarray, z: np.ndarray, w0: np.ndarray,
                   iters: int = 60, tol: float = 1e-12):
    """Solve _eval_inverse(w) = z by Newton iteration from w0 (vectorized)."""
    w = np.array(w0, dtype=complex)
    target = np.asarray(z, dtype=complex)
    scale = 1.0 + np.abs(target)
    for _ in range(iters):
        f = _eval_inverse(inv_coeffs, w) - target
        if np.all(np.abs(f) <= tol * scale):
            break
        d = _eval_inverse_deriv(inv_coeffs, w)
        d = np.where(np.abs(d) < 1e-300, 1e-300, d)
        w = w - f / d
    return w, np.abs(_eval_inverse(inv_coeffs, w) - target) <= 100 * tol * scale


def _forward_coeffs_from_inverse(inv_coeffs: np.ndarray, order: int,
                                 n_quad: int = 2048, rho: float = 1.25):
    """Laurent coefficients of the forward map by contour integration.

    Coefficient of z^m in T(z) is (1/2*pi*i) oint T(z) z^{-m-1} dz; pulling the
    contour back to the circle |w| = rho gives spectrally accurate trapezoid
    sums of w^2 g(w)^{-m-1} g'(w) with g the inverse series.
    """
    w = rho * np.exp(1j * angles(n_quad))
    g = _eval_inverse(inv_coeffs, w)
    gp = _eval_inverse_deriv(inv_coeffs, w)
    base = w * w * gp
    capacity = np.mean(base / (g * g))
    coeffs = np.empty(order + 1, dtype=complex)
    p = base / g  # integrand for the z^0 coefficient
    coeffs[0] = np.mean(p)
    for k in range(1, order + 1):
        p = p * g  # now base * g^(k-1), the z^{-k} integrand
        coeffs[k] = np.mean(p)
    return capacity, coeffs


# ---------------------------------------------------------------------------
# exterior maps


class ExteriorMap:
    """Truncated-series representation of the exterior Riemann map of a shape.

    Immutable after construction; safe for concurrent read-only evaluation.
    """

    def __init__(self, kind, capacity, coeffs, inv_coeffs, truncation_order,
                 ellipse=None, fit_residual=0.0):
        self.kind = kind
        self.capacity = float(capacity)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.inv_coeffs = np.asarray(inv_coeffs, dtype=complex)
        self.truncation_order = int(truncation_order)
        self._ellipse = ellipse
        self.fit_residual = float(fit_residual)
        if self.capacity <= 0:
            raise GeometryError("transfinite diameter must be positive")
        lead = self.inv_coeffs[0]
        if abs(lead - 1.0 / self.capacity) > 1e-10 * abs(lead):
            raise GeometryError("inverse leading coefficient must equal 1/capacity")

        th = angles(512)
        bnd = _eval_inverse(self.inv_coeffs, np.exp(1j * th))
        self._boundary_table = bnd
        self.boundary_radius = float(np.max(np.abs(bnd)))
        self.validity_radius = 1.5 * self.boundary_radius
        far = 2.0 * self.validity_radius * np.exp(1j * angles(256))
        self.far_deviation = float(np.max(np.abs(self.forward(far) - self.capacity * far)))

    # -- evaluation ---------------------------------------------------------

    def inverse(self, w):
        """Map from {|w| >= 1} back to the exterior of the shape."""
        w_arr = np.asarray(w, dtype=complex)
        if np.any(np.abs(w_arr) < 1.0 - _BOUND_TOL):
            raise DomainError("inverse map requires |w| >= 1")
        out = _eval_inverse(self.inv_coeffs, w_arr)
        return out if np.ndim(w) else complex(out)

    def inverse_deriv(self, w):
        out = _eval_inverse_deriv(self.inv_coeffs, np.asarray(w, dtype=complex))
        return out if np.ndim(w) else complex(out)

    def boundary(self, theta):
        """Boundary point gamma(theta) = T^{-1}(e^{i theta})."""
        return _eval_inverse(self.inv_coeffs, np.exp(1j * np.asarray(theta, dtype=float)))

    def forward(self, z):
        z_arr = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            if np.any(np.abs(z_arr) < 1.0 - _BOUND_TOL):
                raise DomainError("point inside the unit disk shape")
            out = z_arr
        elif self.kind == "ellipse":
            out = self._forward_ellipse(z_arr)
        else:
            out = self._forward_series_kind(z_arr)
        return out if np.ndim(z) else complex(out)

    def forward_series(self, z):
        """Truncated Laurent evaluation (accurate only well outside the shape)."""
        out = _eval_forward_series(self.capacity, self.coeffs, np.asarray(z, dtype=complex))
        return out if np.ndim(z) else complex(out)

    def _forward_ellipse(self, z):
        a, b, c = self._ellipse
        inside = (a * z.real) ** 2 + (b * z.imag) ** 2 < c * c * (1.0 - 1e-12)
        if np.any(inside):
            raise DomainError("point inside the ellipse shape")
        s = np.sqrt(z * z / c**2 + 1.0 / b**2 - 1.0 / a**2 + 0j)
        denom = 1.0 / a + 1.0 / b
        w_plus = (z / c + s) / denom
        w_minus = (z / c - s) / denom
        return np.where(np.abs(w_plus) >= np.abs(w_minus), w_plus, w_minus)

    def _forward_series_kind(self, z):
        flat = np.atleast_1d(z).ravel()
        with np.errstate(divide="ignore", invalid="ignore"):
            w0 = _eval_forward_series(self.capacity, self.coeffs, flat)
        near = (np.abs(flat) < self.validity_radius) | ~np.isfinite(w0) | (np.abs(w0) < 1.1)
        if np.any(near):
            # start near points from the closest precomputed boundary image
            zb = self._boundary_table
            idx = np.empty(near.sum(), dtype=int)
            zn = flat[near]
            for i0 in range(0, zn.size, 512):
                blk = zn[i0 : i0 + 512]
                idx[i0 : i0 + 512] = np.argmin(np.abs(blk[:, None] - zb[None, :]), axis=1)
            w0[near] = np.exp(1j * angles(zb.size)[idx])
        w, ok = _newton_invert(self.inv_coeffs, flat, w0)
        suspicious = ~ok | (np.abs(w) < 1.0 - _BOUND_TOL)
        for j in np.flatnonzero(suspicious):
            w[j] = self._forward_by_roots(flat[j])
        if np.any(np.abs(w) < 1.0 - _BOUND_TOL):
            raise DomainError("point inside the shape")
        return w.reshape(np.shape(z))

    def _forward_by_roots(self, z: complex) -> complex:
        # g(w) = z as a degree-(K+1) polynomial in w; the exterior root is unique
        p = np.concatenate((self.inv_coeffs[:1], [self.inv_coeffs[1] - z], self.inv_coeffs[2:]))
        roots = np.roots(p)
        good = roots[np.abs(_eval_inverse(self.inv_coeffs, roots) - z) <= 1e-7 * (1 + abs(z))]
        if good.size == 0:
            raise DomainError("forward evaluation failed to converge")
        w = good[np.argmax(np.abs(good))]
        if abs(w) < 1.0 - _BOUND_TOL:
            raise DomainError("point inside the shape")
        return w

    def rescaled(self, center, eps):
        return RescaledMap(self, complex(center), float(eps))

    def __repr__(self):
        return (f"ExteriorMap(kind={self.kind!r}, capacity={self.capacity:.6g}, "
                f"order={self.truncation_order})")


class RescaledMap:
    """The map x -> eps * T((x - center)/eps) of a shrunk, shifted inclusion.

    Sends the exterior of ``center + eps*omega`` onto the exterior of the disk
    of radius eps; on the inclusion boundary the modulus equals eps.
    """

    __slots__ = ("base", "center", "eps")

    def __init__(self, base: ExteriorMap, center: complex, eps: float):
        if eps <= 0:
            raise GeometryError("inclusion size must be positive")
        self.base = base
        self.center = center
        self.eps = eps

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=complex)
        out = self.eps * self.base.forward((x_arr - self.center) / self.eps)
        return out if np.ndim(x) else complex(out)

    def log_modulus(self, x):
        """ln |T_eps(x)|; equals ln(eps) on the inclusion boundary."""
        x_arr = np.asarray(x, dtype=complex)
        w = self.base.forward((x_arr - self.center) / self.eps)
        out = np.log(self.eps) + np.log(np.abs(w))
        return out if np.ndim(x) else float(out)

    def boundary(self, theta):
        """Boundary points of the shrunk inclusion."""
        return self.center + self.eps * self.base.boundary(theta)

    @property
    def boundary_radius(self) -> float:
        return self.eps * self.base.boundary_radius


# ---------------------------------------------------------------------------
# map construction


def build_exterior_map(shape: ShapeSpec, order: int = DEFAULT_ORDER) -> ExteriorMap:
    """Construct the exterior map of a shape, with series data to the given order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if shape.kind == "disk":
        return ExteriorMap("disk", 1.0, np.zeros(order + 1), _unit_inv(order), order)
    if shape.kind == "ellipse":
        a, b, c = shape.ellipse
        inv = np.zeros(order + 2, dtype=complex)
        inv[0] = 0.5 * (c / a + c / b)
        if order >= 1:
            inv[2] = 0.5 * (c / a - c / b)
        capacity, coeffs = _forward_coeffs_from_inverse(inv, order)
        exact = 2.0 * a * b / (c * (a + b))
        if abs(capacity - exact) > 1e-9 * exact:
            raise MapFitError(abs(capacity - exact), "ellipse coefficient recovery failed")
        return ExteriorMap("ellipse", exact, coeffs, inv, order, ellipse=(a, b, c))
    if shape.kind == "laurent":
        inv = np.asarray(shape.laurent, dtype=complex)
        if inv.size < order + 2:
            inv = np.concatenate((inv, np.zeros(order + 2 - inv.size)))
        phase = np.angle(inv[0])
        if abs(phase) > 0:
            # absorb the parameter-circle rotation so the leading coeff is real > 0
            ks = np.arange(-1, inv.size - 1)
            inv = inv * np.exp(1j * ks * phase)
            inv[0] = inv[0].real
        _validate_curve(inv)
        capacity, coeffs = _forward_coeffs_from_inverse(inv, order)
        return ExteriorMap("series", 1.0 / inv[0].real, coeffs, inv, order)
    if shape.kind == "samples":
        inv, residual = _fit_inverse_series(shape.samples, order)
        _validate_curve(inv)
        capacity, coeffs = _forward_coeffs_from_inverse(inv, order)
        return ExteriorMap("series", 1.0 / inv[0].real, coeffs, inv, order,
                           fit_residual=residual)
    raise ValueError(f"unknown shape kind {shape.kind!r}")


def _unit_inv(order):
    inv = np.zeros(order + 2, dtype=complex)
    inv[0] = 1.0
    return inv


def _validate_curve(inv_coeffs):
    th = angles(512)
    w = np.exp(1j * th)
    deriv = _eval_inverse_deriv(inv_coeffs, w)
    if np.min(np.abs(deriv)) < 1e-10 * np.max(np.abs(deriv)):
        raise GeometryError("inverse series degenerates on the unit circle")
    pts = _eval_inverse(inv_coeffs, w)
    if _winding_number(pts, pts.mean()) != 1:
        raise GeometryError("inverse series does not trace a simple positively oriented curve")


FIT_TOL = 1e-6


def _fit_inverse_series(points: np.ndarray, order: int, max_sweeps: int = 80):
    """Least-squares collocation of the inverse series against boundary samples.

    The boundary correspondence is refined by alternating projection: fit the
    coefficients for the current parameter angles, then re-parametrize each
    sample by Newton-inverting the fitted series at it.  The alternation
    contracts geometrically for smooth, star-shaped samples.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size < 4 * order:
        raise GeometryError(
            f"need >= {4 * order} boundary samples to fit order {order} (got {pts.size})")
    centroid = pts.mean()
    scale = float(np.max(np.abs(pts - centroid)))
    theta = np.unwrap(np.angle(pts - centroid))
    coeffs = None
    residual = np.inf
    for _ in range(max_sweeps):
        w = np.exp(1j * theta)
        cols = [w, np.ones_like(w)]
        cols += [w ** (-k) for k in range(1, order + 1)]
        design = np.stack(cols, axis=1)
        coeffs, *_ = np.linalg.lstsq(design, pts, rcond=None)
        prev = residual
        residual = float(np.max(np.abs(design @ coeffs - pts))) / scale
        if residual <= 0.02 * FIT_TOL or residual > 0.98 * prev:
            break
        w_new, ok = _newton_invert(coeffs, pts, np.exp(1j * theta), iters=25)
        theta = np.where(ok, np.angle(w_new), theta)
    phase = np.angle(coeffs[0])
    ks = np.arange(-1, coeffs.size - 1)
    coeffs = coeffs * np.exp(1j * ks * phase)
    coeffs[0] = coeffs[0].real
    if coeffs[0].real <= 0:
        raise GeometryError("fitted curve has non-positive leading coefficient")
    if residual > FIT_TOL:
        raise MapFitError(residual)
    return coeffs, residual


# ---------------------------------------------------------------------------
# interior map of the outer domain


class InteriorMap:
    """Biholomorphism from the outer domain onto the unit disk (Taylor series).

    The default outer domain is the unit disk itself (identity map); other
    domains are accepted through user-supplied forward/inverse Taylor series.
    """

    def __init__(self, kind, coeffs, inv_coeffs):
        self.kind = kind
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.inv_coeffs = np.asarray(inv_coeffs, dtype=complex)
        if kind not in ("identity_disk", "series"):
            raise ValueError(f"unknown interior map kind {kind!r}")
        if kind == "series":
            self._check_unit_circle()

    @classmethod
    def unit_disk(cls):
        return cls("identity_disk", np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    @classmethod
    def from_series(cls, coeffs, inv_coeffs):
        return cls("series", coeffs, inv_coeffs)

    @classmethod
    def from_inverse_series(cls, inv_coeffs, order=24):
        """Fit the forward Taylor polynomial from the inverse series."""
        inv = np.asarray(inv_coeffs, dtype=complex)
        ws = np.concatenate([r * np.exp(1j * angles(512)) for r in (1.0, 0.85, 0.6)])
        zs = np.polynomial.polynomial.polyval(ws, inv)
        design = np.vander(zs, order + 1, increasing=True)
        coeffs, *_ = np.linalg.lstsq(design, ws, rcond=None)
        return cls("series", coeffs, inv)

    def _check_unit_circle(self):
        w = np.exp(1j * angles(128))
        bnd = self.inverse(w)
        mod = np.abs(np.polynomial.polynomial.polyval(bnd, self.coeffs))
        if np.max(np.abs(mod - 1.0)) > 1e-8:
            raise GeometryError("forward series does not send the boundary to the unit circle")

    def forward(self, x):
        out = np.polynomial.polynomial.polyval(np.asarray(x, dtype=complex), self.coeffs)
        return out if np.ndim(x) else complex(out)

    def forward_deriv(self, x):
        d = np.polynomial.polynomial.polyder(self.coeffs)
        out = np.polynomial.polynomial.polyval(np.asarray(x, dtype=complex), d)
        return out if np.ndim(x) else complex(out)

    def inverse(self, w):
        out = np.polynomial.polynomial.polyval(np.asarray(w, dtype=complex), self.inv_coeffs)
        return out if np.ndim(w) else complex(out)

    def boundary(self, theta):
        """gamma0(theta) = (T0)^{-1}(e^{i theta})."""
        return self.inverse(np.exp(1j * np.asarray(theta, dtype=float)))

    def contains(self, x, tol=_BOUND_TOL):
        return np.abs(self.forward(x)) <= 1.0 + tol

    @property
    def diameter(self) -> float:
        bnd = self.boundary(angles(256))
        if self.kind == "identity_disk":
            return 2.0
        return float(np.max(np.abs(bnd[:, None] - bnd[None, :])))

    def __repr__(self):
        return f"InteriorMap(kind={self.kind!r})"
