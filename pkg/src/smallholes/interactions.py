"""Interaction system coupling the correction amplitudes of several inclusions.

The amplitudes a_i of the per-inclusion correctors solve M a = g where

    M[i][i] = ln(eps) - w_i(x_i),
    M[i][j] = ln(capacity_j * |x_i - x_j|) - w_j(x_i)     (j != i),

with w_j the j-th logarithmic extension and g_i the far-field constants of
the per-inclusion exterior liftings.  Note M is not symmetric in general:
entry (i, j) uses inclusion j's capacity and extension evaluated at x_i.

Amplitudes always come from the exact linear solve.  The closed-form leading
inverses of the distance regimes (all-far, all-clustered, one close pair,
three-scale) are provided as cross-checks: the measured deviation times
ln(eps)^2 stays bounded as eps shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfigurationError
from .scenes import Regime

MAX_CONDITION = 1e12


@dataclass(eq=False)
class InteractionMatrix:
    """Assembled interaction system for one scene at one eps."""

    entries: np.ndarray
    rhs: np.ndarray
    regime: Regime
    log_eps: float
    amplitudes: np.ndarray | None = None
    condition: float = field(init=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.condition = float(np.linalg.cond(self.entries))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def solve(self) -> np.ndarray:
        """Exact partial-pivoting solve of the amplitude system."""
        if not np.isfinite(self.condition) or self.condition > MAX_CONDITION:
            raise DegenerateConfigurationError(
                f"interaction matrix condition number {self.condition:.3e}")
        a = np.linalg.solve(self.entries, self.rhs)
        scale = max(np.max(np.abs(self.rhs)), 1e-300)
        resid = np.max(np.abs(self.entries @ a - self.rhs))
        if resid > 1e-10 * scale:
            raise DegenerateConfigurationError(
                f"amplitude solve residual {resid:.3e} above 1e-10 * data scale")
        self.amplitudes = a
        return a


def ones_matrix_inverse(n: int, log_eps: float, log_eta: float) -> np.ndarray:
    """Spectral inverse of (ln eps - ln eta) I + ln eta H, H the all-ones matrix.

    H has eigenvalues {n, 0 x (n-1)}, so the inverse is a rank-one update of
    a multiple of the identity.
    """
    h = np.ones((n, n))
    lead = 1.0 / (log_eps - log_eta)
    spike = 1.0 / (log_eps + (n - 1) * log_eta)
    return lead * np.eye(n) + (spike - lead) / n * h


def three_scale_matrix(alpha: float, beta: float) -> np.ndarray:
    return np.array([[1.0, alpha, beta], [alpha, 1.0, beta], [beta, beta, 1.0]])


def three_scale_determinant(alpha: float, beta: float) -> float:
    return (alpha - 1.0) * (2.0 * beta**2 - alpha - 1.0)


def three_scale_eigensystem(alpha: float, beta: float):
    """Orthogonal eigendecomposition of the three-scale leading matrix.

    Returns (P, eigenvalues) with columns of P the eigenvectors.  The swap
    symmetry of the close pair splits the spectrum into one antisymmetric
    eigenvector (1,-1,0)/sqrt(2) with eigenvalue 1-alpha and two symmetric
    ones (1,1,t)/norm with eigenvalues (alpha + 2 +- sqrt(alpha^2+8beta^2))/2;
    at alpha = beta these reduce to the columns (1,1,1), (1,1,-2), (1,-1,0)
    of the familiar all-ones eigenbasis.
    """
    if not (0.0 < beta <= alpha < 1.0):
        raise DegenerateConfigurationError(
            f"three-scale exponents need 0 < beta <= alpha < 1, got ({alpha}, {beta})")
    s = np.sqrt(alpha**2 + 8.0 * beta**2)
    lam_plus = 0.5 * (alpha + 2.0 + s)
    lam_minus = 0.5 * (alpha + 2.0 - s)
    t_plus = (-alpha + s) / (2.0 * beta)
    t_minus = (-alpha - s) / (2.0 * beta)
    v_plus = np.array([1.0, 1.0, t_plus])
    v_minus = np.array([1.0, 1.0, t_minus])
    v_anti = np.array([1.0, -1.0, 0.0])
    p = np.stack([v / np.linalg.norm(v) for v in (v_plus, v_minus, v_anti)], axis=1)
    return p, np.array([lam_plus, lam_minus, 1.0 - alpha])


def three_scale_inverse(alpha: float, beta: float) -> np.ndarray:
    p, lam = three_scale_eigensystem(alpha, beta)
    return p @ np.diag(1.0 / lam) @ p.T


@dataclass(frozen=True)
class AnalyticInverse:
    """Closed-form leading inverse of the interaction matrix, with deviation."""

    regime: Regime
    matrix: np.ndarray
    deviation: float            # max-norm distance to the exact inverse
    scaled_deviation: float     # deviation times ln(eps)^2


def asymptotic_inverse(m: InteractionMatrix) -> AnalyticInverse:
    """Closed-form leading inverse for the scene's distance regime.

    The exact inverse is used only to measure the deviation; amplitudes are
    always produced by `InteractionMatrix.solve`, because replacing the exact
    solve by the leading inverse degrades the expansion remainder to the slow
    logarithmic order.
    """
    n = m.size
    log_eps = m.log_eps
    reg = m.regime
    if reg.kind == "separated" or reg.kind == "single":
        analytic = np.eye(n) / log_eps
    elif reg.kind == "clustered":
        analytic = ones_matrix_inverse(n, log_eps, reg.alpha * log_eps)
    elif reg.kind == "mixed":
        analytic = np.eye(n) / log_eps
        i, j = reg.close_pair
        a = reg.alpha
        block = np.array([[1.0, -a], [-a, 1.0]]) / (1.0 - a * a) / log_eps
        analytic[np.ix_([i, j], [i, j])] = block
    elif reg.kind == "three_scale":
        if n != 3:
            raise DegenerateConfigurationError("three-scale regime needs exactly 3 inclusions")
        order = _three_scale_order(reg)
        inv = three_scale_inverse(reg.alpha, reg.beta)
        analytic = np.empty((3, 3))
        analytic[np.ix_(order, order)] = inv / log_eps
    else:
        raise DegenerateConfigurationError(
            f"no closed-form leading inverse for regime {reg.kind!r}")
    exact = np.linalg.inv(m.entries)
    dev = float(np.max(np.abs(exact - analytic)))
    return AnalyticInverse(regime=reg, matrix=analytic, deviation=dev,
                           scaled_deviation=dev * log_eps**2)


def _three_scale_order(reg: Regime):
    """Permutation placing the close pair first, the far inclusion last."""
    i, j = reg.close_pair
    k = ({0, 1, 2} - {i, j}).pop()
    return [i, j, k]
