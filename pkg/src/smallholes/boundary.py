"""Periodic boundary data stored as uniform samples plus Fourier coefficients.

All boundary functions in this package live on the mapped-circle
parametrization of their boundary: sample j holds the value at the physical
point gamma(theta_j) with theta_j = 2*pi*j/M.
"""

from __future__ import annotations

import numpy as np

MIN_SAMPLES = 32


def angles(m: int) -> np.ndarray:
    """Uniform parameter angles theta_j = 2*pi*j/m."""
    return np.arange(m) * (2.0 * np.pi / m)


class BoundaryFunction:
    """Real periodic function on a parametrized boundary component.

    Stores M uniform samples (M a power of two, M >= 32) together with the
    normalized FFT coefficients c_k = (1/M) sum_j f_j exp(-i k theta_j).
    """

    __slots__ = ("samples", "boundary_id", "fourier")

    def __init__(self, samples, boundary_id="outer"):
        samples = np.asarray(samples, dtype=float)
        m = samples.shape[0]
        if samples.ndim != 1:
            raise ValueError("samples must be a 1-d array")
        if m < MIN_SAMPLES or m & (m - 1):
            raise ValueError(f"sample count must be a power of two >= {MIN_SAMPLES}, got {m}")
        self.samples = samples
        self.boundary_id = boundary_id
        self.fourier = np.fft.fft(samples) / m

    @classmethod
    def from_callable(cls, fn, m=256, boundary_id="outer"):
        """Sample fn(theta) at the m uniform angles."""
        return cls(np.asarray([fn(t) for t in angles(m)], dtype=float), boundary_id)

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    def mode_amplitudes(self) -> np.ndarray:
        """Complex amplitudes d_k (k = 1..M/2) with
        f(theta) = mean + sum_k Re(d_k exp(-i k theta)).

        d_k = a_k + i b_k for f = mean + sum a_k cos(k theta) + b_k sin(k theta).
        """
        m = self.size
        d = 2.0 * np.conj(self.fourier[1 : m // 2 + 1])
        d[-1] = np.real(self.fourier[m // 2])  # Nyquist mode carries no sine part
        return d

    def tail_sup(self, above_degree: int) -> float:
        """Largest |c_k| with above_degree < k <= M/2."""
        m = self.size
        lo = above_degree + 1
        if lo > m // 2:
            return 0.0
        return float(np.max(np.abs(self.fourier[lo : m // 2 + 1])))

    def reconstruct(self) -> np.ndarray:
        """Inverse transform of the stored coefficients (for invariant checks)."""
        return np.real(np.fft.ifft(self.fourier * self.size))

    def __add__(self, other):
        self._check_compatible(other)
        return BoundaryFunction(self.samples + other.samples, self.boundary_id)

    def __sub__(self, other):
        self._check_compatible(other)
        return BoundaryFunction(self.samples - other.samples, self.boundary_id)

    def __mul__(self, scalar):
        return BoundaryFunction(self.samples * float(scalar), self.boundary_id)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if not isinstance(other, BoundaryFunction) or other.size != self.size:
            raise ValueError("boundary functions must share the sample grid")

    def to_csv(self, path):
        """Write rows theta_j,value for debugging."""
        th = angles(self.size)
        with open(path, "w") as fh:
            fh.write("theta,value\n")
            for t, v in zip(th, self.samples):
                fh.write(f"{t:.17e},{v:.17e}\n")

    def __repr__(self):
        return (f"BoundaryFunction(id={self.boundary_id!r}, M={self.size}, "
                f"sup={self.sup_norm:.3e})")
