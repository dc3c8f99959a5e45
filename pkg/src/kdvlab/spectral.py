"""Mean-zero real fields on the 1-D torus, stored as positive-frequency Fourier modes.

A field is represented by complex amplitudes ``u_hat(k)`` for k = 1..M only;
negative frequencies are implied by conjugacy and the zero mode is
structurally absent, so every representable function is real with zero
spatial mean.  Amplitudes are normalised against the orthonormal L2 basis
``c_n(x) = cos(nx)/sqrt(pi)``, ``s_n(x) = sin(nx)/sqrt(pi)``:

    u = sum_n a_n c_n + b_n s_n   <->   u_hat(n) = (a_n - i b_n) * sqrt(pi)/2

which makes ``sobolev_norm(c_1, s=0) == 1`` and keeps all Sobolev norms plain
weighted sums of squared amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# u_hat(n) = (a_n - i b_n) * BASIS_TO_MODE for basis coefficients (a_n, b_n)
BASIS_TO_MODE = np.sqrt(np.pi) / 2.0
# |u|_{H^s}^2 = NORM_FACTOR * sum_k k^{2s} |u_hat(k)|^2
NORM_FACTOR = 4.0 / np.pi
# conventional Fourier coefficient of e^{ikx}: c_k = u_hat(k) * MODE_TO_EXP
MODE_TO_EXP = 1.0 / np.pi


@dataclass(frozen=True, eq=False)
class TorusField:
    """Immutable mean-zero real field; ``modes[k-1]`` is ``u_hat(k)``."""

    modes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.modes, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a field needs at least one mode")
        if not np.all(np.isfinite(arr)):
            raise ValueError("mode amplitudes must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "modes", arr)

    @property
    def n_modes(self) -> int:
        return self.modes.size

    def padded(self, m: int) -> "TorusField":
        """Zero-pad (or reject truncation) to m modes."""
        if m < self.n_modes:
            raise ValueError("cannot pad to fewer modes")
        if m == self.n_modes:
            return self
        out = np.zeros(m, dtype=np.complex128)
        out[: self.n_modes] = self.modes
        return TorusField(out)

    def __add__(self, other: "TorusField") -> "TorusField":
        m = max(self.n_modes, other.n_modes)
        return TorusField(self.padded(m).modes + other.padded(m).modes)

    def __sub__(self, other: "TorusField") -> "TorusField":
        m = max(self.n_modes, other.n_modes)
        return TorusField(self.padded(m).modes - other.padded(m).modes)

    def __mul__(self, scalar: float) -> "TorusField":
        return TorusField(self.modes * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "TorusField":
        return TorusField(-self.modes)


def make_field(coeffs) -> TorusField:
    """Build a field from amplitudes ``u_hat(k)``, k = 1..M."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    if coeffs.size == 0:
        raise ValueError("empty coefficient list")
    return TorusField(coeffs)


def zero_field(m: int = 1) -> TorusField:
    return TorusField(np.zeros(m, dtype=np.complex128))


def cosine_mode(n: int, m: int | None = None) -> TorusField:
    """The basis field c_n = cos(nx)/sqrt(pi), optionally padded to m modes."""
    if n < 1:
        raise ValueError("mode index must be >= 1")
    out = np.zeros(m if m is not None else n, dtype=np.complex128)
    out[n - 1] = BASIS_TO_MODE
    return TorusField(out)


def sine_mode(n: int, m: int | None = None) -> TorusField:
    """The basis field s_n = sin(nx)/sqrt(pi)."""
    if n < 1:
        raise ValueError("mode index must be >= 1")
    out = np.zeros(m if m is not None else n, dtype=np.complex128)
    out[n - 1] = -1j * BASIS_TO_MODE
    return TorusField(out)


def from_basis(a, b) -> TorusField:
    """Field with orthonormal-basis coefficients u = sum a_n c_n + b_n s_n."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("cosine and sine coefficient arrays must match")
    return TorusField((a - 1j * b) * BASIS_TO_MODE)


def basis_coeffs(u: TorusField) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`from_basis`: returns (a, b)."""
    return u.modes.real / BASIS_TO_MODE, -u.modes.imag / BASIS_TO_MODE


def grid(n: int) -> np.ndarray:
    """Equispaced torus grid x_j = 2 pi j / n."""
    return 2.0 * np.pi * np.arange(n) / n


def evaluate(u: TorusField, n: int | None = None) -> np.ndarray:
    """Sample u on an equispaced grid of n points (default 8M, always real)."""
    m = u.n_modes
    if n is None:
        n = max(8 * m, 32)
    if n < 2 * m + 1:
        raise ValueError(f"grid of {n} points cannot resolve {m} modes")
    spec = np.zeros(n // 2 + 1, dtype=np.complex128)
    spec[1 : m + 1] = u.modes * MODE_TO_EXP
    return np.fft.irfft(spec, n) * n


def evaluate_many(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`evaluate` for a (batch, M) array of mode amplitudes."""
    m = coeffs.shape[-1]
    if n < 2 * m + 1:
        raise ValueError(f"grid of {n} points cannot resolve {m} modes")
    spec = np.zeros(coeffs.shape[:-1] + (n // 2 + 1,), dtype=np.complex128)
    spec[..., 1 : m + 1] = coeffs * MODE_TO_EXP
    return np.fft.irfft(spec, n, axis=-1) * n


def sobolev_norm(u: TorusField, s: float) -> float:
    """Homogeneous H^s norm; s = 0 is the L2 norm, normalised so |c_1| = 1."""
    if s < 0:
        raise ValueError("regularity exponent must be >= 0")
    k = np.arange(1, u.n_modes + 1, dtype=np.float64)
    return float(np.sqrt(NORM_FACTOR * np.sum(k ** (2 * s) * np.abs(u.modes) ** 2)))


def sobolev_norms_many(coeffs: np.ndarray, s: float) -> np.ndarray:
    """H^s norms of each row of a (batch, M) amplitude array."""
    if s < 0:
        raise ValueError("regularity exponent must be >= 0")
    k = np.arange(1, coeffs.shape[-1] + 1, dtype=np.float64)
    return np.sqrt(NORM_FACTOR * np.sum(k ** (2 * s) * np.abs(coeffs) ** 2, axis=-1))


def linf_norm(u: TorusField) -> float:
    """Sup norm approximated on an 8x-oversampled equispaced grid.

    Exact maximisation of a trigonometric polynomial is not attempted; the
    grid error is spectrally small at this oversampling.
    """
    return float(np.max(np.abs(evaluate(u))))


def linf_norms_many(coeffs: np.ndarray) -> np.ndarray:
    n = max(8 * coeffs.shape[-1], 32)
    return np.max(np.abs(evaluate_many(coeffs, n)), axis=-1)


def project(u: TorusField, n_keep: int) -> TorusField:
    """Orthogonal projection onto modes k <= n_keep (idempotent)."""
    if n_keep < 0:
        raise ValueError("projection cutoff must be >= 0")
    out = np.array(u.modes)
    out[n_keep:] = 0.0
    return TorusField(out)


def inner_product(u: TorusField, v: TorusField) -> float:
    """L2 inner product via mode amplitudes."""
    m = max(u.n_modes, v.n_modes)
    a = u.padded(m).modes
    b = v.padded(m).modes
    return float(NORM_FACTOR * np.sum(a * np.conj(b)).real)


def integral_u3(u: TorusField) -> float:
    """Integral of u^3 over the torus, by triple mode convolution (exact)."""
    m = u.n_modes
    c = u.modes * MODE_TO_EXP
    full = np.concatenate([np.conj(c[::-1]), [0.0], c])  # k = -M..M
    sq = np.convolve(full, full)  # coefficients of u^2, k = -2M..2M
    center = 2 * m
    seg = sq[center - m : center + m + 1]  # k = -M..M
    # integral = 2 pi * sum_k (u^2)_hat(k) u_hat(-k)
    return float(2.0 * np.pi * np.sum(seg * full[::-1]).real)


def integral_u3_quadrature(u: TorusField) -> float:
    """Integral of u^3 by equispaced quadrature on 3M+1 points.

    The periodic trapezoid rule is exact for trigonometric polynomials of
    degree <= 3M on this grid, so this must agree with :func:`integral_u3`
    to roundoff; the pair acts as a cross-check.
    """
    n = 3 * u.n_modes + 1
    vals = evaluate(u, n)
    return float(np.sum(vals**3) * (2.0 * np.pi / n))


def integral_u3_many(coeffs: np.ndarray) -> np.ndarray:
    """Vectorised cubic integrals for a (batch, M) amplitude array."""
    m = coeffs.shape[-1]
    n = 4
    while n < 3 * m + 1:
        n *= 2
    vals = evaluate_many(coeffs, n)
    return np.sum(vals**3, axis=-1) * (2.0 * np.pi / n)


def hamiltonian(u: TorusField) -> float:
    """Energy functional H(u) = |d_x u|_{L2}^2 / 2 - (1/6) integral of u^3."""
    return 0.5 * sobolev_norm(u, 1.0) ** 2 - integral_u3(u) / 6.0
