"""Fourier-side representation of periodic functions on the torus.

Conventions used throughout the package:

* A field with coefficients ``c_k`` represents
  ``u(x) = sum_{k=-N/2}^{N/2-1} c_k exp(i k x)`` on ``x in [0, 2 pi)``.
* Norms are sequence-space norms, ``||u||_{H^s}^2 = sum (1+|k|)^{2s} |c_k|^2``,
  with no 2*pi volume factor.
* Coefficients are stored internally in numpy FFT order
  ``k = 0, 1, ..., N/2-1, -N/2, ..., -1``; serialisation reorders to
  ``k = -N/2 .. N/2-1``.
* Real-valued fields keep the unpaired Nyquist mode ``k = -N/2`` at zero, so
  the effective band is ``|k| <= N/2 - 1`` and conjugate symmetry is exact.
  Derivative-type odd multipliers are zeroed on the Nyquist mode for the same
  reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import NonFiniteValue

__all__ = [
    "FourierField",
    "Multiplier",
    "SobolevIndex",
    "mode_numbers",
    "apply_multiplier",
    "linear_flow_kdv",
    "linear_flow_nls",
    "inv_dx",
    "sobolev_norm",
    "l2_norm",
    "rough_data",
    "project_cutoff",
    "cutoff_mask",
    "to_physical",
    "from_physical",
    "grid_points",
    "dealiased_product",
    "dealiased_triple_product",
    "phi1",
    "phi2",
    "field_to_json_obj",
    "field_from_json_obj",
    "ensure_finite",
]

_REAL_TOL = 1e-8


def mode_numbers(n_modes: int) -> np.ndarray:
    """Integer wavenumbers in storage (FFT) order."""
    return np.fft.fftfreq(n_modes, 1.0 / n_modes).astype(np.int64)


def _check_size(n_modes: int) -> None:
    if n_modes < 8 or (n_modes & (n_modes - 1)) != 0:
        raise ValueError(f"n_modes must be a power of two >= 8, got {n_modes}")


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity index s >= 0 for the (1+|k|)^s weighted norm."""

    s: float

    def __post_init__(self):
        if not np.isfinite(self.s) or self.s < 0:
            raise ValueError(f"Sobolev index must be finite and >= 0, got {self.s}")


@dataclass(frozen=True)
class FourierField:
    """Spectral coefficients of a periodic function on the torus.

    ``coeffs`` is complex, FFT storage order.  ``real_valued`` enforces the
    conjugate symmetry c_{-k} = conj(c_k) exactly: the roundoff-asymmetric
    component is projected out at construction (as an rfft-based layout would
    do structurally) and a violation beyond roundoff scale raises.
    """

    coeffs: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        _check_size(c.shape[0])
        if self.real_valued:
            c = self._symmetrized(c)
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def _symmetrized(c: np.ndarray) -> np.ndarray:
        n = c.shape[0]
        mirrored = np.conj(c[(-np.arange(n)) % n])
        scale = 1.0 + np.max(np.abs(c))
        if np.max(np.abs(c - mirrored)) > _REAL_TOL * scale:
            raise ValueError("real_valued field violates conjugate symmetry")
        sym = 0.5 * (c + mirrored)
        sym[n // 2] = sym[n // 2].real
        return sym

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[0]

    @property
    def modes(self) -> np.ndarray:
        return mode_numbers(self.n_modes)

    def coeff(self, k: int) -> complex:
        n = self.n_modes
        if not (-n // 2 <= k < n // 2):
            raise IndexError(f"mode {k} outside band of size {n}")
        return complex(self.coeffs[k % n])

    @classmethod
    def zeros(cls, n_modes: int, real_valued: bool = False) -> "FourierField":
        return cls(np.zeros(n_modes, dtype=np.complex128), real_valued)

    @classmethod
    def from_modes(
        cls, n_modes: int, entries: dict[int, complex], real_valued: bool = False
    ) -> "FourierField":
        c = np.zeros(n_modes, dtype=np.complex128)
        for k, v in entries.items():
            c[k % n_modes] = v
        return cls(c, real_valued)

    def __add__(self, other: "FourierField") -> "FourierField":
        return FourierField(self.coeffs + other.coeffs,
                            self.real_valued and other.real_valued)

    def __sub__(self, other: "FourierField") -> "FourierField":
        return FourierField(self.coeffs - other.coeffs,
                            self.real_valued and other.real_valued)

    def __mul__(self, scalar: complex) -> "FourierField":
        keep = self.real_valued and (np.imag(scalar) == 0)
        return FourierField(self.coeffs * scalar, keep)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier defined by a pure symbol k -> complex."""

    symbol: Callable[[np.ndarray], np.ndarray]

    def values(self, n_modes: int) -> np.ndarray:
        k = mode_numbers(n_modes)
        vals = np.asarray(self.symbol(k), dtype=np.complex128)
        if vals.shape != k.shape:
            vals = np.asarray([self.symbol(int(kk)) for kk in k], dtype=np.complex128)
        return vals


def _symbol_preserves_reality(vals: np.ndarray, coeffs: np.ndarray) -> bool:
    """m(-k) == conj(m(k)) on paired modes; Nyquist only matters if populated."""
    n = vals.shape[0]
    mirrored = np.conj(vals[(-np.arange(n)) % n])
    pairs_ok = np.max(np.abs(vals - mirrored)[np.arange(n) != n // 2]) <= 1e-14 * (
        1.0 + np.max(np.abs(vals))
    )
    ny = n // 2
    nyquist_ok = abs(coeffs[ny]) == 0.0 or abs(vals[ny].imag) <= 1e-14
    return bool(pairs_ok and nyquist_ok)


def apply_multiplier(u: FourierField, m: Multiplier) -> FourierField:
    vals = m.values(u.n_modes)
    out = u.coeffs * vals
    keep_real = u.real_valued and _symbol_preserves_reality(vals, u.coeffs)
    return FourierField(out, keep_real)


def linear_flow_kdv(u: FourierField, t: float) -> FourierField:
    """Exact flow of u_t + u_xxx = 0: multiplier exp(i t k^3)."""
    k = u.modes
    return FourierField(u.coeffs * np.exp(1j * t * (k.astype(float) ** 3)),
                        u.real_valued)


def linear_flow_nls(u: FourierField, t: float) -> FourierField:
    """Exact free Schroedinger flow: multiplier exp(-i t k^2)."""
    k = u.modes
    return FourierField(u.coeffs * np.exp(-1j * t * (k.astype(float) ** 2)),
                        u.real_valued)


def _inv_ik(n_modes: int) -> np.ndarray:
    k = mode_numbers(n_modes)
    vals = np.zeros(n_modes, dtype=np.complex128)
    nz = k != 0
    vals[nz] = 1.0 / (1j * k[nz])
    vals[n_modes // 2] = 0.0  # unpaired Nyquist, see module docstring
    return vals


def _ik(n_modes: int) -> np.ndarray:
    k = mode_numbers(n_modes)
    vals = 1j * k.astype(np.complex128)
    vals[n_modes // 2] = 0.0
    return vals


def inv_dx(u: FourierField) -> FourierField:
    """Antiderivative with the zero mode sent to zero."""
    return FourierField(u.coeffs * _inv_ik(u.n_modes), u.real_valued)


def sobolev_norm(u: FourierField, s: float | SobolevIndex) -> float:
    sv = s.s if isinstance(s, SobolevIndex) else float(s)
    w = (1.0 + np.abs(u.modes)) ** sv
    return float(np.sqrt(np.sum((w * np.abs(u.coeffs)) ** 2)))


def l2_norm(u: FourierField) -> float:
    return float(np.linalg.norm(u.coeffs))


def rough_data(
    sigma: float | SobolevIndex,
    seed: int,
    n_modes: int,
    real_valued: bool = True,
) -> FourierField:
    """Zero-mean field with |c_k| = (1+|k|)^-(sigma+1/2+eps), random phases.

    The amplitude exponent places the field in H^sigma but in no H^(sigma+d)
    for d > eps = 0.01.  Deterministic in (sigma, seed, n_modes).
    """
    _check_size(n_modes)
    sv = sigma.s if isinstance(sigma, SobolevIndex) else float(sigma)
    decay = sv + 0.5 + 0.01
    rng = np.random.default_rng(seed)
    c = np.zeros(n_modes, dtype=np.complex128)
    half = n_modes // 2
    if real_valued:
        theta = rng.uniform(0.0, 2.0 * np.pi, half - 1)
        for j, k in enumerate(range(1, half)):
            amp = (1.0 + k) ** (-decay)
            c[k] = amp * np.exp(1j * theta[j])
            c[-k % n_modes] = np.conj(c[k])
    else:
        ks = [k for k in range(1, half)] + [-k for k in range(1, half)] + [-half]
        theta = rng.uniform(0.0, 2.0 * np.pi, len(ks))
        for j, k in enumerate(ks):
            c[k % n_modes] = (1.0 + abs(k)) ** (-decay) * np.exp(1j * theta[j])
    return FourierField(c, real_valued)


def cutoff_mask(n_modes: int, tau: float) -> np.ndarray:
    """Boolean mask of modes kept by the |k| <= tau^(-1/3) projection.

    The boundary test is |k|^3 <= 1/tau with a tiny relative guard so that
    exact integer boundaries (e.g. k = 4 at tau = 1/64) are kept.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    k = mode_numbers(n_modes)
    return (np.abs(k).astype(float) ** 3) <= (1.0 / tau) * (1.0 + 1e-12)


def project_cutoff(u: FourierField, tau: float) -> FourierField:
    keep = cutoff_mask(u.n_modes, tau)
    return FourierField(np.where(keep, u.coeffs, 0.0), u.real_valued)


def grid_points(n_modes: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_modes) / n_modes


def to_physical(u: FourierField) -> np.ndarray:
    """Samples u(x_j) = sum_k c_k exp(i k x_j) on x_j = 2 pi j / N."""
    return u.n_modes * np.fft.ifft(u.coeffs)


def from_physical(values: np.ndarray, real_valued: bool | None = None) -> FourierField:
    values = np.asarray(values, dtype=np.complex128)
    c = np.fft.fft(values) / values.shape[0]
    if real_valued is None:
        scale = 1.0 + np.max(np.abs(values))
        real_valued = bool(np.max(np.abs(values.imag)) <= 1e-12 * scale)
    if real_valued:
        n = values.shape[0]
        c = 0.5 * (c + np.conj(c[(-np.arange(n)) % n]))
        c[n // 2] = c[n // 2].real
    return FourierField(c, real_valued)


def _embed(coeffs: np.ndarray, big: int) -> np.ndarray:
    n = coeffs.shape[0]
    out = np.zeros(big, dtype=np.complex128)
    k = mode_numbers(n)
    out[k % big] = coeffs
    return out


def _extract(coeffs_big: np.ndarray, n: int, zero_nyquist: bool) -> np.ndarray:
    big = coeffs_big.shape[0]
    k = mode_numbers(n)
    out = coeffs_big[k % big].copy()
    if zero_nyquist:
        out[n // 2] = 0.0
    return out


def _convolve(parts: Iterable[np.ndarray], pad: int, zero_nyquist: bool) -> np.ndarray:
    parts = list(parts)
    n = parts[0].shape[0]
    big = pad * n
    phys = [big * np.fft.ifft(_embed(p, big)) for p in parts]
    prod = phys[0]
    for p in phys[1:]:
        prod = prod * p
    return _extract(np.fft.fft(prod) / big, n, zero_nyquist)


def dealiased_product(a: np.ndarray, b: np.ndarray, zero_nyquist: bool = False) -> np.ndarray:
    """Exact spectral coefficients of the pointwise product (2N zero padding)."""
    return _convolve([a, b], 2, zero_nyquist)


def dealiased_triple_product(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, zero_nyquist: bool = False
) -> np.ndarray:
    """Exact spectral coefficients of a triple product (4N zero padding)."""
    return _convolve([a, b, c], 4, zero_nyquist)


def _phi_series(z: np.ndarray, shift: int) -> np.ndarray:
    """sum_{j>=0} z^j / (j + shift)! -- used for small |z|."""
    fact = 1.0
    for j in range(1, shift + 1):
        fact *= j
    term = np.ones_like(z) / fact
    out = term.copy()
    for j in range(1, 18):
        term = term * z / (j + shift)
        out += term
    return out


def phi1(z: np.ndarray | complex) -> np.ndarray | complex:
    """phi_1(z) = (e^z - 1)/z with phi_1(0) = 1."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 0.5
    zs = np.where(small, 0.0, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.exp(zs) - 1.0) / np.where(small, 1.0, zs)
    series = _phi_series(np.where(small, z, 0.0), 1)
    out = np.where(small, series, direct)
    return out if out.shape else complex(out)


def phi2(z: np.ndarray | complex) -> np.ndarray | complex:
    """phi_2(z) = (e^z - 1 - z)/z^2 with phi_2(0) = 1/2."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 0.5
    zs = np.where(small, 1.0, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.exp(zs) - 1.0 - zs) / zs**2
    series = _phi_series(np.where(small, z, 0.0), 2)
    out = np.where(small, series, direct)
    return out if out.shape else complex(out)


def field_to_json_obj(u: FourierField) -> dict:
    """JSON object {"n_modes", "real", "coeffs"} ordered k = -N/2 .. N/2-1."""
    n = u.n_modes
    order = np.fft.fftshift(np.arange(n))
    c = u.coeffs[order]
    return {
        "n_modes": n,
        "real": bool(u.real_valued),
        "coeffs": [[float(v.real), float(v.imag)] for v in c],
    }


def field_from_json_obj(obj: dict) -> FourierField:
    n = int(obj["n_modes"])
    flat = np.array([complex(re, im) for re, im in obj["coeffs"]])
    if flat.shape[0] != n:
        raise ValueError("coefficient count does not match n_modes")
    c = np.zeros(n, dtype=np.complex128)
    order = np.fft.fftshift(np.arange(n))
    c[order] = flat
    return FourierField(c, bool(obj["real"]))


def ensure_finite(coeffs: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(coeffs.view(np.float64))):
        raise NonFiniteValue("non-finite spectral coefficient encountered")
    return coeffs
