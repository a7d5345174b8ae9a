"""One-step maps for the periodic KdV equation u_t + u_xxx = (1/2) (u^2)_x.

Classical baselines (Lie/Strang splitting, first/second-order exponential
integrators) and the resonance-based integrators built from the exact
integration of the first Duhamel oscillation, plus the implicit symmetric
midpoint variant.  Every step is a pure map FourierField -> FourierField.

When ``filtered`` is set, the quadratic nonlinearity is wrapped in the
frequency cutoff Pi_tau (factors and result), i.e. the step discretises the
filtered equation u_t + u_xxx = (1/2) Pi (Pi u)^2_x.  The linear flow is
never filtered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NonFiniteValue
from .spectral import (
    FourierField,
    cutoff_mask,
    dealiased_product,
    ensure_finite,
    mode_numbers,
    phi1,
    phi2,
)

__all__ = [
    "KdvScheme",
    "KDV_SCHEME_KINDS",
    "step_lie",
    "step_strang",
    "step_expint1",
    "step_expint2",
    "step_resonance1",
    "step_resonance2",
    "step_symmetric_midpoint",
    "burgers_flow",
    "psi_filter_values",
]

KDV_SCHEME_KINDS = (
    "Lie",
    "Strang",
    "ExpInt1",
    "ExpInt2",
    "Resonance1",
    "Resonance2",
    "SymmetricMidpoint",
)


def _kdv_phase(n_modes: int, t: float) -> np.ndarray:
    k = mode_numbers(n_modes).astype(float)
    return np.exp(1j * t * k**3)


def _ik(n_modes: int) -> np.ndarray:
    k = mode_numbers(n_modes)
    vals = 1j * k.astype(np.complex128)
    vals[n_modes // 2] = 0.0
    return vals


def _inv_ik(n_modes: int) -> np.ndarray:
    k = mode_numbers(n_modes)
    vals = np.zeros(n_modes, dtype=np.complex128)
    nz = k != 0
    vals[nz] = 1.0 / (1j * k[nz])
    vals[n_modes // 2] = 0.0
    return vals


def _mask(n_modes: int, tau: float, filtered: bool) -> np.ndarray | None:
    return cutoff_mask(n_modes, tau) if filtered else None


def _burgers_rhs(c: np.ndarray, ik: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    w = c if mask is None else np.where(mask, c, 0.0)
    rhs = 0.5 * ik * dealiased_product(w, w, zero_nyquist=True)
    if mask is not None:
        rhs = np.where(mask, rhs, 0.0)
    return rhs


def burgers_flow(
    u: FourierField, t: float, substeps: int = 20, mask: np.ndarray | None = None
) -> FourierField:
    """Flow of u_t = (1/2)(u^2)_x by classical RK4 substeps in coefficient space."""
    n = u.n_modes
    ik = _ik(n)
    h = t / substeps
    c = u.coeffs.copy()
    for _ in range(substeps):
        k1 = _burgers_rhs(c, ik, mask)
        k2 = _burgers_rhs(c + 0.5 * h * k1, ik, mask)
        k3 = _burgers_rhs(c + 0.5 * h * k2, ik, mask)
        k4 = _burgers_rhs(c + h * k3, ik, mask)
        c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    ensure_finite(c)
    return FourierField(c, u.real_valued)


def step_lie(
    u: FourierField, tau: float, substeps: int = 20, filtered: bool = False
) -> FourierField:
    """Lie splitting phi_L^tau o phi_N^tau (nonlinear subflow first)."""
    mask = _mask(u.n_modes, tau, filtered)
    v = burgers_flow(u, tau, substeps, mask)
    c = v.coeffs * _kdv_phase(u.n_modes, tau)
    return FourierField(ensure_finite(c), u.real_valued)


def step_strang(
    u: FourierField, tau: float, substeps: int = 20, filtered: bool = False
) -> FourierField:
    """Strang splitting phi_L^(tau/2) o phi_N^tau o phi_L^(tau/2)."""
    n = u.n_modes
    mask = _mask(n, tau, filtered)
    half = _kdv_phase(n, 0.5 * tau)
    v = FourierField(u.coeffs * half, u.real_valued)
    v = burgers_flow(v, tau, substeps, mask)
    c = v.coeffs * half
    return FourierField(ensure_finite(c), u.real_valued)


def step_expint1(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    """First-order exponential integrator
    u' = e^{-tau d_x^3} u + (tau/2) d_x phi_1(-tau d_x^3) u^2."""
    n = u.n_modes
    k = mode_numbers(n).astype(float)
    mask = _mask(n, tau, filtered)
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    sq = dealiased_product(w, w, zero_nyquist=True)
    incr = 0.5 * tau * _ik(n) * phi1(1j * tau * k**3) * sq
    if mask is not None:
        incr = np.where(mask, incr, 0.0)
    c = u.coeffs * _kdv_phase(n, tau) + incr
    return FourierField(ensure_finite(c), u.real_valued)


def step_expint2(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    """Second-order exponential integrator: the time derivative inside the
    Duhamel integral is replaced by the equation itself,
    u' = e^{-tau A} u + (1/2) d_x e^{-tau A} [ tau phi_1(tau A) u^2
         + tau^2 (phi_1 - phi_2)(tau A) (2 u u_t) ],  A = d_x^3.
    """
    n = u.n_modes
    k = mode_numbers(n).astype(float)
    ik = _ik(n)
    mask = _mask(n, tau, filtered)
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    sq = dealiased_product(w, w, zero_nyquist=True)
    sq_f = sq if mask is None else np.where(mask, sq, 0.0)
    udot = 1j * k**3 * u.coeffs + 0.5 * ik * sq_f
    udot_w = udot if mask is None else np.where(mask, udot, 0.0)
    cross = dealiased_product(w, udot_w, zero_nyquist=True)
    z = -1j * tau * k**3  # tau * d_x^3 in Fourier
    bracket = tau * phi1(z) * sq + tau**2 * (phi1(z) - phi2(z)) * (2.0 * cross)
    incr = 0.5 * ik * _kdv_phase(n, tau) * bracket
    if mask is not None:
        incr = np.where(mask, incr, 0.0)
    c = u.coeffs * _kdv_phase(n, tau) + incr
    return FourierField(ensure_finite(c), u.real_valued)


def step_resonance1(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    """First-order resonance-based scheme
    u' = e^{-tau d_x^3} u + (1/6)(e^{-tau d_x^3} d_x^{-1} u)^2
         - (1/6) e^{-tau d_x^3} (d_x^{-1} u)^2."""
    n = u.n_modes
    phase = _kdv_phase(n, tau)
    mask = _mask(n, tau, filtered)
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    p = w * _inv_ik(n)
    a = dealiased_product(phase * p, phase * p, zero_nyquist=True)
    b = phase * dealiased_product(p, p, zero_nyquist=True)
    incr = (a - b) / 6.0
    if mask is not None:
        incr = np.where(mask, incr, 0.0)
    c = u.coeffs * phase + incr
    return FourierField(ensure_finite(c), u.real_valued)


def psi_filter_values(n_modes: int, tau: float) -> np.ndarray:
    """Filter Psi(i tau d_x^2) at mode k: sin(tau k^2)/(tau k^2), value 1 at 0.

    Satisfies Psi(0) = 1 and |tau Psi k^2| = |sin(tau k^2)| <= 1.
    """
    k = mode_numbers(n_modes).astype(float)
    return np.sinc(tau * k**2 / np.pi)


def step_resonance2(u: FourierField, tau: float, filtered: bool = False,
                    psi: np.ndarray | None = None) -> FourierField:
    """Second-order resonance-based scheme: the first-order terms plus
    (tau^2/4) e^{-tau d_x^3} Psi(i tau d_x^2) d_x( u d_x(u u) )."""
    n = u.n_modes
    phase = _kdv_phase(n, tau)
    ik = _ik(n)
    mask = _mask(n, tau, filtered)
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    base = step_resonance1(u, tau, filtered)
    d = ik * dealiased_product(w, w, zero_nyquist=True)
    f = ik * dealiased_product(w, d, zero_nyquist=True)
    if psi is None:
        psi = psi_filter_values(n, tau)
    incr = 0.25 * tau**2 * phase * psi * f
    if mask is not None:
        incr = np.where(mask, incr, 0.0)
    c = base.coeffs + incr
    return FourierField(ensure_finite(c), u.real_valued)


def step_symmetric_midpoint(
    u: FourierField,
    tau: float,
    fp_tol: float = 1e-12,
    fp_max_iter: int = 100,
    filtered: bool = False,
) -> FourierField:
    """Implicit symmetric midpoint form of the first-order resonance scheme:
    the fixed point u+ of

        u+ = e^{-tau A} u + (1/24)(e^{-tau A} P u + P u+)^2
             - (1/24) e^{-tau A} (P u + e^{tau A} P u+)^2,

    with A = d_x^3, P = d_x^{-1}, solved by fixed-point iteration started at
    the explicit first-order resonance step.
    """
    n = u.n_modes
    phase = _kdv_phase(n, tau)
    phase_back = _kdv_phase(n, -tau)
    pinv = _inv_ik(n)
    mask = _mask(n, tau, filtered)
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    pu = pinv * w
    lin = u.coeffs * phase

    def apply_map(x: np.ndarray) -> np.ndarray:
        xf = x if mask is None else np.where(mask, x, 0.0)
        px = pinv * xf
        s1 = phase * pu + px
        s2 = pu + phase_back * px
        incr = (dealiased_product(s1, s1, zero_nyquist=True)
                - phase * dealiased_product(s2, s2, zero_nyquist=True)) / 24.0
        if mask is not None:
            incr = np.where(mask, incr, 0.0)
        return lin + incr

    x = step_resonance1(u, tau, filtered).coeffs
    for it in range(1, fp_max_iter + 1):
        x_next = apply_map(x)
        ensure_finite(x_next)
        res = float(np.linalg.norm(x_next - x))
        x = x_next
        if res < fp_tol:
            return FourierField(x, u.real_valued)
    raise NoConvergence(fp_max_iter, res)


_STEPPERS = {
    "Lie": lambda u, s: step_lie(u, s.tau, s.burgers_substeps, s.filter),
    "Strang": lambda u, s: step_strang(u, s.tau, s.burgers_substeps, s.filter),
    "ExpInt1": lambda u, s: step_expint1(u, s.tau, s.filter),
    "ExpInt2": lambda u, s: step_expint2(u, s.tau, s.filter),
    "Resonance1": lambda u, s: step_resonance1(u, s.tau, s.filter),
    "Resonance2": lambda u, s: step_resonance2(u, s.tau, s.filter),
    "SymmetricMidpoint": lambda u, s: step_symmetric_midpoint(
        u, s.tau, s.fp_tol, s.fp_max_iter, s.filter
    ),
}


@dataclass(frozen=True)
class KdvScheme:
    """One-step KdV integrator configuration."""

    kind: str
    tau: float
    filter: bool = False
    burgers_substeps: int = 20
    fp_tol: float = 1e-12
    fp_max_iter: int = 100

    def __post_init__(self):
        if self.kind not in KDV_SCHEME_KINDS:
            raise ValueError(f"unknown KdV scheme kind {self.kind!r}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.burgers_substeps < 1:
            raise ValueError("burgers_substeps must be >= 1")
        if self.fp_tol <= 0 or self.fp_max_iter < 1:
            raise ValueError("invalid fixed-point solver parameters")

    def step(self, u: FourierField) -> FourierField:
        return _STEPPERS[self.kind](u, self)

    def with_tau(self, tau: float) -> "KdvScheme":
        return KdvScheme(self.kind, tau, self.filter, self.burgers_substeps,
                         self.fp_tol, self.fp_max_iter)
