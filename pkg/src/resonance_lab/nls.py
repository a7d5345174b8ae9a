"""One-step maps for the 1-d periodic cubic Schroedinger equation
i u_t + u_xx = |u|^2 u.

Baselines (Lie/Strang splitting with the exact pointwise nonlinear subflow,
first-order exponential integrator) and the first-order resonance-based
integrator built from the dominant phase 2 k_1^2 of the first iterated
Duhamel integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    FourierField,
    cutoff_mask,
    dealiased_triple_product,
    ensure_finite,
    from_physical,
    mode_numbers,
    phi1,
    to_physical,
)

__all__ = [
    "NlsScheme",
    "NLS_SCHEME_KINDS",
    "step_lie_nls",
    "step_strang_nls",
    "step_expint1_nls",
    "step_resonance1_nls",
]

NLS_SCHEME_KINDS = ("LieNls", "StrangNls", "ExpInt1Nls", "Resonance1Nls")


def _nls_phase(n_modes: int, t: float) -> np.ndarray:
    k = mode_numbers(n_modes).astype(float)
    return np.exp(-1j * t * k**2)


def _nonlinear_subflow(u: FourierField, tau: float) -> FourierField:
    """Exact flow of i u_t = |u|^2 u: pointwise u -> exp(-i tau |u|^2) u."""
    g = to_physical(u)
    g = np.exp(-1j * tau * np.abs(g) ** 2) * g
    return from_physical(g, real_valued=False)


def _cubic(u_coeffs: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    """Dealiased |u|^2 u, with the cutoff applied to factors when filtering."""
    w = u_coeffs if mask is None else np.where(mask, u_coeffs, 0.0)
    n = w.shape[0]
    conj_w = np.conj(w[(-np.arange(n)) % n])  # coefficients of conj(u)
    return dealiased_triple_product(w, w, conj_w)


def step_lie_nls(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    v = _nonlinear_subflow(u, tau)
    c = v.coeffs * _nls_phase(u.n_modes, tau)
    return FourierField(ensure_finite(c), False)


def step_strang_nls(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    half = _nls_phase(u.n_modes, 0.5 * tau)
    v = FourierField(u.coeffs * half, False)
    v = _nonlinear_subflow(v, tau)
    c = v.coeffs * half
    return FourierField(ensure_finite(c), False)


def step_expint1_nls(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    """First-order exponential integrator:
    coeff'(k) = e^{-i tau k^2} [ v_k - i tau phi_1(i tau k^2) (|u|^2 u)^(k) ]."""
    n = u.n_modes
    k = mode_numbers(n).astype(float)
    mask = cutoff_mask(n, tau) if filtered else None
    cubic = _cubic(u.coeffs, mask)
    if mask is not None:
        cubic = np.where(mask, cubic, 0.0)
    c = _nls_phase(n, tau) * (u.coeffs - 1j * tau * phi1(1j * tau * k**2) * cubic)
    return FourierField(ensure_finite(c), False)


def step_resonance1_nls(u: FourierField, tau: float, filtered: bool = False) -> FourierField:
    """First-order resonance-based scheme.  In Fourier variables,

        coeff'(k) = e^{-i tau k^2} [ v_k
            - i sum_{-k1+k2+k3=k} tau phi_1(2 i tau k1^2) conj(v_k1) v_k2 v_k3 ],

    realised through the factorised physical-space product
    u' = e^{i tau Dx}[ u - i tau u^2 conj(phi_1(2 i tau Dx) u) ]
    (the interaction weight depends on k1 only).
    """
    n = u.n_modes
    k = mode_numbers(n).astype(float)
    mask = cutoff_mask(n, tau) if filtered else None
    w = u.coeffs if mask is None else np.where(mask, u.coeffs, 0.0)
    weighted = phi1(-2j * tau * k**2) * w  # phi_1(2 i tau Laplacian) u
    conj_weighted = np.conj(weighted[(-np.arange(n)) % n])
    triple = dealiased_triple_product(w, w, conj_weighted)
    if mask is not None:
        triple = np.where(mask, triple, 0.0)
    c = _nls_phase(n, tau) * (u.coeffs - 1j * tau * triple)
    return FourierField(ensure_finite(c), False)


_STEPPERS = {
    "LieNls": lambda u, s: step_lie_nls(u, s.tau, s.filter),
    "StrangNls": lambda u, s: step_strang_nls(u, s.tau, s.filter),
    "ExpInt1Nls": lambda u, s: step_expint1_nls(u, s.tau, s.filter),
    "Resonance1Nls": lambda u, s: step_resonance1_nls(u, s.tau, s.filter),
}


@dataclass(frozen=True)
class NlsScheme:
    """One-step cubic-NLS integrator configuration."""

    kind: str
    tau: float
    filter: bool = False

    def __post_init__(self):
        if self.kind not in NLS_SCHEME_KINDS:
            raise ValueError(f"unknown NLS scheme kind {self.kind!r}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def step(self, u: FourierField) -> FourierField:
        return _STEPPERS[self.kind](u, self)

    def with_tau(self, tau: float) -> "NlsScheme":
        return NlsScheme(self.kind, tau, self.filter)
