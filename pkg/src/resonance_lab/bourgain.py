"""Discrete Bourgain-space diagnostics for time sequences of periodic fields.

For a finitely supported sequence (u^n) with step tau, the space-time
transform is

    u~(sigma, k) = tau * sum_m u^m_k e^{i m tau sigma},  sigma in [-pi/tau, pi/tau).

All sigma integrals are taken against the normalised measure d sigma / (2 pi)
so that Parseval reads  int sum_k |u~|^2 = tau sum_{m,k} |u^m_k|^2  exactly;
absolute constants therefore differ from unnormalised conventions by fixed
powers of 2 pi, which the fitted-constant reports absorb.  On the uniform
sigma grid with J >= 4 M points the L^2 quadrature is exact for the degree
< M trigonometric integrand; the L^1(sigma) component is quadrature with an
automatic Richardson refinement (grid doubling until successive values agree
to 1e-6 relative).

Norms use <k> = 1 + |k| and <z> = sqrt(1 + |z|^2); the dispersion shift is
sigma + k^3 for KdV (sigma - k^2 for NLS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonZeroMeanMode
from .spectral import (
    FourierField,
    cutoff_mask,
    dealiased_product,
    mode_numbers,
)

__all__ = [
    "TimeSequence",
    "BourgainParams",
    "ConstantReport",
    "ESTIMATE_IDS",
    "default_sigma_samples",
    "sigma_grid",
    "spacetime_transform",
    "d_tau",
    "xsb_norm",
    "xs_norm",
    "ys_norm",
    "bump_window",
    "duhamel_sum",
    "check_estimate",
]

ESTIMATE_IDS = (
    "bourg1d",
    "bourg2d",
    "bourg3d",
    "bourg4d",
    "sob_half",
    "duhamel_half",
    "bilinear",
)


@dataclass(frozen=True)
class TimeSequence:
    """Finite sequence of spectral fields (compactly supported in time)."""

    coeffs: np.ndarray  # (M, N) complex, FFT mode order
    tau: float

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError("coeffs must be a (M, N) array with M >= 1")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_fields(cls, fields: Sequence[FourierField], tau: float) -> "TimeSequence":
        n = fields[0].n_modes
        if any(f.n_modes != n for f in fields):
            raise ValueError("all fields must share n_modes")
        return cls(np.stack([f.coeffs for f in fields]), tau)

    @property
    def n_steps(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[1]

    def field(self, n: int) -> FourierField:
        return FourierField(self.coeffs[n])


@dataclass(frozen=True)
class BourgainParams:
    s: float
    b: float
    tau: float
    sigma_samples: int

    def __post_init__(self):
        if self.sigma_samples < 4:
            raise ValueError("sigma_samples must be >= 4")


def default_sigma_samples(n_steps: int) -> int:
    return max(4 * n_steps, 64)


def sigma_grid(tau: float, samples: int) -> np.ndarray:
    return -np.pi / tau + (2.0 * np.pi / (tau * samples)) * np.arange(samples)


def spacetime_transform(
    seq: TimeSequence, samples: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate u~(sigma_j, k) exactly on the uniform sigma grid."""
    J = default_sigma_samples(seq.n_steps) if samples is None else samples
    sig = sigma_grid(seq.tau, J)
    m = np.arange(seq.n_steps)
    phases = np.exp(1j * seq.tau * np.outer(sig, m))  # (J, M)
    return sig, seq.tau * phases @ seq.coeffs


def d_tau(sigma: np.ndarray | float, tau: float) -> np.ndarray | complex:
    """d_tau(sigma) = (e^{i tau sigma} - 1)/tau, 2 pi / tau periodic."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    out = (np.exp(1j * tau * np.asarray(sigma, dtype=np.float64)) - 1.0) / tau
    return out if out.shape else complex(out)


def _dispersion_shift(modes: np.ndarray, dispersion: str) -> np.ndarray:
    k = modes.astype(np.float64)
    if dispersion == "kdv":
        return k**3
    if dispersion == "nls":
        return -(k**2)
    raise ValueError(f"unknown dispersion {dispersion!r}")


def _weight_grid(
    seq: TimeSequence, sig: np.ndarray, s: float, b: float, dispersion: str
) -> np.ndarray:
    k = mode_numbers(seq.n_modes)
    shift = sig[:, None] + _dispersion_shift(k, dispersion)[None, :]
    dval = d_tau(shift, seq.tau)
    kw = (1.0 + np.abs(k)).astype(np.float64) ** s
    return kw[None, :] * (1.0 + np.abs(dval) ** 2) ** (0.5 * b)


def xsb_norm(
    seq: TimeSequence,
    s: float,
    b: float,
    samples: int | None = None,
    dispersion: str = "kdv",
) -> float:
    """Weighted L^2(sigma) l^2(k) norm with weight <k>^s <d_tau(sigma+k^3)>^b."""
    J = default_sigma_samples(seq.n_steps) if samples is None else samples
    sig, u = spacetime_transform(seq, J)
    w = _weight_grid(seq, sig, s, b, dispersion)
    return float(np.sqrt(np.sum(np.abs(w * u) ** 2) / (seq.tau * J)))


def _l2k_l1sigma_at(
    seq: TimeSequence, s: float, J: int, dispersion: str, inverse_d: bool
) -> float:
    sig, u = spacetime_transform(seq, J)
    k = mode_numbers(seq.n_modes)
    kw = (1.0 + np.abs(k)).astype(np.float64) ** s
    vals = np.abs(u)
    if inverse_d:
        shift = sig[:, None] + _dispersion_shift(k, dispersion)[None, :]
        vals = vals / np.sqrt(1.0 + np.abs(d_tau(shift, seq.tau)) ** 2)
    per_k = np.sum(vals, axis=0) / (seq.tau * J)  # int |u~| dsigma/(2 pi)
    return float(np.sqrt(np.sum((kw * per_k) ** 2)))


def _l2k_l1sigma(
    seq: TimeSequence, s: float, dispersion: str, inverse_d: bool
) -> float:
    """l^2(k) L^1(sigma) component with Richardson-checked quadrature."""
    J = default_sigma_samples(seq.n_steps)
    val = _l2k_l1sigma_at(seq, s, J, dispersion, inverse_d)
    for _ in range(6):
        val2 = _l2k_l1sigma_at(seq, s, 2 * J, dispersion, inverse_d)
        if abs(val - val2) <= 1e-6 * max(val2, 1e-300):
            return val2
        J, val = 2 * J, val2
    return val


def xs_norm(seq: TimeSequence, s: float, dispersion: str = "kdv") -> float:
    """||u||_{X^s_tau} = ||u||_{X^{s,1/2}_tau} + ||<k>^s u~||_{l^2(k) L^1(sigma)}.

    Defined for zero-mean sequences only.
    """
    if np.max(np.abs(seq.coeffs[:, 0])) > 0.0:
        raise NonZeroMeanMode("X^s_tau requires vanishing zero mode")
    return xsb_norm(seq, s, 0.5, dispersion=dispersion) + _l2k_l1sigma(
        seq, s, dispersion, inverse_d=False
    )


def ys_norm(seq: TimeSequence, s: float, dispersion: str = "kdv") -> float:
    """||F||_{Y^s_tau} = ||F||_{X^{s,-1/2}_tau}
    + ||<k>^s / <d_tau(sigma+k^3)> F~||_{l^2(k) L^1(sigma)}."""
    return xsb_norm(seq, s, -0.5, dispersion=dispersion) + _l2k_l1sigma(
        seq, s, dispersion, inverse_d=True
    )


def bump_window(center: float = 0.5, halfwidth: float = 0.6) -> Callable[[float], float]:
    """Smooth compactly supported bump exp(1 - 1/(1-t^2)) rescaled to cover
    [center - halfwidth, center + halfwidth]."""

    def eta(t: float) -> float:
        x = (t - center) / halfwidth
        if abs(x) >= 1.0:
            return 0.0
        return math.exp(1.0 - 1.0 / (1.0 - x * x))

    return eta


def duhamel_sum(
    seq: TimeSequence,
    eta: Callable[[float], float] | None = None,
    dispersion: str = "kdv",
) -> TimeSequence:
    """U^n = eta(n tau) tau sum_{m<=n} e^{-(n-m) tau d_x^3} u^m (windowed
    discrete Duhamel accumulation; free flow per the dispersion symbol)."""
    tau = seq.tau
    if eta is None:
        eta = bump_window(center=0.5 * (seq.n_steps - 1) * tau,
                          halfwidth=0.65 * max(seq.n_steps * tau, tau))
    k = mode_numbers(seq.n_modes)
    step_phase = np.exp(-1j * tau * _dispersion_shift(k, dispersion))
    # KdV: e^{-tau d_x^3} has symbol e^{i tau k^3}; shift(kdv) = +k^3 gives
    # e^{-i tau shift} = e^{-i tau k^3}; flip sign to match the flow.
    step_phase = np.conj(step_phase)
    out = np.zeros_like(seq.coeffs)
    acc = np.zeros(seq.n_modes, dtype=np.complex128)
    for n in range(seq.n_steps):
        acc = step_phase * acc + seq.coeffs[n] if n > 0 else seq.coeffs[0].copy()
        out[n] = eta(n * tau) * tau * acc
    return TimeSequence(out, tau)


# ---------------------------------------------------------------------------
# empirical estimate checks


@dataclass(frozen=True)
class ConstantReport:
    estimate: str
    per_tau: tuple[dict, ...]
    uniformity_ratio: float

    def to_json_obj(self) -> dict:
        return {
            "estimate": self.estimate,
            "per_tau": [dict(row) for row in self.per_tau],
            "uniformity_ratio": self.uniformity_ratio,
        }


_DECAY_PROFILES = (0.0, 1.0, 2.0)


def _random_sequence(
    rng: np.random.Generator,
    n_steps: int,
    n_modes: int,
    tau: float,
    decay: float,
    zero_mean: bool,
    modulated: bool,
) -> TimeSequence:
    k = mode_numbers(n_modes)
    w = (1.0 + np.abs(k)).astype(np.float64) ** (-decay)
    g = rng.standard_normal((n_steps, n_modes)) + 1j * rng.standard_normal(
        (n_steps, n_modes)
    )
    c = g * w[None, :]
    if modulated:
        phase = np.exp(1j * tau * np.outer(np.arange(n_steps), k.astype(float) ** 3))
        c = c * phase
    if zero_mean:
        c[:, 0] = 0.0
    return TimeSequence(c, tau)


def _random_field(
    rng: np.random.Generator, n_modes: int, decay: float, zero_mean: bool
) -> FourierField:
    k = mode_numbers(n_modes)
    w = (1.0 + np.abs(k)).astype(np.float64) ** (-decay)
    c = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) * w
    if zero_mean:
        c[0] = 0.0
    return FourierField(c)


def _windowed(seq: TimeSequence, eta: Callable[[float], float], t_scale: float = 1.0
              ) -> TimeSequence:
    vals = np.array([eta(n * seq.tau / t_scale) for n in range(seq.n_steps)])
    return TimeSequence(vals[:, None] * seq.coeffs, seq.tau)


def _free_flow_sequence(f: FourierField, n_steps: int, tau: float) -> TimeSequence:
    k = mode_numbers(f.n_modes).astype(float)
    phases = np.exp(1j * tau * np.outer(np.arange(n_steps), k**3))
    return TimeSequence(phases * f.coeffs[None, :], tau)


def _bilinear_lhs(u: TimeSequence, v: TimeSequence, tau: float, cutoff: bool
                  ) -> TimeSequence:
    n = u.n_modes
    mask = cutoff_mask(n, tau) if cutoff else np.ones(n, dtype=bool)
    ik = 1j * mode_numbers(n).astype(np.complex128)
    out = np.zeros_like(u.coeffs)
    for m in range(u.n_steps):
        a = np.where(mask, u.coeffs[m], 0.0)
        b = np.where(mask, v.coeffs[m], 0.0)
        out[m] = ik * np.where(mask, dealiased_product(a, b), 0.0)
    return TimeSequence(out, tau)


def _estimate_ratio(
    estimate: str,
    rng: np.random.Generator,
    tau: float,
    n_steps: int,
    n_modes: int,
    s: float,
    eta: Callable[[float], float],
    decay: float,
    modulated: bool,
    cutoff: bool,
) -> float:
    tiny = 1e-300
    if estimate == "bourg1d":
        f = _random_field(rng, n_modes, decay, zero_mean=False)
        seq = _windowed(_free_flow_sequence(f, n_steps, tau), eta)
        lhs = xsb_norm(seq, s, 0.5)
        rhs = float(np.sqrt(np.sum(((1 + np.abs(f.modes)) ** s * np.abs(f.coeffs)) ** 2)))
        return lhs / max(rhs, tiny)
    if estimate == "bourg2d":
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, False, modulated)
        return xsb_norm(_windowed(u, eta), s, 0.5) / max(xsb_norm(u, s, 0.5), tiny)
    if estimate == "bourg3d":
        b, b_low, t_frac = 0.4, 0.1, 0.5
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, False, modulated)
        lhs = xsb_norm(_windowed(u, eta, t_scale=t_frac), s, b_low)
        t_big = n_steps * tau
        rhs = (t_frac * t_big) ** (b - b_low) * xsb_norm(u, s, b)
        return lhs / max(rhs, tiny)
    if estimate == "bourg4d":
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, False, modulated)
        lhs = xsb_norm(duhamel_sum(u, eta), s, 0.6)
        rhs = xsb_norm(u, s, -0.4)
        return lhs / max(rhs, tiny)
    if estimate == "sob_half":
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, True, modulated)
        kw = (1 + np.abs(mode_numbers(n_modes))).astype(float) ** s
        lhs = float(np.max(np.sqrt(np.sum((kw[None, :] * np.abs(u.coeffs)) ** 2, axis=1))))
        return lhs / max(xs_norm(u, s), tiny)
    if estimate == "duhamel_half":
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, True, modulated)
        lhs = xs_norm(duhamel_sum(u, eta), s)
        return lhs / max(ys_norm(u, s), tiny)
    if estimate == "bilinear":
        u = _random_sequence(rng, n_steps, n_modes, tau, decay, True, modulated)
        v = _random_sequence(rng, n_steps, n_modes, tau, decay, True, modulated)
        w = _bilinear_lhs(u, v, tau, cutoff)
        lhs = ys_norm(w, s)
        rhs = xsb_norm(u, s, 0.5) * xsb_norm(v, s, 1.0 / 3.0) + xsb_norm(
            v, s, 0.5
        ) * xsb_norm(u, s, 1.0 / 3.0)
        return lhs / max(rhs, tiny)
    raise ValueError(f"unknown estimate {estimate!r}")


def check_estimate(
    estimate: str,
    taus: Iterable[float],
    trials: int = 20,
    seed: int = 0,
    s: float = 0.0,
    n_modes: int = 64,
    t_total: float = 1.0,
    cutoff: bool = True,
) -> ConstantReport:
    """Empirical best constants of a discrete Bourgain estimate.

    For each tau the LHS/RHS ratio is maximised over ``trials`` random inputs
    (Gaussian coefficients with decay profiles <k>^0, <k>^-1, <k>^-2, half of
    the trials modulated by the free flow); the uniformity indicator is the
    max/min of the per-tau best constants.  These are ensemble estimates, not
    supremum claims.
    """
    if estimate not in ESTIMATE_IDS:
        raise ValueError(f"unknown estimate {estimate!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    eta = bump_window()
    rows = []
    for tau in taus:
        n_steps = max(int(round(t_total / tau)), 2)
        best = 0.0
        for trial in range(trials):
            rng = np.random.default_rng([seed, trial, int(round(1.0 / tau))])
            decay = _DECAY_PROFILES[trial % len(_DECAY_PROFILES)]
            modulated = (trial // len(_DECAY_PROFILES)) % 2 == 1
            ratio = _estimate_ratio(
                estimate, rng, tau, n_steps, n_modes, s, eta, decay, modulated, cutoff
            )
            best = max(best, ratio)
        rows.append({"tau": float(tau), "best_constant": best})
    consts = [r["best_constant"] for r in rows]
    uniformity = max(consts) / max(min(consts), 1e-300)
    return ConstantReport(estimate, tuple(rows), uniformity)
