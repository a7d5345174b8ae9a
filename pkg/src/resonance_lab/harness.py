"""Experiment orchestration: reference solutions, convergence-order fits,
order-reduction comparisons, evolution dumps, and machine-readable reports.

The reference integrator is a classical RK4 in the interaction picture (the
stiff linear flow factored out exactly) on the truncated spectral system,
optionally for the frequency-filtered equation.  Global errors are measured
at t_end in the configured Sobolev norm and orders are least-squares slopes
of log(error) against log(tau).
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__ as _VERSION
from .errors import DegenerateFit, NonFiniteValue
from .kdv import KDV_SCHEME_KINDS, KdvScheme
from .nls import NLS_SCHEME_KINDS, NlsScheme
from .spectral import (
    FourierField,
    cutoff_mask,
    dealiased_product,
    dealiased_triple_product,
    ensure_finite,
    field_to_json_obj,
    mode_numbers,
    rough_data,
    sobolev_norm,
)

__all__ = [
    "ExperimentConfig",
    "ConvergenceReport",
    "SMOOTH_PROFILES",
    "initial_field",
    "make_scheme",
    "reference_solution",
    "run_convergence",
    "run_order_reduction",
    "evolve",
    "fit_order",
    "report_to_csv",
]


@dataclass(frozen=True)
class ExperimentConfig:
    model: str  # "kdv" | "nls"
    scheme: str
    n_modes: int
    data: dict  # {"smooth": name} | {"rough": {"sigma": s, "seed": n}}
    t_end: float
    taus: tuple[float, ...]
    norm: dict  # {"space": "L2"} | {"space": "Hs", "s": value}
    filter: bool = False
    reference: dict | None = None

    def __post_init__(self):
        if self.model not in ("kdv", "nls"):
            raise ValueError(f"unknown model {self.model!r}")
        kinds = KDV_SCHEME_KINDS if self.model == "kdv" else NLS_SCHEME_KINDS
        if self.scheme not in kinds:
            raise ValueError(f"scheme {self.scheme!r} not valid for model {self.model}")
        taus = tuple(float(t) for t in self.taus)
        if len(taus) < 2 or any(a <= b for a, b in zip(taus, taus[1:])):
            raise ValueError("taus must be strictly decreasing with >= 2 entries")
        object.__setattr__(self, "taus", taus)
        ref = {"kind": "RK4Fourier", "substep_factor": 100}
        ref.update(self.reference or {})
        if ref["kind"] != "RK4Fourier":
            raise ValueError(f"unknown reference kind {ref['kind']!r}")
        object.__setattr__(self, "reference", ref)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ExperimentConfig":
        return cls(
            model=obj["model"],
            scheme=obj["scheme"],
            n_modes=int(obj["n_modes"]),
            data=dict(obj["data"]),
            t_end=float(obj["t_end"]),
            taus=tuple(obj["taus"]),
            norm=dict(obj["norm"]),
            filter=bool(obj.get("filter", False)),
            reference=dict(obj["reference"]) if "reference" in obj else None,
        )

    def to_json_obj(self) -> dict:
        return {
            "model": self.model,
            "scheme": self.scheme,
            "n_modes": self.n_modes,
            "data": self.data,
            "t_end": self.t_end,
            "taus": list(self.taus),
            "norm": self.norm,
            "filter": self.filter,
            "reference": self.reference,
        }

    def actual_taus(self) -> list[tuple[float, int]]:
        """tau rounded so that t_end/tau is an integer step count."""
        out = []
        for tau in self.taus:
            steps = max(int(math.ceil(self.t_end / tau - 1e-12)), 1)
            out.append((self.t_end / steps, steps))
        return out


def _norm_s(norm: dict) -> float:
    if norm["space"] == "L2":
        return 0.0
    if norm["space"] == "Hs":
        return float(norm["s"])
    raise ValueError(f"unknown norm space {norm['space']!r}")


def _smooth_kdv_cos(n: int) -> FourierField:
    return FourierField.from_modes(n, {1: 0.5, -1: 0.5}, real_valued=True)


def _smooth_kdv_two_mode(n: int) -> FourierField:
    return FourierField.from_modes(
        n, {1: 0.5, -1: 0.5, 2: -0.25j, -2: 0.25j}, real_valued=True
    )


def _smooth_kdv_bump(n: int) -> FourierField:
    entries: dict[int, complex] = {}
    for k in range(1, min(13, n // 2)):
        entries[k] = math.exp(-(k**2) / 8.0)
        entries[-k] = math.exp(-(k**2) / 8.0)
    return FourierField.from_modes(n, entries, real_valued=True)


def _smooth_nls_plane(n: int) -> FourierField:
    return FourierField.from_modes(n, {0: 1.0})


def _smooth_nls_cosmix(n: int) -> FourierField:
    # cos(x) + 0.5 i sin(2x): genuinely complex, smooth, O(1)
    return FourierField.from_modes(n, {1: 0.5, -1: 0.5, 2: 0.25, -2: -0.25})


SMOOTH_PROFILES: dict[str, dict[str, Callable[[int], FourierField]]] = {
    "kdv": {
        "cos": _smooth_kdv_cos,
        "two_mode": _smooth_kdv_two_mode,
        "bump": _smooth_kdv_bump,
    },
    "nls": {
        "plane": _smooth_nls_plane,
        "cosmix": _smooth_nls_cosmix,
    },
}


def initial_field(config: ExperimentConfig, seed: int | None = None) -> FourierField:
    if "smooth" in config.data:
        name = config.data["smooth"]
        try:
            return SMOOTH_PROFILES[config.model][name](config.n_modes)
        except KeyError:
            raise ValueError(f"unknown smooth profile {name!r} for {config.model}")
    spec = config.data["rough"]
    use_seed = int(spec["seed"] if seed is None else seed)
    return rough_data(
        float(spec["sigma"]), use_seed, config.n_modes,
        real_valued=(config.model == "kdv"),
    )


def make_scheme(config: ExperimentConfig, tau: float):
    if config.model == "kdv":
        return KdvScheme(config.scheme, tau, filter=config.filter)
    return NlsScheme(config.scheme, tau, filter=config.filter)


# ---------------------------------------------------------------------------
# reference integrator


def _nonlinear_rhs(model: str, mask: np.ndarray | None):
    def kdv_rhs(c: np.ndarray, ik: np.ndarray) -> np.ndarray:
        w = c if mask is None else np.where(mask, c, 0.0)
        out = 0.5 * ik * dealiased_product(w, w, zero_nyquist=True)
        return out if mask is None else np.where(mask, out, 0.0)

    def nls_rhs(c: np.ndarray, ik: np.ndarray) -> np.ndarray:
        w = c if mask is None else np.where(mask, c, 0.0)
        n = w.shape[0]
        conj_w = np.conj(w[(-np.arange(n)) % n])
        out = -1j * dealiased_triple_product(w, w, conj_w)
        return out if mask is None else np.where(mask, out, 0.0)

    return kdv_rhs if model == "kdv" else nls_rhs


def reference_solution(
    model: str,
    v: FourierField,
    t_end: float,
    tau_ref: float,
    filtered: bool = False,
    tau: float | None = None,
) -> FourierField:
    """Interaction-picture RK4 oracle for the (optionally filtered) flow."""
    if t_end == 0.0:
        return v
    n = v.n_modes
    k = mode_numbers(n).astype(float)
    disp = k**3 if model == "kdv" else -(k**2)  # u_k(t) = e^{i t disp} w_k(t)
    ik = 1j * mode_numbers(n).astype(np.complex128)
    ik[n // 2] = 0.0
    if filtered:
        if tau is None:
            raise ValueError("filtered reference requires the scheme step tau")
        mask = cutoff_mask(n, tau)
    else:
        mask = None
    rhs = _nonlinear_rhs(model, mask)

    def f(t: float, w: np.ndarray) -> np.ndarray:
        u = np.exp(1j * t * disp) * w
        return np.exp(-1j * t * disp) * rhs(u, ik)

    steps = max(int(math.ceil(t_end / tau_ref - 1e-12)), 1)
    h = t_end / steps
    w = v.coeffs.copy()
    t = 0.0
    for sidx in range(steps):
        k1 = f(t, w)
        k2 = f(t + 0.5 * h, w + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, w + 0.5 * h * k2)
        k4 = f(t + h, w + h * k3)
        w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = (sidx + 1) * h
        if sidx % 64 == 0:
            ensure_finite(w)
    ensure_finite(w)
    return FourierField(np.exp(1j * t_end * disp) * w, v.real_valued)


def _evolve_field(scheme, u: FourierField, steps: int) -> FourierField:
    for _ in range(steps):
        u = scheme.step(u)
    return u


# ---------------------------------------------------------------------------
# order fitting and convergence runs


def fit_order(pairs: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(tau)."""
    if len(pairs) < 2:
        raise DegenerateFit("need at least two (tau, error) pairs")
    taus = np.array([p[0] for p in pairs], dtype=float)
    errs = np.array([p[1] for p in pairs], dtype=float)
    if not (np.all(np.isfinite(errs)) and np.all(errs > 0) and np.all(taus > 0)):
        raise DegenerateFit("errors must be finite and positive")
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    return float(slope)


@dataclass
class ConvergenceReport:
    config: ExperimentConfig
    rows: list[dict]  # {"tau", "error", "steps"}
    fitted_order: float | None
    seeds: list[int] | None
    per_seed_orders: list[float] | None
    wall_time_s: float

    def to_json_obj(self) -> dict:
        obj = {
            "config": self.config.to_json_obj(),
            "rows": self.rows,
            "fitted_order": self.fitted_order,
            "wall_time_s": self.wall_time_s,
            "artifact_version": _VERSION,
        }
        if self.seeds is not None:
            obj["seeds"] = self.seeds
            obj["per_seed_orders"] = self.per_seed_orders
        return obj


def report_to_csv(report: ConvergenceReport) -> str:
    lines = ["tau,error,steps"]
    for row in report.rows:
        lines.append(f"{row['tau']:.17g},{row['error']:.17g},{row['steps']}")
    return "\n".join(lines) + "\n"


def _single_run_errors(
    config: ExperimentConfig,
    u0: FourierField,
    reference_cache: dict | None = None,
    cache_tag: object = None,
) -> list[dict]:
    s_norm = _norm_s(config.norm)
    substep = int(config.reference["substep_factor"])
    pairs = config.actual_taus()
    tau_ref = min(t for t, _ in pairs) / substep
    rows = []
    shared_ref: FourierField | None = None
    for tau, steps in pairs:
        key = (cache_tag, tau if config.filter else None)
        if reference_cache is not None and key in reference_cache:
            ref = reference_cache[key]
        elif config.filter:
            ref = reference_solution(
                config.model, u0, config.t_end, tau_ref, filtered=True, tau=tau
            )
        else:
            if shared_ref is None:
                shared_ref = reference_solution(
                    config.model, u0, config.t_end, tau_ref
                )
            ref = shared_ref
        if reference_cache is not None:
            reference_cache[key] = ref
        scheme = make_scheme(config, tau)
        try:
            u = _evolve_field(scheme, u0, steps)
            err = sobolev_norm(u - ref, s_norm)
        except NonFiniteValue:
            err = float("nan")
        rows.append({"tau": tau, "error": err, "steps": steps})
    return rows


def run_convergence(
    config: ExperimentConfig,
    seeds: Sequence[int] | None = None,
    reference_cache: dict | None = None,
) -> ConvergenceReport:
    """Evolve the configured scheme across the tau ladder and fit the order.

    With ``seeds`` (rough data), each seed is run independently and the
    reported order is the median of the per-seed fits; rows carry per-tau
    median errors.
    """
    t0 = time.perf_counter()
    if seeds is None:
        u0 = initial_field(config)
        rows = _single_run_errors(config, u0, reference_cache, cache_tag=None)
        fitted: float | None
        try:
            fitted = fit_order([(r["tau"], r["error"]) for r in rows])
        except DegenerateFit:
            fitted = None
        return ConvergenceReport(
            config, rows, fitted, None, None, time.perf_counter() - t0
        )
    per_seed_rows = []
    per_seed_orders = []
    for seed in seeds:
        u0 = initial_field(config, seed=seed)
        rows = _single_run_errors(config, u0, reference_cache, cache_tag=seed)
        per_seed_rows.append(rows)
        try:
            per_seed_orders.append(fit_order([(r["tau"], r["error"]) for r in rows]))
        except DegenerateFit:
            per_seed_orders.append(float("nan"))
    rows = []
    for i in range(len(per_seed_rows[0])):
        errs = [sr[i]["error"] for sr in per_seed_rows]
        rows.append(
            {
                "tau": per_seed_rows[0][i]["tau"],
                "error": float(statistics.median(errs)),
                "steps": per_seed_rows[0][i]["steps"],
            }
        )
    finite = [o for o in per_seed_orders if np.isfinite(o)]
    fitted = float(statistics.median(finite)) if finite else None
    return ConvergenceReport(
        config, rows, fitted, list(seeds), per_seed_orders,
        time.perf_counter() - t0,
    )


def run_order_reduction(
    config_a: ExperimentConfig,
    config_b: ExperimentConfig,
    seeds: Sequence[int] = (1, 2, 3),
) -> dict:
    """Run two configs differing only in the scheme on identical data and
    report the difference of (median) fitted orders."""
    if replace(config_a, scheme=config_b.scheme) != config_b:
        raise ValueError("configs must differ only in the scheme")
    use_seeds: Sequence[int] | None = seeds if "rough" in config_a.data else None
    cache: dict = {}
    rep_a = run_convergence(config_a, seeds=use_seeds, reference_cache=cache)
    rep_b = run_convergence(config_b, seeds=use_seeds, reference_cache=cache)
    diff = None
    if rep_a.fitted_order is not None and rep_b.fitted_order is not None:
        diff = rep_a.fitted_order - rep_b.fitted_order
    return {
        "config_a": config_a.to_json_obj(),
        "config_b": config_b.to_json_obj(),
        "seeds": list(seeds) if use_seeds else None,
        "fitted_order_a": rep_a.fitted_order,
        "fitted_order_b": rep_b.fitted_order,
        "per_seed_orders_a": rep_a.per_seed_orders,
        "per_seed_orders_b": rep_b.per_seed_orders,
        "order_difference": diff,
        "rows_a": rep_a.rows,
        "rows_b": rep_b.rows,
    }


def evolve(
    config: ExperimentConfig, dump_every: int, out_dir: str | Path
) -> dict:
    """Step the single-tau config to t_end, dumping spectral JSON snapshots
    every ``dump_every`` steps and per-step (mass, L^2) diagnostics."""
    if len(config.taus) != 1:
        raise ValueError("evolve requires a single tau in the config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tau, steps = config.actual_taus()[0]
    scheme = make_scheme(config, tau)
    u = initial_field(config)
    snapshots = []
    diagnostics = []

    def dump(step: int, fld: FourierField):
        path = out / f"snapshot_{step:08d}.json"
        path.write_text(json.dumps(field_to_json_obj(fld)))
        snapshots.append(str(path))

    def record(step: int, fld: FourierField):
        mass = fld.coeff(0)
        diagnostics.append(
            {
                "step": step,
                "time": step * tau,
                "mass_re": mass.real,
                "mass_im": mass.imag,
                "l2": sobolev_norm(fld, 0.0),
            }
        )

    dump(0, u)
    record(0, u)
    last_good = 0
    for step in range(1, steps + 1):
        try:
            u = scheme.step(u)
        except NonFiniteValue as exc:
            raise NonFiniteValue(
                f"blow-up at step {step}; last good snapshot index {last_good}"
            ) from exc
        record(step, u)
        if step % dump_every == 0 or step == steps:
            dump(step, u)
            last_good = step
    csv_lines = ["step,time,mass_re,mass_im,l2"]
    for d in diagnostics:
        csv_lines.append(
            f"{d['step']},{d['time']:.17g},{d['mass_re']:.17g},"
            f"{d['mass_im']:.17g},{d['l2']:.17g}"
        )
    (out / "diagnostics.csv").write_text("\n".join(csv_lines) + "\n")
    return {"snapshots": snapshots, "diagnostics": diagnostics}
