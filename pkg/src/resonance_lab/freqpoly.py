"""Exact integer-coefficient polynomials in leaf frequencies k1..kn.

A tiny multivariate polynomial type sufficient for the resonance analysis:
monomials are stored as a dict mapping exponent tuples to int coefficients,
all arithmetic stays in exact Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = ["FrequencyPolynomial", "LinearForm"]


def _trim(monomials: dict[tuple[int, ...], int]) -> dict[tuple[int, ...], int]:
    return {e: c for e, c in monomials.items() if c != 0}


@dataclass(frozen=True)
class FrequencyPolynomial:
    """Integer polynomial over a fixed ordered tuple of variables."""

    variables: tuple[str, ...]
    monomials: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(
        cls, variables: Iterable[str], monomials: Mapping[tuple[int, ...], int]
    ) -> "FrequencyPolynomial":
        variables = tuple(variables)
        cleaned = _trim(dict(monomials))
        return cls(variables, tuple(sorted(cleaned.items())))

    @classmethod
    def zero(cls, variables: Iterable[str]) -> "FrequencyPolynomial":
        return cls.from_dict(variables, {})

    @classmethod
    def variable(cls, variables: Iterable[str], name: str) -> "FrequencyPolynomial":
        variables = tuple(variables)
        e = tuple(1 if v == name else 0 for v in variables)
        if sum(e) != 1:
            raise KeyError(f"unknown variable {name!r}")
        return cls.from_dict(variables, {e: 1})

    @classmethod
    def from_linear(
        cls, variables: Iterable[str], form: Mapping[str, int]
    ) -> "FrequencyPolynomial":
        variables = tuple(variables)
        mono: dict[tuple[int, ...], int] = {}
        for name, coef in form.items():
            e = tuple(1 if v == name else 0 for v in variables)
            mono[e] = mono.get(e, 0) + coef
        return cls.from_dict(variables, mono)

    def _as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.monomials)

    def _compatible(self, other: "FrequencyPolynomial") -> None:
        if self.variables != other.variables:
            raise ValueError("polynomials over different variable tuples")

    def __add__(self, other: "FrequencyPolynomial") -> "FrequencyPolynomial":
        self._compatible(other)
        out = self._as_dict()
        for e, c in other.monomials:
            out[e] = out.get(e, 0) + c
        return FrequencyPolynomial.from_dict(self.variables, out)

    def __sub__(self, other: "FrequencyPolynomial") -> "FrequencyPolynomial":
        return self + (-1) * other

    def __rmul__(self, scalar: int) -> "FrequencyPolynomial":
        return FrequencyPolynomial.from_dict(
            self.variables, {e: scalar * c for e, c in self.monomials}
        )

    def __mul__(self, other: "FrequencyPolynomial") -> "FrequencyPolynomial":
        self._compatible(other)
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.monomials:
            for e2, c2 in other.monomials:
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return FrequencyPolynomial.from_dict(self.variables, out)

    def power(self, n: int) -> "FrequencyPolynomial":
        out = FrequencyPolynomial.from_dict(self.variables, {(0,) * len(self.variables): 1})
        for _ in range(n):
            out = out * self
        return out

    def evaluate(self, values: Mapping[str, int]) -> int:
        total = 0
        vals = [values[v] for v in self.variables]
        for e, c in self.monomials:
            term = c
            for base, exp in zip(vals, e):
                term *= base**exp
            total += term
        return total

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.monomials), default=0)

    def degree_in(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e, _ in self.monomials), default=0)

    def max_variable_degree(self) -> int:
        return max((max(e) for e, _ in self.monomials), default=0)

    def single_variable_part(self) -> "FrequencyPolynomial":
        """Monomials depending on exactly one variable (the exactly integrable part)."""
        keep = {e: c for e, c in self.monomials if sum(1 for x in e if x > 0) == 1}
        return FrequencyPolynomial.from_dict(self.variables, keep)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for e, c in self.monomials:
            factors = []
            for name, exp in zip(self.variables, e):
                if exp == 1:
                    factors.append(name)
                elif exp > 1:
                    factors.append(f"{name}^{exp}")
            body = "*".join(factors)
            if not body:
                parts.append(f"{c:+d}")
            elif c == 1:
                parts.append(f"+{body}")
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c:+d}*{body}")
        joined = " ".join(parts)
        return joined[1:] if joined.startswith("+") else joined


class LinearForm(dict):
    """Integer linear combination of frequency symbols, e.g. {k1: 1, k2: 1}."""

    def __init__(self, data: Mapping[str, int] | None = None):
        super().__init__({k: v for k, v in (data or {}).items() if v != 0})

    def plus(self, other: "LinearForm", sign: int = 1) -> "LinearForm":
        out = dict(self)
        for name, coef in other.items():
            out[name] = out.get(name, 0) + sign * coef
        return LinearForm(out)

    def negate(self) -> "LinearForm":
        return LinearForm({k: -v for k, v in self.items()})

    def evaluate(self, values: Mapping[str, int]) -> int:
        return sum(c * values[name] for name, c in self.items())

    def key(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted(self.items()))

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for name, coef in sorted(self.items()):
            if coef == 1:
                parts.append(f"+{name}")
            elif coef == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{coef:+d}*{name}")
        joined = "".join(parts)
        return joined[1:] if joined.startswith("+") else joined
