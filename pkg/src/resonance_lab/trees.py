"""Decorated-tree engine for iterated Duhamel integrals.

Trees encode iterated oscillatory integrals: a propagator edge carries a free
flow factor, an integral edge carries one time integration against the model
dispersion, conjugate (dotted) edges flip the sign of the phase and conjugate
the attached data.  Leaves carry symbolic frequencies; evaluation substitutes
integer tuples and computes the nested integrals in closed form as
exponential polynomials with exact integer phases.

Structure of a tree (mirroring the drawings): a root edge from below, then an
alternation of integral vertices and propagator-attached children.  A branch
whose ``propagator`` flag is off starts directly at an integral edge; such
pieces arise as cut branches of the admissible-cut coproduct.

Conventions:

* KdV: propagator edge at frequency f and time t -> e^{i t f^3}; integral
  vertex at frequency f -> (i f) \int_0^t e^{-i s f^3} (...) ds.
* NLS: plain propagator -> e^{-i t f^2}, dotted -> e^{+i t f^2}; plain
  integral -> (-i) \int_0^t e^{+i s f^2} (...) ds, dotted -> (+i) \int_0^t
  e^{-i s f^2} (...) ds.
* A leaf contributes its frequency to the root with a minus sign when its own
  edge is dotted; an inner node's frequency picks up a global sign through a
  dotted incoming edge so that frequency is conserved across every vertex.
* The series prefactor: ``tree_series`` represents the actual equations
  (KdV nonlinearity (1/2)(u^2)_x), which for KdV amounts to an extra factor
  1/2 per integral vertex relative to the bare integral map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import UnsupportedOrder
from .freqpoly import FrequencyPolynomial, LinearForm
from .spectral import FourierField

__all__ = [
    "Leaf",
    "IntegralVertex",
    "Branch",
    "DecoratedTree",
    "CutTerm",
    "enumerate_trees",
    "paper_coproduct_example",
    "strip_root_propagator",
    "render_tree",
    "leaf_symbols",
    "leaf_signs",
    "leaf_conjugations",
    "integral_vertex_paths",
    "root_frequency_form",
    "symmetry_factor",
    "elementary_differential",
    "phase_polynomial",
    "resonance_split",
    "evaluate_pi",
    "evaluate_pi_discretized",
    "pi_exponential_polynomial",
    "pi_discretized_exponential_polynomial",
    "local_error_degree",
    "classical_threshold",
    "tree_series",
    "bck_coproduct",
    "duhamel_weight",
]

MODELS = ("kdv", "nls")


# ---------------------------------------------------------------------------
# structure


@dataclass(frozen=True)
class Leaf:
    """Leaf with an integer linear combination of frequency symbols."""

    decoration: tuple[tuple[str, int], ...]

    @classmethod
    def symbol(cls, name: str) -> "Leaf":
        return cls(((name, 1),))

    def form(self) -> LinearForm:
        return LinearForm(dict(self.decoration))


@dataclass(frozen=True)
class IntegralVertex:
    children: tuple["Branch", ...]


@dataclass(frozen=True)
class Branch:
    """An edge (propagator and/or integral) together with what hangs above it."""

    target: Union[Leaf, IntegralVertex]
    conjugate: bool = False
    propagator: bool = True


@dataclass(frozen=True)
class DecoratedTree:
    model: str
    root: Branch

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")


@dataclass(frozen=True)
class CutTerm:
    """One admissible-cut term: detached branches (forest) and the trunk.

    ``trunk is None`` encodes the unit (empty tree), i.e. the full cut.
    """

    forest: tuple[DecoratedTree, ...]
    trunk: DecoratedTree | None


def _leaf_branch(name: str, conjugate: bool = False) -> Branch:
    return Branch(Leaf.symbol(name), conjugate=conjugate)


def enumerate_trees(model: str, r: int) -> list[DecoratedTree]:
    """Tree shapes of the Duhamel expansion with at most r time integrations."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if r not in (0, 1, 2):
        raise UnsupportedOrder(f"tree catalogue implemented for r <= 2, got r={r}")
    t0 = DecoratedTree(model, _leaf_branch("k"))
    if model == "kdv":
        t1 = DecoratedTree(
            model, Branch(IntegralVertex((_leaf_branch("k1"), _leaf_branch("k2"))))
        )
        inner = Branch(IntegralVertex((_leaf_branch("k1"), _leaf_branch("k2"))))
        t2 = DecoratedTree(model, Branch(IntegralVertex((inner, _leaf_branch("k3")))))
        return [t0, t1, t2][: r + 1]
    t1 = DecoratedTree(
        model,
        Branch(
            IntegralVertex(
                (_leaf_branch("k1", True), _leaf_branch("k2"), _leaf_branch("k3"))
            )
        ),
    )
    inner_plain = Branch(
        IntegralVertex(
            (_leaf_branch("k1", True), _leaf_branch("k2"), _leaf_branch("k3"))
        )
    )
    t2 = DecoratedTree(
        model,
        Branch(
            IntegralVertex(
                (inner_plain, _leaf_branch("k4", True), _leaf_branch("k5"))
            )
        ),
    )
    inner_conj = Branch(
        IntegralVertex(
            (_leaf_branch("k1"), _leaf_branch("k2", True), _leaf_branch("k3", True))
        ),
        conjugate=True,
    )
    t3 = DecoratedTree(
        model,
        Branch(IntegralVertex((inner_conj, _leaf_branch("k4"), _leaf_branch("k5")))),
    )
    if r == 0:
        return [t0]
    if r == 1:
        return [t0, t1]
    return [t0, t1, t2, t3]


def paper_coproduct_example() -> DecoratedTree:
    """The worked KdV coproduct tree: an integral-rooted second-order shape
    with inner leaves k1, k2 and outer leaf k3."""
    inner = Branch(IntegralVertex((_leaf_branch("k1"), _leaf_branch("k2"))))
    root = Branch(
        IntegralVertex((inner, _leaf_branch("k3"))), propagator=False
    )
    return DecoratedTree("kdv", root)


def strip_root_propagator(tree: DecoratedTree) -> DecoratedTree:
    root = Branch(tree.root.target, tree.root.conjugate, propagator=False)
    return DecoratedTree(tree.model, root)


def render_branch(branch: Branch) -> str:
    s = "-" if branch.propagator else ""
    if branch.conjugate:
        s += "~"
    if isinstance(branch.target, Leaf):
        return s + str(branch.target.form())
    inner = ",".join(render_branch(c) for c in branch.target.children)
    return s + "*(" + inner + ")"


def render_tree(tree: DecoratedTree) -> str:
    return render_branch(tree.root)


# ---------------------------------------------------------------------------
# traversal helpers


def _leaf_branches(branch: Branch) -> list[Branch]:
    if isinstance(branch.target, Leaf):
        return [branch]
    out: list[Branch] = []
    for c in branch.target.children:
        out.extend(_leaf_branches(c))
    return out


def leaf_symbols(tree: DecoratedTree) -> tuple[str, ...]:
    """Leaf symbol names in depth-first order (paper labelling)."""
    names: list[str] = []
    for b in _leaf_branches(tree.root):
        for name, _ in b.target.decoration:
            if name not in names:
                names.append(name)
    return tuple(names)


def leaf_signs(tree: DecoratedTree) -> tuple[int, ...]:
    """Sign of each leaf's contribution to the root frequency (own edge only)."""
    return tuple(-1 if b.conjugate else 1 for b in _leaf_branches(tree.root))


def leaf_conjugations(tree: DecoratedTree) -> tuple[bool, ...]:
    return tuple(b.conjugate for b in _leaf_branches(tree.root))


def _branch_contribution(branch: Branch) -> LinearForm:
    """Frequency flowing through the branch's edge towards the root."""
    if isinstance(branch.target, Leaf):
        base = branch.target.form()
        return base.negate() if branch.conjugate else base
    total = LinearForm()
    for c in branch.target.children:
        total = total.plus(_branch_contribution(c))
    return total


def _vertex_frequency(branch: Branch) -> LinearForm:
    """Decoration of the branch's upper vertex (inner node or leaf)."""
    if isinstance(branch.target, Leaf):
        return branch.target.form()
    contrib = _branch_contribution(branch)
    return contrib.negate() if branch.conjugate else contrib


def root_frequency_form(tree: DecoratedTree) -> LinearForm:
    return _branch_contribution(tree.root)


def _branch_at(tree: DecoratedTree, path: tuple[int, ...]) -> Branch:
    b = tree.root
    for i in path:
        if isinstance(b.target, Leaf):
            raise KeyError(f"path {path} walks through a leaf")
        b = b.target.children[i]
    return b


def integral_vertex_paths(tree: DecoratedTree) -> list[tuple[int, ...]]:
    """Paths (child index sequences) of branches whose target is an integral
    vertex, depth-first."""
    out: list[tuple[int, ...]] = []

    def walk(branch: Branch, path: tuple[int, ...]):
        if isinstance(branch.target, IntegralVertex):
            out.append(path)
            for i, c in enumerate(branch.target.children):
                walk(c, path + (i,))

    walk(tree.root, ())
    return out


def _n_integrals(tree: DecoratedTree) -> int:
    return len(integral_vertex_paths(tree))


# ---------------------------------------------------------------------------
# symmetry factor and elementary differential


def _shape_key(branch: Branch):
    if isinstance(branch.target, Leaf):
        return (branch.propagator, branch.conjugate, "leaf")
    return (
        branch.propagator,
        branch.conjugate,
        tuple(sorted(_shape_key(c) for c in branch.target.children)),
    )


def _automorphisms(branch: Branch) -> int:
    if isinstance(branch.target, Leaf):
        return 1
    count = 1
    groups: dict[object, int] = {}
    for c in branch.target.children:
        count *= _automorphisms(c)
        key = _shape_key(c)
        groups[key] = groups.get(key, 0) + 1
    for mult in groups.values():
        count *= math.factorial(mult)
    return count


def symmetry_factor(tree: DecoratedTree) -> int:
    """Order of the automorphism group respecting edge kinds and conjugate
    flags but ignoring the leaf frequency labels."""
    return _automorphisms(tree.root)


def elementary_differential(
    tree: DecoratedTree, v: FourierField, freqs: Sequence[int]
) -> complex:
    """Product of initial-data coefficients over the leaves (conjugated along
    dotted edges) times the combinatorial factor 2^m, m = #integral vertices."""
    syms = leaf_symbols(tree)
    if len(freqs) != len(syms):
        raise ValueError(f"expected {len(syms)} frequencies, got {len(freqs)}")
    assign = dict(zip(syms, freqs))
    out: complex = 2.0 ** _n_integrals(tree)
    for b in _leaf_branches(tree.root):
        val = v.coeff(b.target.form().evaluate(assign))
        out *= np.conj(val) if b.conjugate else val
    return complex(out)


# ---------------------------------------------------------------------------
# phase polynomials and the dominant/low splitting


def _dispersion_power(model: str) -> int:
    return 3 if model == "kdv" else 2


def _poly_of_form(form: LinearForm, variables: tuple[str, ...]) -> FrequencyPolynomial:
    return FrequencyPolynomial.from_linear(variables, form)


def _theta_poly(tree: DecoratedTree, path: tuple[int, ...]) -> FrequencyPolynomial:
    """Coefficient polynomial of (i s) in the integrand at the given vertex."""
    branch = _branch_at(tree, path)
    if not isinstance(branch.target, IntegralVertex):
        raise KeyError(f"path {path} does not point at an integral vertex")
    variables = leaf_symbols(tree)
    p = _dispersion_power(tree.model)
    f = _poly_of_form(_vertex_frequency(branch), variables).power(p)
    if tree.model == "kdv":
        theta = (-1) * f
        for c in branch.target.children:
            theta = theta + _poly_of_form(_vertex_frequency(c), variables).power(p)
    else:
        theta = (-1) * f if branch.conjugate else f
        for c in branch.target.children:
            cf = _poly_of_form(_vertex_frequency(c), variables).power(p)
            theta = theta + (cf if c.conjugate else (-1) * cf)
    return theta


def phase_polynomial(tree: DecoratedTree, path: tuple[int, ...]) -> FrequencyPolynomial:
    """Oscillation polynomial L at an integral vertex, written the way the
    model displays it: the integrand oscillates as e^{-i s L} for KdV and
    e^{+i s L} for NLS."""
    theta = _theta_poly(tree, path)
    return (-1) * theta if tree.model == "kdv" else theta


def resonance_split(
    L: FrequencyPolynomial, model: str
) -> tuple[FrequencyPolynomial, FrequencyPolynomial]:
    """Split L = L_dom + L_low: L_dom collects the single-frequency monomials
    (exactly integrable back in physical space), L_low the cross terms."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if L.max_variable_degree() > 3:
        raise UnsupportedOrder("polynomial outside the r <= 2 catalogue")
    dom = L.single_variable_part()
    low = L - dom
    return dom, low


# ---------------------------------------------------------------------------
# exponential polynomials: exact nested oscillatory integration


ExpPoly = dict  # {(power j, integer phase w): complex coefficient}


def _ep_scale(p: ExpPoly, c: complex) -> ExpPoly:
    return {key: val * c for key, val in p.items()}


def _ep_add(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    out = dict(a)
    for key, val in b.items():
        out[key] = out.get(key, 0.0) + val
    return out


def _ep_mul(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    out: ExpPoly = {}
    for (j1, w1), c1 in a.items():
        for (j2, w2), c2 in b.items():
            key = (j1 + j2, w1 + w2)
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def _ep_integrate_term(j: int, w: int, coef: complex) -> ExpPoly:
    """Closed form of coef * int_0^t s^j e^{i w s} ds as an ExpPoly in t."""
    if w == 0:
        return {(j + 1, 0): coef / (j + 1)}
    iw = 1j * w
    exp_coeffs = {0: 1.0 / iw}
    const = -1.0 / iw
    for jj in range(1, j + 1):
        new: dict[int, complex] = {jj: 1.0 / iw}
        for m, v in exp_coeffs.items():
            new[m] = new.get(m, 0.0) - (jj / iw) * v
        const = -(jj / iw) * const
        exp_coeffs = new
    out: ExpPoly = {(0, 0): coef * const}
    for m, v in exp_coeffs.items():
        key = (m, w)
        out[key] = out.get(key, 0.0) + coef * v
    return out


def _ep_integrate(p: ExpPoly) -> ExpPoly:
    out: ExpPoly = {}
    for (j, w), c in p.items():
        out = _ep_add(out, _ep_integrate_term(j, w, c))
    return out


def _ep_eval(p: ExpPoly, t: float) -> complex:
    return complex(sum(c * t**j * np.exp(1j * w * t) for (j, w), c in p.items()))


def _prop_phase_sign(model: str, conjugate: bool) -> int:
    if model == "kdv":
        return 1
    return 1 if conjugate else -1


def _integral_factors(model: str, conjugate: bool, f: int) -> tuple[complex, int]:
    """(prefactor, integrand phase coefficient) of an integral vertex."""
    if model == "kdv":
        return 1j * f, -(f**3)
    if conjugate:
        return 1j, -(f**2)
    return -1j, f**2


def _branch_exppoly(model: str, branch: Branch, assign: Mapping[str, int]) -> ExpPoly:
    f = _vertex_frequency(branch).evaluate(assign)
    poly: ExpPoly = {(0, 0): 1.0}
    if branch.propagator:
        p = _dispersion_power(model)
        w = _prop_phase_sign(model, branch.conjugate) * f**p
        poly = {(0, w): 1.0}
    if isinstance(branch.target, Leaf):
        return poly
    pref, w_int = _integral_factors(model, branch.conjugate, f)
    integrand: ExpPoly = {(0, w_int): 1.0}
    for c in branch.target.children:
        integrand = _ep_mul(integrand, _branch_exppoly(model, c, assign))
    return _ep_mul(poly, _ep_scale(_ep_integrate(integrand), pref))


def _assignment(tree: DecoratedTree, freqs: Sequence[int]) -> dict[str, int]:
    syms = leaf_symbols(tree)
    if len(freqs) != len(syms):
        raise ValueError(f"expected {len(syms)} frequencies, got {len(freqs)}")
    return dict(zip(syms, (int(f) for f in freqs)))


def pi_exponential_polynomial(tree: DecoratedTree, freqs: Sequence[int]) -> ExpPoly:
    """Exact oscillatory integral of the tree as an exponential polynomial."""
    return _branch_exppoly(tree.model, tree.root, _assignment(tree, freqs))


def evaluate_pi(tree: DecoratedTree, freqs: Sequence[int], t: float) -> complex:
    """Exact nested oscillatory integral (Pi T)(t) at an integer frequency tuple."""
    return _ep_eval(pi_exponential_polynomial(tree, freqs), t)


# ---------------------------------------------------------------------------
# discretised integrals (resonance / classical branches)


def _chain(tree: DecoratedTree) -> list[tuple[tuple[int, ...], Branch]]:
    """The nested integral chain of a catalogue tree (depth <= 2)."""
    paths = integral_vertex_paths(tree)
    for p1 in paths:
        for p2 in paths:
            if p1 != p2 and p1 != p2[: len(p1)] and p2 != p1[: len(p2)]:
                raise UnsupportedOrder("non-chain trees are outside the catalogue")
    return [(p, _branch_at(tree, p)) for p in sorted(paths, key=len)]


def _prefactor_degree(model: str) -> int:
    return 1 if model == "kdv" else 0


def classical_threshold(tree: DecoratedTree) -> int:
    """Regularity index above which the classical (full Taylor) branch is
    taken: the total degree of the phase discarded by full Taylor expansion,
    frequency prefactors included."""
    chain = _chain(tree)
    if not chain:
        return 0
    pref = len(chain) * _prefactor_degree(tree.model)
    return max(
        pref + _theta_poly(tree, path).total_degree() for path, _ in chain
    )


def local_error_degree(tree: DecoratedTree, nreg: int = 0, r: int | None = None) -> int:
    """Total polynomial degree of the discarded oscillation terms, i.e. the
    derivative count in the O(t^{r+1} L_low^r) local error bound."""
    chain = _chain(tree)
    r = len(chain) if r is None else r
    if r > 2:
        raise UnsupportedOrder(f"r <= 2 supported, got r={r}")
    if not chain:
        return 0
    if nreg >= classical_threshold(tree) or len(chain) == 2:
        return classical_threshold(tree)
    # resonance branch, single integral
    path, _ = chain[0]
    if tree.model == "kdv":
        return 0  # exact integration, nothing discarded
    L = phase_polynomial(tree, path)
    _, low = resonance_split(L, tree.model)
    return low.total_degree()


def pi_discretized_exponential_polynomial(
    tree: DecoratedTree, freqs: Sequence[int], nreg: int = 0, r: int = 2
) -> ExpPoly:
    """Discretised oscillatory integral (Pi^{n,r} T) as an exponential
    polynomial: exact integration of the dominant phase, lowest-order Taylor
    of the rest; full Taylor on the classical branch (n above the threshold)
    and on the second-order chain."""
    if r > 2:
        raise UnsupportedOrder(f"r <= 2 supported, got r={r}")
    chain = _chain(tree)
    if len(chain) > r:
        raise UnsupportedOrder(
            f"tree has {len(chain)} integrals but discretisation order is {r}"
        )
    assign = _assignment(tree, freqs)
    model = tree.model
    root = tree.root
    poly: ExpPoly = {(0, 0): 1.0}
    if root.propagator:
        f = _vertex_frequency(root).evaluate(assign)
        w = _prop_phase_sign(model, root.conjugate) * f ** _dispersion_power(model)
        poly = {(0, w): 1.0}
    if not chain:
        return poly
    pref: complex = 1.0
    for _, branch in chain:
        f = _vertex_frequency(branch).evaluate(assign)
        pref *= _integral_factors(model, branch.conjugate, f)[0]
    if len(chain) == 2:
        # full Taylor of both integrals: t^2/2 (the paper's second-order choice)
        return _ep_scale(_ep_mul(poly, {(2, 0): 0.5}), pref)
    path, branch = chain[0]
    if nreg >= classical_threshold(tree):
        return _ep_scale(_ep_mul(poly, {(1, 0): 1.0}), pref)
    if model == "kdv":
        # L_dom = 0 and the full lower phase integrates exactly
        theta = _theta_poly(tree, path).evaluate(assign)
        return _ep_mul(poly, _ep_scale(_ep_integrate({(0, theta): 1.0}), pref))
    L = phase_polynomial(tree, path)
    dom, _ = resonance_split(L, model)
    w_dom = dom.evaluate(assign)
    return _ep_mul(poly, _ep_scale(_ep_integrate({(0, w_dom): 1.0}), pref))


def evaluate_pi_discretized(
    tree: DecoratedTree, freqs: Sequence[int], t: float, nreg: int = 0, r: int = 2
) -> complex:
    return _ep_eval(pi_discretized_exponential_polynomial(tree, freqs, nreg, r), t)


# ---------------------------------------------------------------------------
# tree series


def duhamel_weight(model: str, n_integrals: int) -> float:
    """Convention factor aligning the bare integral map with the equation's
    nonlinearity: KdV carries (1/2)(u^2)_x, i.e. 1/2 per integral vertex."""
    return 0.5**n_integrals if model == "kdv" else 1.0


def tree_series(
    model: str,
    r: int,
    v: FourierField,
    t: float,
    K: int,
    discretized: bool = False,
    nreg: int = 0,
) -> FourierField:
    """Direct (FFT-free) evaluation of the decorated-tree series

        coeff(k) = sum_shapes sum_{|k_i| <= K} Upsilon(T)/S(T) (Pi T)(t)

    restricted to leaf frequencies |k_i| <= K.  This is the oracle against
    which the scheme modules are validated.
    """
    shapes = enumerate_trees(model, r)
    n = v.n_modes
    max_leaves = max(len(leaf_symbols(s)) for s in shapes)
    if K * max_leaves >= n // 2:
        raise ValueError("frequency cap too large for the mode count (aliasing)")
    out = np.zeros(n, dtype=np.complex128)
    for shape in shapes:
        syms = leaf_symbols(shape)
        signs = leaf_signs(shape)
        conjs = leaf_conjugations(shape)
        S = symmetry_factor(shape)
        m = _n_integrals(shape)
        weight = duhamel_weight(model, m) * (2.0**m) / S
        for tup in itertools.product(range(-K, K + 1), repeat=len(syms)):
            k_root = sum(s * f for s, f in zip(signs, tup))
            if abs(k_root) >= n // 2:
                continue
            leafprod: complex = 1.0
            for f, cj in zip(tup, conjs):
                val = v.coeff(f)
                leafprod *= np.conj(val) if cj else val
            if leafprod == 0.0:
                continue
            if discretized:
                val_pi = evaluate_pi_discretized(shape, tup, t, nreg, r)
            else:
                val_pi = evaluate_pi(shape, tup, t)
            out[k_root % n] += weight * leafprod * val_pi
    real = v.real_valued and model == "kdv"
    return FourierField(out, real)


# ---------------------------------------------------------------------------
# admissible-cut coproduct


def _replace_branch(branch: Branch, path: tuple[int, ...], new: Branch) -> Branch:
    if not path:
        return new
    assert isinstance(branch.target, IntegralVertex)
    children = list(branch.target.children)
    children[path[0]] = _replace_branch(children[path[0]], path[1:], new)
    return Branch(IntegralVertex(tuple(children)), branch.conjugate, branch.propagator)


def bck_coproduct(tree: DecoratedTree) -> list[CutTerm]:
    """All admissible cuts: subsets of integral edges no two of which lie on a
    common root path.  Each cut detaches the integral-rooted branches (the
    forest) and relabels the trunk's dangling edges with the cut subtrees'
    total frequencies."""
    positions = integral_vertex_paths(tree)
    terms: list[CutTerm] = []
    for size in range(len(positions) + 1):
        for subset in itertools.combinations(positions, size):
            admissible = True
            for p1, p2 in itertools.combinations(subset, 2):
                if p1 == p2[: len(p1)] or p2 == p1[: len(p2)]:
                    admissible = False
                    break
            if not admissible:
                continue
            forest = []
            trunk: DecoratedTree | None = DecoratedTree(tree.model, tree.root)
            for path in sorted(subset, key=len, reverse=True):
                branch = _branch_at(trunk, path)
                piece = Branch(branch.target, branch.conjugate, propagator=False)
                forest.append(DecoratedTree(tree.model, piece))
                ell = _vertex_frequency(branch)
                new_leaf = Branch(
                    Leaf(ell.key()), branch.conjugate, branch.propagator
                )
                if path == () and not branch.propagator:
                    trunk = None
                else:
                    trunk = DecoratedTree(
                        tree.model, _replace_branch(trunk.root, path, new_leaf)
                    )
            forest.sort(key=render_tree)
            terms.append(CutTerm(tuple(forest), trunk))
    terms.sort(
        key=lambda ct: (
            len(ct.forest),
            tuple(render_tree(f) for f in ct.forest),
            "" if ct.trunk is None else render_tree(ct.trunk),
        )
    )
    return terms
