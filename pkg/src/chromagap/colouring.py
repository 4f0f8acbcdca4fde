"""The line-digraph operator, the certified transition matrix, and the
reduction from d-to-d label cover to 2d-colouring.

The reduction's gadget is a Markov chain on [2d]^d whose transition matrix
is symmetric, has a simple top eigenvalue, and vanishes exactly on pairs of
states with intersecting entry sets.  Only the zero/nonzero support of the
matrix feeds the combinatorics, so the floating-point entries never touch the
exact layer; the spectral facts are certified numerically at build time and
a failed certificate aborts the build.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .csp import CspInstance, DtoDCertificate, classify_label_cover
from .pultr import (
    LambdaQuotient,
    PultrTemplate,
    gamma_functor,
    lambda_functor,
    lambda_quotient,
    left_apply,
)
from .qop import QuantumAssignment, VerificationFailure, compose_sandwich, verify_assignment
from .relstruct import (
    GRAPH_SIGNATURE,
    RelStructure,
    Signature,
    check_homomorphism,
    clique,
)


class NotDtoD(Exception):
    pass


class SizeBudgetExceeded(Exception):
    pass


class SinkhornDivergence(Exception):
    pass


class SpectralCertificationFailure(Exception):
    pass


def line_digraph(X: RelStructure) -> RelStructure:
    """Vertices are the edges of X; (e, f) is an edge when e ends where f
    starts."""
    sym = X.graph_symbol()
    edges = sorted(X.relations[sym], key=lambda t: (X.index(t[0]), X.index(t[1])))
    by_tail: dict = {}
    for e in edges:
        by_tail.setdefault(e[0], []).append(e)
    new_edges = []
    for e in edges:
        for f in by_tail.get(e[1], ()):
            new_edges.append((e, f))
    return RelStructure(GRAPH_SIGNATURE, edges, {sym: new_edges})


def alpha_beta(n: int) -> tuple[int, int]:
    """Colour-count transfer functions of the line digraph: 2^n up, the
    middle binomial coefficient down."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2**n, math.comb(n, n // 2)


@dataclass
class TransitionMatrix:
    d: int
    states: tuple[tuple[int, ...], ...]
    matrix: np.ndarray
    support: frozenset
    row_sum_residual: float
    second_modulus: float
    iterations: int

    def index(self, state: tuple[int, ...]) -> int:
        return self.states.index(state)


_TRANSITION_CACHE: dict[int, TransitionMatrix] = {}


def build_transition_matrix(
    d: int,
    *,
    residual_tol: float = 1e-12,
    spectral_gap: float = 1e-8,
    max_iterations: int = 100_000,
) -> TransitionMatrix:
    """Symmetric Sinkhorn scaling of the disjointness pattern on [2d]^d,
    certified: rows sum to 1 within the residual, the matrix is symmetric by
    construction, eigenvalue 1 is simple with all other moduli below
    1 - spectral_gap, and the support is exactly the disjoint-state pairs.
    Certification failure raises instead of returning a matrix.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if d in _TRANSITION_CACHE:
        return _TRANSITION_CACHE[d]
    states = tuple(itertools.product(range(2 * d), repeat=d))
    n = len(states)
    pattern = np.zeros((n, n))
    support = set()
    for i, s in enumerate(states):
        ss = set(s)
        for j, t in enumerate(states):
            if not ss & set(t):
                pattern[i, j] = 1.0
                support.add((i, j))
    scaling = np.ones(n)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        row_action = pattern @ scaling
        if np.any(row_action <= 0):
            raise SinkhornDivergence("zero row action; pattern lacks total support")
        scaling = np.sqrt(scaling / row_action)
        matrix = (pattern * scaling[:, None]) * scaling[None, :]
        residual = float(np.abs(matrix.sum(axis=1) - 1.0).max())
        if residual < residual_tol:
            break
    else:
        raise SinkhornDivergence(
            f"row sums off by {residual:.3e} after {max_iterations} iterations"
        )
    matrix = (pattern * scaling[:, None]) * scaling[None, :]
    if not np.array_equal(matrix > 0, pattern > 0):
        raise SpectralCertificationFailure("support drifted during scaling")
    eigenvalues = np.linalg.eigvalsh(matrix)
    top = eigenvalues[-1]
    others = np.abs(np.concatenate([eigenvalues[:-1]]))
    second = float(others.max())
    if abs(top - 1.0) > 1e-9:
        raise SpectralCertificationFailure(f"top eigenvalue {top} is not 1")
    if second >= 1.0 - spectral_gap:
        raise SpectralCertificationFailure(
            f"second modulus {second} too close to 1 (gap < {spectral_gap})"
        )
    result = TransitionMatrix(
        d, states, matrix, frozenset(support), residual, second, iterations
    )
    _TRANSITION_CACHE[d] = result
    return result


# -- the reduction ----------------------------------------------------------


def _digit(z: int, position: int, base: int) -> int:
    return (z // base**position) % base


def _blocks(z: int, perm: Sequence[int], d: int, base: int) -> tuple:
    m = len(perm) // d
    return tuple(
        tuple(_digit(z, perm[d * i + j], base) for j in range(d)) for i in range(m)
    )


@dataclass
class EtaContext:
    """Shared data of one reduction run: the d-to-d certificate, the grouped
    constraint symbols, and the gadget template."""

    instance: CspInstance
    certificate: DtoDCertificate
    d: int
    m: int
    n: int
    symbols: tuple[str, ...]
    mu_nu: dict
    variable_structure: RelStructure
    target: RelStructure
    template: PultrTemplate


def _require_certificate(inst: CspInstance) -> DtoDCertificate:
    profile = classify_label_cover(inst)
    if profile.d_to_d is None:
        raise NotDtoD("instance has no verified d-to-d certificate")
    return profile.d_to_d


def eta_context(inst: CspInstance, *, budget: Optional[int] = None) -> EtaContext:
    """Classify the instance, group constraints by their permutation pair,
    and materialise the gadget template for exactly the occurring symbols."""
    cert = _require_certificate(inst)
    d, m = cert.d, cert.m
    n = len(inst.alphabet)
    base = 2 * d
    if budget is not None and len(inst.variables) * base**n > budget:
        raise SizeBudgetExceeded(
            f"{len(inst.variables)} * (2d)^{n} vertices exceed the budget"
        )
    transition = build_transition_matrix(d)
    disjoint = {
        (a, b)
        for a in itertools.product(range(base), repeat=d)
        for b in itertools.product(range(base), repeat=d)
        if not set(a) & set(b)
    }

    pair_to_symbol: dict = {}
    scopes_by_symbol: dict = {}
    for c, (mu, nu) in zip(inst.constraints, cert.permutations):
        key = (mu, nu)
        if key not in pair_to_symbol:
            pair_to_symbol[key] = f"T{len(pair_to_symbol)}"
            scopes_by_symbol[pair_to_symbol[key]] = set()
        scopes_by_symbol[pair_to_symbol[key]].add(c.scope)
    symbols = tuple(pair_to_symbol[key] for key in pair_to_symbol)
    tau = Signature(tuple((name, 2) for name in symbols))
    rho = GRAPH_SIGNATURE

    z_all = range(base**n)
    A = RelStructure(rho, z_all, {"E": []})
    gadgets: dict = {}
    eps: dict = {}
    for (mu, nu), name in pair_to_symbol.items():
        dom = [(1, z) for z in z_all] + [(2, z) for z in z_all]
        edges = []
        for z in z_all:
            zb = _blocks(z, mu, d, base)
            for zp in z_all:
                zpb = _blocks(zp, nu, d, base)
                if all((a, b) in disjoint for a, b in zip(zb, zpb)):
                    edges.append(((1, z), (2, zp)))
        gadgets[name] = RelStructure(rho, dom, {"E": edges})
        eps[name] = ({z: (1, z) for z in z_all}, {z: (2, z) for z in z_all})
    template = PultrTemplate(rho, tau, A, gadgets, eps)

    alpha_index = {a: i for i, a in enumerate(inst.alphabet)}
    x_struct = RelStructure(tau, inst.variables, scopes_by_symbol)
    target_rels: dict = {}
    for (mu, nu), name in pair_to_symbol.items():
        mu_pos = {a: p for p, a in enumerate(mu)}
        nu_pos = {b: p for p, b in enumerate(nu)}
        target_rels[name] = {
            (a, b)
            for a in inst.alphabet
            for b in inst.alphabet
            if mu_pos[alpha_index[a]] // d == nu_pos[alpha_index[b]] // d
        }
    target = RelStructure(tau, inst.alphabet, target_rels)
    mu_nu = {name: key for key, name in pair_to_symbol.items()}
    # the target's relations reproduce the predicates: same sanity check the
    # classifier already passed, kept as a cheap structural assertion
    for c, (mu, nu) in zip(inst.constraints, cert.permutations):
        name = pair_to_symbol[(mu, nu)]
        assert target_rels[name] == set(c.allowed)
    return EtaContext(
        inst, cert, d, m, n, symbols, mu_nu, x_struct, target, template
    )


def eta_apply(
    inst: CspInstance, *, budget: Optional[int] = None, context: Optional[EtaContext] = None
) -> RelStructure:
    """The reduced digraph: vertices (x, z) for z in [2d]^n, an edge per
    constraint and per pair of z-strings whose permuted d-blocks are
    entrywise disjoint (the support of the certified transition matrix)."""
    ctx = context if context is not None else eta_context(inst, budget=budget)
    base = 2 * ctx.d
    z_count = base**ctx.n
    # vertex tuples are shared between the domain and every edge that uses
    # them, which keeps the edge set light at full scale
    by_x = {x: [(x, z) for z in range(z_count)] for x in inst.variables}
    vertices = [v for x in inst.variables for v in by_x[x]]
    # per symbol, the disjoint (z, z') pairs are shared by all its scopes
    pair_lists: dict = {}
    for name in ctx.symbols:
        mu, nu = ctx.mu_nu[name]
        pairs = []
        for z in range(z_count):
            zb = _blocks(z, mu, ctx.d, base)
            for zp in range(z_count):
                zpb = _blocks(zp, nu, ctx.d, base)
                if all(not set(a) & set(b) for a, b in zip(zb, zpb)):
                    pairs.append((z, zp))
        pair_lists[name] = pairs
    var_pos = {x: i for i, x in enumerate(inst.variables)}
    edges = []
    for name in ctx.symbols:
        for scope in sorted(
            ctx.variable_structure.relations[name],
            key=lambda t: tuple(var_pos[v] for v in t),
        ):
            x, xp = scope
            left, right = by_x[x], by_x[xp]
            for z, zp in pair_lists[name]:
                edges.append((left[z], right[zp]))
    return RelStructure(GRAPH_SIGNATURE, vertices, {"E": edges})


def xi_colouring(ctx: EtaContext) -> tuple[dict, RelStructure, LambdaQuotient]:
    """The canonical 2d-colouring of the glued target: a class containing the
    copy vertex z^(y) gets colour z(y).  Well-definedness is checked on every
    member of every class, and the result is verified as a homomorphism."""
    base = 2 * ctx.d
    alpha_index = {a: i for i, a in enumerate(ctx.instance.alphabet)}
    quotient = lambda_quotient(ctx.template, ctx.target)
    lam_target = left_apply(ctx.template, ctx.target)
    k2d = clique(base)

    def colour_of_tag(tag) -> str:
        if tag[0] == "A":
            _, y, z = tag
            return f"k{_digit(z, alpha_index[y], base)}"
        _, name, yt, b = tag
        part, z = b
        return f"k{_digit(z, alpha_index[yt[part - 1]], base)}"

    xi: dict = {}
    for class_name, members in quotient.classes().items():
        colours = {colour_of_tag(t) for t in members}
        if len(colours) != 1:
            raise VerificationFailure(
                f"colouring ill-defined on class {class_name!r}: {sorted(colours)}"
            )
        xi[class_name] = colours.pop()
    if not check_homomorphism(xi, lam_target, k2d):
        raise VerificationFailure("canonical colouring is not a homomorphism")
    return xi, lam_target, quotient


def eta_quantum_transfer(
    inst: CspInstance,
    assignment: QuantumAssignment,
    k: int,
    *,
    budget: Optional[int] = None,
    check_input: bool = True,
    context: Optional[EtaContext] = None,
) -> tuple[RelStructure, QuantumAssignment, EtaContext]:
    """Push a perfect assignment of a d-to-d instance to a quantum
    2d-colouring of the reduced digraph, preserving the Hilbert space.

    The route is the faithful-template functor transfer followed by
    composition with the canonical colouring of the glued target.  The output
    is keyed by the (x, z) vertices of `eta_apply`.
    """
    ctx = context if context is not None else eta_context(inst, budget=budget)
    if check_input:
        report = verify_assignment(ctx.variable_structure, ctx.target, assignment, k)
        if not report.passed:
            raise VerificationFailure(
                f"input verification at level {k} failed: {report.summary()}"
            )
    xi, lam_target, quotient_y = xi_colouring(ctx)
    quotient_x = lambda_quotient(ctx.template, ctx.variable_structure)
    transferred, _ = lambda_functor(
        ctx.template,
        ctx.variable_structure,
        ctx.target,
        assignment,
        k,
        quotient_x=quotient_x,
        quotient_y=quotient_y,
        lambda_y=lam_target,
    )
    identity = {v: v for v in transferred.pvms}
    coloured = compose_sandwich(identity, transferred, xi, k=k)

    # rename quotient classes to the (x, z) vertices of eta_apply: every
    # class contains exactly one copy vertex of A, which carries the name
    rename: dict = {}
    for class_name, members in quotient_x.classes().items():
        a_tags = [t for t in members if t[0] == "A"]
        if len(a_tags) != 1:
            raise VerificationFailure(
                f"class {class_name!r} has {len(a_tags)} copy vertices of A"
            )
        _, x, z = a_tags[0]
        rename[class_name] = (x, z)
    eta = eta_apply(inst, context=ctx)
    renamed = {rename[v]: fam for v, fam in coloured.pvms.items()}
    if set(renamed) != set(eta.domain):
        raise VerificationFailure("transfer domain differs from the reduced digraph")
    return eta, QuantumAssignment(coloured.dim, k, renamed), ctx


# -- line-digraph transfer ---------------------------------------------------


def linedigraph_template() -> PultrTemplate:
    """Gadget pair of the line digraph: a single arc glued head-to-tail
    along a length-2 path; connected with diameter 2, not faithful."""
    rho = GRAPH_SIGNATURE
    A = RelStructure(rho, ["a1", "a2"], {"E": [("a1", "a2")]})
    B = RelStructure(rho, ["b1", "b2", "b3"], {"E": [("b1", "b2"), ("b2", "b3")]})
    eps1 = {"a1": "b1", "a2": "b2"}
    eps2 = {"a1": "b2", "a2": "b3"}
    return PultrTemplate(rho, rho, A, {"E": B}, {"E": (eps1, eps2)})


def linedigraph_quantum_transfer(
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    budget: Optional[int] = None,
) -> QuantumAssignment:
    """From X ~> Y at level 2k+2 to line digraphs at level k; the gadget has
    diameter 2, so 2k+2 is exactly the contracted input level."""
    template = linedigraph_template()
    return gamma_functor(template, X, Y, assignment, k, budget=budget)
