"""Acceptance criteria, one test per criterion, with a printed verdict line.

Three sub-assertions are known-unattainable and fail honestly (see the
decisions ledger kept outside the package): a perfect level-1-compatible
quantum assignment of the magic-square game, of its reduced 2-to-2 instance,
and the genuinely-quantum line-digraph transfer built on one, cannot exist
on any Hilbert space.  A perfect 1-compatible family forces a shared
observable per system variable and pairwise commutation across every
intersecting context pair, which diagonalises all nine grid observables
simultaneously and would make the classically 5/6-satisfiable system fully
satisfiable.  The criteria are asserted exactly as stated; everything
attainable in them is checked first so the printed lines localise the gap.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from chromagap import colouring, csp, dkkms, dmr, pultr, qop, relstruct
from chromagap.cli import pipeline_machinery
from chromagap.relstruct import ABOVE_CAP, clique, digraph
from helpers import random_digraph, random_faithful_template, random_template, structure_with_hom_from


from conftest import record_verdict


def verdict(number: int, ok: bool, text: str) -> None:
    line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {text}"
    print(line)
    record_verdict(line)


@pytest.fixture(scope="module")
def magic():
    return qop.mermin_peres()


@pytest.fixture(scope="module")
def rho(magic):
    system, assignment = magic
    rho1 = dkkms.build_rho1(system, 1, 2)
    rho2 = dkkms.build_rho2(rho1)
    _, transferred = dkkms.rho_quantum_transfer(system, 1, 2, assignment, rho1=rho2)
    return rho1, rho2, transferred


@pytest.fixture(scope="module")
def eta_bundle(rho):
    _, rho2, transferred = rho
    eta, coloured, ctx = colouring.eta_quantum_transfer(rho2.instance, transferred, 0)
    return eta, coloured, ctx


def test_criterion_01_magic_square_pseudo_telepathy(magic):
    """sat(S) = 5/6 exactly, and the dimension-4 assignment passes
    verification at level 1 with exact-zero forbidden products."""
    system, assignment = magic
    t0 = time.time()
    brute = Fraction(
        max(
            sum(
                1
                for (vs, rhs) in system.equations
                if (bits[system.variables.index(vs[0])]
                    ^ bits[system.variables.index(vs[1])]
                    ^ bits[system.variables.index(vs[2])]) == rhs
            )
            for bits in itertools.product((0, 1), repeat=9)
        ),
        6,
    )
    sat_seconds = time.time() - t0
    assert brute == system.sat_value() == Fraction(5, 6)
    assert sat_seconds < 1.0
    assert assignment.dim == 4

    game = dkkms.game_csp(system, 1)
    X, A = csp.to_structures(game)
    perfect = qop.verify_assignment(X, A, assignment, 0)
    assert perfect.perfect and perfect.products_checked == 72

    level1 = qop.verify_assignment(X, A, assignment, 1)
    ok = perfect.perfect and level1.passed
    verdict(
        1,
        ok,
        f"sat=5/6 exact, forbidden products exact-zero ({perfect.products_checked}); "
        f"level-1 commutators: {'pass' if level1.passed else f'{len(level1.commutator_violations)} violations'}",
    )
    assert level1.passed, (
        "level-1 compatibility of the magic-square strategy is unattainable: "
        "perfectness plus pairwise commutation across intersecting question "
        "tuples forces a classical solution of a 5/6-satisfiable system "
        "(see the decisions ledger); the pseudo-telepathy layer above passed"
    )


def test_criterion_02_rho_at_desk_scale(rho):
    """24 vertices, alphabet 4, only 1-to-1/2-to-2 tags, and the transferred
    assignment under full exact verification at level 1, within 30 s."""
    t0 = time.time()
    rho1, rho2, transferred = rho
    assert len(rho1.instance.variables) == 24
    assert len(rho1.instance.alphabet) == 4
    assert set(rho1.tags) <= {"1-to-1", "2-to-2"}

    X, A = csp.to_structures(rho2.instance)
    perfect = qop.verify_assignment(X, A, transferred, 0)
    assert perfect.perfect and not perfect.sampled
    level1 = qop.verify_assignment(X, A, transferred, 1)
    seconds = time.time() - t0
    assert seconds < 30
    ok = perfect.perfect and level1.passed
    verdict(
        2,
        ok,
        f"24 vertices, alphabet 4, tags ok, full exact perfectness "
        f"({perfect.products_checked} products) in {seconds:.1f}s; level-1: "
        f"{'pass' if level1.passed else f'{len(level1.commutator_violations)} commutator violations'}",
    )
    assert level1.passed, (
        "full level-1 verification on the reduced 2-to-2 instance is "
        "unattainable for the magic square: its constraints replicate the "
        "game's consistency structure, so the same collapse argument applies "
        "(see the decisions ledger); perfectness at 24 vertices passed exactly"
    )


def test_criterion_03_eta_quantum_four_colouring(eta_bundle):
    """A verified quantum 4-colouring of the 6144-vertex reduced digraph on
    dimension 4: sampled verification exact-zero, full sweep optional."""
    eta, coloured, _ = eta_bundle
    assert len(eta.domain) == 6144
    assert coloured.dim == 4
    k4 = clique(4)
    t0 = time.time()
    sampled = qop.verify_assignment(eta, k4, coloured, 0, product_samples=100_000, seed=11)
    sampled_seconds = time.time() - t0
    assert sampled.perfect and sampled.products_checked == 100_000

    t0 = time.time()
    full = qop.verify_assignment(eta, k4, coloured, 0)
    full_seconds = time.time() - t0
    assert full.perfect and not full.sampled
    assert full_seconds < 600
    verdict(
        3,
        True,
        f"6144 vertices, dim 4; sampled 100000 exact-zero in {sampled_seconds:.0f}s, "
        f"full {full.products_checked} products in {full_seconds:.0f}s",
    )


def test_criterion_04_adjunction_oracle_two_hundred_cases():
    """The two sides of the adjunction agree on 200 seeded random cases."""
    rng = random.Random(2026)
    agreements = 0
    for _ in range(200):
        template = random_template(rng)
        dom = [f"x{i}" for i in range(rng.randint(1, 4))]
        X = relstruct.RelStructure(
            template.tau,
            dom,
            {
                name: {
                    tuple(rng.choice(dom) for _ in range(arity))
                    for _ in range(rng.randint(0, 3))
                }
                for name, arity in template.tau.symbols
            },
        )
        Y = random_digraph(rng, 4, 5)
        lam_side, gamma_side = pultr.adjunction_oracle(template, X, Y)
        assert lam_side == gamma_side
        agreements += 1
    verdict(4, True, f"lambda side equals gamma side on {agreements}/200 seeded cases")


def test_criterion_05_quantum_adjunction_transfers(eta_bundle):
    """100 seeded classical-lift transfer cases at the contracted level with
    the dimension invariant, plus the line-digraph case built on the
    magic-square-derived colouring."""
    rng = random.Random(515)
    gamma_cases = 0
    while gamma_cases < 50:
        template = random_template(rng)
        report = pultr.template_predicates(template)
        if not report.connected:
            continue
        dom = [f"x{i}" for i in range(rng.randint(1, 3))]
        X = relstruct.RelStructure(
            template.tau,
            dom,
            {
                name: {
                    tuple(rng.choice(dom) for _ in range(arity))
                    for _ in range(rng.randint(0, 2))
                }
                for name, arity in template.tau.symbols
            },
        )
        quotient = pultr.lambda_quotient(template, X)
        lam = pultr.left_apply(template, X)
        Y, f = structure_with_hom_from(rng, lam, 3)
        lift = qop.lift_classical(f)
        k = rng.choice([0, 1, 2])
        out = pultr.transfer_gamma(template, X, Y, lift, k, quotient=quotient)
        gy = pultr.central_apply(template, Y)
        assert qop.verify_assignment(X, gy, out, k).passed
        assert out.dim == lift.dim
        gamma_cases += 1

    lambda_cases = 0
    while lambda_cases < 50:
        template = random_faithful_template(rng)
        dom = [f"x{i}" for i in range(rng.randint(1, 3))]
        X = relstruct.RelStructure(
            template.tau,
            dom,
            {
                name: {
                    tuple(rng.choice(dom) for _ in range(arity))
                    for _ in range(rng.randint(0, 2))
                }
                for name, arity in template.tau.symbols
            },
        )
        Yb = random_digraph(rng, 3, 4)
        gy = pultr.central_apply(template, Yb)
        g = relstruct.find_homomorphism(X, gy)
        if g is None:
            continue
        lift = qop.lift_classical(g)
        k = rng.choice([0, 1, 2])
        out = pultr.transfer_lambda(template, X, Yb, lift, k)
        lam = pultr.left_apply(template, X)
        assert qop.verify_assignment(lam, Yb, out, k).passed
        assert out.dim == 1
        lambda_cases += 1

    # the line-digraph case derived from the magic square: its colouring is
    # perfect but not level-4-compatible, which the transfer must detect
    eta, coloured, _ = eta_bundle
    k4 = clique(4)
    precheck = qop.verify_assignment(eta, k4, coloured, 1, max_witnesses=1)
    mermin_ok = precheck.passed
    verdict(
        5,
        mermin_ok,
        f"100/100 classical-lift transfers verified at contracted levels, dim invariant; "
        f"magic-square line-digraph case: "
        f"{'pass' if mermin_ok else 'input not even level-1 compatible, transfer impossible'}",
    )
    assert mermin_ok, (
        "the line-digraph transfer of the magic-square-derived colouring "
        "needs level 2k+2 = 4 compatibility, but the colouring is only "
        "level-0 compatible (witness commutator found at level 1); a "
        "compatible input cannot exist (see the decisions ledger)"
    )


def test_criterion_06_line_digraph_chromatic():
    """chi of the doubly iterated line digraph of the 4-clique is exactly 3,
    and both colour-transfer implications hold on seeded digraphs."""
    t0 = time.time()
    delta2 = colouring.line_digraph(colouring.line_digraph(clique(4)))
    chi = relstruct.chromatic_number(delta2, 6)
    seconds = time.time() - t0
    assert chi == 3 and seconds < 10

    rng = random.Random(46)
    checked = 0
    while checked < 40:
        X = random_digraph(rng, 4, 5)
        if any(a == b for a, b in X.relations["E"]):
            continue
        dx = colouring.line_digraph(X)
        if not dx.domain:
            continue
        for n in (2, 3):
            alpha_n, beta_n = colouring.alpha_beta(n)
            if relstruct.chromatic_number(dx, n) is not ABOVE_CAP:
                assert relstruct.chromatic_number(X, alpha_n) is not ABOVE_CAP
            if relstruct.chromatic_number(X, beta_n) is not ABOVE_CAP:
                assert relstruct.chromatic_number(dx, n) is not ABOVE_CAP
            checked += 1
    verdict(6, True, f"chi(delta^2 K4) = 3 in {seconds:.1f}s; both bounds on {checked} seeded checks")


def test_criterion_07_transition_matrix_certificate():
    tm = colouring.build_transition_matrix(2)
    import numpy as np

    assert len(tm.states) == 16
    assert np.array_equal(tm.matrix, tm.matrix.T)
    assert tm.row_sum_residual < 1e-12
    assert tm.second_modulus < 1 - 1e-8
    for i, s in enumerate(tm.states):
        for j, t in enumerate(tm.states):
            intersects = bool(set(s) & set(t))
            assert (tm.matrix[i, j] == 0.0) == intersects
    verdict(
        7,
        True,
        f"16 states, symmetric, residual {tm.row_sum_residual:.1e}, "
        f"second modulus {tm.second_modulus:.3f}, zeros exactly on intersecting pairs",
    )


def test_criterion_08_extension_lemma_exhaustive(magic, rho):
    """Every (tuple, other-tuple, subspace, respecting functional) of the
    magic-square build has exactly one extension respecting the other tuple,
    and the solver returns it; zero discrepancies."""
    system, _ = magic
    rho1, _, _ = rho
    from chromagap.f2linalg import F2Functional, F2Subspace, extend_functional

    conditions = {
        t: [(system.equation_vector(i), system.equations[i][1]) for i in t]
        for t in dkkms.legitimate_tuples(system, 1)
    }
    checked = 0
    discrepancies = 0
    for key, vertex in rho1.vertices.items():
        for w, w_conditions in conditions.items():
            for a, psi in rho1.labels[key].items():
                out = extend_functional(psi, conditions[vertex.indices], w_conditions)
                target = psi.domain.sum(
                    F2Subspace.spanned_by([v for v, _ in w_conditions])
                )
                matches = []
                for bits in itertools.product((0, 1), repeat=target.dim):
                    cand = F2Functional(target, bits)
                    if all(
                        cand.evaluate_bits(b) == psi.evaluate_bits(b)
                        for b in psi.domain.basis
                    ) and cand.respects(w_conditions):
                        matches.append(cand)
                if len(matches) != 1 or matches[0].values != out.values:
                    discrepancies += 1
                checked += 1
    assert checked == 24 * 6 * 4
    assert discrepancies == 0
    verdict(8, True, f"{checked} extensions, brute force agrees, zero discrepancies")


def test_criterion_09_dmr_parameter_echo_and_ledger():
    params = dmr.pipeline_parameters(Fraction(1, 2), 2, 2)
    eps = Fraction(1, 2)
    delta = eps / (3 * 4)
    ell = math.ceil(1 / delta)
    eps1 = eps / (3 * 2 * ell**2 * 4)
    assert params["delta"] == delta
    assert params["ell"] == ell == 24
    assert params["eps_prime"] == eps1
    assert params["eps_double_prime"] == eps1 / 2
    assert params["eps_triple_prime"] == delta * eps1 / 4
    assert params["h"] == 2 and params["m"] == math.ceil(2 / eps1)

    pred = {("a0", "b0"), ("a1", "b0")}
    inst = csp.CspInstance(
        ["p", "q", "y"],
        ["a0", "a1", "b0"],
        [(("p", "y"), pred), (("q", "y"), pred)],
        [Fraction(1, 2), Fraction(1, 2)],
    )
    lift = qop.lift_classical({"p": "a0", "q": "a1", "y": "b0"})
    final, report, tracked = dmr.dmr_pipeline(inst, Fraction(12), 2, 1, lift)
    assert all(ok for _, ok in report.certificates)
    levels = [entry.split(":")[0] for _, entry in report.quantum_ledger]
    assert levels == ["level 4", "level 4", "level 2"]
    assert all("pass" in entry for _, entry in report.quantum_ledger)
    verdict(
        9,
        True,
        "parameter cascade exact (delta=1/24, eps'=1/27648, ...); certificates verified; "
        "quantum ledger 2k -> 2k -> k enforced by verifier runs",
    )


def test_criterion_10_machinery_end_to_end():
    t0 = time.time()
    report = pipeline_machinery(2, seed=0)
    seconds = time.time() - t0
    assert seconds < 300
    final_stage = report.stages[-1]
    assert final_stage.details["ledger"] == [10, 4, 1]
    assert "pass" in final_stage.details["verification"]
    assert final_stage.details["chi_delta2_k4"] == 3
    assert not report.verdict.startswith("FAIL")
    verdict(
        10,
        True,
        f"ledger 10->4->1, verified 3-colouring witness, {seconds:.0f}s",
    )
