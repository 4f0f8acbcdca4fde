import itertools
from fractions import Fraction

import pytest

from chromagap.csp import classify_label_cover, sat_value, to_structures
from chromagap.dkkms import (
    AllConstraintsDiscarded,
    NotRegular,
    RhoInstance,
    XorSystem,
    build_rho1,
    build_rho2,
    game_csp,
    is_regular,
    legitimate_tuples,
    rho_quantum_transfer,
    satisfying_assignments,
    tuple_variables,
    verify_game_assignment,
)
from chromagap.f2linalg import F2Subspace, extend_functional
from chromagap.qop import matrix_sum, mermin_peres, verify_assignment


@pytest.fixture(scope="module")
def magic():
    return mermin_peres()


def test_parse_format_round_trip():
    text = "a b c = 1\nd e f = 0\n"
    system = XorSystem.parse(text)
    assert system.format() == text
    assert system.variables == ("a", "b", "c", "d", "e", "f")


def test_regularity_of_magic_square(magic):
    system, _ = magic
    report = is_regular(system, 2)
    assert report.regular and report.max_occurrence == 2


def test_sharing_two_variables_is_irregular():
    system = XorSystem.from_equations([(("a", "b", "c"), 0), (("a", "b", "d"), 0)])
    assert not is_regular(system, 5).regular


def test_empty_system_is_regular():
    assert is_regular(XorSystem((), ()), 1).regular


def test_legitimate_singletons(magic):
    system, _ = magic
    assert legitimate_tuples(system, 1) == [(i,) for i in range(6)]


def test_no_legitimate_pairs_in_magic_square(magic):
    """Any two disjoint equations of the square are crossed by a third, so
    the exclusion condition empties every tuple length above one."""
    system, _ = magic
    assert legitimate_tuples(system, 2) == []
    assert legitimate_tuples(system, 4) == []


def test_legitimate_pairs_in_disjoint_system():
    system = XorSystem.from_equations(
        [(("a", "b", "c"), 0), (("d", "e", "f"), 1), (("a", "d", "g"), 0)]
    )
    pairs = legitimate_tuples(system, 2)
    # 0 and 1 are disjoint but joined by equation 2 through a and d; the
    # other pairs share a variable outright
    assert pairs == []


def test_game_csp_shape(magic):
    system, _ = magic
    game = game_csp(system, 1)
    assert len(game.variables) == 6
    assert len(game.alphabet) == 24
    assert len(game.constraints) == 15  # 6 unary + 9 consistency
    for t in game.variables:
        sats = satisfying_assignments(system, t)
        assert len(sats) == 4


def test_game_csp_disjoint_tuples_unconstrained(magic):
    system, _ = magic
    game = game_csp(system, 1)
    scopes = {c.scope for c in game.constraints if len(c.scope) == 2}
    for (a,), (b,) in itertools.combinations([(i,) for i in range(6)], 2):
        va = set(tuple_variables(system, (a,)))
        vb = set(tuple_variables(system, (b,)))
        joined = ((a,), (b,)) in scopes or ((b,), (a,)) in scopes
        assert joined == bool(va & vb)


def test_game_value_is_14_of_15(magic):
    system, _ = magic
    game = game_csp(system, 1)
    assert sat_value(game) == Fraction(14, 15) < 1


def test_rho1_counts(magic):
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    assert len(rho1.instance.variables) == 24
    assert len(rho1.instance.alphabet) == 4
    assert set(rho1.tags) == {"1-to-1", "2-to-2"}


def test_rho1_requires_regularity():
    bad = XorSystem.from_equations([(("a", "b", "c"), 0), (("a", "b", "d"), 0)])
    with pytest.raises(NotRegular):
        build_rho1(bad, 1, 2)


def test_rho1_tags_match_classifier(magic):
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    from chromagap.csp import CspInstance

    for c, tag in zip(rho1.instance.constraints, rho1.tags):
        single = CspInstance(
            rho1.instance.variables, rho1.instance.alphabet, [(c.scope, c.allowed)]
        )
        profile = classify_label_cover(single)
        assert profile.d_to_d is not None
        expected_d = 1 if tag == "1-to-1" else 2
        assert profile.d_to_d.d == expected_d


def test_rho1_same_space_edges_pair_equal_functionals(magic):
    """Two vertices over the same question tuple carry the same total space,
    so a label pair is allowed exactly when the two functionals coincide as
    functions (the indexings differ: each side uses its own basis)."""
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    for c, tag in zip(rho1.instance.constraints, rho1.tags):
        ka, kb = c.scope
        if ka[0] != kb[0]:
            continue
        assert tag == "1-to-1"
        space = rho1.vertices[ka].space
        assert rho1.vertices[kb].space.equals(space)
        for a in rho1.instance.alphabet:
            for b in rho1.instance.alphabet:
                same_function = all(
                    rho1.labels[ka][a].evaluate_bits(bits)
                    == rho1.labels[kb][b].evaluate_bits(bits)
                    for bits in space.basis
                )
                assert ((a, b) in c.allowed) == same_function


def test_rho2_keeps_vertices_and_uniform_weights(magic):
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    rho2 = build_rho2(rho1)
    assert rho2.instance.variables == rho1.instance.variables
    assert len(rho2.instance.constraints) == 144
    assert {c.weight for c in rho2.instance.constraints} == {Fraction(1, 144)}
    profile = classify_label_cover(rho2.instance)
    assert profile.d_to_d is not None and profile.d_to_d.d == 2


def test_rho2_with_nothing_left_raises(magic):
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    only_ones = RhoInstance(
        system,
        1,
        2,
        rho1.instance,
        rho1.vertices,
        tuple("1-to-1" for _ in rho1.tags),
        rho1.labels,
    )
    with pytest.raises(AllConstraintsDiscarded):
        build_rho2(only_ones)


def test_no_edge_joins_variable_disjoint_tuples(magic):
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    for c in rho1.instance.constraints:
        (ta, _), (tb, _) = c.scope
        va = set(tuple_variables(system, ta))
        vb = set(tuple_variables(system, tb))
        assert va & vb


def test_transfer_completeness_per_vertex(magic):
    system, assignment = magic
    rho, transferred = rho_quantum_transfer(system, 1, 2, assignment)
    for key, fam in transferred.pvms.items():
        total = matrix_sum(list(fam.values()), transferred.dim)
        assert total.is_identity()


def test_transfer_perfect_on_both_stages(magic):
    system, assignment = magic
    rho1 = build_rho1(system, 1, 2)
    rho2 = build_rho2(rho1)
    _, transferred = rho_quantum_transfer(system, 1, 2, assignment, rho1=rho2)
    for inst in (rho1.instance, rho2.instance):
        X, A = to_structures(inst)
        report = verify_assignment(X, A, transferred, 0)
        assert report.perfect and report.passed


def test_transfer_of_classical_solution_is_classical():
    system = XorSystem.from_equations(
        [(("a", "b", "c"), 0), (("d", "e", "f"), 1)]
    )
    # a perfect classical solution lifted to tuple questions
    solution = {"a": 0, "b": 0, "c": 0, "d": 1, "e": 0, "f": 0}
    from chromagap.qop import PMatrix, QuantumAssignment

    one = PMatrix.identity(1)
    pvms = {}
    for t in legitimate_tuples(system, 1):
        theta = tuple(sorted((v, solution[v]) for v in tuple_variables(system, t)))
        pvms[t] = {theta: one}
    game_like = QuantumAssignment(1, 1, pvms)
    assert verify_game_assignment(system, 1, game_like).passed
    rho, transferred = rho_quantum_transfer(system, 1, 2, game_like)
    X, A = to_structures(rho.instance)
    assert verify_assignment(X, A, transferred, 0).passed
    assert transferred.dim == 1
    assert all(len(fam) == 1 for fam in transferred.pvms.values())


def test_extension_lemma_exhaustive_small(magic):
    """Every respecting functional at every (tuple, other-tuple, subspace)
    triple of the square's build has exactly one extension respecting the
    other tuple, found both by brute force and by the solver."""
    system, _ = magic
    rho1 = build_rho1(system, 1, 2)
    ambient = system.ambient()
    checked = 0
    for key, vertex in list(rho1.vertices.items())[:6]:
        u = vertex.indices
        u_conditions = [(system.equation_vector(i), system.equations[i][1]) for i in u]
        for w in legitimate_tuples(system, 1):
            w_conditions = [
                (system.equation_vector(i), system.equations[i][1]) for i in w
            ]
            for a, psi in rho1.labels[key].items():
                out = extend_functional(psi, u_conditions, w_conditions)
                # brute force over every functional on the extended space
                target = psi.domain.sum(
                    F2Subspace.spanned_by([v for v, _ in w_conditions])
                )
                count = 0
                for bits in itertools.product((0, 1), repeat=target.dim):
                    from chromagap.f2linalg import F2Functional

                    cand = F2Functional(target, bits)
                    if all(
                        cand.evaluate_bits(b) == psi.evaluate_bits(b)
                        for b in psi.domain.basis
                    ) and cand.respects(w_conditions):
                        count += 1
                        assert cand.values == out.values
                assert count == 1
                checked += 1
    assert checked == 6 * 6 * 4
