import random

import pytest

from chromagap.relstruct import (
    ABOVE_CAP,
    GRAPH_SIGNATURE,
    PartialMap,
    RelStructure,
    SearchBudgetExceeded,
    SignatureMismatch,
    check_homomorphism,
    chromatic_number,
    clique,
    diameter_and_connectivity,
    digraph,
    enumerate_homomorphisms,
    find_homomorphism,
    gaifman_distance,
    independence_number,
    relabel,
    symmetrize,
)
from helpers import brute_force_all_homs, brute_force_hom_exists, random_digraph

C5 = digraph([(f"v{i}", f"v{(i + 1) % 5}") for i in range(5)])


def test_identity_is_homomorphism():
    K3 = clique(3)
    assert check_homomorphism({v: v for v in K3.domain}, K3, K3)


def test_constant_map_on_clique_rejected():
    K2 = clique(2)
    assert not check_homomorphism({v: K2.domain[0] for v in K2.domain}, K2, K2)


def test_partial_map_raises():
    K2 = clique(2)
    with pytest.raises(PartialMap):
        check_homomorphism({K2.domain[0]: K2.domain[0]}, K2, K2)


def test_signature_mismatch_raises():
    sig = RelStructure(GRAPH_SIGNATURE, ["a"], {"E": []})
    other = RelStructure(
        GRAPH_SIGNATURE.__class__((("F", 2),)), ["a"], {"F": []}
    )
    with pytest.raises(SignatureMismatch):
        check_homomorphism({"a": "a"}, sig, other)


def test_c5_to_k3_matches_brute_force():
    K3 = clique(3)
    witness = find_homomorphism(C5, K3)
    assert witness is not None
    assert check_homomorphism(witness, C5, K3)
    assert brute_force_hom_exists(C5, K3)


def test_c5_to_k2_none():
    K2 = clique(2)
    assert find_homomorphism(C5, K2) is None
    assert not brute_force_hom_exists(C5, K2)


def test_self_homomorphism_always_found():
    for seed in range(8):
        X = random_digraph(random.Random(seed))
        assert find_homomorphism(X, X) is not None


def test_enumeration_matches_brute_force():
    K3 = clique(3)
    ours = enumerate_homomorphisms(C5, K3)
    brute = brute_force_all_homs(C5, K3)
    assert len(ours) == len(brute)
    assert {tuple(sorted(h.items())) for h in ours} == {
        tuple(sorted(h.items())) for h in brute
    }


def test_enumeration_complete_under_double_propagation():
    """Regression: one assignment can forward-trim the same future variable
    through two constraints; a forward-order undo used to resurrect the
    intermediate candidate list and lose solutions."""
    A = RelStructure(
        GRAPH_SIGNATURE,
        ["a0", "a1", "a2"],
        {"E": [("a0", "a1"), ("a1", "a0"), ("a1", "a2")]},
    )
    Y = RelStructure(
        GRAPH_SIGNATURE,
        ["v0", "v1", "v2", "v3"],
        {"E": [("v2", "v0"), ("v2", "v2"), ("v3", "v0"), ("v3", "v1")]},
    )
    ours = enumerate_homomorphisms(A, Y)
    brute = brute_force_all_homs(A, Y)
    assert len(ours) == len(brute) == 2


def test_enumeration_complete_on_random_pairs():
    rng = random.Random(990)
    for _ in range(40):
        X = random_digraph(rng, 3, 4)
        Y = random_digraph(rng, 3, 5)
        ours = enumerate_homomorphisms(X, Y)
        brute = brute_force_all_homs(X, Y)
        assert {tuple(sorted(h.items())) for h in ours} == {
            tuple(sorted(h.items())) for h in brute
        }


def test_first_witness_is_lexicographically_least():
    K3 = clique(3)
    first = find_homomorphism(C5, K3)
    all_keys = sorted(
        tuple(h[v] for v in C5.domain) for h in brute_force_all_homs(C5, K3)
    )
    assert tuple(first[v] for v in C5.domain) == all_keys[0]


def test_budget_exceeded():
    with pytest.raises(SearchBudgetExceeded):
        find_homomorphism(clique(5), clique(5), budget=3)


def test_gaifman_distance_basics():
    path = digraph([("a", "b"), ("b", "c")])
    assert gaifman_distance(path, "a", "a") == 0
    assert gaifman_distance(path, "a", "c") == 2
    two = RelStructure(GRAPH_SIGNATURE, ["a", "b", "c", "d"], {"E": [("a", "b"), ("c", "d")]})
    assert gaifman_distance(two, "a", "c") == float("inf")


def test_gaifman_metric_triangle_inequality():
    rng = random.Random(5)
    for _ in range(10):
        X = random_digraph(rng, 5, 7)
        for u in X.domain:
            for v in X.domain:
                for w in X.domain:
                    duv = gaifman_distance(X, u, v)
                    dvw = gaifman_distance(X, v, w)
                    duw = gaifman_distance(X, u, w)
                    assert duw <= duv + dvw


def test_diameter_and_connectivity():
    assert diameter_and_connectivity(clique(4)) == (True, 1)
    two = RelStructure(GRAPH_SIGNATURE, ["a", "b", "c", "d"], {"E": [("a", "b"), ("c", "d")]})
    assert two is not None and diameter_and_connectivity(two) == (False, float("inf"))
    assert diameter_and_connectivity(digraph([("a", "b"), ("b", "c")])) == (True, 2)


def test_clique_counts():
    assert len(clique(2).relations["E"]) == 2
    assert len(clique(3).relations["E"]) == 6
    assert len(clique(1).relations["E"]) == 0


def test_chromatic_number_cliques():
    for n in range(1, 9):
        assert chromatic_number(clique(n), 9) == n


def test_chromatic_number_c5():
    assert chromatic_number(C5, 5) == 3


def test_chromatic_above_cap():
    assert chromatic_number(clique(4), 3) is ABOVE_CAP


def test_chromatic_ignores_orientation():
    rng = random.Random(11)
    for _ in range(10):
        X = random_digraph(rng, 5, 6)
        if any(a == b for a, b in X.relations["E"]):
            continue
        assert chromatic_number(X, 6) == chromatic_number(symmetrize(X), 6)


def test_independence_number():
    assert independence_number(clique(4)) == 1
    empty = RelStructure(GRAPH_SIGNATURE, [f"u{i}" for i in range(5)], {"E": []})
    assert independence_number(empty) == 5
    assert independence_number(C5) == 2


def test_symmetrize():
    one = digraph([("a", "b")])
    assert symmetrize(one).relations["E"] == {("a", "b"), ("b", "a")}
    assert symmetrize(symmetrize(one)) == symmetrize(one)
    tri = digraph([("a", "b"), ("b", "c"), ("c", "a")])
    assert len(symmetrize(tri).relations["E"]) == 6


def test_composition_closure():
    rng = random.Random(3)
    for _ in range(10):
        X = random_digraph(rng, 3, 4)
        Y = random_digraph(rng, 3, 4)
        Z = clique(3)
        f = find_homomorphism(X, Y)
        g = find_homomorphism(Y, Z)
        if f is None or g is None:
            continue
        assert check_homomorphism({v: g[f[v]] for v in X.domain}, X, Z)


def test_relabel_preserves_shape():
    renamed, mapping = relabel(C5, "x")
    assert len(renamed.domain) == 5
    assert chromatic_number(renamed, 5) == 3
    assert {mapping[v] for v in C5.domain} == set(renamed.domain)
