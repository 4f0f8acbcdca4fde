"""Seeded generators and independent brute-force oracles for the tests.

The oracles never share code paths with the implementations they check:
homomorphism existence enumerates all maps, subspace facts enumerate all
member vectors, and functional extensions try every candidate value table.
"""

from __future__ import annotations

import itertools
import random

from chromagap.relstruct import GRAPH_SIGNATURE, RelStructure, Signature
from chromagap.pultr import PultrTemplate


def brute_force_hom_exists(X: RelStructure, Y: RelStructure) -> bool:
    """Try every map domain(X) -> domain(Y)."""
    for images in itertools.product(Y.domain, repeat=len(X.domain)):
        f = dict(zip(X.domain, images))
        ok = True
        for name, t in X.all_tuples():
            if tuple(f[v] for v in t) not in Y.relations[name]:
                ok = False
                break
        if ok:
            return True
    return False


def brute_force_all_homs(X: RelStructure, Y: RelStructure) -> list[dict]:
    out = []
    for images in itertools.product(Y.domain, repeat=len(X.domain)):
        f = dict(zip(X.domain, images))
        if all(
            tuple(f[v] for v in t) in Y.relations[name] for name, t in X.all_tuples()
        ):
            out.append(f)
    return out


def random_digraph(rng: random.Random, max_vertices: int = 4, max_edges: int = 5) -> RelStructure:
    n = rng.randint(1, max_vertices)
    dom = [f"v{i}" for i in range(n)]
    edges = set()
    for _ in range(rng.randint(0, max_edges)):
        edges.add((rng.choice(dom), rng.choice(dom)))
    return RelStructure(GRAPH_SIGNATURE, dom, {"E": edges})


def random_structure(rng: random.Random, sig: Signature, max_vertices: int = 4) -> RelStructure:
    n = rng.randint(1, max_vertices)
    dom = [f"v{i}" for i in range(n)]
    rels = {}
    for name, arity in sig.symbols:
        count = rng.randint(0, 4)
        rels[name] = {
            tuple(rng.choice(dom) for _ in range(arity)) for _ in range(count)
        }
    return RelStructure(sig, dom, rels)


def random_template(rng: random.Random) -> PultrTemplate:
    """A small random template: gadgets are copies of a random connected A
    with random extra identifications and tuples, so both connected and
    faithful instances appear in the mix."""
    rho = GRAPH_SIGNATURE
    n_a = rng.randint(1, 3)
    a_dom = [f"a{i}" for i in range(n_a)]
    a_edges = set()
    for i in range(1, n_a):  # random tree keeps A connected
        a_edges.add((a_dom[rng.randrange(i)], a_dom[i]))
    if n_a > 1 and rng.random() < 0.5:
        a_edges.add((rng.choice(a_dom), rng.choice(a_dom)))
    A = RelStructure(rho, a_dom, {"E": a_edges})

    tau_names = ["S"] if rng.random() < 0.7 else ["S", "T"]
    tau = Signature(tuple((name, rng.randint(1, 2)) for name in tau_names))
    gadgets = {}
    eps = {}
    for name, arity in tau.symbols:
        copies = [[(name, i, a) for a in a_dom] for i in range(arity)]
        merged = {v: v for copy in copies for v in copy}
        # glue the copies at one random vertex pair each so they connect
        for i in range(1, arity):
            va = copies[0][rng.randrange(n_a)]
            vb = copies[i][rng.randrange(n_a)]
            merged[vb] = merged[va]
        dom = sorted({merged[v] for copy in copies for v in copy})
        edges = set()
        for i in range(arity):
            for (x, y) in a_edges:
                edges.add(
                    (merged[(name, i, x)], merged[(name, i, y)])
                )
        B = RelStructure(rho, dom, {"E": edges})
        gadgets[name] = B
        eps[name] = tuple(
            {a: merged[(name, i, a)] for a in a_dom} for i in range(arity)
        )
    return PultrTemplate(rho, tau, A, gadgets, eps)


def random_faithful_template(rng: random.Random) -> PultrTemplate:
    """Gadgets are disjoint copies of A: faithful by construction."""
    rho = GRAPH_SIGNATURE
    n_a = rng.randint(1, 3)
    a_dom = [f"a{i}" for i in range(n_a)]
    a_edges = set()
    for _ in range(rng.randint(0, 3)):
        a_edges.add((rng.choice(a_dom), rng.choice(a_dom)))
    A = RelStructure(rho, a_dom, {"E": a_edges})
    tau = Signature((("S", rng.randint(1, 2)),))
    name, arity = tau.symbols[0]
    dom = [(i, a) for i in range(arity) for a in a_dom]
    edges = {((i, x), (i, y)) for i in range(arity) for (x, y) in a_edges}
    B = RelStructure(rho, dom, {"E": edges})
    eps = {name: tuple({a: (i, a) for a in a_dom} for i in range(arity))}
    return PultrTemplate(rho, tau, A, {name: B}, {name: eps[name]})


def structure_with_hom_from(rng: random.Random, X: RelStructure, size: int = 3) -> tuple[RelStructure, dict]:
    """A target structure built as the image closure of a random map from X,
    plus that map (a homomorphism by construction)."""
    dom = [f"y{i}" for i in range(size)]
    f = {v: rng.choice(dom) for v in X.domain}
    rels = {}
    for name, arity in X.signature.symbols:
        image = {tuple(f[v] for v in t) for t in X.relations[name]}
        for _ in range(rng.randint(0, 2)):
            image.add(tuple(rng.choice(dom) for _ in range(arity)))
        rels[name] = image
    return RelStructure(X.signature, dom, rels), f


def uniform_instance(variables, alphabet, constraints):
    from chromagap.csp import CspInstance

    return CspInstance(variables, alphabet, constraints)
