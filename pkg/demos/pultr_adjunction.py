"""Pultr functors: the adjunction as an executable oracle, and quantum
transfers of classical colourings through the line-digraph template."""

import random

from chromagap import colouring, pultr, qop
from chromagap.relstruct import GRAPH_SIGNATURE, RelStructure, clique, digraph, find_homomorphism

template = colouring.linedigraph_template()
print("line-digraph template:", pultr.template_predicates(template))

C5 = digraph([(f"v{i}", f"v{(i + 1) % 5}") for i in range(5)])
print("oracle on (C5, K2):", pultr.adjunction_oracle(template, C5, clique(2)))
print("oracle on (C5, K3):", pultr.adjunction_oracle(template, C5, clique(3)))

rng = random.Random(0)
agreements = 0
for _ in range(30):
    x_dom = [f"x{i}" for i in range(rng.randint(1, 4))]
    X = RelStructure(
        GRAPH_SIGNATURE,
        x_dom,
        {"E": {(rng.choice(x_dom), rng.choice(x_dom)) for _ in range(rng.randint(0, 4))}},
    )
    y_dom = [f"y{i}" for i in range(rng.randint(1, 4))]
    Y = RelStructure(
        GRAPH_SIGNATURE,
        y_dom,
        {"E": {(rng.choice(y_dom), rng.choice(y_dom)) for _ in range(rng.randint(0, 5))}},
    )
    lam, gam = pultr.adjunction_oracle(template, X, Y)
    assert lam == gam
    agreements += 1
print(f"both adjunction sides agreed on {agreements}/30 random cases")

# a classical 4-colouring of a digraph, pushed to its line digraph
X = digraph([("a", "b"), ("b", "c"), ("c", "a"), ("b", "d")])
f = find_homomorphism(X, clique(4))
out = colouring.linedigraph_quantum_transfer(X, clique(4), qop.lift_classical(f), 1)
dx = colouring.line_digraph(X)
dk4 = colouring.line_digraph(clique(4))
print(
    "line-digraph transfer of a classical colouring:",
    qop.verify_assignment(dx, dk4, out, 1).summary(),
)
