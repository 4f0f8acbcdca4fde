"""Pultr templates, the left and central functors, and quantum transfers.

A template consists of a gadget structure A, one gadget B_T per target
symbol, and homomorphisms eps_{i,T}: A -> B_T.  The central functor sends Y
to the structure of homomorphisms A -> Y; the left functor glues copies of
the gadgets along the eps maps and quotients.  The two are thin adjoints:
Lambda X -> Y iff X -> Gamma Y.

Quantum transfers follow the adjunction: towards Gamma, the projector of
(x, h) is the ordered product of the copy projectors Q[a^(x), h(a)], which
requires compatibility level (k+1) * diam(template) on the input; towards
Lambda, projectors are fibre sums and gadget products at the same level k.
All outputs are rechecked structurally (projector factors commute before
multiplying; quotient classes agree exactly), so a violated contract raises
instead of producing garbage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional, Sequence

from .qop import PMatrix, QuantumAssignment, _ProductCache
from .relstruct import (
    RelStructure,
    Signature,
    check_homomorphism,
    diameter_and_connectivity,
    enumerate_homomorphisms,
    find_homomorphism,
)


class EnumerationBudgetExceeded(Exception):
    pass


class NotConnected(Exception):
    pass


class NotFaithful(Exception):
    pass


class CompatibilityTooLow(Exception):
    pass


class WellDefinednessViolation(Exception):
    pass


@dataclass(frozen=True)
class PultrTemplate:
    """Gadget data (A, {B_T}, {eps_{i,T}}) for a (rho, tau) functor pair."""

    rho: Signature
    tau: Signature
    A: RelStructure
    B: Mapping[str, RelStructure]
    eps: Mapping[str, tuple]
    """eps[T] is a tuple of arity(T) maps, each a dict A.domain -> B_T.domain."""

    def __post_init__(self) -> None:
        if self.A.signature != self.rho:
            raise ValueError("gadget A must be a rho-structure")
        for name, arity in self.tau.symbols:
            if name not in self.B:
                raise ValueError(f"missing gadget for symbol {name!r}")
            if self.B[name].signature != self.rho:
                raise ValueError(f"gadget for {name!r} must be a rho-structure")
            maps = self.eps[name]
            if len(maps) != arity:
                raise ValueError(f"need {arity} eps maps for {name!r}")
            for m in maps:
                if not check_homomorphism(m, self.A, self.B[name]):
                    raise ValueError(f"eps map for {name!r} is not a homomorphism")


@dataclass(frozen=True)
class TemplateReport:
    connected: bool
    faithful: bool
    diameter: Optional[int]


def template_predicates(template: PultrTemplate) -> TemplateReport:
    """Connectivity (gadgets connected and every gadget tuple an eps-image),
    faithfulness (gadgets are disjoint isomorphic eps-copies of A), and the
    diameter (max gadget Gaifman diameter, defined when connected)."""
    structures = [template.A] + [template.B[name] for name, _ in template.tau.symbols]
    conn_flags = [diameter_and_connectivity(s) for s in structures]
    connected = all(flag for flag, _ in conn_flags)
    if connected:
        for name, arity in template.tau.symbols:
            bt = template.B[name]
            maps = template.eps[name]
            for rname, _ in template.rho.symbols:
                images = set()
                for i in range(arity):
                    for at in template.A.relations[rname]:
                        images.add(tuple(maps[i][a] for a in at))
                if not bt.relations[rname] <= images:
                    connected = False
                    break
            if not connected:
                break
    diameter = max(d for _, d in conn_flags) if connected and structures else None
    if diameter is not None and diameter == float("inf"):  # pragma: no cover
        diameter = None
        connected = False

    faithful = True
    for name, arity in template.tau.symbols:
        bt = template.B[name]
        maps = template.eps[name]
        images = [frozenset(maps[i].values()) for i in range(arity)]
        if any(len(img) != len(template.A.domain) for img in images):
            faithful = False
            break
        union: set = set()
        total = 0
        for img in images:
            union |= img
            total += len(img)
        if union != set(bt.domain) or total != len(bt.domain):
            faithful = False
            break
        for i in range(arity):
            img = images[i]
            for rname, _ in template.rho.symbols:
                mapped = {tuple(maps[i][a] for a in at) for at in template.A.relations[rname]}
                induced = {t for t in bt.relations[rname] if set(t) <= img}
                if mapped != induced:
                    faithful = False
                    break
            if not faithful:
                break
        if not faithful:
            break
    return TemplateReport(connected, faithful, int(diameter) if connected else None)


def _hom_key(h: Mapping, domain_order: Sequence) -> tuple:
    return tuple(h[a] for a in domain_order)


def central_apply(
    template: PultrTemplate, X: RelStructure, *, budget: Optional[int] = None
) -> RelStructure:
    """The structure of homomorphisms A -> X; a tau-tuple for every gadget
    homomorphism ell: B_T -> X, formed by the compositions ell o eps_i."""
    if X.signature != template.rho:
        raise ValueError("central functor expects a rho-structure")
    a_order = template.A.domain
    homs = enumerate_homomorphisms(template.A, X, budget=budget)
    domain = [_hom_key(h, a_order) for h in homs]
    relations: dict[str, set] = {name: set() for name, _ in template.tau.symbols}
    for name, arity in template.tau.symbols:
        maps = template.eps[name]
        for ell in enumerate_homomorphisms(template.B[name], X, budget=budget):
            relations[name].add(
                tuple(
                    tuple(ell[maps[i][a]] for a in a_order) for i in range(arity)
                )
            )
    return RelStructure(template.tau, domain, relations)


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class LambdaQuotient:
    """The glued-copy quotient underlying the left functor.

    Tags are ("A", x, a) for copy vertices of A and ("B", T, xt, b) for copy
    vertices of gadgets; each class is named by its least tag in the
    deterministic tag enumeration order."""

    template: PultrTemplate
    X: RelStructure
    tags: list
    tag_ids: dict
    class_of_id: list
    class_name: dict

    def cls(self, tag) -> Hashable:
        return self.class_name[self.class_of_id[self.tag_ids[tag]]]

    def classes(self) -> dict:
        members: dict = {}
        for tag, i in self.tag_ids.items():
            members.setdefault(self.class_name[self.class_of_id[i]], []).append(tag)
        return members


def lambda_quotient(template: PultrTemplate, X: RelStructure) -> LambdaQuotient:
    if X.signature != template.tau:
        raise ValueError("left functor expects a tau-structure")
    tags: list = []
    tag_ids: dict = {}

    def add(tag) -> int:
        if tag not in tag_ids:
            tag_ids[tag] = len(tags)
            tags.append(tag)
        return tag_ids[tag]

    for x in X.domain:
        for a in template.A.domain:
            add(("A", x, a))
    for name, arity in template.tau.symbols:
        bdom = template.B[name].domain
        for xt in sorted(X.relations[name], key=lambda t: tuple(X.index(v) for v in t)):
            for b in bdom:
                add(("B", name, xt, b))
    uf = _UnionFind(len(tags))
    for name, arity in template.tau.symbols:
        maps = template.eps[name]
        for xt in X.relations[name]:
            for j in range(arity):
                for a in template.A.domain:
                    uf.union(
                        tag_ids[("A", xt[j], a)],
                        tag_ids[("B", name, xt, maps[j][a])],
                    )
    class_of_id = [uf.find(i) for i in range(len(tags))]
    class_name: dict = {}
    for i, tag in enumerate(tags):
        root = class_of_id[i]
        if root not in class_name:
            class_name[root] = tag  # first tag in enumeration order is least
    quotient = LambdaQuotient(template, X, tags, tag_ids, class_of_id, class_name)
    return quotient


def left_apply(template: PultrTemplate, X: RelStructure) -> RelStructure:
    """Glue a copy of A per vertex and a copy of B_T per tau-tuple along the
    eps maps, and push all gadget relations to the quotient."""
    q = lambda_quotient(template, X)
    domain = []
    seen = set()
    for i, tag in enumerate(q.tags):
        name = q.class_name[q.class_of_id[i]]
        if name not in seen:
            seen.add(name)
            domain.append(name)
    relations: dict[str, set] = {name: set() for name, _ in template.rho.symbols}
    for rname, _ in template.rho.symbols:
        for at in template.A.relations[rname]:
            for x in X.domain:
                relations[rname].add(tuple(q.cls(("A", x, a)) for a in at))
        for tname, _ in template.tau.symbols:
            bt = template.B[tname]
            for xt in X.relations[tname]:
                for btuple in bt.relations[rname]:
                    relations[rname].add(
                        tuple(q.cls(("B", tname, xt, b)) for b in btuple)
                    )
    return RelStructure(template.rho, domain, relations)


def adjunction_oracle(
    template: PultrTemplate,
    X: RelStructure,
    Y: RelStructure,
    *,
    budget: Optional[int] = None,
) -> tuple[bool, bool]:
    """Decide Lambda X -> Y and X -> Gamma Y independently; the two booleans
    agree for every template, which downstream tests use as an oracle."""
    lam = left_apply(template, X)
    lam_side = find_homomorphism(lam, Y, budget=budget) is not None
    gam = central_apply(template, Y, budget=budget)
    gam_side = find_homomorphism(X, gam, budget=budget) is not None
    return lam_side, gam_side


# -- quantum transfers ------------------------------------------------------


def _present(assignment: QuantumAssignment, var) -> dict:
    return assignment.pvms[var]


def transfer_gamma(
    template: PultrTemplate,
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    quotient: Optional[LambdaQuotient] = None,
    gamma_y: Optional[RelStructure] = None,
) -> QuantumAssignment:
    """From Lambda X ~> Y at level (k+1)*diam to X ~> Gamma Y at level k.

    W[x, h] is the product of Q[a^(x), h(a)] over the gadget domain in
    canonical order; the factors' pairwise commutators are rechecked exactly
    before any product is trusted (CompatibilityTooLow on failure).
    """
    report = template_predicates(template)
    if not report.connected:
        raise NotConnected("transfer towards the central functor needs a connected template")
    q = quotient if quotient is not None else lambda_quotient(template, X)
    gy = gamma_y if gamma_y is not None else central_apply(template, Y)
    a_order = template.A.domain
    cache = _ProductCache()
    pvms: dict = {}
    for x in X.domain:
        fams = [ _present(assignment, q.cls(("A", x, a))) for a in a_order ]
        mats = [m for fam in fams for m in fam.values()]
        if not all(
            cache.commute(ma, mb) for ma, mb in itertools.combinations(mats, 2)
        ):
            raise CompatibilityTooLow(
                f"copy projectors over {x!r} do not commute; "
                f"declared level {assignment.k} is insufficient"
            )
        fam_out: dict = {}
        for h in gy.domain:
            prod: Optional[PMatrix] = None
            ok = True
            for a, y in zip(a_order, h):
                fam = _present(assignment, q.cls(("A", x, a)))
                if y not in fam:
                    ok = False
                    break
                prod = fam[y] if prod is None else prod @ fam[y]
            if ok and prod is not None and not prod.is_zero():
                fam_out[h] = prod
        pvms[x] = fam_out
    return QuantumAssignment(assignment.dim, k, pvms)


def gamma_product_for_map(
    template: PultrTemplate,
    X: RelStructure,
    assignment: QuantumAssignment,
    x,
    h: Mapping,
    *,
    quotient: Optional[LambdaQuotient] = None,
) -> PMatrix:
    """The ordered copy-projector product for an arbitrary map h: A -> Y;
    zero whenever h is not a homomorphism (a property tests rely on)."""
    q = quotient if quotient is not None else lambda_quotient(template, X)
    prod: Optional[PMatrix] = None
    for a in template.A.domain:
        fam = _present(assignment, q.cls(("A", x, a)))
        m = fam.get(h[a])
        if m is None:
            return PMatrix.zeros(assignment.dim)
        prod = m if prod is None else prod @ m
    return prod if prod is not None else PMatrix.identity(assignment.dim)


def _faithful_parts(template: PultrTemplate, name: str) -> dict:
    """For a faithful template: gadget vertex -> (part index, A-preimage)."""
    maps = template.eps[name]
    out: dict = {}
    for i, m in enumerate(maps):
        for a, b in m.items():
            out[b] = (i, a)
    return out


def transfer_lambda(
    template: PultrTemplate,
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    quotient: Optional[LambdaQuotient] = None,
) -> QuantumAssignment:
    """From X ~> Gamma Y at level k to Lambda X ~> Y at the same level.

    Copy vertices of A get fibre sums over their hom-labels; copy vertices of
    gadgets get sums of gadget products over glued label tuples that form
    homomorphisms B_T -> Y.  Every member of a quotient class is computed
    independently and compared exactly; a mismatch raises
    WellDefinednessViolation naming the class.
    """
    report = template_predicates(template)
    if not report.faithful:
        raise NotFaithful("transfer towards the left functor needs a faithful template")
    q = quotient if quotient is not None else lambda_quotient(template, X)
    a_order = template.A.domain
    a_index = {a: i for i, a in enumerate(a_order)}
    parts = {name: _faithful_parts(template, name) for name, _ in template.tau.symbols}
    dim = assignment.dim

    hom_cache: dict = {}
    product_cache: dict = {}

    def glued_is_hom(name: str, labels: tuple) -> bool:
        key = (name, labels)
        hit = hom_cache.get(key)
        if hit is not None:
            return hit
        bt = template.B[name]
        part = parts[name]
        ok = True
        for rname, _ in template.rho.symbols:
            rel = Y.relations[rname]
            for btuple in bt.relations[rname]:
                image = tuple(labels[part[b][0]][a_index[part[b][1]]] for b in btuple)
                if image not in rel:
                    ok = False
                    break
            if not ok:
                break
        hom_cache[key] = ok
        return ok

    def scope_product(xt: tuple, labels: tuple) -> PMatrix:
        key = (xt, labels)
        prod = product_cache.get(key)
        if prod is None:
            prod = _present(assignment, xt[0])[labels[0]]
            for xj, h in zip(xt[1:], labels[1:]):
                prod = prod @ _present(assignment, xj)[h]
            product_cache[key] = prod
        return prod

    def member_family(tag) -> dict:
        fam: dict = {}
        if tag[0] == "A":
            _, x, a = tag
            ai = a_index[a]
            for h, m in _present(assignment, x).items():
                y = h[ai]
                fam[y] = fam[y] + m if y in fam else m
        else:
            _, name, xt, b = tag
            part = parts[name]
            i_b, a_b = part[b]
            label_lists = [list(_present(assignment, xj).keys()) for xj in xt]
            for labels in itertools.product(*label_lists):
                if not glued_is_hom(name, labels):
                    continue
                y = labels[i_b][a_index[a_b]]
                prod = scope_product(xt, labels)
                fam[y] = fam[y] + prod if y in fam else prod
        return {y: m for y, m in fam.items() if not m.is_zero()}

    pvms: dict = {}
    for class_name, members in q.classes().items():
        first = member_family(members[0])
        for other in members[1:]:
            if member_family(other) != first:
                raise WellDefinednessViolation(
                    f"class {class_name!r}: members {members[0]!r} and {other!r} disagree"
                )
        pvms[class_name] = first
    return QuantumAssignment(dim, k, pvms)


def lambda_functor(
    template: PultrTemplate,
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    quotient_x: Optional[LambdaQuotient] = None,
    quotient_y: Optional[LambdaQuotient] = None,
    lambda_y: Optional[RelStructure] = None,
) -> tuple[QuantumAssignment, LambdaQuotient]:
    """Functorial action on quantum assignments: X ~> Y gives
    Lambda X ~> Lambda Y at the same level, via the adjunction unit
    y -> (a -> class of a^(y)) composed with the faithful transfer."""
    qy = quotient_y if quotient_y is not None else lambda_quotient(template, Y)
    a_order = template.A.domain
    unit = {y: tuple(qy.cls(("A", y, a)) for a in a_order) for y in Y.domain}
    composed: dict = {}
    for x, fam in assignment.pvms.items():
        out: dict = {}
        for y, m in fam.items():
            label = unit[y]
            out[label] = out[label] + m if label in out else m
        composed[x] = out
    lifted = QuantumAssignment(assignment.dim, assignment.k, composed)
    lam_y = lambda_y if lambda_y is not None else left_apply(template, Y)
    result = transfer_lambda(
        template, X, lam_y, lifted, k, quotient=quotient_x
    )
    return result, qy


def gamma_functor(
    template: PultrTemplate,
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    budget: Optional[int] = None,
) -> QuantumAssignment:
    """Functorial action towards the central functor: X ~> Y at level
    (k+1)*diam gives Gamma X ~> Gamma Y at level k, via the adjunction
    counit Lambda Gamma X -> X composed with the connected transfer."""
    gx = central_apply(template, X, budget=budget)
    q = lambda_quotient(template, gx)
    a_order = template.A.domain
    a_index = {a: i for i, a in enumerate(a_order)}

    witness_cache: dict = {}

    def counit_of_tag(tag):
        if tag[0] == "A":
            _, h, a = tag
            return h[a_index[a]]
        _, name, ht, b = tag
        key = (name, ht)
        ell = witness_cache.get(key)
        if ell is None:
            ell = _gadget_witness(template, name, ht, X, a_index)
            witness_cache[key] = ell
        return ell[b]

    counit: dict = {}
    for class_name, members in q.classes().items():
        images = {counit_of_tag(t) for t in members}
        if len(images) != 1:
            raise WellDefinednessViolation(
                f"adjunction counit ill-defined on class {class_name!r}"
            )
        counit[class_name] = images.pop()

    composed = {
        z: dict(assignment.pvms[xv]) for z, xv in counit.items()
    }
    lifted = QuantumAssignment(assignment.dim, assignment.k, composed)
    return transfer_gamma(template, gx, Y, lifted, k, quotient=q)


def _gadget_witness(
    template: PultrTemplate, name: str, ht: tuple, X: RelStructure, a_index: dict
):
    """A homomorphism ell: B_T -> X with ell o eps_i equal to the i-th
    component of the tau-tuple ht of Gamma X; ht is in the relation, so a
    witness exists.  Vertices covered by eps images are forced; the rest are
    found by constrained search, canonically-first."""
    bt = template.B[name]
    maps = template.eps[name]
    forced: dict = {}
    for i, m in enumerate(maps):
        for a, b in m.items():
            want = ht[i][a_index[a]]
            if forced.get(b, want) != want:
                raise WellDefinednessViolation(
                    f"incompatible eps images while gluing {name!r}"
                )
            forced[b] = want
    free = [b for b in bt.domain if b not in forced]
    if not free:
        if not check_homomorphism(forced, bt, X):
            raise WellDefinednessViolation(f"no gadget witness for {name!r} tuple")
        return forced
    for h in enumerate_homomorphisms(bt, X):
        if all(h[b] == forced[b] for b in forced):
            return h
    raise WellDefinednessViolation(f"no gadget witness for {name!r} tuple")
