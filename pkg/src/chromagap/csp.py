"""Weighted CSP instances, exact sat/isat values, and label-cover analysis.

An instance holds a multiset of constraints (scope, allowed-tuple set, weight).
Weights are exact rationals normalised to sum 1 on ingestion; zero or negative
weights are rejected.  The structure pair view (`to_structures`) bridges to the
homomorphism machinery in `relstruct`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .relstruct import (
    RelStructure,
    SearchBudgetExceeded,
    Signature,
    SignatureMismatch,
)

Label = Hashable
Var = Hashable


class NotBinary(Exception):
    pass


@dataclass(frozen=True)
class Constraint:
    scope: tuple
    allowed: frozenset
    weight: Fraction

    @property
    def arity(self) -> int:
        return len(self.scope)


class CspInstance:
    """Variables, a constraint multiset, an alphabet, and exact weights."""

    __slots__ = ("variables", "alphabet", "constraints", "_var_index", "_adj")

    def __init__(
        self,
        variables: Iterable[Var],
        alphabet: Iterable[Label],
        constraints: Iterable[tuple],
        weights: Optional[Sequence[Fraction]] = None,
    ) -> None:
        self.variables = tuple(dict.fromkeys(variables))
        self.alphabet = tuple(dict.fromkeys(alphabet))
        self._var_index = {v: i for i, v in enumerate(self.variables)}
        raw = []
        for scope, allowed in constraints:
            scope = tuple(scope)
            for v in scope:
                if v not in self._var_index:
                    raise ValueError(f"scope entry {v!r} is not a variable")
            allowed = frozenset(tuple(t) for t in allowed)
            for t in allowed:
                if len(t) != len(scope):
                    raise ValueError("allowed tuple arity does not match scope")
                for a in t:
                    if a not in self.alphabet:
                        raise ValueError(f"allowed entry {a!r} not in alphabet")
            raw.append((scope, allowed))
        if weights is None:
            n = len(raw)
            ws = [Fraction(1, n) for _ in raw] if n else []
        else:
            ws = [Fraction(w) for w in weights]
            if len(ws) != len(raw):
                raise ValueError("one weight per constraint required")
            if any(w <= 0 for w in ws):
                raise ValueError("weights must be strictly positive")
            total = sum(ws, Fraction(0))
            ws = [w / total for w in ws]
        self.constraints = tuple(
            Constraint(scope, allowed, w) for (scope, allowed), w in zip(raw, ws)
        )
        self._adj: Optional[dict] = None

    def __repr__(self) -> str:
        return (
            f"CspInstance(|X|={len(self.variables)}, |A|={len(self.alphabet)}, "
            f"|E|={len(self.constraints)})"
        )

    def is_binary(self) -> bool:
        return all(c.arity == 2 for c in self.constraints)

    def gaifman_adjacency(self) -> dict:
        if self._adj is None:
            adj: dict = {v: set() for v in self.variables}
            for c in self.constraints:
                for a in c.scope:
                    for b in c.scope:
                        if a != b:
                            adj[a].add(b)
            self._adj = adj
        return self._adj

    def gaifman_distance(self, u: Var, v: Var):
        if u == v:
            return 0
        adj = self.gaifman_adjacency()
        dist = {u: 0}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for x in adj[w]:
                if x not in dist:
                    dist[x] = dist[w] + 1
                    if x == v:
                        return dist[x]
                    queue.append(x)
        return float("inf")

    def value_of(self, f: Mapping) -> Fraction:
        """Weighted satisfied fraction of the classical assignment f."""
        total = Fraction(0)
        for c in self.constraints:
            if tuple(f[v] for v in c.scope) in c.allowed:
                total += c.weight
        return total


def sat_value(inst: CspInstance, budget: Optional[int] = None) -> Fraction:
    """Exact maximum weighted satisfied fraction over classical assignments.

    Branch and bound over the variables in canonical order: a branch is cut
    when even satisfying every still-undecided constraint cannot beat the
    incumbent.  `budget` caps the number of search nodes.
    """
    variables = inst.variables
    pos = {v: i for i, v in enumerate(variables)}
    decided_at: list[list[Constraint]] = [[] for _ in variables]
    for c in inst.constraints:
        if c.scope:
            decided_at[max(pos[v] for v in c.scope)].append(c)
    pending_after = [Fraction(0)] * (len(variables) + 1)
    for i in range(len(variables) - 1, -1, -1):
        pending_after[i] = pending_after[i + 1] + sum(
            (c.weight for c in decided_at[i]), Fraction(0)
        )
    best = Fraction(0)
    assignment: dict = {}
    nodes = 0

    def bt(i: int, current: Fraction) -> None:
        nonlocal best, nodes
        if i == len(variables):
            if current > best:
                best = current
            return
        if current + pending_after[i] <= best:
            return
        v = variables[i]
        for a in inst.alphabet:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"sat search exceeded {budget} nodes")
            assignment[v] = a
            gained = sum(
                (c.weight for c in decided_at[i]
                 if tuple(assignment[u] for u in c.scope) in c.allowed),
                Fraction(0),
            )
            bt(i + 1, current + gained)
            del assignment[v]

    if not inst.variables:
        return Fraction(1) if not inst.constraints else Fraction(0)
    bt(0, Fraction(0))
    return best


def _subsets_at_most(alphabet: Sequence, t: int) -> list[frozenset]:
    out = [frozenset()]
    for size in range(1, t + 1):
        out.extend(frozenset(c) for c in itertools.combinations(alphabet, size))
    return out


def isat_value(inst: CspInstance, t: int, budget: Optional[int] = None) -> Fraction:
    """Largest relative size of a variable set whose induced constraints are
    satisfiable by an assignment of at-most-t-element label sets.

    A binary constraint is satisfied by set-valued f when some allowed pair
    (a, b) has a in f(x1) and b in f(x2).  Constraints are induced by S when
    both scope endpoints lie in S.  Searches subsets by descending size with
    forward pruning; exact within the node budget.
    """
    if not inst.is_binary():
        raise NotBinary("isat is defined for binary instances only")
    variables = inst.variables
    n = len(variables)
    if n == 0:
        return Fraction(1)
    choices = _subsets_at_most(inst.alphabet, t)
    by_pair: dict[tuple, list[frozenset]] = {}
    for c in inst.constraints:
        by_pair.setdefault(c.scope, []).append(c.allowed)
    nodes = 0

    def compatible(sx: frozenset, sy: frozenset, allowed: frozenset) -> bool:
        return any(a in sx and b in sy for (a, b) in allowed)

    def satisfiable(S: tuple) -> bool:
        nonlocal nodes
        inside = set(S)
        order = {v: i for i, v in enumerate(S)}
        # constraints checked when their later endpoint gets its label set
        relevant: dict[Var, list[tuple[Var, frozenset, bool]]] = {v: [] for v in S}
        for (x, y), alloweds in by_pair.items():
            if x in inside and y in inside:
                later, earlier = (y, x) if order[x] <= order[y] else (x, y)
                for allowed in alloweds:
                    relevant[later].append((earlier, allowed, later is y))
        chosen: dict[Var, frozenset] = {}

        def bt(i: int) -> bool:
            nonlocal nodes
            if i == len(S):
                return True
            v = S[i]
            for sv in choices:
                nodes += 1
                if budget is not None and nodes > budget:
                    raise SearchBudgetExceeded(f"isat search exceeded {budget} nodes")
                ok = True
                for earlier, allowed, v_is_second in relevant[v]:
                    if earlier == v:
                        sx = sy = sv  # self-pair constraint (x, x)
                    else:
                        other = chosen[earlier]
                        sx, sy = (other, sv) if v_is_second else (sv, other)
                    if not compatible(sx, sy, allowed):
                        ok = False
                        break
                if ok:
                    chosen[v] = sv
                    if bt(i + 1):
                        return True
                    del chosen[v]
            return False

        return bt(0)

    for size in range(n, -1, -1):
        for S in itertools.combinations(variables, size):
            if satisfiable(S):
                return Fraction(size, n)
    return Fraction(0)


@dataclass(frozen=True)
class DtoDCertificate:
    m: int
    d: int
    permutations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    """Per-constraint (mu, nu): position -> alphabet index, block i occupies
    positions [d*i, d*i + d)."""


@dataclass(frozen=True)
class LabelCoverProfile:
    bipartite: Optional[tuple[frozenset, frozenset]] = None
    projective: Optional[tuple[frozenset, frozenset]] = None
    d_to_1: Optional[int] = None
    d_to_d: Optional[DtoDCertificate] = None


def _bipartite_split(inst: CspInstance) -> Optional[tuple[frozenset, frozenset]]:
    """Orient every scope left-to-right; propagate sides per component."""
    side: dict = {}
    adj: dict = {v: [] for v in inst.variables}
    for c in inst.constraints:
        x, y = c.scope
        if x == y:
            return None
        adj[x].append((y, 1))
        adj[y].append((x, 0))
    # Seed each component from a vertex that occurs first in some scope when
    # possible, so orientation and 2-colouring are decided together.
    firsts = {c.scope[0] for c in inst.constraints}
    for v in inst.variables:
        if v in side:
            continue
        side[v] = 0 if (v in firsts or not adj[v]) else 1
        queue = deque([v])
        while queue:
            w = queue.popleft()
            for u, s in adj[w]:
                # s == 1: scope (w, u) forces side[w]=0, side[u]=1;
                # s == 0: scope (u, w) forces side[w]=1, side[u]=0.
                expect_w = 0 if s == 1 else 1
                if side[w] != expect_w:
                    return None
                expect_u = 1 - expect_w
                if u in side:
                    if side[u] != expect_u:
                        return None
                else:
                    side[u] = expect_u
                    queue.append(u)
    left = frozenset(v for v in inst.variables if side.get(v, 0) == 0)
    right = frozenset(v for v in inst.variables if side.get(v) == 1)
    return left, right


def _projective_split(inst: CspInstance) -> Optional[tuple[frozenset, frozenset, int]]:
    first = set()
    second = set()
    for c in inst.constraints:
        for (a, b) in c.allowed:
            first.add(a)
            second.add(b)
    if first & second or (first | second) != set(inst.alphabet):
        return None
    d = None
    for c in inst.constraints:
        partners = {a: [b for (aa, b) in c.allowed if aa == a] for a in first}
        if any(len(v) != 1 for v in partners.values()):
            return None
        fibres = {b: [a for (a, bb) in c.allowed if bb == b] for b in second}
        sizes = {len(v) for v in fibres.values()}
        if len(sizes) != 1:
            return None
        this_d = sizes.pop()
        if d is None:
            d = this_d
        elif d != this_d:
            return None
    if d is None:
        return None
    return frozenset(first), frozenset(second), d


def _d_to_d_certificate(inst: CspInstance) -> Optional[DtoDCertificate]:
    """Factor every predicate as block-diagonal J_d blocks under permutations.

    mu and nu are canonicalised least-lexicographically: blocks in order of
    their smallest row index, rows and columns ascending inside each block.
    """
    alpha_index = {a: i for i, a in enumerate(inst.alphabet)}
    n = len(inst.alphabet)
    perms = []
    md = None
    for c in inst.constraints:
        rows: dict[int, set[int]] = {i: set() for i in range(n)}
        for (a, b) in c.allowed:
            rows[alpha_index[a]].add(alpha_index[b])
        supports = [frozenset(rows[i]) for i in range(n)]
        sizes = {len(s) for s in supports}
        if len(sizes) != 1:
            return None
        d = sizes.pop()
        if d == 0 or n % d != 0:
            return None
        m = n // d
        groups: dict[frozenset, list[int]] = {}
        for i, s in enumerate(supports):
            groups.setdefault(s, []).append(i)
        if len(groups) != m or any(len(g) != d for g in groups.values()):
            return None
        cols_seen = set().union(*groups.keys()) if groups else set()
        if cols_seen != set(range(n)):
            return None
        if any(len(s) != d for s in groups.keys()):
            return None
        blocks = sorted(groups.items(), key=lambda kv: min(kv[1]))
        mu: list[int] = []
        nu: list[int] = []
        for support, row_group in blocks:
            mu.extend(sorted(row_group))
            nu.extend(sorted(support))
        if md is None:
            md = (m, d)
        elif md != (m, d):
            return None
        # re-expansion check: (a, b) allowed iff positions in the same block
        mu_inv = {inst.alphabet[a]: p for p, a in enumerate(mu)}
        nu_inv = {inst.alphabet[b]: p for p, b in enumerate(nu)}
        rebuilt = frozenset(
            (a, b)
            for a in inst.alphabet
            for b in inst.alphabet
            if mu_inv[a] // d == nu_inv[b] // d
        )
        if rebuilt != c.allowed:
            return None
        perms.append((tuple(mu), tuple(nu)))
    if md is None:
        return None
    return DtoDCertificate(md[0], md[1], tuple(perms))


def classify_label_cover(inst: CspInstance) -> LabelCoverProfile:
    """Detect bipartite, projective, d-to-1 and d-to-d certificates.

    Every reported flag is backed by a verified certificate: the d-to-d
    permutations re-expand to the predicate bit-exactly.
    """
    if not inst.is_binary():
        raise NotBinary("label-cover classification needs binary constraints")
    bip = _bipartite_split(inst)
    proj = _projective_split(inst)
    projective = (proj[0], proj[1]) if proj else None
    d_to_1 = proj[2] if (proj and bip) else None
    return LabelCoverProfile(
        bipartite=bip,
        projective=projective,
        d_to_1=d_to_1,
        d_to_d=_d_to_d_certificate(inst),
    )


def augment_k(inst: CspInstance, k: int) -> CspInstance:
    """Add a full-predicate binary constraint for every distinct variable pair
    at Gaifman distance <= k; halve original weights, spread the other half
    uniformly over the new constraints."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pairs = []
    for i, x in enumerate(inst.variables):
        for y in inst.variables[i + 1:]:
            dist = inst.gaifman_distance(x, y)
            if dist <= k:
                pairs.append((x, y))
    if not pairs:
        return CspInstance(
            inst.variables,
            inst.alphabet,
            [(c.scope, c.allowed) for c in inst.constraints],
            [c.weight for c in inst.constraints],
        )
    full = frozenset(itertools.product(inst.alphabet, inst.alphabet))
    alpha = len(pairs)
    scopes = [(c.scope, c.allowed) for c in inst.constraints]
    weights = [c.weight / 2 for c in inst.constraints]
    for p in pairs:
        scopes.append((p, full))
        weights.append(Fraction(1, 2 * alpha))
    return CspInstance(inst.variables, inst.alphabet, scopes, weights)


def to_structures(inst: CspInstance) -> tuple[RelStructure, RelStructure]:
    """Split an instance into (variable-side, alphabet-side) structures.

    One symbol per distinct predicate table, named by first occurrence.
    Constraint multiplicity and weights collapse; they are irrelevant to
    perfect-assignment semantics.
    """
    tables: dict[tuple[int, frozenset], str] = {}
    x_rels: dict[str, set] = {}
    a_rels: dict[str, set] = {}
    for c in inst.constraints:
        key = (c.arity, c.allowed)
        if key not in tables:
            name = f"R{len(tables)}"
            tables[key] = name
            x_rels[name] = set()
            a_rels[name] = set(c.allowed)
        x_rels[tables[key]].add(c.scope)
    sig = Signature(tuple((name, ar) for (ar, _), name in tables.items()))
    X = RelStructure(sig, inst.variables, x_rels)
    A = RelStructure(sig, inst.alphabet, a_rels)
    return X, A


def from_structures(
    X: RelStructure,
    A: RelStructure,
    weights: Optional[Mapping[tuple[str, tuple], Fraction]] = None,
) -> CspInstance:
    """Rebuild the CSP whose scopes are X's tuples and whose predicate tables
    are A's relations; `weights` may assign a positive rational per (symbol,
    scope), defaulting to uniform."""
    if X.signature != A.signature:
        raise SignatureMismatch("variable and alphabet structures must share a signature")
    scopes = []
    ws = [] if weights is not None else None
    for name in X.signature.names():
        for t in sorted(X.relations[name], key=lambda t: tuple(X.index(v) for v in t)):
            scopes.append((t, A.relations[name]))
            if ws is not None:
                ws.append(Fraction(weights[(name, t)]))
    return CspInstance(X.domain, A.domain, scopes, ws)
