"""Finite relational structures, homomorphism search, and graph utilities.

Structures are immutable: a signature (named symbols with arities), an ordered
vertex domain, and one set of tuples per symbol.  Everything downstream
(CSP instances, Pultr functors, quantum-assignment verification) is keyed by
these objects, so all searches here iterate in the canonical domain order and
return deterministic results.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence

Vertex = Hashable

INFINITY = float("inf")


class SignatureMismatch(Exception):
    pass


class PartialMap(Exception):
    pass


class UnknownVertex(Exception):
    pass


class NotAGraphSignature(Exception):
    pass


class SearchBudgetExceeded(Exception):
    pass


class _AboveCap:
    """Sentinel returned when an exact search exhausts its colour cap."""

    def __repr__(self) -> str:  # pragma: no cover
        return "AboveCap"


ABOVE_CAP = _AboveCap()


@dataclass(frozen=True)
class Signature:
    """A finite set of relation symbols with positive arities."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("relation symbol names must be unique")
        for name, arity in self.symbols:
            if arity < 1:
                raise ValueError(f"arity of {name!r} must be >= 1")

    def arity(self, name: str) -> int:
        for sym, ar in self.symbols:
            if sym == name:
                return ar
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)


GRAPH_SIGNATURE = Signature((("E", 2),))


class RelStructure:
    """A finite relational structure over a fixed signature.

    The domain order is canonical: searches and enumerations iterate vertices
    in this order, which makes every result of this module reproducible.
    Relation sets are duplicate-free; constraint multiplicity belongs to CSP
    instances, not to structures.
    """

    __slots__ = ("signature", "domain", "relations", "_index", "_gaifman")

    def __init__(
        self,
        signature: Signature,
        domain: Iterable[Vertex],
        relations: Mapping[str, Iterable[tuple]],
    ) -> None:
        self.signature = signature
        dom: list[Vertex] = []
        seen = set()
        for v in domain:
            if v not in seen:
                seen.add(v)
                dom.append(v)
        self.domain = tuple(dom)
        self._index = {v: i for i, v in enumerate(self.domain)}
        rels: dict[str, frozenset] = {}
        for name, arity in signature.symbols:
            tuples = frozenset(tuple(t) for t in relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t!r} has wrong arity for {name!r}")
                for entry in t:
                    if entry not in seen:
                        raise ValueError(f"tuple entry {entry!r} not in domain")
            rels[name] = tuples
        unknown = set(relations) - set(signature.names())
        if unknown:
            raise ValueError(f"relations for unknown symbols: {sorted(map(str, unknown))}")
        self.relations = rels
        self._gaifman: Optional[dict] = None

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(repr(v)) from None

    def __contains__(self, v: Vertex) -> bool:
        return v in self._index

    def tuples(self, name: str) -> frozenset:
        return self.relations[name]

    def all_tuples(self) -> Iterable[tuple[str, tuple]]:
        for name in self.signature.names():
            for t in self.relations[name]:
                yield name, t

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RelStructure)
            and self.signature == other.signature
            and set(self.domain) == set(other.domain)
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return hash((self.signature, frozenset(self.domain)))

    def __repr__(self) -> str:
        sizes = {name: len(ts) for name, ts in self.relations.items()}
        return f"RelStructure(|domain|={len(self.domain)}, tuples={sizes})"

    # -- Gaifman graph -------------------------------------------------

    def gaifman_adjacency(self) -> dict:
        """Adjacency lists of the Gaifman graph (co-occurrence in a tuple)."""
        if self._gaifman is None:
            adj: dict = {v: set() for v in self.domain}
            for _, t in self.all_tuples():
                for a in t:
                    for b in t:
                        if a != b:
                            adj[a].add(b)
            self._gaifman = {v: tuple(sorted(ns, key=self.index)) for v, ns in adj.items()}
        return self._gaifman

    def is_graph(self) -> bool:
        return len(self.signature.symbols) == 1 and self.signature.symbols[0][1] == 2

    def graph_symbol(self) -> str:
        if not self.is_graph():
            raise NotAGraphSignature(str(self.signature))
        return self.signature.symbols[0][0]


def check_homomorphism(f: Mapping, X: RelStructure, Y: RelStructure) -> bool:
    """Return True iff f maps every tuple of X into the matching relation of Y.

    Raises PartialMap if f misses a vertex of X and SignatureMismatch if the
    two structures disagree on the signature.
    """
    if X.signature != Y.signature:
        raise SignatureMismatch("structures have different signatures")
    for v in X.domain:
        if v not in f:
            raise PartialMap(repr(v))
        if f[v] not in Y:
            raise UnknownVertex(repr(f[v]))
    for name, t in X.all_tuples():
        if tuple(f[v] for v in t) not in Y.relations[name]:
            return False
    return True


def _search_homomorphisms(
    X: RelStructure,
    Y: RelStructure,
    *,
    order: Optional[Sequence[Vertex]] = None,
    fixed: Optional[Mapping] = None,
    limit: Optional[int] = None,
    budget: Optional[int] = None,
):
    """Backtracking with forward checking; yields maps in lexicographic order.

    Variables are assigned in `order` (domain order by default); candidate
    labels are tried in Y's domain order, so the first map produced is the
    canonically-least homomorphism for that order.
    """
    if X.signature != Y.signature:
        raise SignatureMismatch("structures have different signatures")
    var_order = list(order) if order is not None else list(X.domain)
    pos = {v: i for i, v in enumerate(var_order)}
    n = len(var_order)

    # Constraints indexed by the position at which they become fully assigned,
    # plus (tuple, slot) pairs for forward checking.
    full_at: list[list[tuple[str, tuple]]] = [[] for _ in range(n)]
    touching: dict[Vertex, list[tuple[str, tuple]]] = {v: [] for v in var_order}
    for name, t in X.all_tuples():
        last = max(pos[v] for v in t)
        full_at[last].append((name, t))
        for v in set(t):
            touching[v].append((name, t))

    y_dom = list(Y.domain)
    candidates: dict[Vertex, list] = {v: list(y_dom) for v in var_order}
    assignment: dict = {}
    if fixed:
        for v, y in fixed.items():
            candidates[v] = [y]

    nodes = 0
    found = 0

    def consistent_tuple(name: str, t: tuple) -> bool:
        return tuple(assignment[v] for v in t) in Y.relations[name]

    def propagate(v: Vertex) -> tuple[list[tuple[Vertex, list]], bool]:
        """Forward-check tuples touching v with exactly one unassigned slot."""
        trimmed: list[tuple[Vertex, list]] = []
        for name, t in touching[v]:
            unassigned = [u for u in set(t) if u not in assignment]
            if len(unassigned) != 1:
                continue
            u = unassigned[0]
            rel = Y.relations[name]
            ok = []
            for y in candidates[u]:
                image = tuple(y if w == u else assignment[w] for w in t)
                if image in rel:
                    ok.append(y)
            if len(ok) < len(candidates[u]):
                trimmed.append((u, candidates[u]))
                candidates[u] = ok
                if not ok:
                    return trimmed, True
        return trimmed, False

    def undo(trimmed: list[tuple[Vertex, list]]) -> None:
        # restore in reverse: one propagate call can trim the same variable
        # twice, and forward order would resurrect the intermediate list
        for u, old in reversed(trimmed):
            candidates[u] = old

    # iterative depth-first search; recursion would overflow on the large
    # structures produced by iterated constructions
    if n == 0:
        yield {}
        return
    iters: list = [None] * n
    trims: list = [None] * n
    iters[0] = iter(list(candidates[var_order[0]]))
    i = 0
    while i >= 0:
        v = var_order[i]
        descended = False
        for y in iters[i]:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"homomorphism search exceeded {budget} nodes")
            assignment[v] = y
            if not all(consistent_tuple(name, t) for name, t in full_at[i]):
                del assignment[v]
                continue
            trimmed, dead = propagate(v)
            if dead:
                undo(trimmed)
                del assignment[v]
                continue
            if i == n - 1:
                found += 1
                yield dict(assignment)
                undo(trimmed)
                del assignment[v]
                if limit is not None and found >= limit:
                    return
                continue
            trims[i] = trimmed
            i += 1
            iters[i] = iter(list(candidates[var_order[i]]))
            descended = True
            break
        if not descended:
            i -= 1
            if i >= 0:
                undo(trims[i])
                trims[i] = None
                del assignment[var_order[i]]


def find_homomorphism(
    X: RelStructure,
    Y: RelStructure,
    *,
    order: Optional[Sequence[Vertex]] = None,
    budget: Optional[int] = None,
) -> Optional[dict]:
    """Return the canonically-least homomorphism X -> Y, or None."""
    for f in _search_homomorphisms(X, Y, order=order, limit=1, budget=budget):
        return f
    return None


def enumerate_homomorphisms(
    X: RelStructure,
    Y: RelStructure,
    *,
    budget: Optional[int] = None,
) -> list[dict]:
    """All homomorphisms X -> Y in canonical (lexicographic) order."""
    return list(_search_homomorphisms(X, Y, budget=budget))


def gaifman_distance(X: RelStructure, u: Vertex, v: Vertex):
    """BFS distance between u and v in the Gaifman graph; inf if disconnected."""
    X.index(u)
    X.index(v)
    if u == v:
        return 0
    adj = X.gaifman_adjacency()
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
    return INFINITY


def gaifman_balls(X: RelStructure, radius: int) -> dict:
    """For each vertex, the set of vertices within `radius` Gaifman steps."""
    adj = X.gaifman_adjacency()
    balls = {}
    for v in X.domain:
        seen = {v}
        frontier = [v]
        for _ in range(radius):
            nxt = []
            for w in frontier:
                for x in adj[w]:
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        balls[v] = seen
    return balls


def diameter_and_connectivity(X: RelStructure) -> tuple[bool, object]:
    """(connected, diameter); diameter is inf when disconnected."""
    if not X.domain:
        return True, 0
    adj = X.gaifman_adjacency()
    diameter = 0
    for v in X.domain:
        dist = {v: 0}
        queue = deque([v])
        while queue:
            w = queue.popleft()
            for x in adj[w]:
                if x not in dist:
                    dist[x] = dist[w] + 1
                    queue.append(x)
        if len(dist) < len(X.domain):
            return False, INFINITY
        diameter = max(diameter, max(dist.values()))
    return True, diameter


def clique(n: int) -> RelStructure:
    """The n-clique: both orientations of every pair of distinct vertices."""
    if n < 1:
        raise ValueError("clique size must be >= 1")
    dom = [f"k{i}" for i in range(n)]
    edges = [(a, b) for a in dom for b in dom if a != b]
    return RelStructure(GRAPH_SIGNATURE, dom, {"E": edges})


def symmetrize(D: RelStructure) -> RelStructure:
    """Close the single binary relation of a digraph under tuple reversal."""
    sym = D.graph_symbol()
    edges = set(D.relations[sym])
    edges |= {(b, a) for (a, b) in edges}
    return RelStructure(D.signature, D.domain, {sym: edges})


def chromatic_number(G: RelStructure, cap: int, *, budget: Optional[int] = None):
    """Least n <= cap with a homomorphism G -> K_n, else the ABOVE_CAP sentinel.

    Exact search: vertices are coloured in descending Gaifman-degree order
    with new-colour symmetry breaking, which is sound for clique targets.
    """
    sym = G.graph_symbol()
    adj = G.gaifman_adjacency()
    loops = any(a == b for (a, b) in G.relations[sym])
    if loops:
        return ABOVE_CAP
    order = sorted(G.domain, key=lambda v: (-len(adj[v]), G.index(v)))
    colour: dict = {}
    nodes = 0

    def colourable(k: int) -> bool:
        nonlocal nodes
        colour.clear()

        def bt(i: int, used: int) -> bool:
            nonlocal nodes
            if i == len(order):
                return True
            v = order[i]
            forbidden = {colour[u] for u in adj[v] if u in colour}
            for c in range(min(k, used + 1)):
                nodes += 1
                if budget is not None and nodes > budget:
                    raise SearchBudgetExceeded(f"colouring search exceeded {budget} nodes")
                if c in forbidden:
                    continue
                colour[v] = c
                if bt(i + 1, max(used, c + 1)):
                    return True
                del colour[v]
            return False

        return bt(0, 0)

    for k in range(1, cap + 1):
        if colourable(k):
            return k
    return ABOVE_CAP


def independence_number(G: RelStructure, cap: Optional[int] = None, *, budget: Optional[int] = None) -> int:
    """Exact maximum independent set size in the single binary relation.

    `cap` bounds the answer from above (search stops early once reached);
    `budget` bounds the number of branch nodes and fails loudly beyond it.
    """
    sym = G.graph_symbol()
    adj = G.gaifman_adjacency()
    loopers = {a for (a, b) in G.relations[sym] if a == b}
    verts = [v for v in sorted(G.domain, key=lambda v: (-len(adj[v]), G.index(v))) if v not in loopers]
    best = 0
    nodes = 0
    target = cap if cap is not None else len(verts)

    def bt(i: int, chosen: set) -> None:
        nonlocal best, nodes
        if best >= target:
            return
        if len(chosen) > best:
            best = len(chosen)
        if i == len(verts) or len(chosen) + (len(verts) - i) <= best:
            return
        nodes += 1
        if budget is not None and nodes > budget:
            raise SearchBudgetExceeded(f"independent-set search exceeded {budget} nodes")
        v = verts[i]
        if not any(u in chosen for u in adj[v]):
            chosen.add(v)
            bt(i + 1, chosen)
            chosen.remove(v)
        bt(i + 1, chosen)

    bt(0, set())
    return min(best, target)


def digraph(edges: Iterable[tuple], domain: Optional[Iterable[Vertex]] = None) -> RelStructure:
    """Convenience constructor for a single-binary-symbol structure."""
    edges = [tuple(e) for e in edges]
    if domain is None:
        seen: list = []
        for a, b in edges:
            for v in (a, b):
                if v not in seen:
                    seen.append(v)
        domain = seen
    return RelStructure(GRAPH_SIGNATURE, domain, {"E": edges})


def relabel(X: RelStructure, prefix: str = "n") -> tuple[RelStructure, dict]:
    """Rename vertices to compact prefix+index strings (domain order);
    returns the renamed structure and the old-to-new map.  Deeply nested
    vertex names from iterated constructions stay cheap this way."""
    mapping = {v: f"{prefix}{i}" for i, v in enumerate(X.domain)}
    relations = {
        name: [tuple(mapping[v] for v in t) for t in X.relations[name]]
        for name, _ in X.signature.symbols
    }
    renamed = RelStructure(X.signature, [mapping[v] for v in X.domain], relations)
    return renamed, mapping
