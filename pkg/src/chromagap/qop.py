"""Exact complex projector algebra and quantum-assignment verification.

All matrix entries are Gaussian rationals (pairs of `fractions.Fraction`), so
projector identities, forbidden-product zero tests, and commutators are exact
equalities with no tolerances.  Assignments are sparse: a missing label means
the zero projector.

The verifier realises the two projector conditions that characterise perfect
k-compatible quantum assignments between structures: ordered products over a
constraint scope vanish on every non-allowed label tuple, and projectors of
variables within Gaifman distance k commute.  Diagonal families (classical
lifts) take an exact fast path through supports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .relstruct import RelStructure, gaifman_balls


class DimMismatch(Exception):
    pass


class KeyMismatch(Exception):
    pass


class VerificationFailure(Exception):
    pass


class NotBipartiteProjective(Exception):
    pass


class GQ:
    """A Gaussian rational: exact complex number with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0) -> None:
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other: "GQ") -> "GQ":
        return GQ(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GQ") -> "GQ":
        return GQ(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GQ") -> "GQ":
        return GQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GQ":
        return GQ(-self.re, -self.im)

    def conj(self) -> "GQ":
        return GQ(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GQ) and self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


GQ_ZERO = GQ(0)
GQ_ONE = GQ(1)
GQ_I = GQ(0, 1)


class PMatrix:
    """An immutable dim x dim matrix of Gaussian rationals."""

    __slots__ = ("dim", "entries", "_hash", "_diag_support")

    def __init__(self, entries: Sequence[Sequence[GQ]]) -> None:
        rows = tuple(tuple(e for e in row) for row in entries)
        dim = len(rows)
        for row in rows:
            if len(row) != dim:
                raise DimMismatch("matrix must be square")
        self.dim = dim
        self.entries = rows
        self._hash: Optional[int] = None
        self._diag_support: Optional[object] = None

    @staticmethod
    def zeros(dim: int) -> "PMatrix":
        return PMatrix([[GQ_ZERO] * dim for _ in range(dim)])

    @staticmethod
    def identity(dim: int) -> "PMatrix":
        return PMatrix(
            [[GQ_ONE if i == j else GQ_ZERO for j in range(dim)] for i in range(dim)]
        )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[complex | int | Fraction | tuple]]) -> "PMatrix":
        conv = []
        for row in rows:
            out = []
            for e in row:
                if isinstance(e, GQ):
                    out.append(e)
                elif isinstance(e, tuple):
                    out.append(GQ(Fraction(e[0]), Fraction(e[1])))
                elif isinstance(e, complex):
                    out.append(GQ(Fraction(e.real), Fraction(e.imag)))
                else:
                    out.append(GQ(Fraction(e)))
            conv.append(out)
        return PMatrix(conv)

    def _check(self, other: "PMatrix") -> None:
        if self.dim != other.dim:
            raise DimMismatch(f"{self.dim} != {other.dim}")

    def __add__(self, other: "PMatrix") -> "PMatrix":
        self._check(other)
        return PMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "PMatrix") -> "PMatrix":
        self._check(other)
        return PMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        self._check(other)
        n = self.dim
        a = self.entries
        bt = tuple(zip(*other.entries))
        out = []
        for i in range(n):
            row = []
            ai = a[i]
            for j in range(n):
                bj = bt[j]
                acc = GQ_ZERO
                for k in range(n):
                    x = ai[k]
                    y = bj[k]
                    if (x.re or x.im) and (y.re or y.im):
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return PMatrix(out)

    def scale(self, c: GQ) -> "PMatrix":
        return PMatrix([[c * e for e in row] for row in self.entries])

    def conj_transpose(self) -> "PMatrix":
        return PMatrix(
            [
                [self.entries[j][i].conj() for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def trace(self) -> GQ:
        acc = GQ_ZERO
        for i in range(self.dim):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def is_hermitian(self) -> bool:
        for i in range(self.dim):
            for j in range(i, self.dim):
                if self.entries[i][j] != self.entries[j][i].conj():
                    return False
        return True

    def is_identity(self) -> bool:
        return self == PMatrix.identity(self.dim)

    def diag_support(self):
        """frozenset of nonzero diagonal indices if diagonal, else None."""
        if self._diag_support is None:
            diagonal = all(
                self.entries[i][j].is_zero()
                for i in range(self.dim)
                for j in range(self.dim)
                if i != j
            )
            if diagonal:
                self._diag_support = frozenset(
                    i for i in range(self.dim) if not self.entries[i][i].is_zero()
                )
            else:
                self._diag_support = False
        return self._diag_support if self._diag_support is not False else None

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PMatrix)
            and self.dim == other.dim
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __repr__(self) -> str:
        return f"PMatrix({self.dim}x{self.dim})"


def matrix_sum(ms: Iterable[PMatrix], dim: int) -> PMatrix:
    acc = PMatrix.zeros(dim)
    for m in ms:
        acc = acc + m
    return acc


@dataclass
class PvmReport:
    hermitian: bool
    idempotent: bool
    orthogonal: bool
    complete: bool
    issues: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hermitian and self.idempotent and self.orthogonal and self.complete


def verify_pvm(family: Sequence[PMatrix]) -> PvmReport:
    """Exact projector-family check: Hermitian, idempotent, mutually
    orthogonal, and summing to the identity."""
    if not family:
        raise DimMismatch("empty family")
    dim = family[0].dim
    for m in family:
        if m.dim != dim:
            raise DimMismatch("mixed dimensions in family")
    report = PvmReport(True, True, True, True)
    for i, m in enumerate(family):
        if not m.is_hermitian():
            report.hermitian = False
            report.issues.append(("hermitian", i))
        if not (m @ m == m):
            report.idempotent = False
            report.issues.append(("idempotent", i))
    for i, m in enumerate(family):
        for j in range(i + 1, len(family)):
            if not (m @ family[j]).is_zero():
                report.orthogonal = False
                report.issues.append(("orthogonal", i, j))
    if not matrix_sum(family, dim).is_identity():
        report.complete = False
        report.issues.append(("complete",))
    return report


class QuantumAssignment:
    """Per-variable PVMs over a shared exact Hilbert space.

    `pvms[x][y]` is the projector for labelling variable x with y; labels not
    present are the zero projector.  `k` is the declared compatibility level;
    verification, not construction, decides whether it holds.
    """

    __slots__ = ("dim", "k", "pvms")

    def __init__(self, dim: int, k: int, pvms: Mapping[Hashable, Mapping[Hashable, PMatrix]]) -> None:
        self.dim = dim
        self.k = k
        self.pvms = {
            x: {y: m for y, m in fam.items() if not m.is_zero()}
            for x, fam in pvms.items()
        }
        for fam in self.pvms.values():
            for m in fam.values():
                if m.dim != dim:
                    raise DimMismatch("projector dimension differs from declared dim")

    def family(self, x: Hashable) -> dict:
        return self.pvms[x]

    def projector(self, x: Hashable, y: Hashable) -> PMatrix:
        return self.pvms[x].get(y, PMatrix.zeros(self.dim))

    def variables(self) -> tuple:
        return tuple(self.pvms)

    def all_diagonal(self) -> bool:
        return all(
            m.diag_support() is not None for fam in self.pvms.values() for m in fam.values()
        )

    def __repr__(self) -> str:
        return f"QuantumAssignment(dim={self.dim}, k={self.k}, |X|={len(self.pvms)})"


@dataclass
class Violation:
    kind: str
    witness: tuple

    def __repr__(self) -> str:
        return f"{self.kind}{self.witness!r}"


@dataclass
class VerificationReport:
    pvm_ok: bool
    product_violations: list
    commutator_violations: list
    products_checked: int
    commutators_checked: int
    sampled: bool
    pvm_issues: list = field(default_factory=list)

    @property
    def perfect(self) -> bool:
        return self.pvm_ok and not self.product_violations

    @property
    def passed(self) -> bool:
        return self.perfect and not self.commutator_violations

    def summary(self) -> str:
        s = "pass" if self.passed else "FAIL"
        return (
            f"{s}: pvm_ok={self.pvm_ok} products={self.products_checked} "
            f"(viol {len(self.product_violations)}) commutators={self.commutators_checked} "
            f"(viol {len(self.commutator_violations)})"
            + (" [sampled]" if self.sampled else "")
        )


class _ProductCache:
    """Memoised zero-tests for pairwise products and commutators; content-
    hashed, so structurally shared projectors are checked once."""

    def __init__(self) -> None:
        self.prod: dict = {}
        self.comm: dict = {}

    def product_is_zero(self, a: PMatrix, b: PMatrix) -> bool:
        sa, sb = a.diag_support(), b.diag_support()
        if sa is not None and sb is not None:
            return not (sa & sb)
        key = (a, b)
        hit = self.prod.get(key)
        if hit is None:
            hit = (a @ b).is_zero()
            self.prod[key] = hit
        return hit

    def commute(self, a: PMatrix, b: PMatrix) -> bool:
        if a.diag_support() is not None and b.diag_support() is not None:
            return True
        key = (a, b)
        hit = self.comm.get(key)
        if hit is None:
            hit = (a @ b) == (b @ a)
            self.comm[key] = hit
        return hit


def _ordered_product_is_zero(mats: Sequence[PMatrix], cache: _ProductCache) -> bool:
    if len(mats) == 2:
        return cache.product_is_zero(mats[0], mats[1])
    supports = [m.diag_support() for m in mats]
    if all(s is not None for s in supports):
        acc = supports[0]
        for s in supports[1:]:
            acc = acc & s
        return not acc
    acc = mats[0]
    for m in mats[1:]:
        acc = acc @ m
        if acc.is_zero():
            return True
    return acc.is_zero()


def verify_assignment(
    X: RelStructure,
    Y: RelStructure,
    assignment: QuantumAssignment,
    k: int,
    *,
    product_samples: Optional[int] = None,
    seed: int = 0,
    max_witnesses: int = 25,
) -> VerificationReport:
    """Exact verification of a perfect k-compatible quantum assignment.

    Checks, in order: every family is a PVM; for every symbol R, scope tuple
    in R(X) and label tuple outside R(Y) the scope-ordered projector product
    is the zero matrix; and all projector pairs of variables within Gaifman
    distance k of each other commute.  Absent labels are zero projectors, so
    product checks iterate over present labels only, which is sound and
    complete.  With `product_samples`, that many (constraint, label-tuple)
    checks are drawn with a fixed seed instead of the full sweep.
    """
    if set(assignment.pvms) != set(X.domain):
        raise KeyMismatch("assignment keys differ from the variable domain")
    for fam in assignment.pvms.values():
        for y in fam:
            if y not in Y:
                raise KeyMismatch(f"label {y!r} outside the target domain")

    pvm_ok = True
    pvm_issues = []
    for x in X.domain:
        fam = assignment.pvms[x]
        mats = list(fam.values())
        if not mats:
            pvm_ok = False
            pvm_issues.append((x, "empty"))
            continue
        rep = verify_pvm(mats)
        if not rep.passed:
            pvm_ok = False
            pvm_issues.append((x, rep.issues))

    cache = _ProductCache()
    product_violations: list[Violation] = []
    labels_of = {x: tuple(assignment.pvms[x].keys()) for x in X.domain}

    def full_sweep():
        for name, t in X.all_tuples():
            rel = Y.relations[name]
            for combo in itertools.product(*(labels_of[v] for v in t)):
                if combo not in rel:
                    yield name, t, combo

    def rejection_sample(count: int):
        # uniform over (tuple, present-label combo) pairs, conditioned on
        # the combo being forbidden: exactly uniform over forbidden checks
        import random

        rng = random.Random(seed)
        tuples_all = list(X.all_tuples())
        produced = 0
        attempts = 0
        limit = 400 * count + 1000
        while produced < count and attempts < limit:
            attempts += 1
            name, t = tuples_all[rng.randrange(len(tuples_all))]
            combo = tuple(
                labels_of[v][rng.randrange(len(labels_of[v]))] if labels_of[v] else None
                for v in t
            )
            if None in combo:
                continue
            if combo not in Y.relations[name]:
                produced += 1
                yield name, t, combo

    sampled = product_samples is not None
    checks = rejection_sample(product_samples) if sampled else full_sweep()
    products_checked = 0
    for name, t, combo in checks:
        products_checked += 1
        mats = [assignment.pvms[v][y] for v, y in zip(t, combo)]
        if not _ordered_product_is_zero(mats, cache):
            if len(product_violations) < max_witnesses:
                product_violations.append(Violation("product", (name, t, combo)))
            else:
                product_violations.append(Violation("product", ("...",)))
                break

    commutator_violations: list[Violation] = []
    commutators_checked = 0
    if k >= 1 and not assignment.all_diagonal():
        balls = gaifman_balls(X, k)
        index = {v: i for i, v in enumerate(X.domain)}
        done = False
        for x in X.domain:
            if done:
                break
            for xp in balls[x]:
                if index[xp] <= index[x]:
                    continue
                for ya, ma in assignment.pvms[x].items():
                    for yb, mb in assignment.pvms[xp].items():
                        commutators_checked += 1
                        if not cache.commute(ma, mb):
                            commutator_violations.append(
                                Violation("commutator", (x, xp, ya, yb))
                            )
                            if len(commutator_violations) >= max_witnesses:
                                done = True
                if done:
                    break
    return VerificationReport(
        pvm_ok,
        product_violations,
        commutator_violations,
        products_checked,
        commutators_checked,
        sampled,
        pvm_issues,
    )


@dataclass
class QsatResult:
    value: Fraction
    imag: Fraction

    @property
    def real(self) -> bool:
        return self.imag == 0

    def __repr__(self) -> str:
        if self.real:
            return f"qsat={self.value}"
        return f"qsat={self.value}+{self.imag}i (flagged non-real)"


def qsat(inst, assignment: QuantumAssignment) -> QsatResult:
    """Exact weighted trace value of the assignment on a CSP instance.

    The value is (1/dim) E_pi sum over allowed label tuples of the trace of
    the scope-ordered projector product.  A nonzero imaginary part (possible
    only without 1-compatibility at arity >= 3) is surfaced, never truncated.
    """
    for v in inst.variables:
        if v not in assignment.pvms:
            raise KeyMismatch(f"variable {v!r} has no PVM")
    total = GQ_ZERO
    for c in inst.constraints:
        label_lists = [list(assignment.pvms[v].keys()) for v in c.scope]
        acc = GQ_ZERO
        for combo in itertools.product(*label_lists):
            if combo in c.allowed:
                mats = [assignment.pvms[v][y] for v, y in zip(c.scope, combo)]
                prod = mats[0]
                for m in mats[1:]:
                    prod = prod @ m
                acc = acc + prod.trace()
        w = GQ(c.weight)
        total = total + w * acc
    scale = GQ(Fraction(1, assignment.dim))
    total = scale * total
    return QsatResult(total.re, total.im)


COMPAT_ANY = 2**30
"""Declared compatibility of classical lifts: diagonal families commute
globally, so any finite level verifies."""


def lift_classical(f: Mapping) -> QuantumAssignment:
    """Dimension-1 assignment of a classical map: Q[x][f(x)] = [1]."""
    one = PMatrix([[GQ_ONE]])
    pvms = {x: {y: one} for x, y in f.items()}
    return QuantumAssignment(1, COMPAT_ANY, pvms)


def compose_sandwich(
    f: Mapping,
    assignment: QuantumAssignment,
    g: Mapping,
    *,
    k: Optional[int] = None,
) -> QuantumAssignment:
    """Pull back along f and push forward along g:
    W[x][y] = sum of Q[f(x)][y'] over y' with g(y') = y.

    Sums run inside a single PVM, so outputs are projectors and the
    compatibility level of the input carries over unchanged.
    """
    out: dict = {}
    for x, xp in f.items():
        fam = assignment.pvms[xp]
        acc: dict = {}
        for yp, m in fam.items():
            y = g[yp]
            acc[y] = acc[y] + m if y in acc else m
        out[x] = acc
    return QuantumAssignment(assignment.dim, assignment.k if k is None else k, out)


def cleanup_bipartite(inst, profile, assignment: QuantumAssignment) -> QuantumAssignment:
    """Zero out every projector pairing a variable with the wrong alphabet
    side of a bipartite projective instance, merging its mass into one
    canonical same-side label; the weighted quantum value never decreases.
    """
    if profile.bipartite is None or profile.projective is None:
        raise NotBipartiteProjective("need verified bipartite and projective certificates")
    x1, x2 = profile.bipartite
    a1, a2 = profile.projective
    side_of_var = {**{v: 0 for v in x1}, **{v: 1 for v in x2}}
    side_of_lab = {**{a: 0 for a in a1}, **{a: 1 for a in a2}}
    canonical = {
        0: next(a for a in inst.alphabet if side_of_lab[a] == 0),
        1: next(a for a in inst.alphabet if side_of_lab[a] == 1),
    }
    before = qsat(inst, assignment)
    new_pvms: dict = {}
    for x, fam in assignment.pvms.items():
        want = side_of_var[x]
        keep: dict = {}
        stray = None
        for y, m in fam.items():
            if side_of_lab[y] == want:
                keep[y] = keep[y] + m if y in keep else m
            else:
                stray = m if stray is None else stray + m
        if stray is not None:
            anchor = canonical[want]
            keep[anchor] = keep[anchor] + stray if anchor in keep else stray
        new_pvms[x] = keep
    out = QuantumAssignment(assignment.dim, assignment.k, new_pvms)
    after = qsat(inst, out)
    if not (after.real and before.real and after.value >= before.value):
        raise VerificationFailure("cleanup decreased the quantum value")
    for x, fam in out.pvms.items():
        rep = verify_pvm(list(fam.values()))
        if not rep.passed:
            raise VerificationFailure(f"cleanup broke the PVM at {x!r}")
    return out


# -- two-player game view ---------------------------------------------------


@dataclass
class GameStrategy:
    """Two-family strategy: Alice answers constraints, Bob answers variables;
    both measure a shared maximally entangled state of the declared
    dimension (so correlations are traces of products)."""

    dim: int
    alice: dict
    bob: dict


def _conj(m: PMatrix) -> PMatrix:
    return PMatrix([[e.conj() for e in row] for row in m.entries])


def game_strategy_from_assignment(inst, assignment: QuantumAssignment) -> GameStrategy:
    """Derive the standard two-player strategy from a variable assignment:
    Alice's constraint PVMs are scope-ordered products of the variable PVMs
    (meaningful only when the factors commute, which is checked), and Bob's
    operators are the entrywise conjugates of the variable projectors."""
    cache = _ProductCache()
    alice: dict = {}
    for idx, c in enumerate(inst.constraints):
        fams = [assignment.pvms[v] for v in c.scope]
        for fa, fb in itertools.combinations(range(len(c.scope)), 2):
            for ma in fams[fa].values():
                for mb in fams[fb].values():
                    if not cache.commute(ma, mb):
                        raise VerificationFailure(
                            "constraint PVMs need commuting variable factors"
                        )
        fam_out: dict = {}
        for combo in itertools.product(*[list(f.keys()) for f in fams]):
            mats = [f[y] for f, y in zip(fams, combo)]
            prod = mats[0]
            for m in mats[1:]:
                prod = prod @ m
            if not prod.is_zero():
                fam_out[combo] = prod
        alice[(idx, c.scope)] = fam_out
    bob = {
        x: {a: _conj(m) for a, m in assignment.pvms[x].items()}
        for x in inst.variables
    }
    return GameStrategy(assignment.dim, alice, bob)


def verify_game_strategy(inst, strategy: GameStrategy) -> list:
    """Check the two perfect-strategy conditions on the maximally entangled
    state of dim^2: no support on non-allowed answer tuples, and Alice/Bob
    answers agreeing on shared variables.  On that state the correlation of
    (E, F) is tr(E . F^T)/dim, so both conditions are exact trace tests."""
    issues = []
    for (idx, scope), fam in strategy.alice.items():
        c = inst.constraints[idx]
        for combo, mat in fam.items():
            if combo not in c.allowed and not mat.trace().is_zero():
                issues.append(("forbidden-support", idx, combo))
            for i, x in enumerate(scope):
                for a, bmat in strategy.bob[x].items():
                    if a == combo[i]:
                        continue
                    corr = (mat @ _transpose(bmat)).trace()
                    if not corr.is_zero():
                        issues.append(("inconsistent", idx, combo, x, a))
    return issues


def _transpose(m: PMatrix) -> PMatrix:
    return PMatrix(
        [[m.entries[j][i] for j in range(m.dim)] for i in range(m.dim)]
    )


# -- the magic square -------------------------------------------------------


def _pauli() -> dict:
    X = PMatrix.from_rows([[0, 1], [1, 0]])
    Y = PMatrix([[GQ_ZERO, GQ(0, -1)], [GQ(0, 1), GQ_ZERO]])
    Z = PMatrix.from_rows([[1, 0], [0, -1]])
    I = PMatrix.identity(2)
    return {"I": I, "X": X, "Y": Y, "Z": Z}


def _kron(a: PMatrix, b: PMatrix) -> PMatrix:
    n, m = a.dim, b.dim
    out = [[GQ_ZERO] * (n * m) for _ in range(n * m)]
    for i in range(n):
        for j in range(n):
            aij = a.entries[i][j]
            if aij.is_zero():
                continue
            for k in range(m):
                for l in range(m):
                    out[i * m + k][j * m + l] = aij * b.entries[k][l]
    return PMatrix(out)


MAGIC_SQUARE_OBSERVABLES = (
    ("ZI", "IZ", "ZZ"),
    ("IX", "XI", "XX"),
    ("ZX", "XZ", "YY"),
)
"""Pauli words for the nine grid observables; every row and the first two
columns multiply to +I, the last column to -I."""


def mermin_peres():
    """The magic-square system and its dimension-4 quantum strategy.

    Returns (system, assignment) where the system has six equations (three
    rows, three columns; only the last column has right-hand side 1) over
    nine variables, and the assignment attaches to each single-equation
    question the four rank-one joint eigenprojectors of its commuting
    observable triple.  Every pair of answers that disagrees on a shared
    variable has exactly-zero projector product, while the classical value
    of the system is 5/6: the game is pseudo-telepathic.
    """
    from .dkkms import XorSystem

    grid = [[f"x{r}{c}" for c in range(3)] for r in range(3)]
    equations = []
    for r in range(3):
        equations.append(((grid[r][0], grid[r][1], grid[r][2]), 0))
    for c in range(3):
        equations.append(((grid[0][c], grid[1][c], grid[2][c]), 1 if c == 2 else 0))
    system = XorSystem.from_equations(equations)

    pauli = _pauli()
    obs: dict[str, PMatrix] = {}
    for r in range(3):
        for c in range(3):
            word = MAGIC_SQUARE_OBSERVABLES[r][c]
            obs[grid[r][c]] = _kron(pauli[word[0]], pauli[word[1]])

    ident = PMatrix.identity(4)
    half = GQ(Fraction(1, 2))
    pvms: dict = {}
    for eq_index, (variables, rhs) in enumerate(equations):
        fam: dict = {}
        for bits in itertools.product((0, 1), repeat=3):
            if sum(bits) % 2 != rhs:
                continue
            proj = ident
            for var, bit in zip(variables, bits):
                sign = GQ_ONE if bit == 0 else GQ(-1)
                proj = proj @ (ident + obs[var].scale(sign)).scale(half)
            label = tuple(sorted(zip(variables, bits)))
            fam[label] = proj
        pvms[(eq_index,)] = fam
    assignment = QuantumAssignment(4, 1, pvms)
    return system, assignment
