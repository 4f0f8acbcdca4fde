"""Pipeline orchestration and the command-line interface.

Two headline pipelines:

* `pipeline_magic_square` (thm15 shape): magic square -> 2-to-2 reduction ->
  quantum 4-colouring of the 6144-vertex reduced digraph, with exact
  verification at every stage and explicit per-stage verdicts.  The
  level-1 commutator check is also run and its outcome recorded: the
  forbidden-product (perfectness) layer passes exactly, while pairwise
  commutation across intersecting contexts provably cannot hold for the
  magic square (a level-1-compatible perfect family would make all nine
  grid observables commute and hence make the system classically
  satisfiable).  The honest verdict separates the two layers.

* `pipeline_machinery` (thm14 shape): a classically-lifted d-to-1 seed run
  through the d-to-d preprocessing chain, the colouring reduction, and two
  line-digraph steps, with the compatibility ledger 10 -> 4 -> 1 enforced by
  verifier runs, ending in a verified 3-colouring witness.

All randomness (verification sampling, seed-instance generation) flows from
one integer seed; reports are reproducible bit for bit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import colouring, csp, dkkms, dmr, pultr, qop, relstruct, serialize
from .relstruct import ABOVE_CAP, clique, relabel


@dataclass
class Stage:
    name: str
    details: dict
    seconds: float


@dataclass
class PipelineReport:
    pipeline: str
    seed: int
    stages: list = field(default_factory=list)
    verdict: str = ""

    def add(self, name: str, details: dict, seconds: float) -> None:
        self.stages.append(Stage(name, details, seconds))

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "seed": self.seed,
            "verdict": self.verdict,
            "stages": [
                {"name": s.name, "seconds": round(s.seconds, 3), **s.details}
                for s in self.stages
            ],
        }

    def summary(self) -> str:
        lines = [f"pipeline {self.pipeline} (seed {self.seed})"]
        for s in self.stages:
            lines.append(f"  [{s.seconds:7.2f}s] {s.name}")
            for key, value in s.details.items():
                lines.append(f"      {key}: {value}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _threads() -> int:
    """Honour the documented environment knob; execution stays sequential
    and deterministic, the value only bounds any future fan-out."""
    raw = os.environ.get("CHROMAGAP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"CHROMAGAP_THREADS={raw!r} is not an integer") from exc
    if n < 1:
        raise ValueError("CHROMAGAP_THREADS must be >= 1")
    return n


def read_config(path: Optional[str]) -> dict:
    """key=value lines; '#' starts a comment.  Recognised keys: budgets and
    tolerances (sinkhorn_residual, spectral_gap, samples, hom_budget)."""
    config: dict = {
        "sinkhorn_residual": 1e-12,
        "spectral_gap": 1e-8,
        "samples": 100_000,
        "hom_budget": 10_000_000,
    }
    if path is None:
        return config
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in ("samples", "hom_budget"):
                config[key] = int(value)
            else:
                config[key] = float(value)
    return config


def pipeline_magic_square(
    seed: int = 0,
    *,
    samples: int = 100_000,
    full: bool = False,
    outdir: Optional[str] = None,
) -> PipelineReport:
    """Magic square -> rho -> eta, with exact verification everywhere."""
    _threads()
    report = PipelineReport("thm15", seed)

    t0 = time.time()
    system, game_assignment = qop.mermin_peres()
    sat = system.sat_value()
    game_check = dkkms.verify_game_assignment(system, 1, game_assignment)
    report.add(
        "magic-square",
        {
            "sat": str(sat),
            "pseudo_telepathic": sat < 1 and game_check.passed,
            "game_form": "pass" if game_check.passed else "FAIL",
            "dim": game_assignment.dim,
        },
        time.time() - t0,
    )
    if not game_check.passed or sat != Fraction(5, 6):
        report.verdict = "FAIL at the magic-square stage"
        return report

    t0 = time.time()
    rho1 = dkkms.build_rho1(system, 1, 2)
    rho2 = dkkms.build_rho2(rho1)
    _, transferred = dkkms.rho_quantum_transfer(system, 1, 2, game_assignment, rho1=rho2)
    x1, a1 = csp.to_structures(rho1.instance)
    x2, a2 = csp.to_structures(rho2.instance)
    perfect_rho1 = qop.verify_assignment(x1, a1, transferred, 0)
    perfect_rho2 = qop.verify_assignment(x2, a2, transferred, 0)
    level1 = qop.verify_assignment(x2, a2, transferred, 1)
    profile = csp.classify_label_cover(rho2.instance)
    report.add(
        "rho-reduction",
        {
            "vertices": len(rho2.instance.variables),
            "alphabet": len(rho2.instance.alphabet),
            "tags": {t: rho1.tags.count(t) for t in sorted(set(rho1.tags))},
            "d_to_d": (profile.d_to_d.m, profile.d_to_d.d) if profile.d_to_d else None,
            "perfect_rho1": perfect_rho1.summary(),
            "perfect_rho2": perfect_rho2.summary(),
            "level1_commutators": level1.summary(),
            "level1_note": (
                "commutator failures are intrinsic: a perfect level-1-compatible "
                "family for this instance would force a classical solution"
            ),
        },
        time.time() - t0,
    )
    if not (perfect_rho1.perfect and perfect_rho2.perfect):
        report.verdict = "FAIL at the rho stage"
        return report

    t0 = time.time()
    eta, coloured, ctx = colouring.eta_quantum_transfer(rho2.instance, transferred, 0)
    k4 = clique(4)
    if full:
        verification = qop.verify_assignment(eta, k4, coloured, 0)
    else:
        verification = qop.verify_assignment(
            eta, k4, coloured, 0, product_samples=samples, seed=seed
        )
    bipartite, lower_bound = _chromatic_lower_bound(eta)
    report.add(
        "eta-colouring",
        {
            "vertices": len(eta.domain),
            "edges": len(eta.relations["E"]),
            "dim": coloured.dim,
            "verification": verification.summary(),
            "chromatic_lower_bound": lower_bound,
            "bipartite": bipartite,
            "soundness_note": (
                "at one repetition the reduced graph is bipartite (the "
                "reduction's constraint graph splits into row and column "
                "tuples); large classical chromatic number only emerges "
                "asymptotically and is not claimed here"
            ),
        },
        time.time() - t0,
    )
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        serialize.dump(
            serialize.assignment_to_dict(transferred),
            os.path.join(outdir, "rho_assignment.json"),
        )
        serialize.dump(
            serialize.instance_to_dict(rho2.instance),
            os.path.join(outdir, "rho2_instance.json"),
        )
    ok = verification.perfect
    report.verdict = (
        "perfect quantum 4-colouring on dim 4 (exact-zero forbidden products); "
        "level-1 commutation fails as recorded"
        if ok
        else "FAIL at the eta stage"
    )
    return report


def _chromatic_lower_bound(X: relstruct.RelStructure, clique_tries: int = 64) -> tuple[bool, int]:
    """(bipartite, lower bound): one BFS 2-colouring pass for odd cycles,
    plus a bounded greedy clique probe from the highest-degree vertices."""
    from collections import deque

    adj = X.gaifman_adjacency()
    if all(not ns for ns in adj.values()):
        return True, 1
    colour: dict = {}
    bipartite = True
    for start in X.domain:
        if start in colour:
            continue
        colour[start] = 0
        queue = deque([start])
        while queue and bipartite:
            u = queue.popleft()
            for v in adj[u]:
                if v == u:
                    bipartite = False
                    break
                if v not in colour:
                    colour[v] = 1 - colour[u]
                    queue.append(v)
                elif colour[v] == colour[u]:
                    bipartite = False
                    break
        if not bipartite:
            break
    best_clique = 2
    by_degree = sorted(X.domain, key=lambda v: -len(adj[v]))[:clique_tries]
    neighbour_sets: dict = {}

    def nbrs(w):
        if w not in neighbour_sets:
            neighbour_sets[w] = set(adj[w])
        return neighbour_sets[w]

    for v in by_degree:
        members = [v]
        for u in adj[v]:
            if all(u in nbrs(w) for w in members):
                members.append(u)
        best_clique = max(best_clique, len(members))
    lower = 2 if bipartite else max(3, best_clique)
    return bipartite, max(lower, best_clique)


def machinery_seed_instance(seed: int) -> tuple[csp.CspInstance, dict]:
    """A tiny satisfiable d-to-1 instance (d = 2, one right vertex, single-
    letter right alphabet) with seed-dependent weights, plus a perfect
    classical assignment."""
    import random

    rng = random.Random(seed)
    pred = {("a0", "b0"), ("a1", "b0")}
    # weights bounded so the copy counts of the equalisation stage stay >= 1
    w1 = Fraction(rng.randint(1, 3), 1)
    w2 = Fraction(rng.randint(1, 3), 1)
    inst = csp.CspInstance(
        ["p", "q", "y"],
        ["a0", "a1", "b0"],
        [(("p", "y"), pred), (("q", "y"), pred)],
        [w1, w2],
    )
    assignment = {"p": "a0", "q": rng.choice(["a0", "a1"]), "y": "b0"}
    return inst, assignment


def pipeline_machinery(
    i: int = 2,
    seed: int = 0,
    *,
    budget: int = 5_000_000,
    outdir: Optional[str] = None,
) -> PipelineReport:
    """Classically-lifted end-to-end run of the full reduction machinery,
    with the compatibility ledger 3*2^i - 2 -> ... -> 1 enforced by verifier
    runs at every step (i = 2 gives 10 -> 4 -> 1)."""
    _threads()
    if i != 2:
        raise dmr.SizeBudgetExceeded("the desk-scale machinery run supports i = 2")
    report = PipelineReport("thm14", seed)
    k_ladder = [3 * 2**i - 2]
    while k_ladder[-1] != 1:
        k_ladder.append((k_ladder[-1] - 2) // 2)
    # 10 -> 4 -> 1 for i = 2

    t0 = time.time()
    inst, classical = machinery_seed_instance(seed)
    lift = qop.lift_classical(classical)
    final, dmr_report, tracked = dmr.dmr_pipeline(
        inst, Fraction(12), k_ladder[0], 1, lift, budget=budget
    )
    report.add(
        "dmr-chain",
        {
            "parameters": {k: str(v) for k, v in dmr_report.parameters.items()},
            "certificates": dmr_report.certificates,
            "quantum": dmr_report.quantum_ledger,
            "final": repr(final),
        },
        time.time() - t0,
    )

    t0 = time.time()
    eta, eta_assignment, ctx = colouring.eta_quantum_transfer(final, tracked, k_ladder[0])
    eta, mapping = relabel(eta, "g")
    eta_assignment = qop.QuantumAssignment(
        eta_assignment.dim,
        eta_assignment.k,
        {mapping[v]: fam for v, fam in eta_assignment.pvms.items()},
    )
    k4 = clique(4)
    check0 = qop.verify_assignment(eta, k4, eta_assignment, k_ladder[0])
    report.add(
        "eta",
        {
            "vertices": len(eta.domain),
            "edges": len(eta.relations["E"]),
            "level": k_ladder[0],
            "verification": check0.summary(),
        },
        time.time() - t0,
    )

    current_x, current_y = eta, k4
    current = eta_assignment
    ledger = [k_ladder[0]]
    for step, k_next in enumerate(k_ladder[1:], start=1):
        t0 = time.time()
        transferred = colouring.linedigraph_quantum_transfer(
            current_x, current_y, current, k_next
        )
        current_x = colouring.line_digraph(current_x)
        current_y = colouring.line_digraph(current_y)
        current_x, mapping = relabel(current_x, f"d{step}_")
        transferred = qop.QuantumAssignment(
            transferred.dim,
            transferred.k,
            {mapping[v]: fam for v, fam in transferred.pvms.items()},
        )
        check = qop.verify_assignment(current_x, current_y, transferred, k_next)
        ledger.append(k_next)
        report.add(
            f"line-digraph-{step}",
            {
                "vertices": len(current_x.domain),
                "edges": len(current_x.relations["E"]),
                "level": k_next,
                "verification": check.summary(),
            },
            time.time() - t0,
        )
        current = transferred
        if not check.passed:
            report.verdict = f"FAIL at line-digraph step {step}"
            return report

    t0 = time.time()
    delta2k4 = colouring.line_digraph(colouring.line_digraph(clique(4)))
    chi = relstruct.chromatic_number(delta2k4, 4)
    to_k3 = relstruct.find_homomorphism(delta2k4, clique(3))
    # the target of the last transfer is delta^2 K4 up to the edge naming of
    # line_digraph, which the transfer reuses, so the colouring composes
    final_assignment = qop.compose_sandwich(
        {v: v for v in current.pvms}, current, to_k3, k=0
    )
    check_final = qop.verify_assignment(current_x, clique(3), final_assignment, 0)
    undirected = relstruct.symmetrize(current_x)
    bipartite = relstruct.find_homomorphism(undirected, clique(2)) is not None
    report.add(
        "three-colouring",
        {
            "chi_delta2_k4": chi if chi is not ABOVE_CAP else "above cap",
            "ledger": ledger,
            "verification": check_final.summary(),
            "final_bipartite": bipartite,
            "bipartite_note": "a bipartite output would already be quantum 2-colourable",
        },
        time.time() - t0,
    )
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        serialize.dump(
            serialize.assignment_to_dict(final_assignment),
            os.path.join(outdir, "three_colouring_witness.json"),
        )
        serialize.dump(
            serialize.structure_to_dict(current_x),
            os.path.join(outdir, "final_digraph.json"),
        )
    report.verdict = (
        f"ledger {'->'.join(map(str, ledger))}; verified 3-colouring witness"
        if check_final.passed and chi == 3
        else "FAIL at the final colouring stage"
    )
    return report


# -- command-line interface --------------------------------------------------


def _load_structure(path: str) -> relstruct.RelStructure:
    return serialize.structure_from_dict(serialize.load(path))


def _load_instance(path: str) -> csp.CspInstance:
    return serialize.instance_from_dict(serialize.load(path))


def _print(obj) -> None:
    json.dump(obj, sys.stdout, indent=1, sort_keys=True, default=str)
    sys.stdout.write("\n")


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="chromagap",
        description="exact CSP reductions and quantum-assignment verification",
    )
    parser.add_argument("--config", help="key=value config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", help="find a homomorphism between structures")
    p.add_argument("source")
    p.add_argument("target")

    p = sub.add_parser("chromatic", help="exact chromatic number")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, required=True)

    p = sub.add_parser("indep", help="exact independence number")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, default=None)

    p = sub.add_parser("sat", help="exact classical value of an instance")
    p.add_argument("instance")

    p = sub.add_parser("isat", help="induced-subinstance set-assignment value")
    p.add_argument("instance")
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("classify", help="label-cover certificates")
    p.add_argument("instance")

    p = sub.add_parser("augment", help="distance-k compatibility augmentation")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("qverify", help="verify a quantum assignment")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("assignment")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("qsat", help="exact quantum value of an assignment")
    p.add_argument("instance")
    p.add_argument("assignment")

    p = sub.add_parser("pultr", help="Pultr functors and the adjunction oracle")
    p.add_argument("action", choices=["gamma", "lambda", "check"])
    p.add_argument("--template", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--target", default=None, help="second structure for check")
    p.add_argument("--out", default=None)

    p = sub.add_parser("linedigraph", help="iterate the line-digraph operator")
    p.add_argument("graph")
    p.add_argument("--iterate", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("eta", help="d-to-d to colouring reduction")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--emit-template", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("transition", help="build and certify the state matrix")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--emit-spectrum", action="store_true")

    p = sub.add_parser("rho", help="3XOR to 2-to-2 reduction")
    p.add_argument("system", help="text file of `x y z = b` lines")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--emit-tags", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("game", help="the consistent-repetition game as a CSP")
    p.add_argument("system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--questions", choices=["legitimate", "all"], default="legitimate")
    p.add_argument("--out", default=None)

    p = sub.add_parser("rho-transfer", help="transfer a game strategy through rho")
    p.add_argument("system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("dmr", help="d-to-1 to d-to-d preprocessing chain")
    p.add_argument("instance")
    p.add_argument("--eps", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--track-quantum", default=None, help="assignment file")
    p.add_argument("--budget", type=int, default=1_000_000)

    p = sub.add_parser("pipeline", help="headline end-to-end runs")
    p.add_argument("which", choices=["thm15", "thm14"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--full", action="store_true")
    p.add_argument("--outdir", default=None)

    args = parser.parse_args(argv)
    config = read_config(args.config)

    if args.command == "hom":
        f = relstruct.find_homomorphism(
            _load_structure(args.source), _load_structure(args.target)
        )
        _print({"exists": f is not None, "witness": None if f is None else
                {str(serialize.encode_id(k)): serialize.encode_id(v) for k, v in f.items()}})
        return 0 if f is not None else 1

    if args.command == "chromatic":
        result = relstruct.chromatic_number(_load_structure(args.graph), args.cap)
        _print({"chromatic": "above cap" if result is ABOVE_CAP else result})
        return 0

    if args.command == "indep":
        _print({"independence": relstruct.independence_number(_load_structure(args.graph), args.cap)})
        return 0

    if args.command == "sat":
        _print({"sat": str(csp.sat_value(_load_instance(args.instance)))})
        return 0

    if args.command == "isat":
        _print({"isat": str(csp.isat_value(_load_instance(args.instance), args.t))})
        return 0

    if args.command == "classify":
        profile = csp.classify_label_cover(_load_instance(args.instance))
        _print(
            {
                "bipartite": profile.bipartite is not None,
                "projective": profile.projective is not None,
                "d_to_1": profile.d_to_1,
                "d_to_d": None
                if profile.d_to_d is None
                else {"m": profile.d_to_d.m, "d": profile.d_to_d.d},
            }
        )
        return 0

    if args.command == "augment":
        out = csp.augment_k(_load_instance(args.instance), args.k)
        serialize.dump(serialize.instance_to_dict(out), args.out)
        return 0

    if args.command == "qverify":
        report = qop.verify_assignment(
            _load_structure(args.source),
            _load_structure(args.target),
            serialize.assignment_from_dict(serialize.load(args.assignment)),
            args.k,
            product_samples=args.samples,
            seed=args.seed,
        )
        _print(
            {
                "passed": report.passed,
                "perfect": report.perfect,
                "summary": report.summary(),
                "product_violations": [repr(v) for v in report.product_violations[:10]],
                "commutator_violations": [repr(v) for v in report.commutator_violations[:10]],
            }
        )
        return 0 if report.passed else 1

    if args.command == "qsat":
        result = qop.qsat(
            _load_instance(args.instance),
            serialize.assignment_from_dict(serialize.load(args.assignment)),
        )
        _print({"qsat": str(result.value), "imag": str(result.imag), "real": result.real})
        return 0

    if args.command == "pultr":
        template = serialize.template_from_dict(serialize.load(args.template))
        X = _load_structure(args.structure)
        if args.action == "gamma":
            out = pultr.central_apply(template, X, budget=config["hom_budget"])
        elif args.action == "lambda":
            out = pultr.left_apply(template, X)
        else:
            Y = _load_structure(args.target)
            lam, gam = pultr.adjunction_oracle(template, X, Y, budget=config["hom_budget"])
            _print({"lambda_side": lam, "gamma_side": gam, "agree": lam == gam})
            return 0 if lam == gam else 1
        if args.out:
            serialize.dump(serialize.structure_to_dict(out), args.out)
        _print({"vertices": len(out.domain)})
        return 0

    if args.command == "linedigraph":
        X = _load_structure(args.graph)
        for _ in range(args.iterate):
            X = colouring.line_digraph(X)
        if args.out:
            serialize.dump(serialize.structure_to_dict(X), args.out)
        _print({"vertices": len(X.domain), "edges": len(X.relations[X.graph_symbol()])})
        return 0

    if args.command == "eta":
        inst = _load_instance(args.instance)
        ctx = colouring.eta_context(inst, budget=args.budget)
        eta = colouring.eta_apply(inst, context=ctx)
        if args.out:
            serialize.dump(serialize.structure_to_dict(eta), args.out)
        payload = {"vertices": len(eta.domain), "edges": len(eta.relations["E"])}
        if args.emit_template:
            payload["template_symbols"] = len(ctx.symbols)
        _print(payload)
        return 0

    if args.command == "transition":
        tm = colouring.build_transition_matrix(
            args.d,
            residual_tol=config["sinkhorn_residual"],
            spectral_gap=config["spectral_gap"],
        )
        payload = {
            "states": len(tm.states),
            "iterations": tm.iterations,
            "row_sum_residual": tm.row_sum_residual,
            "second_modulus": tm.second_modulus,
        }
        if args.emit_spectrum:
            import numpy as np

            payload["spectrum"] = sorted(np.linalg.eigvalsh(tm.matrix).tolist())
        _print(payload)
        return 0

    if args.command == "rho":
        with open(args.system) as fh:
            system = dkkms.XorSystem.parse(fh.read())
        rho1 = dkkms.build_rho1(system, args.n, args.ell)
        rho2 = dkkms.build_rho2(rho1)
        payload = {
            "vertices": len(rho1.instance.variables),
            "alphabet": len(rho1.instance.alphabet),
            "constraints_rho1": len(rho1.instance.constraints),
            "constraints_rho2": len(rho2.instance.constraints),
        }
        if args.emit_tags:
            payload["tags"] = {t: rho1.tags.count(t) for t in sorted(set(rho1.tags))}
        if args.out:
            serialize.dump(serialize.instance_to_dict(rho2.instance), args.out)
        _print(payload)
        return 0

    if args.command == "game":
        with open(args.system) as fh:
            system = dkkms.XorSystem.parse(fh.read())
        game = dkkms.game_csp(system, args.n, question_set=args.questions)
        if args.out:
            serialize.dump(serialize.instance_to_dict(game), args.out)
        _print(
            {
                "variables": len(game.variables),
                "alphabet": len(game.alphabet),
                "constraints": len(game.constraints),
            }
        )
        return 0

    if args.command == "rho-transfer":
        with open(args.system) as fh:
            system = dkkms.XorSystem.parse(fh.read())
        strategy = serialize.assignment_from_dict(serialize.load(args.strategy))
        rho, transferred = dkkms.rho_quantum_transfer(system, args.n, args.ell, strategy)
        X, A = csp.to_structures(rho.instance)
        report = qop.verify_assignment(X, A, transferred, 0)
        if args.out:
            serialize.dump(serialize.assignment_to_dict(transferred), args.out)
        _print({"perfect": report.perfect, "summary": report.summary()})
        return 0 if report.perfect else 1

    if args.command == "dmr":
        inst = _load_instance(args.instance)
        tracked = None
        if args.track_quantum:
            tracked = serialize.assignment_from_dict(serialize.load(args.track_quantum))
        final, rep, _ = dmr.dmr_pipeline(
            inst, Fraction(args.eps), args.k, args.t, tracked, budget=args.budget
        )
        _print(
            {
                "parameters": {k: str(v) for k, v in rep.parameters.items()},
                "stages": rep.stage_sizes,
                "certificates": rep.certificates,
                "quantum": rep.quantum_ledger,
            }
        )
        return 0

    if args.command == "pipeline":
        if args.which == "thm15":
            report = pipeline_magic_square(
                args.seed,
                samples=config["samples"],
                full=args.full,
                outdir=args.outdir,
            )
        else:
            report = pipeline_machinery(2, args.seed, budget=args.budget, outdir=args.outdir)
        print(report.summary())
        if args.outdir:
            serialize.dump(report.to_dict(), os.path.join(args.outdir, "report.json"))
        return 0 if not report.verdict.startswith("FAIL") else 1

    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
