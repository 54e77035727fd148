"""Independence-atom semantics over closure models and counterexample synthesis.

An assignment maps variables straight into a closure model; a marginal atom
holds when the left image is independent from the right image over the empty
base, a conditional atom over the image of its condition.

The synthesizer turns a non-derivable marginal goal into an explicit refuting
assignment: shrink the goal to a minimal non-derivable atom, then either hit a
shared variable with a single dependent point (case 1) or spread the minimal
atom's variables over a standard basis and aim the distinguished variable at
the basis sum (case 2).  All other variables collapse to the zero vector, the
algebraic point.  The result is re-verified before it is returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .atoms import Atom, AtomSet, CONDITIONAL, MARGINAL, canonicalize
from .calculus import is_derivable_marginal, minimal_nonderivable
from .pregeom import (
    ClosureModel,
    Vector,
    basis_vector,
    format_model,
    format_vector,
    indep,
    ones_vector,
    vector_space,
    vector_sum,
    zero_vector,
)

__all__ = [
    "AirAssignment",
    "Counterexample",
    "GoalDerivableError",
    "SynthesisError",
    "UnboundVariableError",
    "air_satisfies",
    "air_satisfies_set",
    "synthesize_counterexample",
    "build_federation_gap_instance",
    "algebraic_point_fixture",
    "soundness_fuzz",
    "FuzzReport",
]


class GoalDerivableError(ValueError):
    """The goal follows from sigma, so no counterexample exists."""


class SynthesisError(RuntimeError):
    """Internal invariant violation: the constructed assignment failed verification."""


class UnboundVariableError(KeyError):
    pass


@dataclass
class AirAssignment:
    """Total map from a finite variable set into a closure model's ground set."""

    model: ClosureModel
    mapping: dict[str, Vector]

    def __getitem__(self, var: str) -> Vector:
        try:
            return self.mapping[var]
        except KeyError:
            raise UnboundVariableError(f"variable {var!r} is not assigned") from None

    def image(self, vs: Iterable[str]) -> frozenset:
        return frozenset(self[v] for v in vs)

    def domain(self) -> frozenset[str]:
        return frozenset(self.mapping)


def air_satisfies(s: AirAssignment, atom: Atom) -> bool:
    base = s.image(atom.condition) if atom.kind == CONDITIONAL else frozenset()
    return indep(s.model, s.image(atom.left), s.image(atom.right), base)


def air_satisfies_set(s: AirAssignment, sigma: AtomSet) -> bool:
    return all(air_satisfies(s, a) for a in sigma.atoms)


# --------------------------------------------------------------------------
# Counterexample synthesis
# --------------------------------------------------------------------------

CASE_SHARED = "case1"
CASE_DISJOINT = "case2"


@dataclass
class Counterexample:
    assignment: AirAssignment
    refuted: Atom
    satisfied: AtomSet
    case: str
    minimal: Atom
    algebraic_vars: frozenset[str]   # variables v with sigma |- v _|_ v
    witness_vars: frozenset[str]     # the rest of the universe

    def to_json_obj(self) -> dict:
        return {
            "model": format_model(self.assignment.model),
            "case": self.case,
            "minimal_atom": str(self.minimal),
            "algebraic_vars": sorted(self.algebraic_vars),
            "assignment": {
                v: format_vector(vec) for v, vec in sorted(self.assignment.mapping.items())
            },
            "refuted": {"atom": str(self.refuted), "holds": air_satisfies(self.assignment, self.refuted)},
            "satisfied": [
                {"atom": str(a), "holds": air_satisfies(self.assignment, a)}
                for a in self.satisfied.sorted_atoms()
            ],
        }


def synthesize_counterexample(sigma: AtomSet, goal: Atom) -> Counterexample:
    """Explicit rational-vector-space counterexample for a non-derivable goal.

    Raises GoalDerivableError when sigma derives the goal.  The returned
    assignment is re-verified to satisfy sigma and refute the goal; failure of
    that check signals an implementation bug and raises SynthesisError.
    """
    if goal.kind != MARGINAL or not sigma.all_marginal():
        raise ValueError("counterexample synthesis covers the marginal system only")
    sig = sigma.with_universe(goal.vars)
    if is_derivable_marginal(sig, goal):
        raise GoalDerivableError(f"goal derivable: {goal}")
    minimal = minimal_nonderivable(sig, goal)
    universe = sig.universe
    algebraic = frozenset(
        v for v in universe if is_derivable_marginal(sig, Atom(frozenset((v,)), frozenset((v,))))
    )
    witnesses = universe - algebraic

    shared = minimal.left & minimal.right
    if shared:
        z = min(shared)
        model = vector_space(1)
        zero = zero_vector(1)
        mapping = {v: zero for v in universe}
        mapping[z] = basis_vector(1, 0)
        case = CASE_SHARED
    else:
        xs = sorted(minimal.left)
        ys = sorted(minimal.right)
        k = (len(xs) - 1) + len(ys)
        model = vector_space(k)
        zero = zero_vector(k)
        mapping = {v: zero for v in universe}
        spread = xs[1:] + ys
        for i, v in enumerate(spread):
            mapping[v] = basis_vector(k, i)
        mapping[xs[0]] = ones_vector(k)
        case = CASE_DISJOINT

    assignment = AirAssignment(model, mapping)
    if not air_satisfies_set(assignment, sig) or air_satisfies(assignment, goal):
        raise SynthesisError(
            f"synthesized assignment failed verification for sigma={sorted(map(str, sig.atoms))}, goal={goal}"
        )
    return Counterexample(assignment, goal, sigma, case, minimal, algebraic, witnesses)


def build_federation_gap_instance(n: int) -> tuple[AtomSet, Atom, AirAssignment]:
    """The n-point gap instance: prefix independences plus drop-one covers.

    Returns sigma over x0..x{n-1},y, the goal x0...x{n-1} _|_ y, and the
    refuting assignment s(xi)=e_i, s(y)=all-ones in Q^n.  The instance is
    checked on construction: sigma holds, the goal fails, and the marginal
    engine reports NotDerivable.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    xs = [f"x{i}" for i in range(n)]
    atoms = set()
    for i in range(n):
        atoms.add(Atom(frozenset(xs[:i]), frozenset((xs[i],))))
        atoms.add(Atom(frozenset(xs[:i] + xs[i + 1:]), frozenset(("y",))))
    sigma = AtomSet.of(atoms)
    goal = Atom(frozenset(xs), frozenset(("y",)))
    mapping = {x: basis_vector(n, i) for i, x in enumerate(xs)}
    mapping["y"] = ones_vector(n)
    assignment = AirAssignment(vector_space(n), mapping)
    if not air_satisfies_set(assignment, sigma) or air_satisfies(assignment, goal):
        raise SynthesisError("gap instance failed its own verification")
    if is_derivable_marginal(sigma, goal):
        raise SynthesisError("gap instance goal unexpectedly derivable")
    return sigma, goal, assignment


def algebraic_point_fixture() -> tuple[AtomSet, Atom, AirAssignment]:
    """x _|_ x does not force y _|_ z: refuted in Q^1 with s = (x:0, y:1, z:2)."""
    sigma = AtomSet.of([Atom(frozenset("x"), frozenset("x"))], extra_vars=("y", "z"))
    goal = Atom(frozenset("y"), frozenset("z"))
    assignment = AirAssignment(
        vector_space(1), {"x": (0,), "y": (1,), "z": (2,)}
    )
    if not air_satisfies_set(assignment, sigma) or air_satisfies(assignment, goal):
        raise SynthesisError("algebraic-point fixture failed its own verification")
    if is_derivable_marginal(sigma, goal):
        raise SynthesisError("algebraic-point fixture goal unexpectedly derivable")
    return sigma, goal, assignment


# --------------------------------------------------------------------------
# Rule soundness fuzz
# --------------------------------------------------------------------------


@dataclass
class RuleFuzzResult:
    rule: str
    instances: int = 0
    premise_hits: int = 0
    violations: list = field(default_factory=list)


@dataclass
class FuzzReport:
    rules: str
    model: ClosureModel
    seed: int
    results: dict[str, RuleFuzzResult]

    @property
    def all_passed(self) -> bool:
        return all(not r.violations for r in self.results.values())

    def summary_lines(self) -> list[str]:
        lines = []
        for name, r in sorted(self.results.items()):
            status = "pass" if not r.violations else "FAIL"
            line = f"{name:<3} {status}  instances={r.instances} premise_hits={r.premise_hits}"
            if r.violations:
                line += f" witness={r.violations[0]}"
            lines.append(line)
        return lines


_FUZZ_VARS = ("u", "v", "w", "x", "y", "z")


def _fuzz_pool(model: ClosureModel, rng: random.Random) -> list[Vector]:
    dim = model.dim
    pool = [zero_vector(dim)]
    pool += [basis_vector(dim, i) for i in range(dim)]
    for i in range(dim - 1):
        pool.append(vector_sum(basis_vector(dim, i), basis_vector(dim, i + 1)))
    pool.append(ones_vector(dim))
    for _ in range(3):
        pool.append(tuple(rng.randint(-2, 2) for _ in range(dim)))
    return pool


def _vars_subset(rng: random.Random, max_size: int = 2) -> frozenset[str]:
    k = rng.randint(0, max_size)
    return frozenset(rng.sample(_FUZZ_VARS, k)) if k else frozenset()


def soundness_fuzz(
    rules: str,
    model: ClosureModel,
    trials: int = 1000,
    seed: int = 0,
    indep_fn: Callable[[frozenset, frozenset, frozenset], bool] | None = None,
) -> FuzzReport:
    """Sample rule instances under random assignments; premises true must force
    the conclusion true.  ``indep_fn`` substitutes for the model relation so
    tests can verify the fuzz detects corrupted semantics.
    """
    if rules not in (MARGINAL, CONDITIONAL):
        raise ValueError("rules must be 'marginal' or 'conditional'")
    rng = random.Random(seed)
    pool = _fuzz_pool(model, rng)
    ind = indep_fn or (lambda a, b, base: indep(model, a, b, base))

    def sat(mapping: dict[str, Vector], atom: Atom) -> bool:
        img = lambda vs: frozenset(mapping[v] for v in vs)
        base = img(atom.condition) if atom.kind == CONDITIONAL else frozenset()
        return ind(img(atom.left), img(atom.right), base)

    rule_names = (
        ("A3", "B3", "C3", "D3", "E3", "F3", "G3")
        if rules == MARGINAL
        else ("A5", "B5", "C5", "D5", "E5", "F5", "G5", "H5")
    )
    results = {name: RuleFuzzResult(name) for name in rule_names}

    def run(name: str, premises: list[Atom], conclusion: Atom, mapping: dict) -> None:
        r = results[name]
        r.instances += 1
        if all(sat(mapping, p) for p in premises):
            r.premise_hits += 1
            if not sat(mapping, conclusion):
                r.violations.append(
                    {
                        "rule": name,
                        "premises": [str(p) for p in premises],
                        "conclusion": str(conclusion),
                        "assignment": {v: format_vector(vec) for v, vec in sorted(mapping.items())},
                    }
                )

    empty: frozenset[str] = frozenset()
    for _ in range(trials):
        mapping = {v: rng.choice(pool) for v in _FUZZ_VARS}
        xs, ys, zs, us = (_vars_subset(rng) for _ in range(4))
        single = rng.choice(_FUZZ_VARS)

        if rules == MARGINAL:
            run("A3", [], Atom(xs, empty), mapping)
            run("B3", [Atom(xs, ys)], Atom(ys, xs), mapping)
            run("C3", [Atom(xs, ys | zs)], Atom(xs, ys), mapping)
            run("D3", [Atom(xs, ys), Atom(xs | ys, zs)], Atom(xs, ys | zs), mapping)
            sv = frozenset((single,))
            run("E3", [Atom(sv, sv)], Atom(sv, ys), mapping)
            # F3/G3 are definitional: permuted/duplicated sequences canonicalize
            # to the same atom, so the conclusion is literally the premise.
            seq_l, seq_r = sorted(xs), sorted(ys)
            rng.shuffle(seq_l)
            rng.shuffle(seq_r)
            run("F3", [Atom(xs, ys)], canonicalize(seq_l, seq_r), mapping)
            run("G3", [Atom(xs, ys)], canonicalize(seq_l + seq_l[:1], seq_r), mapping)
        else:
            C = CONDITIONAL
            run("A5", [], Atom(xs, ys, xs, C), mapping)
            run("B5", [Atom(xs, ys, zs, C)], Atom(ys, xs, zs, C), mapping)
            run("C5", [Atom(xs | us, ys | zs, zs, C)], Atom(xs, ys, zs, C), mapping)
            run("D5", [Atom(xs, ys, zs, C)], Atom(xs | zs, ys | zs, zs, C), mapping)
            run("E5", [Atom(xs, ys, zs, C), Atom(us, ys, zs | xs, C)], Atom(us, ys, zs, C), mapping)
            run("F5", [Atom(ys, ys, zs, C), Atom(zs | xs, us, ys, C)], Atom(xs, us, zs, C), mapping)
            run("G5", [Atom(xs, ys, zs, C), Atom(xs | ys, us, zs, C)], Atom(xs, ys | us, zs, C), mapping)
            # H5 is definitional, as F3/G3 above.
            seq_l, seq_r, seq_c = sorted(xs), sorted(ys), sorted(zs)
            rng.shuffle(seq_l)
            rng.shuffle(seq_r)
            rng.shuffle(seq_c)
            dup_c = seq_c + seq_c[:1]
            h5_concl = Atom(frozenset(seq_l), frozenset(seq_r), frozenset(dup_c), C)
            run("H5", [Atom(xs, ys, zs, C)], h5_concl, mapping)

    return FuzzReport(rules, model, seed, results)
