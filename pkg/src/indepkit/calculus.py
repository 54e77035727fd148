"""Derivation engines for independence atoms.

Marginal system (rules A3-E3): saturation over the finite universe terminates,
so the engine decides derivability outright.  Conditional system (rules
A5-G5): forward chaining is depth-bounded and the engine answers Derived or
Unknown, never NotDerivable (the consequence relation for conditional atoms is
undecidable).

Permutation and duplication rules are absorbed by atom canonicalization and
therefore never appear as proof steps.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator

from .atoms import Atom, AtomSet, CONDITIONAL, MARGINAL, lift

__all__ = [
    "MARGINAL_RULES",
    "CONDITIONAL_RULES",
    "RULE_ARITY",
    "ProofStep",
    "Proof",
    "Verdict",
    "InvalidProofError",
    "saturate_marginal",
    "is_derivable_marginal",
    "derives_marginal",
    "minimal_nonderivable",
    "saturate_conditional",
    "is_derivable_conditional",
    "derives_conditional",
    "replay_proof",
]

HYP = "hyp"

MARGINAL_RULES = ("A3", "B3", "C3", "D3", "E3")
CONDITIONAL_RULES = ("A5", "B5", "C5", "D5", "E5", "F5", "G5")

RULE_ARITY = {
    "A3": 0, "B3": 1, "C3": 1, "D3": 2, "E3": 1,
    "A5": 0, "B5": 1, "C5": 1, "D5": 1, "E5": 2, "F5": 2, "G5": 2,
}


class InvalidProofError(ValueError):
    pass


@dataclass(frozen=True)
class ProofStep:
    atom: Atom
    rule: str                    # rule id or "hyp"
    premises: tuple[int, ...]    # 1-based indices of earlier steps

    def to_text(self, index: int) -> str:
        if self.rule == HYP:
            return f"{index}. {self.atom} [hyp]"
        premises = ",".join(str(p) for p in self.premises)
        return f"{index}. {self.atom} [{self.rule} {premises}]".replace(" ]", "]")


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]

    @property
    def conclusion(self) -> Atom:
        return self.steps[-1].atom

    def to_text(self) -> str:
        return "\n".join(step.to_text(i) for i, step in enumerate(self.steps, start=1))

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "index": i,
                "atom": str(step.atom),
                "rule": step.rule,
                "premises": list(step.premises),
            }
            for i, step in enumerate(self.steps, start=1)
        ]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Verdict:
    status: str                  # "derived" | "not_derivable" | "unknown"
    proof: Proof | None = None
    depth: int | None = None     # saturation bound hit, for "unknown"

    DERIVED = "derived"
    NOT_DERIVABLE = "not_derivable"
    UNKNOWN = "unknown"

    def is_derived(self) -> bool:
        return self.status == Verdict.DERIVED

    @classmethod
    def derived(cls, proof: Proof) -> "Verdict":
        return cls(cls.DERIVED, proof=proof)

    @classmethod
    def not_derivable(cls) -> "Verdict":
        return cls(cls.NOT_DERIVABLE)

    @classmethod
    def unknown(cls, depth: int) -> "Verdict":
        return cls(cls.UNKNOWN, depth=depth)


@lru_cache(maxsize=8192)
def _subsets(vs: frozenset[str]) -> tuple[frozenset[str], ...]:
    names = sorted(vs)
    return tuple(
        frozenset(combo)
        for r in range(len(names) + 1)
        for combo in combinations(names, r)
    )


# --------------------------------------------------------------------------
# Marginal engine
# --------------------------------------------------------------------------


def _check_marginal(sigma: AtomSet) -> None:
    for a in sigma.atoms:
        if a.kind != MARGINAL:
            raise ValueError(f"conditional atom present in marginal engine: {a}")


@lru_cache(maxsize=512)
def _marginal_closure(atoms: frozenset[Atom], universe: frozenset[str]) -> dict:
    """Least rule-closed atom set over the universe, with first-derivation parents.

    Returns {atom: (rule, (premise atoms...))}.  FIFO worklist over canonical
    seeds keeps the recorded parents (hence the extracted proofs) deterministic.
    """
    parents: dict[Atom, tuple[str, tuple[Atom, ...]]] = {}
    queue: deque[Atom] = deque()
    by_left: dict[frozenset, list[Atom]] = {}
    by_union: dict[frozenset, list[Atom]] = {}

    def record(atom: Atom, rule: str, premises: tuple[Atom, ...]) -> None:
        if atom in parents:
            return
        parents[atom] = (rule, premises)
        queue.append(atom)
        by_left.setdefault(atom.left, []).append(atom)
        by_union.setdefault(atom.left | atom.right, []).append(atom)

    for hyp in sorted(atoms, key=Atom.sort_key):
        record(hyp, HYP, ())
    for xs in _subsets(universe):
        record(Atom(xs, frozenset()), "A3", ())

    empty = frozenset()
    while queue:
        a = queue.popleft()
        left, right = a.left, a.right
        record(Atom(right, left), "B3", (a,))
        for sub in _subsets(right):
            if sub != right:
                record(Atom(left, sub), "C3", (a,))
        # D3 with a as first premise
        for b in tuple(by_left.get(left | right, ())):
            record(Atom(left, right | b.right), "D3", (a, b))
        # D3 with a as second premise
        for b in tuple(by_union.get(left, ())):
            record(Atom(b.left, b.right | right), "D3", (b, a))
        if len(left) == 1 and left == right:
            for ys in _subsets(universe):
                record(Atom(left, ys), "E3", (a,))
    return parents


def saturate_marginal(sigma: AtomSet) -> frozenset[Atom]:
    """All marginal atoms over sigma.universe derivable from sigma."""
    _check_marginal(sigma)
    return frozenset(_marginal_closure(sigma.atoms, sigma.universe))


def is_derivable_marginal(sigma: AtomSet, goal: Atom) -> bool:
    """Fast derivability check (no proof reconstruction)."""
    _check_marginal(sigma)
    if goal.kind != MARGINAL:
        raise ValueError(f"goal is not a marginal atom: {goal}")
    universe = sigma.universe | goal.vars
    return goal in _marginal_closure(sigma.atoms, universe)


def _extract_proof(parents: dict, goal: Atom) -> Proof:
    order: list[Atom] = []
    index: dict[Atom, int] = {}

    def visit(atom: Atom) -> None:
        if atom in index:
            return
        _, premises = parents[atom]
        for p in premises:
            visit(p)
        index[atom] = len(order) + 1
        order.append(atom)

    visit(goal)
    steps = tuple(
        ProofStep(atom, parents[atom][0], tuple(index[p] for p in parents[atom][1]))
        for atom in order
    )
    return Proof(steps)


def derives_marginal(sigma: AtomSet, goal: Atom) -> Verdict:
    """Decide sigma |- goal in the marginal system, with a replayable proof."""
    _check_marginal(sigma)
    if goal.kind != MARGINAL:
        raise ValueError(f"goal is not a marginal atom: {goal}")
    universe = sigma.universe | goal.vars
    parents = _marginal_closure(sigma.atoms, universe)
    if goal not in parents:
        return Verdict.not_derivable()
    return Verdict.derived(_extract_proof(parents, goal))


def minimal_nonderivable(sigma: AtomSet, goal: Atom) -> Atom:
    """Shrink a non-derivable goal until every single-variable deletion derives.

    Deterministic scan: left side then right side, each in canonical order; a
    variable is deleted permanently when the reduced atom stays non-derivable.
    """
    _check_marginal(sigma)
    universe = sigma.universe | goal.vars
    parents = _marginal_closure(sigma.atoms, universe)
    if goal in parents:
        raise ValueError(f"goal is derivable: {goal}")
    left = set(goal.left)
    right = set(goal.right)
    for v in sorted(goal.left):
        cand = Atom(frozenset(left - {v}), frozenset(right))
        if cand not in parents:
            left.discard(v)
    for v in sorted(goal.right):
        cand = Atom(frozenset(left), frozenset(right - {v}))
        if cand not in parents:
            right.discard(v)
    return Atom(frozenset(left), frozenset(right))


# --------------------------------------------------------------------------
# Conditional engine
# --------------------------------------------------------------------------


def _f5_left_decompositions(b_left: frozenset[str], z: frozenset[str]) -> Iterator[frozenset[str]]:
    # Every X with Z ∪ X = b_left: the mandatory part is b_left - Z, the
    # optional part any subset of Z ∩ b_left (written sequences may repeat
    # variables of the condition).
    mandatory = b_left - z
    for extra in _subsets(z & b_left):
        yield mandatory | extra


@lru_cache(maxsize=256)
def _conditional_closure(atoms: frozenset[Atom], universe: frozenset[str], depth: int) -> dict:
    """Depth-bounded synchronous forward chaining over the conditional rules.

    Round 0 holds the hypotheses and every A5 instance over the universe; each
    later round adds all single-rule consequences of the previous rounds.
    Returns {atom: (rule, premises, round)}.
    """
    parents: dict[Atom, tuple[str, tuple[Atom, ...], int]] = {}

    def record(atom: Atom, rule: str, premises: tuple[Atom, ...], rnd: int) -> bool:
        if atom in parents:
            return False
        parents[atom] = (rule, premises, rnd)
        return True

    for hyp in sorted(atoms, key=Atom.sort_key):
        record(lift(hyp), HYP, (), 0)
    # A5 seeds: x̄ ⊥_{x̄} ȳ for all variable subsets of the universe.
    for xs in _subsets(universe):
        for ys in _subsets(universe):
            record(Atom(xs, ys, xs, CONDITIONAL), "A5", (), 0)

    for rnd in range(1, depth + 1):
        current = sorted(parents, key=Atom.sort_key)
        by_cond_right: dict[tuple, list[Atom]] = {}
        by_cond: dict[frozenset, list[Atom]] = {}
        by_cond_left: dict[tuple, list[Atom]] = {}
        for a in current:
            by_cond_right.setdefault((a.condition, a.right), []).append(a)
            by_cond.setdefault(a.condition, []).append(a)
            by_cond_left.setdefault((a.condition, a.left), []).append(a)

        fresh: list[tuple[Atom, str, tuple[Atom, ...]]] = []
        for a in current:
            l, r, c = a.left, a.right, a.condition
            fresh.append((Atom(r, l, c, CONDITIONAL), "B5", (a,)))
            for ls in _subsets(l):
                for rs in _subsets(r):
                    if ls != l or rs != r:
                        fresh.append((Atom(ls, rs, c, CONDITIONAL), "C5", (a,)))
            fresh.append((Atom(l | c, r | c, c, CONDITIONAL), "D5", (a,)))
            # E5: a is the first premise x̄ ⊥_z̄ ȳ; partner ū ⊥_{z̄x̄} ȳ.
            for b in by_cond_right.get((c | l, r), ()):
                fresh.append((Atom(b.left, r, c, CONDITIONAL), "E5", (a, b)))
            # F5: a must have equal sides; partner z̄x̄ ⊥_ȳ ū with condition = a.left,
            # whose left side must cover z̄ = a.condition to be writable as z̄x̄.
            if l == r:
                for b in by_cond.get(l, ()):
                    if c <= b.left:
                        for xs in _f5_left_decompositions(b.left, c):
                            fresh.append((Atom(xs, b.right, c, CONDITIONAL), "F5", (a, b)))
            # G5: a is the first premise; partner x̄ȳ ⊥_z̄ ū with the same condition.
            for b in by_cond_left.get((c, l | r), ()):
                fresh.append((Atom(l, r | b.right, c, CONDITIONAL), "G5", (a, b)))

        added = False
        for atom, rule, premises in fresh:
            added |= record(atom, rule, premises, rnd)
        if not added:
            break
    return parents


def _conditional_universe(sigma: AtomSet, goal: Atom | None = None) -> frozenset[str]:
    return sigma.universe | (goal.vars if goal is not None else frozenset())


def saturate_conditional(sigma: AtomSet, depth: int) -> frozenset[Atom]:
    """All conditional atoms reachable within `depth` rounds (marginal atoms lifted)."""
    if depth < 1:
        raise ValueError("depth must be positive")
    return frozenset(_conditional_closure(sigma.atoms, sigma.universe, depth))


def is_derivable_conditional(sigma: AtomSet, goal: Atom, depth: int) -> bool:
    if depth < 1:
        raise ValueError("depth must be positive")
    universe = _conditional_universe(sigma, goal)
    return lift(goal) in _conditional_closure(sigma.atoms, universe, depth)


def derives_conditional(sigma: AtomSet, goal: Atom, depth: int = 6) -> Verdict:
    """Depth-bounded conditional derivability: Derived or Unknown, never NotDerivable."""
    if depth < 1:
        raise ValueError("depth must be positive")
    universe = _conditional_universe(sigma, goal)
    parents = _conditional_closure(sigma.atoms, universe, depth)
    lifted = lift(goal)
    if lifted not in parents:
        return Verdict.unknown(depth)
    flat = {atom: (rule, premises) for atom, (rule, premises, _) in parents.items()}
    return Verdict.derived(_extract_proof(flat, lifted))


# --------------------------------------------------------------------------
# Proof replay
# --------------------------------------------------------------------------


def _require(ok: bool, index: int, message: str) -> None:
    if not ok:
        raise InvalidProofError(f"step {index}: {message}")


def replay_proof(proof: Proof, sigma: AtomSet) -> None:
    """Validate every step against its rule schema; raises InvalidProofError."""
    for i, step in enumerate(proof.steps, start=1):
        prem = []
        for p in step.premises:
            _require(1 <= p < i, i, f"premise index {p} out of range")
            prem.append(proof.steps[p - 1].atom)
        a = step.atom
        rule = step.rule
        if rule == HYP:
            _require(a in sigma.atoms or (a.kind == CONDITIONAL and not a.condition
                                          and Atom(a.left, a.right) in sigma.atoms),
                     i, f"{a} is not a hypothesis")
        elif rule == "A3":
            _require(a.kind == MARGINAL and not a.right and not step.premises, i, "bad A3 instance")
        elif rule == "B3":
            _require(len(prem) == 1 and a == prem[0].swapped(), i, "bad B3 instance")
        elif rule == "C3":
            (p,) = prem
            _require(a.kind == MARGINAL and a.left == p.left and a.right <= p.right,
                     i, "bad C3 instance")
        elif rule == "D3":
            p, q = prem
            _require(q.left == p.left | p.right and a == Atom(p.left, p.right | q.right),
                     i, "bad D3 instance")
        elif rule == "E3":
            (p,) = prem
            _require(len(p.left) == 1 and p.left == p.right and a.left == p.left,
                     i, "bad E3 instance")
        elif rule == "A5":
            _require(a.kind == CONDITIONAL and a.condition == a.left and not step.premises,
                     i, "bad A5 instance")
        elif rule == "B5":
            (p,) = prem
            _require(a == p.swapped(), i, "bad B5 instance")
        elif rule == "C5":
            (p,) = prem
            _require(a.condition == p.condition and a.left <= p.left and a.right <= p.right,
                     i, "bad C5 instance")
        elif rule == "D5":
            (p,) = prem
            _require(a == Atom(p.left | p.condition, p.right | p.condition, p.condition, CONDITIONAL),
                     i, "bad D5 instance")
        elif rule == "E5":
            p, q = prem
            _require(q.condition == p.condition | p.left and q.right == p.right
                     and a == Atom(q.left, p.right, p.condition, CONDITIONAL),
                     i, "bad E5 instance")
        elif rule == "F5":
            p, q = prem
            _require(p.left == p.right and q.condition == p.left
                     and a.condition == p.condition and a.right == q.right
                     and a.left <= q.left and a.left | p.condition == q.left,
                     i, "bad F5 instance")
        elif rule == "G5":
            p, q = prem
            _require(q.condition == p.condition and q.left == p.left | p.right
                     and a == Atom(p.left, p.right | q.right, p.condition, CONDITIONAL),
                     i, "bad G5 instance")
        else:
            raise InvalidProofError(f"step {i}: unknown rule {rule!r}")
