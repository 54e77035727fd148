"""Concrete pregeometric closure models with exact rational arithmetic.

Two model kinds are supported:

* ``vspace``  — Q^dim with linear-span closure,
* ``lattice`` — Z^dim with pure closure: v belongs to the pure closure of S
  iff some positive multiple of v lies in the integer span of S, which for
  these models is exactly rational-span membership plus integrality.

Both share the rational rank function, computed by exact Gaussian
elimination.  The derived independence relation ``indep`` compares rank drops
over a base; the axiom harness samples it against the pre-independence laws.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

__all__ = [
    "Rational",
    "Vector",
    "VSPACE",
    "LATTICE",
    "ClosureModel",
    "IndependenceQuery",
    "DimensionMismatchError",
    "DependentSequenceError",
    "ChainStepError",
    "vector_space",
    "integer_lattice",
    "parse_model",
    "format_model",
    "parse_vector",
    "format_vector",
    "zero_vector",
    "basis_vector",
    "ones_vector",
    "vector_sum",
    "rank",
    "in_closure",
    "indep",
    "is_independent_sequence",
    "is_algebraic",
    "check_federation_witness",
    "federation_index_lower_bound",
    "hyttinen_chain",
    "ChainReport",
    "axiom_suite",
    "AxiomReport",
    "AXIOM_NAMES",
]

Rational = Fraction
Number = int | Fraction
Vector = tuple  # tuple of Number, length = model dimension

VSPACE = "vspace"
LATTICE = "lattice"


class DimensionMismatchError(ValueError):
    pass


class DependentSequenceError(ValueError):
    pass


class ChainStepError(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"chain step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class ClosureModel:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (VSPACE, LATTICE):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")


@dataclass(frozen=True)
class IndependenceQuery:
    a: frozenset
    b: frozenset
    base: frozenset = frozenset()


def vector_space(dim: int) -> ClosureModel:
    return ClosureModel(VSPACE, dim)


def integer_lattice(dim: int) -> ClosureModel:
    return ClosureModel(LATTICE, dim)


def parse_model(text: str) -> ClosureModel:
    """Model declaration syntax: 'vspace:Q:<dim>' or 'lattice:Z:<dim>'."""
    parts = text.strip().split(":")
    if len(parts) == 3 and parts[0] == "vspace" and parts[1] == "Q":
        return vector_space(int(parts[2]))
    if len(parts) == 3 and parts[0] == "lattice" and parts[1] == "Z":
        return integer_lattice(int(parts[2]))
    raise ValueError(f"bad model declaration {text!r} (want 'vspace:Q:<dim>' or 'lattice:Z:<dim>')")


def format_model(model: ClosureModel) -> str:
    return f"vspace:Q:{model.dim}" if model.kind == VSPACE else f"lattice:Z:{model.dim}"


# --------------------------------------------------------------------------
# Vectors
# --------------------------------------------------------------------------


def _num(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def parse_vector(text: str) -> Vector:
    """Vector literal: '[1/2, -3, 0]' (rationals as 'p/q' or integers)."""
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise ValueError(f"bad vector literal {text!r}")
    body = stripped[1:-1].strip()
    if not body:
        return ()
    return tuple(_num(Fraction(part.strip())) for part in body.split(","))


def format_vector(v: Vector) -> str:
    return "[" + ", ".join(str(_num(Fraction(x))) for x in v) + "]"


def zero_vector(dim: int) -> Vector:
    return (0,) * dim


def basis_vector(dim: int, i: int) -> Vector:
    if not 0 <= i < dim:
        raise DimensionMismatchError(f"basis index {i} out of range for dimension {dim}")
    return tuple(1 if j == i else 0 for j in range(dim))


def ones_vector(dim: int) -> Vector:
    return (1,) * dim


def vector_sum(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatchError(f"cannot add vectors of lengths {len(u)} and {len(v)}")
    return tuple(_num(Fraction(a) + Fraction(b)) for a, b in zip(u, v))


def _check_elements(model: ClosureModel, vectors: Iterable[Vector]) -> frozenset:
    out = set()
    for v in vectors:
        if len(v) != model.dim:
            raise DimensionMismatchError(
                f"vector {v} has length {len(v)}, model dimension is {model.dim}"
            )
        if model.kind == LATTICE and not _is_integral(v):
            raise ValueError(f"lattice element must be integral: {v}")
        out.add(v)
    return frozenset(out)


def _is_integral(v: Vector) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


# --------------------------------------------------------------------------
# Rank and closure
# --------------------------------------------------------------------------


@lru_cache(maxsize=200_000)
def _rank_of(vectors: frozenset) -> int:
    rows = [[Fraction(x) for x in v] for v in sorted(vectors)]
    if not rows:
        return 0
    cols = len(rows[0])
    pivots = 0
    for col in range(cols):
        pivot_row = None
        for r in range(pivots, len(rows)):
            if rows[r][col]:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        rows[pivots], rows[pivot_row] = rows[pivot_row], rows[pivots]
        pivot = rows[pivots][col]
        for r in range(pivots + 1, len(rows)):
            factor = rows[r][col] / pivot
            if factor:
                for c in range(col, cols):
                    rows[r][c] -= factor * rows[pivots][c]
        pivots += 1
        if pivots == len(rows):
            break
    return pivots


def rank(model: ClosureModel, s: Iterable[Vector]) -> int:
    """Rank of the rational span (the lattice pure closure has the same rank)."""
    return _rank_of(_check_elements(model, s))


def in_closure(model: ClosureModel, v: Vector, s: Iterable[Vector]) -> bool:
    """Closure membership: linear span for vspace, pure closure for lattice."""
    elements = _check_elements(model, s)
    if len(v) != model.dim:
        raise DimensionMismatchError(
            f"vector {v} has length {len(v)}, model dimension is {model.dim}"
        )
    if model.kind == LATTICE and not _is_integral(v):
        return False
    return _rank_of(elements | {v}) == _rank_of(elements)


def indep(
    model: ClosureModel,
    a: Iterable[Vector] | IndependenceQuery,
    b: Iterable[Vector] = (),
    base: Iterable[Vector] = (),
) -> bool:
    """Pregeometric independence: rank(a over base+b) equals rank(a over base)."""
    if isinstance(a, IndependenceQuery):
        a, b, base = a.a, a.b, a.base
    sa = _check_elements(model, a)
    sb = _check_elements(model, b)
    sc = _check_elements(model, base)
    return _rank_of(sa | sc | sb) - _rank_of(sc | sb) == _rank_of(sa | sc) - _rank_of(sc)


def is_algebraic(model: ClosureModel, tup: Iterable[Vector], base: Iterable[Vector] = ()) -> bool:
    elements = frozenset(tup)
    return indep(model, elements, elements, base)


def is_independent_sequence(
    model: ClosureModel, seq: Sequence[Vector], base: Iterable[Vector] = ()
) -> bool:
    """Every prefix is independent from the next element over the base."""
    seen = set()
    for v in seq:
        if v in seen:
            raise DependentSequenceError(f"duplicate element {v} in sequence")
        seen.add(v)
    base = frozenset(base)
    for j in range(len(seq)):
        if not indep(model, frozenset(seq[:j]), {seq[j]}, base):
            return False
    return True


def check_federation_witness(
    model: ClosureModel, seq: Sequence[Vector], d: Vector, base: Iterable[Vector] = ()
) -> bool:
    """d depends on the whole sequence but on no one-element-deleted subsequence."""
    base = frozenset(base)
    if not is_independent_sequence(model, seq, base):
        raise DependentSequenceError(f"sequence is not independent over the base: {list(seq)}")
    full = frozenset(seq)
    if indep(model, {d}, full, base):
        return False
    return all(indep(model, {d}, full - {a}, base) for a in seq)


def federation_index_lower_bound(
    model: ClosureModel, n: int
) -> tuple[list[Vector], list[Vector]]:
    """Standard-basis sequence plus prefix-sum witnesses establishing IF >= n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > model.dim:
        raise DimensionMismatchError(f"n={n} exceeds ambient dimension {model.dim}")
    seq = [basis_vector(model.dim, i) for i in range(n)]
    witnesses = []
    for m in range(1, n + 1):
        d = zero_vector(model.dim)
        for v in seq[:m]:
            d = vector_sum(d, v)
        if not check_federation_witness(model, seq[:m], d):
            raise AssertionError(f"prefix-sum witness failed federation check at m={m}")
        witnesses.append(d)
    return seq, witnesses


# --------------------------------------------------------------------------
# Chain construction (federated-pregeometry witness)
# --------------------------------------------------------------------------


@dataclass
class ChainStepReport:
    index: int
    properties: dict[str, bool]


@dataclass
class ChainReport:
    chain: list[Vector]
    steps: list[ChainStepReport]
    final_in_full_closure: bool
    final_outside_proper_closures: dict[int, bool]

    @property
    def ok(self) -> bool:
        return (
            all(all(p.properties.values()) for p in self.steps)
            and self.final_in_full_closure
            and all(self.final_outside_proper_closures.values())
        )


def hyttinen_chain(
    model: ClosureModel,
    d_sequence: Sequence[Vector],
    combiner: Callable[[Vector, Vector], Vector],
    base: Iterable[Vector] = (),
) -> tuple[list[Vector], ChainReport]:
    """Inductive chain d*_0 = d_0, d*_{i+1} = combiner(d*_i, d_{i+1}).

    Each combiner output must land in cl(base ∪ {d*_i, d_{i+1}}) but outside
    both one-point closures; a violation raises ChainStepError naming the
    failed membership.  The report records the chain-link properties for every
    step and checks that the last chain element witnesses that the closure of
    the full sequence strictly exceeds the union of proper-subset closures.
    """
    base = frozenset(base)
    seq = list(d_sequence)
    if not seq:
        raise ValueError("empty sequence")
    if not is_independent_sequence(model, seq, base):
        raise DependentSequenceError("sequence is not independent over the base")

    def cl(*extra: Vector) -> frozenset:
        return base | frozenset(extra)

    chain = [seq[0]]
    for i in range(1, len(seq)):
        prev, nxt = chain[-1], seq[i]
        out = combiner(prev, nxt)
        if not in_closure(model, out, cl(prev, nxt)):
            raise ChainStepError(i, f"output {out} is not in cl(base ∪ {{d*_{i-1}, d_{i}}})")
        if in_closure(model, out, cl(prev)):
            raise ChainStepError(i, f"output lies in cl(base ∪ {{d*_{i-1}}})")
        if in_closure(model, out, cl(nxt)):
            raise ChainStepError(i, f"output lies in cl(base ∪ {{d_{i}}})")
        chain.append(out)

    steps = []
    m = len(seq)
    for i in range(1, m):
        star_prev, star_i, d_i = chain[i - 1], chain[i], seq[i]
        props = {
            "ii_in_join": in_closure(model, star_i, cl(star_prev, d_i)),
            "ii_outside_prev": not in_closure(model, star_i, cl(star_prev)),
            "ii_outside_di": not in_closure(model, star_i, cl(d_i)),
            "iii_in_join": in_closure(model, star_prev, cl(star_i, d_i)),
            "iii_outside_star": not in_closure(model, star_prev, cl(star_i)),
            "iii_outside_di": not in_closure(model, star_prev, cl(d_i)),
            "iv_in_join": in_closure(model, d_i, cl(star_prev, star_i)),
            "iv_outside_prev": not in_closure(model, d_i, cl(star_prev)),
            "iv_outside_star": not in_closure(model, d_i, cl(star_i)),
        }
        steps.append(ChainStepReport(i, props))
    for i in range(m - 1):
        star_i, d_next = chain[i], seq[i + 1]
        steps.append(
            ChainStepReport(
                i,
                {
                    "i_star_outside_next": not in_closure(model, star_i, cl(d_next)),
                    "i_next_outside_star": not in_closure(model, d_next, cl(star_i)),
                },
            )
        )

    final = chain[-1]
    in_full = in_closure(model, final, base | frozenset(seq))
    outside = {
        j: not in_closure(model, final, base | (frozenset(seq) - {seq[j]}))
        for j in range(m)
    }
    report = ChainReport(chain, steps, in_full, outside)
    return chain, report


# --------------------------------------------------------------------------
# Axiom harness
# --------------------------------------------------------------------------

AXIOM_NAMES = (
    "invariance",
    "existence",
    "monotonicity",
    "base_monotonicity",
    "symmetry",
    "transitivity",
    "transitivity_iff",
    "normality",
    "finite_character",
    "anti_reflexivity",
    "exchange",
)

IndepFn = Callable[[frozenset, frozenset, frozenset], bool]


@dataclass
class AxiomResult:
    name: str
    trials: int = 0
    premise_hits: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class AxiomReport:
    model: ClosureModel
    seed: int
    results: dict[str, AxiomResult]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def summary_lines(self) -> list[str]:
        lines = []
        for name in AXIOM_NAMES:
            r = self.results[name]
            status = "pass" if r.passed else "FAIL"
            line = f"{name:<18} {status}  trials={r.trials} premise_hits={r.premise_hits}"
            if r.failures:
                line += f" witness={r.failures[0]}"
            lines.append(line)
        return lines


def _subsets_of(rng: random.Random, s: frozenset) -> frozenset:
    items = sorted(s)
    return frozenset(v for v in items if rng.random() < 0.5)


def _sample_pool(model: ClosureModel, rng: random.Random) -> list[Vector]:
    dim = model.dim
    pool: list[Vector] = [zero_vector(dim)]
    pool += [basis_vector(dim, i) for i in range(dim)]
    for i in range(dim - 1):
        pool.append(vector_sum(basis_vector(dim, i), basis_vector(dim, i + 1)))
    pool.append(ones_vector(dim))
    for _ in range(4):
        pool.append(tuple(rng.randint(-2, 2) for _ in range(dim)))
    if model.kind == LATTICE:
        pool.append(tuple(2 * x for x in basis_vector(dim, 0)))
    return pool


def _sample_set(rng: random.Random, pool: list[Vector], max_size: int = 3) -> frozenset:
    k = rng.randint(0, max_size)
    return frozenset(rng.sample(pool, k)) if k else frozenset()


def _random_linear_map(model: ClosureModel, rng: random.Random) -> Callable[[Vector], Vector]:
    # Product of elementary row operations: always invertible; unimodular for
    # the lattice kind, with extra rational scalings for the vector-space kind.
    dim = model.dim
    m = [[Fraction(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
    for _ in range(3 * max(dim, 1)):
        op = rng.randrange(3)
        i, j = rng.randrange(dim), rng.randrange(dim)
        if op == 0 and i != j:
            m[i], m[j] = m[j], m[i]
        elif op == 1 and i != j:
            k = rng.choice([-2, -1, 1, 2])
            m[i] = [a + k * b for a, b in zip(m[i], m[j])]
        elif op == 2:
            if model.kind == VSPACE:
                k = rng.choice([Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(3)])
            else:
                k = rng.choice([-1, 1])
            m[i] = [k * a for a in m[i]]

    def apply(v: Vector) -> Vector:
        return tuple(_num(sum((Fraction(c) * Fraction(x) for c, x in zip(row, v)), Fraction(0))) for row in m)

    return apply


# Per-axiom instance checkers.  Each returns (premises_held, conclusion_held);
# conclusion_held is meaningful only when premises held.  Exposed so tests can
# drive them with crafted witnesses.

def check_existence(ind: IndepFn, a, b):
    return True, ind(a, b, a)


def check_monotonicity(ind: IndepFn, a, b, c, d_sub):
    if not ind(a, b, c):
        return False, True
    return True, ind(d_sub, b, c)


def check_base_monotonicity(ind: IndepFn, a, b, c, d):
    if not (d <= c and c <= b and ind(a, b, d)):
        return False, True
    return True, ind(a, b, c)


def check_symmetry(ind: IndepFn, a, b, c):
    if not ind(a, b, c):
        return False, True
    return True, ind(b, a, c)


def check_transitivity(ind: IndepFn, a, b, c, d):
    if not (d <= c and c <= b and ind(b, a, c) and ind(c, a, d)):
        return False, True
    return True, ind(b, a, d)


def check_transitivity_iff(ind: IndepFn, a, b, c, d):
    lhs = ind(a, b, c) and ind(a, d, c | b)
    rhs = ind(a, b | d, c)
    return True, lhs == rhs


def check_normality(ind: IndepFn, a, b, c):
    if not ind(a, b, c):
        return False, True
    return True, ind(a | c, b, c)


def check_finite_character(ind: IndepFn, a, b, c):
    subsets_hold = all(
        ind(frozenset(sub), b, c)
        for sub in _all_subsets(a)
    )
    return True, subsets_hold == ind(a, b, c)


def check_anti_reflexivity(ind: IndepFn, a, b, c):
    if not ind(a, a, b):
        return False, True
    return True, ind(a, c, b)


def check_exchange(ind: IndepFn, a, b, c, d):
    if not (ind(a, b, d) and ind(a | b, c, d)):
        return False, True
    return True, ind(a, b | c, d)


def _all_subsets(s: frozenset):
    from itertools import combinations

    items = sorted(s)
    for r in range(len(items) + 1):
        for combo in combinations(items, r):
            yield combo


def axiom_suite(
    model: ClosureModel,
    seed: int = 0,
    trials: int = 500,
    indep_fn: IndepFn | None = None,
) -> AxiomReport:
    """Sample the pre-independence axioms, Prop-2.2 transitivity and Exchange.

    Every failure is recorded with the witness sets.  ``indep_fn`` can swap in
    a corrupted relation so tests can confirm the harness detects violations.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    pool = _sample_pool(model, rng)
    ind: IndepFn = indep_fn or (lambda a, b, base: indep(model, a, b, base))

    results = {name: AxiomResult(name) for name in AXIOM_NAMES}

    def run(name, premises_held, conclusion_held, witness):
        r = results[name]
        r.trials += 1
        if premises_held:
            r.premise_hits += 1
            if not conclusion_held:
                r.failures.append(witness)

    for _ in range(trials):
        a = _sample_set(rng, pool)
        b = _sample_set(rng, pool)
        c = _sample_set(rng, pool)

        f = _random_linear_map(model, rng)
        before = ind(a, b, c)
        after = ind(frozenset(map(f, a)), frozenset(map(f, b)), frozenset(map(f, c)))
        run("invariance", True, before == after, (sorted(a), sorted(b), sorted(c)))

        run("existence", *check_existence(ind, a, b), (sorted(a), sorted(b)))

        d_sub = _subsets_of(rng, a)
        run("monotonicity", *check_monotonicity(ind, a, b, c, d_sub),
            (sorted(a), sorted(b), sorted(c), sorted(d_sub)))

        big_b = a | b | c
        mid_c = _subsets_of(rng, big_b)
        small_d = _subsets_of(rng, mid_c)
        run("base_monotonicity", *check_base_monotonicity(ind, a, big_b, mid_c, small_d),
            (sorted(a), sorted(big_b), sorted(mid_c), sorted(small_d)))

        run("symmetry", *check_symmetry(ind, a, b, c), (sorted(a), sorted(b), sorted(c)))

        run("transitivity", *check_transitivity(ind, a, big_b, mid_c, small_d),
            (sorted(a), sorted(big_b), sorted(mid_c), sorted(small_d)))

        d2 = _sample_set(rng, pool)
        run("transitivity_iff", *check_transitivity_iff(ind, a, b, c, d2),
            (sorted(a), sorted(b), sorted(c), sorted(d2)))

        run("normality", *check_normality(ind, a, b, c), (sorted(a), sorted(b), sorted(c)))

        small_a = frozenset(rng.sample(sorted(a), min(len(a), 2))) if a else a
        run("finite_character", *check_finite_character(ind, small_a, b, c),
            (sorted(small_a), sorted(b), sorted(c)))

        run("anti_reflexivity", *check_anti_reflexivity(ind, a, b, c),
            (sorted(a), sorted(b), sorted(c)))

        run("exchange", *check_exchange(ind, a, b, c, d2),
            (sorted(a), sorted(b), sorted(c), sorted(d2)))

    return AxiomReport(model, seed, results)
