"""Team semantics for independence atoms, plus brute-force countermodel search.

A team is a finite set of assignments from a variable domain into small
integer value tokens.  A marginal atom holds when for every pair of rows some
third row agrees with the first on the left side and with the second on the
right side; a conditional atom localizes that check to groups of rows sharing
the condition values.

The countermodel search enumerates teams in a canonical order (first row
all-zero, values introduced in increasing order down each column), which is
exhaustive up to the per-column value bijections that team satisfaction is
invariant under.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping

from .atoms import Atom, AtomSet, CONDITIONAL, MARGINAL

__all__ = [
    "Team",
    "satisfies_marginal",
    "satisfies_conditional",
    "satisfies_atom",
    "satisfies_set",
    "find_counterexample_team",
    "team_to_csv",
    "team_from_csv",
]

# Largest canonical enumeration that gets materialized and bitmask-indexed;
# beyond this the search streams candidates without cross-call caching.
_POOL_CAP = 70_000


@dataclass(frozen=True)
class Team:
    """Finite set of total assignments dom -> values (rows are duplicate-free)."""

    dom: tuple[str, ...]
    rows: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if tuple(sorted(self.dom)) != self.dom:
            raise ValueError("team domain must be sorted")
        n = len(self.dom)
        for row in self.rows:
            if len(row) != n:
                raise ValueError(f"row {row} does not match domain {self.dom}")

    @classmethod
    def of(cls, rows: Iterable[Mapping[str, int]]) -> "Team":
        """Build a team from row dicts; the domain is the union of their keys."""
        rows = list(rows)
        dom = tuple(sorted(set().union(*(r.keys() for r in rows)))) if rows else ()
        packed = frozenset(tuple(r[v] for v in dom) for r in rows)
        return cls(dom, packed)

    @property
    def values(self) -> frozenset[int]:
        return frozenset(v for row in self.rows for v in row)

    def sorted_rows(self) -> list[tuple[int, ...]]:
        return sorted(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def _indices(dom: tuple[str, ...], vs: frozenset[str]) -> tuple[int, ...]:
    missing = vs.difference(dom)
    if missing:
        raise ValueError(f"variables {sorted(missing)} outside team domain {dom}")
    return tuple(i for i, v in enumerate(dom) if v in vs)


def _forall_exists(rows, li, ri) -> bool:
    """Literal forall s, s' exists s'' check over row projections."""
    pairs = {(tuple(r[i] for i in li), tuple(r[i] for i in ri)) for r in rows}
    lefts = {p for p, _ in pairs}
    rights = {q for _, q in pairs}
    for p in lefts:
        for q in rights:
            if (p, q) not in pairs:
                return False
    return True


def _product_check(rows, li, ri) -> bool:
    """Projection onto left+right equals the product of the side projections."""
    pairs = {(tuple(r[i] for i in li), tuple(r[i] for i in ri)) for r in rows}
    lefts = {p for p, _ in pairs}
    rights = {q for _, q in pairs}
    return len(pairs) == len(lefts) * len(rights)


def satisfies_marginal(team: Team, atom: Atom) -> bool:
    if atom.kind != MARGINAL:
        raise ValueError(f"not a marginal atom: {atom}")
    li = _indices(team.dom, atom.left)
    ri = _indices(team.dom, atom.right)
    if atom.left & atom.right:
        return _forall_exists(team.rows, li, ri)
    return _product_check(team.rows, li, ri)


def satisfies_conditional(team: Team, atom: Atom) -> bool:
    if atom.kind != CONDITIONAL:
        raise ValueError(f"not a conditional atom: {atom}")
    ci = _indices(team.dom, atom.condition)
    li = _indices(team.dom, atom.left)
    ri = _indices(team.dom, atom.right)
    groups: dict[tuple, list] = {}
    for row in team.rows:
        groups.setdefault(tuple(row[i] for i in ci), []).append(row)
    return all(_forall_exists(rows, li, ri) for rows in groups.values())


def satisfies_atom(team: Team, atom: Atom) -> bool:
    if atom.kind == MARGINAL:
        return satisfies_marginal(team, atom)
    return satisfies_conditional(team, atom)


def satisfies_set(team: Team, sigma: AtomSet) -> bool:
    return all(satisfies_atom(team, a) for a in sigma.atoms)


# --------------------------------------------------------------------------
# Canonical team enumeration
# --------------------------------------------------------------------------


def _candidate_rows(colmax: tuple[int, ...], v_limit: int) -> Iterator[tuple[int, ...]]:
    # Lexicographic; per column, at most one fresh value above the current max.
    return product(*(range(min(cm + 2, v_limit)) for cm in colmax))


def _teams_of_size(n_cols: int, v_limit: int, size: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    first = (0,) * n_cols
    zero_max = (0,) * n_cols

    def extend(rows, colmax, todo):
        if todo == 0:
            yield rows
            return
        last = rows[-1]
        for cand in _candidate_rows(colmax, v_limit):
            if cand > last:
                newmax = tuple(max(m, c) for m, c in zip(colmax, cand))
                yield from extend(rows + (cand,), newmax, todo - 1)

    if size >= 1:
        yield from extend((first,), zero_max, size - 1)


def _canonical_teams(n_cols: int, v_limit: int, r_limit: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All canonical teams, smallest first, lexicographic within a size."""
    r_cap = min(r_limit, v_limit ** n_cols if n_cols else 1)
    for size in range(1, r_cap + 1):
        yield from _teams_of_size(n_cols, v_limit, size)


def _pool_upper_bound(n_cols: int, v_limit: int, r_limit: int) -> int:
    from math import comb

    row_space = v_limit ** n_cols
    total = 0
    for size in range(1, min(r_limit, row_space) + 1):
        total += comb(row_space - 1, size - 1)
        if total > _POOL_CAP:
            return total
    return total


@lru_cache(maxsize=64)
def _team_pool(dom: tuple[str, ...], v_limit: int, r_limit: int) -> tuple[Team, ...] | None:
    if _pool_upper_bound(len(dom), v_limit, r_limit) > _POOL_CAP:
        return None
    return tuple(
        Team(dom, frozenset(rows))
        for rows in _canonical_teams(len(dom), v_limit, r_limit)
    )


@lru_cache(maxsize=200_000)
def _atom_mask(dom: tuple[str, ...], v_limit: int, r_limit: int, atom: Atom) -> int:
    """Bit i set iff pool team i satisfies the atom."""
    pool = _team_pool(dom, v_limit, r_limit)
    mask = 0
    for i, team in enumerate(pool):
        if satisfies_atom(team, atom):
            mask |= 1 << i
    return mask


def _search_limits(sigma: AtomSet, goal: Atom, max_values: int, max_rows: int) -> tuple[int, int]:
    """Effective enumeration bounds.

    For purely marginal inputs any existing countermodel has an isomorphic copy
    with two values and at most 2^max(1, |vars(goal)|-1) rows (the completeness
    construction lands in Q^k with k below that exponent, and its mod-2
    linear-forms team is a countermodel of that size), so exhausting the capped
    space decides absence outright.  Conditional inputs get no such cap.
    """
    if goal.kind == MARGINAL and sigma.all_marginal():
        v_limit = min(max_values, 2)
        r_limit = min(max_rows, 2 ** max(1, len(goal.vars) - 1))
        return v_limit, r_limit
    return max_values, max_rows


def find_counterexample_team(
    sigma: AtomSet,
    goal: Atom,
    max_values: int = 4,
    max_rows: int = 16,
) -> Team | None:
    """Deterministic search for a team satisfying sigma and refuting goal.

    Returns the canonically least countermodel within the bounds (fewest rows,
    then lexicographically least row list), or None when the bounded canonical
    space holds none.  Every returned team is re-verified before returning.
    """
    if max_values < 1 or max_rows < 1:
        raise ValueError("bounds must be positive")
    dom = tuple(sorted(sigma.universe | goal.vars))
    v_limit, r_limit = _search_limits(sigma, goal, max_values, max_rows)

    def verified(team: Team) -> Team:
        if not satisfies_set(team, sigma) or satisfies_atom(team, goal):
            raise AssertionError(f"countermodel failed re-verification: {team}")
        return team

    pool = _team_pool(dom, v_limit, r_limit)
    if pool is not None:
        full = (1 << len(pool)) - 1
        candidates = full
        for a in sigma.sorted_atoms():
            candidates &= _atom_mask(dom, v_limit, r_limit, a)
            if not candidates:
                return None
        candidates &= full ^ _atom_mask(dom, v_limit, r_limit, goal)
        if not candidates:
            return None
        index = (candidates & -candidates).bit_length() - 1
        return verified(pool[index])

    for rows in _canonical_teams(len(dom), v_limit, r_limit):
        team = Team(dom, frozenset(rows))
        if not satisfies_atom(team, goal) and satisfies_set(team, sigma):
            return verified(team)
    return None


# --------------------------------------------------------------------------
# CSV interchange
# --------------------------------------------------------------------------


def team_to_csv(team: Team) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(team.dom)
    for row in team.sorted_rows():
        writer.writerow(row)
    return buf.getvalue()


def team_from_csv(text: str) -> Team:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty team CSV") from None
    dom = tuple(header)
    if tuple(sorted(dom)) != dom:
        order = sorted(range(len(dom)), key=lambda i: dom[i])
        dom_sorted = tuple(dom[i] for i in order)
    else:
        order = list(range(len(dom)))
        dom_sorted = dom
    rows = set()
    for lineno, raw in enumerate(reader, start=2):
        if not raw:
            continue
        if len(raw) != len(dom):
            raise ValueError(f"line {lineno}: expected {len(dom)} values, got {len(raw)}")
        try:
            row = tuple(int(raw[i]) for i in order)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer value ({exc})") from None
        rows.add(row)
    return Team(dom_sorted, frozenset(rows))
