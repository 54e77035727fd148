"""Independence atoms: canonical data model, parsing and printing.

An atom is either marginal (``x,y _|_ z``) or conditional (``x _|_{c,d} y``).
Variable sides are stored as sets, so permutation and duplication of the
written variable lists never produce distinct atoms.

Concrete grammar (ASCII, whitespace around tokens ignored)::

    atom      := varlist SEP varlist
    SEP       := "_|_" | "_|_{" varlist "}"
    varlist   := "()" | var ("," var)*
    var       := [A-Za-z_][A-Za-z0-9_]*

The separator is located by its leftmost occurrence, which resolves the
pathological case of a variable name ending in an underscore directly
against the separator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "MARGINAL",
    "CONDITIONAL",
    "AtomSyntaxError",
    "Atom",
    "AtomSet",
    "canonicalize",
    "parse_atom",
    "format_atom",
    "format_varlist",
    "parse_atom_list",
    "parse_atom_file",
    "marginal",
    "conditional",
]

MARGINAL = "marginal"
CONDITIONAL = "conditional"

_VAR_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_SEP_RE = re.compile(r"_\|_")


class AtomSyntaxError(ValueError):
    """Malformed atom text; ``position`` is a 0-based offset into the input."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def check_variable(name: str, position: int = 0) -> str:
    if not _VAR_RE.match(name):
        raise AtomSyntaxError(f"invalid variable name {name!r}", position)
    return name


@dataclass(frozen=True)
class Atom:
    """A canonical independence atom.

    ``kind`` is fixed at construction: a marginal atom always has an empty
    condition, while a conditional atom may have any condition including the
    empty one (``x _|_{()} y`` is conditional, ``x _|_ y`` is marginal).
    """

    left: frozenset[str]
    right: frozenset[str]
    condition: frozenset[str] = frozenset()
    kind: str = MARGINAL

    def __post_init__(self):
        if self.kind not in (MARGINAL, CONDITIONAL):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == MARGINAL and self.condition:
            raise ValueError("marginal atom cannot carry a condition")
        for v in self.left | self.right | self.condition:
            check_variable(v)

    @property
    def vars(self) -> frozenset[str]:
        return self.left | self.right | self.condition

    def swapped(self) -> "Atom":
        return Atom(self.right, self.left, self.condition, self.kind)

    def is_marginal(self) -> bool:
        return self.kind == MARGINAL

    def sort_key(self):
        return (
            self.kind,
            sorted(self.condition),
            sorted(self.left),
            sorted(self.right),
        )

    def __str__(self) -> str:
        return format_atom(self)

    def __repr__(self) -> str:
        return f"Atom({format_atom(self)!r})"


def marginal(left: Iterable[str], right: Iterable[str]) -> Atom:
    return Atom(frozenset(left), frozenset(right))


def conditional(left: Iterable[str], right: Iterable[str], condition: Iterable[str]) -> Atom:
    return Atom(frozenset(left), frozenset(right), frozenset(condition), CONDITIONAL)


def lift(atom: Atom) -> Atom:
    """The conditional form of an atom (marginal atoms get an empty condition)."""
    if atom.kind == CONDITIONAL:
        return atom
    return Atom(atom.left, atom.right, frozenset(), CONDITIONAL)


def canonicalize(
    left: Iterable[str],
    right: Iterable[str],
    condition: Iterable[str] = (),
) -> Atom:
    """Collapse variable sequences to a canonical atom.

    Two sequence triples related by permutation or duplication map to the
    identical Atom value.  An empty condition sequence yields a marginal atom.
    """
    cond = frozenset(condition)
    if cond:
        return Atom(frozenset(left), frozenset(right), cond, CONDITIONAL)
    return Atom(frozenset(left), frozenset(right))


def format_varlist(vs: Iterable[str]) -> str:
    names = sorted(vs)
    return ",".join(names) if names else "()"


def format_atom(atom: Atom) -> str:
    """Deterministic canonical text; inverse of parse_atom."""
    sep = "_|_" if atom.kind == MARGINAL else "_|_{%s}" % format_varlist(atom.condition)
    return f"{format_varlist(atom.left)} {sep} {format_varlist(atom.right)}"


def _parse_varlist(text: str, offset: int) -> list[str]:
    stripped = text.strip()
    pos = offset + text.index(stripped) if stripped else offset
    if not stripped:
        raise AtomSyntaxError("empty variable list (write '()' for the empty list)", pos)
    if stripped == "()":
        return []
    names = []
    cursor = pos
    for part in stripped.split(","):
        name = part.strip()
        if not name:
            raise AtomSyntaxError("empty variable name in list", cursor)
        check_variable(name, cursor + part.index(name))
        names.append(name)
        cursor += len(part) + 1
    return names


def parse_atom(text: str) -> Atom:
    """Parse one atom; raises AtomSyntaxError with a position on bad input."""
    m = _SEP_RE.search(text)
    if m is None:
        raise AtomSyntaxError("missing '_|_' separator", len(text))
    left = _parse_varlist(text[: m.start()], 0)
    rest = text[m.end() :]
    rest_off = m.end()
    stripped = rest.lstrip()
    cond: list[str] = []
    kind = MARGINAL
    if stripped.startswith("{"):
        brace = rest.index("{")
        close = rest.find("}", brace)
        if close < 0:
            raise AtomSyntaxError("unterminated condition list", rest_off + brace)
        cond = _parse_varlist(rest[brace + 1 : close], rest_off + brace + 1)
        kind = CONDITIONAL
        rest = rest[close + 1 :]
        rest_off += close + 1
    right = _parse_varlist(rest, rest_off)
    if kind == CONDITIONAL:
        return Atom(frozenset(left), frozenset(right), frozenset(cond), CONDITIONAL)
    return Atom(frozenset(left), frozenset(right))


@dataclass(frozen=True)
class AtomSet:
    """A finite set of atoms with a declared variable universe.

    The universe always contains every variable occurring in the atoms and may
    declare extra variables on top.
    """

    atoms: frozenset[Atom]
    universe: frozenset[str]

    def __post_init__(self):
        occurring = frozenset().union(*(a.vars for a in self.atoms)) if self.atoms else frozenset()
        if not occurring <= self.universe:
            missing = sorted(occurring - self.universe)
            raise ValueError(f"universe is missing variables {missing}")

    @classmethod
    def of(cls, atoms: Iterable[Atom], extra_vars: Iterable[str] = ()) -> "AtomSet":
        atom_set = frozenset(atoms)
        universe = frozenset(extra_vars)
        for a in atom_set:
            universe |= a.vars
        return cls(atom_set, universe)

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=Atom.sort_key)

    def with_universe(self, extra: Iterable[str]) -> "AtomSet":
        return AtomSet(self.atoms, self.universe | frozenset(extra))

    def all_marginal(self) -> bool:
        return all(a.kind == MARGINAL for a in self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.sorted_atoms())

    def __len__(self) -> int:
        return len(self.atoms)


def parse_atom_list(text: str, sep: str = ";") -> list[Atom]:
    """Parse a separator-joined list of atoms (CLI inline syntax)."""
    chunks = [c for c in (chunk.strip() for chunk in text.split(sep)) if c]
    return [parse_atom(c) for c in chunks]


def parse_atom_file(lines: Iterable[str]) -> AtomSet:
    """Parse the atom file format.

    One atom per line; '#' starts a comment line; the first non-comment line
    may read 'vars: v1,v2,...' to declare extra universe variables.
    """
    atoms: list[Atom] = []
    extra: list[str] = []
    seen_content = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_content and line.lower().startswith("vars:"):
            seen_content = True
            decl = line[len("vars:") :].strip()
            if decl:
                extra = [check_variable(v.strip()) for v in decl.split(",")]
            continue
        seen_content = True
        try:
            atoms.append(parse_atom(line))
        except AtomSyntaxError as exc:
            raise AtomSyntaxError(f"line {lineno}: {exc}", exc.position) from exc
    return AtomSet.of(atoms, extra)
