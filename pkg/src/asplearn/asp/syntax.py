"""AST for the restricted ASP fragment.

Terms are constants (symbols), integers, variables or binary arithmetic
expressions (`+`, integer `\\`).  Atoms are keyed by (predicate, arity), so
`suit(h)` and `suit(1, h)` are distinct predicates.  All nodes are frozen and
hashable; programs and answer sets are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple, Union


@dataclass(frozen=True)
class Sym:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Num:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arith:
    """Binary integer arithmetic, only allowed inside comparisons."""

    op: str  # '+' or '\\'
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


Term = Union[Sym, Num, Var, Arith]

COMPARISON_OPS = ("=", "!=", "<", ">", "<=", ">=")

# NAF over a comparison is rewritten to the complementary operator at parse
# time; comparisons are never NAF-negated in the AST.
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", ">": "<=", "<=": ">", ">=": "<"}


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Arith):
        return term_vars(t.left) | term_vars(t.right)
    return frozenset()


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Arith):
        return term_is_ground(t.left) and term_is_ground(t.right)
    return True


def eval_term(t: Term):
    """Evaluate a ground term.  Arithmetic requires integer operands."""
    from .errors import GroundingError

    if isinstance(t, (Sym, Num)):
        return t
    if isinstance(t, Arith):
        left = eval_term(t.left)
        right = eval_term(t.right)
        if not isinstance(left, Num) or not isinstance(right, Num):
            raise GroundingError(f"arithmetic over non-integers: {t}")
        if t.op == "+":
            return Num(left.value + right.value)
        if t.op == "\\":
            if right.value == 0:
                raise GroundingError(f"modulo by zero: {t}")
            return Num(left.value % right.value)
        raise GroundingError(f"unknown arithmetic operator {t.op!r}")
    raise GroundingError(f"cannot evaluate non-ground term {t}")


def term_key(t: Term):
    """Sort key for ground terms: integers ascending before symbols ascending."""
    if isinstance(t, Num):
        return (0, t.value, "")
    if isinstance(t, Sym):
        return (1, 0, t.name)
    raise ValueError(f"term_key requires a ground non-arith term, got {t}")


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self):
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(term_is_ground(a) for a in self.args)

    def vars(self) -> frozenset:
        out = frozenset()
        for a in self.args:
            out |= term_vars(a)
        return out

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"


def atom_key(a: Atom):
    """Canonical ordering: predicate name, then argument tuples."""
    return (a.pred, len(a.args), tuple(term_key(t) for t in a.args))


@dataclass(frozen=True)
class AtomLit:
    atom: Atom
    negated: bool = False  # negation as failure

    def vars(self):
        return self.atom.vars()

    def __str__(self):
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Term
    right: Term

    negated = False  # comparisons are rewritten, never NAF'd

    def vars(self):
        return term_vars(self.left) | term_vars(self.right)

    def holds(self) -> bool:
        lhs = eval_term(self.left)
        rhs = eval_term(self.right)
        if self.op in ("<", ">", "<=", ">="):
            if not isinstance(lhs, Num) or not isinstance(rhs, Num):
                from .errors import GroundingError

                raise GroundingError(f"ordered comparison over non-integers: {self}")
            a, b = lhs.value, rhs.value
            return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[self.op]
        eq = lhs == rhs
        return eq if self.op == "=" else not eq

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


Literal = Union[AtomLit, Cmp]


@dataclass(frozen=True)
class Choice:
    """Choice head `lb { a1; ...; an } ub` with 0 <= lb <= ub."""

    lower: int
    upper: int
    elements: Tuple[Atom, ...]

    def vars(self):
        out = frozenset()
        for a in self.elements:
            out |= a.vars()
        return out

    def __str__(self):
        inner = "; ".join(str(a) for a in self.elements)
        return f"{self.lower} {{ {inner} }} {self.upper}"


Head = Union[Atom, Choice, None]  # None encodes a constraint


@dataclass(frozen=True)
class Rule:
    head: Head
    body: Tuple[Literal, ...] = ()

    def is_fact(self) -> bool:
        return isinstance(self.head, Atom) and not self.body

    def is_constraint(self) -> bool:
        return self.head is None

    def is_choice(self) -> bool:
        return isinstance(self.head, Choice)

    def head_atoms(self) -> Tuple[Atom, ...]:
        if self.head is None:
            return ()
        if isinstance(self.head, Choice):
            return self.head.elements
        return (self.head,)

    def vars(self) -> frozenset:
        out = frozenset() if self.head is None else self.head.vars()
        for lit in self.body:
            out |= lit.vars()
        return out

    def is_ground(self) -> bool:
        return not self.vars()

    def __str__(self):
        head = "" if self.head is None else str(self.head)
        if not self.body:
            return f"{head}."
        body = ", ".join(str(l) for l in self.body)
        if head:
            return f"{head} :- {body}."
        return f":- {body}."


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...] = ()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules)

    def extend(self, rules: Iterable[Rule]) -> "Program":
        return Program(self.rules + tuple(rules))

    def is_ground(self) -> bool:
        return all(r.is_ground() for r in self.rules)

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)


@dataclass(frozen=True)
class AnswerSet:
    """A stable model; atoms are exposed in canonical order."""

    atoms: frozenset

    def sorted_atoms(self):
        return sorted(self.atoms, key=atom_key)

    @property
    def key(self):
        return tuple(atom_key(a) for a in self.sorted_atoms())

    def __contains__(self, atom):
        return atom in self.atoms

    def __len__(self):
        return len(self.atoms)

    def __str__(self):
        return "{" + ", ".join(str(a) for a in self.sorted_atoms()) + "}"


def sort_answer_sets(models: Iterable[AnswerSet]):
    return sorted(models, key=lambda m: m.key)


def make_atom(pred: str, *args) -> Atom:
    """Convenience constructor: ints become Num, strings become Sym."""
    conv = []
    for a in args:
        if isinstance(a, int):
            conv.append(Num(a))
        elif isinstance(a, str):
            conv.append(Sym(a))
        else:
            conv.append(a)
    return Atom(pred, tuple(conv))
