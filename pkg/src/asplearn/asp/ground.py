"""Grounder: instantiate a safe program over its finite derivable universe.

The universe is the least fixpoint of head atoms derivable when NAF literals
are ignored and choice elements are treated as derivable whenever the positive
body is.  Comparisons and arithmetic are evaluated during instantiation (a
false comparison drops the instance, a true one is removed from the body);
`=` comparisons with a single unbound variable act as assignments.  NAF
literals over atoms outside the final universe are removed as vacuously true.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import CapacityError, GroundingError
from .syntax import (
    Arith,
    Atom,
    AtomLit,
    Choice,
    Cmp,
    Num,
    Program,
    Rule,
    Sym,
    Term,
    Var,
    eval_term,
    term_is_ground,
    term_vars,
)


@dataclass
class GroundLimits:
    max_ground_rules: int = 200_000
    max_atoms: int = 200_000


DEFAULT_LIMITS = GroundLimits()


def subst_term(t: Term, binding: dict) -> Term:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, Arith):
        return Arith(t.op, subst_term(t.left, binding), subst_term(t.right, binding))
    return t


def subst_atom(a: Atom, binding: dict) -> Atom:
    if not a.args:
        return a
    return Atom(a.pred, tuple(subst_term(t, binding) for t in a.args))


def match_atom(pattern: Atom, fact: Atom, binding: dict) -> Optional[dict]:
    """Unify a (possibly non-ground) pattern against a ground fact."""
    if pattern.pred != fact.pred or len(pattern.args) != len(fact.args):
        return None
    new = None
    for p, f in zip(pattern.args, fact.args):
        if isinstance(p, Var):
            cur = (new or binding).get(p.name)
            if cur is None:
                if new is None:
                    new = dict(binding)
                new[p.name] = f
            elif cur != f:
                return None
        else:
            if isinstance(p, Arith):
                return None  # arithmetic not allowed in atom args
            if p != f:
                return None
    return new if new is not None else binding


class _Universe:
    """Insertion-ordered atom store indexed by (pred, arity)."""

    def __init__(self):
        self.by_pred: Dict[Tuple[str, int], List[Atom]] = {}
        self.all: Dict[Atom, None] = {}

    def add(self, atom: Atom) -> bool:
        if atom in self.all:
            return False
        self.all[atom] = None
        self.by_pred.setdefault(atom.key, []).append(atom)
        return True

    def candidates(self, pattern: Atom) -> List[Atom]:
        return self.by_pred.get(pattern.key, [])

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.all

    def __len__(self):
        return len(self.all)


def _plan(rule: Rule) -> List[Tuple[str, object]]:
    """Order body elements into a join plan.

    Greedy: repeatedly take a positive atom literal (most bound variables
    first, ties by body position), interleaving any comparison that became
    decidable (test) or bindable (assign).  NAF literals go last.
    """
    positives = [
        (i, lit) for i, lit in enumerate(rule.body) if isinstance(lit, AtomLit) and not lit.negated
    ]
    comparisons = [(i, lit) for i, lit in enumerate(rule.body) if isinstance(lit, Cmp)]
    nafs = [(i, lit) for i, lit in enumerate(rule.body) if isinstance(lit, AtomLit) and lit.negated]

    plan: List[Tuple[str, object]] = []
    bound: set = set()
    pending_cmp = list(comparisons)
    pending_pos = list(positives)

    def flush_comparisons():
        changed = True
        while changed:
            changed = False
            for item in list(pending_cmp):
                _, cmp = item
                lv = term_vars(cmp.left)
                rv = term_vars(cmp.right)
                if lv | rv <= bound:
                    plan.append(("test", cmp))
                    pending_cmp.remove(item)
                    changed = True
                elif cmp.op == "=":
                    for var_side, expr_side in ((cmp.left, cmp.right), (cmp.right, cmp.left)):
                        if (
                            isinstance(var_side, Var)
                            and var_side.name not in bound
                            and term_vars(expr_side) <= bound
                        ):
                            plan.append(("assign", (var_side, expr_side)))
                            bound.add(var_side.name)
                            pending_cmp.remove(item)
                            changed = True
                            break

    flush_comparisons()
    while pending_pos:
        best = max(pending_pos, key=lambda item: (len(item[1].vars() & bound), -item[0]))
        pending_pos.remove(best)
        plan.append(("match", best[1].atom))
        bound |= best[1].vars()
        flush_comparisons()
    if pending_cmp:
        stuck = ", ".join(str(c) for _, c in pending_cmp)
        raise GroundingError(f"unguarded variables in comparison(s) {stuck} of rule: {rule}")
    for _, lit in nafs:
        if not lit.vars() <= bound:
            raise GroundingError(f"unguarded variables in NAF literal {lit} of rule: {rule}")
        plan.append(("naf", lit.atom))
    head_vars = frozenset() if rule.head is None else rule.head.vars()
    if not head_vars <= bound:
        missing = ", ".join(sorted(head_vars - bound))
        raise GroundingError(f"unguarded head variables {{{missing}}} in rule: {rule}")
    return plan


def _instantiate(plan, universe: _Universe, binding: dict, idx: int = 0) -> Iterator[dict]:
    """Yield every complete binding for the plan against the universe."""
    if idx == len(plan):
        yield binding
        return
    kind, payload = plan[idx]
    if kind == "match":
        pattern = subst_atom(payload, binding)
        if pattern.is_ground():
            if pattern in universe:
                yield from _instantiate(plan, universe, binding, idx + 1)
            return
        for fact in universe.candidates(pattern):
            new = match_atom(pattern, fact, binding)
            if new is not None:
                yield from _instantiate(plan, universe, new, idx + 1)
        return
    if kind == "assign":
        var, expr = payload
        value = eval_term(subst_term(expr, binding))
        new = dict(binding)
        new[var.name] = value
        yield from _instantiate(plan, universe, new, idx + 1)
        return
    if kind == "test":
        cmp = payload
        ground_cmp = Cmp(cmp.op, subst_term(cmp.left, binding), subst_term(cmp.right, binding))
        if ground_cmp.holds():
            yield from _instantiate(plan, universe, binding, idx + 1)
        return
    # NAF literals do not constrain the universe fixpoint or bind variables
    yield from _instantiate(plan, universe, binding, idx + 1)


def _ground_head(rule: Rule, binding: dict):
    if rule.head is None:
        return None
    if isinstance(rule.head, Choice):
        elements = tuple(subst_atom(a, binding) for a in rule.head.elements)
        return Choice(rule.head.lower, rule.head.upper, elements)
    return subst_atom(rule.head, binding)


def ground_program(program: Program, limits: GroundLimits = DEFAULT_LIMITS) -> Program:
    """Ground a safe program.  See module docstring for semantics."""
    plans = []
    for rule in program.rules:
        plans.append((rule, _plan(rule)))

    universe = _Universe()
    # fixpoint over derivable heads
    changed = True
    while changed:
        changed = False
        for rule, plan in plans:
            for binding in _instantiate(plan, universe, {}):
                head = _ground_head(rule, binding)
                if head is None:
                    continue
                atoms = head.elements if isinstance(head, Choice) else (head,)
                for atom in atoms:
                    if universe.add(atom):
                        changed = True
                if len(universe) > limits.max_atoms:
                    raise CapacityError(
                        f"derivable-atom cap exceeded ({limits.max_atoms}); "
                        "raise GroundLimits.max_atoms if intended"
                    )

    # final pass: emit simplified ground instances
    out: List[Rule] = []
    seen = set()
    for rule, plan in plans:
        for binding in _instantiate(plan, universe, {}):
            head = _ground_head(rule, binding)
            body: List = []
            skip = False
            for lit in rule.body:
                if isinstance(lit, Cmp):
                    continue  # evaluated inside the join
                atom = subst_atom(lit.atom, binding)
                if lit.negated:
                    if atom not in universe:
                        continue  # vacuously true
                    body.append(AtomLit(atom, negated=True))
                else:
                    body.append(AtomLit(atom))
            if skip:
                continue
            ground_rule = Rule(head, tuple(body))
            if ground_rule in seen:
                continue
            seen.add(ground_rule)
            out.append(ground_rule)
            if len(out) > limits.max_ground_rules:
                raise CapacityError(
                    f"ground-rule cap exceeded ({limits.max_ground_rules}); "
                    "raise GroundLimits.max_ground_rules if intended"
                )
    return Program(tuple(out))
