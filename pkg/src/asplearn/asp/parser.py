"""Parser for the restricted ASP fragment.

Grammar (statements end with `.`, comments run from `%` to end of line):

    statement := head? (':-' body)? '.'
    head      := atom | choice
    choice    := [num] '{' [atom (';' atom)*] '}' [num]
    body      := literal (',' literal)*
    literal   := 'not' atom | atom | term cmpop term
    cmpop     := '=' | '!=' | '<' | '>' | '<=' | '>='
    term      := factor (('+' | '\\') factor)*
    atom      := ident ['(' term (',' term)* ')']

Interval facts `p(l..u).` expand to u-l+1 ground facts at parse time.
Arithmetic is only accepted inside comparisons.  `not` over a comparison is
rewritten to the complementary operator.  Anonymous variables `_` are given
fresh names.  Directives (`#...`) are rejected here; see learn.bias for the
mode-declaration grammar.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .errors import ParseError, SafetyError, UnsupportedConstructError
from .syntax import (
    Arith,
    Atom,
    AtomLit,
    Choice,
    Cmp,
    NEGATED_OP,
    Num,
    Program,
    Rule,
    Sym,
    Var,
    term_vars,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<op>:-|\.\.|!=|<=|>=|[.,;:(){}=<>+\\])
  | (?P<directive>\#[a-z]+)
  | (?P<other>.)
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind},{self.text!r})"


def tokenize(text: str) -> List[Token]:
    tokens = []
    line = 1
    line_start = 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            line += value.count("\n")
            if "\n" in value:
                line_start = m.start() + value.rfind("\n") + 1
            continue
        if kind == "comment":
            continue
        col = m.start() - line_start + 1
        if kind == "other":
            raise ParseError(f"unexpected character {value!r}", line, col)
        tokens.append(Token(kind, value, line, col))
    tokens.append(Token("eof", "", line, 0))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token], allow_intervals=True):
        self.tokens = tokens
        self.pos = 0
        self.allow_intervals = allow_intervals
        self._anon_counter = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def error(self, msg: str):
        tok = self.peek()
        raise ParseError(msg + (f", found {tok.text!r}" if tok.text else " at end of input"), tok.line, tok.col)

    # --- terms -----------------------------------------------------------

    def parse_term(self, allow_arith: bool):
        left = self.parse_factor()
        while self.peek().text in ("+", "\\"):
            if not allow_arith:
                self.error("arithmetic is only allowed inside comparisons")
            op = self.next().text
            right = self.parse_factor()
            left = Arith(op, left, right)
        return left

    def parse_factor(self):
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return Num(int(tok.text))
        if tok.kind == "ident":
            self.next()
            return Sym(tok.text)
        if tok.kind == "var":
            self.next()
            if tok.text == "_":
                self._anon_counter += 1
                return Var(f"_Anon{self._anon_counter}")
            return Var(tok.text)
        self.error("expected a term")

    # --- atoms and literals ----------------------------------------------

    def parse_atom(self) -> Tuple[Atom, Optional[Tuple[int, int]]]:
        """Returns (atom, interval) where interval is (lo, hi) for `p(l..u)`."""
        tok = self.peek()
        if tok.kind != "ident":
            self.error("expected a predicate name")
        name = self.next().text
        if self.peek().text != "(":
            return Atom(name), None
        self.next()
        # interval form p(l..u)
        if (
            self.allow_intervals
            and self.peek().kind == "num"
            and self.tokens[self.pos + 1].text == ".."
        ):
            lo = int(self.next().text)
            self.expect("..")
            hi_tok = self.next()
            if hi_tok.kind != "num":
                raise ParseError("interval bound must be an integer", hi_tok.line, hi_tok.col)
            hi = int(hi_tok.text)
            self.expect(")")
            if hi < lo:
                raise ParseError(f"empty interval {lo}..{hi}", tok.line, tok.col)
            return Atom(name, (Num(lo),)), (lo, hi)
        args = [self.parse_term(allow_arith=False)]
        while self.peek().text == ",":
            self.next()
            args.append(self.parse_term(allow_arith=False))
        self.expect(")")
        return Atom(name, tuple(args)), None

    def parse_literal(self):
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "not":
            # `not` only ever appears as the NAF keyword in this fragment
            nxt = self.tokens[self.pos + 1]
            if nxt.kind == "ident":
                self.next()
                atom, interval = self.parse_atom()
                if interval is not None:
                    self.error("intervals are only allowed in facts")
                if self.peek().text in NEGATED_OP:
                    self.error("negated comparison chains are not supported")
                return AtomLit(atom, negated=True)
        # an atom or the left side of a comparison
        if tok.kind == "ident" and self.tokens[self.pos + 1].text not in (
            "+",
            "\\",
            "=",
            "!=",
            "<",
            ">",
            "<=",
            ">=",
        ):
            atom, interval = self.parse_atom()
            if interval is not None:
                self.error("intervals are only allowed in facts")
            return AtomLit(atom)
        left = self.parse_term(allow_arith=True)
        op_tok = self.peek()
        if op_tok.text not in NEGATED_OP:
            if isinstance(left, (Sym,)) and not isinstance(left, Arith):
                # plain 0-ary atom
                return AtomLit(Atom(left.name))
            self.error("expected a comparison operator")
        self.next()
        right = self.parse_term(allow_arith=True)
        return Cmp(op_tok.text, left, right)

    # --- rules -------------------------------------------------------------

    def parse_choice(self) -> Choice:
        lower = 0
        if self.peek().kind == "num":
            lower = int(self.next().text)
        self.expect("{")
        elements = []
        if self.peek().text != "}":
            atom, interval = self.parse_atom()
            if interval is not None:
                self.error("intervals are only allowed in facts")
            elements.append(atom)
            while self.peek().text == ";":
                self.next()
                atom, interval = self.parse_atom()
                if interval is not None:
                    self.error("intervals are only allowed in facts")
                elements.append(atom)
        self.expect("}")
        upper = len(elements)
        if self.peek().kind == "num":
            upper = int(self.next().text)
        if not 0 <= lower <= upper:
            tok = self.peek()
            raise ParseError(f"choice bounds must satisfy 0 <= {lower} <= {upper}", tok.line, tok.col)
        return Choice(lower, upper, tuple(elements))

    def parse_statement(self) -> List[Rule]:
        tok = self.peek()
        if tok.kind == "directive":
            raise UnsupportedConstructError(
                f"directive {tok.text!r} is not part of a program; "
                "mode declarations belong in a bias file (line %d)" % tok.line
            )
        head = None
        interval = None
        if tok.text != ":-":
            if tok.kind == "num" or tok.text == "{":
                head = self.parse_choice()
            else:
                head, interval = self.parse_atom()
        body = []
        if self.peek().text == ":-":
            self.next()
            if interval is not None:
                self.error("intervals are only allowed in facts")
            body.append(self.parse_literal())
            while self.peek().text == ",":
                self.next()
                body.append(self.parse_literal())
        self.expect(".")
        if interval is not None:
            lo, hi = interval
            return [Rule(Atom(head.pred, (Num(v),))) for v in range(lo, hi + 1)]
        return [Rule(head, tuple(body))]

    def parse_program(self) -> List[Rule]:
        rules = []
        while self.peek().kind != "eof":
            rules.extend(self.parse_statement())
        return rules


def bound_vars(rule: Rule) -> frozenset:
    """Variables bound by positive body atoms, closed under `=` assignments."""
    bound = set()
    for lit in rule.body:
        if isinstance(lit, AtomLit) and not lit.negated:
            bound |= lit.atom.vars()
    changed = True
    while changed:
        changed = False
        for lit in rule.body:
            if not isinstance(lit, Cmp) or lit.op != "=":
                continue
            for var_side, expr_side in ((lit.left, lit.right), (lit.right, lit.left)):
                if (
                    isinstance(var_side, Var)
                    and var_side.name not in bound
                    and term_vars(expr_side) <= bound
                ):
                    bound.add(var_side.name)
                    changed = True
    return frozenset(bound)


def check_safety(rule: Rule):
    bound = bound_vars(rule)
    unsafe = rule.vars() - bound
    if unsafe:
        names = ", ".join(sorted(unsafe))
        raise SafetyError(f"unsafe variables {{{names}}}", str(rule))


def parse_program(text: str, require_safety: bool = True) -> Program:
    """Parse program text; interval facts are expanded, safety is checked.

    The canonical re-serialization of the result round-trips through this
    parser.  `require_safety=False` is used internally when rules carry their
    variable typing out of band (mode-schema instances).
    """
    rules = _Parser(tokenize(text)).parse_program()
    if require_safety:
        for rule in rules:
            check_safety(rule)
    return Program(tuple(rules))


def parse_rule(text: str, require_safety: bool = True) -> Rule:
    prog = parse_program(text, require_safety=require_safety)
    if len(prog.rules) != 1:
        raise ParseError(f"expected exactly one rule, got {len(prog.rules)}")
    return prog.rules[0]


def parse_ground_atom(text: str) -> Atom:
    """Parse a single ground atom, e.g. for WCDPI inclusion sets."""
    rule = parse_rule(text.rstrip(". \t") + ".")
    if not rule.is_fact():
        raise ParseError(f"expected a ground atom, got {text!r}")
    if not rule.head.is_ground():
        raise ParseError(f"atom is not ground: {text!r}")
    return rule.head
