"""
Precedence-climbing parser for the formula grammar.

Binding strength from loosest to tightest:

    quantifiers / contexts  (prefix, body extends as far right as possible)
    <->                     (left)
    ->                      (right)
    |  or                   (left)
    &  and                  (left)
    U S R P                 (right, optional {Γ} subscript)
    ! not X Y F G O H K[a]  (prefix)
    atoms: p, p@x, [pltl]@x, true, false, ( ... )

Four kinds share the grammar: ``ghyper`` (trace-relativized atoms, trace
quantifiers, contexts and Γ subscripts), ``pltl``, ``qptl`` (adds
``exists p.`` / ``forall p.``) and ``kltl`` (adds ``K[a]``). Inside ``{...}``
and ``[...]`` the parser switches to ``pltl``.
"""

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .errors import EmptyContextError, FormulaSyntaxError
from .formula import (
    And,
    Always,
    Ctx,
    Eventually,
    Exists,
    ExistsP,
    ExistsProp,
    FALSE,
    Forall,
    ForallP,
    ForallProp,
    Formula,
    Historically,
    Iff,
    Implies,
    Knows,
    Next,
    Not,
    Once,
    Or,
    PastRelease,
    Prop,
    RelPltl,
    RelProp,
    Release,
    Since,
    TRUE,
    Until,
    Yesterday,
    canonical_gamma,
)

KINDS = ("ghyper", "pltl", "qptl", "kltl")

_TOKEN_RE = re.compile(
    r"""
    (?P<NEWLINE>\n)
  | (?P<SKIP>[ \t\r]+|\#[^\n]*)
  | (?P<OP><->|->|[!&|()\[\]{},.@<>])
  | (?P<IDENT>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<BAD>.)
    """,
    re.VERBOSE,
)

_UNARY_TEMPORAL = {
    "X": Next,
    "Y": Yesterday,
    "F": Eventually,
    "G": Always,
    "O": Once,
    "H": Historically,
}
_BINARY_TEMPORAL = {"U": Until, "S": Since, "R": Release, "P": PastRelease}

# (precedence, right-associative, builder)
_BINARY: Dict[str, Tuple[int, bool, Optional[Callable]]] = {
    "<->": (1, False, Iff),
    "->": (2, True, Implies),
    "|": (3, False, Or),
    "or": (3, False, Or),
    "&": (4, False, And),
    "and": (4, False, And),
    "U": (5, True, None),
    "S": (5, True, None),
    "R": (5, True, None),
    "P": (5, True, None),
}
_QUANTIFIERS = {"exists", "forall", "existsP", "forallP"}
_KEYWORDS = (
    set(_UNARY_TEMPORAL)
    | set(_BINARY_TEMPORAL)
    | _QUANTIFIERS
    | {"true", "false", "and", "or", "not", "K"}
)


@dataclass(frozen=True)
class Token:
    kind: str  # OP | IDENT | EOF
    value: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind == "SKIP":
            continue
        if kind == "BAD":
            raise FormulaSyntaxError(f"unexpected character {match.group()!r}", line, column)
        tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, kind: str, allow_internal: bool):
        if kind not in KINDS:
            raise ValueError(f"unknown formula kind {kind!r}")
        self.tokens = tokenize(text)
        self.index = 0
        self.kind = kind
        self.allow_internal = allow_internal or kind == "qptl"

    # ── token helpers ──────────────────────────────────────────────────────

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        self.index += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> FormulaSyntaxError:
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok.line, tok.column)

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind == "EOF" or tok.value != value:
            found = tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")
        return self.advance()

    def is_op(self, value: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind == "OP" and tok.value == value

    def name(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value in _KEYWORDS:
            raise self.error(f"expected {what} name, found {tok.value or 'end of input'!r}")
        if tok.value.startswith("$") and not self.allow_internal:
            raise self.error(f"names starting with '$' are reserved: {tok.value!r}")
        self.advance()
        return tok.value

    def with_kind(self, kind: str, fn: Callable[[], Formula]) -> Formula:
        saved = self.kind
        self.kind = kind
        try:
            return fn()
        finally:
            self.kind = saved

    # ── grammar ────────────────────────────────────────────────────────────

    def parse(self) -> Formula:
        result = self.expression(0)
        if self.peek().kind != "EOF":
            raise self.error(f"unexpected {self.peek().value!r}")
        return result

    def binary_operator(self) -> Optional[str]:
        tok = self.peek()
        if tok.kind == "OP" and tok.value in _BINARY:
            return tok.value
        if tok.kind == "IDENT" and tok.value in _BINARY:
            return tok.value
        return None

    def expression(self, min_prec: int) -> Formula:
        lhs = self.unary()
        while True:
            op = self.binary_operator()
            if op is None:
                return lhs
            prec, right_assoc, builder = _BINARY[op]
            if prec < min_prec:
                return lhs
            op_tok = self.advance()
            if op in _BINARY_TEMPORAL:
                gamma = self.subscript(op_tok)
                rhs = self.expression(prec if right_assoc else prec + 1)
                lhs = _BINARY_TEMPORAL[op](lhs, rhs, gamma)
            else:
                rhs = self.expression(prec if right_assoc else prec + 1)
                lhs = builder(lhs, rhs)

    def subscript(self, op_tok: Token) -> tuple:
        if not self.is_op("{"):
            return ()
        brace = self.advance()
        items: List[Formula] = []
        if not self.is_op("}"):
            items.append(self.with_kind("pltl", lambda: self.expression(0)))
            while self.is_op(","):
                self.advance()
                items.append(self.with_kind("pltl", lambda: self.expression(0)))
        self.expect("}")
        if items and self.kind != "ghyper":
            raise self.error(f"Γ subscript on {op_tok.value} is only allowed in ghyper formulas", brace)
        return canonical_gamma(items)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "!" or tok.kind == "IDENT" and tok.value == "not":
            self.advance()
            return Not(self.unary())
        if tok.kind == "IDENT" and tok.value in _UNARY_TEMPORAL:
            self.advance()
            gamma = self.subscript(tok)
            return _UNARY_TEMPORAL[tok.value](self.unary(), gamma)
        if tok.kind == "IDENT" and tok.value == "K":
            if self.kind != "kltl":
                raise self.error("knowledge operator K[a] is only allowed in kltl formulas")
            self.advance()
            self.expect("[")
            agent = self.name("agent")
            self.expect("]")
            return Knows(agent, self.unary())
        if tok.kind == "IDENT" and tok.value in _QUANTIFIERS:
            return self.quantifier()
        if tok.kind == "OP" and tok.value == "<":
            return self.context()
        return self.atom()

    def quantifier(self) -> Formula:
        tok = self.advance()
        if self.is_op("{"):
            raise self.error("Γ subscript is not allowed on a quantifier")
        word = tok.value
        if self.kind == "ghyper":
            var = self.name("trace variable")
            self.expect(".")
            body = self.expression(0)
            return {"exists": Exists, "forall": Forall, "existsP": ExistsP, "forallP": ForallP}[word](var, body)
        if self.kind == "qptl" and word in ("exists", "forall"):
            name = self.name("proposition")
            self.expect(".")
            body = self.expression(0)
            return (ExistsProp if word == "exists" else ForallProp)(name, body)
        raise self.error(f"quantifier {word!r} is not allowed in {self.kind} formulas", tok)

    def context(self) -> Formula:
        start = self.advance()
        if self.kind != "ghyper":
            raise self.error("contexts are only allowed in ghyper formulas", start)
        names: List[str] = []
        if self.is_op(">"):
            raise EmptyContextError("context with empty variable set", start.line, start.column)
        names.append(self.name("trace variable"))
        while self.is_op(","):
            self.advance()
            names.append(self.name("trace variable"))
        self.expect(">")
        body = self.expression(0)
        return Ctx(tuple(sorted(set(names))), body)

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "(":
            self.advance()
            inner = self.expression(0)
            self.expect(")")
            return inner
        if tok.kind == "OP" and tok.value == "[":
            if self.kind != "ghyper":
                raise self.error("[psi]@x is only allowed in ghyper formulas")
            self.advance()
            inner = self.with_kind("pltl", lambda: self.expression(0))
            self.expect("]")
            self.expect("@")
            return RelPltl(inner, self.name("trace variable"))
        if tok.kind == "IDENT" and tok.value == "true":
            self.advance()
            return TRUE
        if tok.kind == "IDENT" and tok.value == "false":
            self.advance()
            return FALSE
        if tok.kind == "IDENT":
            name = self.name("proposition")
            if self.is_op("@"):
                at = self.advance()
                if self.kind != "ghyper":
                    raise self.error("p@x is only allowed in ghyper formulas", at)
                return RelProp(name, self.name("trace variable"))
            if self.kind == "ghyper":
                raise self.error(f"proposition {name!r} needs a trace variable (write {name}@x)", tok)
            return Prop(name)
        raise self.error(f"unexpected {tok.value or 'end of input'!r}")


def parse_formula(text: str, kind: str = "ghyper", allow_internal: bool = False) -> Formula:
    """
    Parse ``text`` as a formula of the given kind.

    Names starting with ``$`` are reserved for generated propositions; they are
    accepted only for the ``qptl`` kind or when ``allow_internal`` is set.
    """
    return _Parser(text, kind, allow_internal).parse()
