"""Small expression language for scalar functions given on the command line.

Grammar (^ right-associative, unary minus binding tighter than a power base):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-' unary | atom
    atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers are the variable ``x``, parameters bound at parse time, or one of
the calls sqrt, exp, log, sin, cos, pow.  Number literals are kept as their
decimal text and converted exactly once to the working precision when
evaluated.  Diagnostics carry the byte offset and the expected-token set and
are deterministic for identical input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from mpmath import mp

from .errors import (
    DivisionByZeroError,
    DomainError,
    ParseError,
    UnboundIdentifierError,
)

FUNCTIONS = {"sqrt": 1, "exp": 1, "log": 1, "sin": 1, "cos": 1, "pow": 2}


@dataclass(frozen=True)
class Const:
    literal: str


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str
    value: object


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


ExprAst = Union[Const, Var, Param, Neg, BinOp, Call]


# -- tokenizer ----------------------------------------------------------------

_SINGLE = {"+", "-", "*", "/", "^", "(", ")", ","}


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | eof
    text: str
    offset: int


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SINGLE:
            tokens.append(_Token("op", c, i))
            i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            tokens.append(_Token("number", text[start:i], start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Token("ident", text[start:i], start))
            continue
        raise ParseError(i, f"unexpected character {c!r}",
                         expected=("number", "identifier", "operator"))
    tokens.append(_Token("eof", "", n))
    return tokens


# -- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens, params):
        self.tokens = tokens
        self.pos = 0
        self.params = params or {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.kind == "op" and token.text == text:
            return self.advance()
        found = repr(token.text) if token.text else "end of input"
        raise ParseError(
            token.offset,
            f"expected '{text}', found {found}",
            expected=(text,),
        )

    def parse(self) -> ExprAst:
        node = self.expr()
        token = self.peek()
        if token.kind != "eof":
            raise ParseError(
                token.offset,
                f"unexpected trailing input {token.text!r}",
                expected=("end of input", "operator"),
            )
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        base = self.unary()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def unary(self) -> ExprAst:
        token = self.peek()
        if token.kind == "op" and token.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> ExprAst:
        token = self.advance()
        if token.kind == "number":
            return Const(token.text)
        if token.kind == "ident":
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.call(token)
            if token.text == "x":
                return Var()
            if token.text in self.params:
                return Param(token.text, self.params[token.text])
            if token.text in FUNCTIONS:
                after = self.peek()
                raise ParseError(
                    after.offset,
                    f"function '{token.text}' needs an argument list",
                    expected=("(",),
                )
            raise UnboundIdentifierError(token.offset, token.text)
        if token.kind == "op" and token.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = repr(token.text) if token.text else "end of input"
        raise ParseError(
            token.offset,
            f"expected a value, found {found}",
            expected=("number", "identifier", "'('", "'-'"),
        )

    def call(self, ident: _Token) -> ExprAst:
        if ident.text not in FUNCTIONS:
            raise ParseError(
                ident.offset,
                f"unknown function '{ident.text}'",
                expected=tuple(sorted(FUNCTIONS)),
            )
        self.expect("(")
        args = [self.expr()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expr())
        closing = self.expect(")")
        arity = FUNCTIONS[ident.text]
        if len(args) != arity:
            raise ParseError(
                closing.offset,
                f"function '{ident.text}' takes {arity} argument(s), "
                f"got {len(args)}",
                expected=(f"{arity} argument(s)",),
            )
        return Call(ident.text, tuple(args))


def parse_expression(text: str, params=None) -> ExprAst:
    """Parse ``text`` into an AST, binding parameter names to values now."""
    if not text or not text.strip():
        raise ParseError(0, "empty expression",
                         expected=("number", "identifier", "'('"))
    return _Parser(_tokenize(text), params).parse()


# -- evaluation ----------------------------------------------------------------


def evaluate(ast: ExprAst, x, precision_bits: int = 256,
             complex_ok: bool = False):
    """Evaluate at ``x`` in the requested binary precision.

    Real mode (default) raises DomainError on sqrt/log of negative arguments
    and fractional powers of negative bases; complex mode promotes instead.
    NaN is never returned.
    """
    with mp.workprec(precision_bits):
        return _eval(ast, mp.convert(x), complex_ok)


def _require_real_ok(value, what, complex_ok):
    if not complex_ok and mp.im(value) == 0 and mp.re(value) < 0:
        raise DomainError(f"{what} of negative value in real mode")
    return value


def _eval(node, x, complex_ok):
    if isinstance(node, Const):
        return mp.mpf(node.literal)
    if isinstance(node, Var):
        return x
    if isinstance(node, Param):
        return mp.convert(node.value)
    if isinstance(node, Neg):
        return -_eval(node.operand, x, complex_ok)
    if isinstance(node, BinOp):
        left = _eval(node.left, x, complex_ok)
        if node.op == "^":
            return _power(left, _eval(node.right, x, complex_ok), complex_ok)
        right = _eval(node.right, x, complex_ok)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right == 0:
            raise DivisionByZeroError("division by zero")
        return left / right
    if isinstance(node, Call):
        args = [_eval(a, x, complex_ok) for a in node.args]
        if node.fn == "sqrt":
            _require_real_ok(args[0], "sqrt", complex_ok)
            return mp.sqrt(args[0])
        if node.fn == "exp":
            return mp.exp(args[0])
        if node.fn == "log":
            value = args[0]
            if value == 0:
                raise DomainError("log of zero")
            _require_real_ok(value, "log", complex_ok)
            return mp.log(value)
        if node.fn == "sin":
            return mp.sin(args[0])
        if node.fn == "cos":
            return mp.cos(args[0])
        return _power(args[0], args[1], complex_ok)
    raise TypeError(f"not an expression node: {node!r}")


def _power(base, exponent, complex_ok):
    if base == 0 and mp.re(exponent) < 0:
        raise DivisionByZeroError("zero raised to a negative power")
    integral = mp.im(exponent) == 0 and mp.isint(exponent)
    if not integral:
        _require_real_ok(base, "fractional power", complex_ok)
    return mp.power(base, exponent)


def compile_function(text: str, params=None, precision_bits: int = 256,
                     complex_ok: bool = False, domain_floor: int = 0):
    """Parse and wrap as a ScalarFunction usable by the operator modules."""
    from .findiff import ScalarFunction

    ast = parse_expression(text, params)
    return ScalarFunction(
        lambda value: evaluate(ast, value, precision_bits, complex_ok),
        domain_floor=domain_floor,
        name=text,
    )


# -- pretty printer -----------------------------------------------------------


def to_text(node: ExprAst) -> str:
    """Canonical text that reparses to a structurally identical AST."""
    return _print_expr(node)


def _print_expr(node) -> str:
    if isinstance(node, BinOp) and node.op in "+-":
        return f"{_print_expr(node.left)} {node.op} {_print_term(node.right)}"
    return _print_term(node)


def _print_term(node) -> str:
    if isinstance(node, BinOp) and node.op in "*/":
        return f"{_print_term(node.left)}{node.op}{_print_factor(node.right)}"
    return _print_factor(node)


def _print_factor(node) -> str:
    if isinstance(node, BinOp) and node.op == "^":
        return f"{_print_unary(node.left)}^{_print_factor(node.right)}"
    return _print_unary(node)


def _print_unary(node) -> str:
    if isinstance(node, Neg):
        return f"-{_print_unary(node.operand)}"
    return _print_atom(node)


def _print_atom(node) -> str:
    if isinstance(node, Const):
        return node.literal
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(_print_expr(a) for a in node.args)})"
    return f"({_print_expr(node)})"
