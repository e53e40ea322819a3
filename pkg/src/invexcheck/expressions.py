"""Tiny expression language with forward-mode differentiation.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := atom ('^' integer)?
    atom    := number | identifier | '(' expr ')' | '-' atom
             | func '(' expr ')' | piecewise
    func    := 'exp' | 'ln' | 'sin' | 'cos' | 'abs'
    piecewise := 'piecewise' '(' (cond ':' expr ';')* expr ')'
    cond    := expr ('<' | '<=' | '>' | '>=') expr

Binary operators are left-associative; '^' takes a literal (optionally signed)
integer exponent. Piecewise selects the first branch whose condition holds,
else the trailing default. Derivatives are computed with dual numbers, one
sweep per variable; at a piecewise seam the active branch's derivative is used.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

FUNCTIONS = ("exp", "ln", "sin", "cos", "abs")
RELATIONS = ("<", "<=", ">", ">=")


class ExprSyntaxError(ValueError):
    """Parse failure; `offset` is the character position in the source text."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset
        self.reason = message


class UnknownVariableError(ValueError):
    def __init__(self, name: str, offset: int = -1):
        super().__init__(f"unknown variable {name!r}")
        self.name = name
        self.offset = offset


class UnknownFunctionError(ValueError):
    def __init__(self, name: str, offset: int = -1):
        super().__init__(f"unknown function {name!r}")
        self.name = name
        self.offset = offset


class DomainError(ArithmeticError):
    """Evaluation hit a pole or an out-of-domain function argument."""

    def __init__(self, message: str, node: "Expr"):
        super().__init__(f"{message} in `{to_text(node)}`")
        self.node = node


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class Condition:
    lhs: "Expr"
    op: str  # one of < <= > >=
    rhs: "Expr"


@dataclass(frozen=True)
class Piecewise:
    branches: tuple[tuple[Condition, "Expr"], ...]
    default: "Expr"


Expr = Const | Var | Neg | BinOp | Pow | Call | Piecewise

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|[+\-*/^():;<>]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(at, f"unexpected character {text[at]!r}")
        for kind in ("number", "ident", "op"):
            if match.group(kind) is not None:
                tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self._tokens = _tokenize(text)
        self._index = 0
        self._vars = {name: i for i, name in enumerate(variables)}

    @property
    def _token(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        tok = self._token
        self._index += 1
        return tok

    def _expect(self, text: str) -> _Token:
        tok = self._token
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(tok.offset, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self._advance()

    def parse(self) -> Expr:
        expr = self._expr()
        tok = self._token
        if tok.kind != "end":
            raise ExprSyntaxError(tok.offset, f"unexpected trailing input {tok.text!r}")
        return expr

    def _expr(self) -> Expr:
        node = self._term()
        while self._token.kind == "op" and self._token.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self._term())
        return node

    def _term(self) -> Expr:
        node = self._factor()
        while self._token.kind == "op" and self._token.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self._factor())
        return node

    def _factor(self) -> Expr:
        node = self._atom()
        if self._token.kind == "op" and self._token.text == "^":
            self._advance()
            node = Pow(node, self._integer())
        return node

    def _integer(self) -> int:
        sign = 1
        if self._token.kind == "op" and self._token.text == "-":
            self._advance()
            sign = -1
        tok = self._token
        if tok.kind != "number" or not re.fullmatch(r"\d+", tok.text):
            raise ExprSyntaxError(tok.offset, "integer exponent expected after '^'")
        self._advance()
        return sign * int(tok.text)

    def _atom(self) -> Expr:
        tok = self._token
        if tok.kind == "number":
            self._advance()
            return Const(float(tok.text))
        if tok.kind == "op" and tok.text == "-":
            self._advance()
            return Neg(self._atom())
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self._expr()
            self._expect(")")
            return node
        if tok.kind == "ident":
            self._advance()
            if self._token.kind == "op" and self._token.text == "(":
                if tok.text == "piecewise":
                    return self._piecewise()
                if tok.text not in FUNCTIONS:
                    raise UnknownFunctionError(tok.text, tok.offset)
                self._expect("(")
                arg = self._expr()
                self._expect(")")
                return Call(tok.text, arg)
            if tok.text not in self._vars:
                raise UnknownVariableError(tok.text, tok.offset)
            return Var(self._vars[tok.text], tok.text)
        raise ExprSyntaxError(tok.offset, f"expected an operand, found {tok.text or 'end of input'!r}")

    def _piecewise(self) -> Expr:
        self._expect("(")
        branches: list[tuple[Condition, Expr]] = []
        while True:
            first = self._expr()
            tok = self._token
            if tok.kind == "op" and tok.text in RELATIONS:
                self._advance()
                rhs = self._expr()
                self._expect(":")
                value = self._expr()
                self._expect(";")
                branches.append((Condition(first, tok.text, rhs), value))
                continue
            self._expect(")")
            return Piecewise(tuple(branches), first)


def parse(text: str, variables: tuple[str, ...] | list[str]) -> Expr:
    """Parse `text` against the ordered variable names."""
    return _Parser(text, tuple(variables)).parse()


_PREC_ADD, _PREC_MUL = 1, 2


def _paren(text: str) -> str:
    return f"({text})"


def _fmt_const(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _fmt(node: Expr, prec: int) -> str:
    if isinstance(node, Const):
        text = _fmt_const(node.value)
        return _paren(text) if node.value < 0 else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _fmt(node.arg, 99)
        if not isinstance(node.arg, (Const, Var, Call, Piecewise, Neg)):
            inner = _paren(inner)
        text = f"-{inner}"
        # '-' binds at atom level; protect from a following '^' stealing the sign
        return _paren(text) if prec >= 3 else text
    if isinstance(node, BinOp):
        mine = _PREC_ADD if node.op in "+-" else _PREC_MUL
        left = _fmt(node.left, 0)
        right = _fmt(node.right, 0)
        if isinstance(node.left, BinOp):
            lp = _PREC_ADD if node.left.op in "+-" else _PREC_MUL
            if lp < mine:
                left = _paren(left)
        if isinstance(node.right, BinOp):
            rp = _PREC_ADD if node.right.op in "+-" else _PREC_MUL
            if rp < mine or (rp == mine and node.op in "-/"):
                right = _paren(right)
        text = f"{left} {node.op} {right}"
        return _paren(text) if prec > mine else text
    if isinstance(node, Pow):
        base = _fmt(node.base, 0)
        if isinstance(node.base, (BinOp, Pow)):
            base = _paren(base)
        exponent = str(node.exponent) if node.exponent >= 0 else f"-{-node.exponent}"
        return f"{base}^{exponent}"
    if isinstance(node, Call):
        return f"{node.func}({_fmt(node.arg, 0)})"
    if isinstance(node, Piecewise):
        parts = [
            f"{_fmt(cond.lhs, 0)} {cond.op} {_fmt(cond.rhs, 0)} : {_fmt(value, 0)}"
            for cond, value in node.branches
        ]
        parts.append(_fmt(node.default, 0))
        return "piecewise(" + "; ".join(parts) + ")"
    raise TypeError(f"not an expression node: {node!r}")


def to_text(expr: Expr) -> str:
    """Render an AST back to concrete syntax that reparses to the same tree."""
    return _fmt(expr, 0)


def _value(node: Expr, x: np.ndarray) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return float(x[node.index])
    if isinstance(node, Neg):
        return -_value(node.arg, x)
    if isinstance(node, BinOp):
        a = _value(node.left, x)
        b = _value(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError("division by zero", node)
        return a / b
    if isinstance(node, Pow):
        base = _value(node.base, x)
        if node.exponent < 0 and base == 0.0:
            raise DomainError("zero base with negative exponent", node)
        return float(base**node.exponent)
    if isinstance(node, Call):
        v = _value(node.arg, x)
        if node.func == "exp":
            try:
                return math.exp(v)
            except OverflowError as exc:
                raise DomainError("exp overflow", node) from exc
        if node.func == "ln":
            if v <= 0.0:
                raise DomainError("ln of a nonpositive value", node)
            return math.log(v)
        if node.func == "sin":
            return math.sin(v)
        if node.func == "cos":
            return math.cos(v)
        return abs(v)
    if isinstance(node, Piecewise):
        return _value(_select_branch(node, x), x)
    raise TypeError(f"not an expression node: {node!r}")


def _holds(cond: Condition, x: np.ndarray) -> bool:
    a = _value(cond.lhs, x)
    b = _value(cond.rhs, x)
    if cond.op == "<":
        return a < b
    if cond.op == "<=":
        return a <= b
    if cond.op == ">":
        return a > b
    return a >= b


def _select_branch(node: Piecewise, x: np.ndarray) -> Expr:
    for cond, value in node.branches:
        if _holds(cond, x):
            return value
    return node.default


def _dual(node: Expr, x: np.ndarray, seed: int) -> tuple[float, float]:
    """Evaluate (value, d/dx_seed) with dual-number arithmetic."""
    if isinstance(node, Const):
        return node.value, 0.0
    if isinstance(node, Var):
        return float(x[node.index]), 1.0 if node.index == seed else 0.0
    if isinstance(node, Neg):
        v, d = _dual(node.arg, x, seed)
        return -v, -d
    if isinstance(node, BinOp):
        a, da = _dual(node.left, x, seed)
        b, db = _dual(node.right, x, seed)
        if node.op == "+":
            return a + b, da + db
        if node.op == "-":
            return a - b, da - db
        if node.op == "*":
            return a * b, da * b + a * db
        if b == 0.0:
            raise DomainError("division by zero", node)
        return a / b, (da * b - a * db) / (b * b)
    if isinstance(node, Pow):
        v, dv = _dual(node.base, x, seed)
        k = node.exponent
        if k == 0:
            return 1.0, 0.0
        if k < 0 and v == 0.0:
            raise DomainError("zero base with negative exponent", node)
        return float(v**k), k * float(v ** (k - 1)) * dv
    if isinstance(node, Call):
        v, dv = _dual(node.arg, x, seed)
        if node.func == "exp":
            try:
                e = math.exp(v)
            except OverflowError as exc:
                raise DomainError("exp overflow", node) from exc
            return e, e * dv
        if node.func == "ln":
            if v <= 0.0:
                raise DomainError("ln of a nonpositive value", node)
            return math.log(v), dv / v
        if node.func == "sin":
            return math.sin(v), math.cos(v) * dv
        if node.func == "cos":
            return math.cos(v), -math.sin(v) * dv
        sign = 0.0 if v == 0.0 else math.copysign(1.0, v)
        return abs(v), sign * dv
    if isinstance(node, Piecewise):
        return _dual(_select_branch(node, x), x, seed)
    raise TypeError(f"not an expression node: {node!r}")


def eval_value(expr: Expr, x: np.ndarray | list[float]) -> float:
    return _value(expr, np.asarray(x, dtype=float))


def eval_with_gradient(expr: Expr, x: np.ndarray | list[float]) -> tuple[float, np.ndarray]:
    """Value and gradient at x; one dual sweep per coordinate."""
    x = np.asarray(x, dtype=float)
    grad = np.empty(x.shape[0])
    value = _value(expr, x)
    for seed in range(x.shape[0]):
        _, grad[seed] = _dual(expr, x, seed)
    return value, grad


@dataclass
class SmoothnessViolation:
    x: np.ndarray
    deviation: float
    note: str


@dataclass
class SmoothnessReport:
    violations: list[SmoothnessViolation]
    samples_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


_FD_STEP = 1e-6
_SEAM_OFFSET = 1e-5
_SEAM_FD_STEP = 2e-5  # straddles the seam from the offset samples
_REL_THRESHOLD = 1e-4
_SMOOTHNESS_SEED = 724212


def _central_fd(expr: Expr, x: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        hi = x.copy()
        lo = x.copy()
        hi[i] += step
        lo[i] -= step
        grad[i] = (_value(expr, hi) - _value(expr, lo)) / (2.0 * step)
    return grad


def _fd_deviation(expr: Expr, x: np.ndarray, step: float) -> float:
    _, ad = eval_with_gradient(expr, x)
    fd = _central_fd(expr, x, step)
    return float(np.max(np.abs(ad - fd) / np.maximum(1.0, np.abs(fd)))) if x.size else 0.0


def _seam_generators(node: Expr, acc: list[Expr]) -> None:
    """Collect expressions whose zero crossings are potential kinks."""
    if isinstance(node, Piecewise):
        for cond, value in node.branches:
            acc.append(BinOp("-", cond.lhs, cond.rhs))
            _seam_generators(cond.lhs, acc)
            _seam_generators(cond.rhs, acc)
            _seam_generators(value, acc)
        _seam_generators(node.default, acc)
    elif isinstance(node, Call):
        if node.func == "abs":
            acc.append(node.arg)
        _seam_generators(node.arg, acc)
    elif isinstance(node, Neg):
        _seam_generators(node.arg, acc)
    elif isinstance(node, BinOp):
        _seam_generators(node.left, acc)
        _seam_generators(node.right, acc)
    elif isinstance(node, Pow):
        _seam_generators(node.base, acc)


def _locate_seams_1d(expr: Expr, lo: float, hi: float) -> list[float]:
    generators: list[Expr] = []
    _seam_generators(expr, generators)
    seams: list[float] = []
    if not generators:
        return seams
    grid = np.linspace(lo, hi, 2048)
    for gen in generators:
        try:
            values = np.array([_value(gen, np.array([t])) for t in grid])
        except DomainError:
            continue
        signs = np.sign(values)
        for i in range(len(grid) - 1):
            if signs[i] == 0.0:
                seams.append(float(grid[i]))
            elif signs[i] * signs[i + 1] < 0.0:
                a, b = float(grid[i]), float(grid[i + 1])
                for _ in range(80):
                    mid = 0.5 * (a + b)
                    fm = _value(gen, np.array([mid]))
                    if fm == 0.0:
                        a = b = mid
                        break
                    if np.sign(fm) == signs[i]:
                        a = mid
                    else:
                        b = mid
                seams.append(0.5 * (a + b))
    seams.sort()
    deduped: list[float] = []
    for s in seams:
        if not deduped or s - deduped[-1] > 1e-10:
            deduped.append(s)
    return deduped


def validate_smoothness(expr: Expr, box: list[tuple[float, float]], samples: int) -> SmoothnessReport:
    """Compare dual-number gradients to central finite differences over the box.

    Regular samples use step 1e-6; near every piecewise condition boundary and
    abs() argument crossing, extra samples at the seam +/- 1e-5 use a step wide
    enough to straddle the seam, which is what exposes genuine kinks. A sample
    is reported when the relative deviation exceeds 1e-4.
    """
    box = [(float(lo), float(hi)) for lo, hi in box]
    dims = len(box)
    inset = max(1e-9, _FD_STEP)
    points: list[np.ndarray] = []
    if dims == 1:
        lo, hi = box[0]
        points = [np.array([t]) for t in np.linspace(lo + inset, hi - inset, samples)]
    else:
        rng = np.random.default_rng(_SMOOTHNESS_SEED)
        lows = np.array([lo for lo, _ in box]) + inset
        highs = np.array([hi for _, hi in box]) - inset
        points = [rng.uniform(lows, highs) for _ in range(samples)]
    violations: list[SmoothnessViolation] = []
    checked = 0
    for x in points:
        checked += 1
        try:
            dev = _fd_deviation(expr, x, _FD_STEP)
        except DomainError as exc:
            violations.append(SmoothnessViolation(x, math.inf, f"evaluation failed: {exc}"))
            continue
        if dev > _REL_THRESHOLD:
            violations.append(SmoothnessViolation(x, dev, "gradient/finite-difference mismatch"))
    if dims == 1:
        lo, hi = box[0]
        for seam in _locate_seams_1d(expr, lo, hi):
            for offset in (-_SEAM_OFFSET, _SEAM_OFFSET):
                t = seam + offset
                if not (lo + _SEAM_FD_STEP <= t <= hi - _SEAM_FD_STEP):
                    continue
                checked += 1
                x = np.array([t])
                try:
                    dev = _fd_deviation(expr, x, _SEAM_FD_STEP)
                except DomainError as exc:
                    violations.append(SmoothnessViolation(x, math.inf, f"evaluation failed: {exc}"))
                    continue
                if dev > _REL_THRESHOLD:
                    violations.append(
                        SmoothnessViolation(x, dev, f"kink detected near seam at {seam:.6g}")
                    )
    return SmoothnessReport(violations=violations, samples_checked=checked)
