"""Problem-file parser, polynomial text format, and tree serialization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import Polynomial, RationalFunction
from .scalars import Field, is_prime


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class ProblemSpec:
    char: int
    vars: Tuple[str, ...]
    b: Polynomial
    max_depth: Optional[int] = None
    series_order: Optional[int] = None
    at: Optional[str] = None
    text: str = ""


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, text: str, char: int, allowed: Optional[Sequence[str]], line: int, col0: int):
        self.text = text
        self.char = char
        self.allowed = set(allowed) if allowed is not None else None
        self.line = line
        self.col0 = col0
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.toks.append(("int", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.toks.append(("name", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                self.toks.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def error(self, msg: str, pos: Optional[int] = None):
        if pos is None:
            pos = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text.rstrip())
        raise ParseError(msg, self.line, self.col0 + pos + 1)

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def is_op(self, s: str) -> bool:
        t = self.peek()
        return t is not None and t[0] == "op" and t[1] == s

    def parse(self) -> RationalFunction:
        if self.peek() is None:
            self.error("empty expression")
        r = self.expr()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return r

    def expr(self) -> RationalFunction:
        sign = 1
        if self.is_op("+") or self.is_op("-"):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.is_op("+") or self.is_op("-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> RationalFunction:
        acc = self.factor()
        while self.is_op("*") or self.is_op("/"):
            op = self.take()[1]
            f = self.factor()
            if op == "*":
                acc = acc * f
            else:
                if f.num.is_zero():
                    self.error("division by zero", self.toks[self.i - 1][2])
                acc = acc / f
        return acc

    def factor(self) -> RationalFunction:
        base = self.base()
        if self.is_op("^"):
            self.take()
            neg = False
            if self.is_op("-"):
                self.take()
                neg = True
            t = self.take()
            if t is None or t[0] != "int":
                self.error("expected an integer exponent", t[2] if t else None)
            k = int(t[1])
            return base ** (-k if neg else k)
        return base

    def base(self) -> RationalFunction:
        t = self.peek()
        if t is None:
            self.error("unexpected end of expression")
        kind, val, pos = t
        if kind == "int":
            self.take()
            return RationalFunction(Polynomial.const(int(val), self.char))
        if kind == "name":
            self.take()
            if self.allowed is not None and val not in self.allowed:
                self.error(f"unknown variable {val!r}", pos)
            return RationalFunction(Polynomial.var(val, self.char))
        if val == "(":
            self.take()
            r = self.expr()
            if not self.is_op(")"):
                self.error("expected ')'")
            self.take()
            return r
        self.error(f"unexpected {val!r}", pos)


def parse_rational(text: str, char: int = 0, variables: Optional[Sequence[str]] = None,
                   line: int = 1, col: int = 0) -> RationalFunction:
    return _Parser(text, char, variables, line, col).parse()


def parse_polynomial(text: str, char: int = 0, variables: Optional[Sequence[str]] = None,
                     line: int = 1, col: int = 0) -> Polynomial:
    """Parse a (Laurent) polynomial; `/` is accepted only by constants."""
    r = parse_rational(text, char, variables, line, col)
    if not r.is_polynomial():
        raise ParseError("expression is not a polynomial", line, col + 1)
    return r.num


def format_polynomial(f: Polynomial) -> str:
    return str(f)


def parse_problem(text: str) -> ProblemSpec:
    fields: Dict[str, Tuple[str, int, int]] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", n, 1)
        key, _, val = line.partition(":")
        key = key.strip().lower()
        if key in fields:
            raise ParseError(f"duplicate key {key!r}", n, 1)
        fields[key] = (val, n, len(key) + 1 + (len(line) - len(line.lstrip())))
    for req in ("char", "vars", "b"):
        if req not in fields:
            raise ParseError(f"missing '{req}:' line", 1, 1)
    val, n, col = fields["char"]
    try:
        char = int(val.strip())
    except ValueError:
        raise ParseError("characteristic must be an integer", n, col + 1)
    if char < 0 or (char and not is_prime(char)):
        raise ParseError(f"characteristic {char} is neither 0 nor prime", n, col + 1)
    val, n, col = fields["vars"]
    names = tuple(val.split())
    if not names:
        raise ParseError("no variables declared", n, col + 1)
    for v in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ParseError(f"bad variable name {v!r}", n, col + 1)
        if re.fullmatch(r"x\d+_\d+", v):
            raise ParseError(f"variable names of the form x<id>_<j> are reserved ({v!r})", n, col + 1)
        if v.startswith("a"):
            raise ParseError(f"variable names starting with 'a' are reserved ({v!r})", n, col + 1)
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable names", n, col + 1)
    val, n, col = fields["b"]
    b = parse_polynomial(val, char, names, n, col)
    if b.is_zero():
        raise ParseError("b is the zero polynomial", n, col + 1)
    if b.is_laurent():
        raise ParseError("b must have non-negative exponents", n, col + 1)
    spec = ProblemSpec(char=char, vars=names, b=b, text=text)
    for key, attr in (("max-depth", "max_depth"), ("series-order", "series_order")):
        if key in fields:
            val, n, col = fields[key]
            try:
                setattr(spec, attr, int(val.strip()))
            except ValueError:
                raise ParseError(f"{key} must be an integer", n, col + 1)
    if "at" in fields:
        val, n, col = fields["at"]
        if val.strip() != "origin":
            raise ParseError("only 'at: origin' is supported", n, col + 1)
        spec.at = "origin"
    known = {"char", "vars", "b", "max-depth", "series-order", "at"}
    for key, (_, n, _) in fields.items():
        if key not in known:
            raise ParseError(f"unknown key {key!r}", n, 1)
    return spec


# ------------------------------------------------------------------ emission


def tree_to_dict(tree) -> dict:
    return tree.to_dict()


def emit_tree(tree, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(tree.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if fmt == "dot":
        return emit_dot(tree)
    if fmt == "text":
        return emit_text(tree)
    raise ValueError(f"unknown format {fmt!r}")


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def emit_dot(tree) -> str:
    lines = ["digraph desing {", "  node [shape=box, fontname=\"monospace\"];"]
    for node in tree.nodes.values():
        c = node.constraints
        summary = f"eq:{len(c.basis)} ineq:{len(c.ineq)}"
        label = f"{node.id} [{node.status}]\\n{_dot_escape(str(node.b))}\\n{summary}"
        lines.append(f'  "{node.id}" [label="{label}"];')
    for arc in tree.arcs:
        phi = "; ".join(f"{k}={v}" for k, v in arc.phi_strings().items())
        lines.append(f'  "{arc.source}" -> "{arc.target}" [label="{_dot_escape(arc.kind + ": " + phi)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_text(tree) -> str:
    out = []
    for node in tree.nodes.values():
        indent = "  " * node.depth
        out.append(f"{indent}{node.id} [{node.status}] b = {node.b}")
        if node.constraints.basis:
            out.append(f"{indent}    eq: {', '.join(str(g) for g in node.constraints.basis)}")
        if node.constraints.ineq:
            out.append(f"{indent}    ineq: {', '.join(str(g) for g in node.constraints.ineq)}")
    return "\n".join(out) + "\n"


def load_tree_json(text: str) -> dict:
    return json.loads(text)
