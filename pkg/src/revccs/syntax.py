"""Abstract syntax, parser and printer for extended CCS processes.

Concrete syntax (ASCII):

    proc     := par (("\\/" | "/\\") par)*      non-deterministic / internal choice
    par      := sum ("|" sum)*
    sum      := res ("+" res)*                   operands must be prefixed terms or sums
    res      := prefixed ("\\" name)*
    prefixed := label "." prefixed | "!" prefixed | atom
    atom     := "0" | name | "~" name | "(" proc ")"

A bare ``name`` (or ``~name``) abbreviates ``name.0`` (``~name.0``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

NAME_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
RESERVED = {"tau", "ups"}


class SyntaxErrorCCS(ValueError):
    """Parse failure, carrying position and the expected-token set."""

    def __init__(self, message, line, col, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        hint = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{hint}")


# ---------------------------------------------------------------------------
# Labels

@dataclass(frozen=True)
class Label:
    kind: str  # 'in' | 'out' | 'tau' | 'ups'
    name: str | None = None

    def complement(self) -> "Label":
        if self.kind == "in":
            return Label("out", self.name)
        if self.kind == "out":
            return Label("in", self.name)
        raise ValueError(f"{self} has no complement")

    @property
    def is_visible(self) -> bool:
        return self.kind in ("in", "out")

    def __str__(self):
        if self.kind == "in":
            return self.name
        if self.kind == "out":
            return "~" + self.name
        return self.kind


TAU = Label("tau")
UPS = Label("ups")


def inp(name: str) -> Label:
    return Label("in", name)


def out(name: str) -> Label:
    return Label("out", name)


def parse_label(text: str) -> Label:
    """Parse a label rendering: `a`, `~a`, `tau`, `ups`."""
    text = text.strip()
    if text == "tau":
        return TAU
    if text == "ups":
        return UPS
    if text.startswith("~"):
        return out(text[1:])
    if not NAME_RE.fullmatch(text) or text in RESERVED:
        raise ValueError(f"bad label {text!r}")
    return inp(text)


# ---------------------------------------------------------------------------
# Processes

class Process:
    __slots__ = ()


@dataclass(frozen=True)
class Nil(Process):
    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class Prefix(Process):
    label: Label
    cont: Process

    def __post_init__(self):
        if not self.label.is_visible:
            raise ValueError("prefixes exclude tau and ups")

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class Restrict(Process):
    body: Process
    name: str

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class NdChoice(Process):  # P \/ Q
    left: Process
    right: Process

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class Sum(Process):
    """Guarded sum.  Each operand is a prefixed term or again a sum, the
    shape the grammar enforces; context application may instantiate other
    shapes, which simply contribute no transitions on that side."""

    left: Process
    right: Process

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class IntChoice(Process):  # P /\ Q
    left: Process
    right: Process

    def __str__(self):
        return print_process(self)


@dataclass(frozen=True)
class Bang(Process):
    body: Process

    def __str__(self):
        return print_process(self)


NIL = Nil()


def guarded_sum(l1: Label, p1: Process, l2: Label, p2: Process) -> Sum:
    return Sum(Prefix(l1, p1), Prefix(l2, p2))


def is_sum_operand(p: Process) -> bool:
    """Valid guarded-sum operand: a prefixed term, or a sum of such."""
    if isinstance(p, Prefix):
        return True
    if isinstance(p, Sum):
        return is_sum_operand(p.left) and is_sum_operand(p.right)
    return False


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKENS = [
    ("NDC", r"\\/"),
    ("INT", r"/\\"),
    ("RES", r"\\"),
    ("PLUS", r"\+"),
    ("PAR", r"\|"),
    ("DOT", r"\."),
    ("BANG", r"!"),
    ("TILDE", r"~"),
    ("LPAR", r"\("),
    ("RPAR", r"\)"),
    ("ZERO", r"0"),
    ("NAME", r"[a-z][a-zA-Z0-9_]*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKENS))


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise SyntaxErrorCCS(f"unexpected character {ch!r}", line, col)
        toks.append(_Tok(m.lastgroup, m.group(), line, col))
        col += m.end() - i
        i = m.end()
    toks.append(_Tok("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg, expected=()):
        t = self.peek()
        raise SyntaxErrorCCS(msg, t.line, t.col, expected)

    def expect(self, kind, what):
        t = self.peek()
        if t.kind != kind:
            self.fail(f"found {t.text or 'end of input'!r}", (what,))
        return self.next()

    def proc(self) -> Process:
        p = self.par()
        while self.peek().kind in ("NDC", "INT"):
            op = self.next().kind
            q = self.par()
            p = NdChoice(p, q) if op == "NDC" else IntChoice(p, q)
        return p

    def par(self) -> Process:
        p = self.sum()
        while self.peek().kind == "PAR":
            self.next()
            p = Par(p, self.sum())
        return p

    def sum(self) -> Process:
        t = self.peek()
        p = self.res()
        while self.peek().kind == "PLUS":
            if not is_sum_operand(p):
                raise SyntaxErrorCCS(
                    "`+` requires prefixed operands", t.line, t.col)
            self.next()
            t2 = self.peek()
            q = self.res()
            if not is_sum_operand(q):
                raise SyntaxErrorCCS(
                    "`+` requires prefixed operands", t2.line, t2.col)
            p = Sum(p, q)
        return p

    def res(self) -> Process:
        p = self.prefixed()
        while self.peek().kind == "RES":
            self.next()
            t = self.expect("NAME", "name")
            self._check_name(t)
            p = Restrict(p, t.text)
        return p

    def prefixed(self) -> Process:
        t = self.peek()
        if t.kind == "BANG":
            self.next()
            return Bang(self.prefixed())
        if t.kind in ("NAME", "TILDE"):
            label = self._label()
            if self.peek().kind == "DOT":
                self.next()
                return Prefix(label, self.prefixed())
            return Prefix(label, NIL)
        return self.atom()

    def atom(self) -> Process:
        t = self.peek()
        if t.kind == "ZERO":
            self.next()
            return NIL
        if t.kind == "LPAR":
            self.next()
            p = self.proc()
            self.expect("RPAR", ")")
            return p
        self.fail(f"found {t.text or 'end of input'!r}",
                  ("0", "name", "~name", "(", "!"))

    def _label(self) -> Label:
        t = self.next()
        if t.kind == "TILDE":
            n = self.expect("NAME", "name")
            self._check_name(n)
            return out(n.text)
        self._check_name(t)
        return inp(t.text)

    def _check_name(self, tok):
        if tok.text in RESERVED:
            raise SyntaxErrorCCS(
                f"{tok.text!r} is reserved", tok.line, tok.col)


def parse_process(text: str) -> Process:
    p = _Parser(text)
    result = p.proc()
    t = p.peek()
    if t.kind != "EOF":
        p.fail(f"trailing input {t.text!r}", ("end of input",))
    return result


# ---------------------------------------------------------------------------
# Printer

_CHOICE, _PAR, _SUM, _RES, _PREFIX = 0, 1, 2, 3, 4


def _level(p: Process) -> int:
    if isinstance(p, (NdChoice, IntChoice)):
        return _CHOICE
    if isinstance(p, Par):
        return _PAR
    if isinstance(p, Sum):
        return _SUM
    if isinstance(p, Restrict):
        return _RES
    if isinstance(p, (Prefix, Bang)):
        return _PREFIX
    return 99  # Nil


def _show(p: Process, min_level: int) -> str:
    lvl = _level(p)
    s = _show_at(p)
    if lvl < min_level:
        return "(" + s + ")"
    return s


def _show_at(p: Process) -> str:
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Prefix):
        if isinstance(p.cont, Nil):
            return str(p.label)
        return f"{p.label}.{_show(p.cont, _PREFIX)}"
    if isinstance(p, Bang):
        return "!" + _show(p.body, _PREFIX)
    if isinstance(p, Restrict):
        return f"{_show(p.body, _RES)} \\ {p.name}"
    if isinstance(p, Par):
        return f"{_show(p.left, _PAR)} | {_show(p.right, _PAR + 1)}"
    if isinstance(p, Sum):
        return f"{_show(p.left, _SUM)} + {_show(p.right, _SUM + 1)}"
    if isinstance(p, NdChoice):
        return f"{_show_choice(p.left, NdChoice)} \\/ {_show_choice(p.right, NdChoice, True)}"
    if isinstance(p, IntChoice):
        return f"{_show_choice(p.left, IntChoice)} /\\ {_show_choice(p.right, IntChoice, True)}"
    raise TypeError(f"not a process: {p!r}")


def _show_choice(p: Process, op, strict=False) -> str:
    # \/ and /\ share a level; parenthesize a mixed or right-nested operand
    if isinstance(p, (NdChoice, IntChoice)) and (not isinstance(p, op) or strict):
        return "(" + _show_at(p) + ")"
    return _show(p, _CHOICE)


def print_process(p: Process) -> str:
    return _show(p, 0)


# ---------------------------------------------------------------------------
# Structural helpers

def free_names(p: Process) -> frozenset[str]:
    """Free names; a co-name ~a contributes a, restriction is the only binder."""
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, Prefix):
        return frozenset({p.label.name}) | free_names(p.cont) \
            if p.label.is_visible else free_names(p.cont)
    if isinstance(p, Restrict):
        return free_names(p.body) - {p.name}
    if isinstance(p, Bang):
        return free_names(p.body)
    if isinstance(p, (Par, Sum, NdChoice, IntChoice)):
        return free_names(p.left) | free_names(p.right)
    raise TypeError(f"not a process: {p!r}")


LEAF = ()


def thread_shape(p: Process):
    """Tree of top-level parallel compositions; () is a leaf, a non-leaf is
    a pair of subtree shapes.  Restriction is transparent: the threads of
    (P | Q) \\ a are those of P | Q, which is what lets restricted parallel
    components draw identifiers from their own patterns."""
    if isinstance(p, Par):
        return (thread_shape(p.left), thread_shape(p.right))
    if isinstance(p, Restrict):
        return thread_shape(p.body)
    return LEAF


def thread_split(p: Process):
    """The two thread subtrees under a (possibly restricted) parallel
    composition, or None for a single thread."""
    if isinstance(p, Par):
        return p.left, p.right
    if isinstance(p, Restrict):
        return thread_split(p.body)
    return None


def shape_str(shape) -> str:
    if shape == LEAF:
        return "Leaf"
    return f"Node({shape_str(shape[0])}, {shape_str(shape[1])})"
