"""Closed formulas over a configurable alphabet.

An alphabet has ``p`` unary connectives, ``q`` binary connectives and ``s``
primitive symbols.  Formulas are plain named tuples, so structural equality
and hashing come for free and subformulas produced by :func:`enumerate_formulas`
are shared between the formulas that contain them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Union

DEFAULT_GUARD = 10**7

BOT, TOP, IMP, TRI, BOX = "⊥", "⊤", "→", "▷", "□"

ASCII_ALIASES = {"bot": BOT, "top": TOP, "->": IMP, "|>": TRI, "box": BOX}


class Preset(enum.Enum):
    MINIMAL = "minimal"
    WITH_BOX = "box"
    WITH_BOX_TOP = "box-top"


@dataclass(frozen=True)
class Alphabet:
    unary: tuple[str, ...]
    binary: tuple[str, ...]
    primitives: tuple[str, ...]
    tag: Optional[Preset] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "unary", tuple(self.unary))
        object.__setattr__(self, "binary", tuple(self.binary))
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if not self.binary:
            raise ValueError("an alphabet needs at least one binary connective")
        if not self.primitives:
            raise ValueError("an alphabet needs at least one primitive symbol")
        names = self.unary + self.binary + self.primitives
        if len(set(names)) != len(names):
            raise ValueError(f"symbol names must be pairwise distinct: {names}")
        if any(not name or "(" in name or ")" in name or name.isspace() for name in names):
            raise ValueError(f"invalid symbol name in {names}")

    @property
    def p(self) -> int:
        return len(self.unary)

    @property
    def q(self) -> int:
        return len(self.binary)

    @property
    def s(self) -> int:
        return len(self.primitives)

    @property
    def signature(self) -> tuple[int, int, int]:
        return self.p, self.q, self.s

    @classmethod
    def preset(cls, which: Union[Preset, str]) -> "Alphabet":
        which = Preset(which)
        if which is Preset.MINIMAL:
            return cls((), (IMP, TRI), (BOT,), which)
        if which is Preset.WITH_BOX:
            return cls((BOX,), (IMP, TRI), (BOT,), which)
        return cls((BOX,), (IMP, TRI), (BOT, TOP), which)

    @classmethod
    def from_signature(cls, p: int, q: int, s: int) -> "Alphabet":
        """Generic alphabet with names ``u1.., b1.., c1..``."""
        if p < 0 or q < 1 or s < 1:
            raise ValueError(f"need p >= 0, q >= 1, s >= 1; got {(p, q, s)}")
        return cls(
            tuple(f"u{i + 1}" for i in range(p)),
            tuple(f"b{i + 1}" for i in range(q)),
            tuple(f"c{i + 1}" for i in range(s)),
        )


MINIMAL = Alphabet.preset(Preset.MINIMAL)
WITH_BOX = Alphabet.preset(Preset.WITH_BOX)
WITH_BOX_TOP = Alphabet.preset(Preset.WITH_BOX_TOP)


class Primitive(NamedTuple):
    index: int


class Unary(NamedTuple):
    op: int
    child: "Formula"


class Binary(NamedTuple):
    op: int
    left: "Formula"
    right: "Formula"


Formula = Union[Primitive, Unary, Binary]


def complexity(f: Formula) -> int:
    """Number of connective occurrences in ``f``."""
    total = 0
    stack = [f]
    while stack:
        node = stack.pop()
        if type(node) is Unary:
            total += 1
            stack.append(node.child)
        elif type(node) is Binary:
            total += 1
            stack.append(node.left)
            stack.append(node.right)
    return total


def check_formula(f: Formula, alphabet: Alphabet) -> None:
    """Raise ``ValueError`` if ``f`` uses an index outside ``alphabet``."""
    stack = [f]
    while stack:
        node = stack.pop()
        if type(node) is Primitive:
            ok = 0 <= node.index < alphabet.s
        elif type(node) is Unary:
            ok = 0 <= node.op < alphabet.p
            stack.append(node.child)
        elif type(node) is Binary:
            ok = 0 <= node.op < alphabet.q
            stack.extend((node.left, node.right))
        else:
            raise TypeError(f"not a formula node: {node!r}")
        if not ok:
            raise ValueError(f"{node!r} is not valid over {alphabet}")


def render(f: Formula, alphabet: Alphabet) -> str:
    """Canonical text: binary nodes fully parenthesized, unary nodes prefix-adjacent."""
    parts: list[str] = []
    # strings on the stack are emitted verbatim, nodes are expanded
    stack: list = [f]
    while stack:
        node = stack.pop()
        if type(node) is str:
            parts.append(node)
        elif type(node) is Primitive:
            parts.append(alphabet.primitives[node.index])
        elif type(node) is Unary:
            parts.append(alphabet.unary[node.op])
            stack.append(node.child)
        else:
            parts.append("(")
            stack.extend((")", node.right, alphabet.binary[node.op], node.left))
    return "".join(parts)


# --------------------------------------------------------------------------
# parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownSymbolError(FormulaSyntaxError):
    pass


class ArityError(FormulaSyntaxError):
    pass


class _Token(NamedTuple):
    kind: str  # "prim", "unary", "binary", "(", ")"
    index: int
    pos: int
    text: str


def _tokenize(text: str, alphabet: Alphabet) -> list[_Token]:
    table: dict[str, tuple[str, int]] = {"(": ("(", -1), ")": (")", -1)}
    for kind, names in (("prim", alphabet.primitives), ("unary", alphabet.unary),
                        ("binary", alphabet.binary)):
        for i, name in enumerate(names):
            table[name] = (kind, i)
    for alias, glyph in ASCII_ALIASES.items():
        if glyph in table and alias not in table:
            table[alias] = table[glyph]
    spellings = sorted(table, key=len, reverse=True)

    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        for spelling in spellings:
            if text.startswith(spelling, pos):
                kind, index = table[spelling]
                tokens.append(_Token(kind, index, pos, spelling))
                pos += len(spelling)
                break
        else:
            raise UnknownSymbolError(f"unknown symbol {text[pos]!r}", pos)
    return tokens


def parse(text: str, alphabet: Alphabet) -> Formula:
    """Parse ``text`` into a formula over ``alphabet``.

    Accepts the canonical fully parenthesized form and also drops the need for
    outer parentheses: binary connectives share one precedence level and
    associate to the right, unary connectives bind tightest.  ASCII aliases
    ``bot``, ``top``, ``->``, ``|>``, ``box`` are accepted for the glyphs.
    """
    tokens = _tokenize(text, alphabet)
    end = len(text)
    pos = 0

    def peek() -> Optional[_Token]:
        return tokens[pos] if pos < len(tokens) else None

    def expression() -> Formula:
        nonlocal pos
        left = operand()
        tok = peek()
        if tok is None or tok.kind == ")":
            return left
        if tok.kind == "unary":
            raise ArityError(f"unary connective {tok.text!r} used as binary", tok.pos)
        if tok.kind != "binary":
            raise FormulaSyntaxError(f"expected a binary connective, got {tok.text!r}", tok.pos)
        pos += 1
        return Binary(tok.index, left, expression())

    def operand() -> Formula:
        nonlocal pos
        prefix = []
        while pos < len(tokens) and tokens[pos].kind == "unary":
            prefix.append(tokens[pos].index)
            pos += 1
        node = atom()
        for op in reversed(prefix):
            node = Unary(op, node)
        return node

    def atom() -> Formula:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", end)
        pos += 1
        if tok.kind == "prim":
            return Primitive(tok.index)
        if tok.kind == "(":
            inner = expression()
            close = peek()
            if close is None or close.kind != ")":
                raise FormulaSyntaxError("expected ')'", close.pos if close else end)
            pos += 1
            return inner
        if tok.kind == "binary":
            raise ArityError(f"binary connective {tok.text!r} is missing its left operand", tok.pos)
        raise FormulaSyntaxError(f"unexpected {tok.text!r}", tok.pos)

    result = expression()
    if pos != len(tokens):
        raise FormulaSyntaxError(f"unexpected {tokens[pos].text!r}", tokens[pos].pos)
    return result


# --------------------------------------------------------------------------
# enumeration


class GuardExceeded(RuntimeError):
    pass


def count_formulas(alphabet: Alphabet, n: int) -> int:
    """Number of formulas of complexity ``n`` (small-n helper for the guard)."""
    p, q, s = alphabet.signature
    f = [s]
    for m in range(1, n + 1):
        f.append(p * f[m - 1] + q * sum(f[k] * f[m - 1 - k] for k in range(m)))
    return f[n]


def _level(alphabet: Alphabet, n: int, levels: list[list[Formula]]) -> Iterator[Formula]:
    if n == 0:
        yield from (Primitive(i) for i in range(alphabet.s))
        return
    for op in range(alphabet.p):
        for child in levels[n - 1]:
            yield Unary(op, child)
    for op in range(alphabet.q):
        for k in range(n):
            rights = levels[n - 1 - k]
            for left in levels[k]:
                for right in rights:
                    yield Binary(op, left, right)


def enumerate_formulas(alphabet: Alphabet, n: int,
                       limit: Optional[int] = DEFAULT_GUARD) -> Iterator[Formula]:
    """Stream every formula of complexity exactly ``n``, each once.

    Order: primitives in alphabet order, then unary nodes by connective, then
    binary nodes by connective with the left complexity ascending.  Raises
    :class:`GuardExceeded` before yielding anything if the formulas of
    complexity ``<= n`` would exceed ``limit``.
    """
    if n < 0:
        raise ValueError("complexity must be nonnegative")
    if limit is not None:
        needed = sum(count_formulas(alphabet, m) for m in range(n + 1))
        if needed > limit:
            raise GuardExceeded(
                f"enumerating complexity {n} needs {needed} formulas (guard {limit})")
    levels: list[list[Formula]] = []
    for m in range(n):
        levels.append(list(_level(alphabet, m, levels)))
    return _level(alphabet, n, levels)


def enumerate_levels(alphabet: Alphabet, upto: int,
                     limit: Optional[int] = DEFAULT_GUARD) -> Iterator[tuple[int, Formula]]:
    """Yield ``(n, formula)`` for every complexity ``0..upto`` in order.

    Lower levels are kept so higher ones can share them; only the top level is
    streamed.
    """
    if limit is not None:
        needed = sum(count_formulas(alphabet, m) for m in range(upto + 1))
        if needed > limit:
            raise GuardExceeded(
                f"enumerating up to complexity {upto} needs {needed} formulas (guard {limit})")
    levels: list[list[Formula]] = []
    for m in range(upto + 1):
        if m < upto:
            level = list(_level(alphabet, m, levels))
            levels.append(level)
            for f in level:
                yield m, f
        else:
            for f in _level(alphabet, m, levels):
                yield m, f
