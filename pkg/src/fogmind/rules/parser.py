"""Line-oriented rulebook parser.

The format is deliberately plain so a caregiver can edit it with any text
editor and diff revisions: one declaration per line, `#` comments, six
keywords. Grammar:

    document   := header rule*
    header     := varDecl* objDecl*
    varDecl    := "VAR" name ("input"|"output") kind unit "RANGE" num num labelDecl+
    labelDecl  := "LABEL" name ("GAUSS" num num | "TRI" num num num | "SINGLETON" num)
    objDecl    := "OBJECT" name "AT" num num
    rule       := "RULE" int ":" "IF" atom ("AND" atom)* "THEN" action ("AND" action)* "CLASS" class
    atom       := name ["(" name ")"] "IS" name
    action     := name "IS" (name | int)

Parsing raises on syntax errors, duplicate IDs and unknown
variable/label/object references; softer checks (singleton IDs, direction
mismatches) are validate()'s job so programmatically built rulebases get the
same treatment as parsed ones.
"""
from __future__ import annotations

import re

from fogmind.fuzzy.membership import (
    InvalidBoundsError,
    Singleton,
    Triangular,
    make_gaussian,
)
from fogmind.fuzzy.variables import INPUT, KIND_BOOLEAN, KIND_INTEGER, KIND_LINGUISTIC, OUTPUT, LinguisticVariable

from .model import Action, Atom, COMMAND_CLASSES, FuzzyRule, ObjectRef, RuleBase

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[():])"
)

_DIRECTIONS = (INPUT, OUTPUT)
_KINDS = (KIND_LINGUISTIC, KIND_BOOLEAN, KIND_INTEGER)


class RulebookError(ValueError):
    """Parse or resolution failure with a source position."""

    def __init__(self, message: str, line: int, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


class _Tok:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind: str, text: str, col: int):
        self.kind = kind
        self.text = text
        self.col = col


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    out: list[_Tok] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise RulebookError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), m.start() + 1))
    return out


class _LineParser:
    def __init__(self, tokens: list[_Tok], lineno: int):
        self.tokens = tokens
        self.lineno = lineno
        self.i = 0

    def _error(self, expected: str) -> RulebookError:
        if self.i < len(self.tokens):
            tok = self.tokens[self.i]
            return RulebookError(f"expected {expected}, found {tok.text!r}", self.lineno, tok.col)
        return RulebookError(f"expected {expected}, found end of line", self.lineno, len(self.tokens))

    def peek(self) -> _Tok | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    def name(self, what: str = "a name") -> str:
        tok = self.peek()
        if tok is None or tok.kind != "name":
            raise self._error(what)
        self.i += 1
        return tok.text

    def keyword(self, kw: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "name" or tok.text != kw:
            raise self._error(f"'{kw}'")
        self.i += 1

    def num(self, what: str = "a number") -> float:
        tok = self.peek()
        if tok is None or tok.kind != "num":
            raise self._error(what)
        self.i += 1
        return float(tok.text)

    def integer(self, what: str = "an integer") -> int:
        tok = self.peek()
        if tok is None or tok.kind != "num" or not re.fullmatch(r"-?\d+", tok.text):
            raise self._error(what)
        self.i += 1
        return int(tok.text)

    def punct(self, ch: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "punct" or tok.text != ch:
            raise self._error(f"'{ch}'")
        self.i += 1

    def try_punct(self, ch: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "punct" and tok.text == ch:
            self.i += 1
            return True
        return False

    def end(self) -> None:
        if not self.done():
            raise self._error("end of line")


class _Builder:
    def __init__(self) -> None:
        self.variables: list[LinguisticVariable] = []
        self.objects: list[ObjectRef] = []
        self.rules: list[FuzzyRule] = []
        self.var_names: set[str] = set()
        self.obj_names: set[str] = set()
        self.rule_ids: set[int] = set()
        # variable under construction: (lineno, name, direction, kind, unit, universe, labels)
        self.open_var: tuple | None = None
        self.header_done = False

    def close_var(self) -> None:
        if self.open_var is None:
            return
        lineno, name, direction, kind, unit, universe, labels = self.open_var
        if not labels:
            raise RulebookError(f"variable {name} declares no labels", lineno)
        self.variables.append(
            LinguisticVariable(
                name=name,
                direction=direction,
                value_kind=kind,
                unit=unit,
                universe=universe,
                labels=tuple(labels),
            )
        )
        self.open_var = None


def _parse_var(p: _LineParser, b: _Builder) -> None:
    if b.header_done:
        raise RulebookError("declarations must precede rules", p.lineno)
    b.close_var()
    name = p.name("a variable name")
    if name in b.var_names:
        raise RulebookError(f"duplicate variable {name}", p.lineno)
    direction = p.name("'input' or 'output'")
    if direction not in _DIRECTIONS:
        raise RulebookError(f"direction must be input or output, got {direction!r}", p.lineno)
    kind = p.name("a value kind")
    if kind not in _KINDS:
        raise RulebookError(f"kind must be one of {', '.join(_KINDS)}, got {kind!r}", p.lineno)
    unit = p.name("a unit")
    p.keyword("RANGE")
    lo = p.num()
    hi = p.num()
    p.end()
    if not lo < hi:
        raise RulebookError(f"RANGE needs lo < hi, got {lo} {hi}", p.lineno)
    b.var_names.add(name)
    b.open_var = (p.lineno, name, direction, kind, unit, (lo, hi), [])


def _parse_label(p: _LineParser, b: _Builder) -> None:
    if b.open_var is None:
        raise RulebookError("LABEL outside a VAR block", p.lineno)
    name = p.name("a label name")
    labels = b.open_var[6]
    if any(n == name for n, _ in labels):
        raise RulebookError(f"duplicate label {name} in variable {b.open_var[1]}", p.lineno)
    shape = p.name("GAUSS, TRI or SINGLETON")
    try:
        if shape == "GAUSS":
            mf = make_gaussian(p.num(), p.num())
        elif shape == "TRI":
            mf = Triangular(p.num(), p.num(), p.num())
        elif shape == "SINGLETON":
            mf = Singleton(p.num())
        else:
            raise RulebookError(f"unknown shape {shape!r}", p.lineno)
    except InvalidBoundsError as e:
        raise RulebookError(str(e), p.lineno) from e
    p.end()
    labels.append((name, mf))


def _parse_object(p: _LineParser, b: _Builder) -> None:
    if b.header_done:
        raise RulebookError("declarations must precede rules", p.lineno)
    b.close_var()
    name = p.name("an object name")
    if name in b.obj_names:
        raise RulebookError(f"duplicate object {name}", p.lineno)
    p.keyword("AT")
    x = p.num()
    y = p.num()
    p.end()
    b.obj_names.add(name)
    b.objects.append(ObjectRef(name=name, x=x, y=y))


def _lookup_var(b: _Builder, name: str, lineno: int) -> LinguisticVariable:
    for v in b.variables:
        if v.name == name:
            return v
    raise RulebookError(f"unknown variable {name}", lineno)


def _parse_atom(p: _LineParser, b: _Builder) -> Atom:
    var_name = p.name("a variable name")
    qualifier = None
    if p.try_punct("("):
        qualifier = p.name("an object name")
        p.punct(")")
    p.keyword("IS")
    label = p.name("a label name")
    var = _lookup_var(b, var_name, p.lineno)
    if not var.has_label(label):
        raise RulebookError(f"variable {var_name} has no label {label}", p.lineno)
    if qualifier is not None and qualifier not in b.obj_names:
        raise RulebookError(f"unknown object {qualifier}", p.lineno)
    return Atom(variable=var_name, label=label, qualifier=qualifier)


def _parse_action(p: _LineParser, b: _Builder) -> Action:
    var_name = p.name("a variable name")
    p.keyword("IS")
    tok = p.peek()
    var = _lookup_var(b, var_name, p.lineno)
    if tok is not None and tok.kind == "num":
        value: str | int = p.integer("an integer value")
    else:
        value = p.name("a label or integer value")
        if not var.has_label(value):
            raise RulebookError(f"variable {var_name} has no label {value}", p.lineno)
    return Action(variable=var_name, value=value)


def _parse_rule(p: _LineParser, b: _Builder) -> None:
    b.close_var()
    b.header_done = True
    rule_id = p.integer("a rule ID")
    if rule_id <= 0:
        raise RulebookError(f"rule IDs are positive, got {rule_id}", p.lineno)
    if rule_id in b.rule_ids:
        raise RulebookError(f"duplicate rule ID {rule_id}", p.lineno)
    p.punct(":")
    p.keyword("IF")
    atoms = [_parse_atom(p, b)]
    while not p.done():
        tok = p.peek()
        if tok.kind == "name" and tok.text == "THEN":
            break
        p.keyword("AND")
        atoms.append(_parse_atom(p, b))
    p.keyword("THEN")
    actions = [_parse_action(p, b)]
    while not p.done():
        tok = p.peek()
        if tok.kind == "name" and tok.text == "CLASS":
            break
        p.keyword("AND")
        actions.append(_parse_action(p, b))
    p.keyword("CLASS")
    command_class = p.name("a command class")
    if command_class not in COMMAND_CLASSES:
        raise RulebookError(
            f"class must be one of {', '.join(COMMAND_CLASSES)}, got {command_class!r}", p.lineno
        )
    p.end()
    b.rule_ids.add(rule_id)
    b.rules.append(
        FuzzyRule(
            id=rule_id,
            atoms=tuple(atoms),
            actions=tuple(actions),
            command_class=command_class,
        )
    )


_HANDLERS = {
    "VAR": _parse_var,
    "LABEL": _parse_label,
    "OBJECT": _parse_object,
    "RULE": _parse_rule,
}


def parse_rulebook(text: str) -> RuleBase:
    b = _Builder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = _tokenize(line, lineno)
        p = _LineParser(tokens, lineno)
        head = p.name("VAR, LABEL, OBJECT or RULE")
        handler = _HANDLERS.get(head)
        if handler is None:
            raise RulebookError(f"expected VAR, LABEL, OBJECT or RULE, found {head!r}", lineno, 1)
        handler(p, b)
    b.close_var()
    return RuleBase(variables=tuple(b.variables), objects=tuple(b.objects), rules=tuple(b.rules))
