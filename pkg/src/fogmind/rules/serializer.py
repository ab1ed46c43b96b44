"""Canonical rulebook serialization: one declaration per line, single spaces,
rules in ID order. parse(serialize(rb)) is structurally equal to rb."""
from __future__ import annotations

from fogmind.fuzzy.membership import Gaussian, Singleton, Triangular

from .model import FuzzyRule, RuleBase


def _fmt(x: float) -> str:
    # integers print bare so hand-written and canonical files diff cleanly
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _label_line(name: str, mf) -> str:
    if isinstance(mf, Gaussian):
        return f"LABEL {name} GAUSS {_fmt(mf.lower)} {_fmt(mf.upper)}"
    if isinstance(mf, Triangular):
        return f"LABEL {name} TRI {_fmt(mf.a)} {_fmt(mf.b)} {_fmt(mf.c)}"
    if isinstance(mf, Singleton):
        return f"LABEL {name} SINGLETON {_fmt(mf.value)}"
    raise TypeError(f"unknown membership function {type(mf).__name__}")


def _rule_line(rule: FuzzyRule) -> str:
    atoms = " AND ".join(str(a) for a in rule.atoms)
    actions = " AND ".join(str(a) for a in rule.actions)
    return f"RULE {rule.id}: IF {atoms} THEN {actions} CLASS {rule.command_class}"


def serialize(rb: RuleBase) -> str:
    lines: list[str] = []
    for var in rb.variables:
        lines.append(
            f"VAR {var.name} {var.direction} {var.value_kind} {var.unit} "
            f"RANGE {_fmt(var.universe[0])} {_fmt(var.universe[1])}"
        )
        for name, mf in var.labels:
            lines.append(_label_line(name, mf))
    for obj in rb.objects:
        lines.append(f"OBJECT {obj.name} AT {_fmt(obj.x)} {_fmt(obj.y)}")
    for rule in sorted(rb.rules, key=lambda r: r.id):
        lines.append(_rule_line(rule))
    return "\n".join(lines) + "\n"
