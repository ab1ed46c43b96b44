"""Structural validation of a RuleBase: reference resolution, direction
checks, singleton IDs, label shape constraints. Returns diagnostics instead
of raising so a console can list every problem at once."""
from __future__ import annotations

from dataclasses import dataclass

from fogmind.fuzzy.membership import Singleton, Triangular
from fogmind.fuzzy.variables import INPUT, KIND_BOOLEAN, KIND_INTEGER, OUTPUT

from .model import RuleBase


@dataclass(frozen=True)
class Diagnostic:
    message: str
    rule_id: int | None = None
    variable: str | None = None

    def __str__(self) -> str:
        where = f"rule {self.rule_id}" if self.rule_id is not None else (
            f"variable {self.variable}" if self.variable else "rulebook"
        )
        return f"{where}: {self.message}"


def _check_variable(var, out: list[Diagnostic]) -> None:
    lo, hi = var.universe
    if var.value_kind == KIND_BOOLEAN:
        names = sorted(n for n, _ in var.labels)
        shapes_ok = all(isinstance(mf, Triangular) for _, mf in var.labels)
        if names != ["no", "yes"] or not shapes_ok:
            out.append(Diagnostic("boolean variables need exactly triangular labels yes and no", variable=var.name))
    if var.value_kind == KIND_INTEGER and var.direction == OUTPUT:
        if not all(isinstance(mf, Singleton) for _, mf in var.labels):
            out.append(Diagnostic("integer outputs must use singleton labels only", variable=var.name))
    for name, mf in var.labels:
        s_lo, s_hi = mf.support
        if s_hi < lo or s_lo > hi:
            out.append(
                Diagnostic(f"label {name} support [{s_lo}, {s_hi}] misses universe [{lo}, {hi}]", variable=var.name)
            )


def validate(rb: RuleBase) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for var in rb.variables:
        _check_variable(var, out)

    seen: set[tuple[int, int | None]] = set()
    for rule in rb.rules:
        if rule.key in seen:
            out.append(Diagnostic("duplicate rule ID", rule_id=rule.id))
        seen.add(rule.key)
        if not rule.atoms:
            out.append(Diagnostic("rule has no antecedent", rule_id=rule.id))
        if not rule.actions:
            out.append(Diagnostic("rule has no consequent", rule_id=rule.id))

        for atom in rule.atoms:
            if not rb.has_variable(atom.variable):
                out.append(Diagnostic(f"unknown variable {atom.variable}", rule_id=rule.id))
                continue
            var = rb.variable(atom.variable)
            if var.direction != INPUT:
                out.append(Diagnostic(f"direction mismatch: {atom.variable} is not an input", rule_id=rule.id))
            if not var.has_label(atom.label):
                out.append(Diagnostic(f"variable {atom.variable} has no label {atom.label}", rule_id=rule.id))
            if atom.qualifier is not None and not rb.has_object(atom.qualifier):
                out.append(Diagnostic(f"unknown object {atom.qualifier}", rule_id=rule.id))

        for action in rule.actions:
            if not rb.has_variable(action.variable):
                out.append(Diagnostic(f"unknown variable {action.variable}", rule_id=rule.id))
                continue
            var = rb.variable(action.variable)
            if var.direction != OUTPUT:
                out.append(Diagnostic(f"direction mismatch: {action.variable} is not an output", rule_id=rule.id))
            if isinstance(action.value, str):
                if not var.has_label(action.value):
                    out.append(Diagnostic(f"variable {action.variable} has no label {action.value}", rule_id=rule.id))
            elif var.singleton_value(int(action.value)) is None:
                out.append(Diagnostic(f"undeclared singleton {action.value} for {action.variable}", rule_id=rule.id))

    if not rb.rules:
        out.append(Diagnostic("rulebook has no rules"))
    return out
