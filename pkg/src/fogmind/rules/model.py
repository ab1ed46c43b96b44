"""Typed rule model: atoms, actions, rules and the rulebase that binds them
to a variable registry and an object registry."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from fogmind.fuzzy.variables import OUTPUT, LinguisticVariable

CLASS_REMINDER = "reminder"
CLASS_ALERT = "alert"
CLASS_LAUNCH = "launch"
CLASS_DISABLE = "disable"
CLASS_AUTOMATIC = "automatic"

COMMAND_CLASSES = (CLASS_REMINDER, CLASS_ALERT, CLASS_LAUNCH, CLASS_DISABLE, CLASS_AUTOMATIC)

MODE_SCOPE_AUTOMATED_ONLY = "automated-only"
MODE_SCOPE_BOTH = "both"


@dataclass(frozen=True)
class Atom:
    variable: str
    label: str
    qualifier: str | None = None

    def __str__(self) -> str:
        head = f"{self.variable}({self.qualifier})" if self.qualifier else self.variable
        return f"{head} IS {self.label}"


@dataclass(frozen=True)
class Action:
    variable: str
    value: str | int  # label name, or singleton integer for message IDs

    def __str__(self) -> str:
        return f"{self.variable} IS {self.value}"


@dataclass(frozen=True)
class FuzzyRule:
    id: int
    atoms: tuple[Atom, ...]
    actions: tuple[Action, ...]
    command_class: str
    part: int | None = None  # set on single-consequent rules split from a parent

    @property
    def mode_scope(self) -> str:
        # reminder-class rules are exactly the ones gated off in semi mode
        if self.command_class == CLASS_REMINDER:
            return MODE_SCOPE_AUTOMATED_ONLY
        return MODE_SCOPE_BOTH

    @property
    def key(self) -> tuple[int, int | None]:
        return (self.id, self.part)


@dataclass(frozen=True)
class ObjectRef:
    name: str
    x: float
    y: float


@dataclass(frozen=True)
class RuleBase:
    variables: tuple[LinguisticVariable, ...]
    objects: tuple[ObjectRef, ...]
    rules: tuple[FuzzyRule, ...]
    _vars: dict = field(init=False, repr=False, compare=False, hash=False, default=None)
    _objs: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_vars", {v.name: v for v in self.variables})
        object.__setattr__(self, "_objs", {o.name: o for o in self.objects})

    def variable(self, name: str) -> LinguisticVariable:
        return self._vars[name]

    def has_variable(self, name: str) -> bool:
        return name in self._vars

    def object(self, name: str) -> ObjectRef:
        return self._objs[name]

    def has_object(self, name: str) -> bool:
        return name in self._objs

    def rule(self, rule_id: int) -> FuzzyRule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(f"no rule with id {rule_id}")

    def output_variables(self) -> list[LinguisticVariable]:
        return [v for v in self.variables if v.direction == OUTPUT]

    def with_rules(self, rules: Iterable[FuzzyRule]) -> "RuleBase":
        return replace(self, rules=tuple(rules))


def decompose_mimo(rule: FuzzyRule) -> list[FuzzyRule]:
    """Split a multi-consequent rule into single-consequent rules.

    The split preserves antecedents and strength semantics exactly; part
    numbers record the action index so (id, part) stays unique.
    """
    if len(rule.actions) == 1:
        return [rule]
    return [
        replace(rule, actions=(action,), part=i)
        for i, action in enumerate(rule.actions, start=1)
    ]
