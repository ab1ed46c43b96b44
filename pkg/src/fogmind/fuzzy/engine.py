"""Mamdani inference: min conjunction, min implication (clipping), pointwise
max aggregation on a uniform output grid, trapezoidal center-of-gravity
defuzzification, and max-activation selection for integer message outputs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

from .membership import Gaussian, MembershipFunction, Singleton, Triangular
from .variables import KIND_INTEGER, LinguisticVariable

if TYPE_CHECKING:  # structural only; the engine never builds rules itself
    from fogmind.rules.model import FuzzyRule, RuleBase

# a rule below this strength is evaluated but not reported as activated
DEFAULT_RULE_THRESHOLD = 0.25

# grid resolution per output universe; odd so symmetric universes keep their
# midpoint on the grid (1001 undershoots the 1e-6 quadrature tolerance)
DEFAULT_GRID_POINTS = 8001


class NoOutputError(ValueError):
    """Raised when an all-zero aggregate is asked for a crisp value."""


@dataclass(frozen=True, eq=False)
class AggregatedOutput:
    variable: str
    grid: np.ndarray
    membership: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise ValueError("grid must be 1-D with at least 2 points")
        if self.grid.shape != self.membership.shape:
            raise ValueError("grid and membership shapes differ")


def sample_mf(mf: MembershipFunction, grid: np.ndarray) -> np.ndarray:
    """Membership degrees over a grid; singletons land on the nearest point."""
    if isinstance(mf, Gaussian):
        z = (grid - mf.center) / mf.sigma
        return np.exp(-0.5 * z * z)
    if isinstance(mf, Triangular):
        up = (grid - mf.a) / (mf.b - mf.a) if mf.b > mf.a else None
        down = (mf.c - grid) / (mf.c - mf.b) if mf.c > mf.b else None
        if up is None:
            y = down
        elif down is None:
            y = up
        else:
            y = np.minimum(up, down)
        return np.clip(y, 0.0, 1.0)
    y = np.zeros_like(grid)
    y[int(np.argmin(np.abs(grid - mf.value)))] = 1.0
    return y


def output_grid(var: LinguisticVariable, n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    lo, hi = var.universe
    return np.linspace(lo, hi, n)


def rule_strength(atom_degrees: Sequence[float]) -> float:
    """AND of a non-empty list of degrees (min t-norm)."""
    if len(atom_degrees) == 0:
        raise ValueError("rule with no antecedent atoms")
    return min(atom_degrees)


@dataclass
class InferenceResult:
    aggregates: dict[str, AggregatedOutput]
    activated: list[int]
    skipped: list[int]
    strengths: dict[int, float] = field(default_factory=dict)
    # per output variable: candidate (singleton id or label name) ->
    # (best clip strength, id of the rule that achieved it)
    contributions: dict[str, dict[object, tuple[float, int]]] = field(default_factory=dict)


def _atom_crisp(atom, focus: str | None, snapshot: Mapping[str, float]):
    if atom.qualifier is not None:
        return snapshot.get(f"{atom.variable}({atom.qualifier})")
    if focus is not None:
        qualified = snapshot.get(f"{atom.variable}({focus})")
        if qualified is not None:
            return qualified
    return snapshot.get(atom.variable)


def _action_label(var: LinguisticVariable, value) -> tuple[str, object]:
    """Resolve an action value to (label name, contribution key)."""
    if isinstance(value, str):
        return value, value
    name = var.singleton_value(int(value))
    if name is None:
        raise KeyError(f"{var.name}: no singleton with value {value}")
    return name, int(value)


def infer(
    rulebase: "RuleBase",
    snapshot: Mapping[str, float],
    *,
    rules: Iterable["FuzzyRule"] | None = None,
    theta_rule: float = DEFAULT_RULE_THRESHOLD,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> InferenceResult:
    """Evaluate every rule against a crisp snapshot.

    Snapshot keys are variable names, object-qualified as "distance(object1)"
    where it matters. An unqualified atom in a rule that also names an object
    resolves against that object first, then against the bare key. Rules with
    any missing input are skipped. Every evaluated rule clips its consequent
    labels at its strength; aggregates combine clips by pointwise max.
    """
    grids: dict[str, np.ndarray] = {}
    curves: dict[str, np.ndarray] = {}
    result = InferenceResult(aggregates={}, activated=[], skipped=[])

    for rule in rulebase.rules if rules is None else rules:
        focus = next((a.qualifier for a in rule.atoms if a.qualifier), None)
        degrees: list[float] = []
        for atom in rule.atoms:
            crisp = _atom_crisp(atom, focus, snapshot)
            if crisp is None:
                degrees = []
                break
            var = rulebase.variable(atom.variable)
            mf = var.label(atom.label)
            degrees.append(mf.degree(var.clamp(float(crisp))))
        if not degrees:
            result.skipped.append(rule.id)
            continue

        strength = rule_strength(degrees)
        result.strengths[rule.id] = max(strength, result.strengths.get(rule.id, 0.0))
        if strength >= theta_rule and rule.id not in result.activated:
            result.activated.append(rule.id)
        if strength <= 0.0:
            continue

        for action in rule.actions:
            var = rulebase.variable(action.variable)
            if var.name not in grids:
                grids[var.name] = output_grid(var, grid_points)
                curves[var.name] = np.zeros_like(grids[var.name])
            label_name, key = _action_label(var, action.value)
            clipped = np.minimum(sample_mf(var.label(label_name), grids[var.name]), strength)
            np.maximum(curves[var.name], clipped, out=curves[var.name])

            per_var = result.contributions.setdefault(var.name, {})
            prev = per_var.get(key)
            if prev is None or strength > prev[0] or (strength == prev[0] and rule.id < prev[1]):
                per_var[key] = (strength, rule.id)

    # quiet outputs still get an explicit all-zero aggregate
    for var in rulebase.output_variables():
        if var.name not in grids:
            grids[var.name] = output_grid(var, grid_points)
            curves[var.name] = np.zeros_like(grids[var.name])

    result.aggregates = {
        name: AggregatedOutput(variable=name, grid=grids[name], membership=curves[name])
        for name in grids
    }
    return result


def defuzzify_cog(agg: AggregatedOutput) -> float:
    """Membership-weighted centroid of the aggregate (trapezoid quadrature)."""
    mass = float(np.trapezoid(agg.membership, agg.grid))
    if mass <= 0.0:
        raise NoOutputError(f"{agg.variable}: aggregate has no mass")
    moment = float(np.trapezoid(agg.membership * agg.grid, agg.grid))
    return moment / mass


def select_integer_output(agg: AggregatedOutput, var: LinguisticVariable) -> int:
    """Singleton ID with maximal clipped activation; ties pick the smaller ID.

    Blending IDs through a centroid would dispatch unrelated messages, so
    integer outputs select rather than average.
    """
    if var.value_kind != KIND_INTEGER:
        raise ValueError(f"{var.name} is not an integer output")
    best_id: int | None = None
    best_act = 0.0
    for _, mf in var.labels:
        if not isinstance(mf, Singleton):
            raise ValueError(f"{var.name}: integer outputs must use singleton labels")
        idx = int(np.argmin(np.abs(agg.grid - mf.value)))
        act = float(agg.membership[idx])
        value = int(mf.value)
        if act > best_act or (act == best_act and best_id is not None and act > 0.0 and value < best_id):
            best_id, best_act = value, act
    if best_id is None or best_act <= 0.0:
        raise NoOutputError(f"{var.name}: no singleton activated")
    return best_id
