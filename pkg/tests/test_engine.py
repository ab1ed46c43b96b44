import math

import numpy as np
import pytest

from fogmind.fuzzy import (
    DEFAULT_GRID_POINTS,
    INPUT,
    KIND_BOOLEAN,
    KIND_INTEGER,
    KIND_LINGUISTIC,
    OUTPUT,
    AggregatedOutput,
    LinguisticVariable,
    NoOutputError,
    Singleton,
    defuzzify_cog,
    infer,
    make_gaussian,
    output_grid,
    rule_strength,
    sample_mf,
    select_integer_output,
)
from oracles import random_clip_sets, ref_cog
from tables import CLASSIFY_ROWS, FIXTURE_RULE_IDS

# rule 1 antecedent strength at the canonical wet-day pose: the heading
# term small(3 deg) = exp(-0.5 * (3 / sigma)^2) is the weakest atom
WET_DAY_STRENGTH = 0.9576032806985737
WET_DAY_DISTANCE_DM = 2.8284271247461903  # sqrt(0.2^2 + 0.2^2) m in dm


def unit_var(labels):
    return LinguisticVariable(
        name="u", direction=OUTPUT, value_kind=KIND_LINGUISTIC, unit="x",
        universe=(0.0, 1.0), labels=tuple(labels),
    )


def engine_cog(clips):
    """Centroid the engine computes for clipped labels on [0, 1]."""
    var = unit_var(
        (f"l{i}", make_gaussian(lo, hi)) for i, (lo, hi, _) in enumerate(clips)
    )
    grid = output_grid(var)
    agg = np.zeros_like(grid)
    for i, (_, _, strength) in enumerate(clips):
        agg = np.maximum(agg, np.minimum(sample_mf(var.label(f"l{i}"), grid), strength))
    return defuzzify_cog(AggregatedOutput(variable="u", grid=grid, membership=agg))


def test_cog_matches_independent_reference():
    worst = 0.0
    for clips in random_clip_sets(seed=20260816, count=100):
        got = engine_cog(clips)
        want = ref_cog(0.0, 1.0, clips)
        worst = max(worst, abs(got - want))
    assert worst <= 1e-6, f"worst centroid error {worst}"


def test_cog_symmetric_aggregate_hits_center():
    var = unit_var([("mid", make_gaussian(0.4, 0.6))])
    grid = output_grid(var)
    for clip in (1.0, 0.37):
        agg = np.minimum(sample_mf(var.label("mid"), grid), clip)
        got = defuzzify_cog(AggregatedOutput(variable="u", grid=grid, membership=agg))
        # support (4 sigma) fits inside [0, 1], so the centroid is the center
        assert got == pytest.approx(0.5, abs=1e-9)


def test_cog_rejects_empty_aggregate():
    grid = np.linspace(0.0, 1.0, 101)
    agg = AggregatedOutput(variable="u", grid=grid, membership=np.zeros_like(grid))
    with pytest.raises(NoOutputError):
        defuzzify_cog(agg)


def test_default_grid_is_odd():
    # an odd count keeps the midpoint of a symmetric universe on the grid
    assert DEFAULT_GRID_POINTS % 2 == 1


def test_aggregated_output_shape_checks():
    grid = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ValueError):
        AggregatedOutput(variable="u", grid=grid, membership=np.zeros(10))
    with pytest.raises(ValueError):
        AggregatedOutput(variable="u", grid=np.zeros((2, 2)), membership=np.zeros((2, 2)))


def test_rule_strength_is_min():
    assert rule_strength([0.9, 0.3, 0.7]) == 0.3
    assert rule_strength([1.0]) == 1.0
    with pytest.raises(ValueError):
        rule_strength([])


def test_sample_mf_singleton_lands_on_nearest_point():
    grid = np.linspace(0.0, 10.0, 11)
    y = sample_mf(Singleton(3.2), grid)
    assert y[3] == 1.0
    assert np.sum(y) == 1.0


def int_var():
    return LinguisticVariable(
        name="msg", direction=OUTPUT, value_kind=KIND_INTEGER, unit="id",
        universe=(1.0, 5.0),
        labels=tuple((f"id{i}", Singleton(float(i))) for i in range(1, 6)),
    )


def agg_for(var, levels):
    grid = output_grid(var, 2001)
    agg = np.zeros_like(grid)
    for value, level in levels.items():
        agg = np.maximum(agg, np.minimum(sample_mf(Singleton(float(value)), grid), level))
    return AggregatedOutput(variable=var.name, grid=grid, membership=agg)


def test_select_integer_output_picks_max_activation():
    var = int_var()
    assert select_integer_output(agg_for(var, {2: 0.4, 4: 0.9}), var) == 4


def test_select_integer_output_tie_prefers_smaller_id():
    var = int_var()
    assert select_integer_output(agg_for(var, {3: 0.6, 5: 0.6}), var) == 3


def test_select_integer_output_needs_activation():
    var = int_var()
    with pytest.raises(NoOutputError):
        select_integer_output(agg_for(var, {}), var)


def test_select_integer_output_rejects_non_integer_variable():
    var = unit_var([("mid", make_gaussian(0.4, 0.6))])
    grid = output_grid(var, 101)
    agg = AggregatedOutput(variable="u", grid=grid, membership=np.ones_like(grid))
    with pytest.raises(ValueError):
        select_integer_output(agg, var)


# -- whole-rulebase inference ------------------------------------------------


def wet_day_snapshot():
    return {
        "rain": 1.0,
        "distance(object1)": WET_DAY_DISTANCE_DM,
        "heading(object1)": 3.0,
    }


def test_wet_day_rule_strength_frozen(rb):
    result = infer(rb, wet_day_snapshot())
    assert 1 in result.activated
    assert result.strengths[1] == pytest.approx(WET_DAY_STRENGTH, rel=1e-12)


def test_wet_day_dispatch_ids(rb):
    result = infer(rb, wet_day_snapshot())
    voice = rb.variable("voice_message")
    image = rb.variable("image_message")
    assert select_integer_output(result.aggregates["voice_message"], voice) == 3
    assert select_integer_output(result.aggregates["image_message"], image) == 3


def test_unqualified_atom_resolves_through_rule_focus(rb):
    # rule 1 writes its heading atom bare; the object1 qualifier on the
    # distance atom must focus it onto heading(object1)
    no_bare_heading = wet_day_snapshot()
    assert "heading" not in no_bare_heading
    result = infer(rb, no_bare_heading)
    assert 1 in result.activated


def test_missing_input_skips_rule(rb):
    result = infer(rb, {"rain": 1.0})  # no pose, so no distance/heading
    assert 1 in result.skipped
    assert 1 not in result.activated


def test_activation_threshold(rb):
    # far(7) = 0.5 on object3's rule 11; drop theta and it activates,
    # raise it and it does not
    snap = {"distance(object3)": 7.0}
    lo = infer(rb, snap, theta_rule=0.05)
    hi = infer(rb, snap, theta_rule=0.25)
    assert 11 in lo.activated
    assert 11 not in hi.activated
    # evaluated either way: the strength is recorded
    assert hi.strengths[11] == pytest.approx(0.0625)


def test_zero_strength_rule_contributes_nothing(rb):
    result = infer(rb, {"gas": 0.0, "plant_humidity": 20.0})
    # gas rules evaluated at strength 0: no relay aggregate mass
    assert result.strengths[8] == 0.0
    assert float(np.max(result.aggregates["relay"].membership)) == 0.0
    assert "relay" not in result.contributions


def test_quiet_outputs_still_have_aggregates(rb):
    result = infer(rb, {"plant_humidity": 20.0})
    for var in rb.output_variables():
        assert var.name in result.aggregates
    assert float(np.max(result.aggregates["game"].membership)) == 0.0


def test_contributions_keep_strongest_rule(rb):
    # rules 2 and 16 both emit image id 2 for object2; head-on at the
    # object's center both reach strength 1.0 and the tie keeps rule 2
    snap = {"distance(object2)": 3.0, "heading(object2)": 0.0}
    result = infer(rb, snap)
    assert result.contributions["image_message"][2] == (pytest.approx(1.0), 2)

    # facing away kills rule 2 but not the heading-free rule 16, so the
    # stronger rule takes the slot regardless of its larger id
    snap = {"distance(object2)": 3.0, "heading(object2)": 40.0}
    result = infer(rb, snap)
    strength, rule_id = result.contributions["image_message"][2]
    assert strength == pytest.approx(1.0)
    assert rule_id == 16


@pytest.mark.parametrize("obj,d,h,d_label,h_label,rule", CLASSIFY_ROWS)
def test_proximity_fixture_activation(fixture_rb, obj, d, h, d_label, h_label, rule):
    snap = {
        f"distance(object{obj})": float(d),
        f"heading(object{obj})": float(h),
    }
    result = infer(fixture_rb, snap)
    expected = {rule} if rule is not None else set()
    assert set(result.activated) == expected
    # the other objects' rules have no inputs in this snapshot
    assert set(result.skipped) == FIXTURE_RULE_IDS - set(result.strengths)
