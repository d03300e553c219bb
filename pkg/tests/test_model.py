"""Domain types: fragments, params, feasibility checks, table container."""

import numpy as np
import pytest

from rnm.errors import ValidationError
from rnm.model import (Cpt, GenerationParams, RankedFragment, Violation,
                       WeightExpressionSpec, lone_low_scenario,
                       require_equal_m, require_valid_spec, state_interval,
                       validate_config, validate_spec)


def test_state_interval_values():
    assert state_interval(1, 5) == (0.0, 0.2)
    assert state_interval(3, 5) == (0.4, 0.6)
    assert state_interval(5, 5) == (0.8, 1.0)
    assert state_interval(2, 2) == (0.5, 1.0)


def test_state_interval_rejects_bad_indices():
    with pytest.raises(ValidationError):
        state_interval(0, 5)
    with pytest.raises(ValidationError):
        state_interval(6, 5)
    with pytest.raises(ValidationError):
        state_interval(1, 1)


def test_fragment_basics():
    frag = RankedFragment((3, 5), 4)
    assert frag.n_parents == 2
    assert frag.parent_state_counts == (3, 5)
    assert frag.child_state_count == 4
    assert frag.equal_m is None

    uniform = RankedFragment.uniform(3, 5)
    assert uniform.parent_state_counts == (5, 5, 5)
    assert uniform.child_state_count == 5
    assert uniform.equal_m == 5
    assert require_equal_m(uniform) == 5


def test_fragment_validation():
    with pytest.raises(ValidationError):
        RankedFragment((), 3)
    with pytest.raises(ValidationError):
        RankedFragment((1, 3), 3)
    with pytest.raises(ValidationError):
        RankedFragment((3, 3), 1)
    with pytest.raises(ValidationError):
        require_equal_m(RankedFragment((3, 4), 4))


def test_generation_params_validation():
    params = GenerationParams(0.01, 5)
    assert params.variance == 0.01
    assert params.sample_size == 5
    with pytest.raises(ValidationError):
        GenerationParams(0.0, 5)
    with pytest.raises(ValidationError):
        GenerationParams(-0.1, 5)
    with pytest.raises(ValidationError):
        GenerationParams(float("nan"), 5)
    with pytest.raises(ValidationError):
        GenerationParams(float("inf"), 5)
    with pytest.raises(ValidationError):
        GenerationParams(0.01, 1)


def test_spec_constructors_and_kind_check():
    spec = WeightExpressionSpec.wmean(0.3, 0.7)
    assert spec.kind == "wmean"
    assert spec.weights == (0.3, 0.7)
    assert WeightExpressionSpec.wmin(2, 1).weights == (2.0, 1.0)
    assert WeightExpressionSpec.wmax(1.5).kind == "wmax"
    assert WeightExpressionSpec.mixminmax(0.25, 0.75).weights == (0.25, 0.75)
    with pytest.raises(ValidationError):
        WeightExpressionSpec("median", (1.0,))


FRAG2 = RankedFragment.uniform(2, 5)


def test_validate_spec_accepts_feasible_specs():
    assert validate_spec(WeightExpressionSpec.wmean(0.3, 0.7), FRAG2) == ()
    assert validate_spec(WeightExpressionSpec.wmin(1.0, 4.2), FRAG2) == ()
    assert validate_spec(WeightExpressionSpec.wmax(9.0, 1.0), FRAG2) == ()
    assert validate_spec(WeightExpressionSpec.mixminmax(0.0, 1.0), FRAG2) == ()
    # mixminmax stays two weights regardless of parent count
    frag4 = RankedFragment.uniform(4, 3)
    assert validate_spec(WeightExpressionSpec.mixminmax(0.5, 0.5), frag4) == ()


def test_validate_spec_wmean_violations():
    bad_sum = validate_spec(WeightExpressionSpec.wmean(0.3, 0.69), FRAG2)
    assert len(bad_sum) == 1
    assert "sum to 1" in bad_sum[0].constraint

    bad_range = validate_spec(WeightExpressionSpec.wmean(-0.2, 1.2), FRAG2)
    assert len(bad_range) == 2
    assert bad_range[0].index == 1
    assert bad_range[1].index == 2
    assert "[0, 1]" in str(bad_range[0])

    bad_arity = validate_spec(WeightExpressionSpec.wmean(1.0), FRAG2)
    assert len(bad_arity) == 1
    assert "one weight per parent" in bad_arity[0].constraint


def test_validate_spec_wmin_wmax_violations():
    v = validate_spec(WeightExpressionSpec.wmin(0.5, 2.0), FRAG2)
    assert len(v) == 1 and v[0].index == 1
    assert ">= 1" in v[0].constraint
    v = validate_spec(WeightExpressionSpec.wmax(1.0, 0.99), FRAG2)
    assert len(v) == 1 and v[0].index == 2


def test_validate_spec_mixminmax_violations():
    three = validate_spec(
        WeightExpressionSpec("mixminmax", (0.2, 0.3, 0.5)), FRAG2)
    assert len(three) == 1
    assert "exactly two weights" in three[0].constraint

    v = validate_spec(WeightExpressionSpec.mixminmax(0.4, 0.7), FRAG2)
    assert len(v) == 1
    assert "w_max = 1 - w_min" in v[0].constraint

    v = validate_spec(WeightExpressionSpec.mixminmax(-0.1, 1.2), FRAG2)
    assert {viol.index for viol in v} == {1, 2, None}


def test_require_valid_spec_raises_with_violations():
    require_valid_spec(WeightExpressionSpec.wmean(0.5, 0.5), FRAG2)
    with pytest.raises(ValidationError) as exc:
        require_valid_spec(WeightExpressionSpec.wmean(0.3, 0.69), FRAG2)
    assert "sum to 1" in str(exc.value)
    assert len(exc.value.violations) == 1
    assert isinstance(exc.value.violations[0], Violation)


def test_validate_config():
    frag = RankedFragment((3, 5), 4)
    assert validate_config([2, 5], frag) == (2, 5)
    with pytest.raises(ValidationError):
        validate_config((1,), frag)
    with pytest.raises(ValidationError):
        validate_config((0, 5), frag)
    with pytest.raises(ValidationError):
        validate_config((2, 6), frag)


def test_lone_low_scenario():
    frag = RankedFragment.uniform(4, 5)
    assert lone_low_scenario(1, frag) == (1, 5, 5, 5)
    assert lone_low_scenario(3, frag) == (5, 5, 1, 5)
    with pytest.raises(ValidationError):
        lone_low_scenario(5, frag)
    with pytest.raises(ValidationError):
        lone_low_scenario(0, frag)
    with pytest.raises(ValidationError):
        lone_low_scenario(1, RankedFragment((3, 4), 4))


def test_cpt_lookup_matches_row_order():
    frag = RankedFragment((3, 2), 2)
    configs = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
    table = np.arange(12.0).reshape(6, 2)
    cpt = Cpt(frag, tuple(configs), table)
    for r, cfg in enumerate(configs):
        assert cpt.index_of(cfg) == r
        assert np.array_equal(cpt.distribution(cfg), table[r])
    with pytest.raises(ValidationError):
        cpt.distribution((4, 1))
