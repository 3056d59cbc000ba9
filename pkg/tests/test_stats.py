import numpy as np
import pytest
import scipy.special
import scipy.stats

from brainenc.errors import (
    DegenerateGroups,
    LengthMismatch,
    OutOfRangeP,
    ZeroWithinVariance,
)
from brainenc.stats import (
    bonferroni,
    f_sf,
    one_way_anova,
    pairwise_posthoc,
    reg_inc_beta,
)
from tests.oracles import pooled_t_squared


# ---------------------------------------------------------------- anova


def test_hand_example_f_and_p():
    res = one_way_anova([[1, 2, 3], [4, 5, 6]])
    assert res.f_stat == pytest.approx(13.5, abs=1e-12)
    assert (res.df_between, res.df_within) == (1, 4)
    assert res.p_value == pytest.approx(0.02132, abs=1e-4)
    # independent oracle
    assert res.p_value == pytest.approx(scipy.stats.f.sf(13.5, 1, 4), abs=1e-10)


def test_identical_groups():
    res = one_way_anova([[1, 2, 3], [1, 2, 3]])
    assert res.f_stat == 0.0
    assert res.p_value == 1.0


def test_df_shapes():
    rng = np.random.default_rng(0)
    res = one_way_anova([rng.standard_normal(5) for _ in range(10)])
    assert (res.df_between, res.df_within) == (9, 40)
    res = one_way_anova([rng.standard_normal(82) for _ in range(10)])
    assert (res.df_between, res.df_within) == (9, 810)


def test_degenerate_groups():
    with pytest.raises(DegenerateGroups):
        one_way_anova([[1.0]])
    with pytest.raises(DegenerateGroups):
        one_way_anova([[1.0, 2.0], [3.0]])


def test_zero_within_variance():
    with pytest.raises(ZeroWithinVariance):
        one_way_anova([[1.0, 1.0], [2.0, 2.0]])


def test_matches_library_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        groups = [rng.standard_normal(rng.integers(3, 12)) for _ in range(rng.integers(2, 6))]
        res = one_way_anova(groups)
        ref_f, ref_p = scipy.stats.f_oneway(*groups)
        assert res.f_stat == pytest.approx(ref_f, rel=1e-10)
        assert res.p_value == pytest.approx(ref_p, abs=1e-10)


def test_location_scale_invariance():
    rng = np.random.default_rng(2)
    groups = [rng.standard_normal(6) for _ in range(4)]
    base = one_way_anova(groups)
    shifted = one_way_anova([g + 17.0 for g in groups])
    scaled = one_way_anova([g * -3.5 for g in groups])
    assert shifted.f_stat == pytest.approx(base.f_stat, rel=1e-10)
    assert scaled.f_stat == pytest.approx(base.f_stat, rel=1e-10)


def test_group_relabeling_invariance():
    rng = np.random.default_rng(3)
    groups = [rng.standard_normal(5) for _ in range(5)]
    base = one_way_anova(groups)
    perm = one_way_anova(groups[::-1])
    assert perm.f_stat == pytest.approx(base.f_stat, rel=1e-12)
    assert perm.p_value == pytest.approx(base.p_value, rel=1e-12)


def test_f_equals_t_squared():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = rng.standard_normal(rng.integers(3, 15))
        b = rng.standard_normal(rng.integers(3, 15)) + rng.uniform(-1, 1)
        res = one_way_anova([a, b])
        assert res.f_stat == pytest.approx(pooled_t_squared(a, b), rel=1e-10)


# ---------------------------------------------------------------- F tail


def test_f_sf_against_library():
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = float(rng.uniform(0, 40))
        d1 = int(rng.integers(1, 30))
        d2 = int(rng.integers(1, 200))
        assert f_sf(f, d1, d2) == pytest.approx(scipy.stats.f.sf(f, d1, d2), abs=1e-10)


def test_f_sf_monotone_in_f():
    ps = [f_sf(f, 9, 40) for f in (0.0, 0.5, 1.0, 2.0, 4.0, 10.0)]
    assert all(1.0 >= a > b >= 0.0 for a, b in zip(ps, ps[1:]))


def test_reg_inc_beta_against_library():
    rng = np.random.default_rng(6)
    for _ in range(300):
        a = float(rng.uniform(0.1, 50))
        b = float(rng.uniform(0.1, 50))
        x = float(rng.uniform(0, 1))
        assert reg_inc_beta(a, b, x) == pytest.approx(
            scipy.special.betainc(a, b, x), abs=1e-10
        )
    assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
    assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0


def test_tabulated_critical_values():
    # classic F table: P(F >= F_crit) = 0.05
    assert f_sf(161.4476, 1, 1) == pytest.approx(0.05, abs=1e-4)
    assert f_sf(4.0847, 1, 40) == pytest.approx(0.05, abs=1e-4)
    assert f_sf(2.1240, 9, 40) == pytest.approx(0.05, abs=1e-4)


# ---------------------------------------------------------------- bonferroni


def test_bonferroni_examples():
    assert bonferroni(0.01, 10) == pytest.approx(0.1, abs=1e-15)
    assert bonferroni(0.2, 10) == 1.0
    assert bonferroni(0.0, 45) == 0.0


def test_bonferroni_monotone():
    assert bonferroni(0.01, 5) <= bonferroni(0.02, 5)
    assert bonferroni(0.01, 5) <= bonferroni(0.01, 10)
    assert bonferroni(0.5, 99) == 1.0


def test_bonferroni_range_check():
    with pytest.raises(OutOfRangeP):
        bonferroni(1.5, 2)
    with pytest.raises(OutOfRangeP):
        bonferroni(-0.1, 2)


# ---------------------------------------------------------------- pairwise


def test_pairwise_identical_vectors():
    table = pairwise_posthoc({"CR": [1, 2, 3], "NER": [1, 2, 3], "SS": [2, 3, 5]})
    row = next(r for r in table.rows if {r.task_a, r.task_b} == {"CR", "NER"})
    assert row.p_raw == 1.0
    assert row.p_corrected == 1.0


def test_pairwise_hand_example():
    table = pairwise_posthoc({"A": [1, 2, 3, 4, 5], "B": [6, 7, 8, 9, 10]})
    row = table.rows[0]
    res = one_way_anova([[1, 2, 3, 4, 5], [6, 7, 8, 9, 10]])
    assert res.f_stat == pytest.approx(25.0, abs=1e-10)
    assert (res.df_between, res.df_within) == (1, 8)
    assert row.p_raw == pytest.approx(0.00105, abs=1e-4)
    assert row.p_raw == pytest.approx(scipy.stats.f.sf(25.0, 1, 8), abs=1e-10)


def test_pairwise_ten_tasks_gives_45_rows():
    rng = np.random.default_rng(7)
    tasks = {f"T{i}": rng.standard_normal(5) for i in range(10)}
    tasks = {k: v for k, v in zip(
        ["CR", "NER", "NLI", "PD", "QA", "SA", "SRL", "SS", "Sum", "WSD"], tasks.values()
    )}
    table = pairwise_posthoc(tasks)
    assert len(table.rows) == 45
    assert table.family_m == 45
    for row in table.rows:
        assert row.p_corrected == pytest.approx(min(1.0, 45 * row.p_raw), abs=1e-15)


def test_pairwise_explicit_family():
    table = pairwise_posthoc({"A": [1.0, 2.0], "B": [1.5, 2.5]}, family_m=100)
    assert table.family_m == 100


def test_pairwise_length_mismatch():
    with pytest.raises(LengthMismatch):
        pairwise_posthoc({"A": [1, 2, 3], "B": [1, 2]})
