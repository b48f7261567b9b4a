import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasebal.model import (
    Branch,
    ConnectionPoint,
    DimensionError,
    FeederChain,
    LoadSet,
    VerdictKind,
    assignment_to_switch_matrix,
    balance_report,
    feeder_phase_currents,
    ideal_current,
    pairwise_diffs,
    phase_sums,
    switch_matrix_to_assignment,
    total_power_loss,
    validate_assignment,
)

from conftest import DATA1, DATA2, DATA3


@st.composite
def loads_and_labels(draw, max_groups=5, integers=True):
    k = draw(st.integers(1, max_groups))
    elem = st.integers(0, 500) if integers else st.floats(0, 500, allow_nan=False)
    loads = draw(st.lists(elem, min_size=3 * k, max_size=3 * k))
    labels = draw(st.lists(st.sampled_from((1, 2, 3)), min_size=3 * k, max_size=3 * k))
    return loads, labels


def test_loadset_rejects_bad_counts_and_values():
    with pytest.raises(ValueError):
        LoadSet((1, 2))
    with pytest.raises(ValueError):
        LoadSet((1, 2, 3, 4))
    with pytest.raises(ValueError):
        LoadSet((1, -2, 3))
    with pytest.raises(ValueError):
        LoadSet((1, math.inf, 3))
    with pytest.raises(TypeError):
        LoadSet((1, "2", 3))


@pytest.mark.parametrize("loads, expected", [(DATA1, 129), ((0,) * 6, 0), (DATA2, 115)])
def test_ideal_current(loads, expected):
    assert ideal_current(loads) == expected


@pytest.mark.parametrize(
    "loads, labels, expected",
    [
        (DATA1, (1, 2, 3, 1, 3, 2), (127, 130, 130)),
        (DATA3, (1, 2, 3, 2, 3, 1), (135, 131, 117)),
        ((0,) * 6, (3, 1, 2, 2, 1, 3), (0, 0, 0)),
    ],
)
def test_phase_sums(loads, labels, expected):
    assert phase_sums(loads, labels) == expected


def test_phase_sums_length_mismatch():
    with pytest.raises(DimensionError):
        phase_sums(DATA1, (1, 2, 3))


@pytest.mark.parametrize(
    "sums, expected", [((127, 130, 130), (3, 0, 3)), ((125, 112, 108), (13, 4, 17)), ((7.5,) * 3, (0, 0, 0))]
)
def test_pairwise_diffs(sums, expected):
    assert pairwise_diffs(sums) == expected


def test_validate_assignment_verdicts():
    ok = validate_assignment((1, 2, 3, 1, 3, 2), 6)
    assert ok and ok.kind is VerdictKind.VALID and ok.counts == (2, 2, 2)

    uneven = validate_assignment((1, 1, 1, 2, 2, 3), 6)
    assert not uneven
    assert uneven.kind is VerdictKind.UNEQUAL_COUNTS and uneven.counts == (3, 2, 1)

    assert validate_assignment((1, 2, 4, 1, 3, 2), 6).kind is VerdictKind.BAD_LABEL
    assert validate_assignment((1, 2, 3), 6).kind is VerdictKind.LENGTH_MISMATCH
    assert validate_assignment((1, 2, 0), 3).kind is VerdictKind.BAD_LABEL


def test_switch_matrix_examples():
    np.testing.assert_array_equal(assignment_to_switch_matrix((1, 2, 3)), np.eye(3))
    np.testing.assert_array_equal(assignment_to_switch_matrix((2, 2, 2)), [[0, 1, 0]] * 3)
    sw = assignment_to_switch_matrix((1, 2, 3, 1, 3, 2))
    assert sw.shape == (6, 3)
    np.testing.assert_array_equal(sw.sum(axis=0), (2, 2, 2))
    with pytest.raises(ValueError):
        assignment_to_switch_matrix((1, 4))


def test_switch_matrix_rejects_two_closed_switches():
    with pytest.raises(ValueError, match="row 2"):
        switch_matrix_to_assignment([[1, 0, 0], [1, 1, 0]])


@given(st.lists(st.sampled_from((1, 2, 3)), min_size=1, max_size=30))
def test_switch_matrix_round_trip(labels):
    sw = assignment_to_switch_matrix(labels)
    assert (sw.sum(axis=1) == 1).all()
    assert switch_matrix_to_assignment(sw) == tuple(labels)


@given(loads_and_labels())
def test_conservation_integers(case):
    loads, labels = case
    assert sum(phase_sums(loads, labels)) == sum(loads)


@given(loads_and_labels(integers=False))
def test_conservation_reals(case):
    loads, labels = case
    total = sum(loads)
    assert math.isclose(sum(phase_sums(loads, labels)), total, rel_tol=1e-12, abs_tol=1e-12)


@given(loads_and_labels())
def test_largest_diff_is_sum_of_other_two(case):
    a, b, c = sorted(phase_sums(*case), reverse=True)
    assert a - c == (a - b) + (b - c)
    assert max(pairwise_diffs((a, b, c))) == a - c


@given(loads_and_labels(), st.permutations((1, 2, 3)))
def test_label_permutation_equivariance(case, perm):
    loads, labels = case
    relabel = {p: perm[p - 1] for p in (1, 2, 3)}
    before = phase_sums(loads, labels)
    after = phase_sums(loads, [relabel[v] for v in labels])
    for p in (1, 2, 3):
        assert after[relabel[p] - 1] == before[p - 1]
    assert sorted(pairwise_diffs(after)) == sorted(pairwise_diffs(before))


def test_balance_report_fields():
    rep = balance_report(DATA2, (1, 3, 2, 1, 2, 3))
    assert rep.phase_sums == (56, 177, 112)
    assert rep.pairwise_diffs == (121, 65, 56)
    assert rep.max_diff == 121
    # |56-115| + |177-115| + |112-115|
    assert rep.total_abs_deviation == 59 + 62 + 3


def test_feeder_single_point():
    chain = FeederChain((ConnectionPoint((89, 85, 74), ((1, 0, 0), (0, 1, 0), (0, 0, 1))),))
    assert feeder_phase_currents(chain) == [(89, 85, 74)]


def test_feeder_two_points_by_hand():
    head = ConnectionPoint((5, 0, 0), ((0, 1, 0), (0, 1, 0), (0, 1, 0)))
    tail = ConnectionPoint((10, 0, 0), ((1, 0, 0), (1, 0, 0), (1, 0, 0)))
    currents = feeder_phase_currents(FeederChain((head, tail)))
    assert currents == [(10, 5, 0), (10, 0, 0)]


def test_feeder_table1_one_load_per_point():
    chain = FeederChain.from_assignment(DATA1, (1, 2, 3, 1, 3, 2), per_point=1)
    assert len(chain.points) == 6
    assert feeder_phase_currents(chain)[0] == (127, 130, 130)


def test_connection_point_invariants():
    with pytest.raises(ValueError):
        ConnectionPoint((1, 2), ((1, 0, 0), (1, 1, 0)))
    with pytest.raises(ValueError):
        ConnectionPoint((1, 2, 3, 4), ((1, 0, 0),) * 4)


@given(loads_and_labels(), st.integers(1, 3))
def test_feeder_head_equals_phase_sums(case, per_point):
    loads, labels = case
    chain = FeederChain.from_assignment(loads, labels, per_point=per_point)
    assert chain.flatten() == (tuple(loads), tuple(labels))
    assert feeder_phase_currents(chain)[0] == phase_sums(loads, labels)


@pytest.mark.parametrize(
    "branches, expected",
    [
        ([Branch(0, 120, 30, 230), Branch(0, 5, 5, 11)], 0.0),
        ([Branch(1, 100, 0, 10)], 100.0),
        ([Branch(1, 100, 0, 10), Branch(2, 0, 50, 10)], 150.0),
    ],
)
def test_total_power_loss_examples(branches, expected):
    assert total_power_loss(branches) == expected


def test_total_power_loss_zero_voltage():
    with pytest.raises(ZeroDivisionError, match="branch 2"):
        total_power_loss([Branch(1, 1, 1, 1), Branch(1, 1, 1, 0)])
    with pytest.raises(ValueError):
        Branch(-1, 1, 1, 1)


branch_st = st.builds(
    Branch,
    st.floats(0, 10),
    st.floats(-1e4, 1e4),
    st.floats(-1e4, 1e4),
    st.floats(1, 1e4),
)


@given(st.lists(branch_st, max_size=10), st.lists(branch_st, max_size=10), st.floats(0.01, 100))
def test_loss_properties(a, b, lam):
    la, lb = total_power_loss(a), total_power_loss(b)
    assert la >= 0
    assert math.isclose(total_power_loss(a + b), la + lb, rel_tol=1e-12, abs_tol=1e-9)
    scaled = [Branch(x.resistance, lam * x.active_power, lam * x.reactive_power, x.voltage_magnitude) for x in a]
    assert math.isclose(total_power_loss(scaled), lam**2 * la, rel_tol=1e-12, abs_tol=1e-9)
