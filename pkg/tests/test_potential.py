import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    abs_function,
    corpus,
    lattice_pairs,
    longest_cm_prefix,
    non_wcm_map,
    pl_corpus,
    planar_function,
    sign_map,
)
from wcm_inclusion.cm_engine import classify_wcm, cm_sequence
from wcm_inclusion.exceptions import AnchorMismatch, NotCMError, NotInValueSet
from wcm_inclusion.potential import (
    g_lower,
    g_of_sequence,
    grow_family,
    membership_G,
    select_G,
    sequence_family,
    subgradient_test,
)
from wcm_inclusion.setmaps import constant_map, pl_subdifferential_map, problem_spec, strategies
from wcm_inclusion.solver import euler_solve


def test_affine_function_of_sequence():
    S = cm_sequence([([0.0], [1.0]), ([1.0], [1.0])])
    assert g_of_sequence(S, [3.0]) == 3.0


def test_trivial_member_is_always_present():
    fam = sequence_family([0.0], [1.0])
    assert len(fam) == 1
    assert fam.members[0] == cm_sequence([([0.0], [1.0])])
    assert g_lower(fam, [0.0]) == 0.0
    assert g_lower(fam, [-2.0]) == -2.0


def test_grow_family_adds_prefixes():
    fam = sequence_family([0.0], [1.0])
    S = cm_sequence([([0.0], [1.0]), ([1.0], [1.0]), ([2.0], [1.0])])
    grown = grow_family(fam, S)
    assert len(grown) == 3
    assert len(fam) == 1
    assert len(grow_family(grown, S)) == 3


def test_grow_family_rejects_foreign_and_non_cm_sequences():
    fam = sequence_family([0.0], [1.0])
    with pytest.raises(AnchorMismatch):
        grow_family(fam, cm_sequence([([1.0], [1.0])]))
    with pytest.raises(NotCMError):
        grow_family(fam, cm_sequence([([0.0], [1.0]), ([1.0], [-1.0])]))


def test_box_pruning_drops_dominated_members():
    S = cm_sequence([([0.0], [1.0]), ([-1.0], [-1.0])])
    unpruned = grow_family(sequence_family([0.0], [1.0]), S)
    pruned = grow_family(sequence_family([0.0], [1.0], box=([-1.0], [1.0])), S)
    assert len(unpruned) == 2
    assert len(pruned) == 1
    for y in np.linspace(-1.0, 1.0, 9):
        assert g_lower(pruned, [y]) == g_lower(unpruned, [y])


def test_cap_without_box_warns():
    fam = sequence_family([0.0], [1.0], cap=2)
    S = cm_sequence([([0.0], [1.0]), ([1.0], [1.0]), ([2.0], [1.0])])
    with pytest.warns(UserWarning):
        grown = grow_family(fam, S)
    assert len(grown) == 2
    assert grown.members[0] == fam.trivial


def test_family_document_round_trip():
    fam = grow_family(
        sequence_family([0.0], [1.0]),
        cm_sequence([([0.0], [1.0]), ([1.0], [1.0]), ([-1.0], [-1.0])]),
    )
    restored = sequence_family.from_dict(json.loads(fam.to_document()))
    assert len(restored) == len(fam)
    for y in (-2.0, 0.5, 3.0):
        assert g_lower(restored, [y]) == g_lower(fam, [y])


def test_select_G(two_point_constant):
    fam = sequence_family([0.0], [1.0])
    assert select_G(fam, two_point_constant, [2.0]).tolist() == [1.0]
    assert select_G(fam, two_point_constant, [0.0]).tolist() == [1.0]
    assert select_G(fam, two_point_constant, [-2.0]).tolist() == [-1.0]


def test_select_G_can_be_empty():
    fam = sequence_family([0.0], [1.0])
    assert select_G(fam, non_wcm_map(), [1.0]) is None


def test_membership_G(two_point_constant):
    fam = sequence_family([0.0], [1.0])
    assert membership_G(fam, two_point_constant, [2.0], [1.0])
    assert not membership_G(fam, two_point_constant, [2.0], [-1.0])
    with pytest.raises(NotInValueSet):
        membership_G(fam, non_wcm_map(), [1.0], [1.0])


def test_subgradient_inequality_on_constant_map(two_point_constant):
    fam = sequence_family([0.0], [1.0])
    probes = [[-1.0], [0.0], [1.0], [3.0]]
    assert subgradient_test(fam, [2.0], [1.0], probes, map=two_point_constant)


def test_subgradient_test_needs_an_accepted_pair(two_point_constant):
    fam = sequence_family([0.0], [1.0])
    with pytest.raises(ValueError):
        subgradient_test(fam, [2.0], [-1.0], [[0.0]])


@st.composite
def anchored_families(draw):
    """Families of random lattice CM sequences sharing one anchor."""
    first = draw(lattice_pairs(min_length=1, max_length=1))
    n = len(first[0][0])
    box = ([-3.0] * n, [3.0] * n)
    plain = sequence_family(*first[0])
    boxed = sequence_family(*first[0], box=box)
    steps = []
    for _ in range(draw(st.integers(min_value=1, max_value=5))):
        tail = draw(lattice_pairs(min_length=1, max_length=5, dimension=n))
        S = longest_cm_prefix(cm_sequence(first + tail))
        steps.append(S)
    return plain, boxed, steps


def _probes(n, count, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-3.0, 3.0, size=(count, n))


@settings(max_examples=100, deadline=None)
@given(families=anchored_families(), seed=st.integers(min_value=0, max_value=2**16))
def test_potential_growth_is_monotone(families, seed):
    plain, boxed, steps = families
    probes = _probes(plain.dimension, 50, seed)
    for S in steps:
        grown_plain = grow_family(plain, S)
        grown_boxed = grow_family(boxed, S)
        for y in probes:
            assert g_lower(grown_plain, y) >= g_lower(plain, y)
            assert g_lower(grown_boxed, y) >= g_lower(boxed, y) - 1e-9
            assert g_lower(grown_boxed, y) == pytest.approx(g_lower(grown_plain, y), abs=1e-9)
        plain, boxed = grown_plain, grown_boxed
    assert g_lower(plain, plain.x0) == 0.0


@settings(max_examples=100, deadline=None)
@given(families=anchored_families(), seed=st.integers(min_value=0, max_value=2**16))
def test_potential_is_convex(families, seed):
    plain, _, steps = families
    for S in steps:
        plain = grow_family(plain, S)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b = rng.uniform(-3.0, 3.0, size=(2, plain.dimension))
        lam = rng.uniform()
        mid = g_lower(plain, lam * a + (1 - lam) * b)
        assert mid <= lam * g_lower(plain, a) + (1 - lam) * g_lower(plain, b) + 1e-9


def _soundness_cases():
    line = [[x] for x in np.linspace(-2.0, 2.0, 161)]
    line_probes = [[x] for x in np.linspace(-2.0, 2.0, 21)]
    axis = np.linspace(-2.0, 2.0, 17)
    plane = [list(p) for p in itertools.product(axis, axis)]
    plane_probes = [list(p) for p in itertools.product(np.linspace(-2.0, 2.0, 5), repeat=2)]
    return [
        (constant_map([[-1.0], [1.0]]), [0.0], [1.0], line, line_probes),
        (pl_subdifferential_map(abs_function()), [0.0], [1.0], line, line_probes),
        (sign_map(), [0.0], [-1.0], line, line_probes),
        (constant_map([[0.0, 0.0], [1.0, 1.0]]), [0.0, 0.0], [1.0, 1.0], plane, plane_probes),
        (pl_subdifferential_map(planar_function()), [0.0, 0.0], [1.0, 0.0], plane, plane_probes),
    ]


def test_subgradient_inequality_holds_for_accepted_pairs():
    accepted = 0
    for F, x0, v0, points, probes in _soundness_cases():
        spec = problem_spec(F, x0, v0, horizon=1.0, step=0.25)
        fam = grow_family(sequence_family(x0, v0), euler_solve(spec).sequence())
        for x in points:
            for v in F.eval(x):
                if membership_G(fam, F, x, v):
                    accepted += 1
                    assert subgradient_test(fam, x, v, probes, map=F)
    assert accepted >= 1000


@pytest.mark.parametrize("name, f, x0", pl_corpus(), ids=[case[0] for case in pl_corpus()])
@pytest.mark.parametrize("strategy", strategies)
def test_solver_grown_families_vanish_at_the_anchor(name, f, x0, strategy):
    F = pl_subdifferential_map(f)
    v0 = F.eval(x0).points[0]
    n = len(x0)
    for h in (0.01, 0.03, 0.1):
        spec = problem_spec(F, x0, v0, horizon=1.0, step=h, strategy=strategy)
        sequence = euler_solve(spec).sequence()
        plain = grow_family(sequence_family(x0, v0), sequence)
        boxed = grow_family(sequence_family(x0, v0, box=([-2.0] * n, [2.0] * n)), sequence)
        assert g_lower(plain, x0) == 0.0
        assert g_lower(boxed, x0) == 0.0
        assert all(g_of_sequence(S, x0) <= 0.0 for S in plain.members)


def _sample_sequences(F, samples, x0, v0):
    """All two-pair CM sequences over the samples starting at (x0, v0)."""
    anchor = cm_sequence([(x0, v0)])
    for x1 in samples:
        for v1 in F.eval(x1):
            S = anchor.append(x1, v1)
            if S.slack(1) >= 0.0:
                yield S


@pytest.mark.parametrize("name, F, samples", corpus(), ids=[entry[0] for entry in corpus()])
def test_select_G_succeeds_on_wcm_maps(name, F, samples):
    if not classify_wcm(F, samples, L=2).holds:
        pytest.skip(f"{name} is not WCM on its samples")
    for x0 in samples:
        for v0 in F.eval(x0):
            fam = sequence_family(x0, v0)
            for S in _sample_sequences(F, samples, x0, v0):
                fam = grow_family(fam, S)
            for x in samples:
                v = select_G(fam, F, x)
                assert v is not None, f"{name}: no G value at {x.tolist()}"
                assert v in F.eval(x)
