"""Tests for constraint regions and the lattice operations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmaxent import (
    Classical,
    ConvexRegion,
    DegenerateInput,
    FeasibilityStatus,
    InvalidTarget,
    ModelMismatch,
    Quantum,
    State,
    Unsupported,
    UnsupportedRepresentation,
    effect_from_matrix,
    enumerate_vertices,
    evaluate,
    feasibility,
    includes,
    indicator_observable,
    join,
    maximally_mixed,
    meet,
    random_state,
    region_from_effect,
    region_from_mean,
    spectral_observable,
    unit_effect,
    whole_space,
)
from gmaxent.regions import LinearConstraint

from helpers import random_region, region_eq, squarebit_model

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def quantum_state(model, diag_matrix):
    return State(model, model.matrix_to_coords(np.asarray(diag_matrix, dtype=complex)))


class TestConstraints:
    def test_zero_functional_rejected(self):
        with pytest.raises(DegenerateInput):
            LinearConstraint(Classical(2), np.zeros(2), 0.5)

    def test_vrep_must_satisfy_hrep(self):
        model = Classical(2)
        constraint = LinearConstraint(model, np.array([0.0, 1.0]), 0.3)
        good = State(model, np.array([0.7, 0.3]))
        bad = State(model, np.array([0.5, 0.5]))
        ConvexRegion(model, (constraint,), (good,))
        with pytest.raises(ValueError):
            ConvexRegion(model, (constraint,), (bad,))


class TestRegionBuilders:
    def test_mean_region_contains_center(self):
        model = Quantum(2)
        region = region_from_mean(spectral_observable(model, SZ), 0.0)
        assert region.contains(maximally_mixed(model))

    def test_mean_region_boundary_point(self):
        model = Quantum(2)
        region = region_from_mean(spectral_observable(model, SZ), 1.0)
        top = quantum_state(model, np.diag([1.0, 0.0]))
        bottom = quantum_state(model, np.diag([0.0, 1.0]))
        assert region.contains(top)
        assert not region.contains(bottom)
        # z = 1 pins the Bloch vector, so the region is that single state
        result = feasibility(region)
        assert result.status == FeasibilityStatus.BOUNDARY_ONLY
        np.testing.assert_allclose(result.witness.coords, top.coords, atol=1e-6)

    def test_classical_mean_region_single_point(self):
        model = Classical(2)
        region = region_from_mean(indicator_observable(model, [0.0, 1.0]), 0.3)
        vertices = enumerate_vertices(region)
        assert len(vertices) == 1
        np.testing.assert_allclose(vertices[0].coords, [0.7, 0.3], atol=1e-10)

    def test_effect_region(self):
        model = Quantum(2)
        e = effect_from_matrix(model, np.diag([0.3, 0.7]))
        region = region_from_effect(e, 0.65)
        assert region.contains(quantum_state(model, np.diag([0.125, 0.875])))

    def test_effect_region_membership_matches_evaluate(self):
        model = Classical(3)
        rng = np.random.default_rng(19)
        e = unit_effect(model)
        from gmaxent import random_effect

        for _ in range(10):
            eff = random_effect(model, rng)
            lam = float(rng.uniform(0.2, 0.8))
            region = region_from_effect(eff, lam)
            for _ in range(10):
                s = random_state(model, rng)
                inside = abs(evaluate(eff, s) - lam) <= 1e-8
                assert region.contains(s) == inside

    def test_unit_effect_full_target(self):
        model = Quantum(2)
        region = region_from_effect(unit_effect(model), 1.0)
        rng = np.random.default_rng(7)
        for _ in range(20):
            assert region.contains(random_state(model, rng))

    def test_unit_effect_half_target_infeasible(self):
        for model in (Classical(3), Quantum(2)):
            region = region_from_effect(unit_effect(model), 0.5)
            assert feasibility(region).status == FeasibilityStatus.INFEASIBLE

    def test_invalid_target(self):
        with pytest.raises(InvalidTarget):
            region_from_effect(unit_effect(Classical(2)), 1.5)


class TestMeet:
    def test_whole_space_is_identity(self):
        model = Classical(3)
        region = random_region(model, np.random.default_rng(3))
        merged = meet(region, whole_space(model))
        assert [c.target for c in merged.h_rep] == [c.target for c in region.h_rep]
        assert region_eq(merged, region)

    def test_idempotent(self):
        region = random_region(Classical(3), np.random.default_rng(5))
        assert region_eq(meet(region, region), region)
        assert len(meet(region, region).h_rep) == len(region.h_rep)

    def test_bloch_contradiction_infeasible(self):
        model = Quantum(2)
        region = meet(
            region_from_mean(spectral_observable(model, SZ), 1.0),
            region_from_mean(spectral_observable(model, SX), 1.0),
        )
        assert feasibility(region).status == FeasibilityStatus.INFEASIBLE

    def test_conflicting_duplicate_marks_empty(self):
        model = Classical(3)
        obs = indicator_observable(model, [0.0, 1.0, 2.0])
        region = meet(region_from_mean(obs, 1.0), region_from_mean(obs, 1.5))
        assert region.known_empty
        assert feasibility(region).status == FeasibilityStatus.INFEASIBLE

    def test_scaled_duplicate_dropped(self):
        model = Classical(3)
        f = np.array([0.0, 1.0, 2.0])
        a = ConvexRegion(model, (LinearConstraint(model, f, 1.0),))
        b = ConvexRegion(model, (LinearConstraint(model, 2.0 * f, 2.0),))
        merged = meet(a, b)
        assert len(merged.h_rep) == 1
        assert not merged.known_empty

    def test_model_mismatch(self):
        with pytest.raises(ModelMismatch):
            meet(whole_space(Classical(2)), whole_space(Classical(3)))


class TestJoin:
    def test_two_quantum_points(self):
        model = Quantum(2)
        a = ConvexRegion(model, (), (quantum_state(model, np.diag([1.0, 0.0])),))
        b = ConvexRegion(model, (), (quantum_state(model, np.diag([0.0, 1.0])),))
        hull = join(a, b)
        assert len(hull.v_rep) == 2
        assert hull.contains(maximally_mixed(model))

    def test_idempotent(self):
        model = Classical(3)
        region = random_region(model, np.random.default_rng(11))
        assert region_eq(join(region, region), region)

    def test_segment_meets_plane(self):
        model = Classical(3)
        a = ConvexRegion(model, (), (State(model, np.array([1.0, 0.0, 0.0])),))
        b = ConvexRegion(model, (), (State(model, np.array([0.0, 1.0, 0.0])),))
        segment = join(a, b)
        plane = region_from_mean(indicator_observable(model, [0.0, 1.0, 0.0]), 0.25)
        result = meet(segment, plane)
        check = feasibility(result)
        assert check.status == FeasibilityStatus.FEASIBLE
        assert result.contains(State(model, np.array([0.75, 0.25, 0.0])))

    def test_quantum_hrep_join_unsupported(self):
        model = Quantum(2)
        region = region_from_mean(spectral_observable(model, SZ), 0.0)
        with pytest.raises(UnsupportedRepresentation):
            join(region, region)


class TestIncludes:
    def test_whole_space_includes_everything(self):
        model = Quantum(2)
        region = region_from_mean(spectral_observable(model, SZ), 0.3)
        assert includes(whole_space(model), region)

    def test_distinct_points(self):
        model = Quantum(2)
        a = ConvexRegion(model, (), (quantum_state(model, np.diag([1.0, 0.0])),))
        b = ConvexRegion(model, (), (quantum_state(model, np.diag([0.0, 1.0])),))
        assert not includes(a, b)
        assert includes(a, a)

    def test_plane_includes_point(self):
        model = Classical(3)
        plane = region_from_mean(indicator_observable(model, [0.0, 1.0, 2.0]), 1.0)
        point = ConvexRegion(model, (), (State(model, np.array([0.5, 0.0, 0.5])),))
        assert includes(plane, point)

    def test_unit_effect_region_equals_whole_space(self):
        model = Quantum(2)
        trivial = region_from_effect(unit_effect(model), 1.0)
        assert region_eq(trivial, whole_space(model))
        nontrivial = region_from_mean(spectral_observable(model, SZ), 0.0)
        assert not includes(nontrivial, whole_space(model))
        assert includes(whole_space(model), nontrivial)


class TestFeasibility:
    def test_classical_witness(self):
        model = Classical(2)
        region = region_from_mean(indicator_observable(model, [0.0, 1.0]), 0.3)
        result = feasibility(region)
        assert result.status == FeasibilityStatus.FEASIBLE
        np.testing.assert_allclose(result.witness.coords, [0.7, 0.3], atol=1e-9)
        assert all(c.residual(result.witness) <= 1e-8 for c in region.h_rep)

    def test_classical_unreachable_target(self):
        model = Classical(2)
        region = region_from_mean(indicator_observable(model, [0.0, 1.0]), 2.0)
        assert feasibility(region).status == FeasibilityStatus.INFEASIBLE

    def test_quantum_boundary(self):
        model = Quantum(2)
        region = region_from_mean(spectral_observable(model, SZ), 1.0)
        result = feasibility(region)
        assert result.status == FeasibilityStatus.BOUNDARY_ONLY
        np.testing.assert_allclose(
            result.witness.density_matrix().entries, np.diag([1.0, 0.0]), atol=1e-3
        )

    def test_random_witnesses_satisfy_constraints(self):
        rng = np.random.default_rng(13)
        for model in (Classical(4), squarebit_model()):
            for _ in range(25):
                region = random_region(model, rng)
                result = feasibility(region)
                assert result.status == FeasibilityStatus.FEASIBLE
                assert max(c.residual(result.witness) for c in region.h_rep) <= 1e-8


class TestEnumerateVertices:
    def test_unconstrained_simplex(self):
        vertices = enumerate_vertices(whole_space(Classical(3)))
        assert len(vertices) == 3
        coords = sorted(tuple(np.round(v.coords, 9)) for v in vertices)
        assert coords == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]

    def test_plane_cut(self):
        model = Classical(3)
        region = region_from_mean(indicator_observable(model, [0.0, 1.0, 2.0]), 1.0)
        vertices = enumerate_vertices(region)
        coords = sorted(tuple(np.round(v.coords, 9)) for v in vertices)
        assert coords == [(0.0, 1.0, 0.0), (0.5, 0.0, 0.5)]

    def test_single_point(self):
        model = Classical(2)
        region = region_from_mean(indicator_observable(model, [0.0, 1.0]), 0.3)
        vertices = enumerate_vertices(region)
        assert len(vertices) == 1
        np.testing.assert_allclose(vertices[0].coords, [0.7, 0.3], atol=1e-9)

    def test_cap(self):
        model = Classical(6)
        rng = np.random.default_rng(17)
        anchor = random_state(model, rng)
        region = whole_space(model)
        for _ in range(7):
            f = rng.uniform(0.0, 1.0, 6)
            region = meet(region, ConvexRegion(model, (LinearConstraint(model, f, float(f @ anchor.coords)),)))
        assert len(region.h_rep) + model.ambient_dim > 12
        with pytest.raises(Unsupported):
            enumerate_vertices(region)

    def test_quantum_unsupported(self):
        with pytest.raises(Unsupported):
            enumerate_vertices(whole_space(Quantum(2)))

    def test_squarebit_vertices(self):
        model = squarebit_model()
        vertices = enumerate_vertices(whole_space(model))
        assert len(vertices) == 4
        points = sorted(tuple(np.round(v.point(), 9)) for v in vertices)
        assert points == [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]

    def test_squarebit_edge_cut(self):
        model = squarebit_model()
        # x = 0.8 slices the square in a vertical segment; the generator list
        # must cover its endpoints (non-extreme interior points may appear)
        constraint = LinearConstraint(model, np.array([0.0, 1.0, 0.0]), 0.8)
        region = ConvexRegion(model, (constraint,))
        points = sorted(tuple(np.round(v.point(), 9)) for v in enumerate_vertices(region))
        assert (0.8, -1.0) in points and (0.8, 1.0) in points
        assert all(x == 0.8 and -1.0 <= y <= 1.0 for x, y in points)


class TestLatticeLaws:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["classical", "squarebit"]))
    def test_laws_on_random_pairs(self, seed, kind):
        model = Classical(3) if kind == "classical" else squarebit_model()
        rng = np.random.default_rng(seed)
        a = random_region(model, rng)
        b = random_region(model, rng)
        assert region_eq(meet(a, b), meet(b, a))
        assert region_eq(join(a, b), join(b, a))
        assert region_eq(meet(a, a), a)
        assert region_eq(join(a, a), a)
        assert region_eq(meet(a, join(a, b)), a)
        assert region_eq(join(a, meet(a, b)), a)
        assert includes(a, meet(a, b))
        assert includes(b, meet(a, b))

    def test_meet_associative(self):
        rng = np.random.default_rng(99)
        model = Classical(3)
        a, b, c = (random_region(model, rng) for _ in range(3))
        assert region_eq(meet(meet(a, b), c), meet(a, meet(b, c)))
