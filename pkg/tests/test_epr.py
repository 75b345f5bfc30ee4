#!/usr/bin/env python3
"""Tests for state validation, EPR maps, steering supports and the steering ellipsoid."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from steering_geometry.epr import (
    Party,
    Side,
    TwoQubitState,
    apply_map,
    epr_map,
    pure_state_images,
    reduced_state,
    steering_ellipsoid,
    steering_support,
    theta_from_density,
)
from steering_geometry.errors import ProjectionUndefinedError, StateValidationError
from steering_geometry.pauli_space import PAULI, PauliVector
from steering_geometry.sampling import quasi_uniform_directions
from steering_geometry.states import ModifiedWerner, Product, Werner, build, random_state

PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


def random_outcomes(rng, n: int) -> np.ndarray:
    """Coordinates of n random operators 0 <= E <= I."""
    x0 = rng.uniform(0.0, 2.0, n)
    radius = np.minimum(x0, 2.0 - x0) * rng.uniform(0.0, 1.0, n)
    dirs = rng.standard_normal((n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return np.column_stack([x0, radius[:, None] * dirs])


def bob_conditional(rho: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Tr_A[rho (E (x) I)] by explicit index contraction."""
    return np.einsum("abcd,ca->bd", rho.reshape(2, 2, 2, 2), e)


def alice_conditional(rho: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Tr_B[rho (I (x) E)]."""
    return np.einsum("abcd,db->ac", rho.reshape(2, 2, 2, 2), e)


def test_werner_density_reconstruction():
    """Theta = diag(1, p, -p, p) reconstructs p |Phi+><Phi+| + (1 - p) I/4."""
    p = 0.37
    state = build(Werner(p))
    expected = p * np.outer(PHI_PLUS, PHI_PLUS) + (1 - p) * np.eye(4) / 4
    np.testing.assert_allclose(state.density, expected, atol=1e-12)


def test_theta_density_round_trip():
    """theta_from_density inverts the reconstruction."""
    for seed in range(20):
        state = random_state(seed)
        again = theta_from_density(state.density)
        np.testing.assert_allclose(again.theta, state.theta, atol=1e-12)


def test_validation_names_invariant():
    """Each density-matrix violation reports its invariant."""
    with pytest.raises(StateValidationError) as exc:
        theta_from_density(np.array([[0.5, 0.3, 0, 0], [0.1, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    assert exc.value.invariant == "hermitian"

    with pytest.raises(StateValidationError) as exc:
        theta_from_density(np.eye(4) / 2)
    assert exc.value.invariant == "trace"

    with pytest.raises(StateValidationError) as exc:
        TwoQubitState.from_theta(np.diag([1.0, 1.0, 1.0, 1.0]))
    assert exc.value.invariant == "positivity"

    with pytest.raises(StateValidationError) as exc:
        TwoQubitState.from_theta(np.eye(3))
    assert exc.value.invariant == "shape"


def test_reduced_states_match_partial_traces():
    """Reduced states agree with explicit partial traces of rho."""
    state = build(ModifiedWerner(0.4, 0.75))
    rho4 = state.density.reshape(2, 2, 2, 2)
    rho_a = np.einsum("abcb->ac", rho4)
    rho_b = np.einsum("abad->bd", rho4)
    np.testing.assert_allclose(reduced_state(state, Party.A).as_array(), PauliVector.from_matrix(rho_a).as_array(), atol=1e-12)
    np.testing.assert_allclose(reduced_state(state, Party.B).as_array(), PauliVector.from_matrix(rho_b).as_array(), atol=1e-12)
    np.testing.assert_allclose(reduced_state(state, Party.A).as_array(), [1, 0, 0, 0.75 * 0.6], atol=1e-12)
    np.testing.assert_allclose(reduced_state(state, Party.B).as_array(), [1, 0, 0, 0], atol=1e-12)


def test_epr_maps_match_conditional_states():
    """Both EPR maps agree with the operator definition on random outcomes."""
    rng = np.random.default_rng(7)
    for seed in range(5):
        state = random_state(seed)
        alice, bob = epr_map(state), epr_map(state, Side.BOB_TO_ALICE)
        for coords in random_outcomes(rng, 10):
            e = PauliVector.from_array(coords)
            expected_b = PauliVector.from_matrix(bob_conditional(state.density, e.to_matrix()))
            expected_a = PauliVector.from_matrix(alice_conditional(state.density, e.to_matrix()))
            np.testing.assert_allclose(apply_map(alice, e).as_array(), expected_b.as_array(), atol=1e-12)
            np.testing.assert_allclose(apply_map(bob, e).as_array(), expected_a.as_array(), atol=1e-12)


def test_map_vertex_is_reduced_state():
    state = random_state(11)
    map_ = epr_map(state)
    np.testing.assert_allclose(map_.vertex.as_array(), reduced_state(state).as_array(), atol=1e-12)
    np.testing.assert_allclose(map_.center.as_array(), 0.5 * reduced_state(state).as_array(), atol=1e-12)


def test_map_rank():
    assert epr_map(build(Werner(0.0))).rank == 1
    assert epr_map(build(Werner(0.5))).rank == 4
    assert epr_map(build(Product((0, 0, 0.5), (0.3, 0, 0)))).is_degenerate


def test_steering_support_matches_outcome_maximum():
    """The support over mapped outcomes is attained at a mapped projector, I or O."""
    state = build(ModifiedWerner(0.4, 0.8))
    map_ = epr_map(state)
    rng = np.random.default_rng(8)
    dirs = quasi_uniform_directions(4000)
    projectors = np.vstack([np.column_stack([np.ones(len(dirs)), dirs]), [[0, 0, 0, 0], [2, 0, 0, 0]]])
    images = apply_map(map_, projectors)
    for w in rng.standard_normal((20, 4)):
        sampled = 0.5 * np.max(images @ w)
        assert steering_support(map_, PauliVector.from_array(w)) >= sampled - 1e-12
        assert steering_support(map_, PauliVector.from_array(w)) == pytest.approx(sampled, abs=1e-2)


def test_central_symmetry_identity():
    """h(w) - h(-w) = 2 <c, w> on random states and directions."""
    rng = np.random.default_rng(9)
    for seed in range(100):
        map_ = epr_map(random_state(seed))
        w = rng.standard_normal((10_000, 4))
        lhs = steering_support(map_, w) - steering_support(map_, -w)
        rhs = w @ map_.center.as_array()
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_mapped_outcomes_stay_in_forward_cone():
    """Every mapped outcome is a positive operator."""
    rng = np.random.default_rng(10)
    for seed in range(20):
        map_ = epr_map(random_state(seed))
        images = apply_map(map_, random_outcomes(rng, 10_000))
        x0 = images[:, 0]
        spatial = np.sum(images[:, 1:] ** 2, axis=1)
        assert np.all(x0 >= -1e-9)
        assert np.all(x0 ** 2 >= spatial - 1e-9)


def test_werner_ellipsoid_is_centred_ball():
    report = steering_ellipsoid(build(Werner(0.3)))
    np.testing.assert_allclose(report.center, 0.0, atol=1e-12)
    np.testing.assert_allclose(report.semiaxes, [0.3, 0.3, 0.3], atol=1e-12)
    assert not report.degenerate


def test_bell_ellipsoid_is_bloch_sphere():
    report = steering_ellipsoid(build(Werner(1.0)))
    np.testing.assert_allclose(report.semiaxes, [1.0, 1.0, 1.0], atol=1e-12)


def test_modified_werner_ellipsoid_matches_projected_states():
    """Projected pure-state images lie on the closed-form ellipsoid surface."""
    state = build(ModifiedWerner(0.4, 0.8))
    report = steering_ellipsoid(state)
    assert report.center[2] < 0
    np.testing.assert_allclose(report.center[:2], 0.0, atol=1e-12)
    points = pure_state_images(state, quasi_uniform_directions(500))
    q_inv = np.linalg.inv(report.shape_matrix)
    offsets = points - report.center
    np.testing.assert_allclose(np.einsum("ni,ij,nj->n", offsets, q_inv, offsets), 1.0, atol=1e-9)


def test_random_state_ellipsoids_match_projected_states():
    for seed in range(20):
        state = random_state(seed)
        report = steering_ellipsoid(state)
        points = pure_state_images(state, quasi_uniform_directions(200))
        q_inv = np.linalg.inv(report.shape_matrix)
        offsets = points - report.center
        np.testing.assert_allclose(np.einsum("ni,ij,nj->n", offsets, q_inv, offsets), 1.0, atol=1e-7)


def test_ellipsoid_support_matches_samples():
    state = random_state(3)
    report = steering_ellipsoid(state)
    points = pure_state_images(state, quasi_uniform_directions(5000))
    for u in np.eye(3):
        assert report.support(u) == pytest.approx(np.max(points @ u), abs=5e-3)


def test_pure_alice_marginal_has_no_ellipsoid():
    """A pure reduced state on Alice's side makes the projection undefined."""
    with pytest.raises(ProjectionUndefinedError):
        steering_ellipsoid(build(Product((0, 0, 1), (0, 0, 0))))


def test_pauli_pair_convention():
    """Theta_ij = Tr[rho (sigma_i (x) sigma_j)] with rows indexing A."""
    state = build(Product((0, 0, 0.5), (0.3, 0, 0)))
    expected = np.trace(state.density @ np.kron(PAULI[3], PAULI[0])).real
    assert state.theta[3, 0] == pytest.approx(expected)
    assert state.theta[3, 0] == pytest.approx(0.5)
    assert state.theta[0, 1] == pytest.approx(0.3)


def test_werner_steering_support_example():
    map_ = epr_map(build(Werner(0.5)))
    assert steering_support(map_, PauliVector.of(0, 0, 0, 1)) == pytest.approx(0.125, abs=1e-12)


def test_product_state_ellipsoid_is_a_point():
    """Alice can only steer Bob's marginal: zero semiaxes, rank-one map."""
    state = build(Product((0.2, 0, 0.4), (0.3, -0.1, 0.5)))
    report = steering_ellipsoid(state)
    np.testing.assert_allclose(report.semiaxes, 0.0, atol=1e-7)
    np.testing.assert_allclose(report.center, [0.3, -0.1, 0.5], atol=1e-12)
    assert report.degenerate

    map_ = epr_map(state)
    assert map_.rank == 1
    # w orthogonal to the image line (1, b) annihilates every steered outcome
    assert steering_support(map_, PauliVector.of(-0.3, 1, 0, 0)) == pytest.approx(0.0, abs=1e-12)
