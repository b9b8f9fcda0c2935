"""Tests for the ring model: potential, derivatives, equations of motion and group action."""

import math

import numpy as np
import pytest

from ringbif.core.errors import CollisionError, UnsupportedParameterError
from ringbif.core.model import (
    J,
    Configuration,
    GroupElement,
    Kind,
    ProblemParams,
    act_group,
    angular_impulse,
    check_collision_free,
    circulations,
    filament_tw_field,
    grad_potential,
    hess_potential,
    potential,
    ring_equilibrium,
    vortex_field,
    vortex_linearization,
)


def _perturbed_ring(n, mu, seed=0, size=0.1):
    params = ProblemParams(n, mu)
    rng = np.random.default_rng(seed)
    flat = ring_equilibrium(params).flat() + size * rng.standard_normal(params.size)
    return params, flat


class TestProblemParams:
    def test_derived_quantities(self):
        params = ProblemParams(5, 1.0)
        assert params.s1 == 2.0
        assert params.omega == 3.0
        assert params.zeta == pytest.approx(2 * math.pi / 5)
        assert params.size == 12
        assert params.s(2) == 3.0
        assert params.omega_k(2) == 1.5

    def test_n_too_small(self):
        with pytest.raises(ValueError, match="n must be >= 2"):
            ProblemParams(1)

    def test_non_integer_n(self):
        with pytest.raises(ValueError, match="integer"):
            ProblemParams(4.5)

    def test_kind_from_string(self):
        assert ProblemParams(3, 1.0, kind="filament").kind is Kind.FILAMENT

    def test_non_finite_mu(self):
        with pytest.raises(ValueError, match="finite"):
            ProblemParams(3, float("nan"))


class TestEquilibrium:
    def test_n2_positions(self):
        cfg = ring_equilibrium(ProblemParams(2, 0.0))
        assert cfg.positions[0] == pytest.approx([0.0, 0.0])
        assert cfg.positions[1] == pytest.approx([-1.0, 0.0], abs=1e-15)
        assert cfg.positions[2] == pytest.approx([1.0, 0.0], abs=1e-15)

    def test_n4_positions(self):
        cfg = ring_equilibrium(ProblemParams(4, 1.0))
        expected = [[0, 0], [0, 1], [-1, 0], [0, -1], [1, 0]]
        assert np.allclose(cfg.positions, expected, atol=1e-15)

    def test_potential_n2_mu0(self):
        params = ProblemParams(2, 0.0)
        assert potential(ring_equilibrium(params), params) == pytest.approx(0.5 - math.log(2.0))

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
    @pytest.mark.parametrize("mu", [-3.0, -1.0, 0.0, 0.5, 2.0])
    def test_gradient_vanishes(self, n, mu):
        params = ProblemParams(n, mu)
        assert np.linalg.norm(grad_potential(ring_equilibrium(params), params)) < 1e-12

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_rotation_in_hessian_kernel(self, n):
        params = ProblemParams(n, 1.5)
        cfg = ring_equilibrium(params)
        generator = (cfg.positions @ J.T).reshape(-1)
        assert np.max(np.abs(hess_potential(cfg, params) @ generator)) < 1e-12

    def test_angular_impulse_of_ring(self):
        params = ProblemParams(6, 2.0)
        assert angular_impulse(ring_equilibrium(params), params) == pytest.approx(6.0)


class TestPotential:
    def test_rotation_orthogonality(self):
        """<grad V(u), J u> = 0 for every configuration."""
        for seed in range(5):
            params, flat = _perturbed_ring(5, 0.7, seed=seed, size=0.2)
            rotated = (flat.reshape(-1, 2) @ J.T).reshape(-1)
            assert abs(grad_potential(flat, params) @ rotated) < 1e-10

    def test_hessian_symmetric(self):
        params, flat = _perturbed_ring(4, -1.3, seed=3)
        H = hess_potential(flat, params)
        assert np.max(np.abs(H - H.T)) < 1e-12

    def test_invariant_under_rotation_and_shift(self):
        params, flat = _perturbed_ring(5, 2.0, seed=1)
        g = GroupElement(shift=2, angle=0.4)
        assert potential(act_group(flat, g), params) == pytest.approx(potential(flat, params), rel=1e-12)

    def test_gradient_equivariant(self):
        params, flat = _perturbed_ring(6, -0.5, seed=2)
        g = GroupElement(shift=1, angle=1.1)
        lhs = grad_potential(act_group(flat, g), params)
        rhs = act_group(grad_potential(flat, params), g)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_stacked_matches_single(self):
        params, a = _perturbed_ring(3, 1.0, seed=4)
        _, b = _perturbed_ring(3, 1.0, seed=5)
        stacked = potential(np.stack([a.reshape(-1, 2), b.reshape(-1, 2)]), params)
        assert stacked[0] == pytest.approx(potential(a, params))
        assert stacked[1] == pytest.approx(potential(b, params))

    def test_collision_raises(self):
        params = ProblemParams(3, 1.0)
        positions = np.array(ring_equilibrium(params).positions)
        positions[2] = positions[1]
        with pytest.raises(CollisionError) as exc:
            potential(positions, params)
        assert exc.value.pair == (1, 2)

    def test_collision_threshold(self):
        positions = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1e-10], [-1.0, 0.0]])
        with pytest.raises(CollisionError, match="elements 1 and 2"):
            check_collision_free(positions)

    def test_wrong_size(self):
        with pytest.raises(ValueError, match="elements"):
            potential(ring_equilibrium(ProblemParams(3)), ProblemParams(4))


class TestConfiguration:
    def test_flat_roundtrip(self):
        cfg = ring_equilibrium(ProblemParams(3, 1.0))
        assert np.array_equal(Configuration(cfg.flat()).positions, cfg.positions)

    def test_read_only(self):
        cfg = ring_equilibrium(ProblemParams(3, 1.0))
        with pytest.raises(ValueError):
            cfg.positions[0, 0] = 1.0

    def test_bad_shape(self):
        with pytest.raises(ValueError, match="shape"):
            Configuration(np.zeros((3, 3)))

    def test_from_complex(self):
        cfg = Configuration.from_complex([0, 1, 1j, -1])
        assert cfg.n == 3
        assert cfg.positions[2] == pytest.approx([0.0, 1.0])
        assert cfg.min_distance() == pytest.approx(1.0)


class TestEquationsOfMotion:
    def test_vortex_field_vanishes_at_ring(self):
        params = ProblemParams(5, 2.0)
        assert np.max(np.abs(vortex_field(ring_equilibrium(params), params))) < 1e-12

    def test_vortex_field_solves_k_j_form(self):
        params, flat = _perturbed_ring(5, 2.0, seed=4)
        velocity = vortex_field(flat, params).reshape(-1, 2)
        lhs = circulations(params)[:, None] * (velocity @ J.T)
        assert np.max(np.abs(lhs.reshape(-1) - grad_potential(flat, params))) < 1e-11

    def test_vortex_field_mu0_unsupported(self):
        params = ProblemParams(4, 0.0)
        with pytest.raises(UnsupportedParameterError):
            vortex_field(ring_equilibrium(params), params)

    def test_filament_field_vanishes_at_rest(self):
        params = ProblemParams(4, 1.0, 2.0, Kind.FILAMENT)
        state = np.concatenate([ring_equilibrium(params).flat(), np.zeros(params.size)])
        assert np.max(np.abs(filament_tw_field(state, params))) < 1e-12

    def test_filament_state_length(self):
        params = ProblemParams(4, 1.0, kind=Kind.FILAMENT)
        with pytest.raises(ValueError, match="length"):
            filament_tw_field(np.zeros(3), params)

    def test_vortex_linearization_has_rotation_kernel(self):
        params = ProblemParams(4, 1.0)
        A = vortex_linearization(params)
        generator = (ring_equilibrium(params).positions @ J.T).reshape(-1)
        assert np.max(np.abs(A @ generator)) < 1e-12


class TestGroupAction:
    def test_full_shift_is_identity(self):
        params, flat = _perturbed_ring(5, 1.0)
        assert np.allclose(act_group(flat, GroupElement(shift=5)), flat)

    def test_ring_fixed_by_shift_and_rotation(self):
        params = ProblemParams(6, 1.0)
        cfg = ring_equilibrium(params)
        moved = act_group(cfg, GroupElement(shift=1, angle=params.zeta))
        assert np.max(np.abs(moved.positions - cfg.positions)) < 1e-14

    def test_central_element_only_rotates(self):
        positions = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 2.0], [-2.0, 0.0]])
        moved = act_group(Configuration(positions), GroupElement(shift=1, angle=math.pi / 2))
        assert moved.positions[0] == pytest.approx([0.0, -1.0], abs=1e-15)
        assert moved.positions[1] == pytest.approx([2.0, 0.0], abs=1e-15)

    def test_isotropy_generator(self):
        g = GroupElement.isotropy_generator(4, 3)
        assert g.shift == 1
        assert g.angle == pytest.approx(math.pi / 2)
        assert g.phase == pytest.approx(-1.5 * math.pi)

    def test_unsupported_target(self):
        with pytest.raises(TypeError):
            act_group("ring", GroupElement())
