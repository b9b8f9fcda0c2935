"""Tests for Fourier loops, the Galerkin residual, Newton correction and branch following."""

import math

import numpy as np
import pytest

from ringbif.core.continuation import (
    Branch,
    BranchState,
    Constraints,
    ContinuationSettings,
    FourierLoop,
    Termination,
    continue_branch,
    galerkin_residual,
    linearized_residual,
    loop_potential_drift,
    newton_correct,
    predictor,
    quadrature_times,
    symmetry_residual,
)
from ringbif.core.errors import CollisionError
from ringbif.core.model import GroupElement, Kind, ProblemParams, act_group, ring_equilibrium
from ringbif.core.spectral import block_m, vortex_bif_points
from ringbif.core.symmetry import irrep_basis
from ringbif.tools.branch import run_branch, select_point


def _constant(params, nu=1.0, p=4):
    return FourierLoop.constant(ring_equilibrium(params), nu, p)


def _corrected(params, k, amplitude=1e-3, p=6, full=False):
    point = vortex_bif_points(k, params)[0]
    guess = predictor(k, point, amplitude, params, truncation=p)
    return newton_correct(guess, params, Constraints(amplitude=amplitude), k=None if full else k)


def _loop_distance(a, b, samples=64):
    t = 2.0 * math.pi * np.arange(samples) / samples
    return float(np.max(np.abs(a.evaluate(t) - b.evaluate(t))))


class TestFourierLoop:
    def test_constant_loop(self):
        params = ProblemParams(3, 1.0)
        loop = _constant(params, nu=2.0)
        assert loop.p == 4
        assert loop.n == 3
        assert loop.period == pytest.approx(math.pi)
        assert loop.amplitude == 0.0
        assert np.allclose(loop.evaluate([0.0, 1.0]), ring_equilibrium(params).positions)

    def test_first_harmonic(self):
        modes = np.zeros((3, 3, 2), dtype=complex)
        modes[1, 1, 0] = 0.5
        loop = FourierLoop(1.0, modes)
        assert loop.evaluate([0.0])[0, 1, 0] == pytest.approx(1.0)
        assert loop.evaluate([math.pi])[0, 1, 0] == pytest.approx(-1.0)
        assert loop.amplitude == pytest.approx(1.0)

    def test_mean_forced_real(self):
        modes = np.zeros((2, 3, 2), dtype=complex)
        modes[0, 0, 0] = 1.0 + 2.0j
        assert FourierLoop(1.0, modes).modes[0, 0, 0] == 1.0

    def test_packed_roundtrip(self):
        rng = np.random.default_rng(0)
        modes = rng.standard_normal((4, 4, 2)) + 1j * rng.standard_normal((4, 4, 2))
        loop = FourierLoop(1.5, modes)
        again = FourierLoop.from_packed(loop.packed(), 1.5, 3)
        assert np.allclose(again.modes, loop.modes)

    def test_invalid(self):
        with pytest.raises(ValueError, match="nu must be positive"):
            FourierLoop(0.0, np.zeros((2, 3, 2)))
        with pytest.raises(ValueError, match="shape"):
            FourierLoop(1.0, np.zeros((1, 3, 2)))

    def test_truncation(self):
        loop = _constant(ProblemParams(3, 1.0), p=4)
        assert loop.with_truncation(8).p == 8
        assert np.allclose(loop.with_truncation(2).modes[0], loop.modes[0])
        assert loop.with_nu(3.0).nu == 3.0

    def test_quadrature_nodes(self):
        assert quadrature_times(4).size == 18


class TestGalerkinResidual:
    @pytest.mark.parametrize("kind", [Kind.VORTEX, Kind.FILAMENT])
    def test_equilibrium_is_zero(self, kind):
        params = ProblemParams(4, 1.0, 0.5, kind)
        assert np.max(np.abs(galerkin_residual(_constant(params, nu=1.3), params))) < 1e-12

    @pytest.mark.parametrize("kind", [Kind.VORTEX, Kind.FILAMENT])
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_linearization_matches_block(self, kind, k):
        params = ProblemParams(5, 1.0, 0.8, kind)
        nu = 0.7
        basis = irrep_basis(5, k)
        w = np.linspace(1.0, 2.0, basis.dim) + 0.5j
        for l in (1, 2):
            modes = np.zeros((4, 6, 2), dtype=complex)
            modes[l] = basis.embed(w).reshape(6, 2)
            delta = linearized_residual(FourierLoop(nu, modes), params)
            coords = basis.coordinates(delta[l].reshape(-1))
            assert np.allclose(coords, block_m(k, l * nu, params).matrix @ w, atol=1e-10)

    def test_collision_names_node(self):
        params = ProblemParams(2, 1.0)
        modes = np.zeros((2, 3, 2), dtype=complex)
        modes[0] = ring_equilibrium(params).positions
        # element 1 sits on the central element at t = 0
        modes[1, 1, 0] = 0.5
        with pytest.raises(CollisionError) as exc:
            galerkin_residual(FourierLoop(1.0, modes), params)
        assert exc.value.node is not None


class TestPredictor:
    @pytest.mark.parametrize("n, mu, k", [(5, 1.0, 2), (5, 1.0, 1), (4, 0.0, 2), (6, 1.0, 3), (2, 1.0, 1)])
    def test_symmetric(self, n, mu, k):
        params = ProblemParams(n, mu)
        point = vortex_bif_points(k, params)[0]
        loop = predictor(k, point, 1e-2, params, truncation=6)
        assert loop.nu == point.nu0
        assert loop.amplitude == pytest.approx(1e-2)
        assert symmetry_residual(loop, k, n) < 1e-12

    def test_fixed_by_isotropy_generator(self):
        params = ProblemParams(5, 1.0)
        point = vortex_bif_points(2, params)[0]
        loop = predictor(2, point, 1e-2, params, truncation=4)
        moved = act_group(loop, GroupElement.isotropy_generator(5, 2))
        assert np.max(np.abs(moved.modes - loop.modes)) < 1e-13

    def test_zero_amplitude(self):
        params = ProblemParams(5, 1.0)
        loop = predictor(2, 3.0, 0.0, params, truncation=4)
        assert loop.amplitude == 0.0

    def test_symmetry_residual_detects_asymmetry(self):
        params = ProblemParams(5, 1.0)
        modes = np.array(_constant(params).modes)
        modes[1, 2, 0] = 0.1
        assert symmetry_residual(FourierLoop(1.0, modes), 2, 5) > 1e-2

    def test_symmetry_residual_size_mismatch(self):
        with pytest.raises(ValueError, match="expected 4"):
            symmetry_residual(_constant(ProblemParams(5, 1.0)), 2, 4)


class TestNewton:
    def test_equilibrium_returns_immediately(self):
        params = ProblemParams(4, 1.0)
        state = newton_correct(_constant(params), params, Constraints(amplitude=0.0))
        assert state.iterations == 0
        assert state.residual_norm < 1e-12
        assert state.nu == 1.0

    def test_constraints_need_one_pin(self):
        with pytest.raises(ValueError, match="either"):
            Constraints()
        with pytest.raises(ValueError, match="either"):
            Constraints(amplitude=1e-3, anchor=np.zeros(3), tangent=np.ones(3))

    def test_corrects_predictor(self):
        params = ProblemParams(5, 1.0)
        point = vortex_bif_points(2, params)[0]
        guess = predictor(2, point, 1e-3, params, truncation=6)
        state = newton_correct(guess, params, Constraints(amplitude=1e-3), k=2)
        assert state.amplitude == pytest.approx(1e-3)
        assert state.nu == pytest.approx(point.nu0, abs=1e-4)
        assert np.max(np.abs(galerkin_residual(state.loop, params))) < 1e-10


class TestCorrectedLoops:
    def test_truncation_doubling_leaves_loop_unchanged(self):
        params = ProblemParams(4, 0.0)
        coarse = _corrected(params, 2, amplitude=5e-3, p=16)
        fine = newton_correct(coarse.loop.with_truncation(32), params, Constraints(amplitude=5e-3), k=2)
        assert fine.loop.p == 32
        assert _loop_distance(coarse.loop, fine.loop) < 1e-9
        assert abs(coarse.nu - fine.nu) < 1e-9

    def test_reduced_and_full_coordinates_agree(self):
        params = ProblemParams(5, 1.0)
        reduced = _corrected(params, 2)
        full = _corrected(params, 2, full=True)
        assert np.max(np.abs(galerkin_residual(full.loop, params))) < 1e-10
        assert _loop_distance(reduced.loop, full.loop) < 1e-9
        assert abs(reduced.nu - full.nu) < 1e-9

    def test_potential_constant_along_loop(self):
        params = ProblemParams(5, 1.0)
        state = _corrected(params, 2, amplitude=1e-2, p=8)
        assert loop_potential_drift(state.loop, params) < 1e-9

    def test_n2_half_period_relations(self):
        params = ProblemParams(2, 1.0)
        loop = _corrected(params, 1, amplitude=1e-2).loop
        t = np.linspace(0.0, 2.0 * math.pi, 17)
        x, shifted = loop.evaluate(t), loop.evaluate(t + math.pi)
        # central element: u0(t + pi) = -u0(t); peripheral pair: u2(t) = -u1(t + pi)
        assert np.max(np.abs(shifted[:, 0] + x[:, 0])) < 1e-10
        assert np.max(np.abs(x[:, 2] + shifted[:, 1])) < 1e-10


class TestContinuation:
    def test_settings_validation(self):
        with pytest.raises(ValueError, match="step"):
            ContinuationSettings(step=0.0)

    def test_start_needs_amplitude(self):
        params = ProblemParams(4, 1.0)
        start = BranchState(_constant(params), 0.0, 0.0, 0.0)
        with pytest.raises(ValueError, match="first harmonic"):
            continue_branch(start, 3, params)

    def test_branch_records(self):
        params = ProblemParams(5, 1.0)
        point = vortex_bif_points(2, params)[0]
        guess = predictor(2, point, 1e-3, params, truncation=6)
        start = newton_correct(guess, params, Constraints(amplitude=1e-3), k=2)
        branch = continue_branch(start, 4, params, ContinuationSettings(step=1e-3), k=2, nu_onset=point.nu0)
        assert isinstance(branch, Branch)
        assert branch.termination is Termination.MAX_STEPS
        assert len(branch.states) == 5
        records = branch.records()
        assert [r["step"] for r in records] == [0, 1, 2, 3, 4]
        assert all(r["symmetry_residual"] < 1e-8 for r in records)
        arclength = [r["arclength"] for r in records]
        assert arclength == sorted(arclength)
        assert branch.direction in (-1, 0, 1)

    def test_potential_drift_of_constant_loop(self):
        params = ProblemParams(4, 1.0)
        assert loop_potential_drift(_constant(params), params) == 0.0


class TestBranchVerification:
    """Branches born at the generic blocks of the vortex ring."""

    @pytest.mark.parametrize("n, mu, nu_k", [(4, 0.0, math.sqrt(2.0)), (5, 1.0, 3.0)])
    def test_generic_branch(self, n, mu, nu_k):
        report = run_branch("vortex", n, mu, 0.0, k=2, amplitude=1e-3, steps=6, truncation=8)
        assert report["termination"] != "newton_failure"
        assert report["point"]["nu"] == pytest.approx(nu_k)
        assert abs(report["nu_start"] - nu_k) < 1e-4
        assert report["max_galerkin_residual"] < 1e-10
        assert report["max_symmetry_residual"] < 1e-8

    def test_central_element_stays_at_origin(self):
        report = run_branch("vortex", 4, 0.0, 0.0, k=2, amplitude=1e-3, steps=3, truncation=8)
        assert report["central_fixed_by_symmetry"] is True
        assert report["max_central_displacement"] < 1e-12

    def test_central_element_moves_when_coprime(self):
        report = run_branch("vortex", 5, 1.0, 0.0, k=1, amplitude=1e-3, steps=2, truncation=8)
        assert report["central_fixed_by_symmetry"] is False
        assert report["max_symmetry_residual"] < 1e-8

    def test_amplitude_grows_along_branch(self):
        report = run_branch("vortex", 4, 0.0, 0.0, k=2, amplitude=1e-3, steps=20, truncation=8)
        assert report["termination"] == "max_steps"
        amplitudes = [s["amplitude"] for s in report["states"]]
        assert len(amplitudes) == 21
        assert all(b > a for a, b in zip(amplitudes, amplitudes[1:]))

    def test_filament_branch_from_nu_plus(self):
        report = run_branch("filament", 5, 1.0, 3.0, k=1, point="nu_plus", amplitude=1e-3, steps=4, truncation=8)
        assert report["termination"] == "max_steps"
        assert report["point"]["label"] == "nu_plus"
        assert abs(report["nu_start"] - report["point"]["nu"]) < 1e-4
        assert report["max_galerkin_residual"] < 1e-10
        assert report["max_symmetry_residual"] < 1e-8
        assert "potential_drift" not in report

    def test_select_point(self):
        points = vortex_bif_points(1, ProblemParams(5, -1.0))
        assert select_point(points, None, 1).label == "nu0"
        assert select_point(points, "nu_plus", 1).nu0 == pytest.approx(math.sqrt(5.0))
        with pytest.raises(ValueError, match="no point labelled"):
            select_point(points, "nu_bar_plus", 1)
        with pytest.raises(ValueError, match="no bifurcation points"):
            select_point([], None, 1)
