"""Evolution group, Toeplitz semigroup, and the kernel witness family."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from timearrow import (
    OffLatticeTimeError,
    OffLatticeWarning,
    Space,
    hardy_embed,
    hardy_part,
    inner,
    kernel_witness,
    lattice_index,
    make_grid,
    make_state,
    norm,
    toeplitz_adjoint,
    toeplitz_shift_oracle,
    toeplitz_step,
    unitary_evolve,
)


def _rand_state(grid, space, rng):
    n = grid.dim(space)
    return make_state(grid, space, rng.normal(size=n) + 1j * rng.normal(size=n))


class TestUnitaryGroup:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(-40.0, 40.0), st.floats(-40.0, 40.0))
    def test_group_law_and_isometry(self, t, s):
        g = make_grid(16, 5.0)
        r = np.random.default_rng(99)
        f = _rand_state(g, Space.FULL_LINE, r)
        once = unitary_evolve(unitary_evolve(f, t), s)
        both = unitary_evolve(f, t + s)
        assert norm(once - both) <= 1e-10 * norm(f)
        assert norm(once) == pytest.approx(norm(f), rel=1e-12)

    def test_identity_at_zero(self, small_grid, rng):
        f = _rand_state(small_grid, Space.FULL_LINE, rng)
        assert norm(unitary_evolve(f, 0.0) - f) == 0.0
        p = _rand_state(small_grid, Space.HALF_LINE_POS, rng)
        assert norm(unitary_evolve(p, 0.0) - p) == 0.0

    def test_inverse(self, small_grid, rng):
        f = _rand_state(small_grid, Space.FULL_LINE, rng)
        assert norm(unitary_evolve(unitary_evolve(f, 3.7), -3.7) - f) <= 1e-12 * norm(f)

    def test_hardy_input_is_embedded(self, small_grid, rng):
        h = hardy_part(_rand_state(small_grid, Space.FULL_LINE, rng))
        out = unitary_evolve(h, 0.0)
        assert out.space is Space.FULL_LINE
        assert norm(out - hardy_embed(h)) == 0.0


class TestLatticeIndex:
    def test_exact_multiples(self, small_grid):
        for k in (0, 1, 5, 31):
            assert lattice_index(small_grid, k * small_grid.delta_tau) == k

    def test_off_lattice_rejected(self, small_grid):
        with pytest.raises(OffLatticeTimeError):
            lattice_index(small_grid, 0.5 * small_grid.delta_tau)

    def test_snapping_warns(self, small_grid):
        with pytest.warns(OffLatticeWarning):
            k = lattice_index(small_grid, 3.49 * small_grid.delta_tau, snap=True)
        assert k == 3

    def test_negative_times_are_lattice_points_too(self, small_grid):
        assert lattice_index(small_grid, -2 * small_grid.delta_tau) == -2


class TestToeplitzSemigroup:
    def test_matches_shift_oracle(self, small_grid, rng):
        # spectral route and literal truncated shift agree on any state
        h = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        for k in (0, 1, 7, 20, 31):
            t = k * small_grid.delta_tau
            gap = norm(toeplitz_step(h, t) - toeplitz_shift_oracle(h, t))
            assert gap <= 1e-12 * norm(h)

    def test_identity_at_zero(self, small_grid, rng):
        h = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        assert norm(toeplitz_step(h, 0.0) - h) <= 1e-13 * norm(h)
        assert norm(toeplitz_adjoint(h, 0.0) - h) <= 1e-13 * norm(h)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 20), st.integers(0, 20))
    def test_semigroup_law_and_contractivity(self, k1, k2):
        g = make_grid(32, 10.0)
        r = np.random.default_rng(7)
        h = _rand_state(g, Space.HARDY_PLUS, r)
        dt = g.delta_tau
        two = toeplitz_step(toeplitz_step(h, k1 * dt), k2 * dt)
        one = toeplitz_step(h, (k1 + k2) * dt)
        assert norm(two - one) <= 1e-11 * norm(h)
        assert norm(one) <= norm(h) * (1 + 1e-13)
        assert norm(one) <= norm(toeplitz_step(h, k1 * dt)) * (1 + 1e-13)

    def test_annihilates_past_half_window(self, small_grid, rng):
        h = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        dead = toeplitz_step(h, small_grid.t_window / 2)
        assert norm(dead) == 0.0

    def test_adjoint_pairing(self, small_grid, rng):
        f = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        g = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        t = 5 * small_grid.delta_tau
        assert inner(toeplitz_step(f, t), g) == pytest.approx(
            inner(f, toeplitz_adjoint(g, t)), abs=1e-12
        )

    def test_step_after_adjoint_is_identity(self, small_grid, rng):
        # the co-isometry leg: the left shift undoes the zero-padded right
        # shift exactly, as long as the shift never pushes power over the
        # far window edge (guard-banded support)
        nh = small_grid.n_half()
        b = np.zeros(nh, dtype=np.complex128)
        b[: nh // 2] = rng.normal(size=nh // 2) + 1j * rng.normal(size=nh // 2)
        h = make_state(small_grid, Space.HARDY_PLUS, b)
        for k in (1, 6, nh // 2 - 1):
            t = k * small_grid.delta_tau
            back = toeplitz_step(toeplitz_adjoint(h, t), t)
            assert norm(back - h) <= 1e-12 * norm(h)
        # with power at the far edge the identity fails by exactly the mass
        # the right shift pushes over it
        full = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        t = small_grid.delta_tau
        got = toeplitz_step(toeplitz_adjoint(full, t), t)
        lost = full.fibered()[-1]
        assert norm(got - full) == pytest.approx(
            np.sqrt((np.abs(lost) ** 2).sum() * small_grid.delta_sigma),
            rel=1e-9,
        )

    def test_adjoint_isometric_on_guarded_interior(self, small_grid, rng):
        # support well inside the window: the right shift loses nothing
        b = np.zeros(small_grid.n_half(), dtype=np.complex128)
        b[:8] = rng.normal(size=8) + 1j * rng.normal(size=8)
        h = make_state(small_grid, Space.HARDY_PLUS, b)
        t = 4 * small_grid.delta_tau
        assert norm(toeplitz_adjoint(h, t)) == pytest.approx(norm(h), rel=1e-12)

    def test_off_lattice_policy(self, small_grid, rng):
        h = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        t_bad = 0.5 * small_grid.delta_tau
        with pytest.raises(OffLatticeTimeError):
            toeplitz_step(h, t_bad)
        with pytest.warns(OffLatticeWarning):
            snapped = toeplitz_step(h, t_bad, snap=True)
        assert norm(snapped - h) <= 1e-13 * norm(h)  # rounds down to k = 0

    def test_negative_time_rejected(self, small_grid, rng):
        h = _rand_state(small_grid, Space.HARDY_PLUS, rng)
        with pytest.raises(ValueError):
            toeplitz_step(h, -small_grid.delta_tau)

    def test_space_tag_enforced(self, small_grid, rng):
        f = _rand_state(small_grid, Space.FULL_LINE, rng)
        with pytest.raises(Exception):
            toeplitz_step(f, 0.0)


class TestKernelWitness:
    def test_norm_matches_time_integral(self, big_grid):
        # profile is a unit-modulus exponential on [0, t0): squared norm
        # equals int_0^1 exp(-2 tau) dtau up to truncation
        with pytest.warns(OffLatticeWarning):
            w = kernel_witness(big_grid, -1j, 1.0)
        n2 = norm(w) ** 2
        assert n2 == pytest.approx((1 - np.exp(-2)) / 2, rel=0.02)
        assert n2 == pytest.approx(0.429301, abs=1e-5)

    def test_half_time_ratio(self, big_grid):
        with pytest.warns(OffLatticeWarning):
            w = kernel_witness(big_grid, -1j, 1.0)
        with pytest.warns(OffLatticeWarning):
            r = norm(toeplitz_step(w, 0.5, snap=True)) / norm(w)
        expected = np.sqrt((np.exp(-1) - np.exp(-2)) / (1 - np.exp(-2)))
        assert r == pytest.approx(expected, abs=0.01)
        assert r == pytest.approx(0.518820, abs=1e-4)

    def test_dies_at_its_deadline(self, big_grid):
        with pytest.warns(OffLatticeWarning):
            w = kernel_witness(big_grid, -1j, 1.0)
        with pytest.warns(OffLatticeWarning):
            r1 = norm(toeplitz_step(w, 1.0, snap=True)) / norm(w)
        with pytest.warns(OffLatticeWarning):
            r2 = norm(toeplitz_step(w, 2.0, snap=True)) / norm(w)
        assert r1 <= 5e-2
        assert r1 == pytest.approx(6.327e-3, abs=2e-4)
        assert r2 <= r1  # kernels nest as t grows

    def test_lattice_t0_does_not_warn(self, small_grid):
        t0 = 8 * small_grid.delta_tau
        import warnings as _w

        with _w.catch_warnings():
            _w.simplefilter("error")
            kernel_witness(small_grid, -1j, t0)

    def test_preconditions(self, small_grid):
        dt = small_grid.delta_tau
        with pytest.raises(ValueError):
            kernel_witness(small_grid, +1j, 8 * dt)
        with pytest.raises(ValueError):
            kernel_witness(small_grid, 1.0 + 0j, 8 * dt)
        with pytest.raises(ValueError):
            kernel_witness(small_grid, -1j, 0.0)
        with pytest.raises(ValueError):
            kernel_witness(small_grid, -1j, -1.0)
        with pytest.raises(OffLatticeTimeError):
            kernel_witness(small_grid, -1j, 8.5 * dt, snap=False)

    def test_space_and_fiber(self, small_grid):
        w = kernel_witness(small_grid, -1j, 8 * small_grid.delta_tau)
        assert w.space is Space.HARDY_PLUS
        assert norm(w) > 0
