"""Three-term recurrence machinery against closed forms and dense oracles."""

import numpy as np
import pytest

from discrete_darboux import (
    JacobiOperator,
    Seq,
    apply_jacobi,
    hermite_seed,
    l2_inner,
    laplacian_model,
    oscillator_model,
    recurrence_residual,
    restrict_parity,
    second_solution,
    solve_recurrence,
    split_even_odd,
    wronskians,
)

from _oracles import dense_jacobi


def chebyshev_solution(op, theta, N):
    return solve_recurrence(op, 2.0 * np.cos(theta), psi0=1.0)


class TestJacobiOperator:
    def test_rejects_nonzero_a0(self):
        with pytest.raises(ValueError, match="a\\[0\\]"):
            JacobiOperator([0.1, 1.0], [0.0, 0.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            JacobiOperator([0.0, 1.0, 1.0], [0.0, 0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="non-finite"):
            JacobiOperator([0.0, np.inf], [0.0, 0.0])


class TestApplyJacobi:
    def test_zero_operator(self):
        op = JacobiOperator(np.zeros(6), np.zeros(6))
        s = Seq(np.arange(6, dtype=complex) + 1, 0.0)
        assert np.all(apply_jacobi(op, s).values == 0)

    def test_laplacian_unit_vector(self):
        op = laplacian_model(6)
        e0 = np.zeros(6, dtype=complex)
        e0[0] = 1.0
        out = apply_jacobi(op, Seq(e0, 0.0))
        expected = np.zeros(6, dtype=complex)
        expected[1] = 1.0
        assert np.allclose(out.values, expected, atol=0)

    def test_oscillator_even_chain_seed_is_eigen(self):
        even, _ = split_even_odd(oscillator_model(64))
        xi = restrict_parity(hermite_seed(-1.0, 64), "even")
        out = apply_jacobi(even, xi)
        resid = np.abs(out.values - (-1.0) * xi.values)[: even.n_sites - 1]
        assert np.max(resid) < 1e-10 * np.max(np.abs(xi.values))

    def test_boundary_row_flagged(self):
        op = laplacian_model(8)
        out = apply_jacobi(op, Seq(np.ones(8, dtype=complex), 0.0))
        assert out.boundary_rows == (7,)

    @pytest.mark.parametrize("n", [4, 7, 12])
    def test_matches_dense_matvec(self, n):
        rng = np.random.default_rng(n)
        a = rng.normal(size=n)
        a[0] = 0.0
        op = JacobiOperator(a, rng.normal(size=n))
        s = rng.normal(size=n) + 1j * rng.normal(size=n)
        out = apply_jacobi(op, Seq(s, 0.0))
        assert np.max(np.abs(out.values - dense_jacobi(op) @ s)) < 1e-14


class TestSolveRecurrence:
    def test_chebyshev_closed_form(self):
        op = laplacian_model(64)
        theta = 1.0
        s = chebyshev_solution(op, theta, 64)
        n = np.arange(64)
        expected = np.sin((n + 1) * theta) / np.sin(theta)
        assert np.max(np.abs(s.values - expected)) < 1e-12
        assert np.max(recurrence_residual(op, s)) < 1e-12

    def test_below_spectrum_hand_values(self):
        op = laplacian_model(8)
        s = solve_recurrence(op, -2.5, psi0=1.0)
        assert np.allclose(s.values[:4], [1.0, -2.5, 5.25, -10.625], atol=0)
        # a row of the recurrence checked by hand
        assert s.values[1] + s.values[3] == pytest.approx(-2.5 * s.values[2])

    def test_zero_start_gives_zero(self):
        op = laplacian_model(16)
        s = solve_recurrence(op, 0.7, psi0=0.0)
        assert np.all(s.values == 0)

    def test_general_mode_misses_row_zero(self):
        op = laplacian_model(32)
        s = solve_recurrence(op, 0.5, psi0=1.0, mode="general", psi1=0.0)
        res = recurrence_residual(op, s)
        assert res[0] > 1e-3          # second branch breaks the boundary row
        assert np.max(res[1:]) < 1e-12

    def test_general_mode_requires_psi1(self):
        with pytest.raises(ValueError, match="psi1"):
            solve_recurrence(laplacian_model(8), 0.5, mode="general")

    def test_interior_zero_hopping_breaks(self):
        a = np.array([0.0, 1.0, 0.0, 1.0])
        with pytest.raises(ValueError, match="breakdown"):
            solve_recurrence(JacobiOperator(a, np.zeros(4)), 1.0)

    @pytest.mark.parametrize("energy", [2 * np.cos(0.3), -2.5, 0.0])
    def test_eigen_property_on_interior_rows(self, energy):
        op = laplacian_model(48)
        s = solve_recurrence(op, energy)
        out = apply_jacobi(op, s)
        resid = np.abs(out.values - energy * s.values)[:-1]
        assert np.max(resid) <= 1e-10 * np.max(np.abs(s.values))

    def test_overflow_switches_to_scaled(self):
        op = laplacian_model(400)
        s = solve_recurrence(op, -3.0, psi0=1.0)
        assert s.is_scaled
        assert np.max(np.abs(s.values)) <= 1e150
        assert np.max(recurrence_residual(op, s)) < 1e-12
        # ratios keep satisfying the recurrence across rescale points
        r = s.ratios()
        assert np.all(np.isfinite(r))

    def test_scaled_materialize_overflows(self):
        op = laplacian_model(800)
        s = solve_recurrence(op, -3.0)
        with pytest.raises(OverflowError):
            s.materialize()


class TestSecondSolution:
    def test_degenerate_returns_multiple_of_psi(self):
        op = laplacian_model(16)
        psi = solve_recurrence(op, 0.9)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            hat = second_solution(op, psi, w0=0.0, psi_hat0=psi.values[0])
        assert np.allclose(hat.values, psi.values, rtol=0, atol=1e-15)

    def test_wronskian_constancy_chebyshev(self):
        op = laplacian_model(64)
        psi = chebyshev_solution(op, 1.0, 64)
        hat = second_solution(op, psi, w0=1.0, psi_hat0=0.0)
        rep = wronskians(op, hat, psi)
        assert np.max(np.abs(rep.w - 1.0)) < 1e-10

    def test_satisfies_recurrence_away_from_row_zero(self):
        op = laplacian_model(64)
        psi = chebyshev_solution(op, 1.0, 64)
        hat = second_solution(op, psi, w0=1.0, psi_hat0=0.3 + 0.1j)
        res = recurrence_residual(op, hat)
        assert np.max(res[1:]) < 1e-10

    def test_oscillator_seed_partner(self):
        even, _ = split_even_odd(oscillator_model(80))
        xi = restrict_parity(hermite_seed(-1.0, 80), "even")
        hat = second_solution(even, xi, w0=1.0, psi_hat0=0.0)
        rep = wronskians(even, hat, xi)
        # growing seed: constancy holds relative to the entering magnitudes,
        # and exactly (W = 1) where those stay moderate
        assert rep.constancy_defect < 1e-12
        assert np.allclose(rep.w[:8], 1.0, atol=1e-6)
        # the partner grows relative to the seed
        assert np.abs(hat.values[-1] / xi.values[-1]) > np.abs(
            hat.values[5] / xi.values[5]
        )

    def test_rejects_zero_entries(self):
        op = laplacian_model(8)
        vals = np.ones(8, dtype=complex)
        vals[3] = 0.0
        with pytest.raises(ValueError, match="nodeless"):
            second_solution(op, Seq(vals, 0.0), w0=1.0, psi_hat0=1.0)


class TestWronskians:
    def test_antisymmetry_zero_for_equal_args(self):
        op = laplacian_model(32)
        f = chebyshev_solution(op, 0.7, 32)
        rep = wronskians(op, f, f)
        assert np.all(rep.w == 0)
        assert rep.constancy_defect == 0.0

    def test_same_energy_constancy_n500(self):
        op = laplacian_model(500)
        f = chebyshev_solution(op, 1.0, 500)
        g = solve_recurrence(op, f.energy, psi0=1.0, mode="general", psi1=2.0)
        rep = wronskians(op, f, g)
        assert rep.same_energy
        assert rep.constancy_defect < 1e-9

    def test_cross_energy_recursion_against_direct_sum(self):
        op = laplacian_model(64)
        f = solve_recurrence(op, -2.5)           # energy lam
        g = chebyshev_solution(op, 1.0, 64)      # energy E
        rep = wronskians(op, f, g)
        assert not rep.same_energy
        assert rep.recursion_defect < 1e-10
        # independent brute-force accumulation of the same law
        w1 = op.a[1] * (f.values[1] * g.values[0] - f.values[0] * g.values[1])
        acc = w1
        for n in range(1, 40):
            acc = acc + (f.energy - g.energy) * f.values[n] * g.values[n]
            wn1 = op.a[n + 1] * (
                f.values[n + 1] * g.values[n] - f.values[n] * g.values[n + 1]
            )
            assert abs(wn1 - acc) <= 1e-10 * max(abs(wn1), abs(acc), 1.0)


class TestInnerProduct:
    def test_unit_vector(self):
        f = Seq(np.array([1.0, 0.0], dtype=complex), 0.0)
        assert l2_inner(f, f) == 1.0

    def test_conjugation(self):
        f = Seq(np.array([1j, 1.0]), 0.0)
        assert l2_inner(f, f) == pytest.approx(2.0)

    def test_arithmetic(self):
        f = Seq(np.array([1.0, 2.0, 3.0], dtype=complex), 0.0)
        g = Seq(np.array([3.0, 2.0, 1.0], dtype=complex), 0.0)
        assert l2_inner(f, g) == pytest.approx(10.0)

    def test_length_mismatch(self):
        f = Seq(np.ones(3, dtype=complex), 0.0)
        g = Seq(np.ones(4, dtype=complex), 0.0)
        with pytest.raises(ValueError, match="mismatch"):
            l2_inner(f, g)


class TestSeq:
    def test_seed_kind_rejects_zeros(self):
        with pytest.raises(ValueError, match="nodeless"):
            Seq(np.array([1.0, 0.0, 2.0], dtype=complex), -1.0, "seed")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            Seq(np.ones(3, dtype=complex), 0.0, "other")

    def test_ratios_cross_scale_boundaries(self):
        vals = np.array([1.0, 0.5], dtype=complex)
        logs = np.array([0.0, 10.0])
        s = Seq(vals, 0.0, log_scale=logs)
        assert s.ratios()[0] == pytest.approx(0.5 * np.e**10)
