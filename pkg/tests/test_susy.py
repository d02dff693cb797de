"""Block supercharges and the superalgebra residuals."""

import numpy as np
import pytest

from discrete_darboux import (
    Seq,
    SuperSystem,
    SuperVec,
    apply_supercharge,
    build_transform,
    laplacian_model,
    missing_states,
    solve_recurrence,
    superalgebra_check,
    verify_transform,
)

from _oracles import dense_blocks, interior_block_rows
from conftest import as_seed


def make_system(op, seed, L, h1):
    return SuperSystem(op, h1, L, L.lam)


def block_unit_vectors(n):
    vecs = []
    for k in range(2 * n):
        u = np.zeros(n, dtype=complex)
        w = np.zeros(n, dtype=complex)
        (u if k < n else w)[k % n] = 1.0
        vecs.append(SuperVec(Seq(u, 0.0), Seq(w, 0.0)))
    return vecs


class TestSuperVec:
    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            SuperVec(Seq(np.ones(3, dtype=complex), 0.0), Seq(np.ones(4, dtype=complex), 0.0))


class TestSuperSystem:
    def test_lambda_mismatch_rejected(self, laplacian64):
        op, _seed, L, h1 = laplacian64
        with pytest.raises(ValueError, match="lambda"):
            SuperSystem(op, h1, L, -1.0)


class TestSupercharges:
    def test_nilpotency_is_exact(self, laplacian64):
        system = make_system(*laplacian64)
        rng = np.random.default_rng(0)
        n = system.h0.n_sites
        v = SuperVec(
            Seq(rng.normal(size=n) + 1j * rng.normal(size=n), 0.0),
            Seq(rng.normal(size=n) + 1j * rng.normal(size=n), 0.0),
        )
        for which in ("Q", "Q_dag"):
            once = apply_supercharge(system, v, which)
            twice = apply_supercharge(system, once, which)
            assert np.all(twice.upper.values == 0)
            assert np.all(twice.lower.values == 0)

    def test_q_annihilates_seed_component(self, laplacian64):
        op, seed, L, h1 = laplacian64
        system = make_system(op, seed, L, h1)
        v = SuperVec(seed, Seq(np.zeros(op.n_sites, dtype=complex), seed.energy))
        out = apply_supercharge(system, v, "Q")
        assert np.max(np.abs(out.lower.values)) <= 1e-12 * np.max(np.abs(seed.values))

    def test_bad_which(self, laplacian64):
        system = make_system(*laplacian64)
        v = block_unit_vectors(system.h0.n_sites)[0]
        with pytest.raises(ValueError, match="which"):
            apply_supercharge(system, v, "P")


class TestSuperalgebra:
    def test_unit_probes_laplacian(self):
        op = laplacian_model(32)
        seed = as_seed(solve_recurrence(op, -2.5))
        L, h1 = build_transform(op, seed)
        system = SuperSystem(op, h1, L, L.lam)
        rep = superalgebra_check(system, block_unit_vectors(32))
        assert rep.r_nilp == 0.0
        assert rep.r_comm < 1e-10
        assert rep.r_anti < 1e-10

    def test_dense_block_oracle_small_n(self):
        for N in (8, 12):
            op = laplacian_model(N)
            seed = as_seed(solve_recurrence(op, -2.5))
            L, h1 = build_transform(op, seed)
            Q, Qd, H = dense_blocks(op, h1, L)
            lam = L.lam
            rows = interior_block_rows(N)
            assert np.max(np.abs(Q @ Q)) == 0.0
            assert np.max(np.abs(Qd @ Qd)) == 0.0
            anti = Q @ Qd + Qd @ Q - (H - lam * np.eye(2 * N))
            assert np.max(np.abs(anti[rows])) < 1e-12
            for M in (Q, Qd):
                comm = M @ H - H @ M
                assert np.max(np.abs(comm[rows])) < 1e-12

    def test_missing_state_probe_sits_at_lambda(self, laplacian64):
        op, seed, L, h1 = laplacian64
        system = make_system(op, seed, L, h1)
        pair = missing_states(op, L, transformed=h1)
        eta = pair.eta.materialize()
        v = SuperVec(seed, eta)
        # {Q, Q+} v = ((h0 - lam) xi, (h1 - lam) eta): both members sit at lam
        q_qd = apply_supercharge(system, apply_supercharge(system, v, "Q"), "Q_dag")
        qd_q = apply_supercharge(system, apply_supercharge(system, v, "Q_dag"), "Q")
        total_up = q_qd.upper.values + qd_q.upper.values
        total_low = q_qd.lower.values + qd_q.lower.values
        n = op.n_sites
        scale = max(np.max(np.abs(seed.values)), np.max(np.abs(eta.values)))
        assert np.max(np.abs(total_up[: n - 2])) <= 1e-10 * scale
        assert np.max(np.abs(total_low[1 : n - 2])) <= 1e-10 * scale

    def test_oscillator_chain_random_probes(self, oscillator_even200):
        op, seed, L, h1 = oscillator_even200
        system = SuperSystem(op, h1, L, L.lam)
        rng = np.random.default_rng(7)
        n = op.n_sites
        probes = [
            SuperVec(
                Seq(rng.normal(size=n) + 1j * rng.normal(size=n), 0.0),
                Seq(rng.normal(size=n) + 1j * rng.normal(size=n), 0.0),
            )
            for _ in range(6)
        ]
        rep = superalgebra_check(system, probes)
        assert rep.r_nilp == 0.0
        assert rep.r_comm < 1e-9
        assert rep.r_anti < 1e-9

    def test_residual_bounds_from_factorization(self, laplacian64):
        op, seed, L, h1 = laplacian64
        system = make_system(op, seed, L, h1)
        probes = block_unit_vectors(op.n_sites)
        rep = superalgebra_check(system, probes)
        ver = verify_transform(op, h1, L, np.eye(op.n_sites))
        assert rep.r_anti <= ver.r_fac0 + ver.r_fac1 + 1e-15
        assert rep.r_comm <= 2.0 * ver.r_int + 1e-15
