"""sklearn-style estimator facade."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from discrete_darboux import (
    DarbouxTransform,
    Seq,
    apply_transform,
    laplacian_model,
    solve_recurrence,
)


class TestEstimatorApi:
    def test_get_set_params_and_clone(self):
        est = DarbouxTransform(factorization_energy=-2.5, const_a=-2.0)
        params = est.get_params()
        assert params["factorization_energy"] == -2.5
        twin = clone(est)
        assert twin.get_params() == params
        est.set_params(seed_psi0=0.5)
        assert est.get_params()["seed_psi0"] == 0.5

    def test_not_fitted_error(self):
        est = DarbouxTransform()
        with pytest.raises(NotFittedError):
            est.transform(np.ones(8))

    def test_fit_returns_self_and_exposes_attributes(self):
        op = laplacian_model(32)
        est = DarbouxTransform(factorization_energy=-2.5)
        assert est.fit(op) is est
        assert est.transformed_.n_sites == 32
        assert est.seed_.energy == -2.5
        assert est.intertwiner_.q_crosscheck < 1e-10

    def test_fit_accepts_coefficient_pair(self):
        a = np.r_[0.0, np.ones(15)]
        q = np.zeros(16)
        est = DarbouxTransform(factorization_energy=-2.5).fit((a, q))
        assert est.n_sites_ == 16

    def test_explicit_seed_overrides_generated(self):
        op = laplacian_model(24)
        seed = solve_recurrence(op, -3.0)
        seed = Seq(seed.values, -3.0, "seed")
        est = DarbouxTransform(factorization_energy=-2.5).fit(op, seed=seed)
        assert est.intertwiner_.lam == -3.0

    def test_transform_matches_direct_application(self):
        op = laplacian_model(32)
        est = DarbouxTransform(factorization_energy=-2.5).fit(op)
        rng = np.random.default_rng(1)
        batch = rng.normal(size=(5, 32)) + 1j * rng.normal(size=(5, 32))
        out = est.transform(batch)
        assert out.shape == (5, 32)
        for row_in, row_out in zip(batch, out):
            direct = apply_transform(est.intertwiner_, Seq(row_in, 0.0)).values
            assert np.array_equal(row_out, direct)

    def test_single_sequence_shape_preserved(self):
        op = laplacian_model(16)
        est = DarbouxTransform(factorization_energy=-2.5).fit(op)
        out = est.transform(np.ones(16, dtype=complex))
        assert out.shape == (16,)

    def test_fit_transform_gives_clear_error(self):
        op = laplacian_model(16)
        est = DarbouxTransform(factorization_energy=-2.5)
        with pytest.raises(TypeError, match="no single input"):
            est.fit_transform(op)

    def test_adjoint_consistency(self):
        op = laplacian_model(24)
        est = DarbouxTransform(factorization_energy=-2.5).fit(op)
        rng = np.random.default_rng(2)
        f = np.zeros(24, dtype=complex)
        g = np.zeros(24, dtype=complex)
        f[2:20] = rng.normal(size=18)
        g[2:20] = rng.normal(size=18)
        lhs = np.vdot(est.transform(f), g)
        rhs = np.vdot(f, est.adjoint_transform(g))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_verify_and_missing_states_helpers(self):
        op = laplacian_model(32)
        est = DarbouxTransform(factorization_energy=-2.5).fit(op)
        rep = est.verify(n_probes=4, rng_seed=3)
        assert max(rep.r_int, rep.r_fac0, rep.r_fac1) < 1e-10
        pair = est.missing_states()
        assert pair.residual_eta < 1e-10

    def test_wrong_length_rejected(self):
        op = laplacian_model(16)
        est = DarbouxTransform(factorization_energy=-2.5).fit(op)
        with pytest.raises(ValueError, match="length"):
            est.transform(np.ones(17, dtype=complex))
