"""
Scikit-learn style front end for the Darboux transform.

Fitting learns the intertwiner and the partner operator from a Jacobi
operator (and optionally an explicit seed); transforming maps batches of
sequences on the fitted lattice through the intertwiner.  The estimator
composes with sklearn tooling (get_params / set_params / clone).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .darboux import apply_transform, build_transform, missing_states, verify_transform
from .operators import JacobiOperator, Seq, solve_recurrence
from .validation import as_float_array


def _as_operator(X) -> JacobiOperator:
    if isinstance(X, JacobiOperator):
        return X
    if isinstance(X, dict):
        return JacobiOperator(X["a"], X["q"], label=X.get("label", ""))
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[0] == 2:
        return JacobiOperator(arr[0], arr[1])
    if isinstance(X, (tuple, list)) and len(X) == 2:
        return JacobiOperator(as_float_array(X[0], "a"), as_float_array(X[1], "q"))
    raise ValueError(
        "X must be a JacobiOperator, an (a, q) pair, or a 2 x N array of coefficients"
    )


class DarbouxTransform(BaseEstimator, TransformerMixin):
    """Darboux transform of a Jacobi operator as a fit/transform estimator.

    Parameters
    ----------
    factorization_energy : float
        Energy lam at which the operator is factorized; also the energy of
        the auto-generated seed when none is supplied to fit.
    const_a : float
        Negative constant of the factorization, |const_a| scales
        L+ L = |A| (h0 - lam).
    seed_psi0 : complex
        Left-boundary value of the auto-generated seed.
    seed_tol, crosscheck_tol, realness_tol : float
        Tolerances forwarded to the transform construction.

    Attributes (after fit)
    ----------------------
    operator_ : JacobiOperator          the fitted h0
    seed_ : Seq                         the factorization seed actually used
    intertwiner_ : DarbouxOperator      the first-order map L
    transformed_ : JacobiOperator       the partner operator h1
    """

    def __init__(
        self,
        factorization_energy: float = -1.0,
        const_a: float = -1.0,
        seed_psi0: complex = 1.0,
        seed_tol: float = 1e-10,
        crosscheck_tol: float = 1e-8,
        realness_tol: float = 1e-10,
    ):
        self.factorization_energy = factorization_energy
        self.const_a = const_a
        self.seed_psi0 = seed_psi0
        self.seed_tol = seed_tol
        self.crosscheck_tol = crosscheck_tol
        self.realness_tol = realness_tol

    def fit(self, X, y=None, seed: Seq | None = None):
        """Build the intertwiner for the operator X.

        X is a JacobiOperator (or coefficient pair); `seed` overrides the
        auto-generated nodeless solution at factorization_energy.
        """
        op = _as_operator(X)
        if seed is None:
            seed = solve_recurrence(op, self.factorization_energy, psi0=self.seed_psi0)
            seed = Seq(seed.plain_values(), seed.energy, "seed") if not seed.is_scaled else seed
        self.operator_ = op
        self.intertwiner_, self.transformed_ = build_transform(
            op,
            seed,
            const_a=self.const_a,
            seed_tol=self.seed_tol,
            crosscheck_tol=self.crosscheck_tol,
            realness_tol=self.realness_tol,
        )
        self.seed_ = self.intertwiner_.seed
        self.n_sites_ = op.n_sites
        return self

    def _check_fitted(self):
        if not hasattr(self, "intertwiner_"):
            raise NotFittedError("fit the estimator before transforming")

    def _rows(self, X) -> np.ndarray:
        if isinstance(X, Seq):
            return X.plain_values()[None, :]
        arr = np.asarray(X, dtype=np.complex128)
        if arr.ndim == 1:
            return arr[None, :]
        if arr.ndim == 2:
            return arr
        raise ValueError("X must be a sequence or a batch of sequences")

    def fit_transform(self, X, y=None, **fit_params):
        """Not meaningful here: fit consumes the operator while transform
        consumes sequences on its lattice.  Call fit, then transform."""
        raise TypeError(
            "DarbouxTransform.fit(X) takes the operator and transform(X) takes "
            "sequences; fit_transform has no single input serving both"
        )

    def transform(self, X) -> np.ndarray:
        """Apply the intertwiner row-wise; solutions of h0 at E map to
        solutions of h1 at the same E.  Shape is preserved."""
        self._check_fitted()
        rows = self._rows(X)
        if rows.shape[1] != self.n_sites_:
            raise ValueError(f"sequences must have length {self.n_sites_}")
        out = np.vstack(
            [
                apply_transform(self.intertwiner_, Seq(r, 0.0)).values
                for r in rows
            ]
        )
        return out[0] if (isinstance(X, Seq) or np.asarray(X).ndim == 1) else out

    def adjoint_transform(self, X) -> np.ndarray:
        """Apply the adjoint, mapping h1-solutions back to h0-solutions."""
        self._check_fitted()
        rows = self._rows(X)
        if rows.shape[1] != self.n_sites_:
            raise ValueError(f"sequences must have length {self.n_sites_}")
        out = np.vstack(
            [
                apply_transform(self.intertwiner_, Seq(r, 0.0), "adjoint").values
                for r in rows
            ]
        )
        return out[0] if (isinstance(X, Seq) or np.asarray(X).ndim == 1) else out

    def missing_states(self, eta_hat0_over_eta0: complex = 1.0, w0: float = 1.0):
        """The two lam-level solutions of the transformed recurrence."""
        self._check_fitted()
        return missing_states(
            self.operator_,
            self.intertwiner_,
            eta_hat0_over_eta0=eta_hat0_over_eta0,
            w0=w0,
            transformed=self.transformed_,
        )

    def verify(self, n_probes: int = 16, rng_seed: int = 0):
        """Residual report of the defining identities on random probes."""
        self._check_fitted()
        rng = np.random.default_rng(rng_seed)
        probes = rng.normal(size=(n_probes, self.n_sites_)) + 1j * rng.normal(
            size=(n_probes, self.n_sites_)
        )
        return verify_transform(
            self.operator_, self.transformed_, self.intertwiner_, probes
        )
