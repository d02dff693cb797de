"""
Block supercharges for a Darboux-paired set of Jacobi operators.

With the intertwiner L between h0 and h1, the nilpotent block operators

    Q = [[0, 0], [L, 0]],     Q+ = [[0, L+], [0, 0]]

act on 2-component column vectors (upper, lower) and, together with the
superhamiltonian H = diag(h0, h1), close the superalgebra

    [Q, H] = [Q+, H] = 0,   Q^2 = (Q+)^2 = 0,   {Q, Q+} = |A| (H - lam I)

(|A| = 1 for the standard const_a = -1 convention).  Nilpotency is exact by
block structure; the commutation relations inherit the intertwining
residuals and the anticommutator inherits the factorization residuals, so
all checks are reported over interior rows of each block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .darboux import (
    DarbouxOperator,
    _apply_h_matrix,
    _apply_L_matrix,
    _apply_Ld_matrix,
)
from .operators import JacobiOperator, Seq


@dataclass(frozen=True)
class SuperVec:
    """2-component column vector of equal-length sequences."""

    upper: Seq
    lower: Seq

    def __post_init__(self):
        if len(self.upper) != len(self.lower):
            raise ValueError("upper and lower components must have equal length")

    def __len__(self) -> int:
        return len(self.upper)


@dataclass(frozen=True)
class SuperSystem:
    """The pair (h0, h1) with the intertwiner that relates them."""

    h0: JacobiOperator
    h1: JacobiOperator
    L: DarbouxOperator
    lam: float

    def __post_init__(self):
        n = self.h0.n_sites
        if self.h1.n_sites != n or self.L.n_sites != n:
            raise ValueError("h0, h1 and L must share the lattice size")
        if self.lam != self.L.lam:
            raise ValueError(
                f"system lambda {self.lam} differs from the intertwiner's {self.L.lam}"
            )


@dataclass(frozen=True)
class SuperReport:
    """Max interior-row residuals of the superalgebra over a probe set."""

    r_nilp: float
    r_comm: float
    r_anti: float
    n_probes: int
    boundary_rows_excluded: tuple[int, ...]


def apply_supercharge(S: SuperSystem, v: SuperVec, which: str = "Q") -> SuperVec:
    """Q: (u, l) -> (0, L u);  Q+: (u, l) -> (L+ l, 0)."""
    u = v.upper.plain_values()
    low = v.lower.plain_values()
    zero = np.zeros(len(v), dtype=np.complex128)
    if which == "Q":
        out_low = _apply_L_matrix(S.L, u[None, :])[0]
        return SuperVec(
            Seq(zero, v.upper.energy), Seq(out_low, v.upper.energy)
        )
    if which == "Q_dag":
        out_up = _apply_Ld_matrix(S.L, low[None, :])[0]
        return SuperVec(
            Seq(out_up, v.lower.energy), Seq(zero, v.lower.energy)
        )
    raise ValueError(f"which must be 'Q' or 'Q_dag', got {which!r}")


def _stack(probes, n: int) -> tuple[np.ndarray, np.ndarray]:
    ups, lows = [], []
    for v in probes:
        if len(v) != n:
            raise ValueError(f"probe length {len(v)} != {n}")
        ups.append(v.upper.plain_values())
        lows.append(v.lower.plain_values())
    return np.asarray(ups), np.asarray(lows)


def superalgebra_check(S: SuperSystem, probes) -> SuperReport:
    """Residuals of Q^2 = (Q+)^2 = 0, {Q, Q+} = |A|(H - lam I) and
    [Q, H] = [Q+, H] = 0 over the probes, normalized per probe magnitude.

    Q^2 and (Q+)^2 vanish by block structure, so r_nilp is exactly zero;
    it is still evaluated rather than assumed.
    """
    n = S.h0.n_sites
    U, W = _stack(probes, n)
    if U.size == 0:
        raise ValueError("need at least one probe")
    scale = np.maximum(
        np.maximum(np.max(np.abs(U), axis=1), np.max(np.abs(W), axis=1)),
        np.finfo(float).tiny,
    )[:, None]
    cut = n - 2
    absA = abs(S.L.const_a)

    # Q^2 (u,l) = (0, L*0) and (Q+)^2 similarly: the composed blocks are zero
    r_nilp = 0.0
    q2_low = _apply_L_matrix(S.L, np.zeros_like(U))
    qd2_up = _apply_Ld_matrix(S.L, np.zeros_like(W))
    r_nilp = float(max(np.max(np.abs(q2_low)), np.max(np.abs(qd2_up))))

    # {Q, Q+} (u, l) = (L+ L u, L L+ l)
    anti_up = _apply_Ld_matrix(S.L, _apply_L_matrix(S.L, U))
    anti_low = _apply_L_matrix(S.L, _apply_Ld_matrix(S.L, W))
    ref_up = absA * (_apply_h_matrix(S.h0, U) - S.lam * U)
    ref_low = absA * (_apply_h_matrix(S.h1, W) - S.lam * W)
    r_anti = float(
        max(
            np.max(np.abs((anti_up - ref_up)[:, :cut]) / scale),
            np.max(np.abs((anti_low - ref_low)[:, :cut]) / scale),
        )
    )

    # [Q, H](u, l) = (0, L h0 u - h1 L u);  [Q+, H](u, l) = (L+ h1 l - h0 L+ l, 0)
    c_low = _apply_L_matrix(S.L, _apply_h_matrix(S.h0, U)) - _apply_h_matrix(
        S.h1, _apply_L_matrix(S.L, U)
    )
    c_up = _apply_Ld_matrix(S.L, _apply_h_matrix(S.h1, W)) - _apply_h_matrix(
        S.h0, _apply_Ld_matrix(S.L, W)
    )
    r_comm = float(
        max(
            np.max(np.abs(c_low[:, :cut]) / scale),
            np.max(np.abs(c_up[:, :cut]) / scale),
        )
    )

    return SuperReport(
        r_nilp=r_nilp,
        r_comm=r_comm,
        r_anti=r_anti,
        n_probes=len(U),
        boundary_rows_excluded=(n - 2, n - 1),
    )
