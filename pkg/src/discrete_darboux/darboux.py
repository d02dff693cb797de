"""
Darboux intertwiner for Jacobi operators on the semi-infinite lattice.

Given an operator h0 with coefficients (a_n, q_n) and a nodeless solution
xi of its recurrence at the factorization energy lam, the first-order
difference operator

    (L s)_n = A_{n+1} s_{n+1} + B_n s_n

intertwines h0 with a partner operator h1: L h0 = h1 L.  The coefficients
solve the system

    A_n a_{n+1} = A_{n+1} at_n,        B_n a_n = B_{n-1} at_n,
    A_{n+1} q_{n+1} + B_n a_{n+1} = B_{n+1} at_{n+1} + A_{n+1} qt_n,
    A_{n+1} a_{n+1} + B_n q_n = at_n A_n + B_n qt_n,

whose solution is, up to square-root branches,

    A_n = [-A a_n xi_{n-1}/xi_n]^{1/2},    B_n = -A_{n+1} xi_{n+1}/xi_n,
    at_n = A_n a_{n+1} / A_{n+1},
    qt_n = q_n + a_n xi_{n-1}/xi_n - a_{n+1} xi_n/xi_{n+1}
         = q_{n+1} - a_{n+1} xi_{n+1}/xi_n + a_{n+2} xi_{n+2}/xi_{n+1}.

A_n is evaluated on the principal branch; B_n and at_n are then slaved to
the exact relations above rather than taken as independent principal
roots.  For sign-alternating seeds (the generic case below the spectrum)
the independent principal roots would violate L xi = 0 and the
factorizations; the slaved values satisfy the system identically, make
L annihilate exactly the span of the seed, and give

    L^+ L = |A| (h0 - lam),     L L^+ = |A| (h1 - lam)

whenever the sign pattern of a_{n+1} xi_n xi_{n+1} is n-independent.  The
per-site deviation of B from the principal-branch formula is recorded.

At E = lam the forward map annihilates the seed; the missing solutions of
the partner recurrence are

    eta_n  = delta * A_{n+1} / (a_{n+1} xi_n),
    etah_n = eta_n * (etah_0/eta_0 + w0 * sum_{k=1..n} xi_k^2),

so |eta_n| = |A|^{1/2} |a_{n+1} xi_n xi_{n+1}|^{-1/2}, with delta the
uniform sign of a_{n+1} xi_n xi_{n+1}.  This branch choice yields the
adjoint pairings (L^+ eta)_n = 0 and (L^+ etah)_n = -w0 |A| xi_n on rows
n >= 1 (-w0 xi_n under the standard A = -1).  Row 0 of eta carries the
Wronskian defect instead, which is what removes the would-be bound state
at lam.

Truncation: the last two rows of every residual are boundary-affected
(at_{N-1}, qt_{N-1}, B_{N-1} involve data beyond the window) and are
excluded from the reported maxima.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import JacobiOperator, Seq, recurrence_residual
from .validation import check_nodeless, check_same_length


def _principal_sqrt(z: complex) -> complex:
    """Principal square root, exact on the real axis (no stray imaginary dust)."""
    z = complex(z)
    if z.imag == 0.0:
        if z.real >= 0.0:
            return complex(np.sqrt(z.real), 0.0)
        return complex(0.0, np.sqrt(-z.real))
    return complex(np.sqrt(z))


_principal_sqrt_vec = np.vectorize(_principal_sqrt, otypes=[np.complex128])


@dataclass(frozen=True)
class DarbouxOperator:
    """Intertwiner coefficients.

    A[0] = 0 and B[N-1] = 0 are truncation sentinels (the stored arrays are
    full length for index sanity); the meaningful ranges are A_n, n = 1..N-1
    and B_n, n = 0..N-2.  `branch[n]` is +1 where B_n equals the
    principal-branch formula -[-A a_{n+1} xi_{n+1}/xi_n]^{1/2} and -1 where
    the slaved value is its negative.
    """

    A: np.ndarray
    B: np.ndarray
    const_a: float
    lam: float
    seed: Seq
    branch: np.ndarray
    q_crosscheck: float

    @property
    def n_sites(self) -> int:
        return len(self.A)


@dataclass(frozen=True)
class MissingStatePair:
    """The two solutions of the transformed recurrence at E = lam."""

    eta: Seq
    eta_hat: Seq
    lam: float
    w0: float
    eta_hat0_over_eta0: complex
    valid_upto: int
    residual_eta: float | None = None
    residual_eta_hat: float | None = None


@dataclass(frozen=True)
class VerifyReport:
    """Max interior-row residuals of the defining identities over a probe set,
    each normalized by the probe magnitude."""

    r_int: float
    r_fac0: float
    r_fac1: float
    n_probes: int
    boundary_rows_excluded: tuple[int, ...]


def build_transform(
    op: JacobiOperator,
    seed: Seq,
    const_a: float = -1.0,
    seed_tol: float = 1e-10,
    crosscheck_tol: float = 1e-8,
    realness_tol: float = 1e-10,
) -> tuple[DarbouxOperator, JacobiOperator]:
    """Construct the intertwiner L and the partner operator h1 from a seed.

    The seed must be nodeless and solve op's recurrence at its tagged energy
    on rows 0..N-2 within seed_tol (per-row relative).  The two closed forms
    for qt_n are cross-checked; their max discrepancy is stored on the
    returned DarbouxOperator and must stay below crosscheck_tol.  h1's
    coefficients must be real within realness_tol (imaginary parts are then
    dropped); complex leakage signals a seed without the required phase
    structure.

    at_0 = 0 is set explicitly (a_0 = 0 forces it) and the last entries of
    B, at, qt are truncation fillers: B[N-1] = 0, at[N-1] = 0,
    qt[N-1] = q[N-1].
    """
    N = op.n_sites
    check_same_length(N, (seed.values, "seed"))
    check_nodeless(seed.values, "seed")
    if not const_a < 0:
        raise ValueError(f"const_a must be a negative real, got {const_a!r}")

    res = recurrence_residual(op, seed)
    worst = float(np.max(res))
    if worst > seed_tol:
        raise ValueError(
            f"seed does not solve the recurrence at E={seed.energy}: "
            f"max row residual {worst:.3e} > {seed_tol:.1e}"
        )

    a, q = op.a, op.q
    up = seed.ratios()  # xi_{n+1}/xi_n, n = 0..N-2

    A = np.zeros(N, dtype=np.complex128)
    A[1:] = _principal_sqrt_vec(-const_a * a[1:] / up[:])
    B = np.zeros(N, dtype=np.complex128)
    B[:-1] = -A[1:] * up

    b_principal = -_principal_sqrt_vec(-const_a * a[1:] * up)
    branch = np.zeros(N, dtype=np.int8)
    flip = np.abs(B[:-1] - b_principal) > np.abs(B[:-1] + b_principal)
    branch[:-1] = np.where(flip, -1, 1)

    at = np.zeros(N, dtype=np.complex128)
    at[1:-1] = A[1:-1] * a[2:] / A[2:]
    qt = np.zeros(N, dtype=np.complex128)
    qt[0] = q[0] - a[1] / up[0]
    qt[1:-1] = q[1:-1] + a[1:-1] / up[:-1] - a[2:] / up[1:]
    qt[-1] = q[-1]

    # second closed form, valid for n = 0..N-3
    qt2 = q[1:-1] - a[1:-1] * up[:-1] + a[2:] * up[1:]
    denom = 1.0 + np.abs(qt[:-2])
    q_crosscheck = float(np.max(np.abs(qt[:-2] - qt2) / denom)) if N > 2 else 0.0
    if q_crosscheck > crosscheck_tol:
        raise ValueError(
            f"the two expressions for qt disagree by {q_crosscheck:.3e} "
            f"(> {crosscheck_tol:.1e}); the seed is inconsistent with the operator"
        )

    for name, arr in (("at", at), ("qt", qt)):
        leak = np.max(np.abs(arr.imag) / (1.0 + np.abs(arr.real)))
        if leak > realness_tol:
            raise ValueError(
                f"transformed {name} has imaginary part {leak:.3e} beyond the "
                f"realness tolerance {realness_tol:.1e}; check the seed's phase structure"
            )

    h1 = JacobiOperator(at.real, qt.real, label=(op.label + "~") if op.label else "transformed")
    L = DarbouxOperator(
        A=A,
        B=B,
        const_a=float(const_a),
        lam=float(seed.energy),
        seed=seed,
        branch=branch,
        q_crosscheck=q_crosscheck,
    )
    return L, h1


def apply_transform(L: DarbouxOperator, s: Seq, direction: str = "forward") -> Seq:
    """Apply the intertwiner (or its adjoint) to a sequence.

    forward: out_n = A_{n+1} s_{n+1} + B_n s_n  (maps h0-solutions at E to
    h1-solutions at E; annihilates the seed).
    adjoint: out_n = conj(A_n) s_{n-1} + conj(B_n) s_n  (maps back).
    The truncation-affected entries are flagged on the result.
    """
    vals = s.plain_values()
    check_same_length(L.n_sites, (vals, "sequence"))
    N = L.n_sites
    out = np.zeros(N, dtype=np.complex128)
    if direction == "forward":
        out[:-1] = L.A[1:] * vals[1:] + L.B[:-1] * vals[:-1]
        out[-1] = L.B[-1] * vals[-1]
        boundary = (N - 1,)
    elif direction == "adjoint":
        out[:] = np.conj(L.B) * vals
        out[1:] += np.conj(L.A[1:]) * vals[:-1]
        boundary = (0, N - 1)
    else:
        raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")
    return Seq(out, s.energy, "generic", boundary_rows=boundary)


def _seed_sign_pattern(op: JacobiOperator, seed: Seq) -> int:
    """Uniform sign of a_{n+1} xi_n xi_{n+1}; raises if mixed or non-real."""
    prod = op.a[1:] * seed.values[:-1] * seed.values[1:]
    scale = np.abs(prod)
    if np.any(np.abs(prod.imag) > 1e-10 * scale):
        raise ValueError("missing states need a seed with real a_{n+1} xi_n xi_{n+1}")
    signs = np.sign(prod.real)
    if signs[0] == 0 or np.any(signs != signs[0]):
        raise ValueError("mixed sign pattern of a_{n+1} xi_n xi_{n+1}; no uniform branch")
    return int(signs[0])


def missing_states(
    op: JacobiOperator,
    L: DarbouxOperator,
    eta_hat0_over_eta0: complex = 1.0,
    w0: float = 1.0,
    transformed: JacobiOperator | None = None,
) -> MissingStatePair:
    """Solutions of the transformed recurrence at E = lam, which the forward
    map cannot produce (L annihilates the seed there).

    eta_n has magnitude |A|^{1/2} |a_{n+1} xi_n xi_{n+1}|^{-1/2}; its branch
    carries the uniform sign of a_{n+1} xi_n xi_{n+1} so that the adjoint
    pairings come out as (L^+ eta) = 0 and (L^+ etah) = -w0 |A| xi on rows
    >= 1 (-w0 xi under the standard A = -1).
    etah_n = eta_n (etah_0/eta_0 + w0 sum_{k<=n} xi_k^2).  Both are computed
    for n = 0..N-2; index N-1 needs data beyond the truncation window and is
    zero-filled (see valid_upto).  If `transformed` (h1) is supplied, the
    per-member max interior residual of its recurrence at lam is reported.
    """
    seed = L.seed
    N = L.n_sites
    if np.any(op.a[1:] == 0.0):
        raise ValueError("missing states require a[n+1] != 0 over the window")
    check_nodeless(seed.values, "seed")
    delta = _seed_sign_pattern(op, seed)

    logs = seed.log_scale if seed.log_scale is not None else np.zeros(N)
    eta_m = delta * L.A[1:] / (op.a[1:] * seed.values[:-1])
    eta_vals = np.zeros(N, dtype=np.complex128)
    eta_logs = np.zeros(N)
    eta_vals[:-1] = eta_m
    eta_logs[:-1] = -logs[:-1]
    eta = Seq(eta_vals, L.lam, "missing_state", log_scale=eta_logs, boundary_rows=(N - 1,))

    # factor f_n = chat + w0 * sum_{k=1..n} xi_k^2, with the sum accumulated
    # in log space (xi_k^2 is real with a uniform sign for the supported
    # seed phase structures)
    chat = complex(eta_hat0_over_eta0)
    sq = seed.values[1:] ** 2
    if np.any(np.abs(sq.imag) > 1e-10 * np.abs(sq)):
        raise ValueError("etah needs xi_k^2 real; unsupported seed phase structure")
    sq_sign = np.sign(sq.real)
    if w0 != 0 and np.any(sq_sign != sq_sign[0]):
        raise ValueError("xi_k^2 changes sign; no stable log-domain accumulation")
    t = 2.0 * (np.log(np.abs(seed.values[1:])) + logs[1:])
    log_sum = np.empty(N - 1)
    log_sum[0] = t[0]
    for k in range(1, N - 1):
        hi = max(log_sum[k - 1], t[k])
        log_sum[k] = hi + np.log(np.exp(log_sum[k - 1] - hi) + np.exp(t[k] - hi))
    sigma = float(sq_sign[0]) if len(sq_sign) else 1.0

    hat_vals = np.zeros(N, dtype=np.complex128)
    hat_logs = np.zeros(N)
    hat_vals[0] = eta_vals[0] * chat
    hat_logs[0] = eta_logs[0]
    for n in range(1, N - 1):
        # f_n in (mantissa, log) form; factor out the sum when it dominates
        if w0 == 0:
            f_m, f_log = chat, 0.0
        else:
            f_log = log_sum[n - 1] + np.log(abs(w0))
            if f_log > 0:
                f_m = np.sign(w0) * sigma + chat * np.exp(-f_log)
            else:
                f_m, f_log = chat + w0 * sigma * np.exp(log_sum[n - 1]), 0.0
        hat_vals[n] = eta_vals[n] * f_m
        hat_logs[n] = eta_logs[n] + f_log
    eta_hat = Seq(
        hat_vals, L.lam, "missing_state", log_scale=hat_logs, boundary_rows=(N - 1,)
    )

    def _collapse(s: Seq) -> Seq:
        try:
            return s.materialize()
        except OverflowError:
            return s

    eta = _collapse(eta)
    eta_hat = _collapse(eta_hat)

    res_eta = res_hat = None
    if transformed is not None:
        # rows 1..N-3: row 0 genuinely fails (the Wronskian defect) and the
        # last rows touch zero-filled data
        r = recurrence_residual(transformed, eta, L.lam)
        res_eta = float(np.max(r[1 : N - 2])) if N > 3 else 0.0
        r = recurrence_residual(transformed, eta_hat, L.lam)
        res_hat = float(np.max(r[1 : N - 2])) if N > 3 else 0.0

    return MissingStatePair(
        eta=eta,
        eta_hat=eta_hat,
        lam=L.lam,
        w0=float(w0),
        eta_hat0_over_eta0=chat,
        valid_upto=N - 2,
        residual_eta=res_eta,
        residual_eta_hat=res_hat,
    )


def _as_probe_matrix(probes, n: int) -> np.ndarray:
    rows = []
    for p in probes:
        vals = p.plain_values() if isinstance(p, Seq) else np.asarray(p, dtype=np.complex128)
        if len(vals) != n:
            raise ValueError(f"probe length {len(vals)} != {n}")
        rows.append(vals)
    return np.asarray(rows, dtype=np.complex128)


def _apply_h_matrix(op: JacobiOperator, S: np.ndarray) -> np.ndarray:
    out = op.q[None, :] * S
    out[:, 1:] += op.a[None, 1:] * S[:, :-1]
    out[:, :-1] += op.a[None, 1:] * S[:, 1:]
    return out


def _apply_L_matrix(L: DarbouxOperator, S: np.ndarray) -> np.ndarray:
    out = L.B[None, :] * S
    out[:, :-1] += L.A[None, 1:] * S[:, 1:]
    return out


def _apply_Ld_matrix(L: DarbouxOperator, S: np.ndarray) -> np.ndarray:
    out = np.conj(L.B)[None, :] * S
    out[:, 1:] += np.conj(L.A)[None, 1:] * S[:, :-1]
    return out


def verify_transform(
    h0: JacobiOperator,
    h1: JacobiOperator,
    L: DarbouxOperator,
    probes,
) -> VerifyReport:
    """Residuals of the intertwining and factorization identities on arbitrary
    probe sequences (they hold for any sequence, not only eigenvectors):

        r_int  = max |(L h0 s)_n - (h1 L s)_n| / max|s|
        r_fac0 = max |(L^+ L s)_n - |A| ((h0 - lam) s)_n| / max|s|
        r_fac1 = max |(L L^+ s)_n - |A| ((h1 - lam) s)_n| / max|s|

    over interior rows n = 0..N-3; the last two rows involve truncated data
    and are excluded.
    """
    N = h0.n_sites
    S = _as_probe_matrix(probes, N)
    if S.size == 0:
        raise ValueError("need at least one probe")
    scale = np.maximum(np.max(np.abs(S), axis=1), np.finfo(float).tiny)[:, None]
    absA = abs(L.const_a)
    cut = N - 2

    d_int = _apply_L_matrix(L, _apply_h_matrix(h0, S)) - _apply_h_matrix(h1, _apply_L_matrix(L, S))
    d_f0 = _apply_Ld_matrix(L, _apply_L_matrix(L, S)) - absA * (_apply_h_matrix(h0, S) - L.lam * S)
    d_f1 = _apply_L_matrix(L, _apply_Ld_matrix(L, S)) - absA * (_apply_h_matrix(h1, S) - L.lam * S)

    r_int = float(np.max(np.abs(d_int[:, :cut]) / scale))
    r_fac0 = float(np.max(np.abs(d_f0[:, :cut]) / scale))
    r_fac1 = float(np.max(np.abs(d_f1[:, :cut]) / scale))
    return VerifyReport(
        r_int=r_int,
        r_fac0=r_fac0,
        r_fac1=r_fac1,
        n_probes=len(S),
        boundary_rows_excluded=(N - 2, N - 1),
    )


def norm_ratio(L: DarbouxOperator, s: Seq) -> float:
    """<Ls, Ls> / <s, s>; equals E - lam when s solves h0's recurrence at E
    away from the truncation edge."""
    vals = s.plain_values()
    Ls = _apply_L_matrix(L, vals[None, :])[0]
    denom = float(np.vdot(vals, vals).real)
    if denom == 0.0:
        raise ValueError("zero probe")
    return float(np.vdot(Ls, Ls).real) / denom


def gauge_signs(
    L: DarbouxOperator, h1: JacobiOperator, sigma
) -> tuple[DarbouxOperator, JacobiOperator]:
    """Conjugate by diag(sigma), sigma_n = +-1: at_n -> sigma_{n-1} sigma_n at_n,
    A_n -> sigma_{n-1} A_n, B_n -> sigma_n B_n, qt unchanged.  Physically
    equivalent (the factorizations and kernel pairings are preserved); useful
    to normalize sign-alternating off-diagonals against positive references.
    """
    sig = np.asarray(sigma, dtype=np.float64)
    check_same_length(L.n_sites, (sig, "sigma"))
    if np.any(np.abs(sig) != 1.0):
        raise ValueError("sigma entries must be +-1")
    A = L.A.copy()
    A[1:] = sig[:-1] * A[1:]
    B = L.B * sig
    a1 = h1.a.copy()
    a1[1:] = sig[:-1] * sig[1:] * a1[1:]
    op1 = JacobiOperator(a1, h1.q.copy(), label=h1.label)
    Lg = DarbouxOperator(
        A=A,
        B=B,
        const_a=L.const_a,
        lam=L.lam,
        seed=L.seed,
        branch=L.branch.copy(),
        q_crosscheck=L.q_crosscheck,
    )
    return Lg, op1
