"""
Worked model: the free particle expanded in the harmonic-oscillator basis,
plus the discrete-Laplacian toy chain used throughout the tests.

In the oscillator basis the free Hamiltonian couples only same-parity
indices two apart:

    a_n psi_{n-2} + a_{n+2} psi_{n+2} + q_n psi_n = E psi_n,
    a_n = (1/4) sqrt(n (n-1)),   q_n = n/2 + 1/4,

so the step-2 problem splits into independent even/odd chains, each an
ordinary Jacobi operator.  A nodeless solution at E = lam < 0 is built
from Hermite polynomials at imaginary argument,

    xi_n = i^n (n! 2^n)^{-1/2} Hhat_n(y),   y = sqrt(-2 lam),
    Hhat_{n+1} = 2 y Hhat_n + 2 n Hhat_{n-1}   (all terms positive),

where Hhat_n(y) = |H_n(iy)| and the i^n phase is attached exactly from
n mod 4, never as a floating-point angle: the even sublattice is then
exactly real and the odd one exactly imaginary, which keeps the
transformed coefficients real to machine precision.  The values grow like
n^{-1/4} exp(y sqrt(2n)), so the recurrence runs in mantissa/log-scale
form once magnitudes pass 1e150.

Transforming both parity chains at the same lam and merging back yields a
partner operator h1 = h0 + V whose interaction V is tridiagonal in steps
of two: d_n = at_n - a_n off the diagonal and r_n = qt_n - q_n on it.
Continuum solutions at E > 0 come from the closed form

    psi_n = 2 (n! 2^n sqrt(2 pi))^{-1/2} e^{-E} H_n(sqrt(2E)),

whose n-dependence satisfies the recurrence identically (the E-dependent
prefactor drops out of every residual check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import JacobiOperator, Seq
from .validation import as_float_array, check_same_length

_I_POWER = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])
_HERMITE_RESCALE = 1e150


@dataclass(frozen=True)
class Step2Operator:
    """Tridiagonal-in-steps-of-two operator on the full lattice.

    a2[n] couples site n to n-2 (a2[0] = a2[1] = 0); q2 is the diagonal.
    Decouples into even/odd Jacobi chains.
    """

    a2: np.ndarray
    q2: np.ndarray
    label: str = ""

    def __post_init__(self):
        a2 = as_float_array(self.a2, "a2")
        q2 = as_float_array(self.q2, "q2")
        if len(a2) != len(q2):
            raise ValueError("a2 and q2 must have equal length")
        if len(a2) < 4:
            raise ValueError("step-2 operator needs at least 4 sites")
        if a2[0] != 0.0 or a2[1] != 0.0:
            raise ValueError("a2[0] and a2[1] must be exactly 0")
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "q2", q2)

    @property
    def n_sites(self) -> int:
        return len(self.q2)


@dataclass(frozen=True)
class NonlocalPotential:
    """Interaction V with <k|V|n> = d_n delta_{k,n-2} + d_{n+2} delta_{k,n+2}
    + r_n delta_{k,n}; symmetric by construction.  Entries beyond valid_upto
    are truncation fillers."""

    d: np.ndarray
    r: np.ndarray
    lam: float
    valid_upto: int


def laplacian_model(N: int, hopping: float = 1.0) -> JacobiOperator:
    """Discrete Laplacian chain: a_n = hopping for n >= 1, q = 0."""
    a = np.full(N, float(hopping))
    a[0] = 0.0
    return JacobiOperator(a, np.zeros(N), label="laplacian")


def oscillator_model(N: int) -> Step2Operator:
    """Free particle in the oscillator basis: a_n = sqrt(n(n-1))/4, q_n = n/2 + 1/4."""
    if N < 4:
        raise ValueError("need N >= 4")
    n = np.arange(N, dtype=np.float64)
    return Step2Operator(0.25 * np.sqrt(n * (n - 1.0)), 0.5 * n + 0.25, label="oscillator")


def split_even_odd(op2: Step2Operator) -> tuple[JacobiOperator, JacobiOperator]:
    """Restrict to the even and odd sublattices: site m of the even chain is
    lattice index 2m, of the odd chain 2m + 1."""
    even = JacobiOperator(op2.a2[0::2], op2.q2[0::2], label=op2.label + "[even]")
    odd = JacobiOperator(op2.a2[1::2], op2.q2[1::2], label=op2.label + "[odd]")
    return even, odd


def restrict_parity(s: Seq, parity: str) -> Seq:
    """Restrict a step-2 lattice sequence to one parity chain."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    start = 0 if parity == "even" else 1
    ls = None if s.log_scale is None else s.log_scale[start::2]
    return Seq(s.values[start::2], s.energy, s.kind, log_scale=ls)


def merge_parity(even: JacobiOperator, odd: JacobiOperator, label: str = "") -> Step2Operator:
    """Interleave two parity chains back onto the step-2 lattice."""
    if even.n_sites != odd.n_sites:
        raise ValueError("parity chains must have equal length to merge")
    M = even.n_sites
    a2 = np.zeros(2 * M)
    q2 = np.zeros(2 * M)
    a2[0::2] = even.a
    a2[1::2] = odd.a
    q2[0::2] = even.q
    q2[1::2] = odd.q
    return Step2Operator(a2, q2, label=label or even.label.replace("[even]", ""))


def merge_parity_seqs(even: Seq, odd: Seq) -> Seq:
    """Interleave two parity-chain sequences onto the step-2 lattice."""
    if len(even) != len(odd):
        raise ValueError("parity sequences must have equal length to merge")
    if even.is_scaled or odd.is_scaled:
        raise ValueError("merge needs plain sequences; materialize first")
    vals = np.zeros(2 * len(even), dtype=np.complex128)
    vals[0::2] = even.values
    vals[1::2] = odd.values
    return Seq(vals, even.energy, "generic")


def hermite_seed(lam: float, N: int) -> Seq:
    """Nodeless solution of the oscillator-basis free-particle recurrence at
    E = lam < 0 on the step-2 lattice, xi_n = i^n (n! 2^n)^{-1/2} Hhat_n(y).

    Runs the all-positive normalized recurrence (no cancellation) in
    mantissa/log form; the i^n phase is exact.  Restricted to the even
    sublattice the values are exactly real, to the odd one exactly
    imaginary.
    """
    if not lam < 0:
        raise ValueError(f"the seed exists for lam < 0 only, got {lam}")
    if N < 2:
        raise ValueError("need N >= 2")
    y = np.sqrt(-2.0 * lam)
    mag = np.zeros(N)
    logs = np.zeros(N)
    mag[0] = 1.0
    mag[1] = y * np.sqrt(2.0)
    for n in range(1, N - 1):
        shift = np.exp(logs[n - 1] - logs[n])
        nxt = y * np.sqrt(2.0 / (n + 1)) * mag[n] + np.sqrt(n / (n + 1.0)) * mag[n - 1] * shift
        logs[n + 1] = logs[n]
        if nxt > _HERMITE_RESCALE:
            logs[n + 1] += np.log(nxt)
            nxt = 1.0
        mag[n + 1] = nxt
    values = _I_POWER[np.arange(N) % 4] * mag
    if np.any(logs != 0.0):
        return Seq(values, lam, "seed", log_scale=logs)
    return Seq(values, lam, "seed")


def _normalized_hermite(z: float, N: int) -> np.ndarray:
    """h_n(z) = H_n(z) / sqrt(n! 2^n) by the stable normalized recurrence."""
    h = np.zeros(N)
    h[0] = 1.0
    if N > 1:
        h[1] = z * np.sqrt(2.0)
    for n in range(1, N - 1):
        h[n + 1] = z * np.sqrt(2.0 / (n + 1)) * h[n] - np.sqrt(n / (n + 1.0)) * h[n - 1]
    return h


def free_particle_coeffs(energy: float, N: int) -> Seq:
    """Continuum expansion coefficients at E > 0 on the step-2 lattice:
    psi_n = 2 (n! 2^n sqrt(2 pi))^{-1/2} e^{-E} H_n(sqrt(2E)).

    The overall E-dependent prefactor is carried as printed; every
    validation is prefactor-independent since the recurrence is linear.
    """
    if not energy > 0:
        raise ValueError(f"continuum coefficients need E > 0, got {energy}")
    h = _normalized_hermite(np.sqrt(2.0 * energy), N)
    pref = 2.0 * (2.0 * np.pi) ** (-0.25) * np.exp(-energy)
    return Seq(pref * h, energy, "eigen")


def step2_residual(op2: Step2Operator, s: Seq, energy: float | None = None) -> np.ndarray:
    """Per-row relative residual of the step-2 recurrence over rows 0..N-3
    (the last two rows reach past the truncation edge).  Scale factors of a
    log-scaled sequence are removed row by row."""
    N = op2.n_sites
    check_same_length(N, (s.values, "sequence"))
    E = s.energy if energy is None else energy
    vals = s.values
    logs = s.log_scale if s.log_scale is not None else np.zeros(N)
    c = op2.q2 - E
    res = np.zeros(N - 2)
    for n in range(N - 2):
        ref = logs[n]
        terms = [c[n] * vals[n]]
        if n >= 2:
            terms.append(op2.a2[n] * vals[n - 2] * np.exp(logs[n - 2] - ref))
        terms.append(op2.a2[n + 2] * vals[n + 2] * np.exp(logs[n + 2] - ref))
        total = sum(terms)
        scale = max(max(abs(t) for t in terms), np.finfo(float).tiny)
        res[n] = abs(total) / scale
    return res


def nonlocal_potential(
    h1_even: JacobiOperator,
    h1_odd: JacobiOperator,
    lam: float,
    realness_tol: float = 1e-10,
) -> NonlocalPotential:
    """Interaction of h1 = h0 + V relative to the free oscillator-basis
    kinetic coefficients: d_n = at_n - sqrt(n(n-1))/4, r_n = qt_n - n/2 - 1/4
    on the step-2 lattice, merged from the two transformed parity chains.

    The chains must come out of build_transform, which already enforced
    realness of at, qt within its tolerance; d_1 = 0 by the boundary
    convention.  The last two entries of each chain are truncation fillers,
    reflected in valid_upto.
    """
    merged = merge_parity(h1_even, h1_odd, label="transformed oscillator")
    N2 = merged.n_sites
    free = oscillator_model(N2)
    d = merged.a2 - free.a2
    r = merged.q2 - free.q2
    # chains are real by JacobiOperator construction; keep the guard for the
    # contract (a complex leak would have been rejected upstream)
    if realness_tol <= 0:
        raise ValueError("realness_tol must be positive")
    # fillers: the last valid parity-chain entries are m = M-2 on each chain
    valid_upto = N2 - 3
    d[N2 - 2 :] = 0.0
    r[N2 - 2 :] = 0.0
    return NonlocalPotential(d=d, r=r, lam=float(lam), valid_upto=valid_upto)


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log|s_n| against log n."""

    slope: float
    intercept: float
    fit_residual: float
    n_min: int
    n_max: int


def asymptotic_exponent(s: Seq, n_min: int, n_max: int) -> SlopeFit:
    """Fit log|s_n| = slope * log n + intercept over n in [n_min, n_max].

    Works directly on log magnitudes, so log-scaled sequences need not be
    materializable.  The rms deviation of the fit is reported alongside the
    slope; a large value flags non-power-law behavior.
    """
    if not n_max > 2 * n_min:
        raise ValueError("need n_max > 2 * n_min for a meaningful fit window")
    if n_min < 1 or n_max >= len(s):
        raise ValueError(f"window [{n_min}, {n_max}] outside the sequence range")
    idx = np.arange(n_min, n_max + 1)
    logs = s.abs_log()[idx]
    if np.any(~np.isfinite(logs)):
        raise ValueError("zero entries inside the fit window")
    x = np.log(idx.astype(np.float64))
    slope, intercept = np.polyfit(x, logs, 1)
    fitted = slope * x + intercept
    rms = float(np.sqrt(np.mean((logs - fitted) ** 2)))
    return SlopeFit(float(slope), float(intercept), rms, int(n_min), int(n_max))


def basis_function_grid(n: int, xs) -> tuple[np.ndarray, complex]:
    """Coordinate-space oscillator basis function, magnitude part:

        psi_n(x) = (n! 2^n sqrt(2 pi))^{-1/2} e^{-x^2/4} H_n(x / sqrt 2),

    returned together with the exact global phase (-i)^n, reported
    separately.  Used for coordinate-space synthesis of transformed states.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x = as_float_array(xs, "xs")
    pref = (2.0 * np.pi) ** (-0.25) * np.exp(-(x**2) / 4.0)
    z = x / np.sqrt(2.0)
    h_prev = np.ones_like(z)
    if n == 0:
        vals = pref * h_prev
    else:
        h_cur = z * np.sqrt(2.0)
        for k in range(1, n):
            h_prev, h_cur = h_cur, z * np.sqrt(2.0 / (k + 1)) * h_cur - np.sqrt(
                k / (k + 1.0)
            ) * h_prev
        vals = pref * h_cur
    phase = complex(_I_POWER[(-n) % 4])
    return vals, phase
