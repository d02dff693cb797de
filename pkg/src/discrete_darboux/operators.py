"""
Truncated semi-infinite Jacobi operators and their three-term recurrences.

A Jacobi operator acts on sequences {s_n}, n = 0..N-1, through

    (h s)_n = a_n s_{n-1} + a_{n+1} s_{n+1} + q_n s_n ,
    a_0 = 0  (semi-infinite boundary),  a_N = 0  (truncation convention),

so row N-1 is the only row affected by the cutoff and is excluded from
residual checks.  Eigen-sequences at energy E satisfy

    a_n s_{n-1} + a_{n+1} s_{n+1} + q_n s_n = E s_n

site by site.  At fixed E the solution space is two-dimensional; the
"physical" branch is the one for which row 0 (where a_0 = 0 removes the
s_{-1} term) also holds.  The discrete Wronskian of two sequences,

    W(f, g)_n = a_n (f_n g_{n-1} - f_{n-1} g_n) ,

is n-independent when both solve the recurrence at the same energy, and
obeys W_{n+1} = W_n + (lam - E) f_n g_n when f sits at energy lam and g
at energy E.

Solutions below the spectrum grow geometrically (factorially for the
oscillator-basis model), so a sequence may carry a per-entry log scale:
the represented value is values[n] * exp(log_scale[n]).  Ratio and
log-magnitude queries work on either representation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .validation import as_complex_array, as_float_array, check_same_length

SEQ_KINDS = ("generic", "eigen", "seed", "missing_state")

# |values| above this trigger the scaled representation in solve_recurrence.
MAGNITUDE_CAP = 1e150
# log-magnitude limit below which a scaled sequence can be materialized.
_MATERIALIZE_LOG_CAP = 700.0


@dataclass(frozen=True)
class JacobiOperator:
    """Real symmetric tridiagonal operator: off-diagonal a (a[0] = 0), diagonal q."""

    a: np.ndarray
    q: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = as_float_array(self.a, "a")
        q = as_float_array(self.q, "q")
        if len(a) != len(q):
            raise ValueError(f"a and q must have equal length, got {len(a)} and {len(q)}")
        if len(a) < 2:
            raise ValueError("operator needs at least 2 sites")
        if a[0] != 0.0:
            raise ValueError(f"a[0] must be exactly 0, got {a[0]!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", q)

    @property
    def n_sites(self) -> int:
        return len(self.q)

    def interior_rows(self) -> slice:
        """Rows whose transform residuals are free of truncation artifacts."""
        return slice(0, self.n_sites - 2)


@dataclass(frozen=True)
class Seq:
    """Finite complex sequence with an energy tag.

    When log_scale is present the represented entries are
    values[n] * exp(log_scale[n]); values then stay O(1).
    """

    values: np.ndarray
    energy: float
    kind: str = "generic"
    log_scale: np.ndarray | None = None
    boundary_rows: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        values = as_complex_array(self.values, "values")
        object.__setattr__(self, "values", values)
        if self.kind not in SEQ_KINDS:
            raise ValueError(f"kind must be one of {SEQ_KINDS}, got {self.kind!r}")
        if self.log_scale is not None:
            ls = as_float_array(self.log_scale, "log_scale")
            check_same_length(len(values), (ls, "log_scale"))
            object.__setattr__(self, "log_scale", ls)
        if self.kind == "seed" and np.any(values == 0):
            raise ValueError("seed sequences must be nodeless (no zero entries)")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_scaled(self) -> bool:
        return self.log_scale is not None

    def abs_log(self) -> np.ndarray:
        """log|s_n|; -inf at exact zeros."""
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(self.values))
        if self.log_scale is not None:
            out = out + self.log_scale
        return out

    def ratios(self, step: int = 1) -> np.ndarray:
        """s_{n+step} / s_n for n = 0..N-1-step, exact across scale changes."""
        r = self.values[step:] / self.values[:-step]
        if self.log_scale is not None:
            r = r * np.exp(self.log_scale[step:] - self.log_scale[:-step])
        return r

    def materialize(self) -> "Seq":
        """Collapse the log scale into plain values, or fail if out of range."""
        if self.log_scale is None:
            return self
        if np.max(self.abs_log()) > _MATERIALIZE_LOG_CAP:
            raise OverflowError("sequence magnitude exceeds double-precision range")
        vals = self.values * np.exp(self.log_scale)
        return Seq(vals, self.energy, self.kind, None, self.boundary_rows)

    def plain_values(self) -> np.ndarray:
        """Values as a plain complex array (materializing if scaled)."""
        return self.materialize().values


def _require_plain(s: Seq, op_name: str) -> np.ndarray:
    if s.is_scaled:
        try:
            return s.materialize().values
        except OverflowError as exc:
            raise TypeError(
                f"{op_name} requires a plain sequence; this one is log-scaled "
                "beyond double range (use recurrence_residual / ratios instead)"
            ) from exc
    return s.values


def apply_jacobi(op: JacobiOperator, s: Seq) -> Seq:
    """Apply the operator: out_n = a_n s_{n-1} + a_{n+1} s_{n+1} + q_n s_n.

    Row N-1 uses the truncation convention a_N = 0 and is flagged as
    boundary-affected in the result.
    """
    vals = _require_plain(s, "apply_jacobi")
    check_same_length(op.n_sites, (vals, "sequence"))
    out = op.q * vals
    out[1:] += op.a[1:] * vals[:-1]
    out[:-1] += op.a[1:] * vals[1:]
    return Seq(out, s.energy, "generic", boundary_rows=(op.n_sites - 1,))


def solve_recurrence(
    op: JacobiOperator,
    energy: float,
    psi0: complex = 1.0,
    mode: str = "physical",
    psi1: complex | None = None,
    magnitude_cap: float = MAGNITUDE_CAP,
) -> Seq:
    """Solve the three-term recurrence forward from the left boundary.

    physical mode: row 0 (a_0 = 0) fixes s_1 = (E - q_0) psi0 / a_1 and the
    returned sequence satisfies rows 0..N-2.  general mode: the caller
    supplies psi1; rows 1..N-2 are satisfied while row 0 generally is not
    (the second, non-physical branch).

    Entries beyond `magnitude_cap` switch the result to the scaled
    representation automatically.
    """
    N = op.n_sites
    a, q = op.a, op.q
    if mode not in ("physical", "general"):
        raise ValueError(f"mode must be 'physical' or 'general', got {mode!r}")
    zeros = np.flatnonzero(a[1:] == 0.0)
    if zeros.size:
        raise ValueError(f"recursion breakdown: a[{zeros[0] + 1}] = 0")

    vals = np.zeros(N, dtype=np.complex128)
    logs = np.zeros(N)
    vals[0] = psi0
    if mode == "physical":
        vals[1] = (energy - q[0]) * psi0 / a[1]
    else:
        if psi1 is None:
            raise ValueError("general mode requires psi1")
        vals[1] = psi1
    for n in range(1, N - 1):
        shift = np.exp(logs[n - 1] - logs[n])
        nxt = ((energy - q[n]) * vals[n] - a[n] * vals[n - 1] * shift) / a[n + 1]
        logs[n + 1] = logs[n]
        mag = abs(nxt)
        if mag > magnitude_cap:
            logs[n + 1] += np.log(mag)
            nxt /= mag
        vals[n + 1] = nxt

    kind = "eigen" if mode == "physical" else "generic"
    if np.any(logs != 0.0):
        return Seq(vals, energy, kind, log_scale=logs)
    return Seq(vals, energy, kind)


def second_solution(op: JacobiOperator, psi: Seq, w0: float, psi_hat0: complex) -> Seq:
    """Second solution at the same energy by reduction of order:

        s_n = (psi_hat0 / psi_0) psi_n + sum_{k=1..n} w0 psi_n / (a_k psi_k psi_{k-1})

    The discrete Wronskian W(s, psi)_n equals w0 for every n >= 1 (checked).
    """
    vals = _require_plain(psi, "second_solution")
    check_same_length(op.n_sites, (vals, "psi"))
    if np.any(vals == 0):
        raise ValueError("psi must be nodeless for the reduction-of-order sum")
    if np.any(op.a[1:] == 0.0):
        raise ValueError("second_solution requires a[k] != 0 for k >= 1")
    if w0 == 0:
        warnings.warn(
            "w0 = 0 gives a multiple of psi (degenerate second solution)",
            RuntimeWarning,
            stacklevel=2,
        )
    terms = np.zeros(op.n_sites, dtype=np.complex128)
    terms[1:] = 1.0 / (op.a[1:] * vals[1:] * vals[:-1])
    partial = np.cumsum(terms)
    out = (psi_hat0 / vals[0]) * vals + w0 * vals * partial
    result = Seq(out, psi.energy, "generic")
    if w0 != 0:
        rep = wronskians(op, result, psi)
        enter = np.abs(op.a[1:]) * np.abs(vals[1:]) * np.abs(vals[:-1])
        scale = max(abs(w0), float(np.max(enter)) * 1e-8)
        if np.max(np.abs(rep.w - w0)) > 1e-8 * scale:
            raise RuntimeError("second solution failed its Wronskian check")
    return result


@dataclass(frozen=True)
class WronskianReport:
    """Per-site Wronskian values W_n for n = 1..N-1 plus the defect of the
    applicable law (constancy at equal energies, the summed recursion
    otherwise).  Defects are relative to the magnitudes involved."""

    w: np.ndarray
    same_energy: bool
    constancy_defect: float | None = None
    recursion_defect: float | None = None


def wronskians(op: JacobiOperator, f: Seq, g: Seq) -> WronskianReport:
    """W(f, g)_n = a_n (f_n g_{n-1} - f_{n-1} g_n) for n = 1..N-1.

    Equal energy tags: reports max_n |W_n - W_1|, scaled by the magnitudes
    entering the cancellation.  Different energies: reports the defect of
    W_{n+1} = W_1 + (lam - E) sum_{k=1..n} f_k g_k with lam = f.energy,
    row-normalized the same way.
    """
    fv = _require_plain(f, "wronskians")
    gv = _require_plain(g, "wronskians")
    check_same_length(op.n_sites, (fv, "f"), (gv, "g"))
    w = op.a[1:] * (fv[1:] * gv[:-1] - fv[:-1] * gv[1:])
    # defects are scaled by the magnitudes entering the cancellation, which
    # keeps them meaningful when the solutions grow by many orders
    enter = np.abs(op.a[1:]) * (
        np.abs(fv[1:]) * np.abs(gv[:-1]) + np.abs(fv[:-1]) * np.abs(gv[1:])
    )
    if f.energy == g.energy:
        scale = max(float(np.max(enter)), np.finfo(float).tiny)
        defect = float(np.max(np.abs(w - w[0])) / scale)
        return WronskianReport(w, True, constancy_defect=defect)
    dlam = f.energy - g.energy
    partial = np.cumsum(fv[1:] * gv[1:])  # sum_{k=1..n} f_k g_k
    # W_{n+1} is w[n] for n = 1..N-2
    lhs = w[1:]
    rhs = w[0] + dlam * partial[:-1]
    scale = np.maximum(
        np.abs(lhs) + np.abs(w[0]) + np.abs(dlam * partial[:-1]), np.finfo(float).tiny
    )
    defect = float(np.max(np.abs(lhs - rhs) / scale)) if len(lhs) else 0.0
    return WronskianReport(w, False, recursion_defect=defect)


def l2_inner(f: Seq, g: Seq) -> complex:
    """sum_n conj(f_n) g_n."""
    fv = _require_plain(f, "l2_inner")
    gv = _require_plain(g, "l2_inner")
    if len(fv) != len(gv):
        raise ValueError(f"length mismatch: {len(fv)} vs {len(gv)}")
    return complex(np.vdot(fv, gv))


def recurrence_residual(op: JacobiOperator, s: Seq, energy: float | None = None) -> np.ndarray:
    """Per-row relative residual of the eigen-recurrence at `energy`
    (default: the sequence's tag) over rows 0..N-2.

    Each row is normalized by its largest term magnitude, which keeps the
    measure meaningful for log-scaled sequences; scale factors are removed
    per row before evaluation.
    """
    N = op.n_sites
    check_same_length(N, (s.values, "sequence"))
    E = s.energy if energy is None else energy
    vals = s.values
    logs = s.log_scale if s.log_scale is not None else np.zeros(N)
    res = np.zeros(N - 1)
    c = op.q - E
    for n in range(N - 1):
        ref = logs[n]
        terms = [c[n] * vals[n]]
        if n >= 1:
            terms.append(op.a[n] * vals[n - 1] * np.exp(logs[n - 1] - ref))
        terms.append(op.a[n + 1] * vals[n + 1] * np.exp(logs[n + 1] - ref))
        total = sum(terms)
        scale = max(max(abs(t) for t in terms), np.finfo(float).tiny)
        res[n] = abs(total) / scale
    return res
