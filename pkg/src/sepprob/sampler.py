"""Random 4x4 density matrices under Hilbert-Schmidt (flat) measure.

Three ensembles are supported, labeled by a Dyson-like parameter alpha:
real symmetric (alpha = 1/2, "rebit"), complex Hermitian (alpha = 1,
"qubit") and quaternionic Hermitian (alpha = 2, "quabit").  Constructions
are chosen so the induced measure on the unit-trace body is exactly flat:

* real:        rho = G G^T / tr(G G^T) with G a 4x5 real Ginibre matrix
               (a square G induces a det(rho)^(-1/2) factor, not flat);
* complex:     rho = G G^dag / tr with G a 4x4 complex Ginibre matrix;
* quaternion:  trace-normalized Bartlett-Wishart with half-integer degrees
               of freedom 7/2: lower-triangular T whose squared diagonal
               entries are chi-square with 14, 10, 6, 2 degrees of freedom
               and with standard quaternion normals below the diagonal,
               rho = T T^dag / tr.  No integer-size Ginibre rectangle makes
               the quaternionic eigenvalue weight flat, so the sampler goes
               through the Bartlett form directly.

Each construction is validated against its known exact separability
probability in the test suite.

Randomness is counter-based (Philox): sample i always consumes the same
fixed block of raw outputs regardless of chunking or thread count, so
estimates are bit-identical for a fixed seed no matter how the work is
scheduled.  Normals come from Box-Muller on 53-bit uniforms, which keeps
per-sample consumption fixed.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np
from numpy.random import Philox

from .errors import InputError, NumericalFailureError
from .quaternion import QuaternionMatrix, embed_blocked_batch

_TWO_PI = 2.0 * np.pi
_CHUNK = 1 << 15
_RESAMPLE_STRIDE = 1 << 53   # stream region reserved for degenerate redraws

#: Tolerances for sampled-state invariants.
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-12
_DET_IMAG_TOL = 1e-10
_MOORE_RESIDUAL_TOL = 1e-8

_SUPPORT_LO = -1.0 / 16.0 - 1e-12
_SUPPORT_HI = 1.0 / 256.0 + 1e-12


class Ring(enum.Enum):
    """Entry ring of the ensemble, with its Dyson-like label."""

    REAL = "rebit"
    COMPLEX = "qubit"
    QUATERNION = "quabit"

    @property
    def alpha(self) -> Fraction:
        return {Ring.REAL: Fraction(1, 2), Ring.COMPLEX: Fraction(1),
                Ring.QUATERNION: Fraction(2)}[self]

    @property
    def ensemble_name(self) -> str:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "Ring":
        for ring in cls:
            if ring.value == name or ring.name.lower() == name.lower():
                return ring
        raise InputError(f"unknown ensemble {name!r} (use rebit, qubit or quabit)")


#: Raw 64-bit outputs consumed per sample (multiples of 4: Philox advances
#: its counter in blocks of four outputs).
_BUDGET = {Ring.REAL: 20, Ring.COMPLEX: 32, Ring.QUATERNION: 40}

# Gamma shapes of the squared Bartlett diagonal for the flat quaternionic
# ensemble: T_ii^2 ~ 2 * Gamma(shape), i.e. chi-square with 14, 10, 6, 2
# degrees of freedom (beta (K - i + 1) with beta = 4, K = 7/2).  Together
# with the 24 off-diagonal normal components the trace carries 56 = 2 * 28
# degrees of freedom, which is what makes the shape density flat.
_QUAT_GAMMA_SHAPES = (7, 5, 3, 1)


@dataclass
class DensityMatrix:
    """A unit-trace Hermitian PSD 4x4 matrix over one of the three rings."""

    ring: Ring
    matrix: object  # ndarray for REAL/COMPLEX, QuaternionMatrix for QUATERNION

    def validate(self, trace_tol: float = TRACE_TOL, eigen_tol: float = EIGEN_TOL) -> None:
        """Raise if Hermiticity, unit trace or positivity fail their tolerances."""
        if self.ring is Ring.QUATERNION:
            qm: QuaternionMatrix = self.matrix
            if not qm.is_hermitian():
                raise NumericalFailureError("quaternionic matrix is not Hermitian")
            trace = qm.trace_real()
            eigs = np.linalg.eigvalsh(qm.embed_blocked())
        else:
            m = np.asarray(self.matrix)
            if not np.allclose(m, m.conj().T, atol=1e-10):
                raise NumericalFailureError("matrix is not Hermitian")
            trace = float(np.trace(m).real)
            eigs = np.linalg.eigvalsh(m)
        if abs(trace - 1.0) > trace_tol:
            raise NumericalFailureError(f"trace deviates from 1 by {abs(trace - 1.0):.3e}")
        if float(eigs.min()) < -eigen_tol:
            raise NumericalFailureError(f"negative eigenvalue {eigs.min():.3e}")


@dataclass
class McResult:
    """Monte Carlo estimate of a probability with its binomial standard error."""

    estimate: float
    std_error: float
    samples: int
    seed: int
    ensemble: Ring
    degenerate_draws: int = 0

    def to_json_dict(self) -> dict:
        return {
            "ensemble": self.ensemble.ensemble_name,
            "alpha": f"{self.ensemble.alpha.numerator}/{self.ensemble.alpha.denominator}"
                     if self.ensemble.alpha.denominator != 1 else str(self.ensemble.alpha.numerator),
            "samples": self.samples,
            "seed": self.seed,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "degenerate_draws": self.degenerate_draws,
        }


@dataclass
class BivariateMomentTable:
    """Sample means of det(rho_PT)^n det(rho)^k with standard errors."""

    ensemble: Ring
    max_n: int
    max_k: int
    samples: int
    seed: int
    means: np.ndarray       # shape (max_n+1, max_k+1)
    std_errors: np.ndarray
    det_pt_range: tuple[float, float] = (0.0, 0.0)

    def entry(self, n: int, k: int) -> tuple[float, float]:
        return float(self.means[n, k]), float(self.std_errors[n, k])

    def to_json_dict(self) -> dict:
        rows = []
        for n in range(self.max_n + 1):
            for k in range(self.max_k + 1):
                mean, se = self.entry(n, k)
                rows.append({"n": n, "k": k, "mean": mean, "std_error": se})
        return {
            "ensemble": self.ensemble.ensemble_name,
            "samples": self.samples,
            "seed": self.seed,
            "max_n": self.max_n,
            "max_k": self.max_k,
            "det_pt_min": self.det_pt_range[0],
            "det_pt_max": self.det_pt_range[1],
            "entries": rows,
        }


# ---------------------------------------------------------------------------
# Counter-based uniform streams.

def _uniforms(seed: int, budget: int, lo: int, n: int) -> np.ndarray:
    """Uniforms in (0, 1) for samples lo..lo+n-1, each consuming ``budget`` raws."""
    bg = Philox(key=seed)
    bg.advance(lo * budget // 4)
    raw = bg.random_raw(n * budget)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)


def _normals(u: np.ndarray) -> np.ndarray:
    """Box-Muller, consuming uniform pairs positionally."""
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(u.shape, dtype=np.float64)
    out[0::2] = r * np.cos(_TWO_PI * u2)
    out[1::2] = r * np.sin(_TWO_PI * u2)
    return out


# ---------------------------------------------------------------------------
# Ensemble kernels: uniforms -> normalized density matrices (batched).

def _real_rho(u: np.ndarray, n: int) -> np.ndarray:
    g = _normals(u).reshape(n, 4, 5)
    w = g @ np.swapaxes(g, 1, 2)
    tr = np.trace(w, axis1=1, axis2=2)
    return w, tr


def _complex_rho(u: np.ndarray, n: int) -> np.ndarray:
    z = _normals(u)
    g = (z[0::2] + 1j * z[1::2]).reshape(n, 4, 4)
    w = g @ np.conj(np.swapaxes(g, 1, 2))
    tr = np.real(np.trace(w, axis1=1, axis2=2))
    return w, tr


def _quaternion_parts(u: np.ndarray, n: int):
    """Bartlett draw; returns Cayley-Dickson parts (C, D) and the trace."""
    u = u.reshape(n, 40)
    # squared diagonal: chi-square dof 14, 10, 6, 2 as 2 * Gamma(7|5|3|1),
    # each Gamma(m) = -log of a product of m uniforms
    logs = np.log(u[:, :16])
    offsets = np.concatenate(([0], np.cumsum(_QUAT_GAMMA_SHAPES)))
    chisq = np.empty((n, 4), dtype=np.float64)
    for i in range(4):
        chisq[:, i] = -2.0 * logs[:, offsets[i]:offsets[i + 1]].sum(axis=1)
    tdiag = np.sqrt(chisq)
    z = _normals(u[:, 16:].reshape(-1)).reshape(n, 24)
    ta = np.zeros((n, 4, 4), dtype=np.complex128)
    tb = np.zeros((n, 4, 4), dtype=np.complex128)
    idx = 0
    for i in range(4):
        ta[:, i, i] = tdiag[:, i]
        for j in range(i):
            ta[:, i, j] = z[:, idx] + 1j * z[:, idx + 1]
            tb[:, i, j] = z[:, idx + 2] + 1j * z[:, idx + 3]
            idx += 4
    # W = T T^dag in Cayley-Dickson parts
    c = ta @ np.conj(np.swapaxes(ta, 1, 2)) + tb @ np.conj(np.swapaxes(tb, 1, 2))
    d = tb @ np.swapaxes(ta, 1, 2) - ta @ np.swapaxes(tb, 1, 2)
    tr = np.real(np.trace(c, axis1=1, axis2=2))
    return c, d, tr


# ---------------------------------------------------------------------------
# Partial transpose and determinants (batched paths).

def _pt_batch(m: np.ndarray) -> np.ndarray:
    """First-subsystem block swap [[A,B],[B^dag,D]] -> [[A,B^dag],[B,D]]."""
    out = m.copy()
    out[..., 0:2, 2:4] = np.conj(np.swapaxes(m[..., 0:2, 2:4], -1, -2))
    out[..., 2:4, 0:2] = np.conj(np.swapaxes(m[..., 2:4, 0:2], -1, -2))
    return out


def _pt_quaternion_parts(c: np.ndarray, d: np.ndarray):
    """Block swap in Cayley-Dickson form: Q -> Q^dag means (CQ, DQ) -> (CQ^dag, -DQ^T)."""
    cq = c[..., 0:2, 2:4]
    dq = d[..., 0:2, 2:4]
    cp = c.copy()
    dp = d.copy()
    cp[..., 0:2, 2:4] = np.conj(np.swapaxes(cq, -1, -2))
    cp[..., 2:4, 0:2] = cq
    dp[..., 0:2, 2:4] = -np.swapaxes(dq, -1, -2)
    dp[..., 2:4, 0:2] = dq
    return cp, dp


def _moore_batch(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Moore determinants of Hermitian (C, D) batches via half-trace Newton sums.

    The embedding E carries each quaternionic eigenvalue twice, so the power
    sums of the four underlying eigenvalues are tr(E^j)/2; Newton's
    identities then give their elementary symmetric function e_4, which is
    the Moore determinant.  Agrees with the per-matrix characteristic-
    polynomial square root route (see :func:`moore_determinant`).
    """
    e = embed_blocked_batch(c, d)
    e2 = e @ e
    e3 = e2 @ e
    e4 = e2 @ e2
    p1 = np.real(np.trace(e, axis1=-2, axis2=-1)) / 2.0
    p2 = np.real(np.trace(e2, axis1=-2, axis2=-1)) / 2.0
    p3 = np.real(np.trace(e3, axis1=-2, axis2=-1)) / 2.0
    p4 = np.real(np.trace(e4, axis1=-2, axis2=-1)) / 2.0
    s1 = p1
    s2 = (s1 * p1 - p2) / 2.0
    s3 = (s2 * p1 - s1 * p2 + p3) / 3.0
    return (s3 * p1 - s2 * p2 + s1 * p3 - p4) / 4.0


def _hermitian_det_batch(m: np.ndarray) -> np.ndarray:
    det = np.linalg.det(m)
    if np.iscomplexobj(det):
        worst = float(np.max(np.abs(det.imag))) if det.size else 0.0
        if worst > _DET_IMAG_TOL:
            raise NumericalFailureError(
                f"determinant imaginary part {worst:.3e} exceeds {_DET_IMAG_TOL}"
            )
        det = det.real
    return det


def _chunk_dets(ring: Ring, seed: int, lo: int, n: int, need_rho: bool):
    """(det_pt, det_rho or None, degenerate count) for samples lo..lo+n-1."""
    u = _uniforms(seed, _BUDGET[ring], lo, n)
    degenerate = 0
    if ring is Ring.QUATERNION:
        c, d, tr = _quaternion_parts(u, n)
        bad = np.flatnonzero(tr == 0.0)
        if bad.size:   # probability-zero guard; redraw from a reserved region
            degenerate = int(bad.size)
            for b in bad:
                c[b], d[b], tr[b] = _redraw(ring, seed, lo + int(b))
        c /= tr[:, None, None]
        d /= tr[:, None, None]
        cp, dp = _pt_quaternion_parts(c, d)
        det_pt = _moore_batch(cp, dp)
        det_rho = _moore_batch(c, d) if need_rho else None
        return det_pt, det_rho, degenerate
    w, tr = (_real_rho if ring is Ring.REAL else _complex_rho)(u, n)
    bad = np.flatnonzero(tr == 0.0)
    if bad.size:
        degenerate = int(bad.size)
        for b in bad:
            w[b], _, tr[b] = _redraw(ring, seed, lo + int(b))
    w /= tr[:, None, None]
    det_pt = _hermitian_det_batch(_pt_batch(w))
    det_rho = _hermitian_det_batch(w) if need_rho else None
    return det_pt, det_rho, degenerate


def _redraw(ring: Ring, seed: int, index: int):
    """Deterministic resample of one degenerate draw from a reserved stream region."""
    for attempt in range(1, 64):
        u = _uniforms(seed, _BUDGET[ring], index + attempt * _RESAMPLE_STRIDE, 1)
        if ring is Ring.QUATERNION:
            c, d, tr = _quaternion_parts(u, 1)
            if tr[0] != 0.0:
                return c[0], d[0], tr[0]
        else:
            w, tr = (_real_rho if ring is Ring.REAL else _complex_rho)(u, 1)
            if tr[0] != 0.0:
                return w[0], None, tr[0]
    raise NumericalFailureError("could not draw a nondegenerate sample")


def _run_chunks(ring: Ring, samples: int, seed: int, threads: int, reducer, need_rho: bool):
    """Map ``reducer`` over per-chunk determinant arrays, merging in index order."""
    ranges = [(lo, min(_CHUNK, samples - lo)) for lo in range(0, samples, _CHUNK)]
    if threads <= 1 or len(ranges) == 1:
        for lo, n in ranges:
            reducer(_chunk_dets(ring, seed, lo, n, need_rho))
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_chunk_dets, ring, seed, lo, n, need_rho) for lo, n in ranges]
        for fut in futures:     # submission order == index order
            reducer(fut.result())


# ---------------------------------------------------------------------------
# Public operations.

def sample_density(ring: Ring, rng: np.random.Generator) -> DensityMatrix:
    """Draw one Hilbert-Schmidt-distributed density matrix from ``rng``."""
    u = rng.random(_BUDGET[ring])
    u = np.where(u == 0.0, 0.5, u)   # Box-Muller needs u in (0, 1)
    if ring is Ring.QUATERNION:
        c, d, tr = _quaternion_parts(u, 1)
        if tr[0] == 0.0:
            return sample_density(ring, rng)
        return DensityMatrix(ring, QuaternionMatrix(c[0] / tr[0], d[0] / tr[0]))
    w, tr = (_real_rho if ring is Ring.REAL else _complex_rho)(u, 1)
    if tr[0] == 0.0:
        return sample_density(ring, rng)
    return DensityMatrix(ring, w[0] / tr[0])


def partial_transpose(dm):
    """Partial transpose on the first subsystem (Hermiticity-preserving block swap).

    Accepts a DensityMatrix, a 4x4 ndarray or a QuaternionMatrix and
    returns the same kind.  Applying it twice returns the input exactly:
    the operation only permutes (and conjugates pairs of) entries.
    """
    if isinstance(dm, DensityMatrix):
        return DensityMatrix(dm.ring, partial_transpose(dm.matrix))
    if isinstance(dm, QuaternionMatrix):
        if not dm.is_hermitian():
            raise InputError("partial transpose requires a Hermitian input")
        cp, dp = _pt_quaternion_parts(dm.a[None], dm.b[None])
        return QuaternionMatrix(cp[0], dp[0])
    m = np.asarray(dm)
    if m.shape != (4, 4):
        raise InputError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.allclose(m, m.conj().T, atol=1e-10):
        raise InputError("partial transpose requires a Hermitian input")
    return _pt_batch(m[None])[0]


def determinant(dm) -> float:
    """Real determinant of a Hermitian 4x4 matrix over the reals or complexes."""
    if isinstance(dm, DensityMatrix):
        if dm.ring is Ring.QUATERNION:
            raise InputError("use moore_determinant for quaternionic matrices")
        dm = dm.matrix
    m = np.asarray(dm)
    det = np.linalg.det(m)
    if np.iscomplexobj(m):
        if abs(det.imag) > _DET_IMAG_TOL:
            raise NumericalFailureError(
                f"determinant imaginary part {abs(det.imag):.3e} exceeds {_DET_IMAG_TOL}"
            )
        det = det.real
    return float(det)


def moore_determinant(dm) -> float:
    """Moore determinant of a 4x4 quaternionic Hermitian matrix.

    Computed as specified for the embedding route: form the 8x8 complex
    embedding, take its degree-8 characteristic polynomial (Faddeev-
    LeVerrier), extract the monic degree-4 polynomial square root by
    coefficient back-substitution, and evaluate it at zero.  The square
    root exists exactly because every eigenvalue of the embedding of a
    Hermitian quaternionic matrix is doubled; a large back-substitution
    residual therefore signals a non-Hermitian input.
    """
    if isinstance(dm, DensityMatrix):
        dm = dm.matrix
    if not isinstance(dm, QuaternionMatrix):
        raise InputError("moore_determinant expects a QuaternionMatrix")
    e = dm.embed_blockwise()
    coeffs = _char_poly(e)   # [c1..c8], char = l^8 + c1 l^7 + ... + c8
    c1, c2, c3, c4, c5, c6, c7, c8 = coeffs
    b3 = c1 / 2.0
    b2 = (c2 - b3 * b3) / 2.0
    b1 = (c3 - 2.0 * b3 * b2) / 2.0
    b0 = (c4 - 2.0 * b3 * b1 - b2 * b2) / 2.0
    residual = max(
        abs(c5 - (2.0 * b3 * b0 + 2.0 * b2 * b1)),
        abs(c6 - (2.0 * b2 * b0 + b1 * b1)),
        abs(c7 - 2.0 * b1 * b0),
        abs(c8 - b0 * b0),
    )
    scale = max(1.0, max(abs(c) for c in coeffs))
    if residual > _MOORE_RESIDUAL_TOL * scale:
        raise NumericalFailureError(
            f"characteristic polynomial is not a perfect square (residual {residual:.3e}); "
            "input is not Hermitian-embeddable"
        )
    return float(b0)


def _char_poly(m: np.ndarray) -> list[float]:
    """Real characteristic-polynomial coefficients of a Hermitian matrix
    (Faddeev-LeVerrier recursion)."""
    n = m.shape[0]
    work = np.array(m, dtype=np.complex128)
    ident = np.eye(n, dtype=np.complex128)
    coeffs = []
    mk = work.copy()
    for k in range(1, n + 1):
        ck = -np.trace(mk).real / k
        coeffs.append(float(ck))
        if k < n:
            mk = work @ (mk + ck * ident)
    return coeffs


def mc_separability(ring: Ring, samples: int, seed: int, threads: int = 1) -> McResult:
    """Monte Carlo estimate of P(det of the partial transpose >= 0).

    Deterministic for a fixed seed regardless of ``threads``: the sample
    index space is partitioned into fixed chunks whose integer success
    counts are merged in index order.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    if threads < 1:
        raise InputError("threads must be >= 1")
    state = {"count": 0, "degenerate": 0}

    def reducer(result):
        det_pt, _, degenerate = result
        state["count"] += int(np.count_nonzero(det_pt >= 0.0))
        state["degenerate"] += degenerate

    _run_chunks(ring, samples, seed, threads, reducer, need_rho=False)
    estimate = state["count"] / samples
    return McResult(
        estimate=estimate,
        std_error=sqrt(estimate * (1.0 - estimate) / samples),
        samples=samples,
        seed=seed,
        ensemble=ring,
        degenerate_draws=state["degenerate"],
    )


def empirical_moments(
    ring: Ring, samples: int, max_n: int, max_k: int, seed: int, threads: int = 1
) -> BivariateMomentTable:
    """Sample means of det(rho_PT)^n det(rho)^k for n <= max_n, k <= max_k."""
    if samples < 1:
        raise InputError("samples must be >= 1")
    if max_n < 0 or max_k < 0:
        raise InputError("moment orders must be nonnegative")
    s1 = np.zeros((max_n + 1, max_k + 1))
    s2 = np.zeros((max_n + 1, max_k + 1))
    state = {"min": np.inf, "max": -np.inf, "degenerate": 0}
    n_pows = np.arange(max_n + 1)
    k_pows = np.arange(max_k + 1)

    def reducer(result):
        det_pt, det_rho, degenerate = result
        state["degenerate"] += degenerate
        state["min"] = min(state["min"], float(det_pt.min()))
        state["max"] = max(state["max"], float(det_pt.max()))
        pt_p = det_pt[:, None] ** n_pows[None, :]
        rho_p = det_rho[:, None] ** k_pows[None, :]
        np.add(s1, np.einsum("si,sj->ij", pt_p, rho_p), out=s1)
        np.add(s2, np.einsum("si,sj->ij", pt_p * pt_p, rho_p * rho_p), out=s2)

    _run_chunks(ring, samples, seed, threads, reducer, need_rho=True)
    if state["min"] < _SUPPORT_LO or state["max"] > _SUPPORT_HI:
        raise NumericalFailureError(
            f"det(rho_PT) sample range [{state['min']:.3e}, {state['max']:.3e}] "
            "escapes the admissible interval [-1/16, 1/256]"
        )
    means = s1 / samples
    variances = np.maximum(s2 / samples - means * means, 0.0)
    std_errors = np.sqrt(variances / samples)
    means[0, 0] = 1.0   # exact by construction
    std_errors[0, 0] = 0.0
    return BivariateMomentTable(
        ensemble=ring, max_n=max_n, max_k=max_k, samples=samples, seed=seed,
        means=means, std_errors=std_errors,
        det_pt_range=(state["min"], state["max"]),
    )
