"""Closed-form eigenvectors of C_t and its dual, with residual-based checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .operators import OperatorSpec, apply, materialize
from .sequence import Mode, Sequence, to_fraction

__all__ = [
    "EigenPair",
    "SpectralReport",
    "binomial_row",
    "lambda_set",
    "eigvec_x",
    "eigenpair",
    "dual_eigvec_z",
    "c1_dual_eigvec",
    "c1_dual_residual",
    "c1_dual_decay",
    "binom_identity_check",
    "eigen_residual",
    "verify_spectrum",
    "kernel_dimension",
    "pairing",
]


def binomial_row(n: int) -> list:
    """``[C(n, 0), ..., C(n, n)]`` by the running product ``C(n, k+1) = C(n, k)(n-k)/(k+1)``."""
    row = [1]
    for k in range(n):
        row.append(row[-1] * (n - k) // (k + 1))
    return row


def _growing_binomials(m: int, K: int):
    """Yield ``C(m+k, k)`` for ``k = 0 .. K-1``."""
    c = 1
    for k in range(K):
        if k:
            c = c * (m + k) // k
        yield c


def lambda_set(k: int, mode: Union[Mode, str] = Mode.FLOAT) -> list:
    """The first ``k`` eigenvalues ``1, 1/2, ..., 1/k``."""
    if k < 1:
        raise ValueError("k must be positive")
    if Mode(mode) is Mode.EXACT:
        return [Fraction(1, n + 1) for n in range(k)]
    return [1.0 / (n + 1) for n in range(k)]


def _int_frexp(b: int):
    shift = max(0, b.bit_length() - 64)
    m, e = math.frexp(float(b >> shift))
    return m, e + shift


def _pow_frexp(t: float, k: int):
    """``t**k`` as (mantissa, exponent), renormalizing so nothing underflows."""
    base_m, base_e = math.frexp(t)
    m, e = 1.0, 0
    while k:
        if k & 1:
            m, de = math.frexp(m * base_m)
            e += de + base_e
        k >>= 1
        if k:
            base_m, de = math.frexp(base_m * base_m)
            base_e = 2 * base_e + de
    return m, e


def _binom_times_power(b: int, t: float, k: int) -> float:
    if t == 0.0:
        return float(b) if k == 0 else 0.0
    tk = t**k
    if tk > 1e-290 and b < 2**1000:
        return float(b) * tk
    mb, eb = _int_frexp(b)
    mt, et = _pow_frexp(t, k)
    return math.ldexp(mb * mt, eb + et)


@dataclass(frozen=True)
class EigenPair:
    lam: Union[float, Fraction]
    vector: Sequence
    index: int
    alpha: Union[complex, Fraction] = 1


def eigvec_x(m: int, t, N: int, alpha=1, mode: Union[Mode, str] = Mode.FLOAT) -> Sequence:
    """Eigenvector of C_t for ``1/(m+1)``: zeros before ``m``, then ``alpha C(m+k, k) t^k``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if N <= m:
        raise ValueError(f"truncation N={N} must exceed m={m}")
    if t < 0 or t > 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if Mode(mode) is Mode.EXACT:
        t, alpha = to_fraction(t), to_fraction(alpha)
        if alpha == 0:
            raise ValueError("alpha must be nonzero")
        coords = [Fraction(0)] * m
        tk = Fraction(1)
        for b in _growing_binomials(m, N - m):
            coords.append(alpha * b * tk)
            tk *= t
        return Sequence(tuple(coords), Mode.EXACT)
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    t = float(t)
    coords = np.zeros(N, dtype=np.complex128)
    for k, b in enumerate(_growing_binomials(m, N - m)):
        coords[m + k] = _binom_times_power(b, t, k)
    return Sequence(alpha * coords, Mode.FLOAT)


def eigenpair(m: int, t, N: int, alpha=1, mode: Union[Mode, str] = Mode.FLOAT) -> EigenPair:
    lam = Fraction(1, m + 1) if Mode(mode) is Mode.EXACT else 1.0 / (m + 1)
    return EigenPair(lam, eigvec_x(m, t, N, alpha, mode), m, alpha)


def dual_eigvec_z(n: int, t, N: Optional[int] = None, mode: Union[Mode, str] = Mode.FLOAT) -> Sequence:
    """Finitely supported eigenvector of the dual for ``1/(n+1)``.

    Coordinate ``n - i`` is ``(-1)^i C(n, i) t^i``; the length is ``n + 1``
    unless a longer truncation ``N`` is requested (zero padded).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if t < 0 or t >= 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    N = n + 1 if N is None else N
    if N < n + 1:
        raise ValueError(f"truncation N={N} cannot hold support of length {n + 1}")
    row = binomial_row(n)
    if Mode(mode) is Mode.EXACT:
        t = to_fraction(t)
        coords = [Fraction(0)] * N
        for i, b in enumerate(row):
            coords[n - i] = (-1) ** i * b * t**i
        return Sequence(tuple(coords), Mode.EXACT)
    t = float(t)
    coords = np.zeros(N, dtype=np.complex128)
    for i, b in enumerate(row):
        coords[n - i] = (-1) ** i * _binom_times_power(b, t, i)
    return Sequence(coords, Mode.FLOAT)


def c1_dual_eigvec(z, N: int, mode: Union[Mode, str] = Mode.FLOAT) -> Sequence:
    """Product-formula eigenvector of the dual classical Cesaro operator for ``z``.

    ``x_0 = 1`` and ``x_{i+1} = x_i (1 - 1/(z(i+1)))``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if Mode(mode) is Mode.EXACT:
        z = to_fraction(z)
        if z == 0:
            raise ValueError("z must be nonzero")
        coords = [Fraction(1)]
        for i in range(N - 1):
            coords.append(coords[-1] * (1 - 1 / (z * (i + 1))))
        return Sequence(tuple(coords), Mode.EXACT)
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    factors = 1.0 - 1.0 / (z * np.arange(1, N, dtype=float))
    return Sequence(np.concatenate([[1.0 + 0j], np.cumprod(factors)]), Mode.FLOAT)


def _power_law_tail(x_last: complex, N: int, s: complex) -> complex:
    """``sum_{i>=N} x_i/(i+1)`` assuming ``x_i ~ x_N (N/i)^s`` (midpoint integral)."""
    if s.real <= 0:
        return complex("nan")
    return x_last * (N / (N - 0.5)) ** s / s


def c1_dual_residual(x: Sequence, z, upto: Optional[int] = None, tail: bool = True) -> float:
    """Max ``|(C'_1 x)_n - z x_n|`` over ``n <= upto``.

    The truncated dual row sums miss ``sum_{i>=N} x_i/(i+1)``. With ``tail``
    that remainder is estimated from the product recursion, whose ratios
    ``1 - 1/(z(i+1))`` make ``x_i`` behave like ``i^(-1/z)``.
    """
    N = len(x)
    upto = N // 2 if upto is None else upto
    a = x.to_array()
    z = complex(z)
    dual = apply(OperatorSpec.dual(1), Sequence(a)).coords
    if tail:
        x_next = a[-1] * (1.0 - 1.0 / (z * N))
        dual = dual + _power_law_tail(x_next, N, 1.0 / z)
    return float(np.max(np.abs(dual[: upto + 1] - z * a[: upto + 1])))


def c1_dual_decay(x: Sequence, p_conj: float, z=None) -> dict:
    """Decay diagnostic for ``sum |x_i|^p'``.

    Fits ``|x_i| ~ C i^(-a)`` by least squares on the last half of the
    truncation, then adds a power-law tail to the partial sum. The verdict is
    ``"consistent with membership"`` when ``a p' > 1`` with a 5% margin,
    otherwise ``"inconclusive"``; it is never a membership proof.
    """
    absx = np.abs(x.to_array())
    N = absx.size
    idx = np.arange(N // 2, N)
    keep = absx[idx] > 0
    verdict = "inconclusive"
    exponent = float("nan")
    tail = float("nan")
    partial = float(np.sum(absx**p_conj))
    if keep.sum() >= 2:
        slope, _ = np.polyfit(np.log(idx[keep] + 1.0), np.log(absx[idx][keep]), 1)
        exponent = -float(slope)
        q = exponent * p_conj
        if q > 1:
            tail = float(absx[-1] ** p_conj * N / (q - 1))
            if q > 1.05:
                verdict = "consistent with membership"
    out = {
        "p_conj": p_conj,
        "fitted_exponent": exponent,
        "partial_sum": partial,
        "tail_estimate": tail,
        "verdict": verdict,
    }
    if z is not None:
        z = complex(z)
        out["in_open_disk"] = abs(z - p_conj / 2) < p_conj / 2
    return out


def binom_identity_check(n: int) -> bool:
    """Check ``sum_{k=n-i}^{n} (-1)^{n-i-k} C(n+1, k+1) = C(n, i)`` for all ``i <= n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    row_n = binomial_row(n)
    row_n1 = binomial_row(n + 1)
    for i in range(n + 1):
        total = sum((-1) ** ((n - i) - k) * row_n1[k + 1] for k in range(n - i, n + 1))
        if total != row_n[i]:
            return False
    return True


def eigen_residual(x: Sequence, t, lam) -> Union[float, Fraction]:
    """Relative sup-norm residual ``||C_t x - lam x||_inf / ||x||_inf``."""
    cx = apply(OperatorSpec.cesaro(t), x)
    if x.exact:
        lam = to_fraction(lam)
        r = max(abs(a - lam * b) for a, b in zip(cx.coords, x.coords))
        return r / max(abs(b) for b in x.coords)
    r = float(np.max(np.abs(cx.coords - lam * x.coords)))
    return r / float(np.max(np.abs(x.coords)))


@dataclass
class SpectralReport:
    t: Union[float, Fraction]
    N: int
    mode: Mode
    cap: int
    eigenvalues: list
    residuals: list
    max_residual: Union[float, Fraction]
    diagonal_matches: bool
    label: str = "d1"
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "N": self.N,
            "mode": self.mode.value,
            "cap": self.cap,
            "label": self.label,
            "diagonal_matches": self.diagonal_matches,
            "eigenvalues": list(self.eigenvalues),
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
        }


def verify_spectrum(t, N: int, mode: Union[Mode, str] = Mode.FLOAT, cap: Optional[int] = None) -> SpectralReport:
    """Residuals of the closed-form eigenpairs for ``m < min(N, cap)``.

    Also checks that the diagonal of the truncated matrix is ``1, 1/2, ...,
    1/N``. The eigenvalue list ends with 0, the accumulation point. At
    ``t = 1`` the pairs are labelled ``"omega-only"``: the vectors solve the
    eigen-equation coordinatewise but are not summable.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    mode = Mode(mode)
    cap = min(N, 32 if cap is None else cap)
    if mode is Mode.EXACT:
        t = to_fraction(t)
        diag = [row[n] for n, row in enumerate(materialize(t, N, mode))]
    else:
        t = float(t)
        diag = list(np.diag(materialize(t, N, mode)))
    diagonal_matches = diag == lambda_set(N, mode)
    residuals = []
    for m in range(cap):
        pair = eigenpair(m, t, N, mode=mode)
        residuals.append(eigen_residual(pair.vector, t, pair.lam))
    zero = Fraction(0) if mode is Mode.EXACT else 0.0
    eigenvalues = lambda_set(cap, mode) + [zero]
    return SpectralReport(
        t=t,
        N=N,
        mode=mode,
        cap=cap,
        eigenvalues=eigenvalues,
        residuals=residuals,
        max_residual=max(residuals),
        diagonal_matches=diagonal_matches,
        label="omega-only" if t == 1 else "d1",
    )


def _rank(rows, exact: bool, tol: float) -> int:
    """Row-echelon rank by forward elimination with partial pivoting."""
    if exact:
        A = [list(r) for r in rows]
    else:
        A = np.array(rows, dtype=float)
        tol = tol * max(1.0, float(np.max(np.abs(A))))
    nrows = len(A)
    ncols = len(A[0])
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        if exact:
            piv = next((r for r in range(rank, nrows) if A[r][col] != 0), None)
            if piv is None:
                continue
            A[rank], A[piv] = A[piv], A[rank]
            pv = A[rank][col]
            for r in range(rank + 1, nrows):
                f = A[r][col]
                if f != 0:
                    f = f / pv
                    A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        else:
            piv = rank + int(np.argmax(np.abs(A[rank:, col])))
            if abs(A[piv, col]) <= tol:
                continue
            A[[rank, piv]] = A[[piv, rank]]
            factors = A[rank + 1:, col] / A[rank, col]
            A[rank + 1:, col:] -= np.outer(factors, A[rank, col:])
        rank += 1
    return rank


def kernel_dimension(t, m: int, N: int, mode: Union[Mode, str] = Mode.FLOAT, tol: float = 1e-10) -> int:
    """``dim Ker(C_t - I/(m+1))`` on the N-truncation, by forward elimination."""
    mode = Mode(mode)
    if not 0 <= m < N:
        raise ValueError("need 0 <= m < N")
    mat = materialize(t, N, mode)
    if mode is Mode.EXACT:
        lam = Fraction(1, m + 1)
        rows = [[v - lam if i == n else v for i, v in enumerate(row)] for n, row in enumerate(mat)]
        return N - _rank(rows, True, 0.0)
    rows = mat - np.eye(N) / (m + 1)
    return N - _rank(rows, False, tol)


def pairing(w: Sequence, x: Sequence):
    """Finite bilinear pairing ``sum w_n x_n`` over the common truncation."""
    if w.exact and x.exact:
        return sum((a * b for a, b in zip(w.coords, x.coords)), Fraction(0))
    n = min(len(w), len(x))
    return complex(np.sum(w.to_array()[:n] * x.to_array()[:n]))
