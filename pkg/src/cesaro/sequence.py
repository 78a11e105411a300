"""Truncated sequences and the norm families they are measured in.

A :class:`Sequence` of length ``N`` stands for the first ``N`` coordinates
``x_0, ..., x_{N-1}`` of an element of the space of all complex sequences.
Nothing is assumed about the tail: suffix maxima, Cesaro averages and norms
are all evaluated on the truncation only.

Two scalar modes are supported. ``Mode.FLOAT`` stores a read-only
``complex128`` array. ``Mode.EXACT`` stores a tuple of
:class:`fractions.Fraction` and keeps every rational computation exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Optional, Union

import numpy as np

__all__ = [
    "INF",
    "Mode",
    "Sequence",
    "SpaceKind",
    "SpaceSpec",
    "LadderSpec",
    "to_fraction",
    "majorant",
    "norm",
    "ladder_norms",
    "ratio_beta",
]

#: The extended-real exponent p = infinity.
INF = math.inf

Scalar = Union[complex, float, int, Fraction]


class Mode(str, Enum):
    FLOAT = "float"
    EXACT = "exact"


def to_fraction(value) -> Fraction:
    """Convert an exact scalar (int, Fraction, or ``"num/den"`` string).

    Floats are refused: exact mode must never silently inherit binary
    rounding from a float literal.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(
        f"exact mode needs int, Fraction or 'num/den' strings, got {type(value).__name__}"
    )


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Sequence:
    """Finite truncation ``(x_0, ..., x_{N-1})`` with a fixed scalar mode."""

    coords: Union[np.ndarray, tuple]
    mode: Mode = Mode.FLOAT

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is Mode.FLOAT:
            arr = np.array(self.coords, dtype=np.complex128).reshape(-1)
            object.__setattr__(self, "coords", _freeze(arr))
        else:
            object.__setattr__(self, "coords", tuple(to_fraction(c) for c in self.coords))
        if len(self.coords) < 1:
            raise ValueError("a sequence needs at least one coordinate")

    @classmethod
    def of(cls, values: Iterable, mode: Union[Mode, str] = Mode.FLOAT) -> "Sequence":
        return cls(tuple(values) if Mode(mode) is Mode.EXACT else values, Mode(mode))

    @classmethod
    def zeros(cls, N: int, mode: Union[Mode, str] = Mode.FLOAT) -> "Sequence":
        if Mode(mode) is Mode.EXACT:
            return cls((Fraction(0),) * N, Mode.EXACT)
        return cls(np.zeros(N, dtype=np.complex128), Mode.FLOAT)

    @classmethod
    def basis(cls, k: int, N: int, mode: Union[Mode, str] = Mode.FLOAT) -> "Sequence":
        """The canonical vector e_k truncated to length N."""
        if not 0 <= k < N:
            raise ValueError(f"basis index {k} outside truncation of length {N}")
        vals = [0] * N
        vals[k] = 1
        return cls.of(vals, mode)

    @classmethod
    def geometric(cls, t, N: int, mode: Union[Mode, str] = Mode.FLOAT) -> "Sequence":
        """``(t^n)_{n<N}``."""
        if Mode(mode) is Mode.EXACT:
            t = to_fraction(t)
            return cls(tuple(t**n for n in range(N)), Mode.EXACT)
        return cls(float(t) ** np.arange(N, dtype=float), Mode.FLOAT)

    @property
    def exact(self) -> bool:
        return self.mode is Mode.EXACT

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in list(self.coords[:6]))
        more = ", ..." if len(self) > 6 else ""
        return f"Sequence([{head}{more}], N={len(self)}, mode={self.mode.value})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence) or other.mode is not self.mode:
            return NotImplemented
        if self.exact:
            return self.coords == other.coords
        return bool(np.array_equal(self.coords, other.coords))

    __hash__ = None

    def to_array(self) -> np.ndarray:
        """Coordinates as a fresh complex128 array (exact values are rounded)."""
        if self.exact:
            return np.array([complex(float(c)) for c in self.coords], dtype=np.complex128)
        return np.array(self.coords)

    def abs(self):
        """|x| as a float array (float mode) or tuple of Fractions (exact mode)."""
        if self.exact:
            return tuple(abs(c) for c in self.coords)
        return np.abs(self.coords)

    def truncate(self, M: int) -> "Sequence":
        return Sequence(self.coords[:M], self.mode)

    def _combine(self, other: "Sequence", op) -> "Sequence":
        if len(other) != len(self) or other.mode is not self.mode:
            raise ValueError("sequences must share length and mode")
        if self.exact:
            return Sequence(tuple(op(a, b) for a, b in zip(self.coords, other.coords)), Mode.EXACT)
        return Sequence(op(self.coords, other.coords), Mode.FLOAT)

    def __add__(self, other: "Sequence") -> "Sequence":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "Sequence") -> "Sequence":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "Sequence":
        return self.scale(-1)

    def scale(self, c) -> "Sequence":
        if self.exact:
            c = to_fraction(c)
            return Sequence(tuple(c * a for a in self.coords), Mode.EXACT)
        return Sequence(complex(c) * self.coords, Mode.FLOAT)


class SpaceKind(str, Enum):
    LP = "lp"
    CES = "ces"
    DP = "dp"
    OMEGA = "omega-seminorm"
    LADDER = "ladder"


def _default_plus(p: float) -> Callable[[int], float]:
    return lambda k: p + 1.0 / k


def _default_minus(p: float) -> Callable[[int], float]:
    if p == INF:
        return lambda k: float(k + 1)
    return lambda k: 1.0 + (p - 1.0) * k / (k + 1.0)


@dataclass(frozen=True)
class LadderSpec:
    """A monotone exponent ladder ``p_1, ..., p_K`` converging to ``base_p``.

    ``plus`` ladders decrease to ``base_p`` from above (intersections of
    Banach spaces); ``minus`` ladders increase to ``base_p`` from inside
    ``(1, base_p)`` (unions). When ``rule`` is omitted the defaults are
    ``p + 1/k`` (plus), ``1 + (p-1) k/(k+1)`` (minus, finite p) and
    ``k + 1`` (minus, p infinite).
    """

    base_p: float
    direction: str = "plus"
    family: str = "lp"
    count: int = 8
    rule: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        if self.direction not in ("plus", "minus"):
            raise ValueError(f"ladder direction must be 'plus' or 'minus', not {self.direction!r}")
        if SpaceKind(self.family) not in (SpaceKind.LP, SpaceKind.CES, SpaceKind.DP):
            raise ValueError("ladder family must be lp, ces or dp")
        if self.count < 1:
            raise ValueError("ladder count must be positive")
        p = self.base_p
        if self.direction == "plus" and not 1 <= p < INF:
            raise ValueError("plus ladders need a finite base exponent p >= 1")
        if self.direction == "minus" and not p > 1:
            raise ValueError("minus ladders need base exponent p > 1")
        ps = self.exponents()
        for a, b in zip(ps, ps[1:]):
            if (self.direction == "plus" and not b < a) or (self.direction == "minus" and not b > a):
                raise ValueError("ladder exponents are not strictly monotone")
        for q in ps:
            if self.direction == "plus" and not (p < q < INF):
                raise ValueError(f"plus ladder exponent {q} not in (p, inf)")
            if self.direction == "minus" and not (1 < q < p):
                raise ValueError(f"minus ladder exponent {q} not in (1, p)")

    def exponents(self) -> list:
        rule = self.rule
        if rule is None:
            rule = _default_plus(self.base_p) if self.direction == "plus" else _default_minus(self.base_p)
        return [float(rule(k)) for k in range(1, self.count + 1)]


@dataclass(frozen=True)
class SpaceSpec:
    """Which norm or seminorm to evaluate a truncated sequence against."""

    kind: SpaceKind
    p: Optional[float] = None
    n: Optional[int] = None
    ladder: Optional[LadderSpec] = None

    def __post_init__(self):
        kind = SpaceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (SpaceKind.LP, SpaceKind.CES, SpaceKind.DP):
            if self.p is None or not 1 <= self.p <= INF:
                raise ValueError(f"{kind.value} needs an exponent p in [1, inf]")
            if kind is not SpaceKind.LP and self.p == INF:
                raise ValueError(f"{kind.value} is only defined for finite p")
        elif kind is SpaceKind.OMEGA:
            if self.n is None or self.n < 0:
                raise ValueError("omega seminorm needs an index n >= 0")
        elif self.ladder is None:
            raise ValueError("ladder space needs a LadderSpec")

    @classmethod
    def lp(cls, p: float) -> "SpaceSpec":
        return cls(SpaceKind.LP, p=p)

    @classmethod
    def ces(cls, p: float) -> "SpaceSpec":
        return cls(SpaceKind.CES, p=p)

    @classmethod
    def dp(cls, p: float) -> "SpaceSpec":
        return cls(SpaceKind.DP, p=p)

    @classmethod
    def omega(cls, n: int) -> "SpaceSpec":
        return cls(SpaceKind.OMEGA, n=n)

    @classmethod
    def of_ladder(cls, ladder: LadderSpec) -> "SpaceSpec":
        return cls(SpaceKind.LADDER, ladder=ladder)


# --- array-level kernels (float) -------------------------------------------

def lp_norm_array(a: np.ndarray, p: float) -> float:
    """ℓ^p norm of a nonnegative float array, scaled against overflow."""
    if a.size == 0:
        return 0.0
    big = float(np.max(a))
    if big == 0.0 or not math.isfinite(big):
        return big
    if p == INF:
        return big
    if p == 1:
        return float(math.fsum(a))
    return big * float(np.sum((a / big) ** p)) ** (1.0 / p)


def suffix_max_array(a: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(a[::-1])[::-1]


def cesaro_average_array(a: np.ndarray) -> np.ndarray:
    return np.cumsum(a) / np.arange(1, a.size + 1)


def norm_array(absx: np.ndarray, s: SpaceSpec) -> float:
    """Float norm of an already-absolute-valued coordinate array."""
    if s.kind is SpaceKind.LP:
        return lp_norm_array(absx, s.p)
    if s.kind is SpaceKind.CES:
        return lp_norm_array(cesaro_average_array(absx), s.p)
    if s.kind is SpaceKind.DP:
        return lp_norm_array(suffix_max_array(absx), s.p)
    if s.kind is SpaceKind.OMEGA:
        if s.n >= absx.size:
            raise ValueError(f"seminorm index {s.n} outside truncation of length {absx.size}")
        return float(np.max(absx[: s.n + 1]))
    return max(norm_array(absx, sp) for sp in _ladder_spaces(s.ladder))


# --- public operations ------------------------------------------------------

def majorant(x: Sequence) -> Sequence:
    """Least decreasing majorant on the truncation: suffix maxima of |x|."""
    if x.exact:
        out = []
        run = Fraction(0)
        for c in reversed(x.coords):
            run = max(run, abs(c))
            out.append(run)
        return Sequence(tuple(reversed(out)), Mode.EXACT)
    return Sequence(suffix_max_array(np.abs(x.coords)), Mode.FLOAT)


def _exact_lp(vals, p):
    if p == 1:
        return sum(vals, Fraction(0))
    if p == INF:
        return max(vals)
    return None


def norm(x: Sequence, s: SpaceSpec):
    """Evaluate ``x`` against the norm or seminorm described by ``s``.

    In exact mode the ℓ^1 and ℓ^∞ based values (including d_1, ces(1) and
    the omega seminorms) are returned as exact Fractions; every other
    exponent falls back to float evaluation. A ladder space evaluates to the
    largest of its rung norms.
    """
    if x.exact:
        absx = x.abs()
        if s.kind is SpaceKind.OMEGA:
            if s.n >= len(x):
                raise ValueError(f"seminorm index {s.n} outside truncation of length {len(x)}")
            return max(absx[: s.n + 1])
        if s.kind is SpaceKind.LP:
            vals = absx
        elif s.kind is SpaceKind.CES:
            vals, run = [], Fraction(0)
            for i, c in enumerate(absx):
                run += c
                vals.append(run / (i + 1))
        elif s.kind is SpaceKind.DP:
            vals = majorant(x).coords
        else:
            vals = None
        if vals is not None:
            exact = _exact_lp(vals, s.p)
            if exact is not None:
                return exact
        return norm_array(np.array([float(c) for c in absx]), s)
    return norm_array(np.abs(x.coords), s)


def _ladder_spaces(ladder: LadderSpec):
    kind = SpaceKind(ladder.family)
    return [SpaceSpec(kind, p=q) for q in ladder.exponents()]


def ladder_norms(x: Sequence, ladder: LadderSpec) -> list:
    """Norms of ``x`` at each rung ``p_1, ..., p_K`` of the ladder."""
    return [norm(x, sp) for sp in _ladder_spaces(ladder)]


def ratio_beta(x: Sequence, window: int) -> float:
    """Trailing-window estimate of ``lim |x_{n+1}| / |x_n|``.

    Averages the last ``window`` consecutive ratios. This is only an estimate
    of the limit; it never certifies that the limit exists.
    """
    N = len(x)
    if window < 1 or window + 1 > N:
        raise ValueError(f"window {window} needs at least {window + 1} coordinates, have {N}")
    absx = [float(v) for v in x.abs()]
    tail = absx[N - 1 - window:]
    if any(v == 0 for v in tail[:-1]):
        raise ValueError("zero coordinate inside the ratio window")
    ratios = [b / a for a, b in zip(tail, tail[1:])]
    return math.fsum(ratios) / window
