"""Finite truncations of the sequence spaces and the tail operators.

The tail operator at stage n is the rank-structured projection

    T x = (x_1 - q b_1, ..., x_n - q b_n, 0, 0, ...),   q = x_{n+1} / b_{n+1},

the partial-sum projection of the rebuilt system v_k = b_1 e_1 + ... + b_k e_k.
Its norm is exact for p = 1 (column maximum) and p = 2 (closed form on
the squares); for general p it is computed by the stated optimization:
an outer golden-section search over the mass tau placed on coordinate
n+1 and an inner Lagrange-stationarity solve by monotone scalar
root-finding.  Every numeric norm report carries a certified lower
bound (an evaluated vector) and a certified upper bound
(Riesz-Thorin interpolation of the 1- and infinity-norms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .sequences import DomainError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_OUTER = 200
_MAX_INNER = 200


class DimensionMismatch(ValueError):
    pass


class ConvergenceFailure(RuntimeError):
    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (bracket {bracket[0]!r}..{bracket[1]!r})")
        self.bracket = bracket


@dataclass(frozen=True)
class SpaceKind:
    """An l_p space with an explicit truncation dimension."""

    p: object  # Fraction for exact kinds, float otherwise
    dim: int

    def __post_init__(self):
        p = self.p
        if isinstance(p, (int, Fraction)):
            p = Fraction(p)
        else:
            p = float(p)
        object.__setattr__(self, "p", p)
        if p < 1:
            raise DomainError("the exponent must satisfy p >= 1")
        if self.dim < 2:
            raise DomainError("truncation dimension must be at least 2")

    @property
    def p_float(self) -> float:
        return float(self.p)

    @property
    def is_l1(self) -> bool:
        return self.p == 1

    @property
    def is_l2(self) -> bool:
        return self.p == 2

    def to_text(self) -> str:
        if self.is_l1:
            return "l1"
        if self.is_l2:
            return "l2"
        p = self.p
        if isinstance(p, Fraction):
            return f"lp({p.numerator}/{p.denominator})" if p.denominator != 1 else f"lp({p.numerator})"
        return f"lp({p!r})"


def l1(dim: int = 64) -> SpaceKind:
    return SpaceKind(Fraction(1), dim)


def l2(dim: int = 64) -> SpaceKind:
    return SpaceKind(Fraction(2), dim)


def lp(p, dim: int = 64) -> SpaceKind:
    return SpaceKind(p, dim)


@dataclass(frozen=True)
class TailOp:
    """Stage-n tail operator, determined by the coefficients b_1..b_{n+1}."""

    stage: int
    b: tuple
    space: SpaceKind
    b_squared: Optional[tuple] = None  # exact squares when entries are irrational

    def __post_init__(self):
        if len(self.b) != self.stage + 1:
            raise DimensionMismatch(
                f"stage {self.stage} needs {self.stage + 1} coefficients, got {len(self.b)}"
            )
        b = tuple(Fraction(v) if isinstance(v, (int, Fraction)) else float(v) for v in self.b)
        object.__setattr__(self, "b", b)
        if any(float(v) <= 0 for v in b):
            raise DomainError("coefficients must be positive")
        if self.b_squared is not None:
            sq = tuple(Fraction(v) for v in self.b_squared)
            if len(sq) != self.stage + 1:
                raise DimensionMismatch("b_squared length mismatch")
            object.__setattr__(self, "b_squared", sq)
        if self.space.dim < self.stage + 1:
            raise DimensionMismatch("truncation dimension below stage + 1")

    # -- data views ---------------------------------------------------------

    def b_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.b], dtype=float)

    def squares(self) -> Optional[tuple]:
        if self.b_squared is not None:
            return self.b_squared
        if all(isinstance(v, Fraction) for v in self.b):
            return tuple(v * v for v in self.b)
        return None

    def dense_matrix(self, dim: Optional[int] = None) -> np.ndarray:
        dim = dim or self.space.dim
        if dim < self.stage + 1:
            raise DimensionMismatch("dense truncation below stage + 1")
        n = self.stage
        bf = self.b_floats()
        M = np.zeros((dim, dim))
        for j in range(n):
            M[j, j] = 1.0
        M[:n, n] = -bf[:n] / bf[n]
        return M


def apply(T: TailOp, x: Sequence) -> list:
    """Apply the tail operator; exact in rationals for rational input."""
    n = T.stage
    if len(x) < n + 1:
        raise DimensionMismatch(f"need at least {n + 1} coordinates, got {len(x)}")
    exact = all(isinstance(v, (int, Fraction)) for v in x) and all(
        isinstance(v, Fraction) for v in T.b
    )
    if exact:
        q = Fraction(x[n]) / T.b[n]
        out = [Fraction(x[i]) - q * T.b[i] for i in range(n)]
        zero = Fraction(0)
    else:
        q = float(x[n]) / float(T.b[n])
        out = [float(x[i]) - q * float(T.b[i]) for i in range(n)]
        zero = 0.0
    out.extend([zero] * (len(x) - n))
    return out


@dataclass(frozen=True)
class NormReport:
    value: float
    method: str  # ColumnMax | ClosedFormL2 | NumericOpt | BruteForce
    lower: float
    upper: float
    exact: Optional[Fraction] = None
    exact_square: Optional[Fraction] = None

    def __post_init__(self):
        if not (self.lower <= self.value * (1 + 1e-12) + 1e-300):
            raise ValueError("norm report lower bound above the value")
        if not (self.value <= self.upper * (1 + 1e-12) + 1e-300):
            raise ValueError("norm report value above the upper bound")


def _norms_1_inf(T: TailOp) -> tuple[float, float]:
    bf = T.b_floats()
    n = T.stage
    col = max(1.0, float(bf[:n].sum()) / float(bf[n]))
    row = 1.0 + float(bf[:n].max()) / float(bf[n]) if n else 1.0
    return col, row


def riesz_thorin_upper(T: TailOp, p: float) -> float:
    m1, minf = _norms_1_inf(T)
    return m1 ** (1.0 / p) * minf ** (1.0 - 1.0 / p)


def op_norm(T: TailOp) -> NormReport:
    """Norm of the tail operator in its space."""
    n = T.stage
    if T.space.is_l1:
        sq = all(isinstance(v, Fraction) for v in T.b)
        if sq:
            ratio = sum(T.b[:n], Fraction(0)) / T.b[n]
            value = max(Fraction(1), ratio)
            f = float(value)
            return NormReport(f, "ColumnMax", f, f, exact=value)
        bf = T.b_floats()
        f = max(1.0, float(bf[:n].sum() / bf[n]))
        return NormReport(f, "ColumnMax", f, f)
    if T.space.is_l2:
        squares = T.squares()
        if squares is not None:
            vsq = sum(squares[:n], Fraction(0))
            value_sq = 1 + vsq / squares[n]
            f = math.sqrt(float(value_sq))
            return NormReport(f, "ClosedFormL2", f, f, exact_square=value_sq)
        bf = T.b_floats()
        f = math.sqrt(1.0 + float((bf[:n] ** 2).sum()) / float(bf[n]) ** 2)
        return NormReport(f, "ClosedFormL2", f, f)
    return _op_norm_numeric(T)


def _op_norm_numeric(T: TailOp) -> NormReport:
    p = T.space.p_float
    n = T.stage
    bf = T.b_floats()
    u = bf[:n] / bf[n]

    def inner_value(tau: float) -> tuple[float, float]:
        """Best objective for fixed tau, via the stationarity equation."""
        if tau <= 0.0:
            return 1.0, 0.0
        if tau >= 1.0:
            return float((u ** p).sum() ** (1.0 / p)), math.inf
        s = 1.0 - tau ** p
        mu = _solve_stationarity(u, tau, p, s)
        x = tau * u / mu
        val = float(((x + tau * u) ** p).sum() ** (1.0 / p))
        return val, mu

    best_tau, best_val = 0.0, 1.0
    for tau in (0.0, 1.0):
        val, _ = inner_value(tau)
        if val > best_val:
            best_tau, best_val = tau, val
    lo, hi = 0.0, 1.0
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, _ = inner_value(c)
    fd, _ = inner_value(d)
    for _ in range(_MAX_OUTER):
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc, _ = inner_value(c)
            if fc > best_val:
                best_tau, best_val = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd, _ = inner_value(d)
            if fd > best_val:
                best_tau, best_val = d, fd
        if hi - lo < 1e-14:
            break
    # certify the winner by evaluating an explicit vector
    lower = _evaluate_candidate(T, best_tau, u, p)
    lower = max(lower, 1.0)
    value = max(best_val, lower)
    upper = riesz_thorin_upper(T, p)
    return NormReport(value, "NumericOpt", lower, max(upper, value))


def _solve_stationarity(u: np.ndarray, tau: float, p: float, s: float) -> float:
    """Monotone root of sum((tau*u/mu)**p) = s in mu."""
    target = s
    scale = float((u ** p).sum())

    def f(mu: float) -> float:
        return (tau / mu) ** p * scale - target

    lo = hi = (tau * scale ** (1.0 / p)) / max(target, 1e-300) ** (1.0 / p)
    lo /= 2.0
    hi *= 2.0
    it = 0
    while f(lo) < 0.0:
        lo /= 2.0
        it += 1
        if it > _MAX_INNER:
            raise ConvergenceFailure("stationarity bracketing failed", (lo, hi))
    it = 0
    while f(hi) > 0.0:
        hi *= 2.0
        it += 1
        if it > _MAX_INNER:
            raise ConvergenceFailure("stationarity bracketing failed", (lo, hi))
    for _ in range(_MAX_INNER):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def _evaluate_candidate(T: TailOp, tau: float, u: np.ndarray, p: float) -> float:
    """Norm ratio of the reconstructed optimizer, a certified lower bound."""
    n = T.stage
    if tau <= 0.0 or n == 0:
        x = np.zeros(n + 1)
        x[0 if n else n] = 1.0
    else:
        s = max(1.0 - tau ** p, 0.0)
        if s == 0.0:
            x = np.zeros(n + 1)
            x[n] = -1.0
        else:
            mu = _solve_stationarity(u, tau, p, s)
            x = np.concatenate([tau * u / mu, [-tau]])
    y = np.array(apply(T, list(x)), dtype=float)
    nx = float((np.abs(x) ** p).sum() ** (1.0 / p))
    ny = float((np.abs(y) ** p).sum() ** (1.0 / p))
    return ny / nx if nx > 0 else 0.0


def op_norm_bruteforce(T: TailOp, budget: int = 200, seed: int = 0) -> NormReport:
    """Certified lower bound: extreme directions, seeded random search,
    and coordinate ascent.  Exact for p = 1, where a basis direction
    attains the norm."""
    p = T.space.p_float
    n = T.stage
    dim = n + 1
    if T.space.is_l1 and all(isinstance(v, Fraction) for v in T.b):
        ratio = sum(T.b[:n], Fraction(0)) / T.b[n]
        value = max(Fraction(1), ratio)
        f = float(value)
        return NormReport(f, "BruteForce", f, f, exact=value)

    def ratio_of(x: np.ndarray) -> float:
        y = np.array(apply(T, list(x)), dtype=float)
        nx = float((np.abs(x) ** p).sum() ** (1.0 / p))
        if nx == 0.0:
            return 0.0
        return float((np.abs(y) ** p).sum() ** (1.0 / p)) / nx

    best = 0.0
    best_x = None
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        r = ratio_of(e)
        if r > best:
            best, best_x = r, e
    rng = np.random.default_rng(seed)
    for _ in range(max(0, budget)):
        x = rng.standard_normal(dim)
        r = ratio_of(x)
        if r > best:
            best, best_x = r, x
    if best_x is not None:
        x = best_x.astype(float)
        for step in (0.3, 0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6):
            improved = True
            while improved:
                improved = False
                for i in range(dim):
                    for sgn in (1.0, -1.0):
                        trial = x.copy()
                        trial[i] += sgn * step * max(1.0, abs(trial[i]))
                        r = ratio_of(trial)
                        if r > best:
                            best, x, improved = r, trial, True
    upper = riesz_thorin_upper(T, p) if p > 1 else max(1.0, float(T.b_floats()[:n].sum() / float(T.b[n])))
    return NormReport(best, "BruteForce", best, max(upper, best))


# ---------------------------------------------------------------------------
# prescribing the norm


def solve_b_next(b: Sequence, a_target, space: SpaceKind):
    """The coefficient b_{n+1} giving the stage-n operator norm a_target.

    Exact for p = 1 and (on squares) p = 2; monotone bisection to
    relative tolerance 1e-12 otherwise.
    """
    if float(a_target) <= 1:
        raise DomainError("the target norm must exceed 1")
    b = tuple(Fraction(v) if isinstance(v, (int, Fraction)) else float(v) for v in b)
    if space.is_l1:
        if all(isinstance(v, Fraction) for v in b) and isinstance(a_target, (int, Fraction)):
            return sum(b, Fraction(0)) / Fraction(a_target)
        return float(sum(float(v) for v in b)) / float(a_target)
    if space.is_l2:
        if all(isinstance(v, Fraction) for v in b) and isinstance(a_target, (int, Fraction)):
            sq = solve_next_square(tuple(v * v for v in b), Fraction(a_target) ** 2)
            root = _sqrt_fraction(sq)
            return root if root is not None else math.sqrt(float(sq))
        total = sum(float(v) ** 2 for v in b)
        return math.sqrt(total / (float(a_target) ** 2 - 1.0))
    return _solve_bisection(b, float(a_target), space)


def solve_next_square(b_squared: Sequence[Fraction], a_target_squared: Fraction) -> Fraction:
    """Exact next square for the Hilbert-space recurrence."""
    a2 = Fraction(a_target_squared)
    if a2 <= 1:
        raise DomainError("the squared target must exceed 1")
    return sum((Fraction(v) for v in b_squared), Fraction(0)) / (a2 - 1)


def _sqrt_fraction(x: Fraction) -> Optional[Fraction]:
    from .sequences import exact_root

    return exact_root(Fraction(x), 2)


def _solve_bisection(b: tuple, target: float, space: SpaceKind) -> float:
    n = len(b)

    def norm_at(t: float) -> float:
        return op_norm(TailOp(n, tuple(b) + (t,), space)).value

    # closed-form guess from the stationarity structure, then bracket
    p = space.p_float
    q = p / (p - 1.0)
    vnorm = float(sum(float(v) ** p for v in b) ** (1.0 / p))
    guess = vnorm / max((target ** q - 1.0) ** (1.0 / q), 1e-300)
    lo, hi = guess / 2.0, guess * 2.0
    it = 0
    while norm_at(lo) < target:
        lo /= 2.0
        it += 1
        if it > _MAX_INNER:
            raise ConvergenceFailure("bisection bracketing failed low", (lo, hi))
    it = 0
    while norm_at(hi) > target:
        hi *= 2.0
        it += 1
        if it > _MAX_INNER:
            raise ConvergenceFailure("bisection bracketing failed high", (lo, hi))
    f_lo, f_hi = norm_at(lo), norm_at(hi)
    if not f_lo >= f_hi:
        raise ConvergenceFailure("norm not decreasing across the bracket", (lo, hi))
    for _ in range(_MAX_INNER):
        mid = 0.5 * (lo + hi)
        if norm_at(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            return 0.5 * (lo + hi)
    raise ConvergenceFailure("bisection did not reach tolerance", (lo, hi))


# ---------------------------------------------------------------------------
# remainders


def remainder_norm(T: TailOp, dim: Optional[int] = None) -> NormReport:
    """Norm of Id - T on the truncation (needs dim > stage + 1).

    The remainder sends x to x_{n+1} * w plus the untouched coordinates
    past n+1, where w stacks b_i / b_{n+1} over the first n slots and 1
    at slot n+1; its norm is max(1, ||w||_p).
    """
    dim = dim or T.space.dim
    n = T.stage
    if dim <= n + 1:
        raise DimensionMismatch("remainder needs the truncation to extend past stage + 1")
    if T.space.is_l1:
        if all(isinstance(v, Fraction) for v in T.b):
            value = 1 + sum(T.b[:n], Fraction(0)) / T.b[n]
            f = float(value)
            return NormReport(f, "ColumnMax", f, f, exact=value)
        bf = T.b_floats()
        f = 1.0 + float(bf[:n].sum() / bf[n])
        return NormReport(f, "ColumnMax", f, f)
    if T.space.is_l2:
        squares = T.squares()
        if squares is not None:
            vsq = sum(squares[:n], Fraction(0))
            value_sq = 1 + vsq / squares[n]
            f = math.sqrt(float(value_sq))
            return NormReport(f, "ClosedFormL2", f, f, exact_square=value_sq)
        bf = T.b_floats()
        f = math.sqrt(1.0 + float((bf[:n] ** 2).sum()) / float(bf[n]) ** 2)
        return NormReport(f, "ClosedFormL2", f, f)
    p = T.space.p_float
    bf = T.b_floats()
    w = np.concatenate([bf[:n] / bf[n], [1.0]])
    val = max(1.0, float((w ** p).sum() ** (1.0 / p)))
    return NormReport(val, "NumericOpt", val, val)


def remainder_dense_matrix(T: TailOp, dim: Optional[int] = None) -> np.ndarray:
    dim = dim or T.space.dim
    return np.eye(dim) - T.dense_matrix(dim)
