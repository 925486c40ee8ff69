"""Separators and cluster witnesses for diagonal functional systems.

For a diagonal system a_n e*_n the two regimes are decided by the
convergence of sum a_n**(-p):

* convergent: the vector with coordinates (1 + margin) / a_n separates
  the system from zero; |a_n x_n| = 1 + margin is an algebraic identity
  of the emitted spec, and the norm bound comes straight from the
  certified sum bound;
* divergent: zero is a cluster point, and for any finite collection of
  test vectors an explicit index m with max_k |a_m (x_k)_m| < 1 can be
  searched; the weighted-average profile shows the quantitative decay
  behind that search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .natset import NATURALS
from .lp_operators import TailOp, op_norm
from .sequences import (
    DomainError,
    ScalarSeq,
    eval_at,
    seq_mul,
    seq_pow,
    seq_scale,
    tail_form,
)
from .series import sum_inverse_p_verdict
from .vectors import TestVector


class NotSeparable(ValueError):
    """The inverse-power sum diverges, so acceptability holds instead."""


@dataclass(frozen=True)
class SeparatorSpec:
    dual_kind: str  # "linf-diagonal" | "l2-diagonal"
    margin: float
    vector: ScalarSeq  # coordinates (1 + margin) / a_n
    norm_bound: float  # certified bound for ||x||_1 or ||h||_2**2
    identity_constant: float  # the common value of |a_n x_n|
    identity_exact: bool  # verified symbolically on the family


def plank_separator(a: ScalarSeq, dual_kind: str, margin) -> SeparatorSpec:
    """Separating vector when the relevant inverse sum converges."""
    margin = float(margin)
    if margin <= 0:
        raise DomainError("the margin must be positive")
    if dual_kind not in ("linf-diagonal", "l2-diagonal"):
        raise DomainError(f"unknown dual kind {dual_kind!r}")
    p = 1 if dual_kind == "linf-diagonal" else 2
    verdict = sum_inverse_p_verdict(a, p, NATURALS)
    if verdict.kind != "converges":
        raise NotSeparable(
            f"sum of a**(-{p}) does not converge; the sequence is acceptable"
        )
    scale = Fraction(1 + Fraction(margin).limit_denominator(10 ** 9))
    vector = seq_scale(seq_pow(a, -1), scale)
    if p == 1:
        bound = float(scale) * float(verdict.bound)
    else:
        bound = float(scale) ** 2 * float(verdict.bound)
    exact = _product_is_constant(a, vector, float(scale))
    return SeparatorSpec(
        dual_kind=dual_kind,
        margin=margin,
        vector=vector,
        norm_bound=bound,
        identity_constant=float(scale),
        identity_exact=exact,
    )


def _product_is_constant(a: ScalarSeq, v: ScalarSeq, constant: float) -> bool:
    prod = seq_mul(a, v)
    if prod is None:
        return False
    f = tail_form(prod)
    if f is None or f.beta != 0 or f.gamma != 0:
        return False
    if abs(float(f.c) - constant) > 1e-12 * constant:
        return False
    return all(abs(float(v) - constant) <= 1e-12 * constant for _, v in f.head)


@dataclass(frozen=True)
class ClusterWitness:
    index: int
    maxima: tuple  # |a_m (x_k)_m| at the witness index, per test vector


@dataclass(frozen=True)
class ClusterNotFound:
    horizon: int
    running_min: float
    at_index: int


def cluster_witness(
    a: ScalarSeq,
    p_dual,
    xs: Sequence[TestVector],
    horizon: int = 10 ** 6,
):
    """Smallest m <= horizon with max_k |a_m (x_k)_m| < 1.

    Existence is guaranteed in the divergent regime (sum of a**(-p)
    infinite); a miss at desk scale is reported as not-found with the
    running minimum, never treated as a refutation.  In the separator
    regime the search simply never succeeds.
    """
    from .sequences import eval_vector
    from .vectors import coordinate_vector

    if Fraction(p_dual) < 1:
        raise DomainError("the dual exponent must satisfy p >= 1")
    best = math.inf
    best_at = 0
    chunk = 1 << 16
    lo = 1
    while lo <= horizon:
        hi = min(horizon, lo + chunk - 1)
        avals = eval_vector(a, hi)[lo - 1 : hi]
        worst = np.zeros(hi - lo + 1)
        per_vec = []
        for x in xs:
            vals = np.abs(coordinate_vector(x, hi)[lo - 1 : hi]) * avals
            per_vec.append(vals)
            worst = np.maximum(worst, vals)
        idx = np.nonzero(worst < 1.0)[0]
        if idx.size:
            m = lo + int(idx[0])
            maxima = tuple(float(v[int(idx[0])]) for v in per_vec)
            return ClusterWitness(index=m, maxima=maxima)
        j = int(np.argmin(worst))
        if float(worst[j]) < best:
            best, best_at = float(worst[j]), lo + j
        lo = hi + 1
    return ClusterNotFound(horizon=horizon, running_min=best, at_index=best_at)


# ---------------------------------------------------------------------------
# the averaging profile


@dataclass(frozen=True)
class ProfileRow:
    n: int
    average: float  # A(n): weighted average of sum_k |a_m (x_k)_m|
    bound: float  # B(n): sum_k ||x_k||_1 / partial sum of a**-1


def lemma1_profile(
    a: ScalarSeq,
    xs: Sequence[TestVector],
    grid: Sequence[int],
) -> list[ProfileRow]:
    """Decay table A(n) <= B(n) behind the cluster-point argument.

    With weights a_m**-1 normalized over m <= n, the weighted average of
    sum_k |a_m (x_k)_m| collapses to sum_k sum_{m<=n} |(x_k)_m| over the
    partial sum of a**-1, which the absolute-sum bound pushes below
    B(n) -> 0.
    """
    if sum_inverse_p_verdict(a, 1, NATURALS).kind != "diverges":
        raise DomainError("the averaging profile needs a divergent inverse sum")
    from .sequences import eval_vector
    from .vectors import coordinate_vector

    norms = [float(x.norm_upper(1)) for x in xs]
    rows = []
    grid = sorted(set(int(n) for n in grid))
    top = grid[-1]
    inv = 1.0 / eval_vector(a, top)
    coords = np.zeros(top)
    for x in xs:
        coords += np.abs(coordinate_vector(x, top))
    inv_cum = np.cumsum(inv)
    coord_cum = np.cumsum(coords)
    for n in grid:
        s_n = float(inv_cum[n - 1])
        avg = float(coord_cum[n - 1]) / s_n
        bound = sum(norms) / s_n
        rows.append(ProfileRow(n=n, average=avg, bound=bound))
    return rows


# ---------------------------------------------------------------------------
# functionals as rank-one operators and back


@dataclass(frozen=True)
class RankOneOp:
    index: int
    norm: float
    anchor: int

    def to_row(self):
        return {"n": self.index, "norm": self.norm, "anchor": self.anchor}


def lift_functionals_to_operators(
    a: ScalarSeq, anchor: int, count: int
) -> list[RankOneOp]:
    """Diagonal functionals a_n e*_n lifted to rank-one operators
    x -> a_n e*_n(x) e_anchor; the norm is the product of the factor
    norms, hence exactly a_n."""
    if anchor < 1:
        raise DomainError("anchor index starts at 1")
    return [RankOneOp(n, float(eval_at(a, n)), anchor) for n in range(1, count + 1)]


@dataclass(frozen=True)
class ExtractedFunctional:
    stage: int
    coefficients: tuple  # x*(e_j) for j below the truncation
    norm: float
    operator_norm: float
    factor_bound: float  # sup over samples of |x*(x)| / ||T x||


def extract_norming_functionals(
    stages: Sequence[TailOp],
    samples: int = 100,
    seed: int = 0,
) -> list[ExtractedFunctional]:
    """Reverse direction: from each tail operator, a functional with the
    same norm, satisfying |x*(x)| <= 2 ||T x|| on sampled vectors.

    The functional is T* applied to a norming (or near-norming) dual
    vector of the operator's best output direction, rescaled to have
    norm exactly ||T||.
    """
    rng = np.random.default_rng(seed)
    out = []
    for T in stages:
        p = T.space.p_float
        n = T.stage
        dim = n + 1
        rep = op_norm(T)
        x_best = _norming_input(T)
        y = np.array([float(v) for v in _apply_np(T, x_best)])
        ystar = _dual_norming(y, p)
        # coefficients of T* ystar: column dot products
        M = T.dense_matrix(dim)[:dim, :dim]
        coeffs = ystar @ M
        q = p / (p - 1.0) if p > 1 else math.inf
        nrm = _lp_norm(coeffs, q)
        if nrm <= 0:
            raise ArithmeticError("extracted functional vanished")
        coeffs = coeffs * (rep.value / nrm)
        factor = 0.0
        for _ in range(samples):
            x = rng.standard_normal(dim)
            tx = np.array([float(v) for v in _apply_np(T, x)])
            denom = _lp_norm(tx, p)
            if denom <= 1e-12:
                continue
            factor = max(factor, abs(float(coeffs @ x)) / denom)
        out.append(
            ExtractedFunctional(
                stage=n,
                coefficients=tuple(float(c) for c in coeffs),
                norm=rep.value,
                operator_norm=rep.value,
                factor_bound=factor,
            )
        )
    return out


def _apply_np(T: TailOp, x):
    from .lp_operators import apply as _apply

    return _apply(T, list(np.asarray(x, dtype=float)))


def _lp_norm(v: np.ndarray, p: float) -> float:
    v = np.abs(np.asarray(v, dtype=float))
    if math.isinf(p):
        return float(v.max()) if v.size else 0.0
    return float((v ** p).sum() ** (1.0 / p))


def _norming_input(T: TailOp) -> np.ndarray:
    """A vector achieving (or nearly achieving) the operator norm."""
    p = T.space.p_float
    n = T.stage
    dim = n + 1
    bf = T.b_floats()
    if T.space.is_l1:
        # the norm is attained at a basis column
        ratio = float(bf[:n].sum() / bf[n])
        e = np.zeros(dim)
        e[n if ratio >= 1.0 else 0] = 1.0
        return e
    u = bf[:n] / bf[n]
    q = p / (p - 1.0)
    U = _lp_norm(u, p)
    V = U ** q
    tau = (V / (1.0 + V)) ** (1.0 / p)
    s = max(1.0 - tau ** p, 0.0)
    x = np.zeros(dim)
    if s > 0 and U > 0:
        x[:n] = tau * u * (s ** (1.0 / p) / (tau * U))
    x[n] = -tau
    return x


def _dual_norming(y: np.ndarray, p: float) -> np.ndarray:
    """A dual unit vector y* with y*(y) = ||y||_p."""
    y = np.asarray(y, dtype=float)
    if p == 1:
        return np.sign(y)
    ny = _lp_norm(y, p)
    if ny == 0:
        out = np.zeros_like(y)
        out[0] = 1.0
        return out
    return np.sign(y) * (np.abs(y) / ny) ** (p - 1.0)
