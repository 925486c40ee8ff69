"""Free filters on the positive integers as symbolic objects.

Four kinds are supported: the Frechet filter (cofinite sets), the
statistical filter (ideal of density-zero sets), summable filters built
from divergent nonnegative weights, and traces of a filter on one of
its stationary sets.

``classify_set`` places a decidable set in exactly one of three classes:
member of the filter, negligible (member of the ideal), or stationary
together with its complement.  Sets the decision procedures cannot
settle come back as inconclusive rather than misclassified; verdicts
about limits and domination follow the same proved / refuted /
inconclusive discipline, with refutations carrying explicit witnesses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union as TUnion

from .natset import (
    Complement,
    GeometricIndex,
    NATURALS,
    Residue,
    SetExpr,
    Union,
    canonicalize,
    is_certainly_finite,
    is_certainly_infinite,
    natural_density,
    weight_sum,
)
from .sequences import (
    ScalarSeq,
    SpikeSeq,
    threshold_ge,
)
from .series import sum_inverse_p_verdict  # noqa: F401  (re-exported for callers)


class FilterConstructionError(ValueError):
    """A filter description violated its invariants."""


class NotStationary(ValueError):
    """Trace construction over a negligible index set."""


class SetClass(enum.Enum):
    MEMBER = "member"
    NEGLIGIBLE = "negligible"
    STATIONARY = "stationary"
    INCONCLUSIVE = "inconclusive"


class FilterSpec:
    """Base class for filter descriptions; all filters here are free."""

    __slots__ = ()

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:  # pragma: no cover
        return self.to_text()


@dataclass(frozen=True)
class Frechet(FilterSpec):
    def to_text(self):
        return "frechet"


@dataclass(frozen=True)
class Statistical(FilterSpec):
    def to_text(self):
        return "statistical"


@dataclass(frozen=True)
class Summable(FilterSpec):
    """Members are the sets whose complements have finite weighted sum."""

    weights: ScalarSeq

    def __post_init__(self):
        v = weight_sum(NATURALS, self.weights)
        if v.kind != "diverges":
            raise FilterConstructionError(
                "summable filters need weights with a divergent total sum"
            )

    def to_text(self):
        return f"summable({self.weights.to_text()})"


@dataclass(frozen=True)
class Trace(FilterSpec):
    """The filter generated by intersections of base members with one
    base-stationary set."""

    base: FilterSpec
    index_set: SetExpr

    def __post_init__(self):
        cls = classify_set(self.index_set, self.base)
        if cls == SetClass.NEGLIGIBLE:
            raise NotStationary("the index set is negligible for the base filter")
        if cls == SetClass.INCONCLUSIVE:
            raise NotStationary("could not verify the index set is stationary")

    def to_text(self):
        return f"trace({self.base.to_text()}; {self.index_set.to_text()})"


def trace_filter(base: FilterSpec, index_set: SetExpr) -> Trace:
    return Trace(base, index_set)


# ---------------------------------------------------------------------------
# classification


def classify_set(A: SetExpr, F: FilterSpec) -> SetClass:
    if isinstance(F, Frechet):
        return _classify_frechet(A)
    if isinstance(F, Statistical):
        return _classify_statistical(A)
    if isinstance(F, Summable):
        return _classify_summable(A, F.weights)
    if isinstance(F, Trace):
        return _classify_trace(A, F)
    raise TypeError(f"unknown filter kind {type(F).__name__}")


def _classify_frechet(A: SetExpr) -> SetClass:
    comp = Complement(A)
    if is_certainly_finite(comp):
        return SetClass.MEMBER
    if is_certainly_finite(A):
        return SetClass.NEGLIGIBLE
    if is_certainly_infinite(A) and is_certainly_infinite(comp):
        return SetClass.STATIONARY
    return SetClass.INCONCLUSIVE


def _classify_statistical(A: SetExpr) -> SetClass:
    d = natural_density(A)
    if d.is_exact:
        if d.value == 0:
            return SetClass.NEGLIGIBLE
        if d.value == 1:
            return SetClass.MEMBER
        return SetClass.STATIONARY
    if d.kind == "bounds":
        if d.upper == 0:
            return SetClass.NEGLIGIBLE
        if d.lower == 1:
            return SetClass.MEMBER
        if d.lower > 0 and d.upper < 1:
            return SetClass.STATIONARY
    return SetClass.INCONCLUSIVE


def _classify_summable(A: SetExpr, weights: ScalarSeq) -> SetClass:
    on_complement = weight_sum(Complement(A), weights)
    if on_complement.kind == "converges":
        return SetClass.MEMBER
    on_set = weight_sum(A, weights)
    if on_set.kind == "converges":
        return SetClass.NEGLIGIBLE
    if on_set.kind == "diverges" and on_complement.kind == "diverges":
        return SetClass.STATIONARY
    return SetClass.INCONCLUSIVE


def _classify_trace(A: SetExpr, F: Trace) -> SetClass:
    # A is a member iff A contains (B and I) for a base member B, which
    # happens iff A union the complement of I is itself a base member.
    widened_cls = classify_set(canonicalize(Union((A, Complement(F.index_set)))), F.base)
    if widened_cls == SetClass.MEMBER:
        return SetClass.MEMBER
    restricted = canonicalize(_intersect(A, F.index_set))
    inner = classify_set(restricted, F.base)
    if inner == SetClass.NEGLIGIBLE:
        return SetClass.NEGLIGIBLE
    if inner == SetClass.INCONCLUSIVE or widened_cls == SetClass.INCONCLUSIVE:
        return SetClass.INCONCLUSIVE
    return SetClass.STATIONARY


def _intersect(a: SetExpr, b: SetExpr) -> SetExpr:
    from .natset import Intersection

    return Intersection((a, b))


def not_negligible(A: SetExpr, F: FilterSpec) -> Optional[bool]:
    """Whether A is stationary in the wide sense (meets every member).

    For summable filters this is exactly divergence of the weighted sum
    over A, which is decidable in cases where the three-way
    classification is not.
    """
    cls = classify_set(A, F)
    if cls in (SetClass.MEMBER, SetClass.STATIONARY):
        return True
    if cls == SetClass.NEGLIGIBLE:
        return False
    if isinstance(F, Summable):
        v = weight_sum(A, F.weights)
        if v.kind == "diverges":
            return True
        if v.kind == "converges":
            return False
    if isinstance(F, Frechet):
        if is_certainly_infinite(A):
            return True
        if is_certainly_finite(A):
            return False
    return None


# ---------------------------------------------------------------------------
# filter limits of scalar sequences


@dataclass(frozen=True)
class LimitVerdict:
    kind: str  # "converges" | "does-not-converge" | "inconclusive"
    value: object = None
    epsilon: Optional[float] = None
    witness: Optional[SetExpr] = None
    reason: str = ""

    @staticmethod
    def converges_to(value) -> "LimitVerdict":
        return LimitVerdict("converges", value=value)

    @staticmethod
    def does_not_converge(epsilon, witness) -> "LimitVerdict":
        return LimitVerdict("does-not-converge", epsilon=epsilon, witness=witness)

    @staticmethod
    def inconclusive(reason: str) -> "LimitVerdict":
        return LimitVerdict("inconclusive", reason=reason)


DEFAULT_EPS_SCHEDULE = tuple(Fraction(1, 2 ** k) for k in range(0, 21))

SignedSeq = TUnion[ScalarSeq, SpikeSeq]


def exceptional_set(x: SignedSeq, target, epsilon, horizon: int = 10 ** 6) -> Optional[SetExpr]:
    """{n : |x(n) - target| >= epsilon} as a SetExpr, when derivable."""
    t = float(target)
    eps = float(epsilon)
    if isinstance(x, SpikeSeq):
        off_support_bad = abs(0.0 - t) >= eps
        on_support = _scalar_exceptional(x.amplitude, t, eps, horizon)
        if on_support is None:
            return None
        inside = _intersect(x.support, on_support)
        if off_support_bad:
            return canonicalize(Union((Complement(x.support), inside)))
        return canonicalize(inside)
    return _scalar_exceptional(x, t, eps, horizon)


def _scalar_exceptional(x: ScalarSeq, t: float, eps: float, horizon: int) -> Optional[SetExpr]:
    high = threshold_ge(x, t + eps, horizon)
    if high is None:
        return None
    if t - eps < 0:
        # positive sequences never dip to t - eps
        return canonicalize(high)
    low_strict = threshold_ge(x, math.nextafter(t - eps, math.inf), horizon)
    if low_strict is None:
        return None
    return canonicalize(Union((high, Complement(low_strict))))


def exceptional_certainly_finite(x: SignedSeq, target, epsilon) -> bool:
    """Whether {n : |x(n) - target| >= epsilon} is finite on limit grounds.

    A sequence whose certified limit lies strictly inside the epsilon
    band leaves it only finitely often; no crossing location is needed.
    """
    from .sequences import limit_value

    t = float(target)
    eps = float(epsilon)
    if isinstance(x, SpikeSeq):
        if abs(t) >= eps:
            return False  # off-support indices are all exceptional
        lim = limit_value(x.amplitude)
        return lim is not None and math.isfinite(lim) and abs(lim - t) < eps
    lim = limit_value(x)
    return lim is not None and math.isfinite(lim) and abs(lim - t) < eps


def f_limit_scalar(
    x: SignedSeq,
    F: FilterSpec,
    target,
    eps_schedule=DEFAULT_EPS_SCHEDULE,
    horizon: int = 10 ** 6,
) -> LimitVerdict:
    """Filter limit verdict via exceptional-set classification.

    Convergence needs every scheduled exceptional set to classify as
    negligible; a stationary or member exceptional set at some epsilon
    refutes convergence with that witness.
    """
    any_unknown = False
    for eps in eps_schedule:
        E = exceptional_set(x, target, eps, horizon)
        if E is None:
            if not exceptional_certainly_finite(x, target, eps):
                any_unknown = True
            continue
        cls = classify_set(E, F)
        if cls in (SetClass.MEMBER, SetClass.STATIONARY):
            return LimitVerdict.does_not_converge(float(eps), E)
        if cls == SetClass.INCONCLUSIVE:
            wide = not_negligible(E, F)
            if wide is True:
                return LimitVerdict.does_not_converge(float(eps), E)
            if wide is None:
                any_unknown = True
    if any_unknown:
        return LimitVerdict.inconclusive("some exceptional sets were undecidable")
    return LimitVerdict.converges_to(target)


# ---------------------------------------------------------------------------
# domination


@dataclass(frozen=True)
class DominationVerdict:
    kind: str  # "proved" | "refuted" | "inconclusive"
    rule: str = ""
    witness: Optional[SetExpr] = None

    @staticmethod
    def proved(rule: str) -> "DominationVerdict":
        return DominationVerdict("proved", rule=rule)

    @staticmethod
    def refuted(witness: SetExpr) -> "DominationVerdict":
        return DominationVerdict("refuted", witness=witness)

    @staticmethod
    def inconclusive() -> "DominationVerdict":
        return DominationVerdict("inconclusive")


def witness_library() -> list[SetExpr]:
    """Deterministic library of structured refutation candidates."""
    lib: list[SetExpr] = [
        Complement(GeometricIndex(Fraction(2))),
        Complement(GeometricIndex(Fraction(3))),
        Residue(2, 0),
        Residue(2, 1),
        Residue(3, 0),
        Residue(3, 1),
        Residue(4, 0),
        GeometricIndex(Fraction(2)),
        GeometricIndex(Fraction(3)),
        Complement(Residue(2, 0)),
        Complement(Residue(3, 0)),
        Union((Residue(4, 0), GeometricIndex(Fraction(2)))),
    ]
    return lib


def dominates(F1: FilterSpec, F2: FilterSpec) -> DominationVerdict:
    """Whether every member of F2 is a member of F1."""
    if F1 == F2:
        return DominationVerdict.proved("identical filters")
    if isinstance(F2, Frechet):
        return DominationVerdict.proved("every free filter dominates Frechet")
    if isinstance(F1, Trace) and F1.base == F2:
        return DominationVerdict.proved("a trace filter dominates its base")
    if isinstance(F1, Summable) and isinstance(F2, Summable):
        from .sequences import compare_pointwise

        cmp = compare_pointwise(F1.weights, F2.weights)
        if cmp is True:
            return DominationVerdict.proved(
                "weights dominated termwise, so small complements stay small"
            )
    for A in witness_library():
        if classify_set(A, F2) != SetClass.MEMBER:
            continue
        c1 = classify_set(A, F1)
        if c1 in (SetClass.NEGLIGIBLE, SetClass.STATIONARY):
            return DominationVerdict.refuted(A)
    return DominationVerdict.inconclusive()
