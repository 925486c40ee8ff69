import random
from fractions import Fraction

import pytest

from fbasis import (
    Complement,
    Constant,
    Finite,
    Frechet,
    GeometricIndex,
    Intersection,
    NotStationary,
    PowerLog,
    Residue,
    SetClass,
    SpikeSeq,
    Statistical,
    Summable,
    Union,
    classify_set,
    dominates,
    f_limit_scalar,
    trace_filter,
)
from fbasis.filters import FilterConstructionError, not_negligible, witness_library

from conftest import random_set_expr

HARMONIC = PowerLog(1, Fraction(-1))
GEOM2 = GeometricIndex(Fraction(2))


def all_filters():
    return [
        Frechet(),
        Statistical(),
        Summable(HARMONIC),
        Summable(PowerLog(1, Fraction(-1, 2))),
    ]


class TestConstruction:
    def test_summable_needs_divergence(self):
        with pytest.raises(FilterConstructionError):
            Summable(PowerLog(1, Fraction(-2)))

    def test_trace_rejects_negligible(self):
        with pytest.raises(NotStationary):
            trace_filter(Frechet(), Finite((1, 2)))
        with pytest.raises(NotStationary):
            trace_filter(Summable(HARMONIC), GEOM2)


class TestClassify:
    def test_spec_examples(self):
        assert classify_set(Residue(2, 0), Statistical()) == SetClass.STATIONARY
        assert classify_set(Complement(GEOM2), Summable(HARMONIC)) == SetClass.MEMBER
        assert classify_set(Finite((1, 2, 3)), Frechet()) == SetClass.NEGLIGIBLE

    def test_free_filters_kill_finite_sets(self):
        for F in all_filters():
            assert classify_set(Finite((1, 5, 7)), F) == SetClass.NEGLIGIBLE
            assert classify_set(CoFINITE, F) == SetClass.MEMBER

    def test_trichotomy_and_duality(self):
        rng = random.Random(11)
        decided = 0
        for _ in range(80):
            A = random_set_expr(rng)
            for F in all_filters():
                c = classify_set(A, F)
                cc = classify_set(Complement(A), F)
                if SetClass.INCONCLUSIVE in (c, cc):
                    continue
                decided += 1
                # the complement swaps member and negligible, fixes stationary
                assert (c == SetClass.MEMBER) == (cc == SetClass.NEGLIGIBLE)
                assert (c == SetClass.STATIONARY) == (cc == SetClass.STATIONARY)
        assert decided >= 200

    def test_filter_axioms_on_members(self):
        rng = random.Random(29)
        pairs = 0
        for _ in range(120):
            A = random_set_expr(rng)
            B = random_set_expr(rng)
            for F in all_filters():
                if (
                    classify_set(A, F) == SetClass.MEMBER
                    and classify_set(B, F) == SetClass.MEMBER
                ):
                    inter = classify_set(Intersection((A, B)), F)
                    if inter != SetClass.INCONCLUSIVE:
                        assert inter == SetClass.MEMBER
                        pairs += 1
                    sup = classify_set(Union((A, B)), F)
                    if sup != SetClass.INCONCLUSIVE:
                        assert sup == SetClass.MEMBER
        assert pairs >= 10


CoFINITE = Complement(Finite((1, 2)))


class TestLimits:
    def test_ordinary_convergence(self):
        v = f_limit_scalar(PowerLog(1, Fraction(-1)), Frechet(), 0)
        assert v.kind == "converges"

    def test_indicator_spike_under_summable(self):
        x = SpikeSeq(GEOM2, Constant(1))
        v = f_limit_scalar(x, Summable(HARMONIC), 0)
        assert v.kind == "converges"

    def test_indicator_fails_statistically(self):
        x = SpikeSeq(Residue(2, 0), Constant(1))
        v = f_limit_scalar(x, Statistical(), 0)
        assert v.kind == "does-not-converge"
        assert v.epsilon == pytest.approx(1.0)
        from fbasis import set_equal

        assert set_equal(v.witness, Residue(2, 0))

    def test_nonzero_target(self):
        v = f_limit_scalar(Constant(2), Frechet(), 2)
        assert v.kind == "converges"
        v = f_limit_scalar(Constant(2), Frechet(), 1)
        assert v.kind == "does-not-converge"

    def test_stationary_set_semantics(self):
        # convergence under the filter passes to traces on stationary sets
        x = SpikeSeq(GEOM2, Constant(1))
        base = Summable(HARMONIC)
        assert f_limit_scalar(x, base, 0).kind == "converges"
        carried = 0
        for I in witness_library():
            if classify_set(I, base) != SetClass.STATIONARY:
                continue
            tr = trace_filter(base, I)
            v = f_limit_scalar(x, tr, 0)
            if v.kind != "inconclusive":
                assert v.kind == "converges"
                carried += 1
        assert carried >= 1


class TestDominates:
    def test_frechet_bottom(self):
        assert dominates(Summable(HARMONIC), Frechet()).kind == "proved"
        assert dominates(Statistical(), Frechet()).kind == "proved"

    def test_summable_comparison(self):
        v = dominates(Summable(HARMONIC), Summable(PowerLog(1, Fraction(-1, 2))))
        assert v.kind == "proved"

    def test_frechet_does_not_dominate_statistical(self):
        v = dominates(Frechet(), Statistical())
        assert v.kind == "refuted"
        from fbasis import set_equal

        assert set_equal(v.witness, Complement(GEOM2))

    def test_reflexive_and_transitive(self):
        fs = all_filters()
        proved = {}
        for f1 in fs:
            for f2 in fs:
                proved[(f1, f2)] = dominates(f1, f2).kind == "proved"
        for f in fs:
            assert proved[(f, f)]
        for f1 in fs:
            for f2 in fs:
                for f3 in fs:
                    if proved[(f1, f2)] and proved[(f2, f3)]:
                        assert dominates(f1, f3).kind != "refuted"

    def test_trace_dominates_base(self):
        base = Statistical()
        tr = trace_filter(base, Residue(2, 0))
        assert dominates(tr, base).kind == "proved"


class TestTrace:
    def test_member_through_trace(self):
        tr = trace_filter(Statistical(), Residue(2, 0))
        assert classify_set(Residue(2, 0), tr) == SetClass.MEMBER
        assert classify_set(Residue(2, 1), tr) == SetClass.NEGLIGIBLE

    def test_trace_of_trace(self):
        inner = trace_filter(Statistical(), Residue(2, 0))
        outer = trace_filter(inner, Residue(4, 0))
        assert classify_set(Residue(4, 0), outer) == SetClass.MEMBER
        assert classify_set(Residue(4, 2), outer) == SetClass.NEGLIGIBLE
        assert dominates(outer, inner).kind == "proved"
        with pytest.raises(NotStationary):
            trace_filter(inner, Residue(2, 1))  # odd indices vanished already

    def test_not_negligible_wide_sense(self):
        F = Summable(HARMONIC)
        assert not_negligible(Residue(2, 0), F) is True
        assert not_negligible(GEOM2, F) is False
