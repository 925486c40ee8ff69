"""A system that is a filter basis but not an ordinary one.

With unbounded targets a_n and the summable filter of harmonic weights,
the defect terms of the rebuilt partial sums blow up along the powers
of two.  That set is negligible for the filter (its harmonic mass is
finite), so filter convergence survives, while ordinary convergence
fails on the same vector.
"""

from fractions import Fraction

from fbasis import (
    ExplicitPrefix,
    Frechet,
    GeometricIndex,
    PowerLog,
    Shifted,
    Spike,
    Summable,
    build_basis,
    convergence_demo,
    l1,
)

# targets 2, 2, 3, 4, 5, ... (strictly above 1, eventually linear)
targets = ExplicitPrefix((2,), PowerLog(1, Fraction(1)))
filt = Summable(PowerLog(1, Fraction(-1)))

system = build_basis(targets, l1(64), filt, n_max=12)
print("stage norms:", [float(r.value) for r in system.norm_reports])

# the test vector has spikes just after each power of two, with slowly
# decaying amplitudes
spike = Spike(
    Shifted(GeometricIndex(Fraction(2)), 1),
    PowerLog(1, Fraction(0), Fraction(-2)),
)

report = convergence_demo(system, spike)
print("\nunder", filt.to_text(), "->", report.verdict.kind)
for entry in report.entries[:4]:
    print(f"  eps={entry.epsilon}: exceptional set inside {entry.over_set} "
          f"[{entry.classification}]")

ordinary = convergence_demo(system, spike, under=Frechet())
print("\nunder frechet ->", ordinary.verdict.kind,
      "at eps =", ordinary.verdict.epsilon)
print("witness:", ordinary.verdict.witness.to_text())
print("\nstage defect norms:", [round(d, 4) for d in report.stage_defects])
print(report.caveat)
