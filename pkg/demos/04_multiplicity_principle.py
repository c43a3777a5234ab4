"""
Two families, one ideal
=======================

Landscapes of NP and RDT tests are ordered by selectivity and power. The two
families never dominate each other, yet they share the same single upper
bound: the oracle. A small hand-built preorder shows the check on its own.
"""

from mpdetect import FinitePreorder, build_landscape_abstraction, check_mp, upper_bounds

# a top element with two incomparable elements from each family below it
P = FinitePreorder.generated_by(
    ["a1", "a2", "b1", "b2", "top"],
    [("a1", "top"), ("a2", "top"), ("b1", "top"), ("b2", "top")],
)
print("upper bounds of {a1, a2}:", sorted(upper_bounds(P, ["a1", "a2"])))
print("holds:", check_mp(P, ["a1", "a2"], ["b1", "b2"]).holds)

# the detector landscapes on a grid of sample sizes and interference levels
abstraction = build_landscape_abstraction(0.05, 0.25, (4, 16, 64, 256), (0.0, 0.1, 0.2))
print(abstraction.verdict_json())

# with tau = 0 the RDT selectivity collapses to that of NP and the check fails
degenerate = build_landscape_abstraction(0.05, 0.0, (4, 16), (0.0,))
verdict = degenerate.check()
print("tau = 0:", verdict.holds, verdict.failure_reason)
