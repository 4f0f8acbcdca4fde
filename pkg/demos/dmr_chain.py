"""The d-to-1 preprocessing chain with its exact parameter cascade.

The cascade is echoed for a hardness-regime parameter choice (where the
stage sizes are astronomically unbuildable), and the chain itself runs on a
desk-scale seed with a classical lift tracked and re-verified at every
stage: compatibility 2k through the first two stages, k after the collapse.
"""

from fractions import Fraction

from chromagap import dmr, qop
from chromagap.csp import CspInstance

print("parameter cascade at eps=1/2, t=2, d=2 (echo only):")
for key, value in dmr.pipeline_parameters(Fraction(1, 2), 2, 2).items():
    print(f"  {key} = {value}")

pred = {("a0", "b0"), ("a1", "b0"), ("a2", "b1"), ("a3", "b1")}
seed = CspInstance(
    ["p", "q", "y"],
    ["a0", "a1", "a2", "a3", "b0", "b1"],
    [(("p", "y"), pred), (("q", "y"), pred)],
    [Fraction(1, 2), Fraction(1, 2)],
)
lift = qop.lift_classical({"p": "a0", "q": "a1", "y": "b0"})

print("\ndesk-scale run at eps=12, t=1 (the cascade gives ell=m=1):")
final, report, tracked = dmr.dmr_pipeline(seed, Fraction(12), 2, 1, lift)
print(report.summary())
print("final instance:", final)
