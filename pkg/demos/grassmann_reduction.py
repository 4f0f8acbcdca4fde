"""From the magic square to a 24-vertex 2-to-2 instance, with the strategy
carried along and verified exactly.

The first stage pairs every (question tuple, plane) vertex with every other
through subspace dimension conditions, tagging each constraint 1-to-1 or
2-to-2; the second keeps the 2-to-2 ones. The transferred projectors sum the
joint eigenprojectors over the satisfying assignments whose induced linear
functional restricts to the given label.
"""

from chromagap import csp, dkkms, qop

system, assignment = qop.mermin_peres()
rho1 = dkkms.build_rho1(system, 1, 2)
print("stage one:", rho1.instance)
print("tags:", {t: rho1.tags.count(t) for t in sorted(set(rho1.tags))})

rho2 = dkkms.build_rho2(rho1)
profile = csp.classify_label_cover(rho2.instance)
print("stage two:", rho2.instance)
print("certified d-to-d blocks: m =", profile.d_to_d.m, " d =", profile.d_to_d.d)

_, transferred = dkkms.rho_quantum_transfer(system, 1, 2, assignment, rho1=rho2)
X, A = csp.to_structures(rho2.instance)
report = qop.verify_assignment(X, A, transferred, 0)
print("transferred strategy on dim", transferred.dim, "->", report.summary())
print("every forbidden product is the exact zero matrix:", report.perfect)
