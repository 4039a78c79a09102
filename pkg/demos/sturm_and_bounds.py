"""Explicit constants: series majorants, tails and Sturm cutoffs for a few weights."""

from fractions import Fraction

from siegelcert import BoundParams, s_bound, sturm_report, tail_bound

for ell, n, mu in ((12, 1, Fraction(1, 2)), (10, 2, Fraction(1, 4))):
    p = BoundParams(ell, n, mu, 1)
    print(f"weight {ell}, genus {n}, mu {mu}: full sum <= {s_bound(p).value:.6g}")
    for R in (2, 5, 10):
        q = BoundParams(ell, n, mu, 1, R=R)
        print(f"   tail beyond det {R:>2}: <= {tail_bound(q).value:.6g}")

print("\nSturm cutoffs (level M):")
for n in (1, 2):
    for ell in (10, 12, 20):
        row = [sturm_report(ell, n, M) for M in (1, 2, 3)]
        print(f"  genus {n} weight {ell:2d}: " + "  ".join(f"{r.value:10.4f}" for r in row))
