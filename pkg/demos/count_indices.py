"""Count Fourier indices below a trace cutoff and compare with the polynomial bound."""

from fractions import Fraction

from siegelcert import EnumSpec, by_trace, count_bound, count_by_trace, reduced_by_det

print("half-integral 2x2 forms of trace 2:")
for T in by_trace(EnumSpec(2, 1, 2)):
    print("  ", T.to_json())

print("\n n  M   X    count      bound")
for n in (1, 2, 3):
    for M in (1, 2):
        for X in (Fraction(2), Fraction(4)):
            c = count_by_trace(n, M, X)
            print(f"{n:2d} {M:2d} {str(X):>3} {c:8d} {float(count_bound(n, M, X)):10.1f}")

print("\nreduced representatives of determinant at most 2:")
for T in reduced_by_det(2, 1, 2):
    print("  ", T.to_json(), " det", T.det())
