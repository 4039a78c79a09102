"""Reduce a quadratic form and a point of the genus-2 half-space, then show the certificates."""

import mpmath

from siegelcert import SymMat, HalfSpacePoint, minkowski_reduce, siegel_reduce

T = SymMat([[29, 13, 7], [13, 11, 4], [7, 4, 5]])
cert = minkowski_reduce(T)
print("form:", T.to_json())
print("reduced:", cert.reduced.to_json())
for name, ok in cert.checks.items():
    print(f"  {name:<16} {'ok' if ok else 'FAILED'}")

# a point far from the fundamental domain: tiny imaginary part, big real part
Z = HalfSpacePoint([[1.7, -0.4], [-0.4, 0.9]], [[0.03, 0.01], [0.01, 0.05]])
sc = siegel_reduce(Z)
print("\nmin eigenvalue of Im Z before:", mpmath.nstr(min(mpmath.eig(Z.imag)[0], key=abs), 6))
print("after:", mpmath.nstr(min(mpmath.eig(sc.reduced.imag)[0], key=abs), 6))
print("symplectic transform is integral:", sc.transform.is_integral() and sc.transform.is_symplectic())
