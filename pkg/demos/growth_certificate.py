"""Certify polynomial growth of synthetic genus-2 coefficients and watch it break."""

import math

from siegelcert import CoeffTable, GrowthSchedule, growth_certify, reduced_by_det

keys = reduced_by_det(2, 1, 40)
sched = GrowthSchedule(1.5, 2.0, 2.0, 1.0)

poly = CoeffTable(2, 0, 1, {T: float(T.det()) for T in keys})
cert = growth_certify(poly, sched)
print(f"{len(keys)} orbits, |beta| = det: passed {cert.passed}, minimal E {cert.minimal_E:.6f}")

tight = GrowthSchedule(1.5, 2.0, 2.0, cert.minimal_E)
print(f"implied exponent at minimal E: {tight.exponent():.4f}")

blown = CoeffTable(2, 0, 1, {T: float(T.det()) * math.exp(float(T.det()) ** 0.25) for T in keys})
print("same schedule with exp(det^(1/4)) growth:", growth_certify(blown, tight).passed)
