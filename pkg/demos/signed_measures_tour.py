"""Tour of signed Taylor measures: evaluation, decomposition, geometry.

A Taylor measure assigns to every subset B of the naturals the sum
T(B) = sum_{n in B} a_n gamma^n / n!. This script builds a few of them,
evaluates masses with certified error bounds, splits one into its
positive and negative parts, and pokes at the inner-product geometry,
including the counterexample showing the variation norm is not a
Hilbert norm.

Run: python3 demos/signed_measures_tour.py
"""

import math

from taylormeasure import (
    GeometricEnvelope,
    NatSet,
    TaylorMeasure,
    constant_sequence,
    distance,
    evaluate,
    finite_sequence,
    inner_product,
    jordan_decompose,
    linear_combination,
    norm,
    rule_sequence,
    total_variation,
)

ALL = NatSet.all()

print("== masses with certified bounds ==")
ones = TaylorMeasure(constant_sequence(1.0), 1.0, label="a=1, gamma=1")
mv = evaluate(ones, ALL, eps=1e-13)
print(f"T(N) for a=1, gamma=1:  {mv.value:.15f}  (abs error <= {mv.abs_error:.1e})")
print(f"reference e:            {math.e:.15f}")

# the even numbers are neither finite nor cofinite; a window of them is
# enough here because the terms beyond n = 40 are below 1e-48
evens = NatSet.finite(range(0, 40, 2))
mv = evaluate(ones, evens, eps=1e-13)
print(f"mass on even n:         {mv.value:.15f}")
print(f"reference cosh(1):      {math.cosh(1.0):.15f}")

print()
print("== Jordan decomposition ==")
# alternating terms: a_n = (-1)^n at gamma = 1, so p(n) = (-1)^n / n!
signed = TaylorMeasure(constant_sequence(1.0), -1.0, label="alternating")
pair = jordan_decompose(signed)
pos = pair.positive(ALL, eps=1e-13)
neg = pair.negative(ALL, eps=1e-13)
print(f"positive part:  {pos.value:.15f}  (cosh 1 = {math.cosh(1.0):.15f})")
print(f"negative part:  {neg.value:.15f}  (sinh 1 = {math.sinh(1.0):.15f})")
total = evaluate(signed, ALL, eps=1e-13)
print(f"difference:     {pos.value - neg.value:.15f}")
print(f"direct T(N):    {total.value:.15f}  (1/e = {1.0 / math.e:.15f})")
tv = total_variation(signed, ALL, eps=1e-13)
print(f"variation |T|:  {tv.value:.15f}  (e = {math.e:.15f})")

print()
print("== a measure defined by a coefficient rule ==")
# a_n = 2^n - 1 with the envelope |a_n| <= 1 * 2^n
growth = TaylorMeasure(
    rule_sequence(lambda n: 2.0 ** n - 1.0, GeometricEnvelope(1.0, 2.0)), 1.0
)
mv = evaluate(growth, ALL, eps=1e-12)
print(f"sum (2^n - 1)/n!:  {mv.value:.15f}")
print(f"reference e^2 - e: {math.exp(2.0) - math.e:.15f}")

print()
print("== inner-product geometry ==")
T1 = TaylorMeasure(finite_sequence([1.0, 2.0, -1.0]), 0.8)
T2 = TaylorMeasure(finite_sequence([0.5, -1.0, 2.0]), 1.2)
ip = inner_product(T1, T2, ALL)
print(f"rho(T1, T2)  = {ip.value:+.12f}")
print(f"||T1||       = {norm(T1, ALL).value:.12f}")
print(f"||T2||       = {norm(T2, ALL).value:.12f}")
print(f"dist(T1, T2) = {distance(T1, T2, ALL).value:.12f}")

# parallelogram law holds for the rho norm ...
s = linear_combination(1.0, T1, 1.0, T2)
d = linear_combination(1.0, T1, -1.0, T2)
lhs = norm(s, ALL).value ** 2 + norm(d, ALL).value ** 2
rhs = 2.0 * (norm(T1, ALL).value ** 2 + norm(T2, ALL).value ** 2)
print(f"parallelogram residual (rho norm): {abs(lhs - rhs):.2e}")

# ... but fails for the variation norm on disjointly supported measures
U1 = TaylorMeasure(finite_sequence([1.0]), 1.0)
U2 = TaylorMeasure(finite_sequence([0.0, 1.0]), 1.0)
s = linear_combination(1.0, U1, 1.0, U2)
d = linear_combination(1.0, U1, -1.0, U2)
lhs = total_variation(s, ALL).value ** 2 + total_variation(d, ALL).value ** 2
rhs = 2.0 * (total_variation(U1, ALL).value ** 2
             + total_variation(U2, ALL).value ** 2)
print(f"parallelogram residual (variation norm): {abs(lhs - rhs):.2f}"
      "  <- no Hilbert structure here")
