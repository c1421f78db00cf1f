"""Random coefficient sequences and analytic-function arithmetic.

Randomizing the coefficients of a Taylor measure produces a random
set function: drawing a coefficient sequence draws a measure. The
first half of this script compares exact means and variances with
simulation for Gaussian coefficients, a random walk embedding, and a
Brownian-increment embedding. The second half treats coefficient
sequences as analytic functions f(x) = sum a_n (x - c)^n / n! and
multiplies, recenters, and measures them.

Run: python3 demos/stochastic_and_functions.py
"""

import math

import numpy as np

from taylormeasure import (
    Ar1,
    BrownianApprox,
    GaussianIID,
    NatSet,
    NormalStep,
    RandomWalk,
    RngSpec,
    brownian_marginal_moments,
    eval_rep,
    exp_rep,
    gaussian_truncation_plan,
    lp_norm_on_interval,
    multiply,
    polynomial_rep,
    recenter,
    sample_stm,
    sample_stm_batch,
    simulate_random_walk,
    sin_rep,
    stm_moments,
    sup_distance_on_grid,
    truncate_rep,
)

ALL = NatSet.all()

print("== Gaussian coefficients: exact vs simulated moments ==")
spec = GaussianIID(1.0, 1.0, 1.0)
mean, var = stm_moments(spec, ALL)
plan = gaussian_truncation_plan(spec, 1e-12)
draws = sample_stm_batch(spec, ALL, plan, RngSpec(seed=1), 50_000)
print(f"exact mean {mean:.6f}   simulated {float(draws.mean()):.6f}")
print(f"exact var  {var:.6f}   simulated {float(draws.var(ddof=1)):.6f}")

print()
print("== random walk as a measure on time indices ==")
spec = RandomWalk(NormalStep(0.0, 1.0), 10)
rng = RngSpec(seed=5)
path = simulate_random_walk(spec, rng)
measured = sample_stm(spec, NatSet.finite(range(1, 11)), None, rng)
print(f"walk endpoint S_10:        {path.values[-1]:+.12f}")
print(f"measure of indices 1..10:  {measured:+.12f}  (identical draw)")
window = sample_stm(spec, NatSet.finite([3, 4, 5]), None, rng)
steps = np.diff(np.asarray(path.values))
print(f"window {{3,4,5}}:           {window:+.12f}")
print(f"sum of steps 3..5:         {steps[2] + steps[3] + steps[4]:+.12f}")

print()
print("== AR(1) stationary-looking variance ==")
spec = Ar1(0.5, 1.0, 3)
mean, var = stm_moments(spec, ALL)
print(f"t=3, phi=0.5: mean {mean}, variance {var} (exact 1.3125)")

print()
print("== Brownian-increment embedding ==")
spec = BrownianApprox(16, 0.0, 1.0)
mid_mean, mid_var = brownian_marginal_moments(spec, 8)
end_mean, end_var = brownian_marginal_moments(spec, 16)
print(f"marginal at t=1/2: mean {mid_mean}, variance {mid_var}")
print(f"marginal at t=1:   mean {end_mean}, variance {end_var}")

print()
print("== analytic functions as coefficient sequences ==")
e2 = multiply(exp_rep(), exp_rep())
got = eval_rep(e2, 1.0, 1e-12)
print(f"(exp * exp)(1) = {got.value:.15f}   e^2 = {math.exp(2.0):.15f}")
print("product coefficients a_l = 2^l:",
      [e2.coefficients.a(l) for l in range(6)])

poly = polynomial_rep([1.0, 0.0, 3.0])          # 1 + 3 x^2 around 0
moved = recenter(poly, 1.0)                      # same polynomial around 1
print("recentered 1 + 3x^2 at c=1:",
      [moved.coefficients.a(k) for k in range(3)],
      "(derivatives 4, 6, 6)")

tail = sup_distance_on_grid(truncate_rep(exp_rep(), 25), math.exp, (0.0, 1.0))
print(f"sup|exp - its degree-25 truncation| on [0,1]: {tail:.2e}")

l1 = lp_norm_on_interval(exp_rep(), 1.0, (0.0, 1.0), 1e-10)
l2 = lp_norm_on_interval(polynomial_rep([0.0, 1.0]), 2.0, (0.0, 1.0), 1e-10)
print(f"L1 norm of exp on [0,1]: {l1:.12f}   (e - 1 = {math.e - 1.0:.12f})")
print(f"L2 norm of x on [0,1]:   {l2:.12f}   (1/sqrt 3 = {1 / math.sqrt(3):.12f})")

back = recenter(recenter(sin_rep(), 0.7, eps=1e-13), 0.0, eps=1e-13)
drift = max(abs(back.coefficients.a(k) - sin_rep().coefficients.a(k))
            for k in range(12))
print(f"recenter round trip drift on sin coefficients: {drift:.2e}")
