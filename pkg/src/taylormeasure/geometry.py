"""Hilbert-space geometry for signed Taylor measures.

The inner product pairs two measures index by index,

    rho(T1, T2)(B) = sum_{n in B} n! * p_T1(n) * p_T2(n),

where p_T(n) = a_n * gamma**n / n! is the term function.  Written in the
(gamma, a) presentation this is sum a_{n,1} a_{n,2} (gamma_1 gamma_2)**n / n!,
but the n!-weighted form only depends on the term functions, so rho is
invariant under re-presentation of the same measure.  It induces the norm
``sqrt(rho(T, T))`` and the distance ``norm(T1 - T2)``.

On infinite index sets convergence is certified through the operands' growth
certificates: bounded or geometric-envelope coefficients give summands below
C * R**n / n!, which is summable for every R.  Factorially growing
coefficients make the n!-weighted products diverge, so those operands are
rejected on infinite sets.

``rational_approximation`` witnesses separability: every certified measure is
within any positive rho-distance of a measure with finitely many dyadic
rational coefficients at gamma = 1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivergenceUnknown, NegativeRadicand
from .kernel import (
    _FACT,
    _LOG_SAFE,
    _MAX_FLOAT_FACTORIAL,
    _NeumaierSum,
    _ULP,
    Bounded,
    FactorialGeometric,
    FiniteSupport,
    GeometricEnvelope,
    TermBackedSequence,
    Unverified,
    _exp_signed,
    _term_and_err,
    finite_sequence,
    plan_truncation,
    term,
)
from .measure import (
    MeasureValue,
    NatSet,
    TaylorMeasure,
    linear_combination,
    total_variation,
)

__all__ = [
    "inner_product",
    "norm",
    "distance",
    "rational_approximation",
    "HilbertAxiomReport",
    "hilbert_axiom_report",
]


def _term_envelope(T: TaylorMeasure) -> tuple:
    """Certified envelope for |p_T(n)| on an infinite index set.

    Returns ('fs', K) when the terms vanish beyond K, or ('env', c, q, start)
    meaning |p_T(n)| <= c * q**n / n! for n >= start.
    """
    cert = T.coefficients.certificate
    g = abs(T.gamma)
    if isinstance(cert, FiniteSupport):
        return ("fs", cert.last)
    if isinstance(cert, Bounded):
        return ("env", cert.bound, g, 0)
    if isinstance(cert, GeometricEnvelope):
        return ("env", cert.scale, cert.ratio * g, cert.start)
    if isinstance(cert, FactorialGeometric):
        raise DivergenceUnknown(
            "inner products against factorially growing coefficients diverge "
            "on infinite sets; restrict to a finite set or approximate first"
        )
    raise DivergenceUnknown(
        "operand carries no growth certificate; inner products on infinite "
        "sets need FiniteSupport, Bounded, or GeometricEnvelope coefficients"
    )


def _rho_summand(T1: TaylorMeasure, T2: TaylorMeasure, n: int) -> tuple[float, float]:
    """n! * p_T1(n) * p_T2(n) with a roundoff estimate."""
    v1, e1 = _term_and_err(T1.coefficients, T1.gamma, n)
    v2, e2 = _term_and_err(T2.coefficients, T2.gamma, n)
    if n <= _MAX_FLOAT_FACTORIAL and v1 != 0.0 and v2 != 0.0:
        f = _FACT[n]
        l1 = math.log(abs(v1))
        l2 = math.log(abs(v2))
        lf = math.log(f)
        if abs(l1 + lf) < _LOG_SAFE and abs(l1 + l2 + lf) < _LOG_SAFE:
            v = (f * v1) * v2
            err = f * (abs(v1) * e2 + abs(v2) * e1 + e1 * e2) + 4.0 * _ULP * abs(v)
            return v, err
    t1 = term(T1.coefficients, T1.gamma, n)
    t2 = term(T2.coefficients, T2.gamma, n)
    s = t1.sign * t2.sign
    if s == 0:
        if e1 == 0.0 and e2 == 0.0:
            return 0.0, 0.0
        lf = math.lgamma(n + 1)
        bound = 0.0
        if e1 > 0.0:
            bound += _exp_signed(1, lf + math.log(e1) + max(t2.log_mag, -745.0))
        if e2 > 0.0:
            bound += _exp_signed(1, lf + math.log(e2) + max(t1.log_mag, -745.0))
        return 0.0, bound
    lf = math.lgamma(n + 1)
    log_mag = lf + t1.log_mag + t2.log_mag
    v = _exp_signed(s, log_mag)
    err = abs(v) * (abs(t1.log_mag) + abs(t2.log_mag) + lf + 16.0) * 2.0 ** -50
    return v, err


def _rho_sum(T1, T2, indices) -> tuple[float, float]:
    acc = _NeumaierSum()
    err = _NeumaierSum()
    for n in indices:
        v, e = _rho_summand(T1, T2, n)
        acc.add(v)
        err.add(e + _ULP * abs(v))
    return acc.value, err.value


def inner_product(
    T1: TaylorMeasure, T2: TaylorMeasure, B: NatSet, eps: float = 1e-12
) -> MeasureValue:
    """Evaluate rho(T1, T2)(B) = sum_{n in B} n! * p_T1(n) * p_T2(n).

    Finite sets sum exactly over the listed indices.  Infinite sets use both
    certificates to plan a truncation whose tail is below eps; the returned
    abs_error covers that tail plus the summation roundoff estimate.

    Raises DivergenceUnknown on an infinite set when either operand lacks a
    convergence-certifying growth certificate.
    """
    if B.is_finite:
        value, err = _rho_sum(T1, T2, B.elements)
        return MeasureValue(value, err)
    env1 = _term_envelope(T1)
    env2 = _term_envelope(T2)
    excluded = set(B.elements)
    if env1[0] == "fs" or env2[0] == "fs":
        hi = min(e[1] for e in (env1, env2) if e[0] == "fs")
        indices = (n for n in range(hi + 1) if n not in excluded)
        value, err = _rho_sum(T1, T2, indices)
        return MeasureValue(value, err)
    _, c1, q1, s1 = env1
    _, c2, q2, s2 = env2
    pair_env = GeometricEnvelope(c1 * c2, q1 * q2, max(s1, s2))
    plan = plan_truncation(pair_env, 1.0, eps)
    indices = (n for n in range(plan.last_index + 1) if n not in excluded)
    value, err = _rho_sum(T1, T2, indices)
    return MeasureValue(value, err + plan.tail_bound)


def norm(T: TaylorMeasure, B: NatSet, eps: float = 1e-12) -> MeasureValue:
    """The induced norm sqrt(rho(T, T)(B)).

    The radicand is a sum of squares, so a negative value can only come from
    accumulated roundoff; within abs_error of zero it is treated as zero, and
    beyond that NegativeRadicand is raised.
    """
    q = inner_product(T, T, B, eps)
    v, e = q.value, q.abs_error
    if v < 0.0:
        if -v <= e:
            return MeasureValue(0.0, math.sqrt(e))
        raise NegativeRadicand(
            f"rho(T, T)(B) = {v} is negative beyond its error bound {e}"
        )
    r = math.sqrt(v)
    denom = r + math.sqrt(max(v - e, 0.0))
    err = e / denom if denom > 0.0 else math.sqrt(e)
    return MeasureValue(r, err)


def distance(
    T1: TaylorMeasure, T2: TaylorMeasure, B: NatSet, eps: float = 1e-12
) -> MeasureValue:
    """rho-distance ||T1 - T2||: the norm of the term-wise difference."""
    return norm(linear_combination(1.0, T1, -1.0, T2), B, eps)


def _dyadic_scale_bits(log_delta: float) -> int:
    """Smallest k with 2**-k <= delta/2, floored at 40 bits."""
    k = math.ceil(-log_delta / math.log(2.0)) + 1
    return max(40, k)


def rational_approximation(
    T: TaylorMeasure, tol: float, N_support: int | None = None
) -> TaylorMeasure:
    """A finite-support dyadic-rational measure within rho-distance tol of T.

    The truncation plan spends tol**2 / 2 on the certified rho-tail; the
    remaining budget is split evenly across the retained indices, and each
    term value is rounded to a dyadic rational (denominator 2**k, k >= 40)
    fine enough for its share.  The result is presented at gamma = 1, so its
    coefficients are the rounded terms scaled by n!.

    N_support, when given, caps the largest retained index; if the certified
    tail at that cap exceeds the budget the tolerance is unattainable and a
    ValueError is raised.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    cert = T.coefficients.certificate
    if isinstance(cert, FiniteSupport):
        if cert.last < 0:
            return TaylorMeasure(finite_sequence(()), 1.0, label=T.label)
        last = cert.last
    else:
        env = _term_envelope(T)
        _, c, q, start = env
        pair_env = GeometricEnvelope(c * c, q * q, start)
        plan = plan_truncation(pair_env, 1.0, tol * tol / 2.0)
        last = plan.last_index
    if N_support is not None and last > N_support:
        raise ValueError(
            f"support cap {N_support} cannot meet tolerance {tol}: the "
            f"certified tail needs terms through index {last}"
        )
    count = last + 1
    log_tol = math.log(tol)
    rounded: dict[int, Fraction] = {}
    overflow = False
    for n in range(count):
        p = T.term(n)
        # delta_n = tol / sqrt(2 * count * n!) keeps sum n! * delta_n**2
        # at tol**2 / 2
        log_delta = log_tol - 0.5 * (
            math.log(2.0 * count) + math.lgamma(n + 1)
        )
        if p == 0.0 or math.log(abs(p)) < log_delta - math.log(2.0):
            continue
        k = _dyadic_scale_bits(log_delta)
        q_n = Fraction(round(Fraction(p) * 2 ** k), 2 ** k)
        if q_n == 0:
            continue
        rounded[n] = q_n
        a_n = q_n * math.factorial(n)
        if not (-(2.0 ** 1023) < a_n < 2.0 ** 1023):
            overflow = True
    if not rounded:
        return TaylorMeasure(finite_sequence(()), 1.0, label=T.label)
    top = max(rounded)
    if overflow:
        table = {n: float(q_n) for n, q_n in rounded.items()}
        seq = TermBackedSequence(
            lambda n, t=table: t.get(n, 0.0), 1.0, FiniteSupport(top)
        )
        return TaylorMeasure(seq, 1.0, label=T.label)
    prefix = [0.0] * (top + 1)
    for n, q_n in rounded.items():
        prefix[n] = float(q_n * math.factorial(n))
    return TaylorMeasure(finite_sequence(prefix), 1.0, label=T.label)


@dataclass(frozen=True)
class HilbertAxiomReport:
    """Worst-case residuals over all sampled pairs.

    Residuals for symmetry, bilinearity, and the rho-parallelogram identity
    are relative to max(1, |lhs|, |rhs|); the Cauchy-Schwarz slack is the
    minimum of (rho11 * rho22 - rho12**2) / max(1, rho11 * rho22), which
    should never be meaningfully negative.  The total-variation parallelogram
    residual is absolute: it is expected to be LARGE for generic pairs,
    demonstrating that the variation norm is not induced by any inner
    product, while the rho norm satisfies the identity to roundoff.
    """

    pairs_checked: int
    symmetry_max: float
    bilinearity_max: float
    cauchy_schwarz_min_slack: float
    parallelogram_rho_max: float
    parallelogram_tv_max: float


def _rel(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def hilbert_axiom_report(
    samples: list[TaylorMeasure], B: NatSet, eps: float = 1e-12, seed: int = 0
) -> HilbertAxiomReport:
    """Check the inner-product axioms on every pair from samples.

    For each unordered pair the report accumulates: the symmetry residual
    |rho(T1,T2) - rho(T2,T1)|, a bilinearity residual against random weights,
    the Cauchy-Schwarz slack, the parallelogram residual for the rho norm,
    and the parallelogram residual for the total-variation norm on B.
    """
    if len(samples) < 2:
        raise ValueError("need at least two sample measures")
    rng = random.Random(seed)
    rho_self = [inner_product(T, T, B, eps).value for T in samples]
    tv_self = [total_variation(T, B, eps).value for T in samples]
    sym = 0.0
    bil = 0.0
    cs_slack = math.inf
    par_rho = 0.0
    par_tv = 0.0
    pairs = 0
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            Ti, Tj = samples[i], samples[j]
            pairs += 1
            r_ij = inner_product(Ti, Tj, B, eps).value
            r_ji = inner_product(Tj, Ti, B, eps).value
            sym = max(sym, _rel(r_ij, r_ji))

            alpha = rng.uniform(-2.0, 2.0)
            beta = rng.uniform(-2.0, 2.0)
            mixed = linear_combination(alpha, Ti, beta, Tj)
            lhs = inner_product(mixed, Tj, B, eps).value
            rhs = alpha * r_ij + beta * rho_self[j]
            bil = max(bil, _rel(lhs, rhs))

            prod = rho_self[i] * rho_self[j]
            cs_slack = min(cs_slack, (prod - r_ij * r_ij) / max(1.0, prod))

            plus = linear_combination(1.0, Ti, 1.0, Tj)
            minus = linear_combination(1.0, Ti, -1.0, Tj)
            lhs = (
                inner_product(plus, plus, B, eps).value
                + inner_product(minus, minus, B, eps).value
            )
            rhs = 2.0 * (rho_self[i] + rho_self[j])
            par_rho = max(par_rho, _rel(lhs, rhs))

            tv_lhs = (
                total_variation(plus, B, eps).value ** 2
                + total_variation(minus, B, eps).value ** 2
            )
            tv_rhs = 2.0 * (tv_self[i] ** 2 + tv_self[j] ** 2)
            par_tv = max(par_tv, abs(tv_lhs - tv_rhs))
    return HilbertAxiomReport(
        pairs_checked=pairs,
        symmetry_max=sym,
        bilinearity_max=bil,
        cauchy_schwarz_min_slack=cs_slack,
        parallelogram_rho_max=par_rho,
        parallelogram_tv_max=par_tv,
    )
