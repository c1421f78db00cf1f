"""Signed measures on subsets of the naturals with factorial-weighted terms.

A measure T assigns T(B) = sum_{n in B} a_n * gamma**n / n!. Finite sets
are summed exactly; infinite sets (the whole of N, or complements of
finite sets) go through a certified truncation plan derived from the
coefficient sequence's growth certificate, and every returned value
carries an abs_error combining the tail bound with a roundoff estimate.

Measures are identified semantically with their term function
p(n) = a_n * gamma**n / n!; the (gamma, a) pair is just a presentation.
Algebraic results therefore come back in the canonical gamma = 1
presentation backed directly by the combined term function.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from . import kernel
from .errors import DivergenceUnknown
from .kernel import (
    Bounded,
    CoefficientSequence,
    FactorialGeometric,
    FiniteSupport,
    GeometricEnvelope,
    SequenceLike,
    SignedLogTerm,
    TermBackedSequence,
    TruncationPlan,
    Unverified,
    finite_sequence,
)

_ULP = 2.0 ** -53


@dataclass(frozen=True)
class NatSet:
    """A subset of N that is finite, cofinite, or everything.

    ``elements`` is a sorted tuple of distinct naturals: the members for a
    finite set, the non-members for a cofinite one. A cofinite set with
    nothing excluded normalizes to kind 'all'.
    """

    kind: str
    elements: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("finite", "cofinite", "all"):
            raise ValueError(f"NatSet.kind must be finite|cofinite|all, got {self.kind!r}")
        elems = tuple(sorted(set(int(n) for n in self.elements)))
        if any(n < 0 for n in elems):
            raise ValueError("NatSet elements must be naturals")
        object.__setattr__(self, "elements", elems)
        if self.kind == "all" and elems:
            raise ValueError("an 'all' set carries no elements")
        if self.kind == "cofinite" and not elems:
            object.__setattr__(self, "kind", "all")

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "NatSet":
        return cls("finite", tuple(elements))

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "NatSet":
        return cls("cofinite", tuple(excluded))

    @classmethod
    def all(cls) -> "NatSet":
        return cls("all")

    def __contains__(self, n: int) -> bool:
        if self.kind == "all":
            return n >= 0
        i = bisect_left(self.elements, n)
        hit = i < len(self.elements) and self.elements[i] == n
        return hit if self.kind == "finite" else (n >= 0 and not hit)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def iter_finite(self) -> Iterator[int]:
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite set")
        return iter(self.elements)


@dataclass(frozen=True)
class MeasureValue:
    """A computed set value together with a certified absolute error."""

    value: float
    abs_error: float


@dataclass(frozen=True)
class TaylorMeasure:
    """T(B) = sum_{n in B} a_n * gamma**n / n! for a coefficient sequence a."""

    coefficients: SequenceLike
    gamma: float
    label: str | None = None

    def term(self, n: int) -> float:
        """The term function p(n) = a_n * gamma**n / n! in linear space."""
        return kernel.term_value(self.coefficients, self.gamma, n)

    def log_term(self, n: int) -> SignedLogTerm:
        return kernel.term(self.coefficients, self.gamma, n)

    def evaluate(self, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
        return evaluate(self, sets, eps)

    def total_mass(self, eps: float = 1e-12) -> MeasureValue:
        return evaluate(self, NatSet.all(), eps)

    def total_variation(self, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
        return total_variation(self, sets, eps)

    def jordan(self) -> "JordanPair":
        return jordan_decompose(self)


def zero_measure() -> TaylorMeasure:
    return TaylorMeasure(finite_sequence(()), 1.0)


def _require_certificate(T: TaylorMeasure, what: str) -> None:
    if isinstance(T.coefficients.certificate, Unverified):
        raise DivergenceUnknown(
            f"{what} over an infinite set requires a growth certificate; "
            "this measure's coefficient sequence is Unverified"
        )


def _sum_selected(
    T: TaylorMeasure, indices: Iterable[int], select: Callable[[float], float]
) -> tuple[float, float]:
    """Sum select(term) over indices with compensated accumulation.

    select maps a term to its contribution (identity, positive part,
    negative part, or absolute value). Returns (value, roundoff_estimate).
    """
    acc_pos = kernel._NeumaierSum()
    acc_neg = kernel._NeumaierSum()
    err = 0.0
    for n in indices:
        v, e = kernel._term_and_err(T.coefficients, T.gamma, n)
        w = select(v)
        if w == 0.0:
            continue
        err += e
        if w > 0.0:
            acc_pos.add(w)
        else:
            acc_neg.add(w)
    value = acc_pos.value + acc_neg.value
    err += 2.0 * _ULP * (acc_pos.value - acc_neg.value)
    return value, err


def _plan_for(T: TaylorMeasure, eps: float) -> TruncationPlan:
    return kernel.plan_truncation(T.coefficients.certificate, T.gamma, eps)


def _eval_selected(
    T: TaylorMeasure, sets: NatSet, eps: float, select: Callable[[float], float]
) -> MeasureValue:
    """Shared engine for evaluate / jordan parts / total variation.

    Finite sets are summed exactly (no truncation). 'all' sums a certified
    plan. Cofinite sets are the 'all' value minus the excluded finite part;
    the tail bound certifies every selected variant because it dominates
    sum |p(n)| over the tail.
    """
    if sets.is_finite:
        value, err = _sum_selected(T, sets.elements, select)
        return MeasureValue(value, err)
    _require_certificate(T, "evaluation")
    plan = _plan_for(T, eps)
    if sets.kind == "all":
        indices: Iterable[int] = range(plan.last_index + 1)
    else:
        excluded = set(sets.elements)
        indices = (n for n in range(plan.last_index + 1) if n not in excluded)
    value, err = _sum_selected(T, indices, select)
    return MeasureValue(value, err + plan.tail_bound)


def evaluate(T: TaylorMeasure, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
    """T(B) with |returned - exact| <= abs_error (tail bound + roundoff)."""
    return _eval_selected(T, sets, eps, lambda v: v)


def taylor_derivative(T: TaylorMeasure, n: int) -> float:
    """The n-th term a_n * gamma**n / n!, i.e. T({n})."""
    return T.term(n)


def total_variation(T: TaylorMeasure, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
    """|T|(B) = sum_{n in B} |p(n)|."""
    return _eval_selected(T, sets, eps, abs)


@dataclass(frozen=True)
class JordanPair:
    """Decomposition T = positive - negative against the Hahn split
    A+ = {n : p(n) >= 0} (ties assigned to A+).

    positive(B) sums the terms of B that fall in A+, negative(B) sums
    the negated terms of B in A-; the two parts are mutually singular by
    construction, and exactly so on finite sets.
    """

    measure: TaylorMeasure

    def hahn_positive_indicator(self, n: int) -> bool:
        return self.measure.term(n) >= 0.0

    def positive(self, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
        out = _eval_selected(self.measure, sets, eps, lambda v: v if v > 0.0 else 0.0)
        return MeasureValue(max(out.value, 0.0), out.abs_error)

    def negative(self, sets: NatSet, eps: float = 1e-12) -> MeasureValue:
        out = _eval_selected(self.measure, sets, eps, lambda v: -v if v < 0.0 else 0.0)
        return MeasureValue(max(out.value, 0.0), out.abs_error)


def jordan_decompose(T: TaylorMeasure) -> JordanPair:
    return JordanPair(T)


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------


def _a_space_envelope(weight: float, T: TaylorMeasure):
    """Envelope for |weight * n! * p(n)| = |weight * a_n * gamma**n|.

    Returns ('fs', K), ('geo', scale, ratio, start),
    ('factgeo', scale, ratio, start), or ('unverified',).
    """
    cert = T.coefficients.certificate
    g = abs(T.gamma)
    w = abs(weight)
    if w == 0.0:
        return ("fs", -1)
    if isinstance(cert, FiniteSupport):
        return ("fs", cert.last)
    if isinstance(cert, Bounded):
        return ("geo", w * cert.bound, g, 0)
    if isinstance(cert, GeometricEnvelope):
        return ("geo", w * cert.scale, cert.ratio * g, cert.start)
    if isinstance(cert, FactorialGeometric):
        return ("factgeo", w * cert.scale, cert.ratio * g, cert.start)
    return ("unverified",)


def _fs_to_geo(weight: float, T: TaylorMeasure, last: int):
    """Concrete geometric envelope for a finite-support side: enumerate
    max |weight * n! * p(n)| over the support (certificates carry no
    magnitudes, the coefficients themselves do)."""
    peak = 0.0
    for n in range(last + 1):
        t = T.term(n)
        if t == 0.0:
            continue
        if n <= kernel._MAX_FLOAT_FACTORIAL:
            mag = abs(weight * t) * kernel._FACT[n]
        else:
            mag = math.exp(math.log(abs(weight * t)) + math.lgamma(n + 1))
        peak = max(peak, mag)
    return ("geo", peak, 1.0, 0)


def _combine_envelopes(e1, e2) -> kernel.GrowthCertificate:
    if e1[0] == "unverified" or e2[0] == "unverified":
        return Unverified()
    if e1[0] == "fs" and e2[0] == "fs":
        last = max(e1[1], e2[1])
        return FiniteSupport(last)
    kinds = {e1[0], e2[0]}
    s = e1[1] + e2[1]
    r = max(e1[2], e2[2])
    start = max(e1[3], e2[3])
    if "factgeo" in kinds:
        return FactorialGeometric(s, r, start)
    return GeometricEnvelope(s, r, start)


def linear_combination(
    alpha: float, T1: TaylorMeasure, beta: float, T2: TaylorMeasure
) -> TaylorMeasure:
    """The measure with term function alpha * p1 + beta * p2, presented
    canonically at gamma = 1 with a_n = n! * (alpha * p1(n) + beta * p2(n)).

    The result's term function is exactly the pointwise combination of
    the operands' term functions; no presentation merging is attempted
    (coefficient sequences with different gamma cannot be merged at the
    coefficient level in general).
    """
    alpha = float(alpha)
    beta = float(beta)
    if alpha == 0.0 and beta == 0.0:
        return zero_measure()
    t1 = T1.term
    t2 = T2.term
    if beta == 0.0:
        rule = (lambda n: alpha * t1(n)) if alpha != 1.0 else t1
    elif alpha == 0.0:
        rule = (lambda n: beta * t2(n)) if beta != 1.0 else t2
    else:
        rule = lambda n: alpha * t1(n) + beta * t2(n)

    e1 = _a_space_envelope(alpha, T1)
    e2 = _a_space_envelope(beta, T2)
    if e1[0] == "fs" and e2[0] != "fs":
        e1 = _fs_to_geo(alpha, T1, e1[1])
    if e2[0] == "fs" and e1[0] != "fs":
        e2 = _fs_to_geo(beta, T2, e2[1])
    cert = _combine_envelopes(e1, e2)
    return TaylorMeasure(TermBackedSequence(rule, 1.0, cert), 1.0)


def from_term_function(
    rule: Callable[[int], float], certificate: kernel.GrowthCertificate, gamma: float = 1.0
) -> TaylorMeasure:
    """Measure with prescribed term function p(n) = rule(n), presented at
    ``gamma`` (so a_n = n! * rule(n) / gamma**n)."""
    return TaylorMeasure(TermBackedSequence(rule, float(gamma), certificate), float(gamma))
