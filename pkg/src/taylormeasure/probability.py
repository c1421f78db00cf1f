"""Power-series pmfs and the probability content of signed Taylor measures.

A power-series family member has mass function

    f(n | zeta, b) = c(zeta, b) * b_n * zeta**n / n!,

where the reciprocal normalizer c(zeta, b)**-1 = sum_n b_n zeta**n / n! must
be finite and positive.  These pmfs are exactly the term functions of
positive Taylor measures with unit total mass, which gives two bridges:

* every signed Taylor measure splits into scaled probability measures,
  T(B) = mass_pos * Q_pos(B) - mass_neg * Q_neg(B), with Q built from the
  Jordan parts (``probability_pair``);
* every pmf on the naturals with certifiable tail behaviour is the term
  function of a positive Taylor measure for any gamma > 0 (``from_pmf``),
  and a difference of two power-series densities is a signed Taylor measure
  in canonical gamma = 1 presentation (``measure_from_densities``).

Quantiles are computed by incremental accumulation guarded by the certified
tail bound, so a query that the truncation horizon cannot resolve raises
QuantileTailUnresolved instead of silently returning a wrong index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateDistribution,
    DivergenceUnknown,
    InvalidPmf,
    QuantileTailUnresolved,
)
from .kernel import (
    _NeumaierSum,
    _ULP,
    Bounded,
    CoefficientSequence,
    ConstantTail,
    FactorialGeometric,
    FiniteSupport,
    GeometricEnvelope,
    GeometricTail,
    TermBackedSequence,
    Unverified,
    ZeroTail,
    plan_truncation,
    sum_terms_detailed,
    term_value,
)
from .measure import (
    MeasureValue,
    NatSet,
    TaylorMeasure,
    jordan_decompose,
    linear_combination,
)

__all__ = [
    "PowerSeriesPmf",
    "JordanPmf",
    "TaylorProbabilityPair",
    "normalizer",
    "pmf_eval",
    "cdf",
    "quantile",
    "probability_pair",
    "from_pmf",
    "measure_from_densities",
]


def _as_sequence(b) -> CoefficientSequence:
    if isinstance(b, (CoefficientSequence, TermBackedSequence)):
        return b
    from .kernel import finite_sequence

    return finite_sequence(b)


def normalizer(zeta: float, b, eps: float = 1e-12) -> MeasureValue:
    """The reciprocal normalizing constant sum_n b_n * zeta**n / n!.

    Raises InvalidPmf when a negative weight shows up among the summed
    indices, DegenerateDistribution when the sum is zero within its error
    bound, and DivergenceUnknown when b carries no usable certificate.
    """
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    b = _as_sequence(b)
    cert = b.certificate
    if isinstance(cert, Unverified):
        raise DivergenceUnknown(
            "the density sequence carries no growth certificate, so the "
            "normalizer sum cannot be certified"
        )
    plan = plan_truncation(cert, zeta, eps)
    pos, neg, rerr = sum_terms_detailed(b, zeta, range(plan.last_index + 1))
    if neg > 0.0:
        raise InvalidPmf("negative density weight b_n * zeta**n / n! encountered")
    err = plan.tail_bound + rerr
    if pos <= err:
        raise DegenerateDistribution(
            f"normalizer {pos} is zero within its error bound {err}"
        )
    return MeasureValue(pos, err)


class _IncrementalPmf:
    """Shared engine: lazy cumulative sums over nonnegative weights.

    Subclasses provide _weight(n) >= 0 (the unnormalized mass at n), the
    cached ``normalizer`` MeasureValue, and _horizon_plan(eps_weight) giving
    a truncation plan for the weights.
    """

    normalizer: MeasureValue

    def _init_cache(self, eps: float) -> None:
        self._eps = eps
        self._cum: list[float] = []
        self._acc = _NeumaierSum()
        self._plan_cache = None

    def _weight(self, n: int) -> float:
        raise NotImplementedError

    def _horizon_plan(self, eps_weight: float):
        raise NotImplementedError

    def _plan(self):
        if self._plan_cache is None:
            eps_w = max(self.normalizer.value * 1e-15, 5e-324)
            self._plan_cache = self._horizon_plan(eps_w)
        return self._plan_cache

    def _extend(self, upto: int) -> None:
        # compensated running sum; each entry is a corrected snapshot
        while len(self._cum) <= upto:
            self._acc.add(self._weight(len(self._cum)))
            self._cum.append(self._acc.value)

    def _cum_at(self, n: int) -> float:
        self._extend(n)
        return self._cum[n]

    def pmf(self, n: int) -> float:
        """Probability mass at n."""
        if n < 0:
            return 0.0
        return self._weight(n) / self.normalizer.value

    def cdf(self, n: int) -> float:
        """Cumulative probability P(X <= n)."""
        if n < 0:
            return 0.0
        h = self._plan().last_index
        return self._cum_at(min(n, h)) / self.normalizer.value

    def quantile(self, u: float) -> int:
        """Smallest n with cdf(n) >= u.

        Raises QuantileTailUnresolved when u lies beyond the cumulative
        probability certified at the truncation horizon.
        """
        if not 0.0 <= u <= 1.0:
            raise ValueError("u must lie in [0, 1]")
        plan = self._plan()
        slack = (plan.tail_bound + self.normalizer.abs_error) / self.normalizer.value
        if plan.tail_bound > 0.0 and u > 1.0 - slack:
            raise QuantileTailUnresolved(
                f"quantile {u} exceeds the cumulative probability "
                f"{1.0 - slack} certified at horizon {plan.last_index}"
            )
        target = u * self.normalizer.value
        last_positive = None
        for n in range(plan.last_index + 1):
            self._extend(n)
            if self._weight(n) > 0.0:
                last_positive = n
            if self._cum[n] >= target:
                return n
        if plan.tail_bound == 0.0 and last_positive is not None:
            # finite support: the full mass is already in the table and u
            # exceeds it only through rounding
            return last_positive
        reached = self._cum_at(plan.last_index) / self.normalizer.value
        raise QuantileTailUnresolved(
            f"quantile {u} exceeds the cumulative probability {reached} "
            f"certified at horizon {plan.last_index}"
        )

    def cumulative_table(self, tail_eps: float = 1e-16) -> tuple[list[float], int]:
        """Normalized cdf table covering all but tail_eps of the mass."""
        eps_w = max(self.normalizer.value * tail_eps, 5e-324)
        plan = self._horizon_plan(eps_w)
        self._extend(plan.last_index)
        norm = self.normalizer.value
        table = [c / norm for c in self._cum[: plan.last_index + 1]]
        return table, plan.last_index

    def set_probability(self, B: NatSet, eps: float = 1e-12) -> MeasureValue:
        """Probability of the index set B under this pmf."""
        norm = self.normalizer.value
        rel = self.normalizer.abs_error / norm
        if B.is_finite:
            w = math.fsum(self._weight(n) for n in B.elements)
            total = w / norm
            return MeasureValue(total, total * (rel + (len(B.elements) + 2) * _ULP))
        eps_w = max(norm * eps, 5e-324)
        plan = self._horizon_plan(eps_w)
        h = plan.last_index
        self._extend(h)
        w = self._cum_at(h)
        excluded = math.fsum(self._weight(n) for n in B.elements if n <= h)
        total = (w - excluded) / norm
        err = plan.tail_bound / norm + abs(total) * (rel + (h + 2) * _ULP)
        return MeasureValue(total, err)


class PowerSeriesPmf(_IncrementalPmf):
    """Pmf f(n) = b_n * zeta**n / (n! * normalizer).

    The normalizer is computed once, with its certified error, at
    construction; an invalid family (negative weights, zero or uncertifiable
    normalizer) fails there.
    """

    def __init__(self, zeta: float, b, eps: float = 1e-12):
        self.zeta = float(zeta)
        self.b = _as_sequence(b)
        self.normalizer = normalizer(self.zeta, self.b, eps)
        self._init_cache(eps)

    def __repr__(self):
        return f"PowerSeriesPmf(zeta={self.zeta}, normalizer={self.normalizer.value})"

    def _weight(self, n: int) -> float:
        w = term_value(self.b, self.zeta, n)
        if w < 0.0:
            raise InvalidPmf(f"negative density weight at index {n}")
        return w

    def _horizon_plan(self, eps_weight: float):
        return plan_truncation(self.b.certificate, self.zeta, eps_weight)


class JordanPmf(_IncrementalPmf):
    """Pmf of one sign-part of a Taylor measure: f(n) = p_side(n) / mass.

    Defined on all of the naturals, with zeros off the side's support, so
    both parts of a pair live on the same sample space.
    """

    def __init__(self, measure: TaylorMeasure, sign: int, mass: MeasureValue, eps: float = 1e-12):
        self._measure = measure
        self._sign = 1 if sign >= 0 else -1
        self.normalizer = mass
        self._init_cache(eps)

    def __repr__(self):
        side = "positive" if self._sign > 0 else "negative"
        return f"JordanPmf({side}, mass={self.normalizer.value})"

    def _weight(self, n: int) -> float:
        t = self._measure.term(n)
        w = t if self._sign > 0 else -t
        return w if w > 0.0 else 0.0

    def _horizon_plan(self, eps_weight: float):
        return plan_truncation(
            self._measure.coefficients.certificate, self._measure.gamma, eps_weight
        )


@dataclass(frozen=True)
class TaylorProbabilityPair:
    """Masses and pmfs of the two sign-parts of a Taylor measure.

    A side with zero mass (within its error bound) is omitted: its pmf slot
    holds None and it contributes nothing to the reconstruction.
    """

    mass_pos: float
    mass_neg: float
    q_pos: JordanPmf | None
    q_neg: JordanPmf | None

    def reconstruct(self, B: NatSet, eps: float = 1e-12) -> MeasureValue:
        """mass_pos * Q_pos(B) - mass_neg * Q_neg(B), through the pmfs.

        This recomputes the measure of B from the probability pair, so it is
        an independent check of the decomposition identity against direct
        evaluation.
        """
        value = 0.0
        err = 0.0
        if self.q_pos is not None:
            p = self.q_pos.set_probability(B, eps)
            value += self.mass_pos * p.value
            err += self.mass_pos * p.abs_error + abs(p.value) * _ULP * self.mass_pos
        if self.q_neg is not None:
            p = self.q_neg.set_probability(B, eps)
            value -= self.mass_neg * p.value
            err += self.mass_neg * p.abs_error + abs(p.value) * _ULP * self.mass_neg
        return MeasureValue(value, err + 2.0 * _ULP * abs(value))


def probability_pair(T: TaylorMeasure, eps: float = 1e-12) -> TaylorProbabilityPair:
    """Split T into scaled positive and negative probability measures.

    Raises DegenerateDistribution when both Jordan masses vanish (the zero
    measure carries no probability content), and DivergenceUnknown when the
    total masses cannot be certified.
    """
    pair = jordan_decompose(T)
    every = NatSet.all()
    mp = pair.positive(every, eps)
    mn = pair.negative(every, eps)
    pos_degenerate = mp.value <= mp.abs_error
    neg_degenerate = mn.value <= mn.abs_error
    if pos_degenerate and neg_degenerate:
        raise DegenerateDistribution(
            "both sign-parts have zero total mass within tolerance"
        )
    q_pos = None if pos_degenerate else JordanPmf(T, 1, mp, eps)
    q_neg = None if neg_degenerate else JordanPmf(T, -1, mn, eps)
    return TaylorProbabilityPair(
        mass_pos=mp.value, mass_neg=mn.value, q_pos=q_pos, q_neg=q_neg
    )


def pmf_eval(p, n: int) -> float:
    """Probability mass of p at n."""
    return p.pmf(n)


def cdf(p, n: int) -> float:
    """Cumulative probability of p at n."""
    return p.cdf(n)


def quantile(p, u: float) -> int:
    """Smallest n with cdf(n) >= u."""
    return p.quantile(u)


def _measure_from_probs(probs: tuple[float, ...], gamma: float) -> TaylorMeasure:
    if not probs:
        raise InvalidPmf("empty probability list")
    if any(q < 0.0 for q in probs):
        raise InvalidPmf("negative probability entry")
    total = math.fsum(probs)
    if abs(total - 1.0) > 1e-12:
        raise InvalidPmf(f"probabilities sum to {total}, not 1")
    last = max((n for n, q in enumerate(probs) if q != 0.0), default=0)
    seq = TermBackedSequence(
        lambda n, t=probs: t[n] if n < len(t) else 0.0,
        gamma,
        FiniteSupport(last),
    )
    return TaylorMeasure(seq, gamma)


def _measure_from_prob_sequence(p: CoefficientSequence, gamma: float) -> TaylorMeasure:
    prefix = p.prefix
    if any(q < 0.0 for q in prefix):
        raise InvalidPmf("negative probability entry")
    tail = p.tail
    L = len(prefix)
    if isinstance(tail, ZeroTail) or (
        isinstance(tail, ConstantTail) and tail.value == 0.0
    ):
        return _measure_from_probs(tuple(prefix), gamma)
    if not isinstance(tail, GeometricTail):
        raise InvalidPmf(
            "cannot verify normalization: probability tails must be zero or "
            "geometric"
        )
    s, r = tail.scale, tail.ratio
    if s < 0.0 or not 0.0 <= r < 1.0:
        raise InvalidPmf("geometric probability tail needs scale >= 0, 0 <= ratio < 1")
    total = math.fsum(prefix) + s * r ** L / (1.0 - r)
    if abs(total - 1.0) > 1e-12:
        raise InvalidPmf(f"probabilities sum to {total}, not 1")
    cert = FactorialGeometric(s, r / gamma, start=L) if s > 0.0 else FiniteSupport(L - 1)
    seq = TermBackedSequence(lambda n, q=p: q.a(n), gamma, cert)
    return TaylorMeasure(seq, gamma)


def _measure_from_power_series(p: PowerSeriesPmf, gamma: float) -> TaylorMeasure:
    norm_lo = p.normalizer.value - p.normalizer.abs_error
    scale = 1.0 / norm_lo
    bc = p.b.certificate
    if p.zeta == 0.0 or isinstance(bc, FiniteSupport):
        cert = FiniteSupport(0 if p.zeta == 0.0 else bc.last)
    elif isinstance(bc, Bounded):
        cert = GeometricEnvelope(bc.bound * scale, p.zeta / gamma)
    elif isinstance(bc, GeometricEnvelope):
        cert = GeometricEnvelope(bc.scale * scale, bc.ratio * p.zeta / gamma, bc.start)
    elif isinstance(bc, FactorialGeometric):
        cert = FactorialGeometric(bc.scale * scale, bc.ratio * p.zeta / gamma, bc.start)
    else:
        raise DivergenceUnknown("pmf density carries no growth certificate")
    seq = TermBackedSequence(lambda n, q=p: q.pmf(n), gamma, cert)
    return TaylorMeasure(seq, gamma)


def from_pmf(p, gamma: float = 1.0) -> TaylorMeasure:
    """The positive Taylor measure whose term function is the given pmf.

    Inverts the pmf-measure correspondence: the result has coefficients
    a_n = n! * p_n / gamma**n, so its terms reproduce p_n for any gamma > 0
    and its total mass is 1.  Accepts a probability list, a
    CoefficientSequence of probabilities with a zero or geometric tail, or a
    PowerSeriesPmf.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if isinstance(p, PowerSeriesPmf):
        return _measure_from_power_series(p, gamma)
    if isinstance(p, CoefficientSequence):
        return _measure_from_prob_sequence(p, gamma)
    if isinstance(p, TermBackedSequence):
        raise InvalidPmf("cannot verify normalization of a bare term rule")
    return _measure_from_probs(tuple(float(q) for q in p), gamma)


def measure_from_densities(zeta1: float, b1, zeta2: float, b2) -> TaylorMeasure:
    """The signed measure with terms b1_n zeta1**n / n! - b2_n zeta2**n / n!.

    Presented canonically at gamma = 1.  Both density sides must carry
    certificates guaranteeing finite normalizer sums.
    """
    if zeta1 < 0.0 or zeta2 < 0.0:
        raise ValueError("zeta must be nonnegative")
    sides = []
    for label, zeta, b in (("first", zeta1, b1), ("second", zeta2, b2)):
        seq = _as_sequence(b)
        if isinstance(seq.certificate, Unverified):
            raise DivergenceUnknown(
                f"the {label} density carries no growth certificate"
            )
        sides.append(TaylorMeasure(seq, zeta))
    return linear_combination(1.0, sides[0], -1.0, sides[1])
