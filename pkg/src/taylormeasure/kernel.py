"""Stable computation of factorial-weighted series terms.

A signed Taylor measure assigns to each index n the term

    p(n) = a_n * gamma**n / n!

and set values are sums of these terms. This module owns the per-term
arithmetic and everything needed to sum the terms safely: coefficient
sequences with declared tails, growth certificates, certified tail
bounds, truncation planning, and compensated summation split by sign.

Terms are kept in sign + log-magnitude form (via lgamma) so that a_n,
gamma**n, and n! never have to be represented separately; a linear-space
fast path is used whenever every intermediate is comfortably inside the
normal floating range, which keeps small cases exact to a few ulp.
The convention 0**0 = 1 applies throughout, so the n = 0 term is a_0
even when gamma = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Union

from .errors import DivergenceUnknown

_MAX_FLOAT_FACTORIAL = 170  # largest n with n! below float overflow
_FACT = tuple(float(math.factorial(n)) for n in range(_MAX_FLOAT_FACTORIAL + 1))
_LOG_SAFE = 700.0           # |log| budget that keeps intermediates normal
_LOG_TINY = -745.0          # below this, exp underflows to zero
_LOG_HUGE = 709.0           # above this, exp overflows
_ULP = 2.0 ** -53


def _sign(x: float) -> int:
    if x > 0.0:
        return 1
    if x < 0.0:
        return -1
    return 0


# ---------------------------------------------------------------------------
# Growth certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSupport:
    """a_n = 0 for every n > last. last = -1 denotes the zero sequence."""

    last: int

    def __post_init__(self):
        if self.last < -1:
            raise ValueError(f"FiniteSupport.last must be >= -1, got {self.last}")


@dataclass(frozen=True)
class Bounded:
    """|a_n| <= bound for all n."""

    bound: float

    def __post_init__(self):
        if not (self.bound >= 0.0 and math.isfinite(self.bound)):
            raise ValueError(f"Bounded.bound must be finite and >= 0, got {self.bound}")


@dataclass(frozen=True)
class GeometricEnvelope:
    """|a_n| <= scale * ratio**n for all n >= start.

    ``from_asymptotic(M, b)`` builds the envelope for a sequence known to
    satisfy a_n ~ M * b**n asymptotically; the factor 2 it inserts absorbs
    the slack between the asymptotic statement and a hard bound.
    """

    scale: float
    ratio: float
    start: int = 0

    def __post_init__(self):
        if not (self.scale >= 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"GeometricEnvelope.scale must be finite and >= 0, got {self.scale}")
        if not (self.ratio >= 0.0 and math.isfinite(self.ratio)):
            raise ValueError(f"GeometricEnvelope.ratio must be finite and >= 0, got {self.ratio}")
        if self.start < 0:
            raise ValueError("GeometricEnvelope.start must be >= 0")

    @classmethod
    def from_asymptotic(cls, scale: float, ratio: float, start: int = 0) -> "GeometricEnvelope":
        return cls(2.0 * abs(scale), abs(ratio), start)


@dataclass(frozen=True)
class FactorialGeometric:
    """|a_n| <= scale * n! * ratio**n for all n >= start.

    Describes coefficient sequences that grow factorially while their
    terms a_n * gamma**n / n! stay geometric with ratio |ratio * gamma|.
    Covers measures built from probability mass functions (a_n =
    n! * p_n / gamma**n) and derivative sequences of functions with a
    finite convergence radius. Term sums converge only for
    |gamma| < 1/ratio, and factorial-weighted inner products against
    such sequences diverge, so geometry rejects this certificate on
    infinite sets.
    """

    scale: float
    ratio: float
    start: int = 0

    def __post_init__(self):
        if not (self.scale >= 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"FactorialGeometric.scale must be finite and >= 0, got {self.scale}")
        if not (self.ratio >= 0.0 and math.isfinite(self.ratio)):
            raise ValueError(f"FactorialGeometric.ratio must be finite and >= 0, got {self.ratio}")
        if self.start < 0:
            raise ValueError("FactorialGeometric.start must be >= 0")


@dataclass(frozen=True)
class Unverified:
    """No growth information. Infinite-set queries fail loudly."""


GrowthCertificate = Union[FiniteSupport, Bounded, GeometricEnvelope, FactorialGeometric, Unverified]


# ---------------------------------------------------------------------------
# Tail models and coefficient sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroTail:
    """a_n = 0 beyond the prefix."""


@dataclass(frozen=True)
class ConstantTail:
    """a_n = value beyond the prefix."""

    value: float


@dataclass(frozen=True)
class GeometricTail:
    """a_n = scale * ratio**n beyond the prefix (n is the global index)."""

    scale: float
    ratio: float


@dataclass(frozen=True)
class CustomTail:
    """a_n = rule(n) beyond the prefix.

    ``log_rule``, when provided, returns (sign, log|a_n|) and is used for
    indices where rule(n) would overflow a float.
    """

    rule: Callable[[int], float]
    log_rule: Callable[[int], tuple[int, float]] | None = None


TailModel = Union[ZeroTail, ConstantTail, GeometricTail, CustomTail]


@dataclass(frozen=True)
class CoefficientSequence:
    """Total map n -> a_n given by an explicit prefix plus a tail model,
    together with a growth certificate for the whole sequence."""

    prefix: tuple[float, ...] = ()
    tail: TailModel = field(default_factory=ZeroTail)
    certificate: GrowthCertificate = field(default_factory=Unverified)

    def a(self, n: int) -> float:
        if n < 0:
            raise ValueError("index must be a natural number")
        if n < len(self.prefix):
            return self.prefix[n]
        t = self.tail
        if isinstance(t, ZeroTail):
            return 0.0
        if isinstance(t, ConstantTail):
            return t.value
        if isinstance(t, GeometricTail):
            if t.scale == 0.0:
                return 0.0
            # closed form in logs for indices where ratio**n overflows
            if t.ratio != 0.0 and abs(n * math.log(abs(t.ratio))) > _LOG_SAFE:
                s, lg = self.log_a(n)
                return _exp_signed(s, lg)
            return t.scale * t.ratio ** n
        return t.rule(n)

    def log_a(self, n: int) -> tuple[int, float]:
        """Return (sign(a_n), log|a_n|); (0, -inf) when a_n = 0."""
        if n >= len(self.prefix):
            t = self.tail
            if isinstance(t, GeometricTail):
                if t.scale == 0.0 or t.ratio == 0.0:
                    # ratio 0 still contributes at the first tail index via 0**n only if n==0
                    if t.ratio == 0.0 and t.scale != 0.0 and n == 0:
                        return _sign(t.scale), math.log(abs(t.scale))
                    return 0, -math.inf
                s = _sign(t.scale) * (-1 if (t.ratio < 0 and n % 2) else 1)
                return s, math.log(abs(t.scale)) + n * math.log(abs(t.ratio))
            if isinstance(t, CustomTail) and t.log_rule is not None:
                return t.log_rule(n)
        a = self.a(n)
        if a == 0.0:
            return 0, -math.inf
        if math.isinf(a):
            return _sign(a), math.inf
        return _sign(a), math.log(abs(a))


def finite_sequence(coeffs: Iterable[float]) -> CoefficientSequence:
    prefix = tuple(float(c) for c in coeffs)
    return CoefficientSequence(prefix, ZeroTail(), FiniteSupport(len(prefix) - 1))


def constant_sequence(value: float, prefix: Iterable[float] = ()) -> CoefficientSequence:
    prefix = tuple(float(c) for c in prefix)
    bound = max([abs(value)] + [abs(c) for c in prefix])
    return CoefficientSequence(prefix, ConstantTail(float(value)), Bounded(bound))


def geometric_sequence(scale: float, ratio: float) -> CoefficientSequence:
    cert = GeometricEnvelope(abs(scale), abs(ratio), 0)
    return CoefficientSequence((), GeometricTail(float(scale), float(ratio)), cert)


def rule_sequence(
    rule: Callable[[int], float],
    certificate: GrowthCertificate,
    prefix: Iterable[float] = (),
    log_rule: Callable[[int], tuple[int, float]] | None = None,
) -> CoefficientSequence:
    return CoefficientSequence(tuple(float(c) for c in prefix), CustomTail(rule, log_rule), certificate)


@dataclass(frozen=True)
class TermBackedSequence:
    """Coefficient sequence defined through prescribed term values.

    Stores the term function q(n) = a_n * g**n / n! at the presentation
    value g = ``presentation_gamma`` and derives a_n = n! * q(n) / g**n on
    demand (exactly, via Fraction, with a single final rounding). Term
    evaluation at the presentation value short-circuits to q itself, so
    algebraic combinations keep their term functions bit-exact instead of
    round-tripping through n!.
    """

    term_rule: Callable[[int], float]
    presentation_gamma: float
    certificate: GrowthCertificate

    def a(self, n: int) -> float:
        if n < 0:
            raise ValueError("index must be a natural number")
        q = self.term_rule(n)
        if q == 0.0:
            return 0.0
        if not math.isfinite(q):
            return q
        try:
            val = Fraction(q) * math.factorial(n)
            if self.presentation_gamma != 1.0:
                val /= Fraction(self.presentation_gamma) ** n
            return float(val)
        except OverflowError:
            s, lg = self.log_a(n)
            return _exp_signed(s, lg)

    def log_a(self, n: int) -> tuple[int, float]:
        q = self.term_rule(n)
        if q == 0.0:
            return 0, -math.inf
        s = _sign(q)
        lg = math.lgamma(n + 1) + math.log(abs(q))
        g = self.presentation_gamma
        if g != 1.0:
            if g < 0.0 and n % 2:
                s = -s
            lg -= n * math.log(abs(g))
        return s, lg


SequenceLike = Union[CoefficientSequence, TermBackedSequence]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedLogTerm:
    """One series term in sign + log-magnitude form.

    sign is -1, 0, or +1; log_mag is log|a_n * gamma**n / n!| and -inf
    exactly when sign = 0.
    """

    n: int
    sign: int
    log_mag: float

    @property
    def value(self) -> float:
        return _exp_signed(self.sign, self.log_mag)


def _exp_signed(sign: int, log_mag: float) -> float:
    if sign == 0:
        return 0.0
    if log_mag > _LOG_HUGE:
        return sign * math.inf
    if log_mag < _LOG_TINY:
        return 0.0
    return sign * math.exp(log_mag)


def term(seq: SequenceLike, gamma: float, n: int) -> SignedLogTerm:
    """Sign and log magnitude of a_n * gamma**n / n! (0**0 = 1)."""
    if n < 0:
        raise ValueError("index must be a natural number")
    sa, la = seq.log_a(n)
    if sa == 0:
        return SignedLogTerm(n, 0, -math.inf)
    if n == 0:
        return SignedLogTerm(0, sa, la)
    if gamma == 0.0:
        return SignedLogTerm(n, 0, -math.inf)
    sign = -sa if (gamma < 0.0 and n % 2) else sa
    log_mag = la + n * math.log(abs(gamma)) - math.lgamma(n + 1)
    return SignedLogTerm(n, sign, log_mag)


def term_value(seq: SequenceLike, gamma: float, n: int) -> float:
    """Linear-space value of a_n * gamma**n / n!.

    Computed directly when every intermediate stays in the normal range
    (exact to a few ulp), through the log form otherwise.
    """
    v, _ = _term_and_err(seq, gamma, n)
    return v


def _term_and_err(seq: SequenceLike, gamma: float, n: int) -> tuple[float, float]:
    """Term value plus an absolute roundoff estimate for that value."""
    if n < 0:
        raise ValueError("index must be a natural number")
    if isinstance(seq, TermBackedSequence) and gamma == seq.presentation_gamma:
        q = seq.term_rule(n)
        return q, abs(q) * 2.0 * _ULP
    a = seq.a(n)
    if a == 0.0:
        return 0.0, 0.0
    if n == 0:
        return a, abs(a) * _ULP
    if gamma == 0.0:
        return 0.0, 0.0
    if math.isfinite(a):
        la = math.log(abs(a))
        npow = n * math.log(abs(gamma))
        if n <= _MAX_FLOAT_FACTORIAL and abs(npow) < _LOG_SAFE and abs(la + npow) < _LOG_SAFE:
            v = a * gamma ** n / _FACT[n]
            if math.isfinite(v):
                return v, abs(v) * 4.0 * _ULP
    t = term(seq, gamma, n)
    v = t.value
    err = abs(v) * (abs(t.log_mag) + 4.0) * _ULP if v != 0.0 and math.isfinite(v) else 0.0
    return v, err


# ---------------------------------------------------------------------------
# Tail bounds and truncation planning
# ---------------------------------------------------------------------------


def _factorial_ratio_tail(scale: float, g: float, last_index: int) -> float:
    """Upper bound for sum_{n > last_index} scale * g**n / n!.

    Uses the ratio test: beyond N+1 the terms shrink by at least
    g/(N+2) per step, so the tail is dominated by the geometric series
    t_{N+1} / (1 - g/(N+2)) once N+2 > g. The global bound
    scale * e**g covers the region before that, and taking the min of
    the two keeps the bound non-increasing in N.
    """
    if scale == 0.0 or g == 0.0:
        return 0.0
    try:
        global_bound = scale * math.exp(g)
    except OverflowError:
        global_bound = math.inf
    n = last_index
    if n + 2 <= g:
        return global_bound
    q = g / (n + 2)
    log_t = math.log(scale) + (n + 1) * math.log(g) - math.lgamma(n + 2)
    if log_t > _LOG_HUGE:
        ratio_bound = math.inf
    else:
        ratio_bound = math.exp(log_t) / (1.0 - q)
    return min(global_bound, ratio_bound)


def tail_bound(cert: GrowthCertificate, gamma: float, last_index: int) -> float:
    """Certified upper bound for sum_{n > last_index} |a_n * gamma**n / n!|.

    Returns +inf when the certificate cannot bound the tail (Unverified,
    indices before an envelope's start, or a FactorialGeometric envelope
    outside its convergence radius).
    """
    if last_index < 0:
        raise ValueError("last_index must be >= 0")
    g = abs(gamma)
    if isinstance(cert, FiniteSupport):
        return 0.0 if last_index >= cert.last else math.inf
    if isinstance(cert, Bounded):
        return _factorial_ratio_tail(cert.bound, g, last_index)
    if isinstance(cert, GeometricEnvelope):
        if last_index < cert.start:
            return math.inf
        return _factorial_ratio_tail(cert.scale, cert.ratio * g, last_index)
    if isinstance(cert, FactorialGeometric):
        if last_index < cert.start:
            return math.inf
        q = cert.ratio * g
        if cert.scale == 0.0 or q == 0.0:
            return 0.0
        if q >= 1.0:
            return math.inf
        log_t = math.log(cert.scale) + (last_index + 1) * math.log(q)
        if log_t > _LOG_HUGE:
            return math.inf
        return math.exp(log_t) / (1.0 - q)
    if isinstance(cert, Unverified):
        return math.inf
    raise TypeError(f"unknown certificate type: {type(cert).__name__}")


@dataclass(frozen=True)
class TruncationPlan:
    """Sum indices 0..last_index; the rest is bounded by tail_bound."""

    last_index: int
    tail_bound: float


_PLAN_CAP = 10 ** 7


def plan_truncation(cert: GrowthCertificate, gamma: float, eps: float) -> TruncationPlan:
    """Smallest last_index whose certified tail bound is <= eps.

    Found by doubling then bisection (tail_bound is non-increasing in
    the index). FiniteSupport plans stop exactly at the support bound.
    Raises DivergenceUnknown when no finite index can satisfy eps.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if isinstance(cert, Unverified):
        raise DivergenceUnknown(
            "cannot truncate an infinite sum without a growth certificate"
        )
    if isinstance(cert, FiniteSupport):
        last = max(cert.last, 0)
        return TruncationPlan(last, 0.0)
    if isinstance(cert, FactorialGeometric):
        if cert.scale > 0.0 and cert.ratio * abs(gamma) >= 1.0:
            raise DivergenceUnknown(
                f"factorial-geometric envelope with ratio {cert.ratio} does not "
                f"converge at gamma={gamma}"
            )
    hi = max(1, getattr(cert, "start", 0))
    while tail_bound(cert, gamma, hi) > eps:
        hi *= 2
        if hi > _PLAN_CAP:
            raise DivergenceUnknown(
                f"no truncation index below {_PLAN_CAP} meets eps={eps}"
            )
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_bound(cert, gamma, mid) <= eps:
            hi = mid
        else:
            lo = mid + 1
    return TruncationPlan(lo, tail_bound(cert, gamma, lo))


# ---------------------------------------------------------------------------
# Compensated summation
# ---------------------------------------------------------------------------


class _NeumaierSum:
    """Compensated accumulator; error stays O(eps * sum|x|) regardless of order."""

    __slots__ = ("high", "comp")

    def __init__(self):
        self.high = 0.0
        self.comp = 0.0

    def add(self, x: float) -> None:
        t = self.high + x
        if abs(self.high) >= abs(x):
            self.comp += (self.high - t) + x
        else:
            self.comp += (x - t) + self.high
        self.high = t

    @property
    def value(self) -> float:
        return self.high + self.comp


def sum_terms(seq: SequenceLike, gamma: float, indices: Iterable[int]) -> tuple[float, float]:
    """Sum the terms at the given indices, split by sign.

    Returns (pos, neg) with pos = sum of positive terms and neg = minus
    the sum of negative terms; both are >= 0 and the signed total is
    pos - neg. Each group uses compensated summation, so any
    permutation of ``indices`` changes the result by at most a few ulp.
    """
    pos, neg, _ = sum_terms_detailed(seq, gamma, indices)
    return pos, neg


def sum_terms_detailed(
    seq: SequenceLike, gamma: float, indices: Iterable[int]
) -> tuple[float, float, float]:
    """Like sum_terms but also returns an absolute roundoff estimate."""
    pos = _NeumaierSum()
    neg = _NeumaierSum()
    err = 0.0
    count = 0
    for n in indices:
        v, e = _term_and_err(seq, gamma, n)
        err += e
        count += 1
        if v > 0.0:
            pos.add(v)
        elif v < 0.0:
            neg.add(-v)
    p, m = pos.value, neg.value
    err += 2.0 * _ULP * (p + m)
    return p, m, err
