"""Taylor-coefficient representations of analytic functions.

An analytic function is carried as the sequence of its derivatives at a
center, so its value at x is the total mass of the Taylor measure with
gamma = x - center. This module builds such representations for a small
set of builtins, evaluates them with certified truncation error, and
closes them under multiplication, powers, linear combination, and
recentering (the Taylor shift). Grid sup-distance and interval L^p
norms give measurable density diagnostics on compact intervals.

Internally the arithmetic runs on the normalized values d_n = a_n / n!
(the terms at gamma = 1), which stay representable even when the raw
derivatives grow factorially; results are stored as term-backed
sequences so the factorials never round-trip through floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import CenterMismatch, DivergenceUnknown, OutOfDomain, QuadratureStall
from .kernel import (
    Bounded,
    FactorialGeometric,
    FiniteSupport,
    GeometricEnvelope,
    SequenceLike,
    TermBackedSequence,
    Unverified,
    _FACT,
    _MAX_FLOAT_FACTORIAL,
    _term_and_err,
    constant_sequence,
    finite_sequence,
    rule_sequence,
    tail_bound,
)
from .measure import MeasureValue, NatSet, TaylorMeasure, evaluate

__all__ = [
    "AnalyticRep",
    "builtin",
    "cos_rep",
    "eval_rep",
    "exp_rep",
    "geometric_rep",
    "linear_combine",
    "lp_norm_on_interval",
    "multiply",
    "polynomial_rep",
    "power",
    "recenter",
    "sin_rep",
    "sup_distance_on_grid",
    "truncate_rep",
]

_SHIFT_CAP = 10 ** 6


@dataclass(frozen=True)
class AnalyticRep:
    """f represented by its derivative sequence a_n = f^(n)(center).

    radius_hint bounds the evaluation region |x - center| < radius_hint;
    it is declared data, not an inferred radius of convergence.
    """

    center: float
    coefficients: SequenceLike
    radius_hint: float

    def __post_init__(self):
        if not self.radius_hint > 0.0:
            raise ValueError("radius_hint must be positive")


def _d_value(seq: SequenceLike, n: int) -> float:
    """d_n = a_n / n!, the series term at gamma = 1."""
    return _term_and_err(seq, 1.0, n)[0]


def _memo_d(seq: SequenceLike) -> Callable[[int], float]:
    cache: dict[int, float] = {}

    def d(n: int) -> float:
        if n not in cache:
            cache[n] = _d_value(seq, n)
        return cache[n]

    return d


# ---------------------------------------------------------------------------
# builtins


def exp_rep(center: float = 0.0) -> AnalyticRep:
    """The exponential: a_n = e^center for every n."""
    return AnalyticRep(center, constant_sequence(math.exp(center)), math.inf)


def sin_rep(center: float = 0.0) -> AnalyticRep:
    """The sine: derivatives cycle through sin, cos, -sin, -cos at center."""
    cycle = (math.sin(center), math.cos(center), -math.sin(center), -math.cos(center))
    return AnalyticRep(
        center, rule_sequence(lambda n: cycle[n % 4], Bounded(1.0)), math.inf
    )


def cos_rep(center: float = 0.0) -> AnalyticRep:
    """The cosine: derivatives cycle through cos, -sin, -cos, sin at center."""
    cycle = (math.cos(center), -math.sin(center), -math.cos(center), math.sin(center))
    return AnalyticRep(
        center, rule_sequence(lambda n: cycle[n % 4], Bounded(1.0)), math.inf
    )


def _taylor_shift_monomials(coeffs: Sequence[float], c: float) -> list[float]:
    """Coefficients of sum coeffs[j] x^j rewritten in powers of (x - c)."""
    s = [float(v) for v in coeffs]
    for k in range(len(s)):
        for j in range(len(s) - 2, k - 1, -1):
            s[j] += c * s[j + 1]
    return s


def polynomial_rep(coeffs: Sequence[float], center: float = 0.0) -> AnalyticRep:
    """Polynomial sum coeffs[j] x^j, expanded around center.

    The derivative sequence a_k = k! s_k comes from the exact finite
    Taylor shift of the monomial coefficients, so it has finite support.
    """
    shifted = _taylor_shift_monomials(coeffs, center)
    while shifted and shifted[-1] == 0.0:
        shifted.pop()
    deg = len(shifted) - 1
    if deg <= _MAX_FLOAT_FACTORIAL:
        seq: SequenceLike = finite_sequence(
            [_FACT[k] * shifted[k] for k in range(deg + 1)]
        )
    else:
        table = {k: shifted[k] for k in range(deg + 1)}
        seq = TermBackedSequence(lambda n: table.get(n, 0.0), 1.0, FiniteSupport(deg))
    return AnalyticRep(center, seq, math.inf)


def geometric_rep(center: float = 0.0) -> AnalyticRep:
    """f(x) = 1/(1 - x) around a center with |center| < 1.

    a_n = n! / (1 - center)^(n+1); the radius hint 1 - |center| is the
    conservative symmetric distance (the pole sits at x = 1).
    """
    if not abs(center) < 1.0:
        raise OutOfDomain(
            f"the geometric series needs |center| < 1, got {center}"
        )
    base = 1.0 / (1.0 - center)
    log_base = math.log(base)

    def rule(n: int) -> float:
        if n <= _MAX_FLOAT_FACTORIAL:
            v = _FACT[n] * base ** (n + 1)
            if math.isfinite(v):
                return v
        return math.inf

    def log_rule(n: int) -> tuple[int, float]:
        return 1, math.lgamma(n + 1) + (n + 1) * log_base

    seq = rule_sequence(rule, FactorialGeometric(base, base, 0), log_rule=log_rule)
    return AnalyticRep(center, seq, 1.0 - abs(center))


_BUILTINS = {
    "exp": exp_rep,
    "sin": sin_rep,
    "cos": cos_rep,
    "geometric": geometric_rep,
}


def builtin(name: str, center: float = 0.0, coeffs: Sequence[float] | None = None) -> AnalyticRep:
    """Construct a named representation: exp, sin, cos, geometric, or
    polynomial (which needs its monomial coefficients)."""
    if name == "polynomial":
        if coeffs is None:
            raise ValueError("polynomial needs its coefficient list")
        return polynomial_rep(coeffs, center)
    if name in _BUILTINS:
        return _BUILTINS[name](center)
    raise ValueError(f"unknown builtin {name!r}")


# ---------------------------------------------------------------------------
# evaluation


def _require_inside(rep: AnalyticRep, x: float) -> float:
    gamma = x - rep.center
    if not abs(gamma) < rep.radius_hint:
        raise OutOfDomain(
            f"x = {x} is outside |x - {rep.center}| < {rep.radius_hint}"
        )
    return gamma


def eval_rep(rep: AnalyticRep, x: float, eps: float = 1e-12) -> MeasureValue:
    """f(x) as the total measure mass at gamma = x - center, within eps.

    x = center returns a_0 exactly with zero reported error.
    """
    gamma = _require_inside(rep, x)
    if gamma == 0.0:
        return MeasureValue(_d_value(rep.coefficients, 0), 0.0)
    return evaluate(TaylorMeasure(rep.coefficients, gamma), NatSet.all(), eps)


# ---------------------------------------------------------------------------
# certificates in d-space
#
# Envelopes for d_n = a_n/n! come in two shapes: ("exp", S, R) meaning
# |d_n| <= S R^n / n! (a Bounded/GeometricEnvelope coefficient family)
# and ("geo", S, R) meaning |d_n| <= S R^n (a FactorialGeometric one).

_RATIO_FLOOR = 1e-12


def _d_envelope(seq: SequenceLike) -> tuple[str, float, float] | None:
    cert = seq.certificate
    if isinstance(cert, Unverified):
        return None
    if isinstance(cert, FiniteSupport):
        if cert.last < 0:
            return "exp", 0.0, 1.0
        ds = [abs(_d_value(seq, n)) for n in range(cert.last + 1)]
        if cert.last <= _MAX_FLOAT_FACTORIAL:
            s = max(ds[n] * _FACT[n] for n in range(len(ds)))
            if math.isfinite(s):
                return "exp", s, 1.0
        return "geo", max(ds), 1.0
    if isinstance(cert, Bounded):
        return "exp", cert.bound, 1.0
    if isinstance(cert, (GeometricEnvelope, FactorialGeometric)):
        kind = "exp" if isinstance(cert, GeometricEnvelope) else "geo"
        ratio = max(cert.ratio, _RATIO_FLOOR)
        scale = cert.scale
        # the envelope only binds from cert.start on; widen the scale to
        # cover the explicit values before it
        for n in range(min(cert.start, _MAX_FLOAT_FACTORIAL)):
            d = abs(_d_value(seq, n))
            unit = ratio ** n / _FACT[n] if kind == "exp" else ratio ** n
            if d > scale * unit:
                scale = d / unit
        return kind, scale, ratio
    return None


def _cert_from_envelope(env: tuple[str, float, float] | None):
    if env is None:
        return Unverified()
    kind, s, r = env
    if kind == "exp":
        return GeometricEnvelope(s, r, 0)
    return FactorialGeometric(s, r, 0)


def _envelope_product(e1, e2):
    if e1 is None or e2 is None:
        return None
    k1, s1, r1 = e1
    k2, s2, r2 = e2
    if k1 == "exp" and k2 == "exp":
        # sum_n S1 R1^n/n! S2 R2^(l-n)/(l-n)! = S1 S2 (R1+R2)^l / l!
        return "exp", s1 * s2, r1 + r2
    if k1 == "geo" and k2 == "geo":
        # (l+1) S1 S2 Rmax^l <= 2.05 S1 S2 (1.25 Rmax)^l
        return "geo", 2.05 * s1 * s2, 1.25 * max(r1, r2)
    if k1 == "geo":
        (k1, s1, r1), (k2, s2, r2) = (k2, s2, r2), (k1, s1, r1)
    # exp times geo: S2 R2^l S1 sum (R1/R2)^n/n! <= S1 S2 e^(R1/R2) R2^l
    r2 = max(r2, _RATIO_FLOOR)
    return "geo", s1 * s2 * math.exp(min(r1 / r2, 700.0)), r2


def _envelope_sum(e1, e2, w1: float, w2: float):
    if e1 is None or e2 is None:
        return None
    k1, s1, r1 = e1
    k2, s2, r2 = e2
    if k1 == k2:
        return k1, w1 * s1 + w2 * s2, max(r1, r2)
    # mix: an exp envelope is also a geo envelope (n! >= 1)
    return "geo", w1 * s1 + w2 * s2, max(r1, r2)


def _both_finite(r1: AnalyticRep, r2: AnalyticRep) -> bool:
    return isinstance(r1.coefficients.certificate, FiniteSupport) and isinstance(
        r2.coefficients.certificate, FiniteSupport
    )


def _finite_d_list(rep: AnalyticRep) -> list[float]:
    last = rep.coefficients.certificate.last
    return [_d_value(rep.coefficients, n) for n in range(last + 1)]


def _rep_from_d_list(center: float, d: list[float], radius: float) -> AnalyticRep:
    while d and d[-1] == 0.0:
        d.pop()
    table = {n: d[n] for n in range(len(d))}
    seq = TermBackedSequence(lambda n: table.get(n, 0.0), 1.0, FiniteSupport(len(d) - 1))
    return AnalyticRep(center, seq, radius)


# ---------------------------------------------------------------------------
# algebra


def multiply(r1: AnalyticRep, r2: AnalyticRep) -> AnalyticRep:
    """Pointwise product: the binomial convolution of the derivative
    sequences, computed as a plain convolution of the d_n = a_n/n!."""
    if r1.center != r2.center:
        raise CenterMismatch(
            f"centers differ: {r1.center} vs {r2.center}; recenter first"
        )
    radius = min(r1.radius_hint, r2.radius_hint)
    if _both_finite(r1, r2):
        d1, d2 = _finite_d_list(r1), _finite_d_list(r2)
        out = [0.0] * max(len(d1) + len(d2) - 1, 0)
        for i, u in enumerate(d1):
            for j, v in enumerate(d2):
                out[i + j] += u * v
        return _rep_from_d_list(r1.center, out, radius)

    da, db = _memo_d(r1.coefficients), _memo_d(r2.coefficients)
    cache: dict[int, float] = {}

    def d_rule(l: int) -> float:
        if l not in cache:
            cache[l] = math.fsum(da(n) * db(l - n) for n in range(l + 1))
        return cache[l]

    cert = _cert_from_envelope(
        _envelope_product(_d_envelope(r1.coefficients), _d_envelope(r2.coefficients))
    )
    return AnalyticRep(r1.center, TermBackedSequence(d_rule, 1.0, cert), radius)


def _constant_rep(value: float, center: float) -> AnalyticRep:
    return AnalyticRep(center, finite_sequence([value]), math.inf)


def power(rep: AnalyticRep, n: int) -> AnalyticRep:
    """f^n by binary exponentiation; n = 0 is the constant 1."""
    if n < 0:
        raise ValueError("power needs n >= 0")
    result = _constant_rep(1.0, rep.center)
    base = rep
    while n:
        if n & 1:
            result = multiply(result, base)
        base_needed = n > 1
        if base_needed:
            base = multiply(base, base)
        n >>= 1
    return result


def linear_combine(alpha: float, r1: AnalyticRep, beta: float, r2: AnalyticRep) -> AnalyticRep:
    """alpha*f + beta*g at a common center."""
    if r1.center != r2.center:
        raise CenterMismatch(
            f"centers differ: {r1.center} vs {r2.center}; recenter first"
        )
    radius = min(r1.radius_hint, r2.radius_hint)
    if _both_finite(r1, r2):
        d1, d2 = _finite_d_list(r1), _finite_d_list(r2)
        out = [0.0] * max(len(d1), len(d2))
        for i, u in enumerate(d1):
            out[i] += alpha * u
        for i, v in enumerate(d2):
            out[i] += beta * v
        return _rep_from_d_list(r1.center, out, radius)

    da, db = _memo_d(r1.coefficients), _memo_d(r2.coefficients)

    def d_rule(n: int) -> float:
        return alpha * da(n) + beta * db(n)

    cert = _cert_from_envelope(
        _envelope_sum(
            _d_envelope(r1.coefficients),
            _d_envelope(r2.coefficients),
            abs(alpha),
            abs(beta),
        )
    )
    return AnalyticRep(r1.center, TermBackedSequence(d_rule, 1.0, cert), radius)


def truncate_rep(rep: AnalyticRep, N: int) -> AnalyticRep:
    """The degree-N Taylor polynomial of the representation (a polynomial,
    so the result is entire)."""
    if N < 0:
        raise ValueError("truncation degree must be >= 0")
    d = [_d_value(rep.coefficients, n) for n in range(N + 1)]
    return _rep_from_d_list(rep.center, d, math.inf)


# ---------------------------------------------------------------------------
# recentering


def _full_a_envelope(seq: SequenceLike) -> tuple[str, float, float]:
    """An all-index a-space envelope: ("bounded", M, _), ("ge", s, r) with
    |a_n| <= s r^n, or ("fg", s, r) with |a_n| <= s n! r^n."""
    cert = seq.certificate
    if isinstance(cert, Bounded):
        return "bounded", cert.bound, 1.0
    if isinstance(cert, (GeometricEnvelope, FactorialGeometric)):
        kind = "ge" if isinstance(cert, GeometricEnvelope) else "fg"
        ratio = max(cert.ratio, _RATIO_FLOOR)
        scale = cert.scale
        for n in range(min(cert.start, _MAX_FLOAT_FACTORIAL)):
            d = abs(_d_value(seq, n))
            unit = ratio ** n / _FACT[n] if kind == "ge" else ratio ** n
            if d > scale * unit:
                scale = d / unit
        return kind, scale, ratio
    raise DivergenceUnknown(
        "recentering an infinite representation needs a growth certificate"
    )


def _shift_tail(env: tuple[str, float, float], k: int, dist: float, M: int) -> float:
    """Bound on sum_{m > M} |d_{k+m}| binom(k+m, m) dist^m."""
    kind, s, r = env
    if kind == "bounded":
        # sum M_b dist^m / (m! k!) tails like the exponential series
        t = tail_bound(Bounded(s), dist, M)
        return math.exp(min(math.log(t) - math.lgamma(k + 1), 700.0)) if t > 0.0 else 0.0
    if kind == "ge":
        t = tail_bound(Bounded(s), r * dist, M)
        if t <= 0.0:
            return 0.0
        log_t = math.log(t) + k * math.log(r) - math.lgamma(k + 1)
        return math.exp(min(log_t, 700.0))
    q = r * dist
    rho = (k + M + 2) / (M + 2)
    if q * rho >= 1.0:
        return math.inf
    log_t = (
        math.log(s)
        + k * math.log(r)
        + math.lgamma(k + 1)
        + (math.lgamma(k + M + 2) - math.lgamma(M + 2) - math.lgamma(k + 1))
        + (M + 1) * math.log(q)
        - math.log1p(-q * rho)
    )
    return math.exp(min(log_t, 700.0))


def _shifted_cert(env: tuple[str, float, float], dist: float):
    kind, s, r = env
    if kind == "bounded":
        return Bounded(s * math.exp(dist))
    if kind == "ge":
        return GeometricEnvelope(s * math.exp(r * dist), r, 0)
    q = r * dist
    if q >= 1.0:
        raise OutOfDomain(
            "shift distance reaches the certificate's divergence radius"
        )
    return FactorialGeometric(s / (1.0 - q), r / (1.0 - q), 0)


def _shifted_d_bound(cert, k: int) -> float:
    """d-space envelope value of the transformed certificate at index k."""
    if isinstance(cert, Bounded):
        return math.exp(math.log(cert.bound) - math.lgamma(k + 1)) if cert.bound > 0 else 0.0
    if isinstance(cert, GeometricEnvelope):
        if cert.scale <= 0.0:
            return 0.0
        return math.exp(
            min(math.log(cert.scale) + k * math.log(cert.ratio) - math.lgamma(k + 1), 700.0)
        )
    if cert.scale <= 0.0:
        return 0.0
    return math.exp(min(math.log(cert.scale) + k * math.log(cert.ratio), 700.0))


def recenter(rep: AnalyticRep, new_center: float, eps: float = 1e-12) -> AnalyticRep:
    """Re-express the function around a new center inside the validity
    region via the Taylor shift c_k = sum_m a_{k+m} delta^m / m!.

    Finite-support representations shift exactly. Otherwise each new
    coefficient is a truncated series whose certified tail stays below
    eps times the new certificate's envelope at that index; that small
    bias is not folded into later abs_error fields.
    """
    delta = new_center - rep.center
    if delta == 0.0:
        return rep
    dist = abs(delta)
    if not dist < rep.radius_hint:
        raise OutOfDomain(
            f"new center {new_center} outside |x - {rep.center}| < {rep.radius_hint}"
        )
    d = _memo_d(rep.coefficients)
    cert = rep.coefficients.certificate

    if isinstance(cert, FiniteSupport):
        last = cert.last
        out = []
        for k in range(last + 1):
            terms = []
            coef = 1.0
            for m in range(last - k + 1):
                terms.append(d(k + m) * coef)
                coef *= delta * (k + m + 1) / (m + 1)
            out.append(math.fsum(terms))
        return _rep_from_d_list(new_center, out, rep.radius_hint)

    env = _full_a_envelope(rep.coefficients)
    new_cert = _shifted_cert(env, dist)
    new_radius = rep.radius_hint if math.isinf(rep.radius_hint) else rep.radius_hint - dist
    cache: dict[int, float] = {}

    def d_rule(k: int) -> float:
        if k in cache:
            return cache[k]
        budget = max(eps * _shifted_d_bound(new_cert, k), 5e-324)
        M = 4
        while _shift_tail(env, k, dist, M) > budget:
            M *= 2
            if M > _SHIFT_CAP:
                raise DivergenceUnknown(
                    f"shift series for coefficient {k} does not settle below "
                    f"its budget within {_SHIFT_CAP} terms"
                )
        terms = []
        coef = 1.0
        for m in range(M + 1):
            terms.append(d(k + m) * coef)
            coef *= delta * (k + m + 1) / (m + 1)
        cache[k] = math.fsum(terms)
        return cache[k]

    return AnalyticRep(
        new_center, TermBackedSequence(d_rule, 1.0, new_cert), new_radius
    )


# ---------------------------------------------------------------------------
# density and quadrature diagnostics


def _require_interval(rep: AnalyticRep, K: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(K[0]), float(K[1])
    if not lo < hi:
        raise ValueError(f"interval must satisfy lo < hi, got [{lo}, {hi}]")
    reach = max(abs(lo - rep.center), abs(hi - rep.center))
    if not reach < rep.radius_hint:
        raise OutOfDomain(
            f"[{lo}, {hi}] leaves |x - {rep.center}| < {rep.radius_hint}"
        )
    return lo, hi


def sup_distance_on_grid(
    rep: AnalyticRep,
    oracle: Callable[[float], float],
    K: tuple[float, float],
    m: int = 1001,
    eps: float = 1e-12,
) -> float:
    """max_i |f(x_i) - oracle(x_i)| over m uniform grid points on K."""
    lo, hi = _require_interval(rep, K)
    if m < 2:
        raise ValueError("need at least 2 grid points")
    worst = 0.0
    for i in range(m):
        x = lo + (hi - lo) * i / (m - 1)
        worst = max(worst, abs(eval_rep(rep, x, eps).value - oracle(x)))
    return worst


def lp_norm_on_interval(
    rep: AnalyticRep,
    p: float,
    K: tuple[float, float],
    eps: float = 1e-9,
    depth_cap: int = 16,
) -> float:
    """(integral of |f|^p over K)^(1/p) by composite Simpson refinement.

    Panels double until two successive estimates agree within eps; the
    final value gets one Richardson correction. Raises QuadratureStall
    if depth_cap doublings cannot reach eps.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if depth_cap < 1:
        raise ValueError("depth_cap must be >= 1")
    lo, hi = _require_interval(rep, K)
    eval_eps = min(eps / (100.0 * (hi - lo)), 1e-12)
    cache: dict[float, float] = {}

    def g(x: float) -> float:
        if x not in cache:
            cache[x] = abs(eval_rep(rep, x, eval_eps).value) ** p
        return cache[x]

    def simpson(panels: int) -> float:
        h = (hi - lo) / panels
        acc = g(lo) + g(hi)
        for i in range(1, panels):
            acc += (4.0 if i % 2 else 2.0) * g(lo + i * h)
        return acc * h / 3.0

    panels = 8
    prev = simpson(panels)
    for _ in range(depth_cap):
        panels *= 2
        cur = simpson(panels)
        if abs(cur - prev) <= eps:
            refined = cur + (cur - prev) / 15.0
            return max(refined, 0.0) ** (1.0 / p)
        prev = cur
    raise QuadratureStall(
        f"Simpson refinement did not converge to {eps} within {depth_cap} doublings"
    )
