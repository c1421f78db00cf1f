"""Samplers and SLLN estimators for Taylor measures.

A signed measure built from two power-series densities can be written

    T(B) = c1 * P1(B) - c2 * P2(B),

where the c are reciprocal normalizers and the P are power-series pmfs, so
T(B) is estimated by sampling each pmf and averaging set indicators.  The
normalizers are computed exactly-within-eps by default; they can instead be
estimated from Poisson draws (point = (e**zeta / L) * sum b_{n_i}), which is
the fully stochastic variant for families whose constants are unknown.

Determinism: every draw comes from a counter-based generator keyed by
(seed, stream) and advanced to a block determined by (role, chunk), where
the role separates the independent draw purposes (the two indicator samples,
the two normalizer samples, standalone pmf sampling) and chunks are
fixed-size.  Results are therefore bit-identical for a given RngSpec no
matter how many worker threads participate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSamplerAvailable
from .kernel import Bounded
from .measure import NatSet
from .probability import PowerSeriesPmf

__all__ = [
    "RngSpec",
    "McEstimate",
    "sample_pmf",
    "estimate_measure",
    "estimate_normalizer_poisson",
]

_MASK64 = (1 << 64) - 1
CHUNK = 8192

# counter-block roles: keep independent draw purposes on disjoint substreams
_ROLE_INDICATOR_POS = 0
_ROLE_INDICATOR_NEG = 1
_ROLE_NORMALIZER_POS = 2
_ROLE_NORMALIZER_NEG = 3
_ROLE_PMF_INVERSE = 4
_ROLE_PMF_REJECT = 5
ROLE_STM = 6
ROLE_WALK = 7
ROLE_BROWNIAN = 8


@dataclass(frozen=True)
class RngSpec:
    """Seed and substream id; together they determine every draw."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be nonnegative")


def generator(spec: RngSpec, role: int, chunk: int) -> np.random.Generator:
    """Generator positioned at the counter block for (role, chunk)."""
    bitgen = np.random.Philox(key=[spec.seed & _MASK64, spec.stream & _MASK64])
    bitgen.advance((role << 192) + (chunk << 128))
    return np.random.Generator(bitgen)


@dataclass(frozen=True)
class McEstimate:
    """Point estimate with its standard error and a component breakdown."""

    point: float
    stderr: float
    n_samples: int
    components: dict = field(default_factory=dict)


def _b_values(b, draws: np.ndarray) -> np.ndarray:
    """Evaluate the coefficient rule over integer draws, batched by value."""
    uniques, inverse = np.unique(draws, return_inverse=True)
    vals = np.array([b.a(int(n)) for n in uniques])
    return vals[inverse]


def _inverse_table(p) -> tuple[np.ndarray, int]:
    table, horizon = p.cumulative_table(tail_eps=1e-16)
    cdf = np.asarray(table)
    positive = np.flatnonzero(np.diff(np.concatenate(([0.0], cdf))) > 0.0)
    last_positive = int(positive[-1]) if positive.size else 0
    return cdf, last_positive


def _draw_inverse_chunk(cdf, last_positive, rng, role, chunk, count):
    u = generator(rng, role, chunk).random(count)
    idx = np.searchsorted(cdf, u, side="left")
    return np.minimum(idx, last_positive)


def _sample_inverse(p, rng: RngSpec, L: int, role: int) -> np.ndarray:
    cdf, last_positive = _inverse_table(p)
    out = np.empty(L, dtype=np.int64)
    done = 0
    chunk = 0
    while done < L:
        take = min(CHUNK, L - done)
        out[done : done + take] = _draw_inverse_chunk(
            cdf, last_positive, rng, role, chunk, take
        )
        done += take
        chunk += 1
    return out


def _sample_rejection(p, rng: RngSpec, L: int) -> np.ndarray:
    if not isinstance(p, PowerSeriesPmf):
        raise NoSamplerAvailable(
            "rejection sampling needs a power-series pmf with a bounded "
            "density sequence"
        )
    cert = p.b.certificate
    if not isinstance(cert, Bounded):
        raise NoSamplerAvailable(
            "rejection sampling needs a Bounded certificate on the density "
            f"sequence, not {type(cert).__name__}"
        )
    bound = cert.bound
    out = np.empty(L, dtype=np.int64)
    done = 0
    chunk = 0
    while done < L:
        g = generator(rng, _ROLE_PMF_REJECT, chunk)
        n = g.poisson(p.zeta, CHUNK)
        u = g.random(CHUNK)
        accepted = n[u * bound <= _b_values(p.b, n)]
        take = min(accepted.size, L - done)
        out[done : done + take] = accepted[:take]
        done += take
        chunk += 1
    return out


def sample_pmf(p, rng: RngSpec, L: int, method: str = "auto") -> list[int]:
    """Draw L iid indices from the pmf.

    "auto" uses inverse-CDF from the certified cumulative table; "rejection"
    uses a Poisson(zeta) envelope with acceptance b_n / bound, which needs a
    Bounded density certificate.  Draws depend only on (rng, L, method).
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    if method == "auto":
        method = "inverse_cdf"
    if method == "inverse_cdf":
        if not hasattr(p, "cumulative_table"):
            raise NoSamplerAvailable(
                "inverse-CDF sampling needs a pmf with a certified cumulative "
                "table"
            )
        return _sample_inverse(p, rng, L, _ROLE_PMF_INVERSE).tolist()
    if method == "rejection":
        return _sample_rejection(p, rng, L).tolist()
    raise ValueError(f"unknown sampling method: {method}")


def _membership_mask(draws: np.ndarray, B: NatSet) -> np.ndarray:
    if B.kind == "all":
        return np.ones(draws.shape, dtype=bool)
    listed = np.asarray(B.elements, dtype=np.int64)
    inside = np.isin(draws, listed)
    return inside if B.kind == "finite" else ~inside


def _indicator_proportion(
    p, B: NatSet, L: int, rng: RngSpec, role: int, threads: int
) -> tuple[float, float]:
    """Mean of I(draw in B) over L inverse-CDF draws, with variance of mean."""
    cdf, last_positive = _inverse_table(p)
    spans = []
    start = 0
    chunk = 0
    while start < L:
        take = min(CHUNK, L - start)
        spans.append((chunk, take))
        start += take
        chunk += 1

    def hits(span):
        idx, count = span
        draws = _draw_inverse_chunk(cdf, last_positive, rng, role, idx, count)
        return int(np.count_nonzero(_membership_mask(draws, B)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            total = sum(pool.map(hits, spans))
    else:
        total = sum(hits(s) for s in spans)
    prop = total / L
    var = prop * (1.0 - prop) / (L - 1)
    return prop, var


def _poisson_b_moments(
    zeta: float, b, L: int, rng: RngSpec, role: int, threads: int
) -> tuple[float, float]:
    """Mean and variance-of-mean of b_N over L Poisson(zeta) draws."""
    spans = []
    start = 0
    chunk = 0
    while start < L:
        take = min(CHUNK, L - start)
        spans.append((chunk, take))
        start += take
        chunk += 1

    def stats(span):
        idx, count = span
        draws = generator(rng, role, idx).poisson(zeta, count)
        vals = _b_values(b, draws)
        return float(vals.sum()), float(np.square(vals).sum())

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(stats, spans))
    else:
        parts = [stats(s) for s in spans]
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / L
    sample_var = max(s2 - L * mean * mean, 0.0) / (L - 1)
    return mean, sample_var / L


def estimate_normalizer_poisson(
    zeta: float, b, L: int, rng: RngSpec, threads: int = 1
) -> McEstimate:
    """SLLN estimate of the reciprocal normalizer sum_n b_n zeta**n / n!.

    point = (e**zeta / L) * sum b_{n_i} with n_i iid Poisson(zeta); the
    stderr is the sample standard deviation of the scaled summands over
    sqrt(L).
    """
    if L < 2:
        raise ValueError("L must be at least 2")
    if zeta <= 0.0:
        raise ValueError("zeta must be positive for the Poisson estimator")
    mean, var_mean = _poisson_b_moments(
        zeta, b, L, rng, _ROLE_NORMALIZER_POS, threads
    )
    scale = math.exp(zeta)
    return McEstimate(
        point=scale * mean,
        stderr=scale * math.sqrt(var_mean),
        n_samples=L,
        components={"raw_mean": mean, "raw_stderr": math.sqrt(var_mean)},
    )


def estimate_measure(
    zeta1: float,
    b1,
    zeta2: float,
    b2,
    B: NatSet,
    L1: int,
    L2: int,
    rng: RngSpec,
    eps: float = 1e-12,
    estimate_normalizers: bool = False,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of T(B) for T built from two density sides.

    point = mass1 * mean(I(n1 in B)) - mass2 * mean(I(n2 in B)), with each
    side's draws from its own substream.  Masses are the exact-within-eps
    normalizers unless estimate_normalizers is set, in which case they are
    Poisson-sampled as well and their uncertainty enters the stderr through
    the product-variance formula.
    """
    if L1 < 2 or L2 < 2:
        raise ValueError("L1 and L2 must be at least 2")
    p1 = PowerSeriesPmf(zeta1, b1, eps)
    p2 = PowerSeriesPmf(zeta2, b2, eps)
    prop1, pv1 = _indicator_proportion(p1, B, L1, rng, _ROLE_INDICATOR_POS, threads)
    prop2, pv2 = _indicator_proportion(p2, B, L2, rng, _ROLE_INDICATOR_NEG, threads)
    if estimate_normalizers:
        m1, mv1 = _poisson_b_moments(
            zeta1, p1.b, L1, rng, _ROLE_NORMALIZER_POS, threads
        )
        m2, mv2 = _poisson_b_moments(
            zeta2, p2.b, L2, rng, _ROLE_NORMALIZER_NEG, threads
        )
        mass1, mass_var1 = math.exp(zeta1) * m1, math.exp(2.0 * zeta1) * mv1
        mass2, mass_var2 = math.exp(zeta2) * m2, math.exp(2.0 * zeta2) * mv2
    else:
        mass1, mass_var1 = p1.normalizer.value, 0.0
        mass2, mass_var2 = p2.normalizer.value, 0.0
    # variance of a product of independent estimates:
    # Var(XY) = mx**2 vy + my**2 vx + vx vy
    var1 = mass1 ** 2 * pv1 + prop1 ** 2 * mass_var1 + mass_var1 * pv1
    var2 = mass2 ** 2 * pv2 + prop2 ** 2 * mass_var2 + mass_var2 * pv2
    point = mass1 * prop1 - mass2 * prop2
    return McEstimate(
        point=point,
        stderr=math.sqrt(var1 + var2),
        n_samples=L1 + L2,
        components={
            "mass_pos": mass1,
            "mass_neg": mass2,
            "prop_pos": prop1,
            "prop_neg": prop2,
            "stderr_pos": math.sqrt(var1),
            "stderr_neg": math.sqrt(var2),
        },
    )
