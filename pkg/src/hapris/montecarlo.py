"""Seeded Monte Carlo engine for the end-to-end channel.

Determinism contract
--------------------
Estimates depend only on ``(model, mode, n, seed)``.  The sample space is
split into fixed-size chunks (``CHUNK_SIZE``); chunk ``i`` draws from its
own Philox stream keyed by ``SeedSequence(seed, spawn_key=(i,))``, and the
chunk summaries are reduced in index order.  The result is therefore
bit-identical no matter how the chunk evaluations are scheduled: the
``map_fn`` hook accepts any order-preserving map (``map``, a process
pool's ``.map``, ...) without changing a single bit of the output.

Sampling strategies
-------------------
``DISTANCE`` draws the three nearest-node horizontal distances
independently from the closed-form law, which is exactly the independence
structure the analytic route assumes.  ``FIELD`` realizes explicit planar
Poisson fields in a disc sized so the empty-disc probability is below
1e-9, serves the user from the nearest platform and nearest surface, and
measures the platform-surface distance between those two actual points;
the gap between the two strategies measures how much the independence
assumption costs.  The serving platform is the one nearest the user by
default (``serving_policy="nearest-to-user"``); ``"nearest-to-ris"``
picks the platform nearest the serving surface instead.

Within a chunk the draw order is fixed: surface field, platform field
(field strategy) or the three distance draws (distance strategy), then
the direct-path envelope, then the per-element cascade envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import fading
from .analytic import Mode, SystemModel

__all__ = [
    "CHUNK_SIZE",
    "ChannelRealization",
    "MetricEstimate",
    "SamplingMode",
    "estimate_capacity",
    "estimate_coverage",
    "estimate_gain_histogram",
    "estimate_gain_moments",
    "sample_gains",
    "simulate_channel_gain",
]

CHUNK_SIZE = 32768

_SERVING_POLICIES = ("nearest-to-user", "nearest-to-ris")


class SamplingMode(Enum):
    DISTANCE = "distance"
    FIELD = "field"


@dataclass(frozen=True)
class ChannelRealization:
    """One end-to-end draw: horizontal/slant distances, |A| and the SNR."""

    omega_g: float
    omega_q: float
    omega_u: float
    r_g: float
    r_q: float
    r_u: float
    gain_a: float
    snr: float


@dataclass(frozen=True)
class MetricEstimate:
    """A Monte Carlo estimate with its standard error and provenance."""

    value: float
    std_error: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _chunks(n: int):
    full, rest = divmod(n, CHUNK_SIZE)
    for i in range(full):
        yield i, CHUNK_SIZE
    if rest:
        yield full, rest


def _poisson_field(lam: float, count: int, rng: np.random.Generator):
    """Planar Poisson field per realization, as flat point arrays.

    Disc radius satisfies exp(-lam pi R^2) < 1e-9.  A chunk containing an
    empty field (probability < count * 1e-9) is redrawn wholesale, which
    only reweights events already excluded by the disc truncation.
    """
    radius = math.sqrt(math.log(1e9) / (lam * math.pi))
    mu = lam * math.pi * radius * radius
    for _ in range(100):
        counts = rng.poisson(mu, count)
        if counts.min() > 0:
            break
    else:
        raise RuntimeError("could not draw a fully populated point field")
    total = int(counts.sum())
    r = radius * np.sqrt(rng.random(total))
    theta = 2.0 * math.pi * rng.random(total)
    seg = np.repeat(np.arange(count), counts)
    return r * np.cos(theta), r * np.sin(theta), r, seg


def _argmin_per_segment(values, seg, count):
    # seg is sorted; lexsort orders each segment by value, searchsorted
    # then picks the first (smallest) entry of every segment
    order = np.lexsort((values, seg))
    first = np.searchsorted(seg[order], np.arange(count))
    return order[first]


def _draw_distances(model: SystemModel, mode: SamplingMode, count: int,
                    rng: np.random.Generator, serving_policy: str):
    geom = model.geometry
    if mode is SamplingMode.DISTANCE:
        from .geometry import sample_nearest_distance

        omega_g = sample_nearest_distance(geom.lambda_ris, rng, count)
        omega_q = sample_nearest_distance(geom.lambda_hap, rng, count)
        omega_u = sample_nearest_distance(geom.lambda_hap, rng, count)
        return omega_g, omega_q, omega_u
    xr, yr, rr, seg_r = _poisson_field(geom.lambda_ris, count, rng)
    xh, yh, rh, seg_h = _poisson_field(geom.lambda_hap, count, rng)
    ris_idx = _argmin_per_segment(rr, seg_r, count)
    if serving_policy == "nearest-to-user":
        hap_idx = _argmin_per_segment(rh, seg_h, count)
    else:
        d_to_ris = np.hypot(xh - xr[ris_idx][seg_h], yh - yr[ris_idx][seg_h])
        hap_idx = _argmin_per_segment(d_to_ris, seg_h, count)
    omega_g = rr[ris_idx]
    omega_u = rh[hap_idx]
    omega_q = np.hypot(xh[hap_idx] - xr[ris_idx], yh[hap_idx] - yr[ris_idx])
    return omega_g, omega_q, omega_u


def _chunk_arrays(model: SystemModel, mode: SamplingMode, count: int,
                  rng: np.random.Generator, serving_policy: str):
    geom = model.geometry
    scen = model.fading
    omega_g, omega_q, omega_u = _draw_distances(model, mode, count, rng, serving_policy)
    r_g = np.hypot(omega_g, geom.h_ris)
    r_q = np.hypot(omega_q, geom.h_hap - geom.h_ris)
    r_u = np.hypot(omega_u, geom.h_hap)
    u = fading.sample_rayleigh(scen.hap_user, rng, count)
    gain = u * r_u ** (-geom.eps_u / 2.0)
    if model.mode is Mode.RIS_ASSISTED:
        q = fading.sample_rician(scen.hap_ris, rng, (count, model.l_elements))
        g = fading.sample_shadowed_rician(scen.ris_user, rng, (count, model.l_elements))
        xi = (q * g).sum(axis=1)
        gain = gain + xi * r_q ** (-geom.eps_q / 2.0) * r_g ** (-geom.eps_g / 2.0)
    snr = model.budget.rho0 * gain * gain
    return {
        "omega_g": omega_g, "omega_q": omega_q, "omega_u": omega_u,
        "r_g": r_g, "r_q": r_q, "r_u": r_u, "gain": gain, "snr": snr,
    }


def _check_policy(serving_policy: str):
    if serving_policy not in _SERVING_POLICIES:
        raise ValueError(f"serving_policy must be one of {_SERVING_POLICIES}")


def simulate_channel_gain(
    model: SystemModel,
    mode: SamplingMode,
    rng: np.random.Generator,
    serving_policy: str = "nearest-to-user",
) -> ChannelRealization:
    """Draw a single end-to-end realization from the caller's stream."""
    _check_policy(serving_policy)
    arr = _chunk_arrays(model, mode, 1, rng, serving_policy)
    return ChannelRealization(
        omega_g=float(arr["omega_g"][0]),
        omega_q=float(arr["omega_q"][0]),
        omega_u=float(arr["omega_u"][0]),
        r_g=float(arr["r_g"][0]),
        r_q=float(arr["r_q"][0]),
        r_u=float(arr["r_u"][0]),
        gain_a=float(arr["gain"][0]),
        snr=float(arr["snr"][0]),
    )


def _reduce_chunks(model, mode, n, seed, map_fn, serving_policy, chunk_stat, combine, init):
    def work(item):
        index, count = item
        rng = _chunk_rng(seed, index)
        return chunk_stat(_chunk_arrays(model, mode, count, rng, serving_policy))

    state = init
    for partial in map_fn(work, list(_chunks(n))):
        state = combine(state, partial)
    return state


def estimate_coverage(
    model: SystemModel,
    mode: SamplingMode,
    thresholds,
    n: int,
    seed: int,
    map_fn=map,
    serving_policy: str = "nearest-to-user",
) -> list[MetricEstimate]:
    """Exceedance fraction P(rho > rho_th) for every threshold, one sample pass.

    Thresholds are linear SNR values; the standard error is binomial.
    """
    _check_policy(serving_policy)
    if n < 1:
        raise ValueError("n must be at least 1")
    ths = np.asarray(list(thresholds), dtype=float)
    if ths.ndim != 1 or ths.size == 0:
        raise ValueError("thresholds must be a non-empty 1-d sequence")

    def stat(arr):
        return np.array([(arr["snr"] > th).sum() for th in ths], dtype=np.int64)

    counts = _reduce_chunks(
        model, mode, n, seed, map_fn, serving_policy,
        stat, lambda a, b: a + b, np.zeros(ths.size, dtype=np.int64),
    )
    out = []
    for c in counts:
        p = c / n
        se = math.sqrt(p * (1.0 - p) / n)
        out.append(MetricEstimate(value=float(p), std_error=se, n_samples=n, seed=seed))
    return out


def estimate_capacity(
    model: SystemModel,
    mode: SamplingMode,
    n: int,
    seed: int,
    map_fn=map,
    serving_policy: str = "nearest-to-user",
) -> MetricEstimate:
    """Sample mean of log2(1 + rho) with its standard error."""
    _check_policy(serving_policy)
    if n < 1:
        raise ValueError("n must be at least 1")

    def stat(arr):
        c = np.log2(1.0 + arr["snr"])
        return float(c.sum()), float((c * c).sum())

    s1, s2 = _reduce_chunks(
        model, mode, n, seed, map_fn, serving_policy,
        stat, lambda a, b: (a[0] + b[0], a[1] + b[1]), (0.0, 0.0),
    )
    mean = s1 / n
    var = max(s2 - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return MetricEstimate(value=mean, std_error=math.sqrt(var / n), n_samples=n, seed=seed)


def estimate_gain_moments(
    model: SystemModel,
    mode: SamplingMode,
    n: int,
    seed: int,
    map_fn=map,
    serving_policy: str = "nearest-to-user",
) -> tuple[MetricEstimate, MetricEstimate]:
    """Mean and variance of |A| as estimates with standard errors."""
    _check_policy(serving_policy)
    if n < 2:
        raise ValueError("n must be at least 2")

    def stat(arr):
        g = arr["gain"]
        return tuple(float(np.sum(g**k)) for k in (1, 2, 3, 4))

    s1, s2, s3, s4 = _reduce_chunks(
        model, mode, n, seed, map_fn, serving_policy,
        stat, lambda a, b: tuple(x + y for x, y in zip(a, b)), (0.0, 0.0, 0.0, 0.0),
    )
    mean = s1 / n
    m2 = s2 / n - mean * mean
    var = m2 * n / (n - 1)
    # central fourth moment, for the standard error of the sample variance
    m4 = (s4 - 4 * mean * s3 + 6 * mean**2 * s2 - 3 * n * mean**4) / n
    var_of_var = max(m4 - (n - 3) / (n - 1) * m2 * m2, 0.0) / n
    mean_est = MetricEstimate(value=mean, std_error=math.sqrt(m2 / n), n_samples=n, seed=seed)
    var_est = MetricEstimate(value=var, std_error=math.sqrt(var_of_var), n_samples=n, seed=seed)
    return mean_est, var_est


def estimate_gain_histogram(
    model: SystemModel,
    mode: SamplingMode,
    n: int,
    bin_edges,
    seed: int,
    map_fn=map,
    serving_policy: str = "nearest-to-user",
) -> np.ndarray:
    """Density-normalized histogram of |A| over the given bin edges."""
    _check_policy(serving_policy)
    if n < 1:
        raise ValueError("n must be at least 1")
    edges = np.asarray(list(bin_edges), dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin_edges must be strictly increasing with at least two entries")

    def stat(arr):
        counts, _ = np.histogram(arr["gain"], bins=edges)
        return counts.astype(np.int64)

    counts = _reduce_chunks(
        model, mode, n, seed, map_fn, serving_policy,
        stat, lambda a, b: a + b, np.zeros(edges.size - 1, dtype=np.int64),
    )
    return counts / (n * np.diff(edges))


def sample_gains(
    model: SystemModel,
    mode: SamplingMode,
    n: int,
    seed: int,
    serving_policy: str = "nearest-to-user",
) -> np.ndarray:
    """All n gain draws, using the same chunked streams as the estimators."""
    _check_policy(serving_policy)
    if n < 1:
        raise ValueError("n must be at least 1")
    parts = []
    for index, count in _chunks(n):
        rng = _chunk_rng(seed, index)
        parts.append(_chunk_arrays(model, mode, count, rng, serving_policy)["gain"])
    return np.concatenate(parts)
