"""Per-link fading families: closed-form envelope moments and samplers.

Three families cover the three links of the model:

* shadowed Rician for the surface-to-user hop (line-of-sight power is
  itself random, Gamma-distributed with Nakagami parameter m),
* Rician for the platform-to-surface hop,
* Rayleigh for the direct platform-to-user path.

Parameters are stored as (K, m, sigma2) with the line-of-sight power
``Omega = sigma2 K / (1 + K)`` and scattered power ``2b = sigma2 / (1 + K)``
derived, so the second moment of every family is exactly its ``sigma2``.

The samplers realize the compound constructions whose moments match the
closed forms: the shadowed-Rician envelope is |sqrt(P) + X + jY| with
P ~ Gamma(m, Omega/m) and X, Y zero-mean Gaussians of variance b each.
The line-of-sight phase is omitted; the scatter term is circularly
symmetric, so the envelope law does not depend on it.  For m = 0 the
line-of-sight component is fully blocked and only the scattered power
sigma2 / (1 + K) survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun

__all__ = [
    "FadingScenario",
    "RayleighParams",
    "RicianParams",
    "ShadowedRicianParams",
    "rayleigh_moment",
    "rician_moment",
    "sample_rayleigh",
    "sample_rician",
    "sample_shadowed_rician",
    "shadowed_rician_moment",
]


@dataclass(frozen=True)
class ShadowedRicianParams:
    k: float
    m: float
    sigma2: float = 1.0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def omega(self) -> float:
        """Mean line-of-sight power."""
        return self.sigma2 * self.k / (1.0 + self.k)

    @property
    def b2(self) -> float:
        """Scattered power 2b."""
        return self.sigma2 / (1.0 + self.k)


@dataclass(frozen=True)
class RicianParams:
    k: float
    sigma2: float = 1.0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def omega(self) -> float:
        return self.sigma2 * self.k / (1.0 + self.k)

    @property
    def b2(self) -> float:
        return self.sigma2 / (1.0 + self.k)


@dataclass(frozen=True)
class RayleighParams:
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


@dataclass(frozen=True)
class FadingScenario:
    """Fading parameter set for the three links of the model."""

    ris_user: ShadowedRicianParams
    hap_ris: RicianParams
    hap_user: RayleighParams


def shadowed_rician_moment(
    t: float, p: ShadowedRicianParams, acc: specfun.AccuracySpec | None = None
) -> float:
    """t-th envelope moment of the shadowed-Rician family.

    For m = 0 the line-of-sight term is gone and the envelope is Rayleigh
    on the scattered power sigma2 / (1 + K).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if p.m == 0:
        return rayleigh_moment(t, RayleighParams(p.b2))
    z = p.k / (p.m + p.k)
    # (m / (m+K))^m = (1-z)^m, stable for large m through log1p
    shadow = math.exp(p.m * math.log1p(-z)) if z > 0 else 1.0
    return (
        math.pow(p.sigma2 / (1.0 + p.k), t / 2.0)
        * shadow
        * specfun.gamma_fn(1.0 + t / 2.0)
        * specfun.gauss_2f1(1.0 + t / 2.0, p.m, 1.0, z, acc)
    )


def rician_moment(t: float, p: RicianParams, acc: specfun.AccuracySpec | None = None) -> float:
    """t-th envelope moment of the Rician family."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return (
        math.pow(p.sigma2 / (1.0 + p.k), t / 2.0)
        * specfun.gamma_fn(1.0 + t / 2.0)
        * math.exp(-p.k)
        * specfun.kummer_1f1(1.0 + t / 2.0, 1.0, p.k, acc)
    )


def rayleigh_moment(t: float, p: RayleighParams) -> float:
    """t-th envelope moment of the Rayleigh family."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return math.pow(p.sigma2, t / 2.0) * specfun.gamma_fn(1.0 + t / 2.0)


def sample_rayleigh(p: RayleighParams, rng: np.random.Generator, size=None):
    """Rayleigh envelopes, sqrt(-sigma2 ln U) with U uniform on (0, 1]."""
    u = 1.0 - rng.random(size)
    return np.sqrt(-p.sigma2 * np.log(u))


def sample_rician(p: RicianParams, rng: np.random.Generator, size=None):
    """Rician envelopes |s + X + jY| with s = sqrt(Omega)."""
    s = math.sqrt(p.omega)
    sd = math.sqrt(p.b2 / 2.0)
    x = rng.normal(0.0, sd, size)
    y = rng.normal(0.0, sd, size)
    return np.hypot(s + x, y)


def sample_shadowed_rician(p: ShadowedRicianParams, rng: np.random.Generator, size=None):
    """Shadowed-Rician envelopes |sqrt(P) + X + jY| with P ~ Gamma(m, Omega/m)."""
    sd = math.sqrt(p.b2 / 2.0)
    if p.m == 0:
        los = 0.0
    else:
        los = np.sqrt(rng.gamma(p.m, p.omega / p.m, size))
    x = rng.normal(0.0, sd, size)
    y = rng.normal(0.0, sd, size)
    return np.hypot(los + x, y)
