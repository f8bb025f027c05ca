"""Stochastic placement model for platforms and surfaces.

Both node populations are homogeneous planar Poisson fields, so the
horizontal distance to the nearest node is Rayleigh-distributed with
density ``2 lam pi w exp(-lam pi w^2)``.  The slant distance of a link at
height difference ``h`` is ``R = sqrt(w^2 + h^2)``, and the moments of
``R^(-t*eps/2)`` have the closed form

    (pi lam)^(t eps / 4) * e^(pi h^2 lam) * Gamma(1 - t eps / 4, pi h^2 lam)

which is evaluated here through the exponentially scaled incomplete gamma:
``pi h^2 lam`` is ~3.9e3 for a 50 km platform at density 5e-7 per m^2, so
the bare ``e^x`` factor would overflow while the product stays of order
``h^(-t*eps/2)``.

Distances are in meters throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import specfun

__all__ = [
    "DivergenceError",
    "LinkKind",
    "NetworkGeometry",
    "distance_moment",
    "link_density",
    "link_exponent",
    "link_height",
    "nearest_distance_pdf",
    "sample_nearest_distance",
]


class DivergenceError(ValueError):
    """The requested moment integral diverges."""


@dataclass(frozen=True)
class NetworkGeometry:
    """Node densities (per m^2), heights (m) and per-link path-loss exponents."""

    lambda_hap: float
    lambda_ris: float
    h_hap: float
    h_ris: float
    eps_g: float = 2.0
    eps_q: float = 3.0
    eps_u: float = 3.0

    def __post_init__(self):
        if not self.lambda_hap > 0:
            raise ValueError("lambda_hap must be positive")
        if not self.lambda_ris > 0:
            raise ValueError("lambda_ris must be positive")
        if not 0 < self.h_ris < self.h_hap:
            raise ValueError("h_ris must satisfy 0 < h_ris < h_hap")
        for name in ("eps_g", "eps_q", "eps_u"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2")


class LinkKind(Enum):
    HAP_RIS = "hap-ris"
    RIS_USER = "ris-user"
    HAP_USER = "hap-user"


def link_height(geom: NetworkGeometry, link: LinkKind) -> float:
    """Vertical separation of the two link endpoints."""
    if link is LinkKind.HAP_RIS:
        return geom.h_hap - geom.h_ris
    if link is LinkKind.RIS_USER:
        return geom.h_ris
    return geom.h_hap


def link_density(geom: NetworkGeometry, link: LinkKind) -> float:
    """Density of the field the nearest-node distance of this link is drawn from."""
    return geom.lambda_ris if link is LinkKind.RIS_USER else geom.lambda_hap


def link_exponent(geom: NetworkGeometry, link: LinkKind) -> float:
    if link is LinkKind.HAP_RIS:
        return geom.eps_q
    if link is LinkKind.RIS_USER:
        return geom.eps_g
    return geom.eps_u


def nearest_distance_pdf(lam: float, w) -> float:
    """Density of the horizontal distance to the nearest node of a field."""
    if not lam > 0:
        raise ValueError("density must be positive")
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("distance must be non-negative")
    out = 2.0 * lam * math.pi * w * np.exp(-lam * math.pi * w * w)
    return float(out) if out.ndim == 0 else out


def sample_nearest_distance(lam: float, rng: np.random.Generator, size=None):
    """Draw nearest-node horizontal distances, w = sqrt(-ln U / (lam pi)).

    U is taken as 1 - rng.random(), i.e. uniform on (0, 1].
    """
    if not lam > 0:
        raise ValueError("density must be positive")
    u = 1.0 - rng.random(size)
    return np.sqrt(-np.log(u) / (lam * math.pi))


def distance_moment(
    t: float,
    eps: float,
    lam: float,
    h: float,
    acc: specfun.AccuracySpec | None = None,
) -> float:
    """E[R^(-t*eps/2)] for R = sqrt(w^2 + h^2) with w the nearest-node distance.

    For h = 0 the moment only exists while t*eps < 4; at and above that the
    defining integral diverges at the origin.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not lam > 0:
        raise ValueError("density must be positive")
    if h < 0:
        raise ValueError("height must be non-negative")
    if t == 0:
        return 1.0
    p = t * eps / 4.0
    a = 1.0 - p
    if h == 0.0:
        if a <= 0:
            raise DivergenceError(f"moment diverges for h=0 and t*eps={t * eps} >= 4")
        return math.pow(math.pi * lam, p) * specfun.gamma_fn(a)
    x = math.pi * h * h * lam
    return math.pow(math.pi * lam, p) * specfun.upper_incomplete_gamma_scaled(a, x, acc)
