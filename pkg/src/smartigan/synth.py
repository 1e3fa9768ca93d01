"""Synthetic isotropic Gaussian mixtures.

Two regimes are provided:

* ``small_distance``: centers uniform in ``[0, 3]^d``, covariance ``0.3 * I``
* ``large_distance``: centers uniform in ``[0, 5]^d``, covariance ``0.1 * I``

The covariance factor is a per-coordinate *variance*, so the coordinate
standard deviation is ``sqrt(0.3) ~ 0.548`` and ``sqrt(0.1) ~ 0.316``.
Each point first draws a uniform component label, so component sizes are
multinomial rather than balanced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, Dataset
from .rng import as_stream

__all__ = ["REGIMES", "MixtureSpec", "generate", "mixture_centers"]

# regime -> (cube side, per-coordinate variance)
REGIMES = {
    "small_distance": (3.0, 0.3),
    "large_distance": (5.0, 0.1),
}


@dataclass(frozen=True)
class MixtureSpec:
    regime: str
    d: int
    k_true: int
    n: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ContractError(f"unknown regime {self.regime!r}; expected one of {sorted(REGIMES)}")
        if self.d < 1 or self.k_true < 1 or self.n < 1:
            raise ContractError("d, k_true and n must all be >= 1")

    @property
    def side(self) -> float:
        return REGIMES[self.regime][0]

    @property
    def variance(self) -> float:
        return REGIMES[self.regime][1]

    @property
    def name(self) -> str:
        short = "small" if self.regime == "small_distance" else "large"
        return f"gmm-{short}-d{self.d}-k{self.k_true}-n{self.n}"


def _draw(spec: MixtureSpec, stream):
    g = as_stream(spec.rng_seed if stream is None else stream).generator
    centers = g.uniform(0.0, spec.side, size=(spec.k_true, spec.d))
    labels = g.integers(0, spec.k_true, size=spec.n)
    noise = g.standard_normal(size=(spec.n, spec.d))
    points = centers[labels] + np.sqrt(spec.variance) * noise
    return centers, labels, points


def generate(spec: MixtureSpec, stream=None) -> Dataset:
    """Sample a labelled dataset; a pure function of ``spec`` (or ``stream``)."""
    _, labels, points = _draw(spec, stream)
    return Dataset(points, labels, name=spec.name)


def mixture_centers(spec: MixtureSpec, stream=None) -> np.ndarray:
    """The component centers :func:`generate` uses for the same seed."""
    return _draw(spec, stream)[0]
