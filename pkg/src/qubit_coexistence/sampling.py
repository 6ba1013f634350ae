"""Random effect samplers (seeded ``numpy.random.Generator`` in, arrays out)."""

from __future__ import annotations

import numpy as np

SAMPLERS = ("uniform", "boundary", "mixed")


def _directions(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def uniform_effects(rng: np.random.Generator, n: int) -> np.ndarray:
    """``e0 ~ U(0,1)``, isotropic direction, ``|e| ~ U(0, min(e0, 1-e0))``."""
    e0 = rng.uniform(0.0, 1.0, size=n)
    r = rng.uniform(0.0, 1.0, size=n) * np.minimum(e0, 1.0 - e0)
    return np.column_stack([e0, r[:, None] * _directions(rng, n)])


def boundary_effects(rng: np.random.Generator, n: int) -> np.ndarray:
    """Effects within ``10**-u`` (relative, ``u ~ U(1, 8)``) of the effect-set boundary."""
    e0 = rng.uniform(0.0, 1.0, size=n)
    u = rng.uniform(1.0, 8.0, size=n)
    r = (1.0 - 10.0**-u) * np.minimum(e0, 1.0 - e0)
    return np.column_stack([e0, r[:, None] * _directions(rng, n)])


def projections(rng: np.random.Generator, n: int) -> np.ndarray:
    """Rank-1 projections ``(1 + n.s)/2``."""
    return np.column_stack([np.full(n, 0.5), 0.5 * _directions(rng, n)])


def sample_pairs(rng: np.random.Generator, n: int, sampler: str = "uniform", boundary_fraction=0.2):
    """Draw ``n`` pairs; returns ``(E, F)`` each of shape ``(n, 4)``.

    ``mixed`` draws ``round(boundary_fraction * n)`` pairs from the boundary
    sampler and the rest uniformly, in that order.
    """
    if sampler == "uniform":
        return uniform_effects(rng, n), uniform_effects(rng, n)
    if sampler == "boundary":
        return boundary_effects(rng, n), boundary_effects(rng, n)
    if sampler == "mixed":
        nb = int(round(boundary_fraction * n))
        E = np.concatenate([boundary_effects(rng, nb), uniform_effects(rng, n - nb)])
        F = np.concatenate([boundary_effects(rng, nb), uniform_effects(rng, n - nb)])
        return E, F
    raise ValueError(f"unknown sampler {sampler!r}; expected one of {SAMPLERS}")
