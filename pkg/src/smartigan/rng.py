"""Seedable, splittable random streams.

Every stochastic step in the package draws from a :class:`RandomStream`.
A stream is identified by its *origin*: a master seed plus a derivation
path of integer labels.  Streams are built from numpy's ``SeedSequence``
(keyed by ``spawn_key``) feeding a Philox counter-based generator, so a
child stream is a pure function of its origin and never depends on how
much of the parent was consumed.

Derivation is path-sensitive: each ``derive`` call appends the label
length before the label itself, so ``s.derive((1,)).derive((2,))`` and
``s.derive((1, 2))`` are different streams.

This construction is part of the replay contract.  Changing it changes
every reported number.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

MASK64 = (1 << 64) - 1


class RandomStream:
    """Deterministic random stream with an auditable origin."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed) & MASK64
        self.path = tuple(int(p) for p in path)
        if any(p < 0 for p in self.path):
            raise ValueError("derivation labels must be non-negative integers")
        self._seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(self._seq))

    @property
    def origin(self) -> tuple[int, tuple[int, ...]]:
        return self.seed, self.path

    @property
    def key(self) -> int:
        """A 64-bit digest of the origin, used as the reported run seed."""
        return int(self._seq.generate_state(1, np.uint64)[0])

    def derive(self, label) -> "RandomStream":
        label = tuple(label)
        return RandomStream(self.seed, self.path + (len(label),) + label)

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of ``range(n)`` by Fisher-Yates."""
        return self.permutations(n, 1)[0]

    def permutations(self, n: int, count: int) -> np.ndarray:
        """``count`` independent Fisher-Yates permutations as rows.

        Consumes exactly what ``count`` successive :meth:`permutation`
        calls would, so a block of rows equals the one-at-a-time sequence.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return np.zeros((count, 1), dtype=np.int64)
        # step m swaps position n-1-m with a uniform index in [0, n-1-m]
        highs = np.tile(np.arange(n, 1, -1), count)
        draws = self.generator.integers(0, highs, dtype=np.int64).reshape(count, n - 1)
        return _kernels.fisher_yates_rows(draws)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path})"


def derive(parent, label) -> RandomStream:
    """Child stream of ``parent`` (a stream or a bare master seed)."""
    if not isinstance(parent, RandomStream):
        parent = RandomStream(parent)
    return parent.derive(label)


def as_stream(seed_or_stream) -> RandomStream:
    if isinstance(seed_or_stream, RandomStream):
        return seed_or_stream
    return RandomStream(seed_or_stream)
