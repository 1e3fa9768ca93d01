"""Clustering evaluation: normalized mutual information and loss deltas."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ContractError

__all__ = ["ContingencyTable", "contingency_table", "entropy", "mutual_information", "nmi", "percent_difference"]


@dataclass(frozen=True)
class ContingencyTable:
    """Co-occurrence counts; rows index predicted labels, columns true labels."""

    counts: np.ndarray
    n: int


def contingency_table(predicted, truth) -> ContingencyTable:
    p = np.asarray(predicted)
    t = np.asarray(truth)
    if p.ndim != 1 or p.shape != t.shape:
        raise ContractError(f"label sequences must have equal length, got {p.shape} and {t.shape}")
    if p.size == 0:
        raise ContractError("label sequences must be non-empty")
    _, pi = np.unique(p, return_inverse=True)
    _, ti = np.unique(t, return_inverse=True)
    counts = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return ContingencyTable(counts, int(p.size))


# Terms are built from exact integer ratios (Python int / int rounds
# correctly) and summed with fsum, so results do not depend on label names
# or summation order, and identical partitions give I == H bit for bit.


def _entropy_from_counts(counts, n):
    return math.fsum(c / n * math.log(n / c) for c in counts if c > 0)


def entropy(labels) -> float:
    """Shannon entropy (nats) of the empirical label distribution."""
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    return _entropy_from_counts(counts.tolist(), int(counts.sum()))


def mutual_information(table: ContingencyTable) -> float:
    n = table.n
    rows = table.counts.sum(axis=1).tolist()
    cols = table.counts.sum(axis=0).tolist()
    terms = []
    for i, j in zip(*np.nonzero(table.counts)):
        c = int(table.counts[i, j])
        terms.append(c / n * math.log((n * c) / (rows[i] * cols[j])))
    return max(0.0, math.fsum(terms))


def nmi(predicted, truth, average: str = "arithmetic") -> float:
    """Normalized mutual information between two labelings.

    ``I(U; V)`` divided by the arithmetic (default) or geometric mean of
    the two entropies, natural logarithms throughout.  When either labeling
    is constant the score is 1.0 if both are, otherwise 0.0.

    >>> nmi([0, 0, 1, 1], [5, 5, 3, 3])
    1.0
    >>> nmi([0, 0, 1, 1], [0, 1, 0, 1])
    0.0
    """
    table = contingency_table(predicted, truth)
    n = table.n
    hu = _entropy_from_counts(table.counts.sum(axis=1).tolist(), n)
    hv = _entropy_from_counts(table.counts.sum(axis=0).tolist(), n)
    if hu == 0.0 or hv == 0.0:
        return 1.0 if hu == hv else 0.0
    if average == "arithmetic":
        norm = (hu + hv) / 2.0
    elif average == "geometric":
        norm = math.sqrt(hu * hv)
    else:
        raise ValueError(f"unknown average {average!r}")
    return min(1.0, mutual_information(table) / norm)


def percent_difference(loss_a: float, loss_b: float) -> float:
    """``100 * (b - a) / a``; negative means ``b`` beat the baseline ``a``.

    Returns NaN when the baseline is not positive.
    """
    if not loss_a > 0:
        return math.nan
    return 100.0 * (loss_b - loss_a) / loss_a
