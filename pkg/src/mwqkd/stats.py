"""Distribution diagnostics: histograms, Bhattacharyya overlap, Hellinger
distance, and a Gaussian mutual-information estimator with bootstrap
errors. These validate sampled protocol data against the analytic model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf


@dataclass(frozen=True)
class Histogram:
    """Counts over strictly increasing bin edges."""

    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or counts.ndim != 1 or edges.size != counts.size + 1:
            raise ValueError("need len(bin_edges) == len(counts) + 1")
        if not np.all(np.diff(edges) > 0.0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(counts < 0):
            raise ValueError("counts must be >= 0")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        """Per-bin probability mass."""
        return self.counts / self.total

    def densities(self) -> np.ndarray:
        """Per-bin probability density (mass over width)."""
        return self.probabilities() / np.diff(self.bin_edges)


def build_histogram(samples, bins="fd") -> Histogram:
    """Histogram with Freedman-Diaconis bins by default.

    `bins` accepts anything numpy's histogram edge selection does (a rule
    name, a count, or explicit edges).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise ValueError("need at least one sample")
    edges = np.histogram_bin_edges(samples, bins=bins)
    counts, edges = np.histogram(samples, bins=edges)
    return Histogram(edges, counts)


def gaussian_bin_probabilities(bin_edges, mean: float, variance: float) -> np.ndarray:
    """Exact Gaussian probability mass of each bin (integrated, not
    midpoint-sampled, so the comparison carries no O(width^2) bias).

    Mass outside the edges is not folded back in; against a histogram
    spanning its own samples the missing tail mass is negligible.
    """
    if not variance > 0.0:
        raise ValueError("variance must be > 0")
    edges = np.asarray(bin_edges, dtype=float)
    z = (edges - mean) / math.sqrt(2.0 * variance)
    cdf = 0.5 * (1.0 + erf(z))
    return np.diff(cdf)


def bhattacharyya(p, q) -> float:
    """Bhattacharyya coefficient of two discrete distributions.

    Inputs are nonnegative mass vectors over the same bins; each is
    normalized to unit total before the overlap sum. 1 for identical
    distributions, 0 for disjoint support.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("p and q must be 1-D with matching bins")
    if np.any(p < 0.0) or np.any(q < 0.0):
        raise ValueError("masses must be >= 0")
    tp, tq = p.sum(), q.sum()
    if tp <= 0.0 or tq <= 0.0:
        raise ValueError("distributions must have positive total mass")
    return float(np.sqrt(p / tp * (q / tq)).sum())


def bhattacharyya_gaussian(
    mean1: float, variance1: float, mean2: float, variance2: float
) -> float:
    """Closed-form Bhattacharyya coefficient of two normal densities."""
    if not (variance1 > 0.0 and variance2 > 0.0):
        raise ValueError("variances must be > 0")
    vsum = variance1 + variance2
    prefactor = math.sqrt(2.0 * math.sqrt(variance1 * variance2) / vsum)
    return prefactor * math.exp(-((mean1 - mean2) ** 2) / (4.0 * vsum))


def hellinger(p, q) -> float:
    """Hellinger distance sqrt(1 - B) between two discrete distributions."""
    return hellinger_from_coefficient(bhattacharyya(p, q))


def hellinger_from_coefficient(coefficient: float) -> float:
    """Hellinger distance from a Bhattacharyya coefficient."""
    if not -1e-12 <= coefficient <= 1.0 + 1e-12:
        raise ValueError("coefficient must be in [0, 1]")
    return math.sqrt(max(1.0 - coefficient, 0.0))


def histogram_vs_gaussian(hist: Histogram, mean: float, variance: float) -> float:
    """Bhattacharyya coefficient between a histogram and a Gaussian density
    integrated over the same bins."""
    return float(
        np.sqrt(
            hist.probabilities()
            * gaussian_bin_probabilities(hist.bin_edges, mean, variance)
        ).sum()
    )


def empirical_mutual_information(x, y) -> float:
    """Gaussian mutual-information estimate from the sample correlation.

    -log2(1 - rho^2)/2 in bits. Invariant under affine rescaling of
    either variable (any a*x + b with a != 0), since the correlation
    coefficient is.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("x and y must be 1-D with equal length >= 2")
    rho = float(np.corrcoef(x, y)[0, 1])
    return -0.5 * math.log2(max(1.0 - rho * rho, 1e-300))


def bootstrap_mi_sigma(x, y, n_boot: int = 200, seed: int = 0) -> float:
    """Bootstrap standard error of :func:`empirical_mutual_information`."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if n_boot < 2:
        raise ValueError("n_boot must be >= 2")
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = x.size
    values = np.empty(n_boot)
    for b in range(n_boot):
        idx = rng.integers(0, n, size=n)
        values[b] = empirical_mutual_information(x[idx], y[idx])
    return float(values.std(ddof=1))
