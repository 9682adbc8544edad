"""Finite discrete delay distributions and the algebra used on them.

All delays are in milliseconds. A distribution is a finite list of
(value, probability) points with strictly increasing values and
probabilities that sum to one. Sums of independent delays are exact
convolutions, maxima of independent delays are combined through CDF
products, so no sampling error enters the analytical path.
"""

from dataclasses import dataclass
from functools import cached_property
import csv
import math

import numpy as np

# Values closer than this (ms) are treated as the same support point.
VALUE_MERGE_TOL = 1e-9
# Probability mass drift below this is left alone, above it we renormalize.
RENORM_TOL = 1e-12
# Drift beyond this indicates a caller bug, not float noise.
REJECT_TOL = 1e-6


def _merge_points(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort points by value and merge values closer than VALUE_MERGE_TOL."""
    order = np.argsort(values, kind="stable")
    values = values[order]
    probs = probs[order]
    if len(values) > 1:
        # Boundaries where a new group starts; reduceat sums each group.
        new_group = np.empty(len(values), dtype=bool)
        new_group[0] = True
        np.greater(np.diff(values), VALUE_MERGE_TOL, out=new_group[1:])
        starts = np.flatnonzero(new_group)
        values = values[starts]
        probs = np.add.reduceat(probs, starts)
    return values, probs


@dataclass(frozen=True)
class DelayDist:
    """Finite discrete distribution over non-negative delays (ms)."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if values.ndim != 1 or probs.ndim != 1 or len(values) != len(probs):
            raise ValueError("values and probs must be 1-d arrays of equal length")
        if len(values) == 0:
            raise ValueError("distribution needs at least one support point")
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(probs)):
            raise ValueError("distribution contains non-finite entries")
        if np.any(values < 0):
            raise ValueError("delay values must be >= 0 ms")
        values, probs = _merge_points(values, probs)
        if np.any(probs <= 0):
            raise ValueError("probabilities must be positive")
        total = probs.sum()
        drift = abs(total - 1.0)
        if drift > REJECT_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        if drift > RENORM_TOL:
            probs = probs / total
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    # -- constructors --------------------------------------------------

    @classmethod
    def from_points(cls, points) -> "DelayDist":
        """Build from an iterable of (value_ms, probability) pairs."""
        pts = list(points)
        if not pts:
            raise ValueError("empty point list")
        values = np.array([p[0] for p in pts], dtype=np.float64)
        probs = np.array([p[1] for p in pts], dtype=np.float64)
        return cls(values, probs)

    @classmethod
    def constant(cls, value_ms: float) -> "DelayDist":
        return cls(np.array([float(value_ms)]), np.array([1.0]))

    @classmethod
    def from_samples(cls, samples, bin_width_ms: float = 1.0) -> "DelayDist":
        """Bin raw delay samples into an empirical distribution.

        Each sample lands in the bin [k*w, (k+1)*w) and is represented by
        the bin's left edge, so the result slightly underestimates the mean
        by at most one bin width.
        """
        arr = np.asarray(list(samples), dtype=np.float64)
        if arr.size == 0:
            raise ValueError("no samples given")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples contain non-finite values")
        if np.any(arr < 0):
            raise ValueError("samples must be >= 0 ms")
        if not (bin_width_ms > 0):
            raise ValueError("bin width must be positive")
        binned = np.floor(arr / bin_width_ms) * bin_width_ms
        values, counts = np.unique(binned, return_counts=True)
        return cls(values, counts / arr.size)

    # -- basic queries --------------------------------------------------

    @cached_property
    def _cum(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def cdf(self, x) -> np.ndarray:
        """P(X <= x), evaluated pointwise for scalar or array x."""
        idx = np.searchsorted(self.values, np.asarray(x, dtype=np.float64) + VALUE_MERGE_TOL, side="right")
        cum = np.concatenate(([0.0], self._cum))
        return cum[idx]

    def quantile(self, q: float) -> float:
        """Smallest support value whose CDF reaches q (left-continuous inverse)."""
        if not (0.0 < q <= 1.0):
            raise ValueError("quantile level must be in (0, 1]")
        idx = int(np.searchsorted(self._cum, q - 1e-12, side="left"))
        idx = min(idx, len(self.values) - 1)
        return float(self.values[idx])

    # -- algebra ---------------------------------------------------------

    def convolve(self, other: "DelayDist") -> "DelayDist":
        """Distribution of the sum of two independent delays."""
        values = np.add.outer(self.values, other.values).ravel()
        probs = np.multiply.outer(self.probs, other.probs).ravel()
        values, probs = _merge_points(values, probs)
        return DelayDist(values, probs)

    def shift(self, offset_ms: float) -> "DelayDist":
        """Add a constant offset; the result must stay non-negative."""
        if self.values[0] + offset_ms < 0:
            raise ValueError("shift would produce negative delays")
        return DelayDist(self.values + offset_ms, self.probs.copy())

    # -- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.values[np.searchsorted(self._cum, rng.random(), side="right")])

    def sample_array(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = np.searchsorted(self._cum, rng.random(n), side="right")
        np.clip(idx, 0, len(self.values) - 1, out=idx)
        return self.values[idx]

    def __len__(self) -> int:
        return len(self.values)

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))


ZERO_DELAY = DelayDist(np.array([0.0]), np.array([1.0]))


def convolve(a: DelayDist, b: DelayDist) -> DelayDist:
    return a.convolve(b)


def convolve_all(dists) -> DelayDist:
    out = None
    for d in dists:
        out = d if out is None else out.convolve(d)
    if out is None:
        raise ValueError("no distributions given")
    return out


def max_combine(dists) -> DelayDist:
    """Distribution of the maximum of independent delays.

    For independent X_i, P(max <= v) is the product of the individual
    CDFs, evaluated over the union of the supports; this is exact.
    """
    dists = list(dists)
    if not dists:
        raise ValueError("no distributions given")
    if len(dists) == 1:
        return dists[0]
    support, _ = _merge_points(
        np.concatenate([d.values for d in dists]),
        np.concatenate([d.probs for d in dists]),
    )
    cdf = np.ones(len(support))
    for d in dists:
        cdf *= d.cdf(support)
    pmf = np.diff(np.concatenate(([0.0], cdf)))
    keep = pmf > 0
    return DelayDist(support[keep], pmf[keep])


def shift(d: DelayDist, offset_ms: float) -> DelayDist:
    return d.shift(offset_ms)


@dataclass(frozen=True)
class DistSummary:
    """min/max/mean and the two quantiles reported everywhere."""

    min: float
    max: float
    mean: float
    p50: float
    p99: float

    def as_row(self) -> list[float]:
        return [self.min, self.max, self.mean, self.p50, self.p99]


def summarize(d: DelayDist) -> DistSummary:
    return DistSummary(
        min=d.min,
        max=d.max,
        mean=d.mean(),
        p50=d.quantile(0.5),
        p99=d.quantile(0.99),
    )


def load_samples_csv(path) -> np.ndarray:
    """Read one delay sample (ms) per line; returns a float array.

    Raises ValueError naming the offending line for anything non-numeric.
    """
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 1:
                raise ValueError(f"{path}:{lineno}: expected one value per line, got {len(row)}")
            text = row[0].strip()
            try:
                val = float(text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not math.isfinite(val) or val < 0:
                raise ValueError(f"{path}:{lineno}: delay sample must be finite and >= 0, got {text}")
            out.append(val)
    if not out:
        raise ValueError(f"{path}: no samples found")
    return np.asarray(out, dtype=np.float64)
