"""Seeded random instances under the distributional assumptions of the analysis.

Per site, independently:

* window start ~ U(0, 3T/4), window end ~ U(start, T)
* quantity ~ Exponential with mean Q/n
* depot distance ~ U(0, T/4) with a uniform angle (not area-uniform on the disk)

Stream layout: the PCG64 stream seeded with ``params.seed`` is read as an
``(n, SITE_STREAM_WIDTH)`` block of uniforms in row-major order, so site ``i``
always consumes uniforms ``[8 i, 8 i + 8)``. Columns 0..4 feed start, end,
quantity, radius and angle; columns 5..7 are reserved so that new fields never
shift existing samples. Consequently the first ``k`` sites of an instance do not
depend on ``n`` beyond the quantity scale Q/n.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from mprp.model import Instance, ModelError, ParamError, Site
from mprp.seeding import check_seed, make_rng

SITE_STREAM_WIDTH = 8


@dataclass(frozen=True)
class GenParams:
    n: int = 50
    m: int = 5
    capacity: float = 5000.0
    horizon: float = 100.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ParamError(f"must be an integer >= 1, got {value!r}", name)
        for name in ("capacity", "horizon"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.number)) or not math.isfinite(value) or value <= 0:
                raise ParamError(f"must be a finite number > 0, got {value!r}", name)
        check_seed(self.seed)

    @property
    def in_analyzed_regime(self) -> bool:
        """T < 4Q/n, the regime assumed by the expected-profit bound."""
        return self.horizon < 4 * self.capacity / self.n

    def replace(self, **changes) -> "GenParams":
        fields = dict(n=self.n, m=self.m, capacity=self.capacity, horizon=self.horizon, seed=self.seed)
        fields.update(changes)
        return GenParams(**fields)


def generate(params: GenParams) -> Instance:
    n, T, Q = params.n, float(params.horizon), float(params.capacity)
    u = make_rng(params.seed).random((n, SITE_STREAM_WIDTH))
    start = 0.75 * T * u[:, 0]
    end = np.minimum(start + (T - start) * u[:, 1], T)
    quantity = -(Q / n) * np.log1p(-u[:, 2])
    radius = 0.25 * T * u[:, 3]
    angle = 2.0 * math.pi * u[:, 4]
    x = radius * np.cos(angle)
    y = radius * np.sin(angle)
    sites = tuple(
        Site(i, float(x[i]), float(y[i]), float(start[i]), float(end[i]), float(quantity[i]))
        for i in range(n)
    )
    return Instance(sites, 0.0, 0.0, params.m, Q, T)


@dataclass(frozen=True)
class MomentStat:
    mean: float
    variance: Optional[float]  # None when fewer than two sites
    target_mean: Optional[float]
    target_variance: Optional[float]
    z: Optional[float]

    @property
    def variance_defined(self) -> bool:
        return self.variance is not None


@dataclass(frozen=True)
class MomentReport:
    n: int
    stats: Dict[str, MomentStat]
    ks_window_start: float

    @property
    def max_abs_z(self) -> float:
        zs = [abs(s.z) for s in self.stats.values() if s.z is not None]
        return max(zs) if zs else 0.0


def _stat(values: np.ndarray, target_mean=None, target_variance=None) -> MomentStat:
    n = values.size
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if n > 1 else None
    z = None
    if target_mean is not None:
        se = math.sqrt(target_variance / n)
        if se > 0:
            z = (mean - target_mean) / se
        else:
            z = 0.0 if mean == target_mean else math.copysign(math.inf, mean - target_mean)
    return MomentStat(mean, variance, target_mean, target_variance, z)


def ks_uniform(values: np.ndarray, low: float, high: float) -> float:
    """Kolmogorov-Smirnov sup distance between the empirical CDF and U(low, high)."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    cdf = np.clip((x - low) / (high - low), 0.0, 1.0)
    ranks = np.arange(1, n + 1)
    return float(max(np.max(ranks / n - cdf), np.max(cdf - (ranks - 1) / n)))


def validate_assumptions(instance: Instance) -> MomentReport:
    """Empirical moments of an instance against the generator's targets.

    Diagnostic only: it never rejects. z-scores use the theoretical standard
    error, so they stay defined for a single site.
    """
    if instance.n == 0:
        raise ModelError("instance has no sites", "sites")
    T, Q, n = instance.horizon, instance.capacity, instance.n
    a = instance.arrays
    dist = np.hypot(a.x - instance.depot_x, a.y - instance.depot_y)
    stats = {
        "window_start": _stat(a.start, 3 * T / 8, (3 * T / 4) ** 2 / 12),
        "window_length": _stat(a.end - a.start),
        "quantity": _stat(a.quantity, Q / n, (Q / n) ** 2),
        "depot_distance": _stat(dist, T / 8, (T / 4) ** 2 / 12),
    }
    return MomentReport(n, stats, ks_uniform(a.start, 0.0, 0.75 * T))
