"""Samplers for the canonical measure and product-measure diagnostics.

Configurations are plain integer numpy arrays of length ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import ModelError
from .partition import LogPartitionTable
from .streams import map_realizations
from .weights import ModelSpec

__all__ = [
    "direct_sample",
    "direct_samples",
    "ZrpDynamics",
    "make_zrp_rates",
    "zrp_stationary_weights",
    "default_burn_in",
    "Trajectory",
    "simulate_zrp",
    "SizeBiasedConfig",
    "size_biased_permutation",
    "ProductConditionReport",
    "check_product_conditions",
    "stationary_weights",
]


def direct_sample(model: ModelSpec, table: LogPartitionTable, rng: np.random.Generator) -> np.ndarray:
    """One exact draw from the canonical measure.

    Site ``i`` is drawn from its conditional law given the mass left on
    sites ``i..L``, the last site takes the remainder.
    """
    table.check_model(model)
    L, N = model.L, model.N
    if not table.covers(L, N):
        raise IndexError("table does not cover the model size")
    out = np.empty(L, dtype=np.int64)
    _kernels.direct_sample_kernel(table.log_weights, table.log_z, L, N, rng, out)
    return out


def direct_samples(model: ModelSpec, table: LogPartitionTable, count: int, seed: int = 0,
                   workers: Optional[int] = None) -> np.ndarray:
    """``count`` independent exact samples, realization ``i`` on stream ``(seed, i)``."""
    rows = map_realizations(lambda i, rng: direct_sample(model, table, rng), count, seed, workers)
    return np.array(rows, dtype=np.int64).reshape(count, model.L)


@dataclass(frozen=True)
class ZrpDynamics:
    """Zero-range jump rates ``g(n)`` (index ``n``, ``g(0) = 0``) and a kernel."""

    rates: np.ndarray
    kernel: str = "complete"

    def __post_init__(self):
        if self.kernel not in ("complete", "ring"):
            raise ModelError(f"unknown kernel {self.kernel!r}")
        if self.rates[0] != 0.0 or np.any(self.rates[1:] <= 0.0):
            raise ModelError("need g(0) = 0 and g(n) > 0 for n >= 1")


def make_zrp_rates(model: ModelSpec, g1: float = 1.0, use_perturbed: bool = True,
                   kernel: str = "complete", n_max: Optional[int] = None) -> ZrpDynamics:
    """Rates ``g(n) = g1 w(n-1) / w(n)`` whose stationary weights are a tilt of ``w``.

    The ZRP's stationary weights ``prod_{m<=n} 1/g(m)`` equal
    ``g1^-n w(n) / w(0)``, and the canonical measure does not see the tilt.
    """
    n_max = model.N if n_max is None else n_max
    n = np.arange(n_max + 1)
    if use_perturbed:
        log_w = np.log(model.weights(n_max))
    else:
        k = len(model.bulk.head)
        log_w = np.log(np.asarray(model.bulk.head))[np.minimum(n, k - 1)] \
            + np.maximum(n - (k - 1), 0) * math.log(model.bulk.tail_ratio)
    rates = np.zeros(n_max + 1)
    rates[1:] = g1 * np.exp(log_w[:-1] - log_w[1:])
    return ZrpDynamics(rates, kernel)


def zrp_stationary_weights(dyn: ZrpDynamics) -> np.ndarray:
    """``prod_{m=1}^{n} 1/g(m)`` for ``n = 0..len(rates)-1``."""
    return np.exp(-np.concatenate([[0.0], np.cumsum(np.log(dyn.rates[1:]))]))


def default_burn_in(dyn: ZrpDynamics, L: int, N: int) -> float:
    """``10 L / min_{1<=n<=N} g(n)``."""
    if N == 0:
        return 0.0
    return 10.0 * L / float(dyn.rates[1:N + 1].min())


class Trajectory(NamedTuple):
    times: np.ndarray
    states: np.ndarray
    final_time: float


def simulate_zrp(dyn: ZrpDynamics, init, t_end: float, thinning: float = 1.0,
                 rng: Optional[np.random.Generator] = None, burn_in: Optional[float] = None) -> Trajectory:
    """Continuous-time zero-range dynamics.

    States are recorded at times ``burn_in + k * thinning`` for
    ``k = 1..floor(t_end / thinning)``.
    """
    if t_end <= 0 or thinning <= 0:
        raise ValueError("t_end and thinning must be positive")
    eta = np.array(init, dtype=np.int64)
    L, N = len(eta), int(eta.sum())
    if np.any(eta < 0):
        raise ValueError("occupations must be non-negative")
    if N >= len(dyn.rates):
        raise ValueError(f"rates cover occupations up to {len(dyn.rates) - 1}, need {N}")
    rates = dyn.rates.copy()
    rates[N + 1:] = 0.0
    burn_in = default_burn_in(dyn, L, N) if burn_in is None else burn_in
    rng = np.random.default_rng() if rng is None else rng
    K = int(math.floor(t_end / thinning + 1e-12))
    states = np.empty((K, L), dtype=np.int64)
    times = np.empty(K)
    final = _kernels.zrp_kernel(eta, rates, dyn.kernel == "ring", float(burn_in), float(thinning),
                                rng, states, times)
    return Trajectory(times, states, float(final))


class SizeBiasedConfig(NamedTuple):
    values: np.ndarray
    order: np.ndarray


def size_biased_permutation(eta, rng: np.random.Generator) -> SizeBiasedConfig:
    """Reorder sites by repeatedly picking a uniformly random remaining particle.

    Empty sites follow in uniformly random order.
    """
    eta = np.asarray(eta, dtype=np.int64)
    N = int(eta.sum())
    if N == 0:
        raise ValueError("size-biased permutation needs at least one particle")
    mass = eta.astype(float)
    occupied = int(np.count_nonzero(eta))
    order = np.empty(len(eta), dtype=np.int64)
    remaining = float(N)
    for k in range(occupied):
        cum = np.cumsum(mass)
        x = int(np.searchsorted(cum, rng.random() * remaining, side="right"))
        x = min(x, len(eta) - 1)
        while mass[x] == 0.0:  # guard against a draw landing on a rounding edge
            x -= 1
        order[k] = x
        remaining -= mass[x]
        mass[x] = 0.0
    empty = np.flatnonzero(eta == 0)
    order[occupied:] = rng.permutation(empty)
    return SizeBiasedConfig(eta[order], order)


class ProductConditionReport(NamedTuple):
    kind: str  # "zero-range", "curl-free" or "fail"
    witness: Optional[Tuple[int, int]]
    symmetric_difference_ok: bool


def check_product_conditions(c: Callable[[int, int], float], n_max: int, rtol: float = 1e-9) -> ProductConditionReport:
    """Check whether a jump kernel ``c(n, m)`` admits product stationary measures.

    Zero-range kernels (no dependence on ``m``) pass directly; otherwise the
    curl-free identity
    ``c(n, m-1) / c(m, n-1) = c(n, 0) / c(1, n-1) * c(1, m-1) / c(m, 0)``
    is checked for ``1 <= n, m <= n_max`` and the first violation returned.
    ``symmetric_difference_ok`` reports ``c(n,m) - c(m,n) = c(n,0) - c(m,0)``,
    which together with the curl-free identity covers non-reversible kernels.
    """
    vals = np.array([[float(c(n, m)) for m in range(n_max + 1)] for n in range(n_max + 1)])
    if np.any(vals[1:, :] <= 0.0):
        raise ValueError("kernel must be positive for n >= 1, m >= 0")
    sym_ok = bool(np.allclose(vals - vals.T, vals[:, :1] - vals[:, :1].T, rtol=rtol, atol=0.0))
    if np.allclose(vals[1:], vals[1:, :1], rtol=rtol, atol=0.0):
        return ProductConditionReport("zero-range", None, sym_ok)
    for n in range(1, n_max + 1):
        for m in range(1, n_max + 1):
            lhs = vals[n, m - 1] / vals[m, n - 1]
            rhs = vals[n, 0] / vals[1, n - 1] * vals[1, m - 1] / vals[m, 0]
            if not math.isclose(lhs, rhs, rel_tol=rtol):
                return ProductConditionReport("fail", (n, m), sym_ok)
    return ProductConditionReport("curl-free", None, sym_ok)


def stationary_weights(c: Callable[[int, int], float], n_max: int) -> np.ndarray:
    """``w(0) = 1``, ``w(n) = prod_{m=1}^n c(1, m-1) / c(m, 0)``."""
    logs = [0.0]
    for m in range(1, n_max + 1):
        logs.append(logs[-1] + math.log(c(1, m - 1)) - math.log(c(m, 0)))
    return np.exp(np.array(logs))
