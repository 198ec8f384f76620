"""Canonical partition functions and their asymptotics.

``build_table`` computes ``log Z_{l,m}`` for all ``l <= L`` and ``m <= N``
under the weights ``w_L`` of one model (the weights stay fixed at the
model's ``L`` while the row index runs below it, so each row is the
partition function of a sub-lattice conditioned on its mass).

Rows are convolutions of positive sequences.  Each row is convolved in
linear space after subtracting its maximum; entries that land too close to
the float64 underflow range are recomputed with an exact log-sum-exp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import BudgetError, RegimeError, TableMismatchError
from .oracle import composition_blocks
from .weights import BulkWeights, ModelSpec, power_series_moments, tilt_fugacity

__all__ = [
    "LogPartitionTable",
    "build_table",
    "build_bulk_table",
    "z_ratio_exact",
    "z_ratio_asymptotic",
    "site_marginal",
    "size_biased_marginal",
    "size_biased_log_prob",
    "a_ell_brute",
    "log_a_ell_brute",
    "a_ell_asymptotic",
    "log_a_ell_asymptotic",
    "RateFunctionData",
    "rate_function",
    "decomposition_terms",
    "decomposition_partial",
    "SaddlePointData",
    "saddle_point",
    "saddle_objective",
    "LogZAsymptotic",
    "log_z_asymptotic",
]

TABLE_BUDGET = 5 * 10**7
# relative row size below which the float64 convolution is not trusted
_UNDERFLOW_GUARD = 1e-250


@dataclass(frozen=True, eq=False)
class LogPartitionTable:
    """``log_z[l, m] = log Z_{l,m}``; ``-inf`` marks ``Z = 0``."""

    log_z: np.ndarray
    log_weights: np.ndarray
    model_hash: bytes = bytes(8)

    def __post_init__(self):
        for a in (self.log_z, self.log_weights):
            a.flags.writeable = False

    @property
    def L_max(self) -> int:
        return self.log_z.shape[0] - 1

    @property
    def N_max(self) -> int:
        return self.log_z.shape[1] - 1

    def log_Z(self, l: int, m: int) -> float:
        return float(self.log_z[l, m])

    def check_model(self, model: ModelSpec):
        if self.model_hash != model.hash:
            raise TableMismatchError("partition table was built for a different model")

    def covers(self, L: int, N: int) -> bool:
        return 0 <= L <= self.L_max and 0 <= N <= self.N_max


def _log_partition_rows(log_w: np.ndarray, L_max: int) -> np.ndarray:
    N_max = len(log_w) - 1
    out = np.full((L_max + 1, N_max + 1), -np.inf)
    out[0, 0] = 0.0
    w_shift = log_w.max()
    w = np.exp(log_w - w_shift)
    for l in range(1, L_max + 1):
        prev = out[l - 1]
        shift = prev.max()
        row = np.convolve(w, np.exp(prev - shift))[: N_max + 1]
        with np.errstate(divide="ignore"):
            out[l] = np.log(row) + shift + w_shift
        for m in np.flatnonzero(row < _UNDERFLOW_GUARD * row.max()):
            out[l, m] = logsumexp(log_w[: m + 1] + prev[m::-1])
    return out


def _check_budget(L_max: int, N_max: int, max_entries: int):
    need = (L_max + 1) * (N_max + 1)
    if L_max * N_max > max_entries:
        raise BudgetError(f"table needs {need} entries, budget is {max_entries}")


def build_table(model: ModelSpec, L_max: Optional[int] = None, N_max: Optional[int] = None,
                max_entries: int = TABLE_BUDGET) -> LogPartitionTable:
    """Exact ``log Z_{l,m}`` under the model's weights ``w_L``."""
    L_max = model.L if L_max is None else L_max
    N_max = model.N if N_max is None else N_max
    _check_budget(L_max, N_max, max_entries)
    log_w = np.log(model.weights(N_max))
    return LogPartitionTable(_log_partition_rows(log_w, L_max), log_w, model.hash)


def build_bulk_table(bulk: BulkWeights, L_max: int, N_max: int,
                     max_entries: int = TABLE_BUDGET) -> LogPartitionTable:
    """Partition table of the unperturbed bulk weights, ``w^l(sum = m)``."""
    _check_budget(L_max, N_max, max_entries)
    n = np.arange(N_max + 1)
    k = len(bulk.head)
    log_w = np.log(np.asarray(bulk.head))[np.minimum(n, k - 1)] + np.maximum(n - (k - 1), 0) * math.log(bulk.tail_ratio)
    return LogPartitionTable(_log_partition_rows(log_w, L_max), log_w)


def _check_cover(table: LogPartitionTable, L: int, N: int):
    if not (table.covers(L, N) and L >= 1):
        raise IndexError(f"(L={L}, N={N}) outside table of shape {table.log_z.shape}")


def z_ratio_exact(table: LogPartitionTable, L: int, N: int, n):
    """``Z_{L-1,N-n} / Z_{L,N}``."""
    _check_cover(table, L, N)
    n = np.asarray(n)
    if np.any(n < 0) or np.any(n > N):
        raise IndexError("n must lie in [0, N]")
    out = np.exp(table.log_z[L - 1, N - n] - table.log_z[L, N])
    return out if out.ndim else float(out)


def site_marginal(table: LogPartitionTable, L: int, N: int) -> np.ndarray:
    """Exact law of a single occupation number, indexed by ``n = 0..N``."""
    _check_cover(table, L, N)
    n = np.arange(N + 1)
    return np.exp(table.log_weights[n] + table.log_z[L - 1, N - n] - table.log_z[L, N])


def size_biased_marginal(table: LogPartitionTable, L: int, N: int) -> np.ndarray:
    """Law of the first size-biased entry: ``(L/N) n w_L(n) Z_{L-1,N-n} / Z_{L,N}``."""
    if N == 0:
        raise ValueError("size-biased law needs N >= 1")
    n = np.arange(N + 1)
    return (L / N) * n * site_marginal(table, L, N)


def size_biased_log_prob(table: LogPartitionTable, L: int, N: int, ns) -> float:
    """Log-probability that the first ``len(ns)`` size-biased entries equal ``ns``.

    Requires ``sum(ns[:-1]) < N`` so every factor is defined.
    """
    _check_cover(table, L, N)
    ns = [int(v) for v in ns]
    if len(ns) > L or sum(ns) > N:
        return -math.inf
    out, rest = 0.0, N
    for k, n in enumerate(ns):
        if rest == 0:
            raise ValueError("size-biased factors undefined once all mass is taken")
        if n == 0:
            return -math.inf
        out += math.log((L - k) * n / rest) + float(table.log_weights[n])
        rest -= n
    m = len(ns)
    return out + float(table.log_z[L - m, rest] - table.log_z[L, N])


def z_ratio_asymptotic(model: ModelSpec, n):
    """``exp(-n / C_L)`` in the mesoscopic regime."""
    from .observables import cluster_scale

    k, g = model.pert.kappa, model.pert.gamma
    if not model.rho > model.rho_c:
        raise RegimeError(f"needs rho > rho_c (rho={model.rho}, rho_c={model.rho_c})")
    if not k + 2 > min(g, 1.0):
        raise RegimeError(f"needs kappa + 2 > min(gamma, 1) (kappa={k}, gamma={g})")
    c = cluster_scale(model)
    out = np.exp(-np.asarray(n, dtype=float) / c)
    return out if out.ndim else float(out)


# -- A_l(n): sums of (n_y + 1)^kappa over compositions -----------------------

def log_a_ell_brute(l: int, n: int, kappa: float, budget: int = 10**7) -> float:
    if l < 1 or n < 0:
        raise ValueError("need l >= 1 and n >= 0")
    parts = [logsumexp(kappa * np.log1p(b).sum(axis=1)) for b in composition_blocks(n, l, budget)]
    return float(logsumexp(parts))


def a_ell_brute(l: int, n: int, kappa: float, budget: int = 10**7) -> float:
    """``sum over n_1 + ... + n_l = n`` of ``prod (n_y + 1)^kappa``, by enumeration."""
    return math.exp(log_a_ell_brute(l, n, kappa, budget))


def _kappa_tilt(kappa: float, u: float):
    """Fugacity solving ``r_kappa(phi) = u`` with ``z_kappa`` and the variance there."""
    def moments(phi):
        m = power_series_moments(kappa, phi, moments=3)
        return m[0], m[1] / m[0], m[2] / m[0] - (m[1] / m[0]) ** 2

    # grow the bracket toward 1 so the series length stays proportional to 1/(1-phi)
    lo, hi = 0.0, 0.5
    while moments(hi)[1] < u:
        lo, hi = hi, 1.0 - 0.5 * (1.0 - hi)
        if hi > 1.0 - 1e-9:
            raise RegimeError(f"density {u} too large for the dense-regime tilt")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if moments(mid)[1] < u:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    phi = 0.5 * (lo + hi)
    z, _, var = moments(phi)
    return phi, z, var


def log_a_ell_asymptotic(l: int, n: int, kappa: float, regime: str = "sparse") -> float:
    if kappa <= -1:
        raise ValueError("kappa must exceed -1")
    if l < 1 or n < 1:
        raise ValueError("need l >= 1 and n >= 1")
    if regime == "sparse":
        return ((kappa + 1) * l - 1) * math.log(n) + l * gammaln(kappa + 1) - gammaln((kappa + 1) * l)
    if regime == "dense":
        phi, z, var = _kappa_tilt(kappa, n / l)
        return -n * math.log(phi) + l * math.log(z) - 0.5 * math.log(2 * math.pi * l * var)
    raise ValueError(f"unknown regime {regime!r}")


def a_ell_asymptotic(l: int, n: int, kappa: float, regime: str = "sparse") -> float:
    """Leading-order ``A_l(n)``.

    ``sparse`` (``l << n``) is the Dirichlet-integral form; ``dense``
    (``n / l`` bounded) is the tilted local-limit form, without the unknown
    constant-order correction.
    """
    return math.exp(log_a_ell_asymptotic(l, n, kappa, regime))


# -- rate function -----------------------------------------------------------

class RateFunctionData(NamedTuple):
    u: float
    phi: float
    I: float
    variance: float


def rate_function(model: ModelSpec, u: float) -> RateFunctionData:
    """Legendre transform of ``log z`` for the bulk weights, evaluated at
    the maximizing tilt ``R(phi) = u`` (which may exceed 1)."""
    bulk = model.bulk
    phi = tilt_fugacity(bulk, u)
    m = bulk.moments(phi)
    mean = m[1] / m[0]
    var = m[2] / m[0] - mean * mean
    ulogphi = 0.0 if u == 0.0 else u * math.log(phi)
    return RateFunctionData(u, phi, ulogphi - math.log(m[0]), var)


# -- perturbative decomposition of Z -----------------------------------------

def decomposition_terms(model: ModelSpec, l_max: int, theta: Optional[float] = None) -> np.ndarray:
    """Log of the terms ``l = 0..l_max`` in the expansion of ``Z_{L,N}`` in
    powers of the perturbation; term ``l`` collects all configurations where
    exactly ``l`` sites carry the perturbative weight.

    ``theta`` overrides the model's amplitude (0 is allowed here).
    """
    if model.pert.delta is not None:
        raise ValueError("the decomposition assumes delta_L == 0")
    L, N = model.L, model.N
    l_max = min(l_max, L)
    theta = model.pert.theta if theta is None else theta
    bulk_tab = build_bulk_table(model.bulk, L, N)
    terms = np.full(l_max + 1, -np.inf)
    terms[0] = bulk_tab.log_z[L, N]
    if theta == 0.0:
        return terms
    k, g = model.pert.kappa, model.pert.gamma
    for l in range(1, l_max + 1):
        inner = [bulk_tab.log_z[L - l, N - n] + log_a_ell_brute(l, n, k) for n in range(N + 1)]
        log_binom = gammaln(L + 1) - gammaln(l + 1) - gammaln(L - l + 1)
        terms[l] = log_binom + l * (math.log(theta) - g * math.log(L)) + logsumexp(inner)
    return terms


def decomposition_partial(model: ModelSpec, l_max: int, theta: Optional[float] = None) -> float:
    """``log`` of the expansion of ``Z_{L,N}`` truncated after ``l_max`` perturbed sites."""
    return float(logsumexp(decomposition_terms(model, l_max, theta)))


# -- saddle-point asymptotics of log Z ---------------------------------------

class SaddlePointData(NamedTuple):
    alpha: float
    s_star: float
    c_kappa_theta: float
    leading_log_z: float


def saddle_objective(s, kappa: float, theta: float, excess: float):
    """Exponent density ``f(s)`` whose maximum sets the growth of ``log Z``."""
    s = np.asarray(s, dtype=float)
    return s * ((kappa + 2) * (1 - np.log(s)) + (kappa + 1) * math.log(excess / (kappa + 1))
                + math.log(theta) + gammaln(kappa + 1))


def saddle_point(kappa: float, gamma: float, theta: float, excess: float, L: float) -> SaddlePointData:
    alpha = 1.0 - gamma / (kappa + 2)
    c = math.exp((math.log(theta) + gammaln(kappa + 2)) / (kappa + 2)) / (kappa + 1)
    s_star = excess ** ((kappa + 1) / (kappa + 2)) * c
    return SaddlePointData(alpha, s_star, c, L**alpha * (kappa + 2) * s_star)


class LogZAsymptotic(NamedTuple):
    regime: str
    log_z: float
    saddle: Optional[SaddlePointData]


def log_z_asymptotic(model: ModelSpec) -> LogZAsymptotic:
    """Leading-order ``log Z_{L,N}`` above the critical density.

    Mesoscopic (``gamma < kappa + 2``): the exponent ``L^alpha (kappa+2) s*``.
    Macroscopic (``gamma > kappa + 2 > 1``):
    ``log theta + (kappa + 1 - gamma) log L + kappa log(rho - rho_c)``.
    """
    k, g, th = model.pert.kappa, model.pert.gamma, model.pert.theta
    excess = model.rho - model.rho_c
    if not excess > 0:
        raise RegimeError(f"needs rho > rho_c (rho={model.rho}, rho_c={model.rho_c})")
    if math.isclose(g, k + 2, rel_tol=0.0, abs_tol=1e-12):
        raise RegimeError("gamma = kappa + 2 (transition line) is not supported")
    if g < k + 2:
        sp = saddle_point(k, g, th, excess, model.L)
        return LogZAsymptotic("mesoscopic", sp.leading_log_z, sp)
    if not k + 2 > 1:
        raise RegimeError(f"macroscopic asymptotics need kappa + 2 > 1 (kappa={k})")
    return LogZAsymptotic("macroscopic", math.log(th) + (k + 1 - g) * math.log(model.L) + k * math.log(excess), None)
