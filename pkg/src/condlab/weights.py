"""Stationary weight families and grand-canonical scalar functions.

The single-site weights of the lattice gas are a normalized bulk law ``w``
with exponential moments plus a size-dependent power-law perturbation::

    w_L(n) = w(n) + theta * L**(-gamma) * (n + 1)**kappa * (1 + delta_L(n))

Everything downstream (partition tables, samplers, asymptotics) is driven by
a :class:`ModelSpec`, which bundles the bulk law, the perturbation and the
system size.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetError, DomainError, ModelError

__all__ = [
    "BulkWeights",
    "PerturbationParams",
    "ModelSpec",
    "GrandCanonical",
    "bulk_pmf",
    "perturbed_pmf",
    "grand_canonical",
    "invert_density",
    "tilt_fugacity",
    "truncated_rho_c",
    "power_series_moments",
]

NORMALIZATION_TOL = 1e-12
SERIES_REL_TOL = 1e-14
MAX_SERIES_TERMS = 10**8
BISECTION_UPPER = 1.0 - 1e-13


@dataclass(frozen=True)
class BulkWeights:
    """Normalized bulk weights with a geometric tail.

    ``head`` holds ``w(0), ..., w(K-1)``; beyond the table the weights
    continue as ``w(n) = w(K-1) * tail_ratio**(n - K + 1)``.  The geometric
    family is the special case ``K = 1``.
    """

    head: tuple
    tail_ratio: float
    family: str = "table"

    def __post_init__(self):
        if not 0.0 < self.tail_ratio < 1.0:
            raise ModelError(f"tail ratio must lie in (0, 1), got {self.tail_ratio}")
        if len(self.head) == 0 or any(not (v > 0.0) for v in self.head):
            raise ModelError("bulk weights must be strictly positive")
        total = math.fsum(self.head) + self.head[-1] * self.tail_ratio / (1.0 - self.tail_ratio)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ModelError(f"bulk weights sum to {total!r}, expected 1")

    @classmethod
    def geometric(cls, p: float) -> "BulkWeights":
        """``w(n) = (1 - p) p**n``."""
        if not 0.0 < p < 1.0:
            raise ModelError(f"geometric ratio must lie in (0, 1), got {p}")
        return cls(head=(1.0 - p,), tail_ratio=float(p), family="geometric")

    @classmethod
    def table(cls, weights: Sequence[float], tail_ratio: float) -> "BulkWeights":
        """Finite table extended geometrically, rescaled to total mass one."""
        v = [float(x) for x in weights]
        if len(v) == 0 or any(not (x > 0.0) for x in v):
            raise ModelError("bulk weights must be strictly positive")
        if not 0.0 < tail_ratio < 1.0:
            raise ModelError(f"tail ratio must lie in (0, 1), got {tail_ratio}")
        total = math.fsum(v) + v[-1] * tail_ratio / (1.0 - tail_ratio)
        return cls(head=tuple(x / total for x in v), tail_ratio=float(tail_ratio), family="table")

    @property
    def phi_bar(self) -> float:
        """Radius of convergence of the generating function ``z``."""
        return 1.0 / self.tail_ratio

    @property
    def rho_c(self) -> float:
        return self.moments(1.0)[1] / self.moments(1.0)[0]

    def pmf(self, n):
        n = np.asarray(n)
        k = len(self.head)
        head = np.asarray(self.head)
        idx = np.minimum(n, k - 1)
        out = head[idx] * self.tail_ratio ** np.maximum(n - (k - 1), 0).astype(float)
        return out if out.ndim else float(out)

    def moments(self, phi: float) -> np.ndarray:
        """Return ``[sum w(n) phi^n, sum n w(n) phi^n, sum n^2 w(n) phi^n]``."""
        if phi < 0.0 or phi >= self.phi_bar:
            raise DomainError(f"fugacity {phi} outside [0, {self.phi_bar})")
        k = len(self.head)
        n = np.arange(k, dtype=float)
        terms = np.asarray(self.head) * phi**n
        out = np.array([terms.sum(), (n * terms).sum(), (n * n * terms).sum()])
        # geometric continuation: w(K-1) phi^(K-1) sum_{j>=1} (K-1+j)^p x^j
        x = self.tail_ratio * phi
        s0 = x / (1.0 - x)
        s1 = x / (1.0 - x) ** 2
        s2 = x * (1.0 + x) / (1.0 - x) ** 3
        a = k - 1
        pref = self.head[-1] * phi**a
        out += pref * np.array([s0, a * s0 + s1, a * a * s0 + 2 * a * s1 + s2])
        return out

    def z(self, phi: float) -> float:
        return float(self.moments(phi)[0])

    def R(self, phi: float) -> float:
        m = self.moments(phi)
        return float(m[1] / m[0])


DeltaFn = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PerturbationParams:
    """Size-dependent perturbation ``theta L^-gamma (n+1)^kappa (1 + delta_L(n))``.

    ``delta`` is called as ``delta(L, n_array)`` and must satisfy
    ``|delta| <= delta_bound``.  ``allow_boundary_kappa`` admits ``kappa = -1``
    exactly, which is outside the theory but usable at finite size.
    """

    theta: float
    gamma: float
    kappa: float
    delta: Optional[DeltaFn] = field(default=None, compare=False)
    delta_bound: float = 0.0
    allow_boundary_kappa: bool = False

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ModelError(f"theta must be positive, got {self.theta}")
        if not self.gamma > 0.0:
            raise ModelError(f"gamma must be positive, got {self.gamma}")
        if self.allow_boundary_kappa:
            if not self.kappa >= -1.0:
                raise ModelError(f"kappa must be >= -1, got {self.kappa}")
        elif not self.kappa > -1.0:
            raise ModelError(f"kappa must be > -1, got {self.kappa}")
        if self.delta_bound < 0.0:
            raise ModelError("delta_bound must be non-negative")

    def delta_values(self, L: int, n) -> np.ndarray:
        n = np.asarray(n)
        if self.delta is None:
            return np.zeros(n.shape)
        return np.asarray(self.delta(L, n), dtype=float) * np.ones(n.shape)

    def values(self, L: int, n) -> np.ndarray:
        n = np.asarray(n)
        base = self.theta * float(L) ** (-self.gamma) * (n + 1.0) ** self.kappa
        return base * (1.0 + self.delta_values(L, n))


@dataclass(frozen=True)
class ModelSpec:
    bulk: BulkWeights
    pert: PerturbationParams
    L: int
    N: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ModelError(f"L must be a positive integer, got {self.L}")
        if int(self.N) != self.N or self.N < 0:
            raise ModelError(f"N must be a non-negative integer, got {self.N}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "N", int(self.N))
        n = np.arange(self.N + 1)
        if self.pert.delta is not None:
            d = self.pert.delta_values(self.L, n)
            if np.any(np.abs(d) > self.pert.delta_bound):
                raise ModelError("delta_L exceeds its declared bound")
        if np.any(self.weights(self.N) <= 0.0):
            raise ModelError("perturbed weights must be positive up to N")

    @property
    def rho(self) -> float:
        return self.N / self.L

    @property
    def rho_c(self) -> float:
        return self.bulk.rho_c

    def weights(self, n_max: int) -> np.ndarray:
        """``w_L(0..n_max)`` at this model's system size."""
        n = np.arange(n_max + 1)
        return self.bulk.pmf(n) + self.pert.values(self.L, n)

    def with_size(self, L: int, N: int) -> "ModelSpec":
        return replace(self, L=L, N=N)

    def with_theta(self, theta: float) -> "ModelSpec":
        return replace(self, pert=replace(self.pert, theta=theta))

    def describe(self) -> dict:
        d = self.pert.delta
        return {
            "bulk.family": self.bulk.family,
            "bulk.head": [float(v).hex() for v in self.bulk.head],
            "bulk.tail_ratio": float(self.bulk.tail_ratio).hex(),
            "pert.theta": float(self.pert.theta).hex(),
            "pert.gamma": float(self.pert.gamma).hex(),
            "pert.kappa": float(self.pert.kappa).hex(),
            "pert.delta": None if d is None else getattr(d, "__qualname__", repr(d)),
            "pert.delta_bound": float(self.pert.delta_bound).hex(),
            "system.L": self.L,
            "system.N": self.N,
        }

    @property
    def hash(self) -> bytes:
        """8-byte digest identifying the weight function and system size."""
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).digest()[:8]


class GrandCanonical(NamedTuple):
    z: float
    R: float
    z_L: Optional[float]
    R_L: Optional[float]


def bulk_pmf(model: ModelSpec, n):
    """Bulk weight ``w(n)``."""
    return model.bulk.pmf(n)


def perturbed_pmf(model: ModelSpec, n):
    """Size-dependent weight ``w_L(n)`` at the model's ``L``."""
    out = model.bulk.pmf(n) + model.pert.values(model.L, n)
    return out if np.ndim(out) else float(out)


def power_series_moments(kappa: float, phi: float, *, moments: int = 3, weight=None,
                         weight_bound: float = 0.0, rel_tol: float = SERIES_REL_TOL,
                         max_terms: int = MAX_SERIES_TERMS) -> np.ndarray:
    """Sums ``sum_n n^k (n+1)^kappa c(n) phi^n`` for ``k < moments``.

    ``c(n) = 1 + weight(n)`` with ``|weight| <= weight_bound`` (default 1).
    Summation stops once a geometric bound on the remaining tail falls below
    ``rel_tol`` times every partial sum.
    """
    if not 0.0 <= phi < 1.0:
        raise DomainError(f"power series needs 0 <= phi < 1, got {phi}")
    out = np.zeros(moments)
    if phi == 0.0:
        c0 = 1.0 + (0.0 if weight is None else float(np.asarray(weight(np.array([0])))[0]))
        out[0] = c0
        return out
    log_phi = math.log(phi)
    parts = [[] for _ in range(moments)]
    start, chunk = 0, 256
    while True:
        n = np.arange(start, start + chunk, dtype=float)
        base = np.exp(kappa * np.log1p(n) + n * log_phi)
        c = base
        if weight is not None:
            c = base * (1.0 + np.asarray(weight(n.astype(np.int64)), dtype=float))
        for k in range(moments):
            parts[k].append(math.fsum(c * n**k))
        out = np.array([math.fsum(p) for p in parts])
        last = n[-1]
        # bound on the ratio of consecutive terms beyond `last`, valid for every k < moments
        ratio = phi * max(1.0, ((last + 2.0) / (last + 1.0)) ** kappa) * ((last + 1.0) / last) ** (moments - 1)
        if ratio < 1.0:
            tail = base[-1] * (1.0 + weight_bound) * last ** np.arange(moments) * ratio / (1.0 - ratio)
            if np.all(tail <= rel_tol * np.where(out > 0, out, np.inf)):
                return out
        start += chunk
        if start > max_terms:
            raise BudgetError(f"series at phi={phi} needs more than {max_terms} terms")
        chunk = min(chunk * 2, 1 << 20)


def grand_canonical(model: ModelSpec, phi: float, size_dependent: bool = True) -> GrandCanonical:
    """``(z, R, z_L, R_L)`` at fugacity ``phi``.

    The size-dependent sums diverge at ``phi = 1``; request them there only
    through :func:`truncated_rho_c`.
    """
    if phi < 0.0 or phi > 1.0:
        raise DomainError(f"fugacity must lie in [0, 1], got {phi}")
    if phi >= model.bulk.phi_bar:
        raise DomainError(f"fugacity {phi} beyond radius of convergence {model.bulk.phi_bar}")
    m = model.bulk.moments(phi)
    z, R = float(m[0]), float(m[1] / m[0])
    if not size_dependent:
        return GrandCanonical(z, R, None, None)
    if phi == 1.0:
        raise DomainError("size-dependent sums diverge at phi = 1; use truncated_rho_c(model, cutoff)")
    L = model.L
    weight = None
    if model.pert.delta is not None:
        weight = lambda n: model.pert.delta_values(L, n)  # noqa: E731
    p = power_series_moments(model.pert.kappa, phi, moments=2, weight=weight,
                             weight_bound=model.pert.delta_bound)
    scale = model.pert.theta * float(L) ** (-model.pert.gamma)
    z_L = m[0] + scale * p[0]
    R_L = (m[1] + scale * p[1]) / z_L
    return GrandCanonical(z, R, float(z_L), float(R_L))


def _bisect_increasing(f, target: float, lo: float, hi: float, tol: float) -> float:
    f_lo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm - target) < tol:
            return mid
        if fm < target:
            lo, f_lo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def invert_density(model: ModelSpec, rho: float) -> float:
    """Fugacity ``Phi(rho)`` of the limiting bulk marginal.

    Bisection of the bulk ``R`` for ``rho < rho_c``; exactly 1 at and above
    the critical density.
    """
    if rho < 0.0:
        raise DomainError(f"density must be non-negative, got {rho}")
    if rho == 0.0:
        return 0.0
    if rho >= model.rho_c:
        return 1.0
    return _bisect_increasing(model.bulk.R, rho, 0.0, BISECTION_UPPER, 1e-12)


def tilt_fugacity(bulk: BulkWeights, u: float) -> float:
    """Fugacity ``phi < phi_bar`` with ``R(phi) = u``, for any ``u >= 0``.

    Unlike :func:`invert_density` this does not saturate at ``rho_c``; it is
    the tilt used by the rate function.
    """
    if u < 0.0:
        raise DomainError(f"density must be non-negative, got {u}")
    if u == 0.0:
        return 0.0
    hi = bulk.phi_bar * (1.0 - 1e-15)
    if not bulk.R(hi) > u:
        raise DomainError(f"density {u} beyond the representable tilt range of the bulk weights")
    return _bisect_increasing(bulk.R, u, 0.0, hi, 1e-13 * max(1.0, u))


def truncated_rho_c(model: ModelSpec, cutoff: int) -> float:
    """Mean of ``w_L`` restricted to ``n <= cutoff`` (finite-size critical density)."""
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    n = np.arange(int(cutoff) + 1)
    w = model.bulk.pmf(n) + model.pert.values(model.L, n)
    return math.fsum(n * w) / math.fsum(w)
