"""Cluster scales, size-biased tails, profiles and phase classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import gammaincc, gammaln

from .errors import ModelError, RegimeError
from .weights import ModelSpec, truncated_rho_c

__all__ = [
    "Regime",
    "PhaseReport",
    "TailCurve",
    "CurveDistance",
    "default_s_grid",
    "cluster_scale",
    "classify_phase",
    "empirical_tail",
    "theoretical_tail",
    "macroscopic_tail",
    "max_cluster_fraction",
    "accumulated_profile",
    "profile_slope",
    "curve_distance",
]


def default_s_grid() -> np.ndarray:
    return np.round(np.arange(0, 121) * 0.05, 10)


class Regime(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    MESOSCOPIC = "MesoscopicClusters"
    MACROSCOPIC = "SingleMacroscopicCluster"
    TRANSITION = "TransitionLine"


@dataclass(frozen=True)
class PhaseReport:
    regime: Regime
    c_l: Optional[float]
    mixture_weight: float
    theorem: Optional[str]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "C_L": self.c_l,
            "mixture_weight": self.mixture_weight,
            "theorem": self.theorem,
        }


@dataclass
class TailCurve:
    s_grid: np.ndarray
    empirical: Optional[np.ndarray] = None
    theoretical: Optional[np.ndarray] = None
    c_l: Optional[float] = None
    mixture_weight: Optional[float] = None
    corrected: bool = False
    n_realizations: int = 0
    meta: dict = field(default_factory=dict)


def _excess(model: ModelSpec, corrected: bool, cutoff: Optional[int]) -> float:
    rho_c = model.rho_c
    if corrected:
        rho_c = truncated_rho_c(model, cutoff if cutoff is not None else max(1, int(model.rho * model.L)))
    return model.rho - rho_c


def cluster_scale(model: ModelSpec, corrected: bool = False, cutoff: Optional[int] = None) -> float:
    """Typical cluster size ``((rho - rho_c) L^gamma / (theta Gamma(kappa+2)))^(1/(kappa+2))``.

    With ``corrected`` the critical density is replaced by the mean of
    ``w_L`` truncated at ``cutoff`` (default ``rho L``).
    """
    excess = _excess(model, corrected, cutoff)
    if not excess > 0:
        raise RegimeError(f"no condensate: rho - rho_c = {excess}")
    k, g, th = model.pert.kappa, model.pert.gamma, model.pert.theta
    log_c = (math.log(excess) + g * math.log(model.L) - math.log(th) - gammaln(k + 2)) / (k + 2)
    return math.exp(log_c)


def classify_phase(model: ModelSpec) -> PhaseReport:
    k, g = model.pert.kappa, model.pert.gamma
    if not k >= -1 or not g > 0:
        raise ModelError("need kappa > -1 and gamma > 0")
    rho, rho_c = model.rho, model.rho_c
    if rho <= rho_c:
        return PhaseReport(Regime.SUBCRITICAL, None, 0.0, "equivalence of ensembles",
                           "no condensate")
    weight = (rho - rho_c) / rho
    if math.isclose(g, k + 2, rel_tol=0.0, abs_tol=1e-12):
        return PhaseReport(Regime.TRANSITION, None, weight, None,
                           "several macroscopic clusters expected; Poisson-Dirichlet structure is conjectural")
    if g < k + 2:
        return PhaseReport(Regime.MESOSCOPIC, cluster_scale(model), weight,
                           "Gamma(kappa+2, 1) cluster law")
    theorem = "single macroscopic cluster" if k + 2 > 1 else None
    note = "" if theorem else "kappa + 2 <= 1: outside the proven range, qualitative only"
    return PhaseReport(Regime.MACROSCOPIC, (rho - rho_c) * model.L, weight, theorem, note)


def empirical_tail(configs: Sequence[np.ndarray], c_l: float, s_grid) -> np.ndarray:
    """Average over configurations of ``(1/N) sum_x eta_x 1{eta_x > c_l s}``."""
    if c_l <= 0:
        raise ValueError("cluster scale must be positive")
    s_grid = np.asarray(s_grid, dtype=float)
    if len(configs) == 0:
        raise ValueError("need at least one configuration")
    thresholds = c_l * s_grid
    curves = []
    for eta in configs:
        eta = np.sort(np.asarray(eta))
        total = int(eta.sum())
        if total == 0:
            curves.append(np.zeros_like(s_grid))
            continue
        below = np.concatenate([[0], np.cumsum(eta)])
        idx = np.searchsorted(eta, thresholds, side="right")
        curves.append((total - below[idx]) / total)
    curves = np.array(curves)
    return np.array([math.fsum(col) for col in curves.T]) / len(curves)


def _check_mesoscopic(model: ModelSpec):
    k, g = model.pert.kappa, model.pert.gamma
    if not model.rho > model.rho_c:
        raise RegimeError(f"no condensate: rho={model.rho} <= rho_c={model.rho_c}")
    if not (g < k + 2 and k + 2 > min(g, 1.0)):
        raise RegimeError(f"Gamma cluster law needs gamma < kappa + 2 (kappa={k}, gamma={g})")


def _bulk_mass_above(model: ModelSpec, thresholds: np.ndarray) -> np.ndarray:
    """``sum_{n > t} n w(n)`` for each threshold ``t``."""
    top = int(np.floor(thresholds.max())) if len(thresholds) else 0
    n = np.arange(top + 1)
    partial = np.cumsum(n * model.bulk.pmf(n))
    idx = np.floor(np.maximum(thresholds, 0)).astype(int)
    return np.maximum(model.rho_c - partial[idx], 0.0)


def theoretical_tail(model: ModelSpec, s_grid, corrected: bool = True) -> np.ndarray:
    """Limiting size-biased tail ``((rho - rho_c)/rho) Q(kappa + 2, s)``.

    ``corrected`` adds the finite-size contribution of bulk sites whose
    occupation exceeds ``C_L s``, i.e. ``(1/rho) sum_{n > C_L s} n w(n)``,
    which vanishes for fixed ``s > 0`` as ``L`` grows.
    """
    _check_mesoscopic(model)
    s_grid = np.asarray(s_grid, dtype=float)
    rho, rho_c = model.rho, model.rho_c
    out = (rho - rho_c) / rho * gammaincc(model.pert.kappa + 2, s_grid)
    if corrected:
        out = out + _bulk_mass_above(model, cluster_scale(model) * s_grid) / rho
    return out


def macroscopic_tail(model: ModelSpec, s_grid, corrected: bool = True) -> np.ndarray:
    """Step-function tail on scale ``(rho - rho_c) L`` for a single condensate."""
    excess = model.rho - model.rho_c
    if not excess > 0:
        raise RegimeError("no condensate")
    s_grid = np.asarray(s_grid, dtype=float)
    out = np.where(s_grid < 1.0, excess / model.rho, 0.0)
    if corrected:
        out = out + _bulk_mass_above(model, excess * model.L * s_grid) / model.rho
    return out


def max_cluster_fraction(eta) -> float:
    eta = np.asarray(eta)
    return float(eta.max()) / len(eta)


def accumulated_profile(eta) -> np.ndarray:
    """``H(k) = eta_1 + ... + eta_k`` for ``k = 1..L``."""
    return np.cumsum(np.asarray(eta))


def profile_slope(eta, threshold: Optional[float] = None) -> float:
    """Least-squares slope of the accumulated profile on jump-free stretches.

    A jump is a site with occupation above ``threshold`` (default
    ``5 * rho``); each stretch between jumps gets its own intercept.
    """
    eta = np.asarray(eta, dtype=float)
    if threshold is None:
        threshold = 5.0 * eta.mean()
    h = np.cumsum(eta)
    k = np.arange(1, len(eta) + 1, dtype=float)
    jump = eta > threshold
    sxy = sxx = 0.0
    start = 0
    for stop in list(np.flatnonzero(jump)) + [len(eta)]:
        if stop - start >= 2:
            kk, hh = k[start:stop], h[start:stop]
            kc = kk - kk.mean()
            sxy += float(np.dot(kc, hh - hh.mean()))
            sxx += float(np.dot(kc, kc))
        start = stop + 1
    if sxx == 0.0:
        raise ValueError("no jump-free stretch of length >= 2")
    return sxy / sxx


class CurveDistance(NamedTuple):
    sup: float
    sup_positive: float


def curve_distance(a: TailCurve, b: TailCurve, *, use: str = "auto") -> CurveDistance:
    """Sup-norm distance between two curves on a common grid.

    Each curve contributes its ``empirical`` values if present, else its
    ``theoretical`` values; ``use`` forces one of the two fields.
    The second number restricts the sup to grid points with ``s > 0``.
    """
    if a.s_grid.shape != b.s_grid.shape or not np.allclose(a.s_grid, b.s_grid, rtol=0, atol=0):
        raise ValueError("curves must share the same s grid")

    def values(c: TailCurve):
        if use == "empirical" or (use == "auto" and c.empirical is not None):
            return np.asarray(c.empirical)
        return np.asarray(c.theoretical)

    d = np.abs(values(a) - values(b))
    pos = a.s_grid > 0
    return CurveDistance(float(d.max()), float(d[pos].max()) if pos.any() else 0.0)
