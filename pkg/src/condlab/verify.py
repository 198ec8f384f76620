"""Enumeration checks of the fast numerics, used by ``condlab oracle`` and the tests.

Each check returns a plain dict ``{name, passed, value, tolerance}`` so the
results serialize directly to JSON.
"""

from __future__ import annotations

import math
from typing import List, Optional

import numpy as np
from scipy.special import comb

from .errors import BudgetError
from .oracle import brute_measure, brute_theorem1_check, count_states, ENUMERATION_BUDGET
from .partition import a_ell_brute, build_table, decomposition_partial, size_biased_log_prob, size_biased_marginal
from .weights import BulkWeights, ModelSpec, PerturbationParams

REL_TOL = 1e-10


def reference_model(kappa: float = 0.0, L: int = 6, N: int = 8) -> ModelSpec:
    """Geometric(1/2) bulk with ``theta = 0.1``, ``gamma = 1``."""
    return ModelSpec(BulkWeights.geometric(0.5), PerturbationParams(0.1, 1.0, kappa), L, N)


def _result(name: str, value: float, tol: float, passed: Optional[bool] = None) -> dict:
    ok = bool(value < tol) if passed is None else bool(passed)
    return {"name": name, "passed": ok, "value": float(value), "tolerance": tol}


def partition_errors(model: ModelSpec) -> tuple:
    """Worst relative error of ``Z_{l,m}`` and worst pointwise error of the
    size-biased first and pair laws, recursion against enumeration, over
    all ``1 <= l <= L``, ``0 <= m <= N``.

    The weights depend on the system size, so each ``l`` gets its own table.
    """
    z_err = sb_err = 0.0
    for l in range(1, model.L + 1):
        table = build_table(model.with_size(l, model.N))
        for m in range(model.N + 1):
            bm = brute_measure(model.with_size(l, m))
            z_err = max(z_err, abs(math.expm1(table.log_z[l, m] - bm.log_Z)))
            if m == 0:
                continue
            sb = size_biased_marginal(table, l, m)
            sb_err = max(sb_err, float(np.abs(sb - bm.size_biased_first).max()))
            if l >= 2:
                for a in range(1, m):
                    for b in range(1, m - a + 1):
                        p = math.exp(size_biased_log_prob(table, l, m, (a, b)))
                        sb_err = max(sb_err, abs(p - bm.size_biased_pair[a, b]))
    return z_err, sb_err


def check_partition(model: ModelSpec) -> List[dict]:
    z_err, sb_err = partition_errors(model)
    tag = f"kappa={model.pert.kappa:g} L<={model.L} N<={model.N}"
    return [_result(f"Z recursion vs enumeration ({tag})", z_err, REL_TOL),
            _result(f"size-biased law vs enumeration ({tag})", sb_err, REL_TOL)]


def check_decomposition(model: ModelSpec) -> dict:
    exact = build_table(model).log_z[model.L, model.N]
    full = decomposition_partial(model, model.L)
    return _result(f"full decomposition vs table (L={model.L}, N={model.N})",
                   abs(math.expm1(full - exact)), 1e-9)


def check_a_ell_identity(max_l: int = 5, max_n: int = 12) -> dict:
    worst = 0.0
    for l in range(1, max_l + 1):
        for n in range(max_n + 1):
            worst = max(worst, abs(a_ell_brute(l, n, 0.0) / comb(n + l - 1, l - 1, exact=True) - 1.0))
    return _result("A_l(n) at kappa=0 equals C(n+l-1, l-1)", worst, 1e-12)


def check_symmetry() -> dict:
    bm = brute_measure(reference_model(0.0, 2, 1))
    return _result("L=2 N=1 uniform", abs(bm.probs[0] - 0.5) + abs(bm.probs[1] - 0.5), 1e-15)


def check_theorem1(sizes=(4, 6, 8)) -> List[dict]:
    out = []
    tvs = brute_theorem1_check(reference_model(), [0.0, 0.5, 2.0], sizes)
    out.append(_result("rho=0 marginal is a point mass", tvs[0.0][-1], 1e-15, tvs[0.0] == [0.0] * len(sizes)))
    for rho in (0.5, 2.0):
        seq = tvs[rho]
        out.append(_result(f"TV to the product law decreases (rho={rho})", seq[-1], 1.0,
                           all(b < a for a, b in zip(seq, seq[1:]))))
    return out


def run_oracle_suite(model: Optional[ModelSpec] = None) -> List[dict]:
    """Default enumeration suite, plus partition checks on ``model`` when enumerable."""
    results = [check_symmetry()]
    for kappa in (0.0, 0.5):
        results += check_partition(reference_model(kappa))
    results.append(check_decomposition(reference_model(0.0)))
    results.append(check_a_ell_identity())
    results += check_theorem1()
    if model is not None:
        if count_states(model.L, model.N) * model.L * model.N > ENUMERATION_BUDGET:
            raise BudgetError(f"model (L={model.L}, N={model.N}) is too large to enumerate")
        results += check_partition(model)
    return results
