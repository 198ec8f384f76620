"""Brute-force ground truth by full enumeration of small state spaces.

Nothing here uses the partition recursion: every quantity is summed
directly over ``E_{L,N}``, so these routines can check the fast paths.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import BudgetError
from .weights import ModelSpec, invert_density

__all__ = [
    "ENUMERATION_BUDGET",
    "count_states",
    "composition_blocks",
    "enumerate_states",
    "BruteMeasure",
    "brute_measure",
    "brute_theorem1_check",
]

ENUMERATION_BUDGET = 10**7
_BLOCK = 1 << 16


def count_states(L: int, N: int) -> int:
    """Number of ways to put ``N`` particles on ``L`` sites."""
    return math.comb(N + L - 1, L - 1)


@functools.lru_cache(maxsize=512)
def _all_compositions(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _all_compositions(total - first, parts - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    out = np.concatenate(blocks)
    out.flags.writeable = False
    return out


def composition_blocks(total: int, parts: int, budget: int = ENUMERATION_BUDGET) -> Iterator[np.ndarray]:
    """Yield all compositions of ``total`` into ``parts`` non-negative parts.

    Rows come in lexicographic order, in blocks of bounded size.
    """
    if parts < 1:
        raise ValueError("need at least one part")
    count = count_states(parts, total)
    if count > budget:
        raise BudgetError(f"{count} compositions exceed the enumeration budget {budget}")
    yield from _blocks(total, parts)


def _blocks(total: int, parts: int) -> Iterator[np.ndarray]:
    if count_states(parts, total) <= _BLOCK or parts == 1:
        yield _all_compositions(total, parts)
        return
    for first in range(total + 1):
        for rest in _blocks(total - first, parts - 1):
            yield np.column_stack([np.full(len(rest), first, dtype=np.int64), rest])


def enumerate_states(L: int, N: int) -> Iterator[tuple]:
    """Iterate over ``E_{L,N}`` in lexicographic order."""
    for block in composition_blocks(N, L):
        for row in block:
            yield tuple(int(v) for v in row)


@dataclass(frozen=True)
class BruteMeasure:
    """Exact canonical measure on a small ``E_{L,N}``.

    ``site_marginals[x, n]`` is ``P(eta_x = n)``; ``size_biased_first[n]`` and
    ``size_biased_pair[a, b]`` are the laws of the first one and two entries
    of the size-biased reordering, obtained from its definition.
    """

    L: int
    N: int
    states: np.ndarray
    log_weights: np.ndarray
    log_Z: float
    probs: np.ndarray
    site_marginals: np.ndarray
    size_biased_first: np.ndarray
    size_biased_pair: np.ndarray

    @property
    def Z(self) -> float:
        return math.exp(self.log_Z)


def brute_measure(model: ModelSpec) -> BruteMeasure:
    L, N = model.L, model.N
    states = np.concatenate(list(composition_blocks(N, L)))
    log_w = np.log(model.weights(N))
    lw = log_w[states].sum(axis=1)
    log_Z = float(logsumexp(lw))
    probs = np.exp(lw - log_Z)

    marg = np.zeros((L, N + 1))
    for x in range(L):
        marg[x] = np.bincount(states[:, x], weights=probs, minlength=N + 1)

    first = np.zeros(N + 1)
    pair = np.zeros((N + 1, N + 1))
    if N > 0:
        for x in range(L):
            a = states[:, x]
            p1 = probs * a / N
            first += np.bincount(a, weights=p1, minlength=N + 1)
            rest = N - a
            for y in range(L):
                if y == x:
                    continue
                b = states[:, y]
                with np.errstate(invalid="ignore", divide="ignore"):
                    # all mass taken: the next entry is a uniformly chosen empty site
                    p2 = np.where(rest > 0, b / np.where(rest > 0, rest, 1), 1.0 / (L - 1))
                np.add.at(pair, (a, b), p1 * p2)
    return BruteMeasure(L, N, states, lw, log_Z, probs, marg, first, pair)


def brute_theorem1_check(model: ModelSpec, rhos: Sequence[float], sizes: Sequence[int] = (4, 6, 8)) -> dict:
    """Total-variation distance between the exact single-site marginal and
    the limiting product law ``w(n) Phi^n / z(Phi)``.

    For each density and each system size the model is re-instantiated at
    ``(L, rho L)``; ``rho L`` must be an integer.  Returns
    ``{rho: [tv(L) for L in sizes]}``.
    """
    out = {}
    for rho in rhos:
        tvs = []
        for L in sizes:
            N = rho * L
            if abs(N - round(N)) > 1e-9:
                raise ValueError(f"rho * L = {N} is not an integer")
            m = model.with_size(L, int(round(N)))
            bm = brute_measure(m)
            phi = invert_density(m, rho)
            n = np.arange(m.N + 1)
            if phi == 0.0:
                nu = (n == 0).astype(float)
            else:
                nu = m.bulk.pmf(n) * phi**n / m.bulk.z(phi)
            missing = max(0.0, 1.0 - math.fsum(nu))
            tvs.append(0.5 * (math.fsum(np.abs(bm.site_marginals[0] - nu)) + missing))
        out[rho] = tvs
    return out
