"""Compiled inner loops for the samplers."""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def direct_sample_kernel(log_w, log_z, L, N, rng, out):
    # sequential conditionals P(eta_i = n | m left on l sites) = w(n) Z[l-1, m-n] / Z[l, m]
    m = N
    for i in range(L - 1):
        l = L - i
        u = rng.random()
        base = log_z[l, m]
        cum = 0.0
        n = 0
        while n < m:
            cum += math.exp(log_w[n] + log_z[l - 1, m - n] - base)
            if cum >= u:
                break
            n += 1
        out[i] = n
        m -= n
    out[L - 1] = m


@njit(cache=True, nogil=True)
def zrp_kernel(eta, rates, ring, burn_in, thinning, rng, states, times):
    L = eta.shape[0]
    K = states.shape[0]
    total = 0.0
    for x in range(L):
        total += rates[eta[x]]
    t = 0.0
    k = 0
    next_t = burn_in + thinning
    events = 0
    while k < K:
        if total <= 0.0 or L == 1:
            while k < K:
                states[k, :] = eta
                times[k] = next_t
                k += 1
                next_t = burn_in + (k + 1) * thinning
            break
        t_new = t - math.log(1.0 - rng.random()) / total
        while k < K and next_t <= t_new:
            states[k, :] = eta
            times[k] = next_t
            k += 1
            next_t = burn_in + (k + 1) * thinning
        if k >= K:
            break
        r = rng.random() * total
        x = -1
        acc = 0.0
        last_active = 0
        for j in range(L):
            g = rates[eta[j]]
            if g > 0.0:
                last_active = j
                acc += g
                if r < acc:
                    x = j
                    break
        if x < 0:
            x = last_active
        if ring:
            y = x + 1 if rng.random() < 0.5 else x - 1
            y = (y + L) % L
        else:
            y = int(rng.random() * (L - 1))
            if y >= x:
                y += 1
        total -= rates[eta[x]] + rates[eta[y]]
        eta[x] -= 1
        eta[y] += 1
        total += rates[eta[x]] + rates[eta[y]]
        t = t_new
        events += 1
        if events % 4096 == 0:
            total = 0.0
            for j in range(L):
                total += rates[eta[j]]
    return t
