"""Pure-Python reference kernels.

These mirror the compiled core operation for operation, with identical
floating-point evaluation order, so results are bit-for-bit equal whichever
backend is selected.
"""

from __future__ import annotations

import itertools

import numpy as np


def assignment_energies(gains: np.ndarray, codes, transfer_time: float) -> list[float]:
    """Per-receiver energies for one full code assignment.

    gains is the (K, L, N) power-gain table; codes holds one code index per
    transmitter. Energy at receiver j is transfer_time * sum_p gains[j, p, codes[p]].
    """
    n_rx, n_tx, _ = gains.shape
    g = gains.tolist()
    out = []
    for j in range(n_rx):
        gj = g[j]
        acc = 0.0
        for p in range(n_tx):
            acc += gj[p][codes[p]]
        out.append(transfer_time * acc)
    return out


def search_exhaustive(gains: np.ndarray, transfer_time: float, e_min: float):
    """Enumerate every joint code assignment in lexicographic order.

    Returns (best_feasible_codes, best_feasible_total, best_codes, best_total)
    where the feasible pair is (None, None) if no assignment keeps every
    receiver at or above e_min. Ties keep the lexicographically smallest
    assignment because comparisons are strict.
    """
    n_rx, n_tx, n_codes = gains.shape
    g = gains.tolist()
    best_any = None
    best_any_total = -np.inf
    best_feas = None
    best_feas_total = -np.inf
    for combo in itertools.product(range(n_codes), repeat=n_tx):
        total = 0.0
        feasible = True
        for j in range(n_rx):
            gj = g[j]
            acc = 0.0
            for p in range(n_tx):
                acc += gj[p][combo[p]]
            ej = transfer_time * acc
            if ej < e_min:
                feasible = False
            total += ej
        if total > best_any_total:
            best_any_total = total
            best_any = combo
        if feasible and total > best_feas_total:
            best_feas_total = total
            best_feas = combo
    if best_feas is None:
        return None, None, list(best_any), best_any_total
    return list(best_feas), best_feas_total, list(best_any), best_any_total
