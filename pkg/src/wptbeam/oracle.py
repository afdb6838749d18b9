"""Ground-truth searchers over the discrete code space.

Exhaustive enumeration is the acceptance oracle; the greedy sequential pass is
the cheap reference that matches it whenever the minimum-energy constraint is
inactive (the objective is additive across transmitters).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .env import LinkTable
from .errors import EnumerationCapError

DEFAULT_ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class ExhaustiveResult:
    codes: tuple[int, ...]
    total: float
    feasible: bool
    evaluations: int


@dataclass(frozen=True)
class GreedyResult:
    codes: tuple[int, ...]
    total: float
    evaluations: int


def exhaustive_search(
    links: LinkTable,
    transfer_time: float,
    e_min: float = 0.0,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ExhaustiveResult:
    """Enumerate all N^L joint assignments and keep the best feasible one.

    Feasible means every receiver collects at least e_min. If nothing is
    feasible the unconstrained maximizer is returned with feasible=False.
    Ties go to the lexicographically smallest assignment.
    """
    n_joint = links.n_codes**links.n_tx
    if n_joint > cap:
        raise EnumerationCapError(f"{links.n_codes}^{links.n_tx} = {n_joint} assignments exceed cap {cap}")
    feas, feas_total, best, best_total = _kernels.search_exhaustive(links.gains, transfer_time, e_min)
    if feas is None:
        return ExhaustiveResult(codes=tuple(best), total=best_total, feasible=False, evaluations=n_joint)
    return ExhaustiveResult(codes=tuple(feas), total=feas_total, feasible=True, evaluations=n_joint)


def greedy_sequential_search(links: LinkTable, transfer_time: float) -> GreedyResult:
    """Pick codes one transmitter at a time, maximizing the partial total.

    Transmitters that have not chosen yet contribute nothing, so each choice
    reduces to the argmax of that transmitter's summed column; N evaluations
    per transmitter, N*L overall.
    """
    codes = []
    for p in range(links.n_tx):
        scores = links.gains[:, p, :].sum(axis=0)
        codes.append(int(np.argmax(scores)))
    energies = _kernels.assignment_energies(links.gains, codes, transfer_time)
    total = 0.0
    for e in energies:
        total += e
    return GreedyResult(codes=tuple(codes), total=total, evaluations=links.n_codes * links.n_tx)
