"""Per-slot delay components for placement/selection decisions.

All functions accept (clouds, users) matrices, either 0/1 indicators or
fractional column-stochastic weights. Users are summed in the outer loop
and resources in the inner loop so results are bit-reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError
from .model import DelayBreakdown, Scenario

__all__ = [
    "switching_delay",
    "queuing_delay",
    "communication_delay",
    "non_switching_delay",
    "total_delay",
    "station_loads",
]


def _as_decision_matrix(s: Scenario, name: str, matrix: np.ndarray) -> np.ndarray:
    out = np.asarray(matrix, dtype=float)
    if out.shape != (s.num_clouds, s.num_users):
        raise DimensionMismatchError(
            f"{name} must have shape ({s.num_clouds}, {s.num_users}), "
            f"got {out.shape}"
        )
    return out


def station_loads(s: Scenario, t: int, y: np.ndarray) -> np.ndarray:
    """Demand-weighted load per station: load[j] = sum_k c_k(t) * y[j, k]."""
    return np.asarray(y, dtype=float) @ s.demand[t]


def switching_delay(s: Scenario, x_now: np.ndarray, x_prev: np.ndarray) -> float:
    """Migration cost between consecutive placements.

    sum_k s_k * sum_i max(x_now[i,k] - x_prev[i,k], 0): each user pays its
    service size for newly acquired placement mass; removals are free.
    """
    x_now = _as_decision_matrix(s, "x_now", x_now)
    x_prev = _as_decision_matrix(s, "x_prev", x_prev)
    total = 0.0
    for k in range(s.num_users):
        gained = 0.0
        for i in range(s.num_clouds):
            diff = x_now[i, k] - x_prev[i, k]
            if diff > 0.0:
                gained += diff
        total += s.service_size[k] * gained
    return float(total)


def queuing_delay(s: Scenario, t: int, y: np.ndarray) -> float:
    """Waiting time at the selected stations.

    sum_k sum_j y[j,k] / (C_j - load_j) with load_j = sum_k c_k(t)*y[j,k].
    Returns +inf as soon as any station carrying selection weight has
    load_j >= C_j (the queue never drains).
    """
    y = _as_decision_matrix(s, "y", y)
    load = station_loads(s, t, y)
    slack = s.bs_capacity - load
    for j in range(s.num_clouds):
        if slack[j] <= 0.0 and np.any(y[j, :] > 0.0):
            return math.inf
    total = 0.0
    for k in range(s.num_users):
        for j in range(s.num_clouds):
            w = y[j, k]
            if w != 0.0:
                total += w / slack[j]
    return float(total)


def communication_delay(s: Scenario, t: int, x: np.ndarray, y: np.ndarray) -> float:
    """Access latency between selected stations and hosting clouds.

    sum_k sum_i sum_j y[j,k] * x[i,k] * latency[t][i][j].
    """
    x = _as_decision_matrix(s, "x", x)
    y = _as_decision_matrix(s, "y", y)
    lat = s.link_latency[t]
    total = 0.0
    for k in range(s.num_users):
        for i in range(s.num_clouds):
            xv = x[i, k]
            if xv == 0.0:
                continue
            for j in range(s.num_clouds):
                w = y[j, k]
                if w != 0.0:
                    total += w * xv * lat[i, j]
    return float(total)


def non_switching_delay(s: Scenario, t: int, x: np.ndarray, y: np.ndarray) -> float:
    """Queuing plus communication delay: the recurring per-slot cost."""
    q = queuing_delay(s, t, y)
    if math.isinf(q):
        return math.inf
    return q + communication_delay(s, t, x, y)


def total_delay(
    s: Scenario,
    t: int,
    x_now: np.ndarray,
    x_prev: np.ndarray,
    y: np.ndarray,
) -> DelayBreakdown:
    """Full slot cost: one-off switching plus recurring queuing/communication."""
    return DelayBreakdown.assemble(
        switching=switching_delay(s, x_now, x_prev),
        queuing=queuing_delay(s, t, y),
        communication=communication_delay(s, t, x_now, y),
    )
