"""Shared builders for test scenarios.

Tests construct raw scenario documents (plain dicts of lists) so the same
data can feed both the package and the independent reference evaluators in
reference.py without either side translating the other's types.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
WALKTHROUGH = REPO_ROOT / "scenarios" / "walkthrough.json"


def make_doc(**overrides):
    """A small well-formed 3-cloud / 2-user / 2-slot scenario document."""
    doc = {
        "num_clouds": 3,
        "num_users": 2,
        "num_slots": 2,
        "bs_capacity": [10.0, 10.0, 10.0],
        "cloud_capacity": [5.0, 5.0, 5.0],
        "service_size": [1.0, 1.0],
        "link_latency": [
            [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
        ],
        "coverage": [
            [[0, 1, 2], [0, 1, 2]],
            [[0, 1, 2], [0, 1, 2]],
        ],
        "demand": [[1.0, 1.0], [1.0, 1.0]],
    }
    doc.update(overrides)
    return doc


def random_doc(seed, m=3, n=3, slots=1, tight=False):
    """Random single-or-multi-slot document with comfortable capacities.

    ``tight`` shrinks station and storage room so capacity constraints bind;
    either way every document passes validation.
    """
    rng = np.random.default_rng(seed)
    lat = rng.uniform(0.5, 5.0, size=(m, m))
    lat = (lat + lat.T) / 2.0
    np.fill_diagonal(lat, 0.0)
    demand = rng.uniform(0.5, 1.5, size=(slots, n))
    sizes = rng.uniform(0.5, 2.0, size=n)
    if tight:
        bs = rng.uniform(1.2, 2.0, size=m) * demand.sum(axis=1).max()
        st = rng.uniform(1.2, 1.6, size=m) * sizes.max()
    else:
        bs = rng.uniform(1.6, 2.5, size=m) * demand.sum(axis=1).max()
        st = rng.uniform(1.2, 2.0, size=m) * sizes.sum()
    coverage = []
    for _ in range(slots):
        per_user = []
        for _ in range(n):
            size = int(rng.integers(2, m + 1)) if m > 1 else 1
            per_user.append(sorted(rng.choice(m, size=size, replace=False).tolist()))
        coverage.append(per_user)
    return {
        "num_clouds": m,
        "num_users": n,
        "num_slots": slots,
        "bs_capacity": bs.tolist(),
        "cloud_capacity": st.tolist(),
        "service_size": sizes.tolist(),
        "link_latency": np.tile(lat, (slots, 1, 1)).tolist(),
        "coverage": coverage,
        "demand": demand.tolist(),
    }


@pytest.fixture
def walkthrough_path() -> Path:
    return WALKTHROUGH
