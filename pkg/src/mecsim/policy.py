"""Online migration control across slots.

The threshold policy keeps a service where it is while the non-switching
delay accumulated since the last migration (T2) stays below beta times the
switching cost of the current candidate (T1); otherwise it migrates. A stay
freezes both the placement and the station selection. Coverage loss or an
overloaded station forces a migration regardless of the comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import oracle as oracle_mod
from .delays import queuing_delay, total_delay
from .errors import InfeasibleError
from .model import ControllerState, DelayBreakdown, Scenario, SlotDecision
from .optimizer import DEFAULT_CONFIG, SolverConfig, solve_slot
from .seeding import ROUNDING, substream_seed

__all__ = [
    "Policy",
    "SlotOutcome",
    "initial_slot",
    "step",
    "run_policy",
    "POLICY_KINDS",
]

POLICY_KINDS = ("threshold", "always", "never", "oracle")


@dataclass(frozen=True)
class Policy:
    """Which controller drives slots 1..end; beta only matters for threshold."""

    kind: str
    beta: float = math.inf

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind: {self.kind!r}")
        if math.isnan(self.beta) or self.beta < 0:
            raise ValueError("beta must be nonnegative")

    @classmethod
    def threshold(cls, beta: float) -> "Policy":
        return cls(kind="threshold", beta=beta)

    @classmethod
    def always(cls) -> "Policy":
        return cls(kind="always")

    @classmethod
    def never(cls) -> "Policy":
        return cls(kind="never")

    @classmethod
    def oracle(cls) -> "Policy":
        return cls(kind="oracle")


@dataclass(frozen=True)
class SlotOutcome:
    """Adopted decision and accounting for one slot."""

    slot: int
    decision: SlotDecision
    migrated: bool
    forced: bool
    delay: DelayBreakdown
    t1_candidate: float    # switching cost of the slot's candidate (0 at slot 0)
    t2_accumulated: float  # accumulator value after the slot


def _stay_feasible(s: Scenario, t: int, d: SlotDecision) -> bool:
    """Previous decision still usable: coverage holds, queues stay finite."""
    for k, j in enumerate(d.selection):
        if j not in s.coverage[t][k]:
            return False
    return math.isfinite(queuing_delay(s, t, d.selection_matrix(s.num_clouds)))


def initial_slot(
    s: Scenario, rng_seed: int, config: SolverConfig = DEFAULT_CONFIG
) -> SlotOutcome:
    """Solve slot 0; there is no prior placement, so switching is 0."""
    decision, _, _ = solve_slot(s, 0, warm_start=None, rng_seed=rng_seed, config=config)
    m = s.num_clouds
    x = decision.placement_matrix(m)
    delay = total_delay(s, 0, x, x, decision.selection_matrix(m))
    return SlotOutcome(
        slot=0,
        decision=decision,
        migrated=False,
        forced=False,
        delay=delay,
        t1_candidate=0.0,
        t2_accumulated=delay.non_switching,
    )


def step(
    s: Scenario,
    t: int,
    state: ControllerState,
    rng_seed: int,
    config: SolverConfig = DEFAULT_CONFIG,
) -> tuple[SlotOutcome, ControllerState]:
    """One threshold-policy slot: candidate solve, compare, adopt."""
    m = s.num_clouds
    prev = state.prev_decision
    x_prev = prev.placement_matrix(m)
    forced = not _stay_feasible(s, t, prev)

    candidate = None
    try:
        candidate, _, _ = solve_slot(
            s, t, warm_start=prev, rng_seed=rng_seed, config=config
        )
    except InfeasibleError:
        if forced:
            raise  # nothing to stay on and nothing to move to
    if candidate is None:
        # candidate unavailable but staying works; keep the decision
        stay = total_delay(s, t, x_prev, x_prev, prev.selection_matrix(m))
        t2 = state.accumulated_t2 + stay.non_switching
        outcome = SlotOutcome(
            slot=t,
            decision=prev,
            migrated=False,
            forced=False,
            delay=stay,
            t1_candidate=math.inf,
            t2_accumulated=t2,
        )
        return outcome, ControllerState(
            prev_decision=prev,
            last_migration_slot=state.last_migration_slot,
            accumulated_t2=t2,
            beta=state.beta,
        )

    x_cand = candidate.placement_matrix(m)
    cand_delay = total_delay(s, t, x_cand, x_prev, candidate.selection_matrix(m))
    t1 = cand_delay.switching

    if not forced:
        stay = total_delay(s, t, x_prev, x_prev, prev.selection_matrix(m))
        t2 = state.accumulated_t2 + stay.non_switching
        threshold = math.inf if math.isinf(state.beta) else state.beta * t1
        if t2 < threshold:
            outcome = SlotOutcome(
                slot=t,
                decision=prev,
                migrated=False,
                forced=False,
                delay=stay,
                t1_candidate=t1,
                t2_accumulated=t2,
            )
            return outcome, ControllerState(
                prev_decision=prev,
                last_migration_slot=state.last_migration_slot,
                accumulated_t2=t2,
                beta=state.beta,
            )

    t2_reset = cand_delay.non_switching
    outcome = SlotOutcome(
        slot=t,
        decision=candidate,
        migrated=True,
        forced=forced,
        delay=cand_delay,
        t1_candidate=t1,
        t2_accumulated=t2_reset,
    )
    return outcome, ControllerState(
        prev_decision=candidate,
        last_migration_slot=t,
        accumulated_t2=t2_reset,
        beta=state.beta,
    )


def _run_always(
    s: Scenario, first: SlotOutcome, rng_seed: int, config: SolverConfig
) -> list[SlotOutcome]:
    outcomes = [first]
    prev = first.decision
    m = s.num_clouds
    for t in range(1, s.num_slots):
        decision, _, _ = solve_slot(
            s, t, warm_start=prev, rng_seed=substream_seed(rng_seed, ROUNDING, t),
            config=config,
        )
        delay = total_delay(
            s, t, decision.placement_matrix(m), prev.placement_matrix(m),
            decision.selection_matrix(m),
        )
        outcomes.append(
            SlotOutcome(
                slot=t,
                decision=decision,
                migrated=True,
                forced=False,
                delay=delay,
                t1_candidate=delay.switching,
                t2_accumulated=delay.non_switching,
            )
        )
        prev = decision
    return outcomes


def _run_never(
    s: Scenario, first: SlotOutcome, rng_seed: int, config: SolverConfig
) -> list[SlotOutcome]:
    outcomes = [first]
    prev = first.decision
    t2 = first.t2_accumulated
    m = s.num_clouds
    for t in range(1, s.num_slots):
        if _stay_feasible(s, t, prev):
            delay = total_delay(
                s, t, prev.placement_matrix(m), prev.placement_matrix(m),
                prev.selection_matrix(m),
            )
            t2 += delay.non_switching
            outcomes.append(
                SlotOutcome(
                    slot=t,
                    decision=prev,
                    migrated=False,
                    forced=False,
                    delay=delay,
                    t1_candidate=0.0,
                    t2_accumulated=t2,
                )
            )
            continue
        decision, _, _ = solve_slot(
            s, t, warm_start=prev, rng_seed=substream_seed(rng_seed, ROUNDING, t),
            config=config,
        )
        delay = total_delay(
            s, t, decision.placement_matrix(m), prev.placement_matrix(m),
            decision.selection_matrix(m),
        )
        t2 = delay.non_switching
        outcomes.append(
            SlotOutcome(
                slot=t,
                decision=decision,
                migrated=True,
                forced=True,
                delay=delay,
                t1_candidate=delay.switching,
                t2_accumulated=t2,
            )
        )
        prev = decision
    return outcomes


def _run_oracle(
    s: Scenario, first: SlotOutcome, config: SolverConfig
) -> list[SlotOutcome]:
    sequence, _ = oracle_mod.offline_optimal(
        s, margin=config.margin, first_decision=first.decision
    )
    outcomes = [first]
    t2 = first.t2_accumulated
    m = s.num_clouds
    for t in range(1, s.num_slots):
        prev, decision = sequence[t - 1], sequence[t]
        delay = total_delay(
            s, t, decision.placement_matrix(m), prev.placement_matrix(m),
            decision.selection_matrix(m),
        )
        migrated = decision != prev
        t2 = delay.non_switching if migrated else t2 + delay.non_switching
        outcomes.append(
            SlotOutcome(
                slot=t,
                decision=decision,
                migrated=migrated,
                forced=migrated and not _stay_feasible(s, t, prev),
                delay=delay,
                t1_candidate=delay.switching,
                t2_accumulated=t2,
            )
        )
    return outcomes


def run_policy(
    s: Scenario,
    policy: Policy,
    rng_seed: int,
    config: SolverConfig = DEFAULT_CONFIG,
) -> list[SlotOutcome]:
    """Run one policy over the whole horizon.

    Slot 0 is solved identically for every policy (same derived sub-seed),
    so runs with a shared run seed are comparable decision-for-decision.
    """
    first = initial_slot(s, substream_seed(rng_seed, ROUNDING, 0), config)
    if policy.kind == "always":
        return _run_always(s, first, rng_seed, config)
    if policy.kind == "never":
        return _run_never(s, first, rng_seed, config)
    if policy.kind == "oracle":
        return _run_oracle(s, first, config)

    outcomes = [first]
    state = ControllerState(
        prev_decision=first.decision,
        last_migration_slot=0,
        accumulated_t2=first.delay.non_switching,
        beta=policy.beta,
    )
    for t in range(1, s.num_slots):
        outcome, state = step(
            s, t, state, substream_seed(rng_seed, ROUNDING, t), config
        )
        outcomes.append(outcome)
    return outcomes
